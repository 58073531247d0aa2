#pragma once

#include <fftw3.h>

#include <memory>
#include <mutex>

namespace selfnorm::detail {

// FFTW planning is not thread-safe; execution with the new-array API is.
std::mutex& fftw_planner_mutex();

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
using RealBuf = std::unique_ptr<double, FftwFree>;
using ComplexBuf = std::unique_ptr<fftw_complex, FftwFree>;

}  // namespace selfnorm::detail
