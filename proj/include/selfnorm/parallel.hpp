#pragma once

#include <cstddef>
#include <functional>

namespace selfnorm {

/// Number of workers to use when the caller passes 0.
std::size_t default_workers();

/// Calls body(i) for i = 0..count-1 on up to `workers` threads (0 means
/// default_workers()). Indices are claimed dynamically, so body must write
/// only to slots owned by i; the first exception thrown by any call is
/// rethrown after all workers stop.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace selfnorm
