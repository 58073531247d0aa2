#include "selfnorm/innovations.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace selfnorm {
namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;

double std_normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

}  // namespace

InnovationModel InnovationModel::from_name(std::string_view name) {
  if (name == "rademacher") return InnovationModel(InnovationKind::Rademacher);
  if (name == "gaussian" || name == "standard-gaussian" || name == "normal")
    return InnovationModel(InnovationKind::StandardGaussian);
  if (name == "pareto2" || name == "symmetric-pareto2")
    return InnovationModel(InnovationKind::SymmetricPareto2);
  throw std::invalid_argument("unknown innovation model '" + std::string(name) +
                              "' (expected rademacher, gaussian or pareto2)");
}

std::string InnovationModel::name() const {
  switch (kind_) {
    case InnovationKind::Rademacher: return "rademacher";
    case InnovationKind::StandardGaussian: return "gaussian";
    case InnovationKind::SymmetricPareto2: return "pareto2";
  }
  return "unknown";
}

double InnovationModel::draw(RandomStream& stream) const {
  switch (kind_) {
    case InnovationKind::Rademacher:
      return (stream.bits() & 1u) ? 1.0 : -1.0;
    case InnovationKind::StandardGaussian:
      return stream.normal();
    case InnovationKind::SymmetricPareto2: {
      // |eps| = U^{-1/2} inverts P(|eps| > x) = x^{-2}; the low bit picks the sign.
      const std::uint64_t r = stream.bits();
      const double u = (static_cast<double>(r >> 11) + 0.5) * 0x1.0p-53;
      const double mag = 1.0 / std::sqrt(u);
      return (r & 1u) ? mag : -mag;
    }
  }
  return 0.0;
}

void InnovationModel::sample_into(RandomStream& stream, std::span<double> out) const {
  for (double& v : out) v = draw(stream);
}

std::vector<double> InnovationModel::sample(RandomStream& stream, std::size_t count) const {
  std::vector<double> out(count);
  sample_into(stream, out);
  return out;
}

double InnovationModel::truncated_second_moment(double x) const {
  switch (kind_) {
    case InnovationKind::Rademacher:
      return x >= 1.0 ? 1.0 : 0.0;
    case InnovationKind::StandardGaussian:
      if (x <= 0.0) return 0.0;
      return std::erf(x / std::numbers::sqrt2) - 2.0 * x * std_normal_pdf(x);
    case InnovationKind::SymmetricPareto2:
      return x > 1.0 ? 2.0 * std::log(x) : 0.0;
  }
  return 0.0;
}

double InnovationModel::tail_probability(double x) const {
  switch (kind_) {
    case InnovationKind::Rademacher:
      return x < 1.0 ? 1.0 : 0.0;
    case InnovationKind::StandardGaussian:
      if (x <= 0.0) return 1.0;
      return std::erfc(x / std::numbers::sqrt2);
    case InnovationKind::SymmetricPareto2:
      return x <= 1.0 ? 1.0 : 1.0 / (x * x);
  }
  return 0.0;
}

double InnovationModel::tail_abs_moment(double x) const {
  switch (kind_) {
    case InnovationKind::Rademacher:
      return x < 1.0 ? 1.0 : 0.0;
    case InnovationKind::StandardGaussian:
      return 2.0 * std_normal_pdf(std::max(x, 0.0));
    case InnovationKind::SymmetricPareto2:
      return 2.0 / std::max(x, 1.0);
  }
  return 0.0;
}

double InnovationModel::truncated_abs_third_moment(double x) const {
  switch (kind_) {
    case InnovationKind::Rademacher:
      return x >= 1.0 ? 1.0 : 0.0;
    case InnovationKind::StandardGaussian:
      // 2 * int_0^x t^3 phi(t) dt = 2 (2 phi(0) - (x^2 + 2) phi(x))
      if (x <= 0.0) return 0.0;
      return 2.0 * (2.0 * kInvSqrt2Pi - (x * x + 2.0) * std_normal_pdf(x));
    case InnovationKind::SymmetricPareto2:
      return x > 1.0 ? 2.0 * (x - 1.0) : 0.0;
  }
  return 0.0;
}

double InnovationModel::lower_threshold() const {
  // l(x) > 0 for every x > 1 in all built-in models.
  return 1.0;
}

bool InnovationModel::finite_variance() const {
  return kind_ != InnovationKind::SymmetricPareto2;
}

DaReport check_da_equivalences(const InnovationModel& model,
                               std::span<const double> grid) {
  if (grid.size() < 3)
    throw std::invalid_argument("check_da_equivalences: grid needs at least 3 points");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || (i > 0 && !(grid[i] > grid[i - 1])))
      throw std::invalid_argument(
          "check_da_equivalences: grid must be positive and strictly increasing");
  }
  DaReport report;
  report.infinite_variance = !model.finite_variance();
  for (double x : grid) {
    const double l = model.truncated_second_moment(x);
    if (!(l > 0.0))
      throw std::invalid_argument("check_da_equivalences: l(x) vanishes on the grid");
    report.rows.push_back({x, x * x * model.tail_probability(x) / l,
                           x * model.tail_abs_moment(x) / l,
                           model.truncated_abs_third_moment(x) / (x * l)});
  }
  bool dec = true;
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    const auto& p = report.rows[i - 1];
    const auto& c = report.rows[i];
    dec = dec && c.tail_ratio < p.tail_ratio && c.first_ratio < p.first_ratio &&
          c.third_ratio < p.third_ratio;
  }
  report.decreasing = dec;
  return report;
}

}  // namespace selfnorm
