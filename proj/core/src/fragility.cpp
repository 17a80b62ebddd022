#include "blockfi/fragility.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "blockfi/error.hpp"

namespace blockfi {
namespace {

constexpr double kDust = 1e-9;
constexpr std::size_t kMonotoneCheckLimit = 2048;

bool near(double a, double b) { return std::abs(a - b) <= kDust * std::max(1.0, std::abs(b)); }

std::vector<double> block_eps(const ExtremalCoefficientSet& eps, const Partition& partition) {
  std::vector<double> out(partition.size());
  for (std::size_t j = 0; j < partition.size(); ++j) {
    out[j] = eps.at(partition.union_of(BlockMask{1} << j));
  }
  return out;
}

void check_dimension(const ExtremalCoefficientSet& eps, const Partition& partition) {
  if (eps.dimension() != partition.dimension()) {
    fail(ErrorKind::invalid_argument, "coefficient set and partition disagree on dimension");
  }
}

// Exponent-measure table for tail-equivalent margins:
// f[B] = -log C(exp(-gamma_i 1{i in I(B)})).
std::vector<double> equiv_table(const LogCopula& copula, const MarginSpec& gamma,
                                const Partition& partition) {
  const std::size_t d = partition.dimension();
  if (gamma.dimension() != d) {
    fail(ErrorKind::invalid_argument, "gamma length does not match the partition dimension");
  }
  const std::size_t s = partition.size();
  std::vector<double> f(std::size_t{1} << s, 0.0);
  std::vector<double> x(d);
  for (BlockMask mask = 1; mask <= partition.full_mask(); ++mask) {
    std::fill(x.begin(), x.end(), 0.0);
    const auto members = partition.union_of(mask);
    for (std::size_t i : members.indices()) x[i - 1] = gamma.gamma()[i - 1];
    f[mask] = -copula(x);
  }
  if (!(f[partition.full_mask()] > 0.0)) {
    fail(ErrorKind::undefined_limit, "log C(e^-gamma) is zero; the limit is undefined");
  }
  return f;
}

}  // namespace

// ExtremalCoefficientSet ------------------------------------------------------

ExtremalCoefficientSet::ExtremalCoefficientSet(std::size_t d,
                                               std::map<SubsetKey, double> coefficients)
    : d_(d), coefficients_(std::move(coefficients)) {
  for (const auto& [key, value] : coefficients_) {
    if (key.indices().back() > d_) {
      fail(ErrorKind::invalid_argument, "subset " + key.to_string() + " exceeds dimension");
    }
    const double size = static_cast<double>(key.size());
    if (!std::isfinite(value) || value < 1.0 - kDust || value > size + kDust * size) {
      fail(ErrorKind::inconsistent_coefficients,
           "eps" + key.to_string() + " = " + std::to_string(value) + " outside [1, |A|]");
    }
  }
  if (coefficients_.size() <= kMonotoneCheckLimit) {
    for (auto a = coefficients_.begin(); a != coefficients_.end(); ++a) {
      for (auto b = coefficients_.begin(); b != coefficients_.end(); ++b) {
        if (a != b && a->first.is_subset_of(b->first) &&
            a->second > b->second + kDust * std::max(1.0, b->second)) {
          fail(ErrorKind::inconsistent_coefficients,
               "eps" + a->first.to_string() + " exceeds eps" + b->first.to_string());
        }
      }
    }
  }
}

ExtremalCoefficientSet ExtremalCoefficientSet::from_model(const MevModel& model,
                                                          const Partition& partition) {
  if (blockfi::dimension(model) != partition.dimension()) {
    fail(ErrorKind::invalid_argument, "model and partition disagree on dimension");
  }
  return from_function(partition,
                       [&](const SubsetKey& key) { return extremal_coefficient(model, key); });
}

ExtremalCoefficientSet ExtremalCoefficientSet::from_function(
    const Partition& partition, const std::function<double(const SubsetKey&)>& eps) {
  std::map<SubsetKey, double> table;
  for (BlockMask mask = 1; mask <= partition.full_mask(); ++mask) {
    auto key = partition.union_of(mask);
    const double value = eps(key);
    table.emplace(std::move(key), value);
  }
  return ExtremalCoefficientSet(partition.dimension(), std::move(table));
}

double ExtremalCoefficientSet::at(const SubsetKey& subset) const {
  auto it = coefficients_.find(subset);
  if (it == coefficients_.end()) {
    fail(ErrorKind::incomplete_input, "missing extremal coefficient for " + subset.to_string());
  }
  return it->second;
}

double ExceedanceDistribution::mean() const {
  double m = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) m += static_cast<double>(k + 1) * probs[k];
  return m;
}

// detail ----------------------------------------------------------------------

namespace detail {

std::vector<double> union_table(const ExtremalCoefficientSet& eps, const Partition& partition) {
  check_dimension(eps, partition);
  std::vector<double> f(std::size_t{1} << partition.size(), 0.0);
  for (BlockMask mask = 1; mask <= partition.full_mask(); ++mask) {
    f[mask] = eps.at(partition.union_of(mask));
  }
  return f;
}

std::vector<double> superset_alternating(std::span<const double> f, std::size_t s) {
  std::vector<double> h(f.begin(), f.end());
  const std::size_t size = std::size_t{1} << s;
  for (std::size_t bit = 1; bit < size; bit <<= 1) {
    for (std::size_t mask = 0; mask < size; ++mask) {
      if (!(mask & bit)) h[mask] -= h[mask | bit];
    }
  }
  return h;
}

std::vector<double> subset_alternating(std::span<const double> f, std::size_t s) {
  const std::size_t size = std::size_t{1} << s;
  std::vector<double> g(size);
  for (std::size_t mask = 0; mask < size; ++mask) {
    g[mask] = (std::popcount(mask) % 2 == 1) ? f[mask] : -f[mask];
  }
  g[0] = 0.0;
  for (std::size_t bit = 1; bit < size; bit <<= 1) {
    for (std::size_t mask = 0; mask < size; ++mask) {
      if (mask & bit) g[mask] += g[mask ^ bit];
    }
  }
  return g;
}

double clip_probability(double p, const char* context) {
  if (!std::isfinite(p) || p < -kDust || p > 1.0 + kDust) {
    fail(ErrorKind::inconsistent_coefficients,
         std::string(context) + ": probability " + std::to_string(p) +
             " outside [0, 1]; the input is not a valid exponent measure");
  }
  return std::clamp(p, 0.0, 1.0);
}

ExceedanceDistribution exceedance_from_union_table(std::span<const double> f, std::size_t s) {
  const std::size_t full = (std::size_t{1} << s) - 1;
  const double total = f[full];
  if (!(total > 0.0)) fail(ErrorKind::undefined_limit, "exponent measure of D is zero");
  // Inner sum over T subset of S of (-1)^{|T|+1} f(T u S^c) equals -h(S^c).
  const auto h = superset_alternating(f, s);
  std::vector<double> raw(s, 0.0);
  for (std::size_t mask = 1; mask <= full; ++mask) {
    raw[static_cast<std::size_t>(std::popcount(mask)) - 1] -= h[full ^ mask];
  }
  ExceedanceDistribution dist;
  dist.probs.resize(s);
  for (std::size_t k = 0; k < s; ++k) {
    dist.probs[k] = clip_probability(raw[k] / total, "exceedance distribution");
  }
  return dist;
}

}  // namespace detail

// Operations ------------------------------------------------------------------

LogCopula log_copula(const MevModel& model) {
  if (!has_extremal_coefficients(model)) {
    fail(ErrorKind::unsupported, "the Gaussian model has no MEV copula");
  }
  return [model](std::span<const double> x) { return -stable_tail_dependence(model, x); };
}

double fragility_index(const ExtremalCoefficientSet& eps, const Partition& partition) {
  check_dimension(eps, partition);
  const auto blocks = block_eps(eps, partition);
  const double eps_d = eps.at(SubsetKey::full(partition.dimension()));
  return std::accumulate(blocks.begin(), blocks.end(), 0.0) / eps_d;
}

double fragility_index_logistic(const Partition& partition, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    fail(ErrorKind::invalid_argument, "logistic alpha must lie in (0, 1]");
  }
  const double d = static_cast<double>(partition.dimension());
  double fi = 0.0;
  for (const auto& block : partition.blocks()) {
    fi += std::pow(static_cast<double>(block.members.size()) / d, alpha);
  }
  return fi;
}

ExceedanceDistribution exceedance_distribution(const ExtremalCoefficientSet& eps,
                                               const Partition& partition) {
  const auto f = detail::union_table(eps, partition);
  return detail::exceedance_from_union_table(f, partition.size());
}

ExceedanceDistribution exceedance_distribution_equiv(const LogCopula& copula,
                                                     const MarginSpec& gamma,
                                                     const Partition& partition) {
  const auto f = equiv_table(copula, gamma, partition);
  return detail::exceedance_from_union_table(f, partition.size());
}

double fragility_index_equiv(const LogCopula& copula, const MarginSpec& gamma,
                             const Partition& partition) {
  const std::size_t d = partition.dimension();
  if (gamma.dimension() != d) {
    fail(ErrorKind::invalid_argument, "gamma length does not match the partition dimension");
  }
  const double total = -copula(gamma.gamma());
  if (!(total > 0.0)) {
    fail(ErrorKind::undefined_limit, "log C(e^-gamma) is zero; the limit is undefined");
  }
  std::vector<double> x(d);
  double numerator = 0.0;
  for (const auto& block : partition.blocks()) {
    std::fill(x.begin(), x.end(), 0.0);
    for (std::size_t i : block.members) x[i - 1] = gamma.gamma()[i - 1];
    numerator += -copula(x);
  }
  return numerator / total;
}

FragilityBounds fragility_bounds(const ExtremalCoefficientSet& eps, const Partition& partition) {
  check_dimension(eps, partition);
  const auto blocks = block_eps(eps, partition);
  const double eps_d = eps.at(SubsetKey::full(partition.dimension()));
  const double sum = std::accumulate(blocks.begin(), blocks.end(), 0.0);
  const double peak = *std::max_element(blocks.begin(), blocks.end());
  const double fi = sum / eps_d;

  FragilityBounds b;
  b.inter_upper = sum / peak;
  b.intra_lower = static_cast<double>(partition.size()) / eps_d;
  b.intra_upper = static_cast<double>(partition.dimension()) / eps_d;
  b.independent_blocks = near(fi, 1.0);
  b.totally_dependent_blocks = near(fi, b.inter_upper);
  b.independent_within = near(fi, b.intra_upper);
  b.totally_dependent_within = near(fi, b.intra_lower);
  return b;
}

double convex_combination_identity(const ExtremalCoefficientSet& eps, const Partition& partition) {
  check_dimension(eps, partition);
  const double d = static_cast<double>(partition.dimension());
  const double fi_all = d / eps.at(SubsetKey::full(partition.dimension()));
  const auto blocks = block_eps(eps, partition);
  double total = 0.0;
  for (std::size_t j = 0; j < partition.size(); ++j) {
    const double size = static_cast<double>(partition.blocks()[j].members.size());
    const double fi_block = size / blocks[j];
    total += (size / d) * fi_all / fi_block;
  }
  return total;
}

PowerIdentity power_identity_check(const MevModel& model, const Partition& partition,
                                   std::span<const double> x) {
  const std::size_t d = partition.dimension();
  if (dimension(model) != d || x.size() != d) {
    fail(ErrorKind::invalid_argument, "model, partition and x must share the dimension");
  }
  const double level = x.front();
  if (!(level > 0.0) || !std::isfinite(level)) {
    fail(ErrorKind::invalid_argument, "x must be positive");
  }
  for (double v : x) {
    if (v != level) {
      fail(ErrorKind::invalid_argument,
           "the power identity is only available along the diagonal (equal components)");
    }
  }
  // Unit Fréchet margins: G(y) = C(exp(-1/y)), so -log G(y) = l(1/y).
  std::vector<double> arg(d, 1.0 / level);
  PowerIdentity out;
  out.lhs = std::exp(-stable_tail_dependence(model, arg));

  const auto eps = ExtremalCoefficientSet::from_model(model, partition);
  const double fi = fragility_index(eps, partition);
  double log_prod = 0.0;
  for (const auto& block : partition.blocks()) {
    std::fill(arg.begin(), arg.end(), 0.0);
    for (std::size_t i : block.members) arg[i - 1] = 1.0 / level;
    log_prod -= stable_tail_dependence(model, arg);
  }
  out.rhs = std::exp(log_prod / fi);
  return out;
}

FragilityReport fragility_report(const ExtremalCoefficientSet& eps, const Partition& partition) {
  FragilityReport report;
  report.fi = fragility_index(eps, partition);
  for (const auto& block : partition.blocks()) report.block_names.push_back(block.name);
  report.eps_blocks = block_eps(eps, partition);
  report.eps_D = eps.at(SubsetKey::full(partition.dimension()));
  report.distribution = exceedance_distribution(eps, partition);
  report.bounds = fragility_bounds(eps, partition);
  return report;
}

}  // namespace blockfi
