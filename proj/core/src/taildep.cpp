#include "blockfi/taildep.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "blockfi/error.hpp"

namespace blockfi {
namespace {

constexpr double kDust = 1e-9;
constexpr double kNull = 1e-12;

void check_blocks(std::size_t s, const Partition& partition) {
  if (s != partition.size()) {
    fail(ErrorKind::invalid_argument, "tail dependence set and partition disagree on s");
  }
}

}  // namespace

TailDependenceSet::TailDependenceSet(std::size_t s, std::vector<double> lambda)
    : s_(s), lambda_(std::move(lambda)) {
  if (s_ == 0 || s_ > kMaxBlocks) fail(ErrorKind::invalid_argument, "invalid block count");
  if (lambda_.size() != (std::size_t{1} << s_)) {
    fail(ErrorKind::incomplete_input, "lambda table needs 2^s entries");
  }
  lambda_[0] = 0.0;
  for (std::size_t mask = 1; mask < lambda_.size(); ++mask) {
    if (!std::isfinite(lambda_[mask]) || lambda_[mask] < -kDust) {
      fail(ErrorKind::inconsistent_coefficients,
           "lambda for block set mask " + std::to_string(mask) + " is negative");
    }
    lambda_[mask] = std::max(lambda_[mask], 0.0);
  }
}

TailDependenceSet TailDependenceSet::from_extremal(const ExtremalCoefficientSet& eps,
                                                   const Partition& partition) {
  const auto f = detail::union_table(eps, partition);
  return TailDependenceSet(partition.size(), detail::subset_alternating(f, partition.size()));
}

double TailDependenceSet::lambda(BlockMask subset) const {
  if (subset == 0 || (subset & ~full_mask()) != 0) {
    fail(ErrorKind::invalid_argument, "block subset is empty or out of range");
  }
  return lambda_[subset];
}

double TailDependenceSet::tau(BlockMask subset) const {
  const double denom = lambda(subset);
  if (denom <= kNull) {
    fail(ErrorKind::undefined_limit,
         "lambda_S is null (asymptotic independence); tau_S is undefined");
  }
  return lambda_[full_mask()] / denom;
}

double lambda_from_extremal(const ExtremalCoefficientSet& eps, const Partition& partition,
                            std::span<const std::size_t> blocks) {
  const BlockMask target = block_mask(partition, blocks);
  double total = 0.0;
  // Enumerate nonempty submasks of target.
  for (BlockMask t = target; t != 0; t = (t - 1) & target) {
    const double sign = (std::popcount(t) % 2 == 1) ? 1.0 : -1.0;
    total += sign * eps.at(partition.union_of(t));
  }
  if (total < -kDust) {
    fail(ErrorKind::inconsistent_coefficients,
         "lambda_S = " + std::to_string(total) + " is negative");
  }
  return std::max(total, 0.0);
}

double tau_from_extremal(const ExtremalCoefficientSet& eps, const Partition& partition,
                         std::span<const std::size_t> blocks) {
  const double denom = lambda_from_extremal(eps, partition, blocks);
  if (denom <= kNull) {
    fail(ErrorKind::undefined_limit,
         "lambda_S is null (asymptotic independence); tau_S is undefined");
  }
  std::vector<std::size_t> all(partition.size());
  for (std::size_t j = 0; j < all.size(); ++j) all[j] = j + 1;
  return lambda_from_extremal(eps, partition, all) / denom;
}

namespace {

// numerators[k - 1] = sum_{|S|=k} sum_{T subset of S^c} (-1)^{|T|} lambda_{T u S}.
std::vector<double> lambda_numerators(const TailDependenceSet& lambda) {
  const std::size_t s = lambda.blocks();
  const auto h = detail::superset_alternating(lambda.table(), s);
  std::vector<double> num(s, 0.0);
  for (std::size_t mask = 1; mask <= lambda.full_mask(); ++mask) {
    num[static_cast<std::size_t>(std::popcount(mask)) - 1] += h[mask];
  }
  return num;
}

}  // namespace

ExceedanceDistribution exceedance_from_lambda(const TailDependenceSet& lambda,
                                              const Partition& partition) {
  check_blocks(lambda.blocks(), partition);
  const auto num = lambda_numerators(lambda);
  double denom = 0.0;
  for (double v : num) denom += v;
  if (!(denom > kNull)) {
    fail(ErrorKind::undefined_limit, "every exceedance-count numerator is null");
  }
  ExceedanceDistribution dist;
  dist.probs.resize(num.size());
  for (std::size_t k = 0; k < num.size(); ++k) {
    if (num[k] == 0.0) {
      dist.null_terms = true;
      dist.probs[k] = 0.0;
    } else {
      dist.probs[k] = detail::clip_probability(num[k] / denom, "exceedance from lambda");
    }
  }
  return dist;
}

double fi_from_lambda(const TailDependenceSet& lambda, const Partition& partition) {
  check_blocks(lambda.blocks(), partition);
  const auto num = lambda_numerators(lambda);
  double denom = 0.0;
  for (double v : num) denom += v;
  if (!(denom > kNull)) {
    fail(ErrorKind::undefined_limit, "every exceedance-count numerator is null");
  }
  double singles = 0.0;
  for (std::size_t j = 0; j < lambda.blocks(); ++j) singles += lambda.lambda(BlockMask{1} << j);
  return singles / denom;
}

double tau_spectral_factor(const FactorParetoModel& model, const Partition& partition,
                           std::span<const std::size_t> blocks) {
  if (model.dimension() != partition.dimension()) {
    fail(ErrorKind::invalid_argument, "model and partition disagree on dimension");
  }
  const BlockMask target = block_mask(partition, blocks);
  const auto& atoms = model.atoms();
  double numerator = 0.0;
  double denominator = 0.0;
  for (Eigen::Index k = 0; k < atoms.cols(); ++k) {
    double all_min = std::numeric_limits<double>::infinity();
    double sub_min = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < partition.size(); ++j) {
      double block_max = 0.0;
      for (std::size_t i : partition.blocks()[j].members) {
        block_max = std::max(block_max, atoms(static_cast<Eigen::Index>(i - 1), k));
      }
      all_min = std::min(all_min, block_max);
      if (target & (BlockMask{1} << j)) sub_min = std::min(sub_min, block_max);
    }
    numerator += all_min;
    denominator += sub_min;
  }
  if (denominator <= kNull) {
    fail(ErrorKind::undefined_limit, "spectral mass of the S-restricted event is null");
  }
  return numerator / denominator;
}

}  // namespace blockfi
