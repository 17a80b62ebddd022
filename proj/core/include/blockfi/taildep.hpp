#pragma once

// Block upper-tail dependence: lambda_S is the joint exceedance intensity of
// the blocks in S and tau_S = lambda_{1..s} / lambda_S the probability that the
// remaining blocks exceed given that those in S do.

#include <span>
#include <vector>

#include "blockfi/core.hpp"
#include "blockfi/fragility.hpp"
#include "blockfi/models.hpp"

namespace blockfi {

/// lambda over every nonempty block subset, indexed by BlockMask.
class TailDependenceSet {
 public:
  /// `lambda` has 2^s entries; entry 0 is ignored.
  TailDependenceSet(std::size_t s, std::vector<double> lambda);

  static TailDependenceSet from_extremal(const ExtremalCoefficientSet& eps,
                                         const Partition& partition);

  std::size_t blocks() const noexcept { return s_; }
  BlockMask full_mask() const noexcept { return static_cast<BlockMask>((BlockMask{1} << s_) - 1); }
  double lambda(BlockMask subset) const;
  /// lambda_full / lambda_S; throws `undefined_limit` when lambda_S is null.
  double tau(BlockMask subset) const;
  std::span<const double> table() const noexcept { return lambda_; }

 private:
  std::size_t s_;
  std::vector<double> lambda_;
};

/// sum over nonempty T subset of S of (-1)^{|T|+1} eps_I(T).
double lambda_from_extremal(const ExtremalCoefficientSet& eps, const Partition& partition,
                            std::span<const std::size_t> blocks);
double tau_from_extremal(const ExtremalCoefficientSet& eps, const Partition& partition,
                         std::span<const std::size_t> blocks);

/// Exceedance-count distribution from tail dependence coefficients. An exactly
/// null numerator gives p_k = 0 and sets `null_terms`; all-null is undefined.
ExceedanceDistribution exceedance_from_lambda(const TailDependenceSet& lambda,
                                              const Partition& partition);
double fi_from_lambda(const TailDependenceSet& lambda, const Partition& partition);

/// tau_S from the factor model's discrete spectral atoms:
/// sum_k min_j max_{i in I_j} a_ik / sum_k min_{j in S} max_{i in I_j} a_ik.
double tau_spectral_factor(const FactorParetoModel& model, const Partition& partition,
                           std::span<const std::size_t> blocks);

}  // namespace blockfi
