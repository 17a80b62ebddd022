#include <gtest/gtest.h>

#include <blockfi/taildep.hpp>

#include "support/expect_error.hpp"
#include "support/oracles.hpp"

using namespace blockfi;

namespace {

const Partition kTwoBlocks = Partition::from_members(3, {{1, 2}, {3}});

// lambda_S by inclusion-exclusion written directly over subsets of S.
double lambda_oracle(const MevModel& m, const Partition& p, BlockMask s) {
  double total = 0.0;
  for (BlockMask t = s; t != 0; t = (t - 1) & s) {
    total += (oracle::popcount(t) % 2 ? 1.0 : -1.0) * oracle::eps(m, oracle::union_members(p, t));
  }
  return total;
}

}  // namespace

TEST(TailDependence, Example1Values) {
  const auto eps = ExtremalCoefficientSet::from_model(oracle::example1(), kTwoBlocks);
  const std::vector<std::size_t> both{1, 2};
  const std::vector<std::size_t> first{1};
  EXPECT_NEAR(lambda_from_extremal(eps, kTwoBlocks, both), 1.0, 1e-14);
  EXPECT_NEAR(lambda_from_extremal(eps, kTwoBlocks, first), 1.5, 1e-14);
  EXPECT_NEAR(tau_from_extremal(eps, kTwoBlocks, first), 2.0 / 3.0, 1e-14);
  EXPECT_NEAR(tau_spectral_factor(oracle::example1(), kTwoBlocks, first), 2.0 / 3.0, 1e-14);
  const auto set = TailDependenceSet::from_extremal(eps, kTwoBlocks);
  EXPECT_NEAR(set.lambda(0b11), 1.0, 1e-14);
  EXPECT_NEAR(set.tau(0b10), 1.0, 1e-14);
  const auto dist = exceedance_from_lambda(set, kTwoBlocks);
  EXPECT_NEAR(dist.probs[0], 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(dist.probs[1], 2.0 / 3.0, 1e-14);
  EXPECT_NEAR(fi_from_lambda(set, kTwoBlocks), 20.0 / 12.0, 1e-14);
}

TEST(TailDependence, SingleFactorIsTotallyDependent) {
  Eigen::MatrixXd lambda = Eigen::MatrixXd::Ones(4, 1);
  const FactorParetoModel m(lambda, 2.0);
  const auto p = Partition::from_members(4, {{1}, {2, 3}, {4}});
  for (const auto& s : {std::vector<std::size_t>{1}, {2}, {1, 3}}) {
    EXPECT_NEAR(tau_spectral_factor(m, p, s), 1.0, 1e-14);
  }
}

TEST(TailDependence, IndependenceGivesUndefinedTauAndNullTerms) {
  const auto p = Partition::from_members(4, {{1, 2}, {3}, {4}});
  const auto set = TailDependenceSet::from_extremal(
      ExtremalCoefficientSet::from_model(LogisticModel(4, 1.0), p), p);
  EXPECT_NEAR(set.lambda(0b011), 0.0, 1e-15);
  EXPECT_BLOCKFI_ERROR(set.tau(0b011), ErrorKind::undefined_limit);
  EXPECT_NEAR(set.tau(0b001), 0.0, 1e-15);
  const auto dist = exceedance_from_lambda(set, p);
  EXPECT_NEAR(dist.probs[0], 1.0, 1e-14);
  EXPECT_TRUE(dist.null_terms);
}

TEST(TailDependence, RoutesAgreeOnRandomModels) {
  oracle::Gen gen(505);
  for (int rep = 0; rep < 120; ++rep) {
    const std::size_t d = gen.integer(2, 6);
    const auto m = gen.mev(d);
    const auto p = gen.partition(d);
    const auto eps = ExtremalCoefficientSet::from_model(m, p);
    const auto set = TailDependenceSet::from_extremal(eps, p);
    for (BlockMask s = 1; s <= p.full_mask(); ++s) {
      EXPECT_NEAR(set.lambda(s), lambda_oracle(m, p, s), 1e-9);
      EXPECT_GE(set.lambda(s), -1e-9);
    }
    const auto a = exceedance_distribution(eps, p);
    const auto b = exceedance_from_lambda(set, p);
    for (std::size_t k = 0; k < p.size(); ++k) EXPECT_NEAR(a.probs[k], b.probs[k], 1e-9);
    EXPECT_NEAR(fi_from_lambda(set, p), fragility_index(eps, p), 1e-9);
    if (auto* f = std::get_if<FactorParetoModel>(&m)) {
      for (BlockMask s = 1; s < p.full_mask(); ++s) {
        if (set.lambda(s) <= 1e-12) continue;
        const auto blocks = mask_positions(s);
        EXPECT_NEAR(tau_spectral_factor(*f, p, blocks), set.tau(s), 1e-9);
        EXPECT_NEAR(tau_from_extremal(eps, p, blocks), set.tau(s), 1e-12);
      }
    }
  }
}

TEST(TailDependence, RejectsBadInput) {
  EXPECT_BLOCKFI_ERROR(TailDependenceSet(2, {0.0, 1.0}), ErrorKind::incomplete_input);
  const auto eps = ExtremalCoefficientSet::from_model(oracle::example1(), kTwoBlocks);
  const std::vector<std::size_t> out_of_range{3};
  EXPECT_BLOCKFI_ERROR(lambda_from_extremal(eps, kTwoBlocks, out_of_range), ErrorKind::invalid_argument);
  const std::vector<std::size_t> none;
  EXPECT_BLOCKFI_ERROR(lambda_from_extremal(eps, kTwoBlocks, none), ErrorKind::invalid_argument);
}
