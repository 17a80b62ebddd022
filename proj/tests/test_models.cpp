#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <blockfi/models.hpp>
#include <blockfi/rng.hpp>

#include "support/expect_error.hpp"
#include "support/oracles.hpp"

using namespace blockfi;

namespace {

// Stable tail dependence function written out per family.
double stdf_oracle(const MevModel& model, const std::vector<double>& x) {
  if (auto* m = std::get_if<LogisticModel>(&model)) {
    double s = 0.0;
    for (double v : x) s += std::pow(v, 1.0 / m->alpha());
    return std::pow(s, m->alpha());
  }
  if (auto* m = std::get_if<AsymmetricLogisticModel>(&model)) {
    double total = 0.0;
    for (std::size_t k = 0; k < m->components(); ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        s += std::pow(m->beta()(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) * x[i],
                      1.0 / m->alphas()[k]);
      }
      total += std::pow(s, m->alphas()[k]);
    }
    return total;
  }
  const auto& f = std::get<FactorParetoModel>(model);
  double total = 0.0;
  for (std::size_t k = 0; k < f.factors(); ++k) {
    double best = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      best = std::max(best, f.atoms()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) * x[i]);
    }
    total += best;
  }
  return total;
}

}  // namespace

TEST(ExtremalCoefficient, Example1FactorValues) {
  const MevModel m = oracle::example1();
  EXPECT_NEAR(extremal_coefficient(m, SubsetKey::full(3)), 12.0 / 8.0, 1e-15);
  EXPECT_NEAR(extremal_coefficient(m, SubsetKey({1, 2})), 12.0 / 8.0, 1e-15);
  EXPECT_NEAR(extremal_coefficient(m, SubsetKey({3})), 1.0, 1e-15);
  EXPECT_NEAR(extremal_coefficient(m, SubsetKey({1, 3})), (4 + 2 + 3) / 8.0, 1e-15);
}

TEST(ExtremalCoefficient, LogisticIsCardinalityPower) {
  const MevModel m = LogisticModel(5, 0.5);
  EXPECT_NEAR(extremal_coefficient(m, SubsetKey({1, 2, 3, 4})), 2.0, 1e-15);
  EXPECT_NEAR(extremal_coefficient(LogisticModel(3, 1.0), SubsetKey::full(3)), 3.0, 1e-15);
}

TEST(ExtremalCoefficient, AsymmetricLogisticMatchesOracle) {
  Eigen::MatrixXd beta(2, 3);
  beta << 0.3, 0.6, 1.0, 0.7, 0.4, 0.0;
  const MevModel m = AsymmetricLogisticModel(beta, {0.4, 0.8});
  for (const auto& a : {std::vector<std::size_t>{1, 2}, {1, 3}, {2, 3}, {1, 2, 3}}) {
    EXPECT_NEAR(extremal_coefficient(m, SubsetKey(a)), oracle::eps(m, a), 1e-13);
  }
}

TEST(ExtremalCoefficient, GaussianIsUnsupported) {
  const MevModel g = GaussianModel(Eigen::MatrixXd::Identity(2, 2));
  EXPECT_FALSE(has_extremal_coefficients(g));
  EXPECT_BLOCKFI_ERROR(extremal_coefficient(g, SubsetKey({1, 2})), ErrorKind::unsupported);
  EXPECT_BLOCKFI_ERROR(extremal_coefficient(LogisticModel(2, 0.5), SubsetKey({1, 3})),
                       ErrorKind::invalid_argument);
}

TEST(StableTailDependence, MatchesOracleAndIsHomogeneous) {
  oracle::Gen gen(7);
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t d = gen.integer(2, 5);
    const auto m = gen.mev(d);
    std::vector<double> x(d);
    for (double& v : x) v = gen.uniform(0.0, 3.0);
    const double l = stable_tail_dependence(m, x);
    EXPECT_NEAR(l, stdf_oracle(m, x), 1e-10 * (1 + l));
    std::vector<double> x2 = x;
    for (double& v : x2) v *= 2.5;
    EXPECT_NEAR(stable_tail_dependence(m, x2), 2.5 * l, 1e-10 * (1 + l));
  }
}

TEST(CopulaValue, DiagonalGivesExtremalCoefficient) {
  const MevModel m = oracle::example1();
  const std::vector<double> u(3, std::exp(-1.0));
  EXPECT_NEAR(copula_value(m, u), std::exp(-12.0 / 8.0), 1e-14);
  const std::vector<double> with_zero{0.0, 0.5, 0.5};
  EXPECT_EQ(copula_value(m, with_zero), 0.0);
  const std::vector<double> bad{1.2, 0.5, 0.5};
  EXPECT_BLOCKFI_ERROR(copula_value(m, bad), ErrorKind::invalid_argument);
}

TEST(Models, ConstructionValidation) {
  EXPECT_BLOCKFI_ERROR(LogisticModel(3, 0.0), ErrorKind::invalid_argument);
  EXPECT_BLOCKFI_ERROR(LogisticModel(3, 1.5), ErrorKind::invalid_argument);
  EXPECT_BLOCKFI_ERROR(LogisticModel(0, 0.5), ErrorKind::invalid_argument);
  Eigen::MatrixXd beta(1, 2);
  beta << 0.5, 1.0;  // first column does not sum to 1
  EXPECT_BLOCKFI_ERROR(AsymmetricLogisticModel(beta, {0.5}), ErrorKind::invalid_argument);
  Eigen::MatrixXd lambda(1, 2);
  lambda << 0.5, 0.6;
  EXPECT_BLOCKFI_ERROR(FactorParetoModel(lambda, 1.0), ErrorKind::invalid_argument);
  Eigen::MatrixXd sigma(2, 2);
  sigma << 1, 1.2, 1.2, 1;
  EXPECT_BLOCKFI_ERROR(GaussianModel{sigma}, ErrorKind::invalid_argument);
  sigma << 1, 0.2, 0.3, 1;
  EXPECT_BLOCKFI_ERROR(GaussianModel{sigma}, ErrorKind::invalid_argument);
}

TEST(Sampling, DeterministicForSeedAndSingleRowAllowed) {
  const MevModel m = LogisticModel(3, 0.4);
  const auto a = sample(m, 50, 11);
  const auto b = sample(m, 50, 11);
  EXPECT_TRUE(a.values() == b.values());
  EXPECT_FALSE(a.values() == sample(m, 50, 12).values());
  const auto one = sample(oracle::example1(), 1, 5);
  EXPECT_EQ(one.rows(), 1u);
  // Each margin is a weighted sum of unit-or-larger Pareto(1) draws with unit weights sum.
  EXPECT_TRUE((one.values().array() >= 1.0 - 1e-12).all());
  EXPECT_EQ(one.labels()[2], "X3");
}

// For an MEV sample with unit Fréchet margins, P(max_{i in A} X_i <= 1) = exp(-eps_A).
TEST(Sampling, LogisticFamiliesReproduceExtremalCoefficients) {
  Eigen::MatrixXd beta(2, 3);
  beta << 0.3, 0.6, 1.0, 0.7, 0.4, 0.0;
  const std::vector<MevModel> models{LogisticModel(3, 0.3), LogisticModel(3, 0.8),
                                     AsymmetricLogisticModel(beta, {0.4, 0.8})};
  const std::size_t n = 200000;
  for (const auto& m : models) {
    const auto data = sample(m, n, 2024);
    for (const auto& a : {std::vector<std::size_t>{1}, {1, 2}, {2, 3}, {1, 2, 3}}) {
      std::size_t below = 0;
      for (Eigen::Index r = 0; r < data.values().rows(); ++r) {
        double mx = 0.0;
        for (std::size_t i : a) mx = std::max(mx, data.values()(r, static_cast<Eigen::Index>(i - 1)));
        below += mx <= 1.0;
      }
      const double p = static_cast<double>(below) / static_cast<double>(n);
      EXPECT_NEAR(p, std::exp(-oracle::eps(m, a)), 0.005) << family_name(m);
    }
  }
}

// Far in the tail, P(max_{i in A} X_i > x) / P(X_1 > x) approaches eps_A.
TEST(Sampling, FactorTailRatiosApproachExtremalCoefficients) {
  const MevModel m = oracle::example1();
  const auto data = sample(m, 400000, 99);
  const double x = 200.0;
  auto exceed = [&](std::vector<std::size_t> a) {
    std::size_t c = 0;
    for (Eigen::Index r = 0; r < data.values().rows(); ++r) {
      bool any = false;
      for (std::size_t i : a) any = any || data.values()(r, static_cast<Eigen::Index>(i - 1)) > x;
      c += any;
    }
    return static_cast<double>(c);
  };
  const double base = exceed({3});
  EXPECT_NEAR(exceed({1, 2, 3}) / base, 1.5, 0.1);
  EXPECT_NEAR(exceed({1, 3}) / base, 9.0 / 8.0, 0.1);
}

TEST(Sampling, GaussianCovariance) {
  Eigen::MatrixXd sigma(3, 3);
  sigma << 1, 0.5, -0.3, 0.5, 1, 0.2, -0.3, 0.2, 1;
  const auto data = sample(GaussianModel(sigma), 100000, 3);
  const Eigen::MatrixXd centered = data.values().rowwise() - data.values().colwise().mean();
  const Eigen::MatrixXd cov = centered.transpose() * centered / 100000.0;
  EXPECT_LT((cov - sigma).cwiseAbs().maxCoeff(), 0.02);
}

TEST(PositiveStable, LaplaceTransform) {
  Rng rng(17);
  for (double alpha : {0.25, 0.5, 0.9}) {
    double acc = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) acc += std::exp(-positive_stable(alpha, rng.uniform(), rng.exponential()));
    EXPECT_NEAR(acc / n, std::exp(-1.0), 0.004) << alpha;
  }
  EXPECT_EQ(positive_stable(1.0, 0.3, 0.7), 1.0);
}

TEST(Rng, SubstreamsDifferAndUniformIsOpen) {
  EXPECT_NE(substream_seed(1, 0), substream_seed(1, 1));
  EXPECT_EQ(substream_seed(5, 3), splitmix64(8));
  Rng rng(0);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}
