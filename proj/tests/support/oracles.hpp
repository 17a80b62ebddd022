#pragma once

// Independent reference computations used only by the tests. They share no
// code with the library routes they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Core>

#include <blockfi/core.hpp>
#include <blockfi/models.hpp>

namespace oracle {

using blockfi::BlockMask;

inline int popcount(BlockMask m) { return __builtin_popcount(m); }

/// eps over the union of the blocks selected by `mask`, by explicit union.
inline std::vector<std::size_t> union_members(const blockfi::Partition& p, BlockMask mask) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (mask & (1u << j)) {
      const auto& m = p.blocks()[j].members;
      out.insert(out.end(), m.begin(), m.end());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Exact closed-form eps_A, written out per family.
inline double eps(const blockfi::MevModel& model, const std::vector<std::size_t>& a) {
  if (auto* m = std::get_if<blockfi::LogisticModel>(&model)) {
    return std::pow(static_cast<double>(a.size()), m->alpha());
  }
  if (auto* m = std::get_if<blockfi::AsymmetricLogisticModel>(&model)) {
    double total = 0.0;
    for (std::size_t k = 0; k < m->components(); ++k) {
      double inner = 0.0;
      for (std::size_t i : a) {
        inner += std::pow(m->beta()(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i - 1)),
                          1.0 / m->alphas()[k]);
      }
      total += std::pow(inner, m->alphas()[k]);
    }
    return total;
  }
  const auto& f = std::get<blockfi::FactorParetoModel>(model);
  double total = 0.0;
  for (std::size_t k = 0; k < f.factors(); ++k) {
    double best = 0.0;
    for (std::size_t i : a) {
      best = std::max(best, std::pow(f.lambda()(static_cast<Eigen::Index>(i - 1),
                                                static_cast<Eigen::Index>(k)),
                                     f.alpha()));
    }
    total += best;
  }
  return total;
}

/// P(N = k | N > 0) by Möbius inversion over "exceedances confined to V":
/// B(V) = A(all) - A(complement of V); exactly-S mass = sum_{V in S} (-1)^{|S|-|V|} B(V).
/// Runs in O(3^s), independent of the library's O(s 2^s) transforms.
inline std::vector<double> exceedance_bruteforce(const std::function<double(BlockMask)>& a,
                                                 std::size_t s) {
  const BlockMask full = (1u << s) - 1;
  auto A = [&](BlockMask m) { return m == 0 ? 0.0 : a(m); };
  std::vector<double> p(s, 0.0);
  for (BlockMask S = 1; S <= full; ++S) {
    double mass = 0.0;
    for (BlockMask V = S;; V = (V - 1) & S) {
      const double b = A(full) - A(full & ~V);
      mass += ((popcount(S) - popcount(V)) % 2 == 0 ? 1.0 : -1.0) * b;
      if (V == 0) break;
    }
    p[static_cast<std::size_t>(popcount(S)) - 1] += mass;
  }
  for (double& v : p) v /= A(full);
  return p;
}

/// Same distribution from the factor model's spectral atoms: along atom k the
/// blocks with level b_j = max_{i in I_j} a_ik exceed in decreasing order of b_j,
/// so exactly the top-t blocks exceed on a radial interval of length b_(t) - b_(t+1).
inline std::vector<double> exceedance_spectral(const blockfi::FactorParetoModel& m,
                                               const blockfi::Partition& p) {
  const std::size_t s = p.size();
  std::vector<double> mass(s, 0.0);
  double total = 0.0;
  for (std::size_t k = 0; k < m.factors(); ++k) {
    std::vector<double> b;
    for (const auto& block : p.blocks()) {
      double v = 0.0;
      for (std::size_t i : block.members) {
        v = std::max(v, m.atoms()(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(k)));
      }
      b.push_back(v);
    }
    std::sort(b.begin(), b.end(), std::greater<>());
    total += b[0];
    for (std::size_t t = 0; t < s; ++t) {
      const double next = t + 1 < s ? b[t + 1] : 0.0;
      mass[t] += b[t] - next;
    }
  }
  for (double& v : mass) v /= total;
  return mass;
}

// Seeded generators for property tests -------------------------------------

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  std::size_t integer(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  }

  /// Random ordered partition of {1..d} into nonempty blocks.
  blockfi::Partition partition(std::size_t d) {
    std::vector<std::size_t> perm(d);
    for (std::size_t i = 0; i < d; ++i) perm[i] = i + 1;
    std::shuffle(perm.begin(), perm.end(), rng);
    const std::size_t s = integer(1, d);
    std::vector<std::vector<std::size_t>> members(s);
    for (std::size_t j = 0; j < s; ++j) members[j].push_back(perm[j]);
    for (std::size_t i = s; i < d; ++i) members[integer(0, s - 1)].push_back(perm[i]);
    return blockfi::Partition::from_members(d, members);
  }

  /// A partition that refines `coarse` by splitting each block at random.
  blockfi::Partition refinement(const blockfi::Partition& coarse) {
    std::vector<std::vector<std::size_t>> members;
    for (const auto& b : coarse.blocks()) {
      auto m = b.members;
      std::shuffle(m.begin(), m.end(), rng);
      const std::size_t pieces = integer(1, m.size());
      std::vector<std::vector<std::size_t>> split(pieces);
      for (std::size_t t = 0; t < pieces; ++t) split[t].push_back(m[t]);
      for (std::size_t t = pieces; t < m.size(); ++t) split[integer(0, pieces - 1)].push_back(m[t]);
      for (auto& piece : split) members.push_back(piece);
    }
    return blockfi::Partition::from_members(coarse.dimension(), members);
  }

  blockfi::MevModel logistic(std::size_t d) { return blockfi::LogisticModel(d, uniform(0.05, 1.0)); }

  blockfi::MevModel asymmetric_logistic(std::size_t d) {
    const std::size_t q = integer(1, 4);
    Eigen::MatrixXd beta(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(d));
    for (Eigen::Index k = 0; k < beta.rows(); ++k) {
      for (Eigen::Index i = 0; i < beta.cols(); ++i) {
        beta(k, i) = uniform(0.0, 1.0) < 0.2 ? 0.0 : uniform(0.01, 1.0);
      }
    }
    for (Eigen::Index i = 0; i < beta.cols(); ++i) {
      if (beta.col(i).sum() == 0.0) beta(0, i) = 1.0;
      beta.col(i) /= beta.col(i).sum();
    }
    std::vector<double> alphas(q);
    for (double& a : alphas) a = uniform(0.1, 1.0);
    return blockfi::AsymmetricLogisticModel(beta, alphas);
  }

  blockfi::MevModel factor(std::size_t d) {
    const std::size_t m = integer(1, 5);
    const double alpha = uniform(0.5, 3.0);
    Eigen::MatrixXd lambda(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(m));
    for (Eigen::Index i = 0; i < lambda.rows(); ++i) {
      for (Eigen::Index k = 0; k < lambda.cols(); ++k) {
        lambda(i, k) = uniform(0.0, 1.0) < 0.25 ? 0.0 : uniform(0.01, 1.0);
      }
      if (lambda.row(i).sum() == 0.0) lambda(i, 0) = 1.0;
      const double norm = lambda.row(i).array().pow(alpha).sum();
      lambda.row(i) /= std::pow(norm, 1.0 / alpha);
    }
    return blockfi::FactorParetoModel(lambda, alpha);
  }

  blockfi::MevModel mev(std::size_t d) {
    switch (integer(0, 2)) {
      case 0: return logistic(d);
      case 1: return asymmetric_logistic(d);
      default: return factor(d);
    }
  }

  /// Random correlation matrix from normalised random factor loadings.
  Eigen::MatrixXd correlation(std::size_t d, bool nonnegative) {
    const auto n = static_cast<Eigen::Index>(d);
    Eigen::MatrixXd w(n, n + 1);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index k = 0; k <= n; ++k) {
        w(i, k) = nonnegative ? uniform(0.0, 1.0) : uniform(-1.0, 1.0);
      }
    }
    Eigen::MatrixXd c = w * w.transpose();
    c.diagonal().array() += 0.3;
    const Eigen::VectorXd scale = c.diagonal().cwiseSqrt().cwiseInverse();
    return scale.asDiagonal() * c * scale.asDiagonal();
  }
};

/// Example 1 factor weights (rows are variables, columns factors), alpha = 1.
inline blockfi::FactorParetoModel example1() {
  Eigen::MatrixXd lambda(3, 3);
  lambda << 4, 2, 2, 1, 1, 6, 3, 2, 3;
  return blockfi::FactorParetoModel(lambda / 8.0, 1.0);
}

}  // namespace oracle
