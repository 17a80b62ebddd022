#include "blockfi/asympt_indep.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <set>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "blockfi/rng.hpp"

namespace blockfi {
namespace {

constexpr double kConditionLimit = 1e12;
constexpr double kTol = 1e-9;

bool near(double a, double b) { return std::abs(a - b) <= kTol * std::max(1.0, std::abs(b)); }

}  // namespace

void for_each_transversal(const Partition& partition,
                          const std::function<void(const SubsetKey&)>& visit) {
  const auto blocks = partition.blocks();
  std::vector<std::size_t> cursor(blocks.size(), 0);
  std::vector<std::size_t> members(blocks.size());
  for (;;) {
    for (std::size_t j = 0; j < blocks.size(); ++j) members[j] = blocks[j].members[cursor[j]];
    visit(SubsetKey(members));
    std::size_t j = 0;
    for (; j < blocks.size(); ++j) {
      if (++cursor[j] < blocks[j].members.size()) break;
      cursor[j] = 0;
    }
    if (j == blocks.size()) return;
  }
}

double eta_gaussian(const Eigen::MatrixXd& sigma, const SubsetKey& subset) {
  const auto idx = subset.indices();
  if (idx.back() > static_cast<std::size_t>(sigma.rows())) {
    fail(ErrorKind::invalid_argument, "subset exceeds the correlation matrix dimension");
  }
  const auto n = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd sub(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      sub(a, b) = sigma(static_cast<Eigen::Index>(idx[a] - 1), static_cast<Eigen::Index>(idx[b] - 1));
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sub, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > kConditionLimit) {
    fail(ErrorKind::numeric, "correlation submatrix for " + subset.to_string() +
                                 " is singular or ill-conditioned");
  }
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  const double quad = ones.dot(sub.llt().solve(ones));
  return 1.0 / quad;
}

double eta_gaussian(const GaussianModel& model, const SubsetKey& subset) {
  return eta_gaussian(model.sigma(), subset);
}

std::string to_string(Association a) {
  switch (a) {
    case Association::positive: return "positive";
    case Association::negative: return "negative";
    case Association::unknown: break;
  }
  return "unknown";
}

Association gaussian_association(const GaussianModel& model) {
  const auto& s = model.sigma();
  bool nonneg = true;
  bool nonpos = true;
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    for (Eigen::Index j = 0; j < s.cols(); ++j) {
      if (i == j) continue;
      nonneg = nonneg && s(i, j) >= 0.0;
      nonpos = nonpos && s(i, j) <= 0.0;
    }
  }
  if (nonneg) return Association::positive;
  if (nonpos) return Association::negative;
  return Association::unknown;
}

EtaBounds eta_bounds(double eta_D, std::span<const double> eta_blocks, const Partition& partition,
                     Association association) {
  if (eta_blocks.size() != partition.size()) {
    fail(ErrorKind::invalid_argument, "need one eta per block");
  }
  const double s = static_cast<double>(partition.size());
  const double d = static_cast<double>(partition.dimension());
  EtaBounds b;
  b.aifi = eta_block_aifi<double>(eta_D, eta_blocks);
  b.eta_D = eta_D;
  b.association = association;
  b.inverse_s = 1.0 / s;
  double inv_sum = 0.0;
  double lowest = 1.0;
  for (double v : eta_blocks) {
    inv_sum += 1.0 / v;
    lowest = std::min(lowest, v);
  }
  b.total_dependence_value = lowest / s * inv_sum;
  b.independent_within_value = eta_D * d / s;

  const double slack = kTol * std::max(1.0, b.aifi);
  bool holds = b.aifi <= b.total_dependence_value + slack && b.aifi >= eta_D - slack;
  if (association == Association::positive) {
    holds = holds && b.aifi >= b.inverse_s - slack && b.aifi <= b.independent_within_value + slack;
  } else if (association == Association::negative) {
    holds = holds && b.aifi <= b.inverse_s + slack && b.aifi >= b.independent_within_value - slack;
  }
  b.holds = holds;
  b.independent_blocks = near(b.aifi, b.inverse_s);
  b.totally_dependent_blocks = near(b.aifi, b.total_dependence_value);
  b.independent_within = near(b.aifi, b.independent_within_value);
  b.totally_dependent_within = near(b.aifi, eta_D);
  return b;
}

EtaReport eta_report_gaussian(const GaussianModel& model, const Partition& partition) {
  if (model.dimension() != partition.dimension()) {
    fail(ErrorKind::invalid_argument, "model and partition disagree on dimension");
  }
  EtaReport r;
  r.eta_D = eta_gaussian(model, SubsetKey::full(partition.dimension()));
  for (const auto& block : partition.blocks()) {
    r.eta_blocks.push_back(eta_gaussian(model, SubsetKey(block.members)));
  }
  r.eta_block_aifi = eta_block_aifi<double>(r.eta_D, r.eta_blocks);
  r.eta_combination = eta_combination<double>(
      [&](const SubsetKey& t) { return eta_gaussian(model, t); }, partition);
  r.association = gaussian_association(model);
  return r;
}

double eta_mev(const MevModel& model, const SubsetKey& subset) {
  // Coordinate-level joint exceedance intensity over A by inclusion-exclusion.
  const auto idx = subset.indices();
  if (idx.size() > 20) fail(ErrorKind::invalid_argument, "subset too large for enumeration");
  const std::uint32_t full = (std::uint32_t{1} << idx.size()) - 1;
  double lambda = 0.0;
  for (std::uint32_t t = 1; t <= full; ++t) {
    std::vector<std::size_t> members;
    for (std::size_t b = 0; b < idx.size(); ++b) {
      if (t & (std::uint32_t{1} << b)) members.push_back(idx[b]);
    }
    const double sign = (std::popcount(t) % 2 == 1) ? 1.0 : -1.0;
    lambda += sign * extremal_coefficient(model, SubsetKey(std::move(members)));
  }
  if (lambda > kTol) return 1.0;
  fail(ErrorKind::unsupported,
       "coordinates " + subset.to_string() +
           " are not jointly tail dependent; no closed-form eta for this MEV model");
}

// MinParetoStructure ----------------------------------------------------------

MinParetoStructure::MinParetoStructure(std::vector<std::vector<std::size_t>> latent_sets)
    : sets_(std::move(latent_sets)) {
  if (sets_.empty()) fail(ErrorKind::invalid_argument, "need at least one variable");
  if (sets_.size() > 20) fail(ErrorKind::invalid_argument, "at most 20 variables supported");
  for (auto& set : sets_) {
    if (set.empty()) fail(ErrorKind::invalid_argument, "latent sets must be nonempty");
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
    if (set.front() == 0) fail(ErrorKind::invalid_argument, "latent indices are 1-based");
    latents_ = std::max(latents_, set.back());
  }
}

namespace {

std::size_t union_size(std::span<const std::vector<std::size_t>> sets,
                       std::span<const std::size_t> coords) {
  std::set<std::size_t> all;
  for (std::size_t i : coords) all.insert(sets[i - 1].begin(), sets[i - 1].end());
  return all.size();
}

// P(union_{i in coords} {X_i > x}) as a polynomial in 1/x: exponent -> coefficient.
std::map<std::size_t, std::int64_t> union_polynomial(std::span<const std::vector<std::size_t>> sets,
                                                     std::span<const std::size_t> coords) {
  std::map<std::size_t, std::int64_t> poly;
  const std::uint32_t full = (std::uint32_t{1} << coords.size()) - 1;
  std::vector<std::size_t> chosen;
  for (std::uint32_t t = 1; t <= full; ++t) {
    chosen.clear();
    for (std::size_t b = 0; b < coords.size(); ++b) {
      if (t & (std::uint32_t{1} << b)) chosen.push_back(coords[b]);
    }
    poly[union_size(sets, chosen)] += (std::popcount(t) % 2 == 1) ? 1 : -1;
  }
  return poly;
}

std::pair<std::size_t, std::int64_t> leading_term(const std::map<std::size_t, std::int64_t>& poly) {
  for (const auto& [exponent, coef] : poly) {
    if (coef != 0) return {exponent, coef};
  }
  fail(ErrorKind::numeric, "exceedance probability vanishes identically");
}

}  // namespace

Fraction MinParetoStructure::eta(const SubsetKey& subset) const {
  if (subset.indices().back() > dimension()) {
    fail(ErrorKind::invalid_argument, "subset exceeds the structure dimension");
  }
  std::int64_t margins = 0;
  for (std::size_t i : subset.indices()) margins += static_cast<std::int64_t>(sets_[i - 1].size());
  const auto joint = static_cast<std::int64_t>(union_size(sets_, subset.indices()));
  return Fraction(margins, static_cast<std::int64_t>(subset.size()) * joint);
}

Fraction MinParetoStructure::block_aifi_direct(const Partition& partition) const {
  if (partition.dimension() != dimension()) {
    fail(ErrorKind::invalid_argument, "partition and structure disagree on dimension");
  }
  std::int64_t blocks = 0;
  for (const auto& block : partition.blocks()) {
    blocks += static_cast<std::int64_t>(union_size(sets_, block.members));
  }
  const auto all = static_cast<std::int64_t>(union_size(sets_, SubsetKey::full(dimension()).indices()));
  return Fraction(blocks, static_cast<std::int64_t>(partition.size()) * all);
}

Fraction MinParetoStructure::combination_direct(const Partition& partition) const {
  if (partition.dimension() != dimension()) {
    fail(ErrorKind::invalid_argument, "partition and structure disagree on dimension");
  }
  // log P(block j exceeds) ~ -min_{i in I_j} |L_i| log x; the joint event is a
  // union over transversals, led by the smallest transversal union.
  std::int64_t numerator = 0;
  for (const auto& block : partition.blocks()) {
    std::size_t lowest = SIZE_MAX;
    for (std::size_t i : block.members) lowest = std::min(lowest, sets_[i - 1].size());
    numerator += static_cast<std::int64_t>(lowest);
  }
  std::size_t joint = SIZE_MAX;
  for_each_transversal(partition, [&](const SubsetKey& t) {
    joint = std::min(joint, union_size(sets_, t.indices()));
  });
  return Fraction(numerator, static_cast<std::int64_t>(partition.size()) *
                                 static_cast<std::int64_t>(joint));
}

Fraction MinParetoStructure::fragility_index(const Partition& partition) const {
  if (partition.dimension() != dimension()) {
    fail(ErrorKind::invalid_argument, "partition and structure disagree on dimension");
  }
  std::map<std::size_t, std::int64_t> numerator;
  for (const auto& block : partition.blocks()) {
    for (const auto& [e, c] : union_polynomial(sets_, block.members)) numerator[e] += c;
  }
  const auto [num_exp, num_coef] = leading_term(numerator);
  const auto [den_exp, den_coef] =
      leading_term(union_polynomial(sets_, SubsetKey::full(dimension()).indices()));
  if (num_exp != den_exp) fail(ErrorKind::numeric, "mismatched leading exceedance orders");
  return Fraction(num_coef, den_coef);
}

EtaReport MinParetoStructure::eta_report(const Partition& partition) const {
  EtaReport r;
  r.eta_D = eta(SubsetKey::full(dimension())).to_double();
  std::vector<Fraction> blocks;
  for (const auto& block : partition.blocks()) {
    blocks.push_back(eta(SubsetKey(block.members)));
    r.eta_blocks.push_back(blocks.back().to_double());
  }
  r.eta_block_aifi = eta_block_aifi<Fraction>(eta(SubsetKey::full(dimension())), blocks).to_double();
  r.eta_combination =
      eta_combination<Fraction>([&](const SubsetKey& t) { return eta(t); }, partition).to_double();
  r.association = Association::positive;
  r.fi_exceeds_one = fragility_index(partition) > Fraction(1);
  return r;
}

Dataset MinParetoStructure::sample(std::size_t n, std::uint64_t seed) const {
  if (n == 0) fail(ErrorKind::invalid_argument, "sample size must be at least 1");
  Rng rng(seed);
  Eigen::MatrixXd values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dimension()));
  std::vector<double> latent(latents_);
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (double& v : latent) v = 1.0 / rng.uniform();
    for (std::size_t i = 0; i < sets_.size(); ++i) {
      double m = latent[sets_[i].front() - 1];
      for (std::size_t l : sets_[i]) m = std::min(m, latent[l - 1]);
      values(r, static_cast<Eigen::Index>(i)) = m;
    }
  }
  return Dataset(std::move(values), default_labels(dimension()));
}

MinParetoStructure chained_min_pareto() { return MinParetoStructure({{1, 2}, {2, 3}, {3, 4}}); }

}  // namespace blockfi
