#include "blockfi/serialize.hpp"

#include <cmath>
#include <fstream>

#include "blockfi/asympt_indep.hpp"
#include "blockfi/error.hpp"

namespace blockfi {
namespace {

[[noreturn]] void bad(const std::string& msg) { fail(ErrorKind::configuration, msg); }

const Json& field(const Json& j, const char* key) {
  if (!j.contains(key)) bad(std::string("model is missing \"") + key + "\"");
  return j.at(key);
}

double number(const Json& j, const std::string& what) {
  if (!j.is_number()) bad(what + " must be a number");
  return j.get<double>();
}

std::size_t count(const Json& j, const std::string& what) {
  if (!j.is_number_integer() || j.get<long long>() < 1) bad(what + " must be a positive integer");
  return j.get<std::size_t>();
}

std::vector<double> numbers(const Json& j, const std::string& what) {
  if (!j.is_array()) bad(what + " must be an array");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(number(v, what + " entry"));
  return out;
}

// Nested rows, or a flat row-major array when `cols` is known.
Eigen::MatrixXd matrix(const Json& j, const std::string& what, std::optional<std::size_t> rows,
                       std::optional<std::size_t> cols) {
  if (!j.is_array() || j.empty()) bad(what + " must be a non-empty array");
  if (j.front().is_array()) {
    const std::size_t r = j.size();
    const std::size_t c = j.front().size();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    for (std::size_t i = 0; i < r; ++i) {
      const auto row = numbers(j[i], what + " row");
      if (row.size() != c) bad(what + " rows differ in length");
      for (std::size_t k = 0; k < c; ++k) {
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row[k];
      }
    }
    return m;
  }
  const auto flat = numbers(j, what);
  std::size_t r = 0;
  std::size_t c = 0;
  if (cols) {
    c = *cols;
    r = flat.size() / c;
  } else if (rows) {
    r = *rows;
    c = flat.size() / r;
  } else {
    bad(what + " given flat needs \"d\"");
  }
  if (r * c != flat.size() || r == 0) bad(what + " has the wrong number of entries");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t k = 0; k < c; ++k) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = flat[i * c + k];
    }
  }
  return m;
}

Json matrix_json(const Eigen::MatrixXd& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    out.push_back(row);
  }
  return out;
}

Json block_positions(BlockMask mask) {
  Json out = Json::array();
  for (std::size_t j : mask_positions(mask)) out.push_back(j);
  return out;
}

// NaN and infinities have no JSON literal; they are written as null.
Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

MevModel build_model(const Json& j) {
  const auto family = field(j, "family");
  if (!family.is_string()) bad("\"family\" must be a string");
  const auto name = family.get<std::string>();
  std::optional<std::size_t> d;
  if (j.contains("d")) d = count(j.at("d"), "\"d\"");

  if (name == "logistic") {
    if (!d) bad("logistic model needs \"d\"");
    return LogisticModel(*d, number(field(j, "alpha"), "\"alpha\""));
  }
  if (name == "asymmetric_logistic") {
    auto alphas = numbers(field(j, "alphas"), "\"alphas\"");
    auto beta = matrix(field(j, "beta"), "\"beta\"", alphas.size(), d);
    return AsymmetricLogisticModel(std::move(beta), std::move(alphas));
  }
  if (name == "factor_pareto") {
    auto lambda = matrix(field(j, "lambda"), "\"lambda\"", d, std::nullopt);
    return FactorParetoModel(std::move(lambda), number(field(j, "alpha"), "\"alpha\""));
  }
  if (name == "gaussian") {
    if (j.contains("rho")) {
      if (!d) bad("equicorrelated gaussian model needs \"d\"");
      const double rho = number(j.at("rho"), "\"rho\"");
      Eigen::MatrixXd sigma = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(*d),
                                                        static_cast<Eigen::Index>(*d), rho);
      sigma.diagonal().setOnes();
      return GaussianModel(std::move(sigma));
    }
    return GaussianModel(matrix(field(j, "sigma"), "\"sigma\"", d, d));
  }
  bad("unknown model family \"" + name + "\"");
}

}  // namespace

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    bad("'" + path + "' is not valid JSON: " + e.what());
  }
}

ModelConfig model_from_json(const Json& j) {
  if (!j.is_object()) bad("model configuration must be a JSON object");
  MevModel model = [&] {
    try {
      return build_model(j);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::configuration) throw;
      bad(std::string("invalid model parameters: ") + e.what());
    } catch (const Json::exception& e) {
      bad(std::string("malformed model configuration: ") + e.what());
    }
  }();
  const std::size_t d = dimension(model);
  if (j.contains("d") && j.at("d").get<std::size_t>() != d) {
    bad("\"d\" does not match the parameter dimensions");
  }
  std::vector<std::string> labels = default_labels(d);
  if (j.contains("labels")) {
    const auto& l = j.at("labels");
    if (!l.is_array() || l.size() != d) bad("\"labels\" must list one name per coordinate");
    labels.clear();
    for (const auto& s : l) {
      if (!s.is_string()) bad("\"labels\" entries must be strings");
      labels.push_back(s.get<std::string>());
    }
  }
  return {std::move(model), std::move(labels)};
}

Json model_to_json(const MevModel& model, std::span<const std::string> labels) {
  Json j;
  j["family"] = family_name(model);
  j["d"] = dimension(model);
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, LogisticModel>) {
          j["alpha"] = m.alpha();
        } else if constexpr (std::is_same_v<T, AsymmetricLogisticModel>) {
          j["alphas"] = std::vector<double>(m.alphas().begin(), m.alphas().end());
          j["beta"] = matrix_json(m.beta());
        } else if constexpr (std::is_same_v<T, FactorParetoModel>) {
          j["alpha"] = m.alpha();
          j["lambda"] = matrix_json(m.lambda());
        } else {
          j["sigma"] = matrix_json(m.sigma());
        }
      },
      model);
  j["labels"] = std::vector<std::string>(labels.begin(), labels.end());
  return j;
}

std::vector<BlockConfig> partition_config_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("blocks") || !j.at("blocks").is_array()) {
    bad("partition must be an object with a \"blocks\" array");
  }
  std::vector<BlockConfig> out;
  for (const auto& b : j.at("blocks")) {
    if (!b.is_object() || !b.contains("name") || !b.at("name").is_string() ||
        !b.contains("members") || !b.at("members").is_array()) {
      bad("each block needs a string \"name\" and a \"members\" array");
    }
    BlockConfig cfg{b.at("name").get<std::string>(), {}};
    for (const auto& m : b.at("members")) {
      if (!m.is_string()) bad("block members must be column labels (strings)");
      cfg.members.push_back(m.get<std::string>());
    }
    out.push_back(std::move(cfg));
  }
  return out;
}

Partition partition_from_json(const Json& j, std::span<const std::string> labels) {
  const auto configs = partition_config_from_json(j);
  return validate_partition(labels, configs);
}

Json to_json(const ExceedanceDistribution& dist) {
  Json probs = Json::array();
  for (double p : dist.probs) probs.push_back(num(p));
  return {{"probs", probs}, {"mean", num(dist.probs.empty() ? NAN : dist.mean())},
          {"null_terms", dist.null_terms}};
}

Json to_json(const FragilityBounds& b) {
  return {{"inter_lower", num(b.inter_lower)},
          {"inter_upper", num(b.inter_upper)},
          {"intra_lower", num(b.intra_lower)},
          {"intra_upper", num(b.intra_upper)},
          {"independent_blocks", b.independent_blocks},
          {"totally_dependent_blocks", b.totally_dependent_blocks},
          {"independent_within", b.independent_within},
          {"totally_dependent_within", b.totally_dependent_within}};
}

Json to_json(const FragilityReport& r) {
  Json blocks = Json::array();
  for (std::size_t j = 0; j < r.eps_blocks.size(); ++j) {
    blocks.push_back({{"name", j < r.block_names.size() ? r.block_names[j] : ""},
                      {"eps", num(r.eps_blocks[j])}});
  }
  Json out = {{"fi", num(r.fi)}, {"eps_blocks", blocks}, {"eps_D", num(r.eps_D)},
              {"bounds", to_json(r.bounds)}};
  out["exceedance_probs"] = r.distribution.probs.empty() ? Json(nullptr) : to_json(r.distribution);
  return out;
}

Json to_json(const TailDependenceSet& lambda) {
  Json lam = Json::array();
  Json tau = Json::array();
  for (BlockMask s = 1; s <= lambda.full_mask(); ++s) {
    lam.push_back({{"blocks", block_positions(s)}, {"value", num(lambda.lambda(s))}});
    if (s == lambda.full_mask()) continue;
    Json t = {{"blocks", block_positions(s)}};
    if (lambda.lambda(s) > 1e-12) {
      t["value"] = num(lambda.tau(s));
    } else {
      t["value"] = nullptr;
      t["note"] = "undefined: lambda_S is null";
    }
    tau.push_back(t);
  }
  return {{"lambda", lam}, {"tau", tau}};
}

Json to_json(const EtaBounds& b) {
  return {{"aifi", num(b.aifi)},
          {"inverse_s", num(b.inverse_s)},
          {"total_dependence_value", num(b.total_dependence_value)},
          {"independent_within_value", num(b.independent_within_value)},
          {"eta_D", num(b.eta_D)},
          {"association", to_string(b.association)},
          {"holds", b.holds},
          {"independent_blocks", b.independent_blocks},
          {"totally_dependent_blocks", b.totally_dependent_blocks},
          {"independent_within", b.independent_within},
          {"totally_dependent_within", b.totally_dependent_within}};
}

Json to_json(const EtaReport& r) {
  Json blocks = Json::array();
  for (double v : r.eta_blocks) blocks.push_back(num(v));
  return {{"eta_D", num(r.eta_D)},
          {"eta_blocks", blocks},
          {"eta_block_aifi", num(r.eta_block_aifi)},
          {"eta_combination", num(r.eta_combination)},
          {"association", to_string(r.association)},
          {"fi_exceeds_one", r.fi_exceeds_one}};
}

Json to_json(const EpsEstimate& e) {
  return {{"value", num(e.value)}, {"raw", num(e.raw)}, {"mbar", num(e.mbar)}};
}

Json to_json(const ScalarEstimate& e) {
  return {{"value", num(e.value)}, {"raw", num(e.raw)}, {"k", e.k}};
}

Json to_json(const FragilityEstimate& e) {
  Json blocks = Json::array();
  for (std::size_t j = 0; j < e.eps_blocks.size(); ++j) {
    Json b = to_json(e.eps_blocks[j]);
    b["name"] = e.report.block_names[j];
    b["fi_block"] = num(e.fi_blocks[j]);
    blocks.push_back(b);
  }
  Json out = {{"n", e.n},
              {"fi", num(e.report.fi)},
              {"fi_raw", num(e.fi_raw)},
              {"eps_blocks", blocks},
              {"eps_D", to_json(e.eps_D)},
              {"fi_global", num(e.fi_global)},
              {"bounds", to_json(e.report.bounds)}};
  out["exceedance_probs"] =
      e.report.distribution.probs.empty() ? Json(nullptr) : to_json(e.report.distribution);
  if (!e.distribution_note.empty()) out["distribution_note"] = e.distribution_note;
  return out;
}

Json to_json(const EtaEstimate& e) {
  Json out = to_json(e.report);
  out["eta_D_estimate"] = to_json(e.eta_D);
  Json blocks = Json::array();
  for (const auto& b : e.eta_blocks) blocks.push_back(to_json(b));
  out["eta_block_estimates"] = blocks;
  out["fi_hat"] = num(e.fi_hat);
  return out;
}

Json to_json(const McReport& r) {
  Json quantities = Json::object();
  for (const auto& q : r.quantities) {
    Json points = Json::array();
    for (const auto& p : q.empirical_by_u) {
      points.push_back({{"u", p.u ? Json(*p.u) : Json(nullptr)}, {"value", num(p.value)}});
    }
    quantities[q.name] = {{"closed_form", num(q.closed_form)},
                          {"empirical_by_u", points},
                          {"abs_error", num(q.abs_error)},
                          {"tolerance", q.tolerance},
                          {"pass", q.pass},
                          {"converging", q.converging}};
  }
  return {{"family", r.family},     {"n", r.n},
          {"seed", r.seed},         {"replicates", r.replicates},
          {"pass", r.pass},         {"quantities", quantities}};
}

}  // namespace blockfi
