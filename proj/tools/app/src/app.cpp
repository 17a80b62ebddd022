#include "blockfi_app/app.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include <blockfi/asympt_indep.hpp>
#include <blockfi/error.hpp>
#include <blockfi/io.hpp>

namespace blockfi::app {
namespace {

const std::string& need(const std::optional<std::string>& path, const char* flag) {
  if (!path) fail(ErrorKind::configuration, std::string(flag) + " is required");
  return *path;
}

EstimatorConfig estimator_config(const RunConfig& c) {
  EstimatorConfig e;
  e.k_lambda = c.k;
  e.k_hill = c.k;
  return e;
}

Json partition_json(const Partition& partition, std::span<const std::string> labels) {
  Json out = Json::array();
  for (const auto& b : partition.blocks()) {
    Json members = Json::array();
    for (std::size_t i : b.members) members.push_back(labels[i - 1]);
    out.push_back({{"name", b.name}, {"members", members}});
  }
  return out;
}

std::string emit(const Json& report, Format format) {
  return format == Format::json ? report.dump(2) + "\n" : render_flat(report);
}

std::string run_theoretical(const RunConfig& c) {
  const auto model = model_from_json(read_json_file(need(c.model, "--model")));
  const auto partition =
      partition_from_json(read_json_file(need(c.partition, "--partition")), model.labels);
  Json report = {{"family", family_name(model.model)},
                 {"d", partition.dimension()},
                 {"partition", partition_json(partition, model.labels)}};
  if (has_extremal_coefficients(model.model)) {
    const auto eps = ExtremalCoefficientSet::from_model(model.model, partition);
    report["fragility"] = to_json(fragility_report(eps, partition));
    report["tail_dependence"] = to_json(TailDependenceSet::from_extremal(eps, partition));
    const auto singletons = Partition::singletons(partition.dimension());
    report["fi_singletons"] =
        fragility_index(ExtremalCoefficientSet::from_model(model.model, singletons), singletons);
  } else {
    const auto& g = std::get<GaussianModel>(model.model);
    const auto eta = eta_report_gaussian(g, partition);
    report["eta"] = to_json(eta);
    report["eta_bounds"] =
        to_json(eta_bounds(eta.eta_D, eta.eta_blocks, partition, eta.association));
  }
  return emit(report, c.format);
}

std::string run_estimate(const RunConfig& c, std::string& diagnostics) {
  auto loaded = load_csv(need(c.data, "--data"));
  if (loaded.rows_dropped > 0) {
    diagnostics += "warning: dropped " + std::to_string(loaded.rows_dropped) +
                   " rows with missing or non-numeric values\n";
  }
  Dataset data = std::move(loaded.data);
  if (c.neg_log_returns) data = neg_log_returns(data);
  std::optional<std::size_t> months_dropped;
  if (c.monthly_maxima) {
    auto monthly = monthly_block_maxima(data, c.min_obs);
    months_dropped = monthly.months_dropped;
    if (monthly.months_dropped > 0) {
      diagnostics += "warning: dropped " + std::to_string(monthly.months_dropped) +
                     " months with fewer than " + std::to_string(c.min_obs) + " observations\n";
    }
    data = std::move(monthly.data);
  }
  const auto partition =
      partition_from_json(read_json_file(need(c.partition, "--partition")), data.labels());
  const auto pit = pit_transform(data);
  const auto est = fi_hat(pit, partition, estimator_config(c));
  const auto table = make_table(est, partition);

  Json blocks = Json::array();
  for (std::size_t j = 0; j < table.block_names.size(); ++j) {
    blocks.push_back({{"name", table.block_names[j]},
                      {"size", table.block_sizes[j]},
                      {"eps_hat", table.eps_blocks[j]},
                      {"fi_hat", est.fi_blocks[j]}});
  }
  Json details = to_json(est);
  details["rows_dropped"] = loaded.rows_dropped;
  if (months_dropped) details["months_dropped"] = *months_dropped;
  Json report = {{"table",
                  {{"blocks", blocks},
                   {"global", {{"eps_hat", table.eps_D}, {"fi_hat", est.fi_global}}},
                   {"fi_partition", table.fi}}},
                 {"details", details}};
  if (c.format == Format::json) return report.dump(2) + "\n";
  return render_table(table) + "\n" + render_flat(details);
}

std::string run_simulate(const RunConfig& c, std::string& diagnostics) {
  if (c.format == Format::json) {
    fail(ErrorKind::configuration, "simulate writes CSV; --format json is not available");
  }
  const auto model = model_from_json(read_json_file(need(c.model, "--model")));
  const std::size_t n = c.n.value_or(1000);
  if (n < 1) fail(ErrorKind::configuration, "-n must be at least 1");
  std::uint64_t seed = 0;
  if (c.seed) {
    seed = *c.seed;
  } else {
    std::random_device rd;
    seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }
  diagnostics += "seed: " + std::to_string(seed) + "\n";
  std::ostringstream out;
  write_csv(out, sample(model.model, n, seed, model.labels));
  return out.str();
}

std::string run_mc_check(const RunConfig& c) {
  if (!c.seed) fail(ErrorKind::configuration, "mc-check requires --seed for reproducibility");
  const auto model = model_from_json(read_json_file(need(c.model, "--model")));
  McCheckSpec spec{
      .model = model.model,
      .partition = partition_from_json(read_json_file(need(c.partition, "--partition")),
                                       model.labels),
      .u = c.u,
      .n = c.n.value_or(100000),
      .seed = *c.seed,
      .replicates = 1,
      .tolerances = {},
      .estimator = estimator_config(c)};
  return emit(to_json(mc_check(spec)), c.format);
}

void flatten(const Json& j, const std::string& path, std::string& out) {
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      flatten(value, path.empty() ? key : path + "." + key, out);
    }
    return;
  }
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], path + "[" + std::to_string(i) + "]", out);
    return;
  }
  out += path + " ";
  if (j.is_null()) {
    out += "undefined";
  } else if (j.is_boolean()) {
    out += j.get<bool>() ? "true" : "false";
  } else if (j.is_number_integer()) {
    out += j.dump();
  } else if (j.is_number()) {
    out += format_number(j.get<double>());
  } else {
    out += j.get<std::string>();
  }
  out += '\n';
}

std::string pad_right(const std::string& s, std::size_t w) {
  return s + std::string(w > s.size() ? w - s.size() : 0, ' ');
}

std::string pad_left(const std::string& s, std::size_t w) {
  return std::string(w > s.size() ? w - s.size() : 0, ' ') + s;
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::configuration:
    case ErrorKind::invalid_argument:
    case ErrorKind::unsupported:
      return 1;
    case ErrorKind::data:
      return 2;
    default:
      return 3;
  }
}

RunResult run_report(const RunConfig& config) {
  RunResult result;
  try {
    if (config.subcommand == "theoretical") {
      result.output = run_theoretical(config);
    } else if (config.subcommand == "estimate") {
      result.output = run_estimate(config, result.diagnostics);
    } else if (config.subcommand == "simulate") {
      result.output = run_simulate(config, result.diagnostics);
    } else if (config.subcommand == "mc-check") {
      result.output = run_mc_check(config);
    } else {
      fail(ErrorKind::configuration, "unknown subcommand '" + config.subcommand + "'");
    }
  } catch (const Error& e) {
    result.exit_code = exit_code_for(e.kind());
    result.diagnostics += std::string(to_string(e.kind())) + ": " + e.what() + "\n";
    result.output.clear();
  } catch (const std::exception& e) {
    result.exit_code = 3;
    result.diagnostics += std::string("error: ") + e.what() + "\n";
    result.output.clear();
  }
  return result;
}

EstimateTable make_table(const FragilityEstimate& estimate, const Partition& partition) {
  EstimateTable t;
  t.block_names = estimate.report.block_names;
  t.eps_blocks = estimate.report.eps_blocks;
  for (std::size_t j = 1; j <= partition.size(); ++j) t.block_sizes.push_back(partition.block_size(j));
  t.eps_D = estimate.report.eps_D;
  t.d = partition.dimension();
  t.fi = estimate.report.fi;
  return t;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", v);
  return buf;
}

std::string render_table(const EstimateTable& t) {
  std::size_t name_w = std::string("Global").size();
  for (const auto& n : t.block_names) name_w = std::max(name_w, n.size());
  constexpr std::size_t num_w = 13;
  const std::string rule(name_w + 2 * (num_w + 2), '-');

  std::string out = pad_right("", name_w) + "  " + pad_left("eps_hat", num_w) + "  " +
                    pad_left("FI_hat", num_w) + "\n" + rule + "\n";
  for (std::size_t j = 0; j < t.block_names.size(); ++j) {
    out += pad_right(t.block_names[j], name_w) + "  " +
           pad_left(format_number(t.eps_blocks[j]), num_w) + "  " +
           pad_left(format_number(static_cast<double>(t.block_sizes[j]) / t.eps_blocks[j]), num_w) +
           "\n";
  }
  out += rule + "\n";
  out += pad_right("Global", name_w) + "  " + pad_left(format_number(t.eps_D), num_w) + "  " +
         pad_left(format_number(static_cast<double>(t.d) / t.eps_D), num_w) + "\n";
  out += "\nFI_hat(X,D) " + format_number(t.fi) + "\n";
  return out;
}

std::string render_flat(const Json& report) {
  std::string out;
  flatten(report, "", out);
  return out;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App cli{"Block fragility and tail-dependence analysis of multivariate extremes"};
  cli.require_subcommand(1);
  RunConfig config;
  std::optional<std::string> out_path;
  std::string format = "text";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
    sub->add_option("--out", out_path, "Write the report to this file");
  };
  auto* theo = cli.add_subcommand("theoretical", "Closed-form quantities of a model");
  theo->add_option("--model", config.model, "Model JSON")->required();
  theo->add_option("--partition", config.partition, "Partition JSON")->required();
  add_common(theo);

  auto* est = cli.add_subcommand("estimate", "Nonparametric estimates from a CSV file");
  est->add_option("--data", config.data, "CSV data file")->required();
  est->add_option("--partition", config.partition, "Partition JSON")->required();
  est->add_flag("--neg-log-returns", config.neg_log_returns, "Convert prices to negative log-returns");
  est->add_flag("--monthly-maxima", config.monthly_maxima, "Reduce to monthly componentwise maxima");
  est->add_option("--min-obs", config.min_obs, "Minimum rows for a month to be kept")
      ->check(CLI::PositiveNumber);
  est->add_option("--k", config.k, "Top order statistics")->check(CLI::PositiveNumber);
  add_common(est);

  auto* sim = cli.add_subcommand("simulate", "Sample a model to CSV");
  sim->add_option("--model", config.model, "Model JSON")->required();
  sim->add_option("-n", config.n, "Number of rows")->check(CLI::PositiveNumber);
  sim->add_option("--seed", config.seed, "Random seed (random if omitted)");
  add_common(sim);

  auto* mc = cli.add_subcommand("mc-check", "Compare closed forms with simulation");
  mc->add_option("--model", config.model, "Model JSON")->required();
  mc->add_option("--partition", config.partition, "Partition JSON")->required();
  mc->add_option("-n", config.n, "Rows per replicate");
  mc->add_option("--seed", config.seed, "Random seed")->required();
  mc->add_option("--u", config.u, "Quantile levels")->delimiter(',');
  mc->add_option("--k", config.k, "Top order statistics")->check(CLI::PositiveNumber);
  add_common(mc);

  try {
    cli.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << cli.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    // Help requested on a subcommand is also reported through ParseError.
    if (e.get_exit_code() == 0) {
      for (auto* sub : cli.get_subcommands()) out << sub->help();
      if (cli.get_subcommands().empty()) out << cli.help();
      return 0;
    }
    err << "configuration error: " << e.what() << "\n";
    return 1;
  }
  config.subcommand = cli.get_subcommands().front()->get_name();
  config.format = format == "json" ? Format::json : Format::text;

  const auto result = run_report(config);
  err << result.diagnostics;
  if (result.exit_code != 0) return result.exit_code;
  if (out_path) {
    std::ofstream file(*out_path);
    if (!file || !(file << result.output)) {
      err << "configuration error: cannot write '" << *out_path << "'\n";
      return 1;
    }
  } else {
    out << result.output;
  }
  return 0;
}

}  // namespace blockfi::app
