#include <gtest/gtest.h>

#include <cmath>
#include <chrono>
#include <cstdlib>

#include <blockfi/io.hpp>
#include <blockfi/rng.hpp>
#include <blockfi/serialize.hpp>

#include "support/cli_runner.hpp"

using namespace blockfi;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

const std::string kModel = data_path("markets_model.json");
const std::string kPartition = data_path("markets_partition.json");
const std::string kMonthly = data_path("markets_monthly.csv");

void expect_golden(const std::string& actual, const std::string& golden_file) {
  const auto path = golden_path(golden_file);
  if (std::getenv("BLOCKFI_UPDATE_GOLDEN") != nullptr) write_file(path, actual);
  EXPECT_EQ(actual, read_file(path)) << "golden mismatch: " << path;
}

app::EstimateTable application_table() {
  app::EstimateTable t;
  t.block_names = {"Europe", "USA", "Far East"};
  t.eps_blocks = {2.243980009, 1.590711176, 1.673156121};
  t.block_sizes = {4, 3, 2};
  t.eps_D = 4.017568517;
  t.d = 9;
  t.fi = (2.243980009 + 1.590711176 + 1.673156121) / 4.017568517;
  return t;
}

}  // namespace

// The published block estimates rendered through the table layout give back
// the published FI column and partition-level FI.
TEST(Table, ApplicationEstimatesReproduceFiColumn) {
  const auto t = application_table();
  EXPECT_NEAR(4 / t.eps_blocks[0], 1.78254707, 5e-9);
  EXPECT_NEAR(3 / t.eps_blocks[1], 1.885948905, 5e-10);
  EXPECT_NEAR(2 / t.eps_blocks[2], 1.195345715, 5e-10);
  EXPECT_NEAR(9 / t.eps_D, 2.240160924, 5e-10);
  EXPECT_NEAR(t.fi, 1.370940479, 5e-10);
  expect_golden(app::render_table(t), "table_layout.txt");
}

TEST(Estimate, GoldenTextReport) {
  const auto r = run_cli({"estimate", "--data", kMonthly, "--partition", kPartition});
  ASSERT_EQ(r.code, 0) << r.err;
  expect_golden(r.out, "estimate_markets.txt");
}

TEST(Estimate, TextAndJsonCarryTheSameNumbers) {
  const auto text = run_cli({"estimate", "--data", kMonthly, "--partition", kPartition});
  const auto json = run_cli({"estimate", "--data", kMonthly, "--partition", kPartition, "--format", "json"});
  ASSERT_EQ(json.code, 0) << json.err;
  const auto j = Json::parse(json.out);
  const auto& table = j.at("table");
  for (const auto& b : table.at("blocks")) {
    EXPECT_NE(text.out.find(app::format_number(b.at("eps_hat").get<double>())), std::string::npos);
    EXPECT_NE(text.out.find(app::format_number(b.at("fi_hat").get<double>())), std::string::npos);
  }
  EXPECT_NE(text.out.find(app::format_number(table.at("fi_partition").get<double>())), std::string::npos);
  EXPECT_NE(text.out.find(app::render_flat(j.at("details"))), std::string::npos);
}

TEST(Estimate, InvariantUnderColumnReordering) {
  const auto dir = scratch_dir("reorder");
  const auto data = load_csv(kMonthly).data;
  std::vector<std::string> order(data.labels().rbegin(), data.labels().rend());
  std::ofstream out(dir / "reordered.csv");
  write_csv(out, data.select(order));
  out.close();
  const auto a = run_cli({"estimate", "--data", kMonthly, "--partition", kPartition, "--format", "json"});
  const auto b = run_cli({"estimate", "--data", (dir / "reordered.csv").string(), "--partition",
                          kPartition, "--format", "json"});
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(Json::parse(a.out).at("table"), Json::parse(b.out).at("table"));
}

TEST(Estimate, DailyPricesThroughReturnsAndMonthlyMaxima) {
  const auto dir = scratch_dir("daily");
  // Three months of business days, plus a short fourth month that is dropped.
  std::string csv = "date,a,b\n";
  Rng rng(4);
  double pa = 100.0;
  double pb = 50.0;
  using namespace std::chrono;
  int rows = 0;
  for (sys_days d = sys_days{year{2001} / January / 1}; d <= sys_days{year{2001} / April / 4}; d += days{1}) {
    const weekday w{d};
    if (w == Saturday || w == Sunday) continue;
    pa *= std::exp(0.01 * (rng.uniform() - 0.5));
    pb *= std::exp(0.01 * (rng.uniform() - 0.5));
    csv += format_date(year_month_day{d}) + "," + std::to_string(pa) + "," + std::to_string(pb) + "\n";
    ++rows;
  }
  write_file(dir / "prices.csv", csv);
  write_file(dir / "p.json", R"({"blocks":[{"name":"A","members":["a"]},{"name":"B","members":["b"]}]})");
  const auto r = run_cli({"estimate", "--data", (dir / "prices.csv").string(), "--partition",
                          (dir / "p.json").string(), "--neg-log-returns", "--monthly-maxima",
                          "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = Json::parse(r.out);
  EXPECT_EQ(j.at("details").at("n"), 3);
  EXPECT_EQ(j.at("details").at("months_dropped"), 1);
  EXPECT_NE(r.err.find("dropped 1 months"), std::string::npos);
  EXPECT_GT(rows, 60);
}

TEST(Estimate, ExitCodes) {
  const auto dir = scratch_dir("codes");
  write_file(dir / "const.csv", "a,b\n1,2\n1,3\n1,4\n");
  write_file(dir / "ab.json", R"({"blocks":[{"name":"A","members":["a","b"]}]})");
  write_file(dir / "bad.json", "{not json");
  write_file(dir / "missing_label.json", R"({"blocks":[{"name":"A","members":["a","zz"]}]})");

  EXPECT_EQ(run_cli({"estimate", "--data", (dir / "const.csv").string(), "--partition",
                     (dir / "ab.json").string()}).code, 2);
  EXPECT_EQ(run_cli({"estimate", "--data", (dir / "nope.csv").string(), "--partition",
                     (dir / "ab.json").string()}).code, 2);
  EXPECT_EQ(run_cli({"estimate", "--data", kMonthly, "--partition", (dir / "bad.json").string()}).code, 1);
  EXPECT_EQ(run_cli({"estimate", "--data", kMonthly, "--partition",
                     (dir / "missing_label.json").string()}).code, 1);
  EXPECT_EQ(run_cli({"estimate", "--data", (dir / "const.csv").string(), "--partition",
                     (dir / "ab.json").string(), "--monthly-maxima"}).code, 1);
  EXPECT_EQ(run_cli({"estimate", "--data", kMonthly, "--partition", kPartition, "--k", "0"}).code, 1);
  EXPECT_EQ(run_cli({"theoretical", "--model", kModel, "--partition", kPartition,
                     "--neg-log-returns"}).code, 1);
  EXPECT_EQ(run_cli({"frobnicate"}).code, 1);
  EXPECT_EQ(run_cli({}).code, 1);
  EXPECT_EQ(run_cli({"--help"}).code, 0);
}

TEST(Theoretical, LogisticFormula) {
  const auto dir = scratch_dir("theo");
  write_file(dir / "m.json", R"({"family":"logistic","d":5,"alpha":0.5})");
  write_file(dir / "p.json",
             R"({"blocks":[{"name":"A","members":["X1","X2"]},{"name":"B","members":["X3","X4","X5"]}]})");
  const auto r = run_cli({"theoretical", "--model", (dir / "m.json").string(), "--partition",
                          (dir / "p.json").string(), "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = Json::parse(r.out);
  EXPECT_NEAR(j.at("fragility").at("fi").get<double>(), std::sqrt(0.4) + std::sqrt(0.6), 1e-12);
  EXPECT_NEAR(j.at("fi_singletons").get<double>(), std::pow(5.0, 0.5), 1e-12);
}

TEST(Theoretical, GaussianReportsEta) {
  const auto dir = scratch_dir("theo_gauss");
  write_file(dir / "m.json", R"({"family":"gaussian","d":4,"rho":0.5})");
  write_file(dir / "p.json",
             R"({"blocks":[{"name":"A","members":["X1","X2"]},{"name":"B","members":["X3"]},{"name":"C","members":["X4"]}]})");
  const auto r = run_cli({"theoretical", "--model", (dir / "m.json").string(), "--partition",
                          (dir / "p.json").string(), "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = Json::parse(r.out);
  EXPECT_NEAR(j.at("eta").at("eta_block_aifi").get<double>(), 2.5 * 2.5 / 9, 1e-12);
  EXPECT_TRUE(j.at("eta_bounds").at("holds").get<bool>());
}

TEST(Simulate, SeededOutputAndRoundTrip) {
  const auto dir = scratch_dir("sim");
  const auto a = run_cli({"simulate", "--model", kModel, "-n", "10000", "--seed", "11"});
  const auto b = run_cli({"simulate", "--model", kModel, "-n", "10000", "--seed", "11"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.err.find("seed: 11"), std::string::npos);
  const auto random = run_cli({"simulate", "--model", kModel, "-n", "5"});
  EXPECT_NE(random.err.find("seed: "), std::string::npos);
  EXPECT_EQ(run_cli({"simulate", "--model", kModel, "--format", "json"}).code, 1);

  write_file(dir / "sim.csv", a.out);
  const auto est = run_cli({"estimate", "--data", (dir / "sim.csv").string(), "--partition",
                            kPartition, "--format", "json"});
  ASSERT_EQ(est.code, 0) << est.err;
  const auto theo = run_cli({"theoretical", "--model", kModel, "--partition", kPartition, "--format", "json"});
  const double closed = Json::parse(theo.out).at("fragility").at("fi").get<double>();
  const double fitted = Json::parse(est.out).at("table").at("fi_partition").get<double>();
  EXPECT_NEAR(fitted, closed, 0.1);
}

TEST(McCheck, RequiresSeedAndReportsPass) {
  EXPECT_EQ(run_cli({"mc-check", "--model", kModel, "--partition", kPartition}).code, 1);
  const auto dir = scratch_dir("mc");
  write_file(dir / "m.json",
             R"({"family":"factor_pareto","alpha":1,"lambda":[[0.5,0.25,0.25],[0.125,0.125,0.75],[0.375,0.25,0.375]]})");
  write_file(dir / "p.json",
             R"({"blocks":[{"name":"A","members":["X1","X2"]},{"name":"B","members":["X3"]}]})");
  const auto r = run_cli({"mc-check", "--model", (dir / "m.json").string(), "--partition",
                          (dir / "p.json").string(), "--seed", "3", "--u", "0.95,0.99",
                          "--format", "json", "--out", (dir / "report.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  const auto j = Json::parse(read_file(dir / "report.json"));
  const auto& fi = j.at("quantities").at("fi");
  EXPECT_TRUE(fi.at("pass").get<bool>());
  EXPECT_NEAR(fi.at("closed_form").get<double>(), 20.0 / 12.0, 1e-12);
  EXPECT_EQ(fi.at("empirical_by_u").size(), 2u);
  EXPECT_EQ(run_cli({"mc-check", "--model", (dir / "m.json").string(), "--partition",
                     (dir / "p.json").string(), "--seed", "3", "--u", "1.5"}).code, 1);
}

TEST(ModelJson, FlatAndNestedMatricesAgree) {
  const auto nested = model_from_json(Json::parse(
      R"({"family":"factor_pareto","alpha":1,"lambda":[[0.5,0.5],[1,0]]})"));
  const auto flat = model_from_json(Json::parse(
      R"({"family":"factor_pareto","alpha":1,"d":2,"lambda":[0.5,0.5,1,0]})"));
  EXPECT_TRUE(std::get<FactorParetoModel>(nested.model).lambda() ==
              std::get<FactorParetoModel>(flat.model).lambda());
  EXPECT_EQ(nested.labels, (std::vector<std::string>{"X1", "X2"}));
  const auto back = model_from_json(model_to_json(nested.model, nested.labels));
  EXPECT_TRUE(std::get<FactorParetoModel>(back.model).lambda() ==
              std::get<FactorParetoModel>(nested.model).lambda());
  try {
    model_from_json(Json::parse(R"({"family":"logistic","d":3,"alpha":2})"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::configuration);
  }
}
