#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "groupcover/cli.hpp"
#include "groupcover/direct_intervals.hpp"
#include "groupcover/numerics.hpp"
#include "groupcover/types.hpp"

using namespace groupcover;

namespace {

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string test_dir() {
  const char* dir = std::getenv("GROUPCOVER_TEST_DIR");
  REQUIRE(dir != nullptr);
  return dir;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Self-cleaning fixture file.
struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name, const std::string& content) {
    path = std::string("/tmp/groupcover_test_") + name;
    std::ofstream f(path, std::ios::binary);
    f << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

const char* kAggCsv =
    "group,n,mean,sd\n"
    "a,4,0.1,1.2\n"
    "b,9,1.5,0.9\n"
    "c,16,-0.7,1.1\n";

std::vector<std::vector<std::string>> split_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    rows.push_back(fields);
  }
  return rows;
}

}  // namespace

TEST_CASE("cli fit reports the linking estimate") {
  TempFile data("fit.csv", kAggCsv);
  const CliResult res = run_cli({"fit", "--input", data.path});
  CHECK(res.code == cli::kExitOk);
  const auto rows = split_csv(res.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"estimator", "n_groups", "phi", "tau2"});
  CHECK(rows[1][0] == "mom");
  CHECK(rows[1][1] == "3");
  CHECK(std::stod(rows[1][2]) == doctest::Approx(0.3).epsilon(1e-9));

  const CliResult js = run_cli({"fit", "--input", data.path, "--format", "json"});
  const auto parsed = nlohmann::json::parse(js.out);
  CHECK(parsed.at("phi").get<double>() == doctest::Approx(0.3).epsilon(1e-9));
}

TEST_CASE("cli intervals umau matches the t formula") {
  TempFile data("iv.csv", kAggCsv);
  const CliResult res = run_cli({"intervals", "--input", data.path, "--method", "umau"});
  CHECK(res.code == cli::kExitOk);
  const auto rows = split_csv(res.out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == std::vector<std::string>{"group", "n", "mean", "method", "alpha", "lower",
                                            "upper", "width"});
  const double widths[] = {2.0 * t_quantile(0.975, 3) * 1.2 / 2.0,
                           2.0 * t_quantile(0.975, 8) * 0.9 / 3.0,
                           2.0 * t_quantile(0.975, 15) * 1.1 / 4.0};
  for (int i = 0; i < 3; ++i) {
    CHECK(rows[i + 1][3] == "umau_t");
    CHECK(std::stod(rows[i + 1][7]) == doctest::Approx(widths[i]).epsilon(1e-8));
  }
}

TEST_CASE("cli coverage-curve emits the expected grid and values") {
  const CliResult res = run_cli({"coverage-curve", "--phi", "0", "--tau2", "1", "--sigma2", "1",
                                 "--alpha", "0.05", "--grid=-6:6:0.1"});
  CHECK(res.code == cli::kExitOk);
  const auto rows = split_csv(res.out);
  REQUIRE(rows.size() == 122);  // header + 121 grid points
  CHECK(rows[0] == std::vector<std::string>{"mu", "coverage"});
  bool found_zero = false;
  for (const auto& row : rows) {
    if (row[0] == "0") {
      CHECK(row[1] == "0.994425403");
      found_zero = true;
    }
  }
  CHECK(found_zero);

  // Byte-identical rerun.
  const CliResult again = run_cli({"coverage-curve", "--phi", "0", "--tau2", "1", "--sigma2",
                                   "1", "--alpha", "0.05", "--grid=-6:6:0.1"});
  CHECK(again.out == res.out);
}

TEST_CASE("cli simulate runs a scenario file") {
  TempFile scen("scen.json", R"({
    "name": "cli-sim", "n_groups": 3,
    "g_dist": {"type": "normal", "phi": 0, "tau2": 1},
    "noise": 1.0, "per_group_n": 1, "alpha": 0.05,
    "procedures": ["umau_z"], "reps": 400, "seed": 3, "threads": 1
  })");
  const CliResult res = run_cli({"simulate", "--scenario", scen.path});
  CHECK(res.code == cli::kExitOk);
  const auto parsed = nlohmann::json::parse(res.out);
  CHECK(parsed.at("scenario") == "cli-sim");
  CHECK(parsed.at("methods").size() == 1);
  const double avg = parsed.at("methods")[0].at("average_coverage").get<double>();
  CHECK(avg > 0.9);
  CHECK(avg <= 1.0);

  const CliResult csv = run_cli({"simulate", "--scenario", scen.path, "--format", "csv"});
  const auto rows = split_csv(csv.out);
  CHECK(rows[0] == std::vector<std::string>{"group", "true_mu", "method", "coverage", "se",
                                            "mean_width"});
  CHECK(rows.size() == 4);
}

TEST_CASE("cli compare prints fraction and ratio") {
  TempFile data("cmp.csv", kAggCsv);
  const CliResult res =
      run_cli({"compare", "--input", data.path, "--a", "fab", "--b", "umau"});
  CHECK(res.code == cli::kExitOk);
  const auto rows = split_csv(res.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0][0] == "method_a");
  CHECK(rows[1][0] == "fab_t");
  CHECK(rows[1][1] == "umau_t");
  const double fraction = std::stod(rows[1][3]);
  CHECK(fraction >= 0.0);
  CHECK(fraction <= 1.0);
  CHECK(std::stod(rows[1][4]) > 0.0);
}

TEST_CASE("cli seeds come from the flag or the environment") {
  TempFile data("seed.csv", kAggCsv);
  const std::vector<std::string> args = {"intervals", "--input", data.path,
                                         "--method", "qbound", "--bootstrap-reps", "60"};
  setenv("GROUPCOVER_SEED", "9", 1);
  const CliResult env1 = run_cli(args);
  const CliResult env2 = run_cli(args);
  CHECK(env1.out == env2.out);
  auto with_flag = args;
  with_flag.insert(with_flag.end(), {"--seed", "10"});
  const CliResult flagged = run_cli(with_flag);
  CHECK(flagged.out != env1.out);
  unsetenv("GROUPCOVER_SEED");
  setenv("GROUPCOVER_SEED", "10", 1);
  const CliResult env10 = run_cli(args);
  CHECK(env10.out == flagged.out);
  unsetenv("GROUPCOVER_SEED");
}

TEST_CASE("cli writes to a file when --output is given") {
  TempFile data("out.csv", kAggCsv);
  const std::string out_path = "/tmp/groupcover_test_output.csv";
  const CliResult res = run_cli({"intervals", "--input", data.path, "--method", "umau",
                                 "--output", out_path});
  CHECK(res.code == cli::kExitOk);
  CHECK(res.out.empty());
  const CliResult direct = run_cli({"intervals", "--input", data.path, "--method", "umau"});
  CHECK(read_file(out_path) == direct.out);
  std::remove(out_path.c_str());
}

TEST_CASE("cli raw ingestion filters by min-n") {
  TempFile data("raw.csv",
                "group,value\n"
                "a,1.0\na,3.0\nb,5.0\nb,6.0\nb,7.0\nsolo,2.0\n");
  const CliResult res = run_cli({"intervals", "--input", data.path, "--method", "umau"});
  CHECK(res.code == cli::kExitOk);
  const auto rows = split_csv(res.out);
  CHECK(rows.size() == 3);  // solo dropped by the default min-n of 2
  CHECK(rows[1][0] == "a");
  CHECK(rows[2][0] == "b");
}

TEST_CASE("cli exit codes") {
  CHECK(run_cli({"fit", "--input", "/tmp/definitely_missing.csv"}).code == cli::kExitData);
  CHECK(run_cli({"fit", "--bogus-flag"}).code == cli::kExitUsage);
  CHECK(run_cli({}).code == cli::kExitUsage);
  TempFile bad("bad.csv", "group,value\na,oops\n");
  const CliResult res = run_cli({"fit", "--input", bad.path});
  CHECK(res.code == cli::kExitData);
  CHECK(res.err.find("line 2") != std::string::npos);
  // A degenerate prior has no coverage curve: numerical error.
  CHECK(run_cli({"coverage-curve", "--tau2", "0", "--grid=0:1:0.5"}).code == cli::kExitNumeric);
}

TEST_CASE("cli help texts match the golden files") {
  const std::string dir = test_dir() + "/golden/";
  {
    const CliResult res = run_cli({"--help"});
    CHECK(res.code == cli::kExitOk);
    CHECK(res.out == read_file(dir + "help_main.txt"));
  }
  for (const std::string sub : {"fit", "intervals", "coverage-curve", "simulate", "compare"}) {
    const CliResult res = run_cli({sub, "--help"});
    CHECK(res.code == cli::kExitOk);
    CHECK(res.out == read_file(dir + "help_" + sub + ".txt"));
  }
}
