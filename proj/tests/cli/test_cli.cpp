#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "clsel/io.hpp"

using nlohmann::json;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::filesystem::path work_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "clsel_cli_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

CliResult run_cli(const std::string& args) {
  const char* cli = std::getenv("CLSEL_CLI");
  REQUIRE_MESSAGE(cli != nullptr, "CLSEL_CLI must point at the clsel binary");
  const auto out_path = work_dir() / "stdout.txt";
  const auto err_path = work_dir() / "stderr.txt";
  const std::string command = std::string(cli) + " " + args + " > " +
                              out_path.string() + " 2> " + err_path.string();
  const int status = std::system(command.c_str());
  CliResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out_path);
  result.err = slurp(err_path);
  return result;
}

}  // namespace

TEST_CASE("simulate writes the dataset and a manifest, deterministically") {
  const auto dir = work_dir();
  const auto csv = (dir / "data.csv").string();

  const CliResult first = run_cli(
      "simulate --model common-location --d 10 --d-star 8 --rho 0.9 --n 100 "
      "--seed 7 --out " + csv);
  CHECK(first.exit_code == 0);

  const std::string bytes = slurp(csv);
  int lines = 0;
  for (char c : bytes)
    if (c == '\n') ++lines;
  CHECK(lines == 101);  // header + 100 observations

  const json manifest = json::parse(slurp(csv + ".manifest.json"));
  CHECK(manifest.at("command") == "simulate");
  CHECK(manifest.at("config").at("seed") == 7);

  const CliResult second = run_cli(
      "simulate --model common-location --d 10 --d-star 8 --rho 0.9 --n 100 "
      "--seed 7 --out " + csv);
  CHECK(second.exit_code == 0);
  CHECK(slurp(csv) == bytes);  // identical file on rerun
}

TEST_CASE("simulate rejects an inadmissible rho with exit code 2") {
  const auto csv = (work_dir() / "bad.csv").string();
  const CliResult result = run_cli(
      "simulate --model common-location --d 10 --d-star 8 --rho 1.2 --n 100 "
      "--seed 1 --out " + csv);
  CHECK(result.exit_code == 2);
  CHECK(result.err.find("rho") != std::string::npos);
  CHECK(result.err.find("1)") != std::string::npos);  // cites the open range
}

TEST_CASE("simulate accepts a spec file with flag overrides") {
  const auto dir = work_dir();
  const auto spec = dir / "sim.spec";
  clsel::write_file_atomic(spec.string(),
                           "model = exchangeable\nd = 4\nrho = 0.3\n"
                           "n = 40\nseed = 9\n");
  const auto csv = (dir / "exch.csv").string();
  const CliResult result =
      run_cli("simulate --spec " + spec.string() + " --n 50 --out " + csv);
  CHECK(result.exit_code == 0);
  const json manifest = json::parse(slurp(csv + ".manifest.json"));
  CHECK(manifest.at("config").at("n") == 50);      // flag wins
  CHECK(manifest.at("config").at("model") == "exchangeable");
}

TEST_CASE("select produces a full report; tau defaults to d") {
  const auto dir = work_dir();
  const auto csv = (dir / "sel_data.csv").string();
  REQUIRE(run_cli("simulate --model common-location --d 6 --d-star 4 "
                  "--rho 0.8 --n 50 --seed 3 --out " + csv).exit_code == 0);

  const auto report_path = (dir / "report.json").string();
  const auto trace_path = (dir / "trace.csv").string();
  const CliResult result = run_cli(
      "select --data " + csv + " --model common-location --algorithm cls1 "
      "--seed 11 --out " + report_path + " --trace " + trace_path);
  CHECK((result.exit_code == 0 || result.exit_code == 3));

  const json report = json::parse(slurp(report_path));
  CHECK(report.at("schema_version") == 1);
  CHECK(report.at("algorithm") == "cls1");
  CHECK(report.at("config").at("tau") == 6.0);      // tau = d
  CHECK(report.at("config").at("sweeps") == 60);    // T = 10 d
  REQUIRE(report.at("rules").size() == 2);
  for (const auto& rule : report.at("rules")) {
    CHECK(rule.at("mask").get<std::string>().size() == 6);
    if (rule.at("estimated").get<bool>()) {
      CHECK(rule.at("theta").size() == 1);
      CHECK(rule.at("standard_error").size() == 1);
    }
  }
  CHECK(report.at("frequencies").size() == 6);
  CHECK(report.at("diagnostics").contains("control_chart"));

  // Trace CSV: header + one row per sweep.
  const std::string trace = slurp(trace_path);
  int lines = 0;
  for (char c : trace)
    if (c == '\n') ++lines;
  CHECK(lines == 61);

  // Determinism: identical bytes on rerun.
  const std::string report_bytes = slurp(report_path);
  REQUIRE(run_cli("select --data " + csv +
                  " --model common-location --algorithm cls1 --seed 11 "
                  "--out " + report_path + " --trace " + trace_path)
              .exit_code == result.exit_code);
  CHECK(slurp(report_path) == report_bytes);
  CHECK(slurp(trace_path) == trace);
}

TEST_CASE("cls1 and cls2 with lambda 0 share the chain on the same seed") {
  const auto dir = work_dir();
  const auto csv = (dir / "eq_data.csv").string();
  REQUIRE(run_cli("simulate --model common-location --d 5 --d-star 4 "
                  "--rho 0.7 --n 40 --seed 21 --out " + csv).exit_code == 0);

  const auto r1 = (dir / "cls1.json").string();
  const auto r2 = (dir / "cls2.json").string();
  CHECK(run_cli("select --data " + csv +
                " --model common-location --algorithm cls1 --seed 4 --out " +
                r1).exit_code <= 3);
  CHECK(run_cli("select --data " + csv +
                " --model common-location --algorithm cls2 --lambda 0 --seed 4 "
                "--out " + r2).exit_code <= 3);

  const json a = json::parse(slurp(r1));
  const json b = json::parse(slurp(r2));
  CHECK(a.at("frequencies") == b.at("frequencies"));  // identical chains
  CHECK(a.at("rules")[0].at("mask") == b.at("rules")[0].at("mask"));
  CHECK(a.at("rules")[1].at("rule") == "threshold");
  CHECK(b.at("rules")[1].at("rule") == "stability");
}

TEST_CASE("ordinal selection run with a delete-10 jackknife") {
  const auto dir = work_dir();
  const auto csv = (dir / "snp.csv").string();
  REQUIRE(run_cli("simulate --model ordinal --d 20 --theta -0.2 "
                  "--case-fraction 0.2012012 --latent-rho 0.3 --n 333 "
                  "--seed 60 --out " + csv).exit_code == 0);

  const auto report_path = (dir / "snp_report.json").string();
  const CliResult result = run_cli(
      "select --data " + csv + " --model ordinal --gamma -0.5,0.5 "
      "--algorithm cls1 --k 10 --seed 8 --out " + report_path);
  CHECK(result.exit_code <= 3);

  const json report = json::parse(slurp(report_path));
  CHECK(report.at("config").at("jackknife_group_size") == 10);
  bool saw_estimated_rule = false;
  for (const auto& rule : report.at("rules")) {
    CHECK(rule.at("active_count").get<int>() < 20);  // a strict subset
    if (rule.at("estimated").get<bool>()) {
      saw_estimated_rule = true;
      CHECK(rule.at("theta").size() == 1);
      CHECK(rule.at("standard_error")[0].get<double>() > 0.0);
    }
  }
  CHECK(saw_estimated_rule);
}

TEST_CASE("select requires gamma for the ordinal model") {
  const auto dir = work_dir();
  const auto csv = (dir / "snp2.csv").string();
  REQUIRE(run_cli("simulate --model ordinal --d 3 --n 30 --seed 2 --out " +
                  csv).exit_code == 0);
  const CliResult result =
      run_cli("select --data " + csv + " --model ordinal --algorithm cls1 "
              "--out " + (dir / "x.json").string());
  CHECK(result.exit_code == 2);
  CHECK(result.err.find("gamma") != std::string::npos);
}

TEST_CASE("bench runs a small plan and honors B = 1") {
  const auto dir = work_dir();
  const auto plan = dir / "small.plan";
  clsel::write_file_atomic(plan.string(),
                           "table = table3\nn = 20\nd = 2\nrho = 0.4\nB = 1\n");
  const auto out_dir = (dir / "bench_out").string();
  const CliResult result = run_cli("bench --plan " + plan.string() +
                                   " --seed 5 --out-dir " + out_dir);
  CHECK(result.exit_code == 0);
  const std::string summary = slurp(out_dir + "/summary.csv");
  CHECK(summary.find("NA") != std::string::npos);  // SE unavailable at B = 1
  CHECK(std::filesystem::exists(out_dir + "/meta.json"));
  CHECK(std::filesystem::exists(out_dir + "/manifest.json"));

  // --seed is mandatory for bench.
  const CliResult missing_seed =
      run_cli("bench --plan " + plan.string() + " --out-dir " + out_dir);
  CHECK(missing_seed.exit_code == 2);
}

TEST_CASE("oracle subcommands") {
  CliResult g0 = run_cli("oracle g0 --mask 0100000000 --rho 0.5 --d-star 8");
  CHECK(g0.exit_code == 0);
  CHECK(json::parse(g0.out).at("g0").get<double>() == doctest::Approx(0.0));

  CliResult opt = run_cli("oracle g0-optimum --d 10 --d-star 8 --rho 0.9");
  CHECK(opt.exit_code == 0);
  const json opt_json = json::parse(opt.out);
  CHECK(opt_json.at("uncorrelated") == 2);
  CHECK(opt_json.at("correlated") == 1);

  CliResult enumerated =
      run_cli("oracle g0-optimum --d 10 --d-star 8 --rho 0.9 --enumerate");
  CHECK(enumerated.exit_code == 0);
  CHECK(json::parse(enumerated.out).at("g0").get<double>() ==
        doctest::Approx(opt_json.at("g0").get<double>()).epsilon(1e-12));

  const auto dir = work_dir();
  const auto csv = (dir / "bf.csv").string();
  REQUIRE(run_cli("simulate --model common-location --d 4 --d-star 3 "
                  "--rho 0.8 --n 30 --seed 13 --out " + csv).exit_code == 0);
  CliResult bf =
      run_cli("oracle brute-force --data " + csv + " --model common-location");
  CHECK(bf.exit_code == 0);
  CHECK(json::parse(bf.out).at("mask").get<std::string>().size() == 4);
}

TEST_CASE("unparseable data exits with code 2") {
  const auto dir = work_dir();
  const auto bad = dir / "broken.csv";
  clsel::write_file_atomic(bad.string(), "x1,x2\n1,oops\n2,3\n");
  const CliResult result = run_cli(
      "select --data " + bad.string() +
      " --model common-location --algorithm cls1 --out " +
      (dir / "nope.json").string());
  CHECK(result.exit_code == 2);
}
