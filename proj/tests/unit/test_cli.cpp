#include "teq/cli.hpp"
#include "teq/io.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <filesystem>
#include <sstream>

using namespace teq;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result teq_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> lines;
  std::istringstream is(s);
  for (std::string line; std::getline(is, line);) lines.push_back(line);
  return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> f;
  std::istringstream is(line);
  for (std::string x; std::getline(is, x, ',');) f.push_back(x);
  return f;
}

}  // namespace

TEST(Cli, LaplaceResidualAtTableScale) {
  const Result r = teq_run({"solve", "--dim", "2", "--gen", "laplace1d", "--n", "1024", "--nmin", "256",
                            "--eps", "1e-10", "--format", "json", "--deterministic"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j.size(), 1u);
  EXPECT_LE(j[0]["residual"].get<double>(), 1e-9);
  EXPECT_EQ(j[0]["n1"].get<int>(), 1024);
  const double phases = j[0]["time_dense"].get<double>() + j[0]["time_lowrank"].get<double>() +
                        j[0]["time_rhs"].get<double>() + j[0]["time_spectra"].get<double>();
  EXPECT_LE(phases, j[0]["time_total"].get<double>() * 1.001);
}

TEST(Cli, Validate3dSmall) {
  const Result r = teq_run({"validate", "--dim", "3", "--n", "16", "--nmin", "4", "--deterministic"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  const auto lines = split_lines(r.out);
  ASSERT_EQ(lines.size(), 2u);
  const auto head = split_csv(lines[0]), vals = split_csv(lines[1]);
  const auto pos = std::find(head.begin(), head.end(), "pass") - head.begin();
  EXPECT_EQ(vals[pos], "true");
}

TEST(Cli, ValidateReportsBreach) {
  const Result r = teq_run({"validate", "--dim", "2", "--n", "40", "--nmin", "8", "--eps", "1e-2",
                            "--tol", "1e-14", "--deterministic"});
  EXPECT_EQ(r.code, 2);
}

TEST(Cli, BenchSizesAreMonotone) {
  const Result r = teq_run({"bench", "--dim", "2", "--n", "64", "--sizes", "256,64,128", "--nmin", "32",
                            "--deterministic"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = split_lines(r.out);
  ASSERT_EQ(lines.size(), 4u);
  const auto head = split_csv(lines[0]);
  const auto col = std::find(head.begin(), head.end(), "n") - head.begin();
  ASSERT_LT(col, static_cast<long>(head.size()));
  long prev = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const long n = std::stol(split_csv(lines[i])[col]);
    EXPECT_GT(n, prev);
    prev = n;
  }
}

TEST(Cli, CsvAndJsonShareFields) {
  const std::vector<std::string> base{"solve", "--dim", "2", "--n", "48", "--nmin", "16", "--gen",
                                      "fractional_gl", "--deterministic"};
  auto csv = base;
  const Result a = teq_run(csv);
  auto js = base;
  js.insert(js.end(), {"--format", "json"});
  const Result b = teq_run(js);
  ASSERT_EQ(a.code, 0);
  ASSERT_EQ(b.code, 0);
  const auto head = split_csv(split_lines(a.out)[0]);
  const auto j = nlohmann::ordered_json::parse(b.out)[0];
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  EXPECT_EQ(head, keys);
}

TEST(Cli, DeterministicRunsAreBitIdentical) {
  const auto dir = std::filesystem::temp_directory_path();
  const std::string p1 = (dir / "teq_cli_x1.bin").string(), p2 = (dir / "teq_cli_x2.bin").string();
  const std::vector<std::string> base{"solve", "--dim", "3", "--n", "24", "--nmin", "6", "--gen",
                                      "random_spd_hss", "--seed", "5"};
  auto a = base;
  a.insert(a.end(), {"--deterministic", "--save", p1});
  auto b = base;
  b.insert(b.end(), {"--save", p2});
  ASSERT_EQ(teq_run(a).code, 0);
  ASSERT_EQ(teq_run(b).code, 0);
  EXPECT_EQ(load_tensor(p1).values(), load_tensor(p2).values());
  std::filesystem::remove(p1);
  std::filesystem::remove(p2);
}

TEST(Cli, InvalidConfigurations) {
  EXPECT_EQ(teq_run({"solve", "--eps", "2"}).code, 3);
  EXPECT_EQ(teq_run({"solve", "--gen", "poisson"}).code, 3);
  EXPECT_EQ(teq_run({"solve", "--nmin", "1", "--n", "8"}).code, 3);
  EXPECT_EQ(teq_run({"solve", "--backend", "lu"}).code, 3);
  EXPECT_EQ(teq_run({"solve", "--frobnicate"}).code, 3);
  EXPECT_EQ(teq_run({}).code, 3);
  EXPECT_EQ(teq_run({"solve", "--gen", "fractional_gl", "--order", "2.5", "--n", "16"}).code, 3);
  EXPECT_EQ(teq_run({"--help"}).code, 0);
}

TEST(Cli, SweepSmall) {
  const Result r = teq_run({"sweep", "--n", "64", "--nmin", "16", "--runs", "2", "--points", "3",
                            "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.size(), 3u * 2u + 3u);
  for (const auto& row : j) {
    EXPECT_GT(row["residual"].get<double>(), 0.0);
    EXPECT_LE(row["residual"].get<double>(), row["bound"].get<double>());
  }
}

TEST(Cli, SweepKappaMatchesPower) {
  cli::SweepOptions so;
  so.n = 32;
  so.n_min = 8;
  so.runs = 1;
  so.points = 2;
  so.mmatrix = false;
  const auto rows = cli::accuracy_sweep(so);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_DOUBLE_EQ(rows[0].power, 1.0);
  EXPECT_DOUBLE_EQ(rows[1].power, 2.15);
  const Vector lam = laplace1d_eigenvalues(32);
  EXPECT_NEAR(rows[1].kappa, std::pow(lam.maxCoeff() / lam.minCoeff(), 2.15), 1e-6 * rows[1].kappa);
}

TEST(Cli, EnvelopeSlope) {
  std::vector<cli::SweepRow> rows;
  for (int i = 0; i < 4; ++i) {
    const double kappa = std::pow(10.0, 4 + i);
    rows.push_back({"general", i, 1.0, kappa, 0, 1e-9 * std::sqrt(kappa)});
    rows.push_back({"general", i, 1.0, kappa, 1, 1e-10 * std::sqrt(kappa)});
  }
  EXPECT_NEAR(cli::envelope_slope(rows, "general"), 0.5, 1e-12);
}
