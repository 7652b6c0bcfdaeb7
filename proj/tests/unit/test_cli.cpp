#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "qcoef/cli.hpp"
#include "qcoef/errors.hpp"

namespace cli = qcoef::cli;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "qcoef");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);)
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("parse_n_spec forms") {
  CHECK(cli::parse_n_spec("8") == std::vector<std::size_t>{8});
  CHECK(cli::parse_n_spec("2,4,9") == std::vector<std::size_t>{2, 4, 9});
  CHECK(cli::parse_n_spec("2:16") == std::vector<std::size_t>{2, 4, 8, 16});
  CHECK(cli::parse_n_spec("2:11:3") == std::vector<std::size_t>{2, 5, 8, 11});
  CHECK_THROWS_AS(cli::parse_n_spec("0"), qcoef::PreconditionError);
  CHECK_THROWS_AS(cli::parse_n_spec("x"), qcoef::PreconditionError);
  CHECK_THROWS_AS(cli::parse_n_spec("8:2"), qcoef::PreconditionError);
}

TEST_CASE("usage errors exit with 64") {
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"bogus"}).code == cli::kExitUsage);
  CHECK(run({"pressure", "--q", "1"}).code == cli::kExitUsage);
  CHECK(run({"dim", "--no-such-flag"}).code == cli::kExitUsage);
}

TEST_CASE("dim prints the manifest and a CSV row per r") {
  setenv("QCOEF_TIMESTAMP", "2000-01-01T00:00:00Z", 1);
  const Outcome o = run({"dim", "--system", "gamma3", "--r", "1,2"});
  REQUIRE(o.code == cli::kExitOk);
  CHECK(o.out.find("# subcommand: dim") != std::string::npos);
  CHECK(o.out.find("# system_id: gamma3") != std::string::npos);
  CHECK(o.out.find("# timestamp: 2000-01-01T00:00:00Z") != std::string::npos);
  const auto rows = data_lines(o.out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].rfind("r,kappa_r", 0) == 0);
  CHECK(rows[2].rfind("2,0.63092975", 0) == 0);
}

TEST_CASE("runs are byte-identical for a fixed timestamp and seed") {
  setenv("QCOEF_TIMESTAMP", "2000-01-01T00:00:00Z", 1);
  const std::vector<std::string> args{"lloyd", "--system", "gamma3", "--n", "4", "--samples", "5000",
                                      "--seed", "3", "--restarts", "2"};
  const Outcome a = run(args);
  const Outcome b = run(args);
  REQUIRE(a.code == cli::kExitOk);
  CHECK(a.out == b.out);
}

TEST_CASE("invalid inputs exit with 2") {
  CHECK(run({"dim", "--system", "no-such-system"}).code == cli::kExitPrecondition);
  CHECK(run({"dim", "--r", "-1"}).code == cli::kExitPrecondition);
  CHECK(run({"constructive", "--system", "gamma3", "--kappa", "0.1"}).code == cli::kExitPrecondition);
}

TEST_CASE("verify passes on the shipped systems") {
  for (const char* name : {"gamma3", "dyadic", "uniform4"}) {
    const Outcome o = run({"verify", "--system", name});
    CHECK_MESSAGE(o.code == cli::kExitOk, o.out << o.err);
    CHECK(o.out.find("FAIL") == std::string::npos);
  }
}

TEST_CASE("wasserstein reads CSV atoms and writes the coupling") {
  const auto dir = std::filesystem::temp_directory_path() / "qcoef_cli_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "mu.csv") << "0,0.5\n1,0.5\n";
  std::ofstream(dir / "nu.csv") << "0.5,1\n";
  const Outcome o = run({"wasserstein", "--mu", (dir / "mu.csv").string(), "--nu",
                         (dir / "nu.csv").string(), "--r", "1", "--out", dir.string()});
  REQUIRE(o.code == cli::kExitOk);
  CHECK(o.out.find("rho_r") != std::string::npos);
  CHECK(o.out.find("0,0,0.5") != std::string::npos);
  CHECK(o.out.find("1,0,0.5") != std::string::npos);
  CHECK(std::filesystem::exists(dir / "wasserstein.csv"));
  std::filesystem::remove_all(dir);
}
