#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "chl/cli.hpp"
#include "tmpdir.hpp"

using namespace chl;
namespace fs = std::filesystem;

namespace {

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "chl");
  return run_cli(args);
}

std::size_t line_count(const fs::path& path) {
  std::ifstream in(path);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

nlohmann::json header(const fs::path& events) {
  std::ifstream in(events);
  std::string line;
  std::getline(in, line);
  return nlohmann::json::parse(line);
}

}  // namespace

TEST_CASE("complex literals") {
  CHECK(parse_complex("0+1i") == Complex(0, 1));
  CHECK(parse_complex("2.5-3i") == Complex(2.5, -3));
  CHECK(parse_complex("-1.5") == Complex(-1.5, 0));
  CHECK(parse_complex("i") == Complex(0, 1));
  CHECK(parse_complex("-i") == Complex(0, -1));
  CHECK(parse_complex("4i") == Complex(0, 4));
  CHECK(parse_complex("1e-3+2e1i") == Complex(1e-3, 20));
  CHECK_THROWS_AS(parse_complex("1+"), std::invalid_argument);
  CHECK_THROWS_AS(parse_complex("abc"), std::invalid_argument);
  CHECK_THROWS_AS(parse_complex(""), std::invalid_argument);
}

TEST_CASE("simulate") {
  const TempDir dir;
  const fs::path a = dir.path / "a", b = dir.path / "b";
  CHECK(run({"simulate", "--n", "10", "--lambda", "1", "--t", "3", "--seed", "7", "--out", a}) == kExitPass);
  CHECK(header(a / "events.jsonl").at("N") == 10.0);
  CHECK(fs::exists(a / "config.json"));
  CHECK(run({"simulate", "--n", "10", "--lambda", "1", "--t", "3", "--seed", "7", "--out", b}) == kExitPass);
  CHECK(read_file(a / "events.jsonl") == read_file(b / "events.jsonl"));
  CHECK(read_file(a / "config.json") == read_file(b / "config.json"));

  const fs::path c = dir.path / "c";
  CHECK(run({"simulate", "--n", "4", "--t", "1", "--seed", "3", "--probe", "0+1i", "--trajectory",
             "--out", c}) == kExitPass);
  const std::size_t events = line_count(c / "events.jsonl") - 1;
  CHECK(line_count(c / "trajectory.csv") == events + 2);  // header, time 0, one row per event

  const fs::path d = dir.path / "d";
  CHECK(run({"simulate", "--n", "4", "--t", "1", "--seed", "3", "--probe", "1+i", "--probe", "-2+0.5i",
             "--window", "12.5", "--trajectory", "--out", d}) == kExitPass);
  std::ifstream traj(d / "trajectory.csv");
  std::string first;
  std::getline(traj, first);
  CHECK(first == "time,re_0,im_0,shl_re_0,shl_im_0,re_1,im_1,shl_re_1,shl_im_1");
}

TEST_CASE("seed precedence: flag, config, environment") {
  const TempDir dir;
  const fs::path cfg = dir.path / "cfg.json";
  write_file(cfg, R"({"seed": 11, "n": 3, "t": 0.5})");
  CHECK(run({"simulate", "--config", cfg, "--out", dir.path / "c"}) == kExitPass);
  CHECK(header(dir.path / "c" / "events.jsonl").at("seed") == 11);
  CHECK(header(dir.path / "c" / "events.jsonl").at("N") == 3.0);
  CHECK(run({"simulate", "--config", cfg, "--seed", "12", "--out", dir.path / "f"}) == kExitPass);
  CHECK(header(dir.path / "f" / "events.jsonl").at("seed") == 12);

  ::setenv("CHL_SEED", "99", 1);
  CHECK(run({"simulate", "--t", "0.1", "--out", dir.path / "e"}) == kExitPass);
  CHECK(header(dir.path / "e" / "events.jsonl").at("seed") == 99);
  CHECK(run({"simulate", "--config", cfg, "--out", dir.path / "g"}) == kExitPass);
  CHECK(header(dir.path / "g" / "events.jsonl").at("seed") == 11);
  ::setenv("CHL_SEED", "not-a-number", 1);
  CHECK(run({"simulate", "--t", "0.1", "--out", dir.path / "h"}) == kExitUsage);
  ::unsetenv("CHL_SEED");

  write_file(cfg, R"({"bogus": 1})");
  CHECK(run({"simulate", "--config", cfg, "--out", dir.path / "i"}) == kExitUsage);
}

TEST_CASE("verify") {
  const TempDir dir;
  const fs::path a = dir.path / "a";
  CHECK(run({"verify", "--only", "quad_mean_shift", "--n", "2", "--lambda", "1", "--out", a}) == kExitPass);
  const auto report = nlohmann::json::parse(read_file(a / "report.json"));
  CHECK(report.at("checks").size() == 1);
  CHECK(report.at("pass") == true);

  const fs::path b = dir.path / "b";
  CHECK(run({"verify", "--only", "quad_mean_shift", "--tol", "1e-20", "--out", b}) == kExitCheckFailed);
  const auto failed = nlohmann::json::parse(read_file(b / "report.json"));
  CHECK(failed.at("checks")[0].at("value").at("points")[0].at("converged") == false);

  const fs::path c = dir.path / "c";
  CHECK(run({"verify", "--only", "slit_convergence_rate,tail_decay", "--out", c}) == kExitPass);
  CHECK(fs::exists(c / "slit_convergence_rate.csv"));
  CHECK(fs::exists(c / "tail_decay.csv"));
}

TEST_CASE("usage errors") {
  const TempDir dir;
  CHECK(run({}) == kExitUsage);
  CHECK(run({"nonsense"}) == kExitUsage);
  CHECK(run({"simulate", "--n", "-1", "--out", dir.path}) == kExitUsage);
  CHECK(run({"simulate", "--lambda", "abc", "--out", dir.path}) == kExitUsage);
  CHECK(run({"simulate", "--probe", "1+", "--out", dir.path}) == kExitUsage);
  CHECK(run({"verify", "--only", "nope", "--out", dir.path}) == kExitUsage);
  CHECK(run({"converge", "--n-list", "8,4", "--out", dir.path}) == kExitUsage);
  CHECK(run({"simulate", "--config", (dir.path / "missing.json").string(), "--out", dir.path}) == kExitUsage);
}

TEST_CASE("converge") {
  const TempDir dir;
  CHECK(run({"converge", "--replicas", "200", "--out", dir.path}) == kExitPass);
  CHECK(line_count(dir.path / "coupling.csv") == 5);
  CHECK(line_count(dir.path / "slit_rate.csv") == 6);
  const auto summary = nlohmann::json::parse(read_file(dir.path / "summary.json"));
  CHECK(summary.at("monotone") == true);

  const fs::path q = dir.path / "quiet";
  CHECK(run({"converge", "--t", "1e-6", "--replicas", "50", "--out", q}) == kExitPass);
  std::ifstream csv(q / "coupling.csv");
  std::string line;
  std::getline(csv, line);
  while (std::getline(csv, line)) {
    std::stringstream row(line);
    std::string n, mean;
    std::getline(row, n, ',');
    std::getline(row, mean, ',');
    CHECK(std::stod(mean) <= 1e-6);
  }
}

TEST_CASE("render") {
  const TempDir dir;
  const fs::path sim = dir.path / "sim";
  REQUIRE(run({"simulate", "--n", "10", "--t", "0.5", "--seed", "7", "--out", sim}) == kExitPass);
  CHECK(run({"render", "--input", sim / "events.jsonl", "--out", dir.path / "a"}) == kExitPass);
  CHECK(run({"render", "--n", "10", "--t", "0.5", "--seed", "7", "--out", dir.path / "b"}) == kExitPass);
  CHECK(read_file(dir.path / "a" / "cluster.svg") == read_file(dir.path / "b" / "cluster.svg"));
  CHECK(read_file(dir.path / "a" / "cluster.csv") == read_file(dir.path / "b" / "cluster.csv"));
  CHECK(run({"render", "--input", sim / "events.jsonl", "--forward", "--out", dir.path / "f"}) == kExitPass);
  CHECK(fs::exists(dir.path / "f" / "cluster.svg"));

  CHECK(run({"render", "--input", dir.path / "missing.jsonl", "--out", dir.path / "m"}) == kExitUsage);

  const fs::path empty = dir.path / "empty";
  REQUIRE(run({"simulate", "--t", "1e-12", "--out", empty}) == kExitPass);
  CHECK(run({"render", "--input", empty / "events.jsonl", "--out", empty}) == kExitPass);
  CHECK(read_file(empty / "cluster.csv") == "event_index,birth_time,point_index,re,im\n");
}
