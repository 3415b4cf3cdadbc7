#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include <json.hpp>

#include "doctest.h"
#include "fdg/acceptance.hpp"
#include "fdg/analytic.hpp"
#include "fdg/harness.hpp"
#include "fdg/kernel.hpp"

using namespace fdg;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config(Experiment e) {
  ExperimentConfig c;
  c.experiment = e;
  c.n = 300;
  c.k = ForbiddenDegree::finite(5);
  c.t_grid = {1.0, 2.0};
  c.replicas = 3;
  c.seed = 99;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("fdg_unit_harness_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(FDG_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config text and json round trip") {
  auto c = small_config(Experiment::equivalence);
  c.k = ForbiddenDegree::unbounded();
  c.t_grid = {0.1, 1.0 / 3.0, 2.5};
  c.gen_cap = 17;
  c.size_cap = 123;
  c.bins = 9;
  c.samples_per_cell = 77;
  c.output = "out/run.csv";
  c.format = "json";

  const auto from_text = ExperimentConfig::from_text(c.to_text());
  CHECK(from_text.to_text() == c.to_text());
  CHECK(from_text.t_grid == c.t_grid);
  CHECK_FALSE(from_text.k.is_finite());
  const auto from_json = ExperimentConfig::from_json(c.to_json());
  CHECK(from_json.to_text() == c.to_text());
  CHECK(from_json.hash() == c.hash());

  SUBCASE("comments, sections and blank lines are ignored") {
    const auto parsed = ExperimentConfig::from_text("# note\n[run]\n\nexperiment = giant-k5\n  n=42  \n");
    CHECK(parsed.experiment == Experiment::giant_k5);
    CHECK(parsed.n == 42);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(ExperimentConfig::from_text("bogus = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(ExperimentConfig::from_text("n 5\n"), std::invalid_argument);
    CHECK_THROWS_AS(ExperimentConfig::from_text("n = -5\n"), std::invalid_argument);
    CHECK_THROWS_AS(ExperimentConfig::from_text("n = 5x\n"), std::invalid_argument);
    CHECK_THROWS_AS(ExperimentConfig::from_text("experiment = nothing\n"), std::invalid_argument);
  }
}

TEST_CASE("config hash ignores output location, workers and format") {
  const auto c = small_config(Experiment::simulate);
  auto d = c;
  d.output = "elsewhere.csv";
  d.workers = 8;
  d.format = "json";
  CHECK(d.hash() == c.hash());
  d.seed += 1;
  CHECK(d.hash() != c.hash());
  auto e = c;
  e.t_grid = {1.0, 2.5};
  CHECK(e.hash() != c.hash());
  CHECK(c.hash().size() == 16);
}

TEST_CASE("parse_t_grid") {
  CHECK(parse_t_grid("1:3:5") == std::vector<double>{1.0, 1.5, 2.0, 2.5, 3.0});
  CHECK(parse_t_grid("2:2:1") == std::vector<double>{2.0});
  CHECK(parse_t_grid("0.5, 1,2") == std::vector<double>{0.5, 1.0, 2.0});
  CHECK(parse_t_grid("4") == std::vector<double>{4.0});
  CHECK_THROWS_AS(parse_t_grid("1:2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_t_grid("1:2:0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_t_grid("3:2:4"), std::invalid_argument);
  CHECK_THROWS_AS(parse_t_grid("-1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_t_grid("a,b"), std::invalid_argument);
  CHECK_THROWS_AS(parse_t_grid(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_t_grid("1,nan"), std::invalid_argument);
}

TEST_CASE("invalid configurations are rejected") {
  auto c = small_config(Experiment::simulate);
  c.n = 1;
  CHECK_THROWS_AS(run(c), std::invalid_argument);
  c = small_config(Experiment::simulate);
  c.format = "xml";
  CHECK_THROWS_AS(run(c), std::invalid_argument);
  c = small_config(Experiment::threshold_scan);
  c.k = ForbiddenDegree::unbounded();
  CHECK_THROWS_AS(run(c), std::invalid_argument);
  c = small_config(Experiment::kernel_build);
  c.bins = 0;
  CHECK_THROWS_AS(run(c), std::invalid_argument);
  c = small_config(Experiment::simulate);
  c.t_grid.clear();
  CHECK_THROWS_AS(run(c), std::invalid_argument);
}

TEST_CASE("replicas = 0 gives empty rows and an empty summary") {
  for (const auto e : {Experiment::simulate, Experiment::equivalence, Experiment::giant_k5, Experiment::survival}) {
    auto c = small_config(e);
    c.replicas = 0;
    const auto rec = run(c);
    CHECK(rec.rows.empty());
    CHECK_FALSE(rec.columns.empty());
    const auto s = rec.summary();
    CHECK(s.size() == rec.columns.size());
    for (const auto& [name, col] : s) CHECK(col.count == 0);
    CHECK(rec.csv().find("# schema=1") == 0);
    CHECK(nlohmann::json::parse(rec.json()).at("rows").empty());
  }
}

TEST_CASE("rows per replica and grid point, summary recomputable from rows") {
  const auto c = small_config(Experiment::simulate);
  const auto rec = run(c);
  REQUIRE(rec.rows.size() == c.replicas * c.t_grid.size());
  CHECK(rec.config_hash == c.hash());
  const auto s = rec.summary();
  for (std::size_t j = 0; j < rec.columns.size(); ++j) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& row : rec.rows) {
      REQUIRE(row.size() == rec.columns.size());
      if (std::isfinite(row[j])) {
        sum += row[j];
        ++count;
      }
    }
    const auto& col = s.at(rec.columns[j]);
    CHECK(col.count == count);
    if (count > 0) {
      CHECK(col.mean == doctest::Approx(sum / static_cast<double>(count)));
      CHECK(col.q05 <= col.median);
      CHECK(col.median <= col.q95);
    }
  }
  for (const auto& row : rec.rows) CHECK(row[2] == 300.0);

  const auto j = nlohmann::json::parse(rec.json());
  CHECK(j.at("schema") == 1);
  CHECK(j.at("config_hash") == rec.config_hash);
  CHECK(j.at("rows").size() == rec.rows.size());
  CHECK(j.at("summary").at("c_max").at("mean").get<double>() == doctest::Approx(s.at("c_max").mean));
  CHECK(rec.one_line().find(rec.config_hash) != std::string::npos);
}

TEST_CASE("same config gives byte-identical CSV") {
  auto c = small_config(Experiment::equivalence);
  c.t_grid = {2.0};
  c.gen_cap = 20;
  c.size_cap = 500;
  const auto a = run(c).csv();
  c.workers = 4;
  const auto b = run(c).csv();
  CHECK(a == b);
  c.seed += 1;
  CHECK(run(c).csv() != a);
}

TEST_CASE("threshold scan extras") {
  auto c = small_config(Experiment::threshold_scan);
  c.t_grid = parse_t_grid("0.5:4:8");
  const auto rec = run(c);
  CHECK(rec.rows.size() == 8);
  CHECK(rec.extras.at("sup_threshold_lhs") == doctest::Approx(threshold_lhs(rec.extras.at("argsup_threshold_lhs"), 5)).epsilon(1e-9));
  CHECK(rec.extras.at("t_lo") == doctest::Approx(1.11414).epsilon(1e-4));
  CHECK(rec.extras.at("t_hi") == doctest::Approx(3.86307).epsilon(1e-4));
}

TEST_CASE("atomic writes and hash refusal") {
  const auto dir = scratch_dir("atomic");
  const auto path = dir / "run.csv";
  const auto c = small_config(Experiment::simulate);
  auto rec = run(c);
  write_atomic(path, rec.csv(), rec.config_hash);
  CHECK(slurp(path) == rec.csv());
  // Same hash: replaced.
  write_atomic(path, rec.csv() + "\n", rec.config_hash);
  CHECK(slurp(path) == rec.csv() + "\n");

  auto other = c;
  other.seed = 1234;
  const auto other_rec = run(other);
  try {
    write_atomic(path, other_rec.csv(), other_rec.config_hash);
    FAIL("mismatched hash was accepted");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find(path.string()) != std::string::npos);
  }
  CHECK(slurp(path) == rec.csv() + "\n");

  // An empty hash overwrites unconditionally.
  write_atomic(path, "plain\n", "");
  CHECK(slurp(path) == "plain\n");

  // JSON outputs embed the hash too.
  const auto jpath = dir / "run.json";
  write_atomic(jpath, rec.json(), rec.config_hash);
  CHECK_THROWS_AS(write_atomic(jpath, other_rec.json(), other_rec.config_hash), std::runtime_error);

  // Unwritable target: error names the path.
  try {
    write_atomic(dir / "missing" / "x.csv", "x", "");
    FAIL("write into a missing directory succeeded");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("missing") != std::string::npos);
  }

  std::size_t leftovers = 0;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().filename().string().find(".tmp") != std::string::npos) ++leftovers;
  CHECK(leftovers == 0);
  fs::remove_all(dir);
}

TEST_CASE("write_record uses the configured format") {
  const auto dir = scratch_dir("record");
  auto c = small_config(Experiment::simulate);
  c.replicas = 1;
  c.output = (dir / "r.json").string();
  c.format = "json";
  const auto rec = run(c);
  write_record(rec);
  const auto j = nlohmann::json::parse(slurp(c.output));
  CHECK(j.at("config_hash") == rec.config_hash);
  fs::remove_all(dir);
}

TEST_CASE("kernel json round trip") {
  KernelOptions o;
  o.bins = 3;
  o.samples_per_cell = 50;
  o.m_samples = 500;
  o.seed = 5;
  const auto K = estimate_kernel(1.5, 4, o);
  const auto back = kernel_from_json(kernel_to_json(K));
  CHECK(back.t == K.t);
  CHECK(back.k == K.k);
  CHECK(back.bins == K.bins);
  CHECK(back.seed == K.seed);
  CHECK(back.m_hat == K.m_hat);
  CHECK(back.row_begin == K.row_begin);
  REQUIRE(back.cells.size() == K.cells.size());
  for (std::size_t i = 0; i < K.cells.size(); ++i) {
    CHECK(back.cells[i].f == K.cells[i].f);
    CHECK(back.cells[i].weight == K.cells[i].weight);
    CHECK(back.cells[i].x_bins == K.cells[i].x_bins);
  }
  const std::vector<double> f(3, 0.5);
  CHECK(phi_apply(back, f) == phi_apply(K, f));
  CHECK_THROWS(kernel_from_json("{}"));
}

TEST_CASE("kernel-build record carries the kernel") {
  auto c = small_config(Experiment::kernel_build);
  c.k = ForbiddenDegree::finite(4);
  c.t_grid = {1.0};
  c.bins = 3;
  c.samples_per_cell = 30;
  const auto rec = run(c);
  REQUIRE_FALSE(rec.kernel_json.empty());
  CHECK(kernel_from_json(rec.kernel_json).bins == 3);
  CHECK(nlohmann::json::parse(rec.json()).contains("kernel"));
}

TEST_CASE("ReplicaError carries the replica index") {
  const ReplicaError e(7, "boom");
  CHECK(e.replica == 7);
  CHECK(std::string(e.what()) == "replica 7: boom");
}

TEST_CASE("verify: tampered pi fails the analytic criterion") {
  VerifyOptions opt;
  opt.only = {2};
  const auto clean = verify(opt);
  REQUIRE(clean.results.size() == 1);
  CHECK(clean.results[0].id == 2);
  CHECK(clean.results[0].pass);
  CHECK(clean.seed == opt.seed);

  opt.pi = [](double t, int k) { return compute_pi(t, k) + 1e-3; };
  const auto tampered = verify(opt);
  REQUIRE(tampered.results.size() == 1);
  CHECK_FALSE(tampered.results[0].pass);
  CHECK_FALSE(tampered.all_pass());
  const auto j = nlohmann::json::parse(tampered.json());
  CHECK(j.at("seed") == opt.seed);
  CHECK(j.at("criteria").at(0).at("pass") == false);
  CHECK(format_result(tampered.results[0]).rfind("[FAIL] 2", 0) == 0);
}

TEST_CASE("cli exit codes") {
  const auto dir = scratch_dir("cli");
  const auto out = (dir / "s.csv").string();
  CHECK(run_cli("simulate --n 200 --k 4 --t 1 --replicas 2 --out " + out) == 0);
  CHECK(fs::exists(out));
  CHECK(run_cli("simulate --n 200 --k 4 --t 1 --replicas 2 --out " + out) == 0);
  // Same path, different config: refused.
  CHECK(run_cli("simulate --n 200 --k 4 --t 1 --replicas 2 --seed 77 --out " + out) == 1);
  CHECK(run_cli("simulate --n notanumber") == 2);
  CHECK(run_cli("simulate --n 200 --k 1 --t 1") == 2);
  CHECK(run_cli("simulate --n 200 --t-grid 1:2") == 2);
  CHECK(run_cli("threshold --k inf --t 1") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("verify --only 2") == 0);
  CHECK(run_cli("verify --only 11") == 2);
  fs::remove_all(dir);
}
