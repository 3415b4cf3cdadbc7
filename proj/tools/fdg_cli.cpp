// fdg: command-line front end for the forbidden-degree experiments.
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fdg/acceptance.hpp"
#include "fdg/harness.hpp"

namespace {

struct CommonFlags {
  std::size_t n = 1000;
  std::string k = "5";
  std::string t;
  std::string t_grid;
  std::size_t replicas = 10;
  std::uint64_t seed = 1;
  std::string out;
  std::size_t workers = 0;
  std::string format = "csv";
  std::string config;
};

void add_common(CLI::App* app, CommonFlags& f, bool with_n = true) {
  if (with_n) app->add_option("--n", f.n, "number of vertices")->check(CLI::Range(2ul, 1'000'000'000ul));
  app->add_option("--k", f.k, "forbidden degree (integer >= 2 or 'inf')");
  app->add_option("--t", f.t, "time horizon");
  app->add_option("--t-grid", f.t_grid, "a:b:steps or comma list");
  app->add_option("--replicas", f.replicas, "number of replicas");
  app->add_option("--seed", f.seed, "base seed");
  app->add_option("--out", f.out, "output file (written atomically)");
  app->add_option("--workers", f.workers, "worker threads (0 = all cores)");
  app->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--config", f.config, "key = value config file; flags given on the command line override it");
}

fdg::ExperimentConfig make_config(CLI::App* app, const CommonFlags& f, fdg::Experiment e) {
  fdg::ExperimentConfig c;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw std::invalid_argument(f.config + ": cannot read config");
    std::stringstream buf;
    buf << in.rdbuf();
    c = fdg::ExperimentConfig::from_text(buf.str());
  }
  c.experiment = e;
  auto given = [&](const char* name) { return f.config.empty() || app->count(name) > 0; };
  if (given("--n") && app->get_option_no_throw("--n")) c.n = f.n;
  if (given("--k")) c.k = fdg::ForbiddenDegree::parse(f.k);
  if (!f.t.empty() && !f.t_grid.empty()) throw std::invalid_argument("give --t or --t-grid, not both");
  if (!f.t.empty()) c.t_grid = fdg::parse_t_grid(f.t);
  if (!f.t_grid.empty()) c.t_grid = fdg::parse_t_grid(f.t_grid);
  if (given("--replicas")) c.replicas = f.replicas;
  if (given("--seed")) c.seed = f.seed;
  if (given("--out")) c.output = f.out;
  if (given("--workers")) c.workers = f.workers;
  if (given("--format")) c.format = f.format;
  return c;
}

int run_experiment(const fdg::ExperimentConfig& c) {
  const auto rec = fdg::run(c);
  if (c.output.empty()) {
    std::cout << (c.format == "json" ? rec.json() : rec.csv());
  } else {
    fdg::write_record(rec);
  }
  std::cerr << rec.one_line() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Forbidden-degree random graph experiments"};
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* help;
    fdg::Experiment experiment;
  };
  const Sub subs[] = {
      {"simulate", "simulate G^k and report component sizes per observation time", fdg::Experiment::simulate},
      {"threshold", "degree law, Q_t and threshold function over a t grid", fdg::Experiment::threshold_scan},
      {"local-limit", "root-statistic TV distance between the graph and the tree limit", fdg::Experiment::local_limit_tv},
      {"survival", "survival probability of the limiting component", fdg::Experiment::survival},
      {"kernel", "estimate the offspring kernel", fdg::Experiment::kernel_build},
      {"extinction", "solve the extinction fixed point on a fresh kernel", fdg::Experiment::extinction},
      {"equivalence", "largest component fraction alongside the survival estimate", fdg::Experiment::equivalence},
      {"giant", "largest component of G^k and of its lower bound", fdg::Experiment::giant_k5},
      {"no-giant", "k = 3 largest components and the Z statistic", fdg::Experiment::no_giant_k3},
  };
  std::vector<std::pair<CLI::App*, fdg::Experiment>> experiment_apps;
  std::vector<std::unique_ptr<CommonFlags>> flags;
  std::size_t bins = 32, samples_per_cell = 400, gen_cap = 50, size_cap = 10'000;
  for (const auto& s : subs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    flags.push_back(std::make_unique<CommonFlags>());
    add_common(sub, *flags.back());
    if (s.experiment == fdg::Experiment::kernel_build || s.experiment == fdg::Experiment::extinction) {
      sub->add_option("--bins", bins, "type bins");
      sub->add_option("--samples-per-cell", samples_per_cell, "Monte Carlo samples per kernel cell");
    }
    if (s.experiment == fdg::Experiment::survival || s.experiment == fdg::Experiment::equivalence) {
      sub->add_option("--gen-cap", gen_cap, "generation cap G");
      sub->add_option("--size-cap", size_cap, "size cap M");
    }
    experiment_apps.emplace_back(sub, s.experiment);
  }

  auto* verify = app.add_subcommand("verify", "run the acceptance battery");
  std::string suite = "fast";
  std::uint64_t verify_seed = fdg::VerifyOptions{}.seed;
  std::size_t verify_workers = 0;
  std::vector<int> only;
  std::string report_path;
  verify->add_option("--suite", suite, "fast or full")->check(CLI::IsMember({"fast", "full"}));
  verify->add_option("--seed", verify_seed, "battery seed");
  verify->add_option("--workers", verify_workers, "worker threads (0 = all cores)");
  verify->add_option("--only", only, "criteria to run (1..10)")->check(CLI::Range(1, 10));
  verify->add_option("--out", report_path, "JSON report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*verify) {
      fdg::VerifyOptions opt;
      opt.suite = suite == "full" ? fdg::Suite::full : fdg::Suite::fast;
      opt.seed = verify_seed;
      opt.workers = verify_workers;
      opt.only = only;
      opt.on_result = [](const fdg::CriterionResult& r) { std::cout << fdg::format_result(r) << std::endl; };
      const auto report = fdg::verify(opt);
      if (!report_path.empty()) fdg::write_atomic(report_path, report.json(), "");
      std::cout << (report.all_pass() ? "all criteria passed" : "some criteria FAILED") << " (seed " << report.seed
                << ")\n";
      return report.all_pass() ? 0 : 1;
    }
    for (std::size_t i = 0; i < experiment_apps.size(); ++i) {
      auto* sub = experiment_apps[i].first;
      if (!*sub) continue;
      auto c = make_config(sub, *flags[i], experiment_apps[i].second);
      if (sub->get_option_no_throw("--bins")) {
        if (flags[i]->config.empty() || sub->count("--bins")) c.bins = bins;
        if (flags[i]->config.empty() || sub->count("--samples-per-cell")) c.samples_per_cell = samples_per_cell;
      }
      if (sub->get_option_no_throw("--gen-cap")) {
        if (flags[i]->config.empty() || sub->count("--gen-cap")) c.gen_cap = gen_cap;
        if (flags[i]->config.empty() || sub->count("--size-cap")) c.size_cap = size_cap;
      }
      return run_experiment(c);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
