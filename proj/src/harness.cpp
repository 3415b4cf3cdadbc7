#include "fdg/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "fdg/analytic.hpp"
#include "fdg/components.hpp"
#include "fdg/events.hpp"
#include "fdg/extinction.hpp"
#include "fdg/oracles.hpp"
#include "fdg/parallel.hpp"
#include "fdg/process.hpp"
#include "fdg/tkt.hpp"

namespace fdg {

using nlohmann::json;

namespace {

constexpr std::pair<Experiment, const char*> kNames[] = {
    {Experiment::no_giant_k3, "no-giant-k3"},   {Experiment::threshold_scan, "threshold-scan"},
    {Experiment::giant_k5, "giant-k5"},         {Experiment::local_limit_tv, "local-limit-tv"},
    {Experiment::equivalence, "equivalence"},   {Experiment::kernel_build, "kernel-build"},
    {Experiment::extinction, "extinction"},     {Experiment::simulate, "simulate"},
    {Experiment::survival, "survival"},
};

std::string format_double(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::size_t parse_count(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    if (!value.empty() && value[0] == '-') throw std::invalid_argument("negative");
    v = std::stoull(value, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: invalid value for " + key + ": '" + value + "'");
  }
  if (pos != value.size()) throw std::invalid_argument("config: invalid value for " + key + ": '" + value + "'");
  return static_cast<std::size_t>(v);
}

std::string join_grid(const std::vector<double>& grid) {
  std::string out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i) out += ",";
    out += format_double(grid[i]);
  }
  return out;
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

void validate(const ExperimentConfig& c) {
  if (c.t_grid.empty()) throw std::invalid_argument("config: t grid is empty");
  for (const double t : c.t_grid)
    if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("config: times must be finite and >= 0");
  if (c.n < 2) throw std::invalid_argument("config: n must be >= 2");
  if (c.format != "csv" && c.format != "json") throw std::invalid_argument("config: format must be csv or json");
  const bool needs_k = c.experiment == Experiment::threshold_scan || c.experiment == Experiment::kernel_build ||
                       c.experiment == Experiment::extinction;
  if (needs_k && !c.k.is_finite()) throw std::invalid_argument("config: this experiment needs a finite k");
  if (c.experiment == Experiment::kernel_build && c.bins == 0) throw std::invalid_argument("config: bins must be positive");
}

RngStream replica_stream(const ExperimentConfig& c, std::uint64_t part, std::size_t replica) {
  return RngStream(c.seed, hash_combine(part, replica));
}

template <class Fn>
auto guarded(std::size_t replica, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ReplicaError&) {
    throw;
  } catch (const std::exception& e) {
    throw ReplicaError(replica, e.what());
  }
}

using Rows = std::vector<std::vector<double>>;

void run_simulate(const ExperimentConfig& c, RunRecord& rec) {
  rec.columns = {"replica", "seed", "n", "k", "t", "c_max", "n_components", "z"};
  const double kval = c.k.is_finite() ? c.k.value() : std::numeric_limits<double>::infinity();
  auto grid = c.t_grid;
  std::sort(grid.begin(), grid.end());
  const auto per = parallel_map<Rows>(c.replicas, c.workers, [&](std::size_t i) {
    return guarded(i, [&] {
      RngStream r = replica_stream(c, 1, i);
      const auto obs = simulate(c.n, c.k, grid.back(), r, grid);
      Rows rows;
      for (const auto& o : obs) {
        const double z = kval == 3 ? z_statistic(o.summary) : std::numeric_limits<double>::quiet_NaN();
        rows.push_back({static_cast<double>(i), static_cast<double>(c.seed), static_cast<double>(c.n), kval, o.time,
                        static_cast<double>(o.summary.c_max), static_cast<double>(o.summary.sizes.size()), z});
      }
      return rows;
    });
  });
  for (const auto& rows : per) rec.rows.insert(rec.rows.end(), rows.begin(), rows.end());
}

void run_no_giant(const ExperimentConfig& c, RunRecord& rec) {
  if (c.k != ForbiddenDegree::finite(3)) throw std::invalid_argument("config: no-giant-k3 requires k = 3");
  rec.columns = {"replica", "t", "c_max", "c_max_over_n", "z_over_n"};
  auto grid = c.t_grid;
  std::sort(grid.begin(), grid.end());
  const auto per = parallel_map<Rows>(c.replicas, c.workers, [&](std::size_t i) {
    return guarded(i, [&] {
      RngStream r = replica_stream(c, 2, i);
      Rows rows;
      const double n = static_cast<double>(c.n);
      for (const auto& o : simulate(c.n, c.k, grid.back(), r, grid))
        rows.push_back({static_cast<double>(i), o.time, static_cast<double>(o.summary.c_max),
                        o.summary.c_max / n, z_statistic(o.summary) / n});
      return rows;
    });
  });
  for (const auto& rows : per) rec.rows.insert(rec.rows.end(), rows.begin(), rows.end());
  // Z along the discrete chain for 5n steps.
  if (c.replicas > 0) {
    const auto traj = parallel_map<std::vector<double>>(c.replicas, c.workers, [&](std::size_t i) {
      return guarded(i, [&] {
        RngStream r = replica_stream(c, 3, i);
        return k3_z_trajectory(c.n, 5 * c.n, r);
      });
    });
    double zmax = 0.0;
    for (std::size_t l = 0; l < traj.front().size(); ++l) {
      double s = 0.0;
      for (const auto& tr : traj) s += tr[l];
      zmax = std::max(zmax, s / static_cast<double>(c.replicas) / static_cast<double>(c.n));
    }
    rec.extras["max_mean_z_over_n"] = zmax;
  }
}

void run_threshold(const ExperimentConfig& c, RunRecord& rec) {
  const int k = c.k.value();
  rec.columns = {"t", "k", "pi"};
  for (int i = 0; i < k; ++i) rec.columns.push_back("p_" + std::to_string(i));
  rec.columns.push_back("q_t");
  rec.columns.push_back("threshold_lhs");
  for (const double t : c.t_grid) {
    const auto prof = compute_degree_profile(t, k);
    std::vector<double> row{t, static_cast<double>(k), prof.pi};
    row.insert(row.end(), prof.p.begin(), prof.p.end());
    row.push_back(prof.q_t);
    row.push_back(k >= 3 ? threshold_lhs(t, k) : std::numeric_limits<double>::quiet_NaN());
    rec.rows.push_back(std::move(row));
  }
  if (k >= 3) {
    const auto [arg, sup] = threshold_sup(k);
    rec.extras["sup_threshold_lhs"] = sup;
    rec.extras["argsup_threshold_lhs"] = arg;
    if (const auto iv = supercritical_interval(k)) {
      rec.extras["t_lo"] = iv->first;
      rec.extras["t_hi"] = iv->second;
    }
  }
}

void run_giant(const ExperimentConfig& c, RunRecord& rec) {
  rec.columns = {"replica", "t", "c_max_over_n", "lower_c_max_over_n"};
  const auto per = parallel_map<Rows>(c.replicas, c.workers, [&](std::size_t i) {
    return guarded(i, [&] {
      Rows rows;
      for (std::size_t j = 0; j < c.t_grid.size(); ++j) {
        const double t = c.t_grid[j];
        RngStream r = replica_stream(c, 10 + j, i);
        const auto stream = sample_event_stream(c.n, t, r);
        const double n = static_cast<double>(c.n);
        const auto upper = components(run_process(stream, c.k, t).graph).c_max / n;
        const auto lower = components(t_k_transform(accumulate(stream), c.k)).c_max / n;
        rows.push_back({static_cast<double>(i), t, upper, lower});
      }
      return rows;
    });
  });
  for (const auto& rows : per) rec.rows.insert(rec.rows.end(), rows.begin(), rows.end());
}

// Root statistic (degree, tenth of [0, t] holding one uniform root edge).
std::size_t root_category(std::size_t degree, double label, double t) {
  if (degree == 0) return 0;
  const auto bin = std::min<std::size_t>(9, static_cast<std::size_t>(label / t * 10.0));
  return 1 + (degree - 1) * 10 + bin;
}

void run_local_limit(const ExperimentConfig& c, RunRecord& rec) {
  if (!c.k.is_finite()) throw std::invalid_argument("config: local-limit-tv needs a finite k");
  rec.columns = {"t", "k", "samples", "tv"};
  const std::size_t roots_per_graph = 20;
  const std::size_t cats = 1 + static_cast<std::size_t>(c.k.value() - 1) * 10;
  for (std::size_t j = 0; j < c.t_grid.size(); ++j) {
    const double t = c.t_grid[j];
    if (c.replicas == 0) continue;
    const std::size_t graphs = (c.replicas + roots_per_graph - 1) / roots_per_graph;
    const auto gh = parallel_map<std::vector<long>>(graphs, c.workers, [&](std::size_t i) {
      return guarded(i, [&] {
        RngStream r = replica_stream(c, 100 + j, i);
        const auto g = run_process(sample_event_stream(c.n, t, r), c.k, t).graph;
        std::vector<long> h(cats, 0);
        for (std::size_t s = 0; s < roots_per_graph && i * roots_per_graph + s < c.replicas; ++s) {
          const auto v = static_cast<Vertex>(r.uniform_below(c.n));
          const auto inc = g.incident(v);
          const double lab = inc.empty() ? 0.0 : g.edge(inc[r.uniform_below(inc.size())]).label;
          ++h[root_category(inc.size(), lab, t)];
        }
        return h;
      });
    });
    const auto tc = parallel_map<std::size_t>(c.replicas, c.workers, [&](std::size_t i) {
      return guarded(i, [&] {
        RngStream r = replica_stream(c, 200 + j, i);
        TktOptions o;
        o.max_generation = 1;
        const auto s = sample_tkt(t, c.k, r, o);
        const double lab = s.root_labels.empty() ? 0.0 : s.root_labels[r.uniform_below(s.root_labels.size())];
        return root_category(s.root_labels.size(), lab, t);
      });
    });
    std::vector<long> a(cats, 0), b(cats, 0);
    for (const auto& h : gh)
      for (std::size_t x = 0; x < cats; ++x) a[x] += h[x];
    for (const auto x : tc) ++b[x];
    rec.rows.push_back({t, static_cast<double>(c.k.value()), static_cast<double>(c.replicas), oracle::tv_distance(a, b)});
  }
}

SurvivalOptions survival_options(const ExperimentConfig& c) {
  SurvivalOptions o;
  o.gen_cap = c.gen_cap;
  o.size_cap = c.size_cap;
  o.depth_cap = c.d_max;
  return o;
}

void run_equivalence(const ExperimentConfig& c, RunRecord& rec) {
  rec.columns = {"replica", "c_max", "c_max_over_n"};
  const double t = c.t_grid.front();
  const auto per = parallel_map<std::vector<double>>(c.replicas, c.workers, [&](std::size_t i) {
    return guarded(i, [&] {
      RngStream r = replica_stream(c, 300, i);
      const auto cm = components(run_process(sample_event_stream(c.n, t, r), c.k, t).graph).c_max;
      return std::vector<double>{static_cast<double>(i), static_cast<double>(cm), cm / static_cast<double>(c.n)};
    });
  });
  rec.rows = per;
  if (c.k.is_finite() && c.replicas > 0) {
    RngStream r(c.seed, 301);
    const auto s = estimate_survival(t, c.k, 40 * c.replicas, r, survival_options(c), c.workers);
    rec.extras["a_hat"] = s.a_hat;
    rec.extras["a_hat_se"] = s.se();
    rec.extras["survival_replicas"] = static_cast<double>(s.replicas);
  }
}

OffspringKernel build_kernel(const ExperimentConfig& c, double t) {
  KernelOptions ko;
  ko.bins = c.bins;
  ko.samples_per_cell = c.samples_per_cell;
  ko.seed = hash_combine(c.seed, 400);
  ko.workers = c.workers;
  return estimate_kernel(t, c.k.value(), ko);
}

void run_kernel(const ExperimentConfig& c, RunRecord& rec) {
  rec.columns = {"y_bin", "children", "f", "f_se", "weight", "g"};
  const auto kernel = build_kernel(c, c.t_grid.front());
  for (const auto& cell : kernel.cells)
    rec.rows.push_back({static_cast<double>(cell.y_bin), static_cast<double>(cell.x_bins.size()), cell.f, cell.f_se,
                        cell.weight, kernel.g(cell)});
  rec.extras["rho_hat"] = estimate_spectral_radius(kernel.normalized());
  double dev = 0.0;
  for (const double x : phi_apply(kernel, std::vector<double>(kernel.bins, 1.0))) dev = std::max(dev, std::abs(x - 1.0));
  rec.extras["sup_phi1_deviation"] = dev;
  rec.extras["truncated"] = static_cast<double>(kernel.truncated);
  rec.kernel_json = kernel_to_json(kernel);
}

void run_extinction(const ExperimentConfig& c, RunRecord& rec) {
  rec.columns = {"t", "rho_hat", "q_twostage", "q_twostage_se", "a_from_q", "residual", "converged"};
  for (const double t : c.t_grid) {
    const auto kernel = build_kernel(c, t);
    ExtinctionOptions eo;
    eo.seed = hash_combine(c.seed, 500);
    eo.workers = c.workers;
    const auto s = solve_extinction(kernel, eo);
    rec.rows.push_back({t, s.rho_hat, s.q_twostage, s.q_twostage_se, 1.0 - s.q_twostage, s.residual,
                        s.status == SolveStatus::converged ? 1.0 : 0.0});
  }
}

void run_survival(const ExperimentConfig& c, RunRecord& rec) {
  if (!c.k.is_finite()) throw std::invalid_argument("config: survival needs a finite k");
  rec.columns = {"t", "k", "a_hat", "ci_halfwidth", "truncated_fraction"};
  for (std::size_t j = 0; j < c.t_grid.size(); ++j) {
    if (c.replicas == 0) continue;
    RngStream r(c.seed, hash_combine(600, j));
    const auto s = estimate_survival(c.t_grid[j], c.k, c.replicas, r, survival_options(c), c.workers);
    rec.rows.push_back({c.t_grid[j], static_cast<double>(c.k.value()), s.a_hat, s.ci_halfwidth,
                        static_cast<double>(s.truncated) / static_cast<double>(s.replicas)});
  }
}

std::string cell_text(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return format_double(v);
}

json maybe_number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

std::optional<std::string> embedded_hash(const std::string& content) {
  const std::string csv_key = "# config_hash=";
  if (const auto p = content.find(csv_key); p != std::string::npos) {
    const auto e = content.find('\n', p);
    return trim(content.substr(p + csv_key.size(), e - p - csv_key.size()));
  }
  try {
    const auto j = json::parse(content);
    if (j.is_object() && j.contains("config_hash")) return j["config_hash"].get<std::string>();
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

}  // namespace

const char* to_string(Experiment e) noexcept {
  for (const auto& [x, name] : kNames)
    if (x == e) return name;
  return "?";
}

Experiment parse_experiment(const std::string& name) {
  for (const auto& [x, n] : kNames)
    if (name == n) return x;
  throw std::invalid_argument("unknown experiment '" + name + "'");
}

std::string ExperimentConfig::to_text() const {
  std::ostringstream os;
  os << "experiment = " << fdg::to_string(experiment) << "\n"
     << "n = " << n << "\n"
     << "k = " << k.to_string() << "\n"
     << "t_grid = " << join_grid(t_grid) << "\n"
     << "replicas = " << replicas << "\n"
     << "seed = " << seed << "\n"
     << "d_max = " << d_max << "\n"
     << "gen_cap = " << gen_cap << "\n"
     << "size_cap = " << size_cap << "\n"
     << "bins = " << bins << "\n"
     << "samples_per_cell = " << samples_per_cell << "\n"
     << "workers = " << workers << "\n"
     << "output = " << output << "\n"
     << "format = " << format << "\n";
  return os.str();
}

ExperimentConfig ExperimentConfig::from_text(const std::string& text) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#' || stripped[0] == '[') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config: expected 'key = value', got '" + stripped + "'");
    const auto key = trim(stripped.substr(0, eq));
    const auto value = trim(stripped.substr(eq + 1));
    if (key == "experiment") c.experiment = parse_experiment(value);
    else if (key == "n") c.n = parse_count(key, value);
    else if (key == "k") c.k = ForbiddenDegree::parse(value);
    else if (key == "t_grid") c.t_grid = parse_t_grid(value);
    else if (key == "replicas") c.replicas = parse_count(key, value);
    else if (key == "seed") c.seed = parse_count(key, value);
    else if (key == "d_max") c.d_max = parse_count(key, value);
    else if (key == "gen_cap") c.gen_cap = parse_count(key, value);
    else if (key == "size_cap") c.size_cap = parse_count(key, value);
    else if (key == "bins") c.bins = parse_count(key, value);
    else if (key == "samples_per_cell") c.samples_per_cell = parse_count(key, value);
    else if (key == "workers") c.workers = parse_count(key, value);
    else if (key == "output") c.output = value;
    else if (key == "format") c.format = value;
    else throw std::invalid_argument("config: unknown key '" + key + "'");
  }
  return c;
}

std::string ExperimentConfig::to_json() const {
  json j{{"experiment", fdg::to_string(experiment)},
         {"n", n},
         {"k", k.to_string()},
         {"t_grid", t_grid},
         {"replicas", replicas},
         {"seed", seed},
         {"d_max", d_max},
         {"gen_cap", gen_cap},
         {"size_cap", size_cap},
         {"bins", bins},
         {"samples_per_cell", samples_per_cell},
         {"workers", workers},
         {"output", output},
         {"format", format}};
  return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  const auto j = json::parse(text);
  ExperimentConfig c;
  c.experiment = parse_experiment(j.at("experiment").get<std::string>());
  c.n = j.at("n").get<std::size_t>();
  c.k = ForbiddenDegree::parse(j.at("k").get<std::string>());
  c.t_grid = j.at("t_grid").get<std::vector<double>>();
  c.replicas = j.at("replicas").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.d_max = j.at("d_max").get<std::size_t>();
  c.gen_cap = j.at("gen_cap").get<std::size_t>();
  c.size_cap = j.at("size_cap").get<std::size_t>();
  c.bins = j.at("bins").get<std::size_t>();
  c.samples_per_cell = j.at("samples_per_cell").get<std::size_t>();
  c.workers = j.at("workers").get<std::size_t>();
  c.output = j.at("output").get<std::string>();
  c.format = j.at("format").get<std::string>();
  return c;
}

std::string ExperimentConfig::hash() const {
  ExperimentConfig c = *this;
  c.output.clear();
  c.workers = 0;
  c.format.clear();
  // FNV-1a over the canonical text.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char ch : c.to_text()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::vector<double> parse_t_grid(const std::string& spec) {
  auto number = [&](const std::string& s) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(trim(s), &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("invalid t grid '" + spec + "'");
    }
    if (pos != trim(s).size() || !std::isfinite(v) || v < 0.0) throw std::invalid_argument("invalid t grid '" + spec + "'");
    return v;
  };
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    const auto a = spec.find(':');
    const auto b = spec.find(':', a + 1);
    if (b == std::string::npos) throw std::invalid_argument("t grid must be a:b:steps, got '" + spec + "'");
    const double lo = number(spec.substr(0, a));
    const double hi = number(spec.substr(a + 1, b - a - 1));
    const auto steps = parse_count("t_grid steps", trim(spec.substr(b + 1)));
    if (steps == 0 || hi < lo) throw std::invalid_argument("invalid t grid '" + spec + "'");
    if (steps == 1) return {lo};
    for (std::size_t i = 0; i < steps; ++i) out.push_back(lo + (hi - lo) * static_cast<double>(i) / (steps - 1));
    return out;
  }
  std::string item;
  std::istringstream in(spec);
  while (std::getline(in, item, ',')) out.push_back(number(item));
  if (out.empty()) throw std::invalid_argument("empty t grid");
  return out;
}

std::map<std::string, ColumnSummary> RunRecord::summary() const {
  std::map<std::string, ColumnSummary> out;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    std::vector<double> v;
    for (const auto& row : rows)
      if (std::isfinite(row[j])) v.push_back(row[j]);
    ColumnSummary s;
    s.count = v.size();
    if (!v.empty()) {
      double sum = 0.0;
      for (const double x : v) sum += x;
      s.mean = sum / static_cast<double>(v.size());
      if (v.size() > 1) {
        double ss = 0.0;
        for (const double x : v) ss += (x - s.mean) * (x - s.mean);
        s.se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
      }
      s.q05 = quantile(v, 0.05);
      s.median = quantile(v, 0.5);
      s.q95 = quantile(v, 0.95);
    }
    out[columns[j]] = s;
  }
  return out;
}

std::string RunRecord::csv() const {
  std::ostringstream os;
  os << "# schema=1\n# config_hash=" << config_hash << "\n# experiment=" << to_string(config.experiment) << "\n";
  for (const auto& [key, value] : extras) os << "# " << key << "=" << cell_text(value) << "\n";
  for (std::size_t j = 0; j < columns.size(); ++j) os << (j ? "," : "") << columns[j];
  os << "\n";
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) os << (j ? "," : "") << cell_text(row[j]);
    os << "\n";
  }
  return os.str();
}

std::string RunRecord::json() const {
  nlohmann::json j;
  j["schema"] = 1;
  j["config_hash"] = config_hash;
  j["config"] = nlohmann::json::parse(config.to_json());
  j["columns"] = columns;
  j["rows"] = nlohmann::json::array();
  for (const auto& row : rows) {
    auto r = nlohmann::json::array();
    for (const double v : row) r.push_back(maybe_number(v));
    j["rows"].push_back(r);
  }
  for (const auto& [key, value] : extras) j["extras"][key] = maybe_number(value);
  for (const auto& [name, s] : summary())
    j["summary"][name] = {{"count", s.count}, {"mean", s.mean}, {"se", s.se},
                          {"q05", s.q05},     {"median", s.median}, {"q95", s.q95}};
  if (!kernel_json.empty()) j["kernel"] = nlohmann::json::parse(kernel_json);
  j["wall_seconds"] = wall_seconds;
  return j.dump(2);
}

std::string RunRecord::one_line() const {
  std::ostringstream os;
  os.precision(6);
  os << to_string(config.experiment) << " hash=" << config_hash << " rows=" << rows.size();
  const auto s = summary();
  for (const char* key : {"c_max_over_n", "a_hat", "tv", "q_twostage", "threshold_lhs"}) {
    if (const auto it = s.find(key); it != s.end() && it->second.count > 0)
      os << " " << key << "=" << it->second.mean << "(se " << it->second.se << ")";
  }
  for (const auto& [key, value] : extras) os << " " << key << "=" << value;
  os << " wall=" << wall_seconds << "s";
  return os.str();
}

RunRecord run(const ExperimentConfig& config) {
  validate(config);
  const auto start = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.config = config;
  rec.config_hash = config.hash();
  switch (config.experiment) {
    case Experiment::simulate: run_simulate(config, rec); break;
    case Experiment::no_giant_k3: run_no_giant(config, rec); break;
    case Experiment::threshold_scan: run_threshold(config, rec); break;
    case Experiment::giant_k5: run_giant(config, rec); break;
    case Experiment::local_limit_tv: run_local_limit(config, rec); break;
    case Experiment::equivalence: run_equivalence(config, rec); break;
    case Experiment::kernel_build: run_kernel(config, rec); break;
    case Experiment::extinction: run_extinction(config, rec); break;
    case Experiment::survival: run_survival(config, rec); break;
  }
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

void write_atomic(const std::filesystem::path& path, const std::string& content, const std::string& config_hash) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!config_hash.empty() && fs::exists(path, ec)) {
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    const auto existing = embedded_hash(buf.str());
    if (!existing || *existing != config_hash)
      throw std::runtime_error(path.string() + ": exists with a different config hash; refusing to overwrite");
  }
  const fs::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(tmp.string() + ": cannot open for writing");
    out << content;
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      throw std::runtime_error(tmp.string() + ": write failed");
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error(path.string() + ": rename failed: " + ec.message());
  }
}

void write_record(const RunRecord& record) {
  if (record.config.output.empty()) return;
  write_atomic(record.config.output, record.config.format == "json" ? record.json() : record.csv(), record.config_hash);
}

std::string kernel_to_json(const OffspringKernel& kernel) {
  nlohmann::json j{{"t", kernel.t},         {"k", kernel.k},       {"bins", kernel.bins},
                   {"samples_per_cell", kernel.samples_per_cell}, {"seed", kernel.seed},
                   {"eps", kernel.eps},     {"m_hat", kernel.m_hat}, {"m_se", kernel.m_se},
                   {"row_begin", kernel.row_begin}, {"truncated", kernel.truncated}};
  j["cells"] = nlohmann::json::array();
  for (const auto& c : kernel.cells)
    j["cells"].push_back({{"y", c.y_bin}, {"x", c.x_bins}, {"f", c.f}, {"f_se", c.f_se}, {"w", c.weight}});
  return j.dump();
}

OffspringKernel kernel_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  OffspringKernel k;
  k.t = j.at("t").get<double>();
  k.k = j.at("k").get<int>();
  k.bins = j.at("bins").get<std::size_t>();
  k.samples_per_cell = j.at("samples_per_cell").get<std::size_t>();
  k.seed = j.at("seed").get<std::uint64_t>();
  k.eps = j.at("eps").get<double>();
  k.m_hat = j.at("m_hat").get<std::vector<double>>();
  k.m_se = j.at("m_se").get<std::vector<double>>();
  k.row_begin = j.at("row_begin").get<std::vector<std::size_t>>();
  k.truncated = j.at("truncated").get<std::size_t>();
  for (const auto& c : j.at("cells")) {
    KernelCell cell;
    cell.y_bin = c.at("y").get<std::uint16_t>();
    cell.x_bins = c.at("x").get<std::vector<std::uint16_t>>();
    cell.f = c.at("f").get<double>();
    cell.f_se = c.at("f_se").get<double>();
    cell.weight = c.at("w").get<double>();
    k.cells.push_back(std::move(cell));
  }
  return k;
}

}  // namespace fdg
