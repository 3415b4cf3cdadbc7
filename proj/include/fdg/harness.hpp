#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fdg/graph.hpp"
#include "fdg/kernel.hpp"

namespace fdg {

enum class Experiment {
  no_giant_k3,
  threshold_scan,
  giant_k5,
  local_limit_tv,
  equivalence,
  kernel_build,
  extinction,
  simulate,
  survival,
};

const char* to_string(Experiment e) noexcept;
Experiment parse_experiment(const std::string& name);

struct ExperimentConfig {
  Experiment experiment = Experiment::simulate;
  std::size_t n = 1000;
  ForbiddenDegree k = ForbiddenDegree::finite(5);
  std::vector<double> t_grid{2.0};
  std::size_t replicas = 10;
  std::uint64_t seed = 1;
  std::size_t d_max = 60;
  std::size_t gen_cap = 50;
  std::size_t size_cap = 10'000;
  std::size_t bins = 32;
  std::size_t samples_per_cell = 400;
  std::size_t workers = 1;
  std::string output;
  std::string format = "csv";

  /// Canonical "key = value" text, one key per line.
  std::string to_text() const;
  static ExperimentConfig from_text(const std::string& text);
  std::string to_json() const;
  static ExperimentConfig from_json(const std::string& text);

  /// Hash of the canonical text, excluding output location and worker count.
  std::string hash() const;
};

/// Parses "a:b:steps" into steps evenly spaced points from a to b, or a
/// comma-separated list.
std::vector<double> parse_t_grid(const std::string& spec);

struct ColumnSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double se = 0.0;
  double q05 = 0.0;
  double median = 0.0;
  double q95 = 0.0;
};

struct RunRecord {
  std::string config_hash;
  ExperimentConfig config;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::map<std::string, double> extras;  // experiment-level results
  std::string kernel_json;                 // kernel-build: serialised kernel
  double wall_seconds = 0.0;

  std::map<std::string, ColumnSummary> summary() const;
  std::string csv() const;
  std::string json() const;
  std::string one_line() const;
};

/// Error carrying the replica index of a failed module call.
struct ReplicaError : std::runtime_error {
  ReplicaError(std::size_t replica, const std::string& what)
      : std::runtime_error("replica " + std::to_string(replica) + ": " + what), replica(replica) {}
  std::size_t replica;
};

/// Runs the configured experiment. Throws std::invalid_argument for an
/// inconsistent configuration.
RunRecord run(const ExperimentConfig& config);

/// Writes `content` to `path` through a temporary file and a rename. Throws
/// std::runtime_error with the path on failure, and refuses to replace a
/// file whose embedded config hash differs from `config_hash` (unless
/// config_hash is empty).
void write_atomic(const std::filesystem::path& path, const std::string& content,
                  const std::string& config_hash);

/// Writes the record in its configured format to config.output.
void write_record(const RunRecord& record);

std::string kernel_to_json(const OffspringKernel& kernel);
OffspringKernel kernel_from_json(const std::string& text);

}  // namespace fdg
