#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace fdg {

enum class Suite { fast, full };

struct CriterionResult {
  int id = 0;
  std::string name;
  double measured = 0.0;
  std::string band;
  bool pass = false;
  std::string detail;
};

struct VerifyOptions {
  Suite suite = Suite::fast;
  std::uint64_t seed = 20240611;
  std::size_t workers = 1;
  /// pi_k(t) implementation under test; defaults to compute_pi.
  std::function<double(double, int)> pi;
  /// Criteria to run (1..10); empty means all.
  std::vector<int> only;
  /// Called after each criterion.
  std::function<void(const CriterionResult&)> on_result;
};

struct VerifyReport {
  Suite suite = Suite::fast;
  std::uint64_t seed = 0;
  std::vector<CriterionResult> results;

  bool all_pass() const;
  std::string json() const;
};

VerifyReport verify(const VerifyOptions& opt);

/// "[PASS] 2 threshold analytics: measured=... band=... (detail)"
std::string format_result(const CriterionResult& r);

}  // namespace fdg
