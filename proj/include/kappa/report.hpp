#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace kappa {

enum class Verdict { Pass, Fail, Inconclusive };

std::string to_string(Verdict v);

/// Structured outcome of one verification check.
///
/// Each probe contributes lhs, rhs, a standard error and an allowance. With
/// slack = rhs - lhs the probe verdict is
///   PASS          slack >= -(allowance + 3 se)
///   INCONCLUSIVE  -(allowance + 6 se) <= slack < -(allowance + 3 se)
///   FAIL          otherwise
/// and the report verdict is the worst probe verdict. A poisoned report
/// (e.g. an exponential-moment cap was hit) is never better than
/// INCONCLUSIVE.
struct Report {
  std::string check;
  nlohmann::json params = nlohmann::json::object();
  std::vector<double> lhs, rhs, se, allowance;
  std::vector<std::string> labels;
  Verdict verdict = Verdict::Pass;
  double min_slack = 0.0;
  std::string clock_note;
  std::vector<std::string> warnings;
  nlohmann::json extra = nlohmann::json::object();
  bool poisoned = false;
  double runtime_s = 0.0;

  void add(double lhs_value, double rhs_value, double stderr_value = 0.0, double allowance_value = 0.0,
           std::string label = {});
  /// Recomputes min_slack and verdict from the probes.
  void finalize();
  bool passed() const { return verdict == Verdict::Pass; }

  std::vector<double> slack() const;
  nlohmann::json to_json(bool include_runtime = true) const;
};

Verdict probe_verdict(double slack, double se, double allowance);
Verdict worst(Verdict a, Verdict b);

}  // namespace kappa
