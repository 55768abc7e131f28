#include "kappa/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kappa {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

Verdict probe_verdict(double slack, double se, double allowance) {
  if (!std::isfinite(slack)) return Verdict::Inconclusive;
  if (slack >= -(allowance + 3.0 * se)) return Verdict::Pass;
  if (slack >= -(allowance + 6.0 * se)) return Verdict::Inconclusive;
  return Verdict::Fail;
}

Verdict worst(Verdict a, Verdict b) {
  if (a == Verdict::Fail || b == Verdict::Fail) return Verdict::Fail;
  if (a == Verdict::Inconclusive || b == Verdict::Inconclusive) return Verdict::Inconclusive;
  return Verdict::Pass;
}

void Report::add(double lhs_value, double rhs_value, double stderr_value, double allowance_value, std::string label) {
  lhs.push_back(lhs_value);
  rhs.push_back(rhs_value);
  se.push_back(stderr_value);
  allowance.push_back(allowance_value);
  labels.push_back(std::move(label));
}

std::vector<double> Report::slack() const {
  std::vector<double> s(lhs.size());
  for (size_t i = 0; i < lhs.size(); ++i) s[i] = rhs[i] - lhs[i];
  return s;
}

void Report::finalize() {
  verdict = Verdict::Pass;
  min_slack = std::numeric_limits<double>::infinity();
  const auto s = slack();
  for (size_t i = 0; i < s.size(); ++i) {
    min_slack = std::min(min_slack, s[i]);
    verdict = worst(verdict, probe_verdict(s[i], se[i], allowance[i]));
  }
  if (s.empty()) min_slack = 0.0;
  if (poisoned) verdict = worst(verdict, Verdict::Inconclusive);
}

namespace {

nlohmann::json numbers(const std::vector<double>& v) {
  nlohmann::json a = nlohmann::json::array();
  for (double x : v) {
    if (std::isfinite(x))
      a.push_back(x);
    else
      a.push_back(nullptr);
  }
  return a;
}

}  // namespace

nlohmann::json Report::to_json(bool include_runtime) const {
  nlohmann::json j;
  j["check"] = check;
  j["params"] = params;
  j["lhs"] = numbers(lhs);
  j["rhs"] = numbers(rhs);
  j["se"] = numbers(se);
  j["allowance"] = numbers(allowance);
  j["slack"] = numbers(slack());
  j["labels"] = labels;
  j["min_slack"] = std::isfinite(min_slack) ? nlohmann::json(min_slack) : nlohmann::json(nullptr);
  j["verdict"] = to_string(verdict);
  j["clock_note"] = clock_note;
  j["warnings"] = warnings;
  j["extra"] = extra;
  if (include_runtime) j["runtime_s"] = runtime_s;
  return j;
}

}  // namespace kappa
