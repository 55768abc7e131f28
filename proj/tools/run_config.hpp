#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kappa/domain.hpp"
#include "kappa/profiles.hpp"
#include "kappa/scalar_field.hpp"

namespace kappa::cli {

/// Everything a subcommand may read. Built from a JSON config file with
/// command-line flags applied on top; validated before any computation.
struct RunConfig {
  std::uint64_t seed = 42;
  std::optional<int> threads;
  std::string out;  // empty: tables to stdout
  std::string format = "json";
  std::optional<size_t> paths;
  std::optional<double> dt;
  std::optional<int> grid;
  double tolerance_scale = 1.0;

  nlohmann::json domain;  // object or preset name, null if absent
  nlohmann::json fields = nlohmann::json::object();  // f, k, ell, phi, psi, V
  std::optional<Point> x0, from, to;
  std::optional<double> t;
  std::optional<int> j;
  std::string bump = "cos2";

  nlohmann::json to_json() const;
};

/// JSON Schema (draft 2020-12) of the config file.
const nlohmann::json& config_schema();

/// Rejects unknown keys and wrong types; throws ConfigError.
RunConfig parse_config(const nlohmann::json& j);

Domain build_domain(const nlohmann::json& spec);
/// `domain` is needed by the signed_distance and convexification types.
ScalarField build_field(const nlohmann::json& spec, const std::optional<Domain>& domain);
Profile build_bump(const std::string& name);

/// "1,0.5" -> Point{1, 0.5}
Point parse_point(const std::string& text);

}  // namespace kappa::cli
