#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "kappa/errors.hpp"
#include "kappa/scalar_field.hpp"
#include "kappa/semigroup.hpp"
#include "kappa/verify.hpp"

namespace kappa::detail {

/// Value-only field for potentials that are only ever sampled.
class PointwiseField final : public FieldImpl {
 public:
  PointwiseField(std::function<double(const Point&)> fn, std::string name)
      : fn_(std::move(fn)), name_(std::move(name)) {}
  double eval(const Point& x) const override { return fn_(x); }
  Vec grad(const Point&) const override { throw InvalidParameter(name_ + " has no gradient"); }
  double laplacian(const Point&) const override { throw InvalidParameter(name_ + " has no Laplacian"); }
  std::string describe() const override { return name_; }

 private:
  std::function<double(const Point&)> fn_;
  std::string name_;
};

inline ScalarField pointwise(std::function<double(const Point&)> fn, std::string name) {
  return ScalarField(std::make_shared<PointwiseField>(std::move(fn), std::move(name)));
}

/// Coarsest cell size of a grid (arc length for the angular direction).
double grid_spacing(const Grid& g);

/// Per-axis derivatives of a sampled function on an Interval or Box grid:
/// centred inside, one-sided at the edges.
std::vector<Vec> grid_gradient(const Grid& g, const GridFunction& u);

/// Node used for a probe: nearest node, or for radial grids the node at
/// the probe's radius.
size_t probe_node(const Grid& g, const Point& p);

std::string label_at(const Point& x);

/// MC-vs-PDE allowance.
double mc_allowance(const CheckOptions& o, double grid_h);

nlohmann::json mc_params(const McParams& mc);

}  // namespace kappa::detail
