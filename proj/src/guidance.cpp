#include "dmbohm/guidance.hpp"

#include <cmath>

namespace dmbohm {

RealField total_density(const DensityMatrixState& state) {
  RealField p(state.grid());
  for (const Branch& b : state.branches()) p.values() += b.weight * b.field.values().abs2();
  return p;
}

VectorField total_current(const DensityMatrixState& state, DerivativeScheme scheme) {
  VectorField j(state.grid());
  for (const Branch& b : state.branches()) j.values() += b.weight * branch_current(b.field, scheme).values();
  return j;
}

GuidanceField make_guidance(const DensityMatrixState& state, const GuidanceOptions& options) {
  GuidanceField g{total_density(state), total_current(state, options.scheme), state.time(), 0.0, options.mass, {}};
  g.epsilon = options.epsilon_relative * g.density.values().maxCoeff();
  if (options.keep_branch_densities) {
    for (const Branch& b : state.branches()) {
      g.branch_densities.emplace_back(state.grid(), b.weight * b.field.values().abs2());
    }
  }
  return g;
}

MaskedVectorField velocity_field(const GuidanceField& g) {
  MaskedVectorField v{VectorField(g.grid()), g.density.values() > g.epsilon};
  for (int d = 0; d < g.grid().dims(); ++d) {
    v.values.component(d) =
        v.defined.select(g.current.component(d) / (g.mass * g.density.values()), Eigen::ArrayXd::Zero(g.density.size()));
  }
  return v;
}

MaskedVectorField velocity_field(const DensityMatrixState& state, const GuidanceOptions& options) {
  return velocity_field(make_guidance(state, options));
}

MaskedVectorField mean_velocity_field(const DensityMatrixState& state, const GuidanceOptions& options) {
  const Grid& grid = state.grid();
  MaskedVectorField v{VectorField(grid), Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(grid.size(), true)};
  for (const Branch& b : state.branches()) {
    const Eigen::ArrayXd rho = b.field.values().abs2();
    const Eigen::Array<bool, Eigen::Dynamic, 1> ok = rho > options.epsilon_relative * rho.maxCoeff();
    v.defined = v.defined && ok;
    const VectorField j = branch_current(b.field, options.scheme);
    for (int d = 0; d < grid.dims(); ++d) {
      v.values.component(d) += ok.select(b.weight * j.component(d) / (options.mass * rho), 0.0);
    }
  }
  for (int d = 0; d < grid.dims(); ++d) {
    v.values.component(d) = v.defined.select(v.values.component(d), Eigen::ArrayXd::Zero(grid.size()));
  }
  return v;
}

SubsystemCurrents subsystem_currents(const DensityMatrixState& state, DerivativeScheme scheme) {
  if (state.grid().dims() != 2) throw Error(ErrorCode::DimMismatch, "subsystem currents need a two-axis grid");
  const VectorField j = total_current(state, scheme);
  SubsystemCurrents out{VectorField(state.grid()), VectorField(state.grid())};
  out.first.component(0) = j.component(0);
  out.second.component(1) = j.component(1);
  return out;
}

MaskedRealField quantum_potential(const ComplexField& f, const GuidanceOptions& options) {
  const Grid& grid = f.grid();
  const Eigen::ArrayXd rho = f.values().abs2();
  const RealField amplitude(grid, f.values().abs());
  const RealField lap = laplacian(amplitude, options.scheme);
  MaskedRealField q{RealField(grid), rho > options.epsilon_relative * rho.maxCoeff()};
  q.values.values() =
      q.defined.select(-lap.values() / (2.0 * options.mass * amplitude.values()), Eigen::ArrayXd::Zero(grid.size()));
  return q;
}

double continuity_residual(const GuidanceField& before, const GuidanceField& now, const GuidanceField& after,
                           DerivativeScheme scheme) {
  require_same_grid(before.grid(), now.grid());
  require_same_grid(after.grid(), now.grid());
  const double h = 0.5 * (after.time - before.time);
  if (!(h > 0.0)) throw Error(ErrorCode::BadTime, "snapshots must be in increasing time order");
  const Eigen::ArrayXd div = divergence(now.current, scheme).values();
  const Eigen::ArrayXd dpdt = (after.density.values() - before.density.values()) / (2.0 * h);
  const double scale = std::sqrt(div.square().sum());
  if (!(scale > 0.0)) return std::sqrt(dpdt.square().sum());
  return std::sqrt((dpdt + div).square().sum()) / scale;
}

}  // namespace dmbohm
