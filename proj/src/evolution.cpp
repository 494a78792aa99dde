#include "dmbohm/evolution.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace dmbohm {

namespace {

constexpr double kWeightTolerance = 1e-12;
constexpr double kNormTolerance = 1e-10;
constexpr double kOrthogonalityTolerance = 1e-8;

}  // namespace

PotentialField::PotentialField(RealField values) : values_(std::move(values)) {
  if (!values_.values().allFinite()) throw Error(ErrorCode::BadParam, "potential must be finite everywhere");
  zero_ = (values_.values() == 0.0).all();
}

PotentialField PotentialField::zero(const Grid& grid) { return PotentialField(RealField(grid)); }

PotentialField PotentialField::harmonic(const Grid& grid, double omega, double mass) {
  RealField v(grid);
  for (Index i = 0; i < grid.size(); ++i) v[i] = 0.5 * mass * omega * omega * grid.node(i).squaredNorm();
  return PotentialField(std::move(v));
}

DensityMatrixState::DensityMatrixState(std::vector<Branch> branches, double time)
    : branches_(std::move(branches)), time_(time) {
  if (branches_.empty()) throw Error(ErrorCode::BadState, "state needs at least one branch");
  double total = 0.0;
  for (const Branch& b : branches_) {
    if (!(b.weight > 0.0 && b.weight <= 1.0)) throw Error(ErrorCode::BadState, "branch weight outside (0,1]");
    require_same_grid(b.field.grid(), branches_.front().field.grid());
    total += b.weight;
  }
  if (std::abs(total - 1.0) > kWeightTolerance) throw Error(ErrorCode::BadState, "branch weights do not sum to 1");
  validate();
}

DensityMatrixState DensityMatrixState::pure(ComplexField field, double time) {
  std::vector<Branch> b;
  b.push_back({1.0, std::move(field)});
  return DensityMatrixState(std::move(b), time);
}

double DensityMatrixState::max_branch_overlap() const {
  double worst = 0.0;
  for (std::size_t a = 0; a < branches_.size(); ++a) {
    for (std::size_t b = a + 1; b < branches_.size(); ++b) {
      worst = std::max(worst, std::abs(overlap(branches_[a].field, branches_[b].field)));
    }
  }
  return worst;
}

double DensityMatrixState::max_norm_error() const {
  double worst = 0.0;
  for (const Branch& b : branches_) worst = std::max(worst, std::abs(norm_squared(b.field) - 1.0));
  return worst;
}

void DensityMatrixState::validate() const {
  if (const double e = max_norm_error(); e > kNormTolerance) {
    throw Error(ErrorCode::BadState, "branch not normalized (error " + std::to_string(e) + ")");
  }
  if (const double o = max_branch_overlap(); o > kOrthogonalityTolerance) {
    throw Error(ErrorCode::BadState, "branches not orthogonal (overlap " + std::to_string(o) + ")");
  }
}

DensityMatrixState DensityMatrixState::evolved(std::vector<ComplexField> fields, double time) const {
  if (fields.size() != branches_.size()) throw Error(ErrorCode::BadState, "branch count changed");
  std::vector<Branch> next;
  next.reserve(fields.size());
  for (std::size_t a = 0; a < fields.size(); ++a) next.push_back({branches_[a].weight, std::move(fields[a])});
  return DensityMatrixState(Unchecked{}, std::move(next), time);
}

SplitStepPropagator::SplitStepPropagator(const PotentialField& potential, double dt, double mass)
    : grid_(potential.grid()), dt_(dt), mass_(mass), free_(potential.is_zero()) {
  if (!(dt > 0.0)) throw Error(ErrorCode::BadParam, "time step must be positive");
  if (!(mass > 0.0)) throw Error(ErrorCode::BadParam, "mass must be positive");
  const SpectralPlan& plan = spectral_plan(grid_);
  const Eigen::ArrayXd& k2 = plan.wavenumber_squared();
  kinetic_.resize(k2.size());
  for (Index i = 0; i < k2.size(); ++i) kinetic_[i] = std::polar(1.0, -k2[i] * dt / (2.0 * mass));
  stable_ = k2.maxCoeff() * dt / (2.0 * mass) < std::numbers::pi;
  if (!free_) {
    const RealField& v = potential.values();
    half_potential_.resize(v.size());
    for (Index i = 0; i < v.size(); ++i) half_potential_[i] = std::polar(1.0, -v[i] * dt / 2.0);
  }
}

void SplitStepPropagator::step(ComplexField& f) const {
  require_same_grid(f.grid(), grid_);
  const SpectralPlan& plan = spectral_plan(grid_);
  if (!free_) f.values() *= half_potential_;
  Eigen::ArrayXcd spectrum;
  plan.forward(f.values(), spectrum);
  spectrum *= kinetic_;
  plan.inverse(spectrum, f.values());
  if (!free_) f.values() *= half_potential_;
}

ComplexField step_branch(const ComplexField& f, const PotentialField& potential, double dt, double mass) {
  ComplexField out = f;
  SplitStepPropagator(potential, dt, mass).step(out);
  return out;
}

DensityEvolver::DensityEvolver(DensityMatrixState initial, const PotentialField& potential, double dt, double mass)
    : state_(std::move(initial)), propagator_(potential, dt, mass), t0_(state_.time()) {
  require_same_grid(state_.grid(), potential.grid());
}

void DensityEvolver::advance() {
  std::vector<ComplexField> fields;
  fields.reserve(state_.size());
  for (const Branch& b : state_.branches()) {
    fields.push_back(b.field);
    propagator_.step(fields.back());
  }
  ++steps_;
  state_ = state_.evolved(std::move(fields), t0_ + static_cast<double>(steps_) * propagator_.dt());
}

std::vector<DensityMatrixState> evolve_density(const DensityMatrixState& initial, const PotentialField& potential,
                                               double dt, std::int64_t steps, std::int64_t stride, double mass) {
  if (steps < 0 || stride < 1) throw Error(ErrorCode::BadParam, "steps must be >= 0 and stride >= 1");
  DensityEvolver evolver(initial, potential, dt, mass);
  std::vector<DensityMatrixState> out{evolver.state()};
  for (std::int64_t n = 1; n <= steps; ++n) {
    evolver.advance();
    if (n % stride == 0) {
      evolver.state().validate();
      out.push_back(evolver.state());
    }
  }
  return out;
}

double branch_energy(const ComplexField& f, const PotentialField& potential, double mass) {
  require_same_grid(f.grid(), potential.grid());
  const SpectralPlan& plan = spectral_plan(f.grid());
  Eigen::ArrayXcd spectrum;
  plan.forward(f.values(), spectrum);
  const double n = static_cast<double>(f.size());
  const double dv = f.grid().cell_volume();
  const double kinetic = (spectrum.abs2() * plan.wavenumber_squared()).sum() / (2.0 * mass * n) * dv;
  const double pot = (f.values().abs2() * potential.values().values()).sum() * dv;
  return kinetic + pot;
}

}  // namespace dmbohm
