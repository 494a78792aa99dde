#pragma once

#include <cstdint>
#include <vector>

#include "dmbohm/fields.hpp"

namespace dmbohm {

/// Static external potential V(x); finite everywhere.
class PotentialField {
 public:
  explicit PotentialField(RealField values);

  static PotentialField zero(const Grid& grid);
  /// Isotropic trap V = m omega^2 |x|^2 / 2 about the origin.
  static PotentialField harmonic(const Grid& grid, double omega, double mass = 1.0);

  const Grid& grid() const { return values_.grid(); }
  const RealField& values() const { return values_; }
  bool is_zero() const { return zero_; }

 private:
  RealField values_;
  bool zero_ = false;
};

/// One term w_a |phi_a><phi_a| of the diagonal decomposition.
struct Branch {
  double weight;
  ComplexField field;
};

/// rho = sum_a w_a |phi_a><phi_a| sampled on a grid.
///
/// The weights are properties of the individual state. Construction checks
/// that they sum to 1 (1e-12), that every branch is normalized (1e-10) and
/// that branches are mutually orthogonal (1e-8); BadState otherwise.
class DensityMatrixState {
 public:
  explicit DensityMatrixState(std::vector<Branch> branches, double time = 0.0);

  static DensityMatrixState pure(ComplexField field, double time = 0.0);

  const std::vector<Branch>& branches() const { return branches_; }
  const Branch& branch(std::size_t a) const { return branches_.at(a); }
  std::size_t size() const { return branches_.size(); }
  const Grid& grid() const { return branches_.front().field.grid(); }
  double time() const { return time_; }

  /// Largest |<phi_a|phi_b>| over distinct pairs.
  double max_branch_overlap() const;
  /// Largest |norm - 1| over branches.
  double max_norm_error() const;

  /// Re-run the construction checks; used after propagation.
  void validate() const;

  /// Same weights, new branch fields and time. Checks are left to validate().
  DensityMatrixState evolved(std::vector<ComplexField> fields, double time) const;

 private:
  struct Unchecked {};
  DensityMatrixState(Unchecked, std::vector<Branch> branches, double time)
      : branches_(std::move(branches)), time_(time) {}

  std::vector<Branch> branches_;
  double time_ = 0.0;
};

/// Strang split-step Fourier propagator: V/2, kinetic, V/2.
class SplitStepPropagator {
 public:
  SplitStepPropagator(const PotentialField& potential, double dt, double mass = 1.0);

  void step(ComplexField& f) const;

  double dt() const { return dt_; }
  double mass() const { return mass_; }
  /// dt k_max^2 / (2m) < pi, beyond which the kinetic phase aliases per step.
  bool within_stability_hint() const { return stable_; }

 private:
  Grid grid_;
  double dt_;
  double mass_;
  bool free_;
  bool stable_;
  Eigen::ArrayXcd half_potential_;
  Eigen::ArrayXcd kinetic_;
};

ComplexField step_branch(const ComplexField& f, const PotentialField& potential, double dt, double mass = 1.0);

/// Streaming propagation of every branch with a shared propagator.
class DensityEvolver {
 public:
  DensityEvolver(DensityMatrixState initial, const PotentialField& potential, double dt, double mass = 1.0);

  const DensityMatrixState& state() const { return state_; }
  std::int64_t steps_taken() const { return steps_; }
  const SplitStepPropagator& propagator() const { return propagator_; }

  void advance();

 private:
  DensityMatrixState state_;
  SplitStepPropagator propagator_;
  double t0_;
  std::int64_t steps_ = 0;
};

/// Snapshots of the evolved state: the initial state, then every `stride` steps.
std::vector<DensityMatrixState> evolve_density(const DensityMatrixState& initial, const PotentialField& potential,
                                               double dt, std::int64_t steps, std::int64_t stride = 1,
                                               double mass = 1.0);

/// <H> for one branch, kinetic part evaluated spectrally.
double branch_energy(const ComplexField& f, const PotentialField& potential, double mass = 1.0);

}  // namespace dmbohm
