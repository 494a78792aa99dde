#pragma once

#include <vector>

#include "dmbohm/evolution.hpp"

namespace dmbohm {

struct GuidanceOptions {
  DerivativeScheme scheme = DerivativeScheme::Spectral;
  double mass = 1.0;
  /// Density floor relative to the peak of P; velocity is undefined at or below it.
  double epsilon_relative = 1e-12;
  /// Keep w_a R_a^2 per branch, used to label which branch dominates a trajectory.
  bool keep_branch_densities = false;
};

/// Snapshot of the total density P and current J that guide trajectories.
struct GuidanceField {
  RealField density;
  VectorField current;
  double time = 0.0;
  double epsilon = 0.0;  // absolute floor
  double mass = 1.0;
  std::vector<RealField> branch_densities;

  const Grid& grid() const { return density.grid(); }
  bool defined(Index flat) const { return density[flat] > epsilon; }
};

/// P(x) = sum_a w_a R_a(x)^2.
RealField total_density(const DensityMatrixState& state);

/// J(x) = sum_a w_a R_a^2 grad S_a, evaluated as sum_a w_a Im(conj(phi_a) grad phi_a).
/// There are no cross terms between branches.
VectorField total_current(const DensityMatrixState& state, DerivativeScheme scheme = DerivativeScheme::Spectral);

GuidanceField make_guidance(const DensityMatrixState& state, const GuidanceOptions& options = {});

/// v = J / (m P) where P > epsilon; masked elsewhere.
MaskedVectorField velocity_field(const GuidanceField& guidance);
MaskedVectorField velocity_field(const DensityMatrixState& state, const GuidanceOptions& options = {});

/// sum_a w_a grad S_a, the ensemble-average velocity. Masked wherever any
/// branch density is at or below its own floor.
MaskedVectorField mean_velocity_field(const DensityMatrixState& state, const GuidanceOptions& options = {});

/// Split of J on a two-axis grid into the parts along each subsystem axis.
/// Each result is a full two-component field, so first + second == J exactly.
struct SubsystemCurrents {
  VectorField first;
  VectorField second;
};
SubsystemCurrents subsystem_currents(const DensityMatrixState& state,
                                     DerivativeScheme scheme = DerivativeScheme::Spectral);

/// Q = -lap(R) / (2 m R), masked where |psi|^2 is at or below the floor.
MaskedRealField quantum_potential(const ComplexField& f, const GuidanceOptions& options = {});

/// ||(P(t+h) - P(t-h)) / 2h + div J(t)||_2 / ||div J(t)||_2.
double continuity_residual(const GuidanceField& before, const GuidanceField& now, const GuidanceField& after,
                           DerivativeScheme scheme = DerivativeScheme::Spectral);

}  // namespace dmbohm
