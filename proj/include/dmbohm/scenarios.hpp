#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dmbohm/finite_dim.hpp"
#include "dmbohm/trajectories.hpp"

namespace dmbohm {

enum class Variant : std::uint8_t {
  RealDm,
  AssemblyRho1,
  AssemblyRho2,
  MeasuredPath,
  ProductState,
  CorrelatedPointer,
  Superposition,  // single-branch (phi_u + e^{i phase} phi_d)/sqrt2, the pure-state contrast
};

std::string_view to_string(Variant v);
/// Throws BadConfig for unknown names.
Variant parse_variant(std::string_view name);
const std::vector<Variant>& all_variants();
bool is_planar(Variant v);
bool is_assembly(Variant v);

/// Two packets converging on x = 0: phi_u at +x0 moving at -k, phi_d at -x0 moving at +k.
/// Planar variants add a pointer coordinate y.
struct ScenarioConfig {
  Variant variant = Variant::RealDm;

  // grid
  double x_lo = -128.0;
  double x_extent = 256.0;
  Index x_points = 2048;
  double y_lo = -48.0;
  double y_extent = 96.0;
  Index y_points = 256;

  // evolution
  double dt = 1e-3;
  double t_final = 12.0;
  std::int64_t record_stride = 100;
  double mass = 1.0;
  DerivativeScheme scheme = DerivativeScheme::Spectral;

  // geometry
  double x0 = 8.0;
  double sigma = 1.0;
  double k = 2.0;
  double pointer_sigma = 3.0;
  double pointer_separation = 30.0;
  double pointer_center = 0.0;
  double phase = 0.0;

  // ensemble
  std::size_t n = 2000;
  std::uint64_t seed = 1;
  int bins = 64;

  /// Defaults tuned per variant: 1D variants on a 2048-point line, planar ones on
  /// 256 atom points by 128 pointer points (256x256 for correlated-pointer).
  static ScenarioConfig defaults(Variant v);

  double t_meet() const { return x0 / k; }
  Grid grid() const;
  Grid atom_grid() const;
  /// Throws BadConfig when a field is out of range.
  void validate() const;

  bool operator==(const ScenarioConfig&) const = default;
};

/// A built scenario: the distinct initial states and, for assemblies, which
/// state each member carries.
struct Scenario {
  ScenarioConfig config;
  std::vector<DensityMatrixState> states;
  std::vector<std::size_t> member_state;  // empty unless an assembly
  ComplexField arm_u;                     // atom-axis arms used to locate region R
  ComplexField arm_d;
  finite::DensityOperator<double> nominal;  // label-level operator of the construction

  const Grid& grid() const { return states.front().grid(); }
};

Scenario build_interferometer(const ScenarioConfig& c);

struct EquivariancePoint {
  double time;
  double tv;
};

struct ScenarioResult {
  ScenarioConfig config;
  TrajectoryEnsemble ensemble;
  std::vector<std::size_t> member_state;
  double crossing_fraction = 0.0;
  Histogram screen;          // trajectory histogram on the atom axis at t_final
  Histogram screen_density;  // grid P at t_final on the same bins
  double visibility = 0.0;   // member-weighted mean for assemblies
  std::vector<EquivariancePoint> equivariance;
  double max_continuity_residual = 0.0;  // NaN when not monitored
  double max_edge_density = 0.0;
  std::size_t node_entries = 0;
  std::size_t out_of_domain = 0;
  finite::DensityOperator<double> nominal;

  bool boundary_leak() const { return max_edge_density >= 1e-8; }
  bool flagged() const { return node_entries + out_of_domain > 0 || boundary_leak(); }
};

struct ScenarioHooks {
  /// Replace sampling for single-state variants.
  std::vector<Point> starts;
  /// Continuity residual monitor; defaults to on for 1D grids only.
  std::optional<bool> continuity;
  SnapshotObserver observer;
};

ScenarioResult run_scenario(const Scenario& s, const ScenarioHooks& hooks = {});

/// Total-variation distance between two histograms with identical binning.
double compare_histograms(const Histogram& a, const Histogram& b);

/// Multiply branch `index` by e^{i theta}.
DensityMatrixState phase_shift_branch(const DensityMatrixState& s, std::size_t index, double theta);

/// (phi_u + e^{i theta} phi_d), normalized, as a pure state.
DensityMatrixState superposition_state(const ComplexField& phi_u, const ComplexField& phi_d, double theta);

/// Marginal of a planar density along the atom axis; 1D input is returned unchanged.
RealField atom_marginal(const RealField& p);

struct RegionR {
  double lo;
  double hi;
};

/// Overlap window where P_u P_d >= half its peak.
RegionR overlap_region(const ComplexField& arm_u, const ComplexField& arm_d);

/// (max - min)/(max + min) of the atom-axis density over the central half of R.
double fringe_visibility(const RealField& atom_density, const RegionR& r);

}  // namespace dmbohm
