#include "dmbohm/scenarios.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

namespace dmbohm {

namespace {

using finite::DensityOperator;
using VecC = finite::VectorC<double>;

VecC label(Index dim, Index i) { return finite::basis<double>(dim, i); }

VecC label_superposition(double theta) {
  VecC v(2);
  v << Complex(1.0 / std::numbers::sqrt2), unit_phase(theta) / std::numbers::sqrt2;
  return v;
}

DensityOperator<double> equal_mixture(const VecC& a, const VecC& b) {
  return finite::ensemble_to_density<double>({{0.5, a}, {0.5, b}});
}

DensityOperator<double> nominal_operator(const ScenarioConfig& c) {
  switch (c.variant) {
    case Variant::RealDm:
    case Variant::AssemblyRho1:
      return equal_mixture(label(2, 0), label(2, 1));
    case Variant::AssemblyRho2:
      return equal_mixture(label_superposition(c.phase), label_superposition(c.phase + std::numbers::pi));
    case Variant::Superposition:
      return finite::pure_state<double>(label_superposition(c.phase));
    case Variant::MeasuredPath:
    case Variant::CorrelatedPointer:
      return equal_mixture(finite::kron<double>(label(2, 0), label(2, 1)),
                           finite::kron<double>(label(2, 1), label(2, 0)));
    case Variant::ProductState: {
      const auto half = equal_mixture(label(2, 0), label(2, 1));
      return finite::tensor<double>(half, half);
    }
  }
  throw Error(ErrorCode::BadConfig, "unknown variant");
}

ComplexField pointer(const ScenarioConfig& c, double center) {
  const Grid y = Grid::line(c.y_lo, c.y_lo + c.y_extent, c.y_points);
  return gaussian_packet(y, make_point(center), c.pointer_sigma, make_point(0.0));
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::BadConfig, what);
}

struct Monitor {
  const ScenarioConfig& c;
  std::array<double, 3> times;
  std::array<std::optional<Histogram>, 3> density;
  std::optional<double> visibility;
  RegionR region;
  bool continuity;
  std::vector<GuidanceField> window;
  double max_residual = 0.0;
  double max_edge = 0.0;

  void operator()(const DensityMatrixState&, const GuidanceField& g) {
    const double x_hi = c.x_lo + c.x_extent;
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (!density[i] && std::abs(g.time - times[i]) < 1e-9) {
        density[i] = density_histogram(g.density, c.bins, c.x_lo, x_hi, 0);
      }
    }
    if (!visibility && std::abs(g.time - c.t_meet()) < 1e-9) {
      visibility = fringe_visibility(atom_marginal(g.density), region);
    }
    max_edge = std::max(max_edge, edge_density_ratio(g.density));
    if (continuity) {
      window.push_back(GuidanceField{g.density, g.current, g.time, g.epsilon, g.mass, {}});
      if (window.size() == 3) {
        max_residual = std::max(max_residual, continuity_residual(window[0], window[1], window[2], c.scheme));
        window.erase(window.begin());
      }
    }
  }
};

}  // namespace

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::RealDm: return "real-dm";
    case Variant::AssemblyRho1: return "assembly-rho1";
    case Variant::AssemblyRho2: return "assembly-rho2";
    case Variant::MeasuredPath: return "measured-path";
    case Variant::ProductState: return "product-state";
    case Variant::CorrelatedPointer: return "correlated-pointer";
    case Variant::Superposition: return "superposition";
  }
  return "unknown";
}

const std::vector<Variant>& all_variants() {
  static const std::vector<Variant> v{Variant::RealDm,       Variant::AssemblyRho1, Variant::AssemblyRho2,
                                      Variant::MeasuredPath, Variant::ProductState, Variant::CorrelatedPointer,
                                      Variant::Superposition};
  return v;
}

Variant parse_variant(std::string_view name) {
  for (Variant v : all_variants()) {
    if (to_string(v) == name) return v;
  }
  throw Error(ErrorCode::BadConfig, "unknown scenario variant '" + std::string(name) + "'");
}

bool is_planar(Variant v) {
  return v == Variant::MeasuredPath || v == Variant::ProductState || v == Variant::CorrelatedPointer;
}

bool is_assembly(Variant v) { return v == Variant::AssemblyRho1 || v == Variant::AssemblyRho2; }

ScenarioConfig ScenarioConfig::defaults(Variant v) {
  ScenarioConfig c;
  c.variant = v;
  if (!is_planar(v)) return c;
  c.x_lo = -64.0;
  c.x_extent = 128.0;
  c.x_points = 256;
  c.dt = 5e-3;
  c.record_stride = 20;
  switch (v) {
    case Variant::MeasuredPath:
      c.pointer_separation = 10.0 * c.pointer_sigma;
      c.y_points = 128;
      break;
    case Variant::CorrelatedPointer:
      c.pointer_separation = 12.0 * c.pointer_sigma;
      c.t_final = 6.0;
      c.n = 1000;
      break;
    case Variant::ProductState:
      c.pointer_separation = 40.0;
      c.y_points = 128;
      break;
    default:
      break;
  }
  return c;
}

Grid ScenarioConfig::atom_grid() const { return Grid::line(x_lo, x_lo + x_extent, x_points); }

Grid ScenarioConfig::grid() const {
  if (!is_planar(variant)) return atom_grid();
  return Grid::plane(Axis{x_lo, x_extent, x_points}, Axis{y_lo, y_extent, y_points});
}

void ScenarioConfig::validate() const {
  require(x_extent > 0.0 && y_extent > 0.0, "grid extents must be positive");
  require(x_points >= 8 && y_points >= 8, "grids need at least 8 points per axis");
  require(dt > 0.0, "dt must be positive");
  require(mass > 0.0, "mass must be positive");
  require(sigma > 0.0 && pointer_sigma > 0.0, "packet widths must be positive");
  require(x0 > 0.0 && k > 0.0, "x0 and k must be positive so the packets converge");
  require(t_final > t_meet(), "t_final must lie beyond the meeting time x0/k");
  require(record_stride >= 1, "record_stride must be >= 1");
  require(pointer_separation >= 0.0, "pointer_separation must be non-negative");
  require(n >= 1, "n must be >= 1");
  require(bins >= 1, "bins must be >= 1");
  const auto on_step = [this](double t) {
    const double steps = std::round(t / dt);
    return std::abs(steps * dt - t) <= 1e-9 * std::max(1.0, t);
  };
  require(on_step(t_meet()) && on_step(t_final), "t_meet and t_final must be multiples of dt");
}

Scenario build_interferometer(const ScenarioConfig& c) {
  c.validate();
  const Grid atoms = c.atom_grid();
  Scenario s{c,
             {},
             {},
             gaussian_packet(atoms, make_point(c.x0), c.sigma, make_point(-c.k)),
             gaussian_packet(atoms, make_point(-c.x0), c.sigma, make_point(c.k)),
             nominal_operator(c)};
  const ComplexField& u = s.arm_u;
  const ComplexField& d = s.arm_d;
  const double half_sep = 0.5 * c.pointer_separation;

  switch (c.variant) {
    case Variant::RealDm:
      s.states.push_back(phase_shift_branch(DensityMatrixState({{0.5, u}, {0.5, d}}), 1, c.phase));
      break;
    case Variant::Superposition:
      s.states.push_back(superposition_state(u, d, c.phase));
      break;
    case Variant::AssemblyRho1:
    case Variant::AssemblyRho2: {
      if (c.variant == Variant::AssemblyRho1) {
        s.states.push_back(DensityMatrixState::pure(u));
        s.states.push_back(DensityMatrixState::pure(d));
      } else {
        s.states.push_back(superposition_state(u, d, c.phase));
        s.states.push_back(superposition_state(u, d, c.phase + std::numbers::pi));
      }
      Rng rng(c.seed);
      s.member_state.resize(c.n);
      for (auto& m : s.member_state) m = uniform01(rng) < 0.5 ? 0 : 1;
      break;
    }
    case Variant::MeasuredPath:
    case Variant::CorrelatedPointer: {
      const ComplexField xi1 = pointer(c, c.pointer_center + half_sep);
      const ComplexField xi0 = pointer(c, c.pointer_center - half_sep);
      DensityMatrixState joint({{0.5, tensor_product(u, xi1)}, {0.5, tensor_product(d, xi0)}});
      s.states.push_back(phase_shift_branch(joint, 1, c.phase));
      break;
    }
    case Variant::ProductState: {
      const ComplexField a = pointer(c, c.pointer_center + half_sep);
      const ComplexField b = pointer(c, c.pointer_center - half_sep);
      DensityMatrixState joint({{0.25, tensor_product(u, a)},
                                {0.25, tensor_product(u, b)},
                                {0.25, tensor_product(d, a)},
                                {0.25, tensor_product(d, b)}});
      s.states.push_back(phase_shift_branch(joint, 1, c.phase));
      break;
    }
  }
  return s;
}

ScenarioResult run_scenario(const Scenario& s, const ScenarioHooks& hooks) {
  const ScenarioConfig& c = s.config;
  const double x_hi = c.x_lo + c.x_extent;

  RegionR region{};
  {
    SplitStepPropagator meet(PotentialField::zero(s.arm_u.grid()), c.t_meet(), c.mass);
    ComplexField u = s.arm_u;
    ComplexField d = s.arm_d;
    meet.step(u);
    meet.step(d);
    region = overlap_region(u, d);
  }

  RunOptions options;
  options.dt = c.dt;
  options.t_final = c.t_final;
  options.record_stride = c.record_stride;
  options.record_times = {c.t_meet()};
  options.guidance = GuidanceOptions{c.scheme, c.mass, 1e-12, true};

  std::vector<std::size_t> counts(s.states.size(), 0);
  if (s.member_state.empty()) {
    counts[0] = c.n;
  } else {
    for (std::size_t m : s.member_state) ++counts[m];
  }

  ScenarioResult result{c, {}, s.member_state, 0.0, {}, {}, 0.0, {}, 0.0, 0.0, 0, 0, s.nominal};
  const std::array<double, 3> times{0.0, c.t_meet(), c.t_final};
  std::array<Eigen::ArrayXd, 3> expected;
  for (auto& e : expected) e = Eigen::ArrayXd::Zero(c.bins);
  std::vector<TrajectoryEnsemble> groups(s.states.size());
  const double total = static_cast<double>(c.n);
  const bool continuity = hooks.continuity.value_or(s.grid().dims() == 1);
  if (!continuity) result.max_continuity_residual = std::numeric_limits<double>::quiet_NaN();

  for (std::size_t j = 0; j < s.states.size(); ++j) {
    if (counts[j] == 0) continue;
    const DensityMatrixState& state = s.states[j];
    std::vector<Point> starts;
    if (s.member_state.empty() && !hooks.starts.empty()) {
      starts = hooks.starts;
    } else if (s.member_state.empty()) {
      starts = sample_initial(total_density(state), counts[j], c.seed);
    } else {
      std::seed_seq seq{c.seed, static_cast<std::uint64_t>(j) + 1};
      Rng rng(seq);
      starts = sample_initial(total_density(state), counts[j], rng);
    }
    Monitor monitor{c, times, {}, std::nullopt, region, continuity, {}, 0.0, 0.0};
    SnapshotObserver observer = [&](const DensityMatrixState& st, const GuidanceField& g) {
      monitor(st, g);
      if (hooks.observer) hooks.observer(st, g);
    };
    groups[j] = run_trajectories(state, PotentialField::zero(state.grid()), std::move(starts), options, observer);

    const double share = static_cast<double>(counts[j]) / total;
    for (std::size_t i = 0; i < times.size(); ++i) expected[i] += share * monitor.density[i]->mass;
    result.visibility += share * monitor.visibility.value_or(0.0);
    result.max_continuity_residual = std::max(result.max_continuity_residual, monitor.max_residual);
    result.max_edge_density = std::max(result.max_edge_density, monitor.max_edge);
  }

  if (s.member_state.empty()) {
    result.ensemble = std::move(groups[0]);
  } else {
    std::vector<std::size_t> cursor(groups.size(), 0);
    for (const auto& g : groups) {
      if (!g.times.empty()) result.ensemble.times = g.times;
    }
    result.ensemble.trajectories.reserve(c.n);
    for (std::size_t m = 0; m < s.member_state.size(); ++m) {
      const std::size_t j = s.member_state[m];
      Trajectory t = std::move(groups[j].trajectories[cursor[j]++]);
      t.id = m;
      result.ensemble.trajectories.push_back(std::move(t));
    }
  }
  result.ensemble.seed = c.seed;
  result.ensemble.scenario = std::string(to_string(c.variant));

  for (const Trajectory& t : result.ensemble.trajectories) {
    if (t.status == TrajectoryStatus::NodeEntry) ++result.node_entries;
    if (t.status == TrajectoryStatus::OutOfDomain) ++result.out_of_domain;
  }
  if (result.node_entries + result.out_of_domain < result.ensemble.trajectories.size()) {
    result.crossing_fraction = crossing_fraction(result.ensemble, 0, 0.0);
    for (std::size_t i = 0; i < times.size(); ++i) {
      const Histogram sampled = position_histogram(result.ensemble, times[i], c.bins, c.x_lo, x_hi, 0);
      const Histogram grid{c.x_lo, x_hi, expected[i], 0, 0};
      result.equivariance.push_back({times[i], total_variation(sampled, grid)});
    }
    result.screen = position_histogram(result.ensemble, c.t_final, c.bins, c.x_lo, x_hi, 0);
  }
  result.screen_density = Histogram{c.x_lo, x_hi, expected[2], 0, 0};
  return result;
}

double compare_histograms(const Histogram& a, const Histogram& b) { return total_variation(a, b); }

DensityMatrixState phase_shift_branch(const DensityMatrixState& s, std::size_t index, double theta) {
  if (index >= s.size()) {
    throw Error(ErrorCode::BadIndex, "branch index " + std::to_string(index) + " out of range");
  }
  std::vector<Branch> branches = s.branches();
  branches[index].field.values() *= unit_phase(theta);
  return DensityMatrixState(std::move(branches), s.time());
}

DensityMatrixState superposition_state(const ComplexField& phi_u, const ComplexField& phi_d, double theta) {
  require_same_grid(phi_u.grid(), phi_d.grid());
  ComplexField sum(phi_u.grid(), phi_u.values() + unit_phase(theta) * phi_d.values());
  return DensityMatrixState::pure(normalized(sum));
}

RealField atom_marginal(const RealField& p) {
  const Grid& grid = p.grid();
  if (grid.dims() == 1) return p;
  const Axis& a = grid.axis(0);
  RealField out(Grid::line(a.lo, a.hi(), a.points));
  const double dy = grid.axis(1).spacing();
  for (Index f = 0; f < grid.size(); ++f) out[grid.index(f, 0)] += p[f] * dy;
  return out;
}

RegionR overlap_region(const ComplexField& arm_u, const ComplexField& arm_d) {
  require_same_grid(arm_u.grid(), arm_d.grid());
  const Grid& grid = arm_u.grid();
  if (grid.dims() != 1) throw Error(ErrorCode::DimMismatch, "region R lives on the atom axis");
  const Eigen::ArrayXd product = arm_u.values().abs2() * arm_d.values().abs2();
  const double peak = product.maxCoeff();
  if (!(peak > 0.0)) throw Error(ErrorCode::BadParam, "arms do not overlap");
  RegionR r{grid.axis(0).hi(), grid.axis(0).lo};
  for (Index i = 0; i < product.size(); ++i) {
    if (product[i] >= 0.5 * peak) {
      const double x = grid.axis(0).coordinate(i);
      r.lo = std::min(r.lo, x);
      r.hi = std::max(r.hi, x);
    }
  }
  return r;
}

double fringe_visibility(const RealField& atom_density, const RegionR& r) {
  const Grid& grid = atom_density.grid();
  if (grid.dims() != 1) throw Error(ErrorCode::DimMismatch, "visibility needs an atom-axis density");
  const double center = 0.5 * (r.lo + r.hi);
  const double quarter = 0.25 * (r.hi - r.lo);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  int used = 0;
  for (Index i = 0; i < grid.size(); ++i) {
    const double x = grid.axis(0).coordinate(i);
    if (std::abs(x - center) <= quarter) {
      lo = std::min(lo, atom_density[i]);
      hi = std::max(hi, atom_density[i]);
      ++used;
    }
  }
  if (used < 2) throw Error(ErrorCode::BadParam, "region R spans fewer than two grid nodes");
  if (!(hi + lo > 0.0)) return 0.0;
  return (hi - lo) / (hi + lo);
}

}  // namespace dmbohm
