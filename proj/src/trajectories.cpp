#include "dmbohm/trajectories.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace dmbohm {

namespace {

struct Stencil {
  std::array<Index, 4> index{};
  std::array<double, 4> weight{};
  int count = 0;
};

// Multilinear stencil on the periodic grid; the last node wraps to the first.
std::optional<Stencil> stencil_at(const Grid& grid, const Point& x) {
  if (!grid.contains(x)) return std::nullopt;
  std::array<Index, 2> i0{};
  std::array<Index, 2> i1{};
  std::array<double, 2> frac{};
  for (int d = 0; d < grid.dims(); ++d) {
    const Axis& a = grid.axis(d);
    const double s = (x[d] - a.lo) / a.spacing();
    Index i = static_cast<Index>(std::floor(s));
    i = std::clamp<Index>(i, 0, a.points - 1);
    i0[static_cast<std::size_t>(d)] = i;
    i1[static_cast<std::size_t>(d)] = i + 1 == a.points ? 0 : i + 1;
    frac[static_cast<std::size_t>(d)] = s - static_cast<double>(i);
  }
  Stencil st;
  if (grid.dims() == 1) {
    st.count = 2;
    st.index = {i0[0], i1[0], 0, 0};
    st.weight = {1.0 - frac[0], frac[0], 0.0, 0.0};
  } else {
    st.count = 4;
    st.index = {grid.flat(i0[0], i0[1]), grid.flat(i1[0], i0[1]), grid.flat(i0[0], i1[1]), grid.flat(i1[0], i1[1])};
    st.weight = {(1.0 - frac[0]) * (1.0 - frac[1]), frac[0] * (1.0 - frac[1]), (1.0 - frac[0]) * frac[1],
                 frac[0] * frac[1]};
  }
  return st;
}

template <typename Values>
double apply(const Stencil& st, const Values& v) {
  double s = 0.0;
  for (int c = 0; c < st.count; ++c) s += st.weight[static_cast<std::size_t>(c)] * v[st.index[static_cast<std::size_t>(c)]];
  return s;
}

double wrap_into(double x, const Axis& a) {
  if (x < a.lo) x += a.extent;
  if (x >= a.hi()) x -= a.extent;
  return x;
}

}  // namespace

std::string_view to_string(TrajectoryStatus s) {
  switch (s) {
    case TrajectoryStatus::Ok: return "ok";
    case TrajectoryStatus::NodeEntry: return "NodeEntry";
    case TrajectoryStatus::OutOfDomain: return "OutOfDomain";
  }
  return "unknown";
}

std::vector<Point> sample_initial(const RealField& density, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return sample_initial(density, n, rng);
}

std::vector<Point> sample_initial(const RealField& density, std::size_t n, Rng& rng) {
  if (n < 1) throw Error(ErrorCode::BadParam, "need at least one sample");
  const Grid& grid = density.grid();
  const Eigen::ArrayXd& p = density.values();
  if ((p < 0.0).any() || !(p.sum() > 0.0)) throw Error(ErrorCode::BadParam, "density must be non-negative and non-zero");
  std::vector<Point> out;
  out.reserve(n);

  if (grid.dims() == 1) {
    const Axis& a = grid.axis(0);
    std::vector<double> cdf(static_cast<std::size_t>(p.size()) + 1, 0.0);
    for (Index i = 0; i < p.size(); ++i) cdf[static_cast<std::size_t>(i) + 1] = cdf[static_cast<std::size_t>(i)] + p[i];
    const double total = cdf.back();
    for (std::size_t s = 0; s < n; ++s) {
      const double target = uniform01(rng) * total;
      auto it = std::upper_bound(cdf.begin() + 1, cdf.end(), target);
      Index cell = static_cast<Index>(it - cdf.begin()) - 1;
      cell = std::clamp<Index>(cell, 0, p.size() - 1);
      while (p[cell] <= 0.0 && cell + 1 < p.size()) ++cell;  // zero-mass cells have no width in the CDF
      const double frac = std::clamp((target - cdf[static_cast<std::size_t>(cell)]) / p[cell], 0.0, 1.0);
      const double x = a.coordinate(cell) + (frac - 0.5) * a.spacing();
      out.push_back(make_point(wrap_into(x, a)));
    }
    return out;
  }

  const double envelope = p.maxCoeff();
  const double cells = static_cast<double>(p.size());
  while (out.size() < n) {
    const Index cell = std::min<Index>(static_cast<Index>(uniform01(rng) * cells), p.size() - 1);
    if (uniform01(rng) * envelope >= p[cell]) continue;
    Point x(2);
    for (int d = 0; d < 2; ++d) {
      const Axis& a = grid.axis(d);
      x[d] = wrap_into(a.coordinate(grid.index(cell, d)) + (uniform01(rng) - 0.5) * a.spacing(), a);
    }
    out.push_back(x);
  }
  return out;
}

Point Trajectory::position(std::size_t record) const {
  Point p(dims);
  for (int d = 0; d < dims; ++d) p[d] = coordinate(record, d);
  return p;
}

std::size_t TrajectoryEnsemble::flagged() const {
  return static_cast<std::size_t>(
      std::count_if(trajectories.begin(), trajectories.end(), [](const Trajectory& t) { return !t.ok(); }));
}

std::size_t TrajectoryEnsemble::record_index(double t) const {
  for (std::size_t r = 0; r < times.size(); ++r) {
    if (std::abs(times[r] - t) < 1e-9) return r;
  }
  throw Error(ErrorCode::BadTime, "no record at t = " + std::to_string(t));
}

std::optional<Point> velocity_at(const GuidanceField& g, const Point& x) {
  const auto st = stencil_at(g.grid(), x);
  if (!st) return std::nullopt;
  const double p = apply(*st, g.density.values());
  if (!(p > g.epsilon)) return std::nullopt;
  Point v(g.grid().dims());
  for (int d = 0; d < g.grid().dims(); ++d) v[d] = apply(*st, g.current.component(d)) / (g.mass * p);
  return v;
}

int dominant_branch_at(const GuidanceField& g, const Point& x) {
  if (g.branch_densities.empty()) return -1;
  const auto st = stencil_at(g.grid(), x);
  if (!st) return -1;
  int best = 0;
  double best_value = -1.0;
  for (std::size_t a = 0; a < g.branch_densities.size(); ++a) {
    const double v = apply(*st, g.branch_densities[a].values());
    if (v > best_value) {
      best_value = v;
      best = static_cast<int>(a);
    }
  }
  return best;
}

EnsembleIntegrator::EnsembleIntegrator(std::vector<Point> starts, const Grid& grid, double t0, double dt,
                                       std::int64_t record_stride)
    : grid_(grid), t0_(t0), dt_(dt), stride_(record_stride), current_(std::move(starts)) {
  if (!(dt > 0.0)) throw Error(ErrorCode::BadParam, "time step must be positive");
  if (stride_ < 1) throw Error(ErrorCode::BadParam, "record stride must be >= 1");
  ensemble_.trajectories.resize(current_.size());
  for (std::size_t i = 0; i < current_.size(); ++i) {
    if (current_[i].size() != grid.dims()) throw Error(ErrorCode::DimMismatch, "start point dimension");
    ensemble_.trajectories[i].id = i;
    ensemble_.trajectories[i].dims = grid.dims();
  }
}

void EnsembleIntegrator::record_at_step(std::int64_t step) { extra_.push_back(step); }

void EnsembleIntegrator::initialize(const GuidanceField& g0) {
  for (std::size_t i = 0; i < current_.size(); ++i) {
    Trajectory& tr = ensemble_.trajectories[i];
    if (!grid_.contains(current_[i])) {
      tr.status = TrajectoryStatus::OutOfDomain;
      tr.flag_time = t0_;
    } else if (!velocity_at(g0, current_[i])) {
      tr.status = TrajectoryStatus::NodeEntry;
      tr.flag_time = t0_;
    }
  }
  record(g0, t0_);
}

void EnsembleIntegrator::step(const GuidanceField& g0, const GuidanceField& half, const GuidanceField& g1) {
  const double t = t0_ + static_cast<double>(steps_) * dt_;
  for (std::size_t i = 0; i < current_.size(); ++i) {
    Trajectory& tr = ensemble_.trajectories[i];
    if (!tr.ok()) continue;
    const Point& x = current_[i];
    auto eval = [&](const GuidanceField& g, const Point& p) -> std::optional<Point> {
      if (!grid_.contains(p)) {
        tr.status = TrajectoryStatus::OutOfDomain;
        return std::nullopt;
      }
      auto v = velocity_at(g, p);
      if (!v) tr.status = TrajectoryStatus::NodeEntry;
      return v;
    };
    const auto k1 = eval(g0, x);
    if (!k1) { tr.flag_time = t; continue; }
    const auto k2 = eval(half, x + 0.5 * dt_ * *k1);
    if (!k2) { tr.flag_time = t; continue; }
    const auto k3 = eval(half, x + 0.5 * dt_ * *k2);
    if (!k3) { tr.flag_time = t; continue; }
    const auto k4 = eval(g1, x + dt_ * *k3);
    if (!k4) { tr.flag_time = t; continue; }
    Point next = x + (dt_ / 6.0) * (*k1 + 2.0 * *k2 + 2.0 * *k3 + *k4);
    if (!grid_.contains(next)) {
      tr.status = TrajectoryStatus::OutOfDomain;
      tr.flag_time = t;
      continue;
    }
    current_[i] = next;
  }
  ++steps_;
  if (steps_ % stride_ == 0 || std::find(extra_.begin(), extra_.end(), steps_) != extra_.end()) {
    record(g1, t0_ + static_cast<double>(steps_) * dt_);
  }
}

void EnsembleIntegrator::record(const GuidanceField& g, double t) {
  ensemble_.times.push_back(t);
  for (std::size_t i = 0; i < current_.size(); ++i) {
    Trajectory& tr = ensemble_.trajectories[i];
    for (int d = 0; d < grid_.dims(); ++d) tr.coords.push_back(current_[i][d]);
    tr.branch.push_back(tr.ok() ? static_cast<std::int8_t>(dominant_branch_at(g, current_[i])) : std::int8_t{-1});
  }
}

TrajectoryEnsemble EnsembleIntegrator::finish(std::uint64_t seed, std::string scenario) {
  ensemble_.seed = seed;
  ensemble_.scenario = std::move(scenario);
  return std::move(ensemble_);
}

TrajectoryEnsemble integrate_ensemble(std::span<const GuidanceField> snapshots, std::vector<Point> starts, double dt,
                                      std::int64_t record_stride) {
  if (snapshots.size() < 3 || snapshots.size() % 2 == 0) {
    throw Error(ErrorCode::BadParam, "need an odd number (>= 3) of half-step snapshots");
  }
  const double half = 0.5 * dt;
  for (std::size_t s = 1; s < snapshots.size(); ++s) {
    if (std::abs(snapshots[s].time - snapshots[s - 1].time - half) > 1e-9) {
      throw Error(ErrorCode::BadTime, "snapshots must be spaced dt/2 apart");
    }
  }
  EnsembleIntegrator integrator(std::move(starts), snapshots.front().grid(), snapshots.front().time, dt, record_stride);
  const auto steps = static_cast<std::int64_t>(snapshots.size() / 2);
  integrator.record_at_step(steps);
  integrator.initialize(snapshots[0]);
  for (std::size_t s = 0; s + 2 < snapshots.size(); s += 2) {
    integrator.step(snapshots[s], snapshots[s + 1], snapshots[s + 2]);
  }
  return integrator.finish(0, "");
}

TrajectoryEnsemble run_trajectories(const DensityMatrixState& initial, const PotentialField& potential,
                                    std::vector<Point> starts, const RunOptions& options,
                                    const SnapshotObserver& observer) {
  const double t0 = initial.time();
  const double dt = options.dt;
  if (!(dt > 0.0)) throw Error(ErrorCode::BadParam, "time step must be positive");
  const auto steps = static_cast<std::int64_t>(std::llround((options.t_final - t0) / dt));
  if (steps < 1) throw Error(ErrorCode::BadParam, "final time must be at least one step after the start");

  EnsembleIntegrator integrator(std::move(starts), initial.grid(), t0, dt, options.record_stride);
  integrator.record_at_step(steps);
  for (double t : options.record_times) {
    const auto n = static_cast<std::int64_t>(std::llround((t - t0) / dt));
    if (n < 0 || n > steps || std::abs(static_cast<double>(n) * dt - (t - t0)) > 1e-9 * std::max(1.0, std::abs(t))) {
      throw Error(ErrorCode::BadTime, "record time " + std::to_string(t) + " is not on the step grid");
    }
    if (n > 0) integrator.record_at_step(n);
  }

  DensityEvolver evolver(initial, potential, 0.5 * dt, options.guidance.mass);
  auto snapshot = [&]() {
    GuidanceField g = make_guidance(evolver.state(), options.guidance);
    if (observer) observer(evolver.state(), g);
    return g;
  };
  GuidanceField g0 = snapshot();
  integrator.initialize(g0);
  for (std::int64_t n = 0; n < steps; ++n) {
    evolver.advance();
    GuidanceField half = snapshot();
    evolver.advance();
    GuidanceField g1 = snapshot();
    integrator.step(g0, half, g1);
    g0 = std::move(g1);
  }
  return integrator.finish(0, "");
}

double crossing_fraction(const TrajectoryEnsemble& e, int axis, double value) {
  std::size_t counted = 0;
  std::size_t crossed = 0;
  for (const Trajectory& t : e.trajectories) {
    if (!t.ok() || t.records() == 0) continue;
    ++counted;
    const double before = t.coordinate(0, axis) - value;
    const double after = t.coordinate(t.records() - 1, axis) - value;
    if (before * after < 0.0) ++crossed;
  }
  if (counted == 0) throw Error(ErrorCode::EmptyEnsemble, "no unflagged trajectories");
  return static_cast<double>(crossed) / static_cast<double>(counted);
}

bool order_preserved(const TrajectoryEnsemble& e, int axis) {
  std::vector<const Trajectory*> ok;
  for (const Trajectory& t : e.trajectories) {
    if (t.ok()) ok.push_back(&t);
  }
  std::sort(ok.begin(), ok.end(),
            [axis](const Trajectory* a, const Trajectory* b) { return a->coordinate(0, axis) < b->coordinate(0, axis); });
  for (std::size_t r = 0; r < e.times.size(); ++r) {
    for (std::size_t i = 1; i < ok.size(); ++i) {
      if (!(ok[i - 1]->coordinate(r, axis) < ok[i]->coordinate(r, axis))) return false;
    }
  }
  return true;
}

Histogram position_histogram(const TrajectoryEnsemble& e, double t, int bins, double lo, double hi, int axis) {
  if (bins < 1 || !(hi > lo)) throw Error(ErrorCode::BadParam, "histogram needs bins >= 1 and hi > lo");
  const std::size_t r = e.record_index(t);
  std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
  Histogram h{lo, hi, Eigen::ArrayXd::Zero(bins), 0, 0};
  for (const Trajectory& tr : e.trajectories) {
    if (!tr.ok()) continue;
    const double x = tr.coordinate(r, axis);
    const double s = (x - lo) / (hi - lo) * bins;
    if (!(s >= 0.0 && s < bins)) {
      ++h.outside;
      continue;
    }
    ++counts[static_cast<std::size_t>(s)];
    ++h.counted;
  }
  if (h.counted > 0) {
    for (int b = 0; b < bins; ++b) {
      h.mass[b] = static_cast<double>(counts[static_cast<std::size_t>(b)]) / static_cast<double>(h.counted);
    }
  }
  return h;
}

Histogram density_histogram(const RealField& density, int bins, double lo, double hi, int axis) {
  if (bins < 1 || !(hi > lo)) throw Error(ErrorCode::BadParam, "histogram needs bins >= 1 and hi > lo");
  const Grid& grid = density.grid();
  const Axis& a = grid.axis(axis);
  Eigen::ArrayXd marginal = Eigen::ArrayXd::Zero(a.points);
  for (Index f = 0; f < grid.size(); ++f) marginal[grid.index(f, axis)] += density[f];

  Histogram h{lo, hi, Eigen::ArrayXd::Zero(bins), 0, 0};
  const double width = (hi - lo) / bins;
  const double dx = a.spacing();
  // Spread each cell [x - dx/2, x + dx/2) over the bins it overlaps, wrapping periodically.
  auto deposit = [&](double c0, double c1, double m) {
    const double total = c1 - c0;
    int b = static_cast<int>(std::floor((c0 - lo) / width));
    double left = c0;
    while (left < c1) {
      const double edge = lo + (b + 1) * width;
      const double right = std::min(edge, c1);
      if (b >= 0 && b < bins) h.mass[b] += m * (right - left) / total;
      left = right;
      ++b;
    }
  };
  for (Index i = 0; i < a.points; ++i) {
    double c0 = a.coordinate(i) - 0.5 * dx;
    if (c0 < a.lo) {
      const double below = a.lo - c0;
      deposit(a.hi() - below, a.hi(), marginal[i] * below / dx);
      deposit(a.lo, c0 + dx, marginal[i] * (dx - below) / dx);
    } else {
      deposit(c0, c0 + dx, marginal[i]);
    }
  }
  const double s = h.mass.sum();
  if (s > 0.0) h.mass /= s;
  return h;
}

double total_variation(const Histogram& a, const Histogram& b) {
  if (a.bins() != b.bins() || a.lo != b.lo || a.hi != b.hi) {
    throw Error(ErrorCode::BinMismatch, "histograms use different binning");
  }
  return 0.5 * (a.mass - b.mass).abs().sum();
}

}  // namespace dmbohm
