#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dmbohm/guidance.hpp"

namespace dmbohm {

/// Portable generator: std::mt19937_64 is fully specified by the standard,
/// and uniform doubles are built from its top 53 bits rather than from
/// implementation-defined distributions.
using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Sample n configurations from the grid density P.
///
/// P is treated as constant over the cell around each node, which on a
/// periodic grid integrates to the same total as the trapezoid rule. 1D uses
/// the inverse CDF; 2D uses rejection against max P.
std::vector<Point> sample_initial(const RealField& density, std::size_t n, std::uint64_t seed);
std::vector<Point> sample_initial(const RealField& density, std::size_t n, Rng& rng);

enum class TrajectoryStatus : std::uint8_t { Ok, NodeEntry, OutOfDomain };

std::string_view to_string(TrajectoryStatus s);

struct Trajectory {
  std::size_t id = 0;
  int dims = 1;
  std::vector<double> coords;         // dims values per record
  std::vector<std::int8_t> branch;    // dominant branch per record, -1 when unknown
  TrajectoryStatus status = TrajectoryStatus::Ok;
  double flag_time = 0.0;

  std::size_t records() const { return coords.size() / static_cast<std::size_t>(dims); }
  double coordinate(std::size_t record, int axis = 0) const {
    return coords[record * static_cast<std::size_t>(dims) + static_cast<std::size_t>(axis)];
  }
  Point position(std::size_t record) const;
  bool ok() const { return status == TrajectoryStatus::Ok; }
};

struct TrajectoryEnsemble {
  std::vector<double> times;  // shared time base
  std::vector<Trajectory> trajectories;
  std::uint64_t seed = 0;
  std::string scenario;

  std::size_t flagged() const;
  /// Index of the record at time t (tolerance 1e-9); BadTime otherwise.
  std::size_t record_index(double t) const;
};

/// Multilinear interpolation of P and J separately, then v = J/(m P).
/// Empty when the interpolated P is at or below the floor.
std::optional<Point> velocity_at(const GuidanceField& g, const Point& x);

/// Index of the branch with the largest w_a R_a^2 at x, or -1 without branch data.
int dominant_branch_at(const GuidanceField& g, const Point& x);

/// Classic RK4 over a stream of guidance snapshots spaced dt/2 apart.
class EnsembleIntegrator {
 public:
  EnsembleIntegrator(std::vector<Point> starts, const Grid& grid, double t0, double dt,
                     std::int64_t record_stride = 1);

  /// Force a record after the given step count in addition to the stride.
  void record_at_step(std::int64_t step);

  void initialize(const GuidanceField& g0);
  void step(const GuidanceField& g0, const GuidanceField& half, const GuidanceField& g1);

  std::int64_t steps_taken() const { return steps_; }
  TrajectoryEnsemble finish(std::uint64_t seed, std::string scenario);

 private:
  void record(const GuidanceField& g, double t);

  Grid grid_;
  double t0_;
  double dt_;
  std::int64_t stride_;
  std::vector<std::int64_t> extra_;
  std::int64_t steps_ = 0;
  std::vector<Point> current_;
  TrajectoryEnsemble ensemble_;
};

/// Integrate over pre-computed snapshots at dt/2 spacing (2*steps + 1 of them).
TrajectoryEnsemble integrate_ensemble(std::span<const GuidanceField> half_step_snapshots, std::vector<Point> starts,
                                      double dt, std::int64_t record_stride = 1);

struct RunOptions {
  double dt = 1e-3;
  double t_final = 1.0;
  std::int64_t record_stride = 1;
  std::vector<double> record_times;  // extra record instants, multiples of dt
  GuidanceOptions guidance{};
};

using SnapshotObserver = std::function<void(const DensityMatrixState&, const GuidanceField&)>;

/// Evolve the state at dt/2 and integrate the starts alongside it.
/// The observer sees every half-step snapshot in order.
TrajectoryEnsemble run_trajectories(const DensityMatrixState& initial, const PotentialField& potential,
                                    std::vector<Point> starts, const RunOptions& options,
                                    const SnapshotObserver& observer = {});

/// Fraction of unflagged trajectories whose side of the plane coordinate[axis] = value
/// differs between the first and last record.
double crossing_fraction(const TrajectoryEnsemble& e, int axis = 0, double value = 0.0);

/// 1D no-crossing: ordering by initial position is preserved at every record.
bool order_preserved(const TrajectoryEnsemble& e, int axis = 0);

struct Histogram {
  double lo = 0.0;
  double hi = 1.0;
  Eigen::ArrayXd mass;  // sums to 1 over in-range samples
  std::size_t counted = 0;
  std::size_t outside = 0;

  int bins() const { return static_cast<int>(mass.size()); }
};

/// Histogram of unflagged trajectory positions along `axis` at time t.
Histogram position_histogram(const TrajectoryEnsemble& e, double t, int bins, double lo, double hi, int axis = 0);

/// Marginal of a grid density along `axis`, integrated cell by cell into the bins.
Histogram density_histogram(const RealField& density, int bins, double lo, double hi, int axis = 0);

/// Total-variation distance 0.5 * sum |a - b|.
double total_variation(const Histogram& a, const Histogram& b);

}  // namespace dmbohm
