#include "dmbohm/grid.hpp"

#include <cmath>
#include <string>

namespace dmbohm {

Point make_point(double x) {
  Point p(1);
  p << x;
  return p;
}

Point make_point(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

namespace {

void validate_axis(const Axis& a) {
  if (!(a.extent > 0.0) || !std::isfinite(a.extent) || !std::isfinite(a.lo)) {
    throw Error(ErrorCode::BadParam, "axis extent must be finite and positive");
  }
  if (a.points < 8) {
    throw Error(ErrorCode::BadParam, "axis needs at least 8 points, got " + std::to_string(a.points));
  }
}

bool power_of_two(Index n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

Grid::Grid(int dims, std::array<Axis, 2> axes) : dims_(dims), axes_(axes) {
  for (int d = 0; d < dims_; ++d) validate_axis(axes_[static_cast<std::size_t>(d)]);
}

Grid Grid::line(double lo, double hi, Index points) {
  return Grid(1, {Axis{lo, hi - lo, points}, Axis{}});
}

Grid Grid::plane(Axis first, Axis second) { return Grid(2, {first, second}); }

double Grid::cell_volume() const {
  double v = axes_[0].spacing();
  if (dims_ == 2) v *= axes_[1].spacing();
  return v;
}

bool Grid::spectral_friendly() const {
  for (int d = 0; d < dims_; ++d) {
    if (!power_of_two(axis(d).points)) return false;
  }
  return true;
}

Point Grid::node(Index flat_index) const {
  if (dims_ == 1) return make_point(axes_[0].coordinate(flat_index));
  return make_point(axes_[0].coordinate(index(flat_index, 0)), axes_[1].coordinate(index(flat_index, 1)));
}

bool Grid::contains(const Point& p) const {
  if (p.size() != dims_) return false;
  for (int d = 0; d < dims_; ++d) {
    const Axis& a = axis(d);
    if (!(p[d] >= a.lo && p[d] < a.hi())) return false;
  }
  return true;
}

void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw Error(ErrorCode::GridMismatch, "fields live on different grids");
}

}  // namespace dmbohm
