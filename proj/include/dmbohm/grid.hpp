#pragma once

#include <Eigen/Core>

#include <array>
#include <complex>
#include <cstddef>

#include "dmbohm/error.hpp"

namespace dmbohm {

using Index = Eigen::Index;
using Complex = std::complex<double>;

/// A configuration-space point with one or two coordinates.
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 2, 1>;

Point make_point(double x);
Point make_point(double x, double y);

/// One periodic axis: `points` nodes at lo + i*spacing, spacing = extent/points.
struct Axis {
  double lo = 0.0;
  double extent = 1.0;
  Index points = 8;

  double spacing() const { return extent / static_cast<double>(points); }
  double hi() const { return lo + extent; }
  double coordinate(Index i) const { return lo + static_cast<double>(i) * spacing(); }

  bool operator==(const Axis&) const = default;
};

/// Uniform rectangular periodic lattice in one or two dimensions.
///
/// Values on a 2D grid are stored flat with the first axis fastest:
/// flat = i0 + points0 * i1.
class Grid {
 public:
  static Grid line(double lo, double hi, Index points);
  static Grid plane(Axis first, Axis second);

  int dims() const { return dims_; }
  const Axis& axis(int d) const { return axes_[static_cast<std::size_t>(d)]; }
  Index size() const { return dims_ == 1 ? axes_[0].points : axes_[0].points * axes_[1].points; }
  double cell_volume() const;

  /// True when every axis has a power-of-two point count.
  bool spectral_friendly() const;

  Index flat(Index i0, Index i1 = 0) const { return i0 + axes_[0].points * i1; }
  Index index(Index flat, int d) const {
    return d == 0 ? flat % axes_[0].points : flat / axes_[0].points;
  }
  Point node(Index flat) const;

  /// Half-open containment test against [lo, hi) on every axis.
  bool contains(const Point& p) const;

  bool operator==(const Grid&) const = default;

 private:
  Grid(int dims, std::array<Axis, 2> axes);

  int dims_ = 1;
  std::array<Axis, 2> axes_{};
};

void require_same_grid(const Grid& a, const Grid& b);

/// Scalar field on a grid, templated on the value type.
template <typename T>
class Field {
 public:
  using Scalar = T;
  using Array = Eigen::Array<T, Eigen::Dynamic, 1>;

  explicit Field(const Grid& grid) : grid_(grid), values_(Array::Zero(grid.size())) {}
  Field(const Grid& grid, Array values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
      throw Error(ErrorCode::GridMismatch, "field length does not match grid size");
    }
  }

  const Grid& grid() const { return grid_; }
  const Array& values() const { return values_; }
  Array& values() { return values_; }

  Index size() const { return values_.size(); }
  const T& operator[](Index flat) const { return values_[flat]; }
  T& operator[](Index flat) { return values_[flat]; }

 private:
  Grid grid_;
  Array values_;
};

using ComplexField = Field<Complex>;
using RealField = Field<double>;

/// Vector-valued field with one column per grid axis.
class VectorField {
 public:
  explicit VectorField(const Grid& grid)
      : grid_(grid), values_(Eigen::ArrayXXd::Zero(grid.size(), grid.dims())) {}

  const Grid& grid() const { return grid_; }
  int dims() const { return grid_.dims(); }
  Index size() const { return values_.rows(); }

  auto component(int d) { return values_.col(d); }
  auto component(int d) const { return values_.col(d); }
  const Eigen::ArrayXXd& values() const { return values_; }
  Eigen::ArrayXXd& values() { return values_; }

 private:
  Grid grid_;
  Eigen::ArrayXXd values_;
};

/// Real field with a definedness mask, for quantities that are undefined at nodes.
struct MaskedRealField {
  RealField values;
  Eigen::Array<bool, Eigen::Dynamic, 1> defined;
};

struct MaskedVectorField {
  VectorField values;
  Eigen::Array<bool, Eigen::Dynamic, 1> defined;
};

}  // namespace dmbohm
