#include "dmbohm/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dmbohm {

namespace {

constexpr double kBoundaryLeakLimit = 1e-8;

Eigen::ArrayXd gaussian_axis(const Axis& a, double center, double sigma) {
  Eigen::ArrayXd g(a.points);
  for (Index i = 0; i < a.points; ++i) {
    const double dx = a.coordinate(i) - center;
    g[i] = std::exp(-dx * dx / (4.0 * sigma * sigma));
  }
  return g;
}

}  // namespace

Complex unit_phase(double theta) {
  const double quarters = theta / (std::numbers::pi / 2.0);
  const double nearest = std::round(quarters);
  if (std::abs(quarters - nearest) < 1e-12) {
    switch (((static_cast<long long>(nearest) % 4) + 4) % 4) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }
  return std::polar(1.0, theta);
}

ComplexField gaussian_packet(const Grid& grid, const Point& center, const Point& sigma, const Point& momentum) {
  const int dims = grid.dims();
  if (center.size() != dims || sigma.size() != dims || momentum.size() != dims) {
    throw Error(ErrorCode::DimMismatch, "packet parameters must match grid dimension");
  }
  for (int d = 0; d < dims; ++d) {
    if (!(sigma[d] > 0.0)) throw Error(ErrorCode::BadParam, "packet width must be positive");
  }
  if (!grid.contains(center)) throw Error(ErrorCode::BadParam, "packet centre outside the grid");

  ComplexField f(grid);
  const Eigen::ArrayXd gx = gaussian_axis(grid.axis(0), center[0], sigma[0]);
  if (dims == 1) {
    for (Index i = 0; i < grid.size(); ++i) {
      f[i] = gx[i] * std::polar(1.0, momentum[0] * grid.axis(0).coordinate(i));
    }
  } else {
    const Eigen::ArrayXd gy = gaussian_axis(grid.axis(1), center[1], sigma[1]);
    for (Index j = 0; j < grid.axis(1).points; ++j) {
      const double y = grid.axis(1).coordinate(j);
      for (Index i = 0; i < grid.axis(0).points; ++i) {
        const double x = grid.axis(0).coordinate(i);
        f[grid.flat(i, j)] = gx[i] * gy[j] * std::polar(1.0, momentum[0] * x + momentum[1] * y);
      }
    }
  }
  f = normalized(f);
  if (edge_density_ratio(f) >= kBoundaryLeakLimit) {
    throw Error(ErrorCode::BoundaryLeak, "packet tail reaches the grid boundary");
  }
  return f;
}

ComplexField gaussian_packet(const Grid& grid, const Point& center, double sigma, const Point& momentum) {
  return gaussian_packet(grid, center, Point::Constant(grid.dims(), sigma), momentum);
}

ComplexField tensor_product(const ComplexField& first, const ComplexField& second) {
  if (first.grid().dims() != 1 || second.grid().dims() != 1) {
    throw Error(ErrorCode::DimMismatch, "tensor_product takes two 1D fields");
  }
  const Grid plane = Grid::plane(first.grid().axis(0), second.grid().axis(0));
  ComplexField out(plane);
  for (Index j = 0; j < second.size(); ++j) {
    for (Index i = 0; i < first.size(); ++i) out[plane.flat(i, j)] = first[i] * second[j];
  }
  return out;
}

RealField density(const ComplexField& f) { return RealField(f.grid(), f.values().abs2()); }

VectorField branch_current(const ComplexField& f, DerivativeScheme scheme) {
  VectorField j(f.grid());
  const auto grad = gradient(f, scheme);
  for (int d = 0; d < f.grid().dims(); ++d) {
    j.component(d) = (f.values().conjugate() * grad[static_cast<std::size_t>(d)].values()).imag();
  }
  return j;
}

Complex overlap(const ComplexField& a, const ComplexField& b) {
  require_same_grid(a.grid(), b.grid());
  return (a.values().conjugate() * b.values()).sum() * a.grid().cell_volume();
}

double superorthogonality_measure(const ComplexField& a, const ComplexField& b) {
  require_same_grid(a.grid(), b.grid());
  return (a.values().abs() * b.values().abs()).sum() * a.grid().cell_volume();
}

double norm_squared(const ComplexField& f) { return f.values().abs2().sum() * f.grid().cell_volume(); }

ComplexField normalized(const ComplexField& f) {
  const double n2 = norm_squared(f);
  if (!(n2 > 0.0)) throw Error(ErrorCode::BadParam, "cannot normalize a zero field");
  return ComplexField(f.grid(), f.values() / std::sqrt(n2));
}

double integrate(const RealField& f) { return f.values().sum() * f.grid().cell_volume(); }

double edge_density_ratio(const RealField& rho) {
  const Grid& grid = rho.grid();
  const double peak = rho.values().maxCoeff();
  if (!(peak > 0.0)) return 0.0;
  double edge = 0.0;
  for (Index flat = 0; flat < grid.size(); ++flat) {
    for (int d = 0; d < grid.dims(); ++d) {
      const Index i = grid.index(flat, d);
      if (i == 0 || i == grid.axis(d).points - 1) edge = std::max(edge, rho[flat]);
    }
  }
  return edge / peak;
}

double edge_density_ratio(const ComplexField& f) { return edge_density_ratio(density(f)); }

}  // namespace dmbohm
