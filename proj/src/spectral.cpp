#include "dmbohm/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>

namespace dmbohm {

namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

Eigen::ArrayXd axis_wavenumbers(const Axis& a, bool zero_nyquist) {
  const Index n = a.points;
  Eigen::ArrayXd k(n);
  const double base = 2.0 * std::numbers::pi / a.extent;
  for (Index j = 0; j < n; ++j) {
    Index m = j <= n / 2 ? j : j - n;
    if (n % 2 == 0 && j == n / 2) m = zero_nyquist ? 0 : -n / 2;
    k[j] = base * static_cast<double>(m);
  }
  return k;
}

}  // namespace

struct SpectralPlan::Impl {
  Grid grid;
  fftw_complex* buffer_in = nullptr;
  fftw_complex* buffer_out = nullptr;
  fftw_plan forward_plan = nullptr;
  fftw_plan inverse_plan = nullptr;
  std::array<Eigen::ArrayXd, 2> k;
  std::array<Eigen::ArrayXd, 2> k_odd;
  std::array<Eigen::ArrayXcd, 2> ik;
  Eigen::ArrayXd k2;

  explicit Impl(const Grid& g) : grid(g) {
    const Index n = grid.size();
    std::lock_guard lock(planner_mutex());
    buffer_in = fftw_alloc_complex(static_cast<std::size_t>(n));
    buffer_out = fftw_alloc_complex(static_cast<std::size_t>(n));
    if (grid.dims() == 1) {
      const int n0 = static_cast<int>(grid.axis(0).points);
      forward_plan = fftw_plan_dft_1d(n0, buffer_in, buffer_out, FFTW_FORWARD, FFTW_ESTIMATE);
      inverse_plan = fftw_plan_dft_1d(n0, buffer_in, buffer_out, FFTW_BACKWARD, FFTW_ESTIMATE);
    } else {
      // Row-major with the first grid axis contiguous.
      const int rows = static_cast<int>(grid.axis(1).points);
      const int cols = static_cast<int>(grid.axis(0).points);
      forward_plan = fftw_plan_dft_2d(rows, cols, buffer_in, buffer_out, FFTW_FORWARD, FFTW_ESTIMATE);
      inverse_plan = fftw_plan_dft_2d(rows, cols, buffer_in, buffer_out, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
  }

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward_plan);
    fftw_destroy_plan(inverse_plan);
    fftw_free(buffer_in);
    fftw_free(buffer_out);
  }

  void run(fftw_plan plan, const Eigen::ArrayXcd& in, Eigen::ArrayXcd& out, double scale) const {
    const Index n = grid.size();
    if (in.size() != n) throw Error(ErrorCode::GridMismatch, "transform input has wrong length");
    std::memcpy(buffer_in, in.data(), sizeof(fftw_complex) * static_cast<std::size_t>(n));
    fftw_execute(plan);
    const Eigen::Map<const Eigen::ArrayXcd> result(reinterpret_cast<const Complex*>(buffer_out), n);
    if (scale == 1.0) {
      out = result;
    } else {
      out = result * scale;
    }
  }
};

SpectralPlan::SpectralPlan(const Grid& grid) : impl_(std::make_unique<Impl>(grid)) {
  const Index n = grid.size();
  for (int d = 0; d < grid.dims(); ++d) {
    const Eigen::ArrayXd full = axis_wavenumbers(grid.axis(d), false);
    const Eigen::ArrayXd odd = axis_wavenumbers(grid.axis(d), true);
    auto& k = impl_->k[static_cast<std::size_t>(d)];
    auto& k_odd = impl_->k_odd[static_cast<std::size_t>(d)];
    k.resize(n);
    k_odd.resize(n);
    for (Index f = 0; f < n; ++f) {
      const Index i = grid.index(f, d);
      k[f] = full[i];
      k_odd[f] = odd[i];
    }
  }
  for (int d = 0; d < grid.dims(); ++d) {
    impl_->ik[static_cast<std::size_t>(d)] = Complex(0.0, 1.0) * impl_->k_odd[static_cast<std::size_t>(d)].cast<Complex>();
  }
  impl_->k2 = Eigen::ArrayXd::Zero(n);
  for (int d = 0; d < grid.dims(); ++d) impl_->k2 += impl_->k[static_cast<std::size_t>(d)].square();
}

SpectralPlan::~SpectralPlan() = default;

const Grid& SpectralPlan::grid() const { return impl_->grid; }

void SpectralPlan::forward(const Eigen::ArrayXcd& in, Eigen::ArrayXcd& out) const {
  impl_->run(impl_->forward_plan, in, out, 1.0);
}

void SpectralPlan::inverse(const Eigen::ArrayXcd& in, Eigen::ArrayXcd& out) const {
  impl_->run(impl_->inverse_plan, in, out, 1.0 / static_cast<double>(impl_->grid.size()));
}

const Eigen::ArrayXd& SpectralPlan::wavenumbers(int d) const { return impl_->k[static_cast<std::size_t>(d)]; }
const Eigen::ArrayXd& SpectralPlan::derivative_wavenumbers(int d) const {
  return impl_->k_odd[static_cast<std::size_t>(d)];
}
const Eigen::ArrayXcd& SpectralPlan::derivative_factor(int d) const {
  return impl_->ik[static_cast<std::size_t>(d)];
}
const Eigen::ArrayXd& SpectralPlan::wavenumber_squared() const { return impl_->k2; }

const SpectralPlan& spectral_plan(const Grid& grid) {
  thread_local std::map<std::pair<std::array<double, 4>, std::array<Index, 2>>, std::unique_ptr<SpectralPlan>> cache;
  const std::array<Index, 2> shape{grid.axis(0).points, grid.dims() == 2 ? grid.axis(1).points : 0};
  const std::array<double, 4> geometry{grid.axis(0).lo, grid.axis(0).extent, grid.dims() == 2 ? grid.axis(1).lo : 0.0,
                                       grid.dims() == 2 ? grid.axis(1).extent : 0.0};
  auto key = std::make_pair(geometry, shape);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_unique<SpectralPlan>(grid)).first;
  return *it->second;
}

namespace {

// Periodic 4th-order stencils along axis d of a flat array.
template <typename Array>
Array fd4_first(const Grid& grid, const Array& f, int d) {
  const Index n = grid.axis(d).points;
  const double h = grid.axis(d).spacing();
  Array out(f.size());
  for (Index flat = 0; flat < f.size(); ++flat) {
    const Index i = grid.index(flat, d);
    auto at = [&](Index offset) {
      const Index j = ((i + offset) % n + n) % n;
      return d == 0 ? f[grid.flat(j, grid.index(flat, 1))] : f[grid.flat(grid.index(flat, 0), j)];
    };
    out[flat] = (at(-2) - 8.0 * at(-1) + 8.0 * at(1) - at(2)) / (12.0 * h);
  }
  return out;
}

template <typename Array>
Array fd4_second(const Grid& grid, const Array& f, int d) {
  const Index n = grid.axis(d).points;
  const double h = grid.axis(d).spacing();
  Array out(f.size());
  for (Index flat = 0; flat < f.size(); ++flat) {
    const Index i = grid.index(flat, d);
    auto at = [&](Index offset) {
      const Index j = ((i + offset) % n + n) % n;
      return d == 0 ? f[grid.flat(j, grid.index(flat, 1))] : f[grid.flat(grid.index(flat, 0), j)];
    };
    out[flat] = (-at(-2) + 16.0 * at(-1) - 30.0 * at(0) + 16.0 * at(1) - at(2)) / (12.0 * h * h);
  }
  return out;
}

}  // namespace

std::vector<ComplexField> gradient(const ComplexField& f, DerivativeScheme scheme) {
  const Grid& grid = f.grid();
  std::vector<ComplexField> out;
  out.reserve(static_cast<std::size_t>(grid.dims()));
  if (scheme == DerivativeScheme::FiniteDifference4) {
    for (int d = 0; d < grid.dims(); ++d) out.emplace_back(grid, fd4_first(grid, f.values(), d));
    return out;
  }
  const SpectralPlan& plan = spectral_plan(grid);
  Eigen::ArrayXcd spectrum;
  plan.forward(f.values(), spectrum);
  Eigen::ArrayXcd scratch;
  for (int d = 0; d < grid.dims(); ++d) {
    plan.inverse(spectrum * plan.derivative_factor(d), scratch);
    out.emplace_back(grid, scratch);
  }
  return out;
}

std::vector<RealField> gradient(const RealField& f, DerivativeScheme scheme) {
  const Grid& grid = f.grid();
  std::vector<RealField> out;
  if (scheme == DerivativeScheme::FiniteDifference4) {
    for (int d = 0; d < grid.dims(); ++d) out.emplace_back(grid, fd4_first(grid, f.values(), d));
    return out;
  }
  const ComplexField lifted(grid, f.values().cast<Complex>());
  for (const ComplexField& g : gradient(lifted, scheme)) out.emplace_back(grid, g.values().real());
  return out;
}

RealField laplacian(const RealField& f, DerivativeScheme scheme) {
  const Grid& grid = f.grid();
  if (scheme == DerivativeScheme::FiniteDifference4) {
    Eigen::ArrayXd sum = Eigen::ArrayXd::Zero(f.size());
    for (int d = 0; d < grid.dims(); ++d) sum += fd4_second(grid, f.values(), d);
    return RealField(grid, sum);
  }
  const SpectralPlan& plan = spectral_plan(grid);
  Eigen::ArrayXcd spectrum;
  plan.forward(f.values().cast<Complex>(), spectrum);
  spectrum *= -plan.wavenumber_squared().cast<Complex>();
  Eigen::ArrayXcd back;
  plan.inverse(spectrum, back);
  return RealField(grid, back.real());
}

ComplexField partial_derivative(const ComplexField& f, int axis, DerivativeScheme scheme) {
  const Grid& grid = f.grid();
  if (axis < 0 || axis >= grid.dims()) throw Error(ErrorCode::DimMismatch, "derivative axis out of range");
  if (scheme == DerivativeScheme::FiniteDifference4) return ComplexField(grid, fd4_first(grid, f.values(), axis));
  const SpectralPlan& plan = spectral_plan(grid);
  Eigen::ArrayXcd spectrum;
  plan.forward(f.values(), spectrum);
  spectrum *= plan.derivative_factor(axis);
  Eigen::ArrayXcd back;
  plan.inverse(spectrum, back);
  return ComplexField(grid, back);
}

RealField partial_derivative(const RealField& f, int axis, DerivativeScheme scheme) {
  const Grid& grid = f.grid();
  if (scheme == DerivativeScheme::FiniteDifference4) {
    if (axis < 0 || axis >= grid.dims()) throw Error(ErrorCode::DimMismatch, "derivative axis out of range");
    return RealField(grid, fd4_first(grid, f.values(), axis));
  }
  const ComplexField lifted(grid, f.values().cast<Complex>());
  return RealField(grid, partial_derivative(lifted, axis, scheme).values().real());
}

RealField divergence(const VectorField& v, DerivativeScheme scheme) {
  const Grid& grid = v.grid();
  Eigen::ArrayXd sum = Eigen::ArrayXd::Zero(v.size());
  for (int d = 0; d < grid.dims(); ++d) {
    sum += partial_derivative(RealField(grid, v.component(d)), d, scheme).values();
  }
  return RealField(grid, sum);
}

}  // namespace dmbohm
