#pragma once

#include <memory>
#include <vector>

#include "dmbohm/grid.hpp"

namespace dmbohm {

enum class DerivativeScheme {
  Spectral,           // Fourier differentiation on the periodic grid
  FiniteDifference4,  // 4th-order central differences, periodic wrap
};

/// FFTW plans and wavenumber tables for one grid shape.
///
/// Transforms copy through plan-owned buffers, so inputs of any alignment are
/// accepted and a given input always takes the same code path. Not thread-safe;
/// use one instance per thread (see spectral_plan()).
class SpectralPlan {
 public:
  explicit SpectralPlan(const Grid& grid);
  ~SpectralPlan();
  SpectralPlan(const SpectralPlan&) = delete;
  SpectralPlan& operator=(const SpectralPlan&) = delete;

  const Grid& grid() const;

  /// Unnormalized forward DFT.
  void forward(const Eigen::ArrayXcd& in, Eigen::ArrayXcd& out) const;
  /// Inverse DFT including the 1/N factor.
  void inverse(const Eigen::ArrayXcd& in, Eigen::ArrayXcd& out) const;

  /// Angular wavenumber along axis d for every flat spectral index.
  const Eigen::ArrayXd& wavenumbers(int d) const;
  /// Same, with the Nyquist mode zeroed (odd-order derivatives).
  const Eigen::ArrayXd& derivative_wavenumbers(int d) const;
  /// i times derivative_wavenumbers(d).
  const Eigen::ArrayXcd& derivative_factor(int d) const;
  /// |k|^2 summed over axes.
  const Eigen::ArrayXd& wavenumber_squared() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Per-thread cached plan for the grid's shape.
const SpectralPlan& spectral_plan(const Grid& grid);

ComplexField partial_derivative(const ComplexField& f, int axis,
                                DerivativeScheme scheme = DerivativeScheme::Spectral);
RealField partial_derivative(const RealField& f, int axis, DerivativeScheme scheme = DerivativeScheme::Spectral);

std::vector<ComplexField> gradient(const ComplexField& f, DerivativeScheme scheme = DerivativeScheme::Spectral);
std::vector<RealField> gradient(const RealField& f, DerivativeScheme scheme = DerivativeScheme::Spectral);
RealField laplacian(const RealField& f, DerivativeScheme scheme = DerivativeScheme::Spectral);
RealField divergence(const VectorField& v, DerivativeScheme scheme = DerivativeScheme::Spectral);

}  // namespace dmbohm
