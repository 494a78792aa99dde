#pragma once

#include "dmbohm/grid.hpp"
#include "dmbohm/spectral.hpp"

namespace dmbohm {

/// Normalized Gaussian exp(-(x-c)^2/(4 sigma^2)) exp(i k.x), product form in 2D.
///
/// sigma is the standard deviation of |psi|^2. Throws BadParam for
/// non-positive widths or an off-grid centre, and BoundaryLeak when the
/// boundary density exceeds 1e-8 of the peak.
ComplexField gaussian_packet(const Grid& grid, const Point& center, const Point& sigma, const Point& momentum);
ComplexField gaussian_packet(const Grid& grid, const Point& center, double sigma, const Point& momentum);

/// Tensor product a(x) b(y) of two 1D fields onto the plane spanned by their axes.
ComplexField tensor_product(const ComplexField& first, const ComplexField& second);

/// |psi|^2 pointwise.
RealField density(const ComplexField& f);

/// Im(conj(psi) grad psi), which equals R^2 grad S without unwrapping any phase.
VectorField branch_current(const ComplexField& f, DerivativeScheme scheme = DerivativeScheme::Spectral);

/// Sum of conj(a) b times the cell volume.
Complex overlap(const ComplexField& a, const ComplexField& b);

/// Integral of |a||b|; vanishes only for disjoint supports.
double superorthogonality_measure(const ComplexField& a, const ComplexField& b);

double norm_squared(const ComplexField& f);
ComplexField normalized(const ComplexField& f);

double integrate(const RealField& f);

/// Largest boundary-node density relative to the peak density.
double edge_density_ratio(const ComplexField& f);
double edge_density_ratio(const RealField& density);

/// e^{i theta}, exact for integer multiples of pi/2 so quarter-turn phases
/// commute bitwise with every later linear operation.
Complex unit_phase(double theta);

}  // namespace dmbohm
