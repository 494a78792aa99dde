#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "dmbohm/error.hpp"

namespace dmbohm::finite {

template <typename Real>
using MatrixC = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using VectorC = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

inline constexpr Eigen::Index kMaxDim = 64;

/// Hermitian, unit-trace, positive semidefinite operator on a space of dim <= 64.
template <typename Real = double>
class DensityOperator {
 public:
  using Matrix = MatrixC<Real>;

  /// Validates within `tol` (default 1e-12) and throws BadState otherwise.
  explicit DensityOperator(Matrix m, Real tol = Real(1e-12)) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() < 1 || m_.rows() > kMaxDim) {
      throw Error(ErrorCode::DimMismatch, "density operator must be square with 1 <= dim <= 64");
    }
    if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > tol) {
      throw Error(ErrorCode::BadState, "density operator is not Hermitian");
    }
    if (std::abs(m_.trace() - std::complex<Real>(1)) > tol) {
      throw Error(ErrorCode::BadState, "density operator trace is not 1");
    }
    const Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol) {
      throw Error(ErrorCode::BadState, "density operator has a negative eigenvalue");
    }
  }

  Eigen::Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }

 private:
  Matrix m_;
};

template <typename Real = double>
struct WeightedState {
  Real probability;
  VectorC<Real> state;
};

template <typename Real = double>
using WeightedStateList = std::vector<WeightedState<Real>>;

/// rho = sum_i p_i |Phi_i><Phi_i|.
template <typename Real>
DensityOperator<Real> ensemble_to_density(const WeightedStateList<Real>& ensemble, Real tol = Real(1e-12)) {
  if (ensemble.empty()) throw Error(ErrorCode::BadEnsemble, "empty ensemble");
  const Eigen::Index dim = ensemble.front().state.size();
  MatrixC<Real> rho = MatrixC<Real>::Zero(dim, dim);
  Real total = 0;
  for (const auto& [p, phi] : ensemble) {
    if (phi.size() != dim) throw Error(ErrorCode::BadEnsemble, "ensemble states differ in dimension");
    if (p < Real(0) || p > Real(1)) throw Error(ErrorCode::BadEnsemble, "probability outside [0,1]");
    if (std::abs(phi.squaredNorm() - Real(1)) > tol) throw Error(ErrorCode::BadEnsemble, "state not normalized");
    rho += p * phi * phi.adjoint();
    total += p;
  }
  if (std::abs(total - Real(1)) > tol) throw Error(ErrorCode::BadEnsemble, "probabilities do not sum to 1");
  return DensityOperator<Real>(std::move(rho), tol);
}

template <typename Real>
DensityOperator<Real> pure_state(const VectorC<Real>& phi) {
  return ensemble_to_density<Real>({{Real(1), phi}});
}

/// p(a) = tr(rho |A><A|) = <A|rho|A>.
template <typename Real>
Real outcome_probability(const DensityOperator<Real>& rho, const VectorC<Real>& a) {
  if (a.size() != rho.dim()) throw Error(ErrorCode::DimMismatch, "outcome vector dimension");
  const Real p = (a.adjoint() * rho.matrix() * a)(0, 0).real();
  return std::clamp(p, Real(0), Real(1));
}

/// S = -tr(rho ln rho), with 0 ln 0 = 0.
template <typename Real>
Real von_neumann_entropy(const DensityOperator<Real>& rho) {
  const Eigen::SelfAdjointEigenSolver<MatrixC<Real>> es(rho.matrix(), Eigen::EigenvaluesOnly);
  Real s = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const Real lambda = es.eigenvalues()[i];
    if (lambda > Real(0)) s -= lambda * std::log(lambda);
  }
  return std::max(s, Real(0));
}

/// Kronecker product a (x) b, with joint index i * dim(b) + j.
template <typename Real>
MatrixC<Real> kron(const MatrixC<Real>& a, const MatrixC<Real>& b) {
  MatrixC<Real> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

template <typename Real>
VectorC<Real> kron(const VectorC<Real>& a, const VectorC<Real>& b) {
  VectorC<Real> out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a[i] * b;
  return out;
}

template <typename Real>
DensityOperator<Real> tensor(const DensityOperator<Real>& a, const DensityOperator<Real>& b) {
  return DensityOperator<Real>(kron<Real>(a.matrix(), b.matrix()));
}

/// Reduced operator of subsystem `keep` (0 or 1) for a joint space of dims (d1, d2).
template <typename Real>
DensityOperator<Real> partial_trace(const DensityOperator<Real>& joint, Eigen::Index d1, Eigen::Index d2, int keep) {
  if (d1 < 1 || d2 < 1 || d1 * d2 != joint.dim()) throw Error(ErrorCode::DimMismatch, "subsystem dims");
  if (keep != 0 && keep != 1) throw Error(ErrorCode::DimMismatch, "keep must be 0 or 1");
  const auto& m = joint.matrix();
  if (keep == 0) {
    MatrixC<Real> out = MatrixC<Real>::Zero(d1, d1);
    for (Eigen::Index i = 0; i < d1; ++i)
      for (Eigen::Index k = 0; k < d1; ++k)
        for (Eigen::Index j = 0; j < d2; ++j) out(i, k) += m(i * d2 + j, k * d2 + j);
    return DensityOperator<Real>(std::move(out));
  }
  MatrixC<Real> out = MatrixC<Real>::Zero(d2, d2);
  for (Eigen::Index j = 0; j < d2; ++j)
    for (Eigen::Index l = 0; l < d2; ++l)
      for (Eigen::Index i = 0; i < d1; ++i) out(j, l) += m(i * d2 + j, i * d2 + l);
  return DensityOperator<Real>(std::move(out));
}

/// Eigen-decomposition as a weighted list of orthonormal states, heaviest first.
///
/// Weights below `drop_below` are discarded. Inside a degenerate eigenspace the
/// returned vectors are only guaranteed orthonormal.
template <typename Real>
WeightedStateList<Real> diagonalize(const DensityOperator<Real>& rho, Real drop_below = Real(1e-12)) {
  const Eigen::SelfAdjointEigenSolver<MatrixC<Real>> es(rho.matrix());
  WeightedStateList<Real> out;
  for (Eigen::Index i = es.eigenvalues().size() - 1; i >= 0; --i) {
    const Real w = es.eigenvalues()[i];
    if (w < drop_below) continue;
    out.push_back({w, es.eigenvectors().col(i)});
  }
  return out;
}

/// Rebuild sum_a w_a |phi_a><phi_a| without re-normalizing the weights.
template <typename Real>
MatrixC<Real> reconstruct(const WeightedStateList<Real>& list, Eigen::Index dim) {
  MatrixC<Real> m = MatrixC<Real>::Zero(dim, dim);
  for (const auto& [w, phi] : list) m += w * phi * phi.adjoint();
  return m;
}

template <typename Real>
Real max_abs_difference(const DensityOperator<Real>& a, const DensityOperator<Real>& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimMismatch, "operator dimensions differ");
  return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
}

/// Computational basis vector |i> of a dim-dimensional space.
template <typename Real = double>
VectorC<Real> basis(Eigen::Index dim, Eigen::Index i) {
  VectorC<Real> v = VectorC<Real>::Zero(dim);
  v[i] = Real(1);
  return v;
}

/// The three two-level ensembles that all yield rho = I/2:
/// {|0>,|1>}, {|u>,|v>} with u,v = (|0> +- |1>)/sqrt 2, and all four at 1/4.
template <typename Real = double>
std::vector<WeightedStateList<Real>> half_identity_ensembles() {
  const VectorC<Real> zero = basis<Real>(2, 0);
  const VectorC<Real> one = basis<Real>(2, 1);
  const Real r = Real(1) / std::sqrt(Real(2));
  const VectorC<Real> u = r * (zero + one);
  const VectorC<Real> v = r * (zero - one);
  const Real half = Real(1) / Real(2);
  const Real quarter = Real(1) / Real(4);
  return {
      {{half, zero}, {half, one}},
      {{half, u}, {half, v}},
      {{quarter, zero}, {quarter, one}, {quarter, u}, {quarter, v}},
  };
}

}  // namespace dmbohm::finite
