#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "matcon/tolerances.hpp"
#include "matcon/types.hpp"

namespace matcon {

/// Eigenpairs of a symmetric matrix, eigenvalues ascending.
template <typename Scalar>
struct SpectrumReport {
  Vector<Scalar> eigenvalues;
  Matrix<Scalar> eigenvectors;
};

enum class Definiteness { PositiveDefinite, PositiveSemiDefinite, Zero, Indefinite };

constexpr std::string_view to_string(Definiteness c) {
  switch (c) {
    case Definiteness::PositiveDefinite: return "PD";
    case Definiteness::PositiveSemiDefinite: return "PSD";
    case Definiteness::Zero: return "Zero";
    case Definiteness::Indefinite: return "Indefinite";
  }
  return "Unknown";
}

template <typename Scalar>
struct NullSpaceReport {
  Matrix<Scalar> basis;  // orthonormal columns
  Index dimension = 0;
  bool equals_consensus = false;
  Scalar threshold = 0;  // eigenvalue cut actually applied
};

template <typename Derived>
typename Derived::Scalar max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? typename Derived::Scalar(0) : m.cwiseAbs().maxCoeff();
}

template <typename Derived>
bool is_symmetric(const Eigen::MatrixBase<Derived>& m, typename Derived::Scalar rel) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() != m.cols()) return false;
  const Scalar skew = max_abs(m - m.transpose());
  return skew <= rel * std::max(Scalar(1), max_abs(m));
}

template <typename Scalar>
SpectrumReport<Scalar> symmetric_eigen(const Matrix<Scalar>& m,
                                       const Tolerances<Scalar>& tol = {}) {
  if (!is_symmetric(m, tol.symmetry))
    throw Error(ErrorCode::NotSymmetric, "matrix is not symmetric within tolerance");
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(m);
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// PD if lambda_min > tol; Zero if max|lambda| <= tol; PSD if lambda_min >= -tol.
template <typename Scalar>
Definiteness classify_definiteness(const Matrix<Scalar>& w, Scalar tol) {
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(w, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  const Scalar lo = ev.minCoeff();
  const Scalar hi = ev.maxCoeff();
  if (lo > tol) return Definiteness::PositiveDefinite;
  if (std::max(std::abs(lo), std::abs(hi)) <= tol) return Definiteness::Zero;
  if (lo >= -tol) return Definiteness::PositiveSemiDefinite;
  return Definiteness::Indefinite;
}

/// Orthonormal basis of range(1_n (x) I_d).
template <typename Scalar>
Matrix<Scalar> consensus_basis(const GraphDimensions& dims) {
  Matrix<Scalar> r = Matrix<Scalar>::Zero(dims.size(), dims.d);
  const Scalar scale = Scalar(1) / std::sqrt(Scalar(dims.n));
  for (Index i = 0; i < dims.n; ++i) r.block(i * dims.d, 0, dims.d, dims.d).diagonal().setConstant(scale);
  return r;
}

template <typename Scalar>
NullSpaceReport<Scalar> null_space_basis(const Matrix<Scalar>& m, const GraphDimensions& dims,
                                         const Tolerances<Scalar>& tol = {}) {
  if (m.rows() != dims.size() || m.cols() != dims.size())
    throw Error(ErrorCode::DimensionMismatch, "matrix size does not match d*n");
  const auto spec = symmetric_eigen(m, tol);
  const Scalar lambda_max = spec.eigenvalues(spec.eigenvalues.size() - 1);
  const Scalar threshold = tol.null_space * std::max(Scalar(1), std::abs(lambda_max));
  if (spec.eigenvalues(0) < -threshold)
    throw Error(ErrorCode::NotPSD, "matrix has a negative eigenvalue beyond tolerance");

  NullSpaceReport<Scalar> out;
  out.threshold = threshold;
  Index k = 0;
  while (k < spec.eigenvalues.size() && spec.eigenvalues(k) <= threshold) ++k;
  out.dimension = k;
  out.basis = spec.eigenvectors.leftCols(k);

  // With dimension == d, containing R forces equality.
  if (k == dims.d) {
    const Matrix<Scalar> residual = m * consensus_basis<Scalar>(dims);
    out.equals_consensus = true;
    for (Index c = 0; c < residual.cols(); ++c)
      if (residual.col(c).norm() > threshold) out.equals_consensus = false;
  }
  return out;
}

/// A unit null vector of the reported space orthogonal to R, if one exists.
template <typename Scalar>
std::optional<Vector<Scalar>> obstruction_witness(const NullSpaceReport<Scalar>& report,
                                                  const GraphDimensions& dims) {
  if (report.equals_consensus || report.dimension == 0) return std::nullopt;
  const Matrix<Scalar> r = consensus_basis<Scalar>(dims);
  const Matrix<Scalar> off = report.basis - r * (r.transpose() * report.basis);
  Eigen::JacobiSVD<Matrix<Scalar>> svd(off, Eigen::ComputeThinU);
  if (svd.singularValues().size() == 0 || svd.singularValues()(0) <= Scalar(1e-6))
    return std::nullopt;
  Vector<Scalar> eta = svd.matrixU().col(0);
  // sign convention: largest-magnitude entry positive
  Index arg = 0;
  eta.cwiseAbs().maxCoeff(&arg);
  if (eta(arg) < 0) eta = -eta;
  return eta;
}

/// e^{-t * spectrum} reassembled from a precomputed eigendecomposition.
template <typename Scalar>
Matrix<Scalar> exponential_from_spectrum(const SpectrumReport<Scalar>& spec, Scalar t) {
  if (t < 0) throw Error(ErrorCode::NegativeDuration, "duration must be non-negative");
  const Vector<Scalar> decay = (-t * spec.eigenvalues.array()).exp().matrix();
  return spec.eigenvectors * decay.asDiagonal() * spec.eigenvectors.transpose();
}

/// e^{-M t} for symmetric M via its eigendecomposition.
template <typename Scalar>
Matrix<Scalar> matrix_exponential_symmetric(const Matrix<Scalar>& m, Scalar t,
                                            const Tolerances<Scalar>& tol = {}) {
  if (t < 0) throw Error(ErrorCode::NegativeDuration, "duration must be non-negative");
  if (t == 0) {
    if (!is_symmetric(m, tol.symmetry))
      throw Error(ErrorCode::NotSymmetric, "matrix is not symmetric within tolerance");
    return Matrix<Scalar>::Identity(m.rows(), m.cols());
  }
  return exponential_from_spectrum(symmetric_eigen(m, tol), t);
}

/// Minimum and maximum of x^T M x / x^T x over span(basis), where the basis
/// columns are orthonormal eigenvectors of M.
template <typename Scalar>
std::pair<Scalar, Scalar> rayleigh_extremes(const Matrix<Scalar>& m, const Matrix<Scalar>& basis,
                                            const Tolerances<Scalar>& tol = {}) {
  if (basis.rows() != m.rows() || basis.cols() == 0)
    throw Error(ErrorCode::DimensionMismatch, "basis does not match matrix size");
  const Scalar scale = std::max(Scalar(1), max_abs(m));
  const Matrix<Scalar> gram = basis.transpose() * basis;
  if (max_abs(gram - Matrix<Scalar>::Identity(gram.rows(), gram.cols())) > tol.eigen * 100)
    throw Error(ErrorCode::NotEigenvectors, "basis is not orthonormal");
  for (Index c = 0; c < basis.cols(); ++c) {
    const Vector<Scalar> x = basis.col(c);
    const Scalar lambda = x.dot(m * x);
    if ((m * x - lambda * x).norm() > tol.eigen * 100 * scale)
      throw Error(ErrorCode::NotEigenvectors, "basis column is not an eigenvector");
  }
  const Matrix<Scalar> projected = basis.transpose() * m * basis;
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(
      Matrix<Scalar>((projected + projected.transpose()) / 2), Eigen::EigenvaluesOnly);
  return {solver.eigenvalues().minCoeff(), solver.eigenvalues().maxCoeff()};
}

}  // namespace matcon
