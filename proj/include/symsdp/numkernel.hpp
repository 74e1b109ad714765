#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "symsdp/error.hpp"

namespace symsdp {

inline constexpr double kDefaultClusterTol = 1e-7;

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// One eigenvalue cluster: columns of basis are Euclidean-orthonormal.
template <typename Scalar> struct EigenCluster {
  double value;
  DenseMatrix<Scalar> basis;

  std::size_t multiplicity() const noexcept { return std::size_t(basis.cols()); }
};

template <typename Scalar> struct HermitianSpectrum {
  std::vector<EigenCluster<Scalar>> clusters; // ascending by value

  std::size_t dimension() const noexcept {
    std::size_t total = 0;
    for (const auto &c : clusters)
      total += c.multiplicity();
    return total;
  }

  /// sum over clusters of value * (orthogonal projector onto the cluster).
  DenseMatrix<Scalar> reconstruct() const {
    const auto n = Eigen::Index(dimension());
    DenseMatrix<Scalar> out = DenseMatrix<Scalar>::Zero(n, n);
    for (const auto &c : clusters)
      out.noalias() += Scalar(c.value) * c.basis * c.basis.adjoint();
    return out;
  }
};

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived> &h, double rel_tol = 1e-12) {
  if (h.rows() != h.cols())
    return false;
  if (h.size() == 0)
    return true;
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  return (h - h.adjoint()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

/// Eigendecomposition of a Hermitian matrix; eigenvalues whose consecutive
/// gaps are at most cluster_tol share a cluster.
template <typename Derived>
HermitianSpectrum<typename Derived::Scalar>
hermitian_eig(const Eigen::MatrixBase<Derived> &h, double cluster_tol = kDefaultClusterTol) {
  using Scalar = typename Derived::Scalar;
  if (!(cluster_tol > 0.0))
    throw Error(ErrorKind::Contract, "cluster tolerance must be positive");
  if (!is_hermitian(h))
    throw Error(ErrorKind::Contract, "hermitian_eig: input is not Hermitian");

  const DenseMatrix<Scalar> sym = (h + h.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> solver(sym);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::Numeric, "hermitian_eig: QR iteration did not converge after " +
                                        std::to_string(30 * h.rows()) + " iterations");

  const auto &values = solver.eigenvalues();
  const auto &vectors = solver.eigenvectors();
  HermitianSpectrum<Scalar> spectrum;
  Eigen::Index start = 0;
  const Eigen::Index n = values.size();
  for (Eigen::Index i = 1; i <= n; ++i) {
    if (i == n || values[i] - values[i - 1] > cluster_tol) {
      const Eigen::Index count = i - start;
      spectrum.clusters.push_back({values.segment(start, count).mean(), vectors.middleCols(start, count)});
      start = i;
    }
  }
  return spectrum;
}

/// Gram-Schmidt over the columns of vectors under (f, g) = weight * sum f conj(g).
/// Two passes of modified Gram-Schmidt per column.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> orthonormalize(const Eigen::MatrixBase<Derived> &vectors,
                                                     double weight, double dependence_tol = 1e-10) {
  using Scalar = typename Derived::Scalar;
  if (!(weight > 0.0))
    throw Error(ErrorKind::Contract, "inner product weight must be positive");
  DenseMatrix<Scalar> q = vectors;
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    const double original = std::sqrt(weight) * q.col(j).norm();
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index i = 0; i < j; ++i) {
        const Scalar proj = weight * q.col(i).dot(q.col(j)); // conj(q_i) . q_j
        q.col(j) -= proj * q.col(i);
      }
    const double norm = std::sqrt(weight) * q.col(j).norm();
    if (!(norm > dependence_tol * std::max(original, 1e-300)) || original == 0.0)
      throw DependentInputError(std::size_t(j));
    q.col(j) /= norm;
  }
  return q;
}

/// Weighted Gram matrix weight * V^* V.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> weighted_gram(const Eigen::MatrixBase<Derived> &vectors,
                                                    double weight) {
  return weight * (vectors.adjoint() * vectors);
}

} // namespace symsdp
