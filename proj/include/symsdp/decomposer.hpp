#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "symsdp/permgroup.hpp"
#include "symsdp/types.hpp"

namespace symsdp {

/// An irreducible G-subspace of C^X. Columns of basis are orthonormal under
/// (f, g) = (1/|X|) sum f(x) conj(g(x)).
struct IrreducibleSpace {
  CMatrix basis;

  std::size_t dimension() const noexcept { return std::size_t(basis.cols()); }
};

/// One isotypic component: m spaces of dimension h, bases aligned by
/// G-isometries from spaces[0].
struct IsotypicBlock {
  std::size_t h = 0;
  std::size_t m = 0;
  std::vector<IrreducibleSpace> spaces;
};

/// The decomposition of C^X and its matrix-unit basis
/// E_{k,i,j}(x, y) = (1/|X|) sum_l e_{k,i,l}(x) conj(e_{k,j,l}(y)).
class Decomposition {
public:
  /// Builds E from the aligned bases.
  Decomposition(std::size_t domain_size, std::vector<IsotypicBlock> blocks);
  /// Uses the supplied E matrices, indexed by tuple_index.
  Decomposition(std::size_t domain_size, std::vector<IsotypicBlock> blocks,
                std::vector<CMatrix> e_matrices);

  std::size_t domain_size() const noexcept { return domain_size_; }
  const std::vector<IsotypicBlock> &blocks() const noexcept { return blocks_; }
  std::size_t block_count() const noexcept { return blocks_.size(); }
  std::size_t h(std::size_t k) const { return blocks_.at(k).h; }
  std::size_t m(std::size_t k) const { return blocks_.at(k).m; }

  /// Number of (k, i, j) tuples, sum_k m_k^2.
  std::size_t tuple_count() const noexcept { return e_.size(); }
  std::size_t tuple_index(std::size_t k, std::size_t i, std::size_t j) const {
    return offsets_.at(k) + i * blocks_[k].m + j;
  }
  const CMatrix &E(std::size_t k, std::size_t i, std::size_t j) const { return e_[tuple_index(k, i, j)]; }
  const std::vector<CMatrix> &e_matrices() const noexcept { return e_; }

private:
  void index_tuples();

  std::size_t domain_size_;
  std::vector<IsotypicBlock> blocks_;
  std::vector<std::size_t> offsets_;
  std::vector<CMatrix> e_;
};

/// phi(B_r) for every orbit r: one m_k x m_k matrix of p_r(k, i, j) per block.
class BlockImage {
public:
  BlockImage(std::vector<std::size_t> block_sizes, std::vector<std::vector<CMatrix>> per_orbit);

  std::size_t orbit_count() const noexcept { return blocks_.size(); }
  std::size_t block_count() const noexcept { return sizes_.size(); }
  const std::vector<std::size_t> &block_sizes() const noexcept { return sizes_; }
  const CMatrix &operator()(std::size_t r, std::size_t k) const { return blocks_.at(r).at(k); }

  /// sum_r y_r phi(B_r), one matrix per block.
  std::vector<CMatrix> apply(const CVector &y) const;

private:
  std::vector<std::size_t> sizes_;
  std::vector<std::vector<CMatrix>> blocks_;
};

struct DecomposeOptions {
  std::uint64_t seed = 42;
  double tol = 1e-8;                  // verification threshold
  double cluster_tol = 1e-7;          // eigenvalue clustering
  double intertwiner_tol = 1e-6;      // relative norm below which an averaged map is zero
  int max_retries = 5;
  bool verify = true;
  bool prefer_real = true;            // try a real orthogonal decomposition first
};

/// Coefficients of a random Hermitian element of span{B_r}: uniform(-1, 1)
/// per self-paired orbit, uniform complex per transpose pair with
/// y_{r'} = conj(y_r). With real set the pair shares one real value.
CVector random_hermitian_coefficients(const PairOrbits &orbits, std::uint64_t seed, bool real = false);

CMatrix random_invariant_hermitian(const PairOrbits &orbits, std::uint64_t seed);

/// Matrix of a acting on span(space) in its own coordinates.
CMatrix restricted_action(const IrreducibleSpace &space, const Permutation &a);

/// Averaged random map from `from` to `to`, normalized to a unitary G-isometry
/// with its first nonzero entry real positive, or nullopt when the averaged map
/// vanishes (inequivalent spaces).
std::optional<CMatrix> intertwiner(const GroupAction &action, const IrreducibleSpace &from,
                                   const IrreducibleSpace &to, std::uint64_t seed,
                                   double tol = 1e-6, bool real = false);

/// True when the averaged self-intertwiner space is one-dimensional.
bool is_irreducible(const GroupAction &action, const IrreducibleSpace &space, std::uint64_t seed,
                    double tol = 1e-6, bool real = false);

/// The randomized pipeline: eigenspaces of one random invariant Hermitian
/// matrix, irreducibility check with reseeding and refinement, equivalence
/// classes by intertwiners, aligned bases, E-basis, verification.
/// With prefer_real, a single real symmetric sample is tried first; it
/// succeeds exactly when every eigenspace it yields is irreducible, and the
/// result then has real E matrices. Otherwise the complex pipeline runs.
/// Throws DegenerateSample or VerificationError.
Decomposition decompose(const GroupAction &action, const PairOrbits &orbits,
                        const DecomposeOptions &options = {});

/// q_{k,i,j}(r) = |X| E_{k,i,j}(x_r, y_r); rows are tuples, columns orbits.
CMatrix q_values(const Decomposition &decomposition, const PairOrbits &orbits);

/// p_r(k,i,j) = v_r conj(q_{k,i,j}(r)) / (|X| h_k). Throws VerificationError
/// when the reconstruction residual exceeds tol.
BlockImage coefficients_p(const Decomposition &decomposition, const PairOrbits &orbits,
                          double tol = 1e-6);

/// max ||E_{k,i,j} E_{k',i',j'} - delta delta E_{k,i,j'}||_F.
double verify_multiplication(const Decomposition &decomposition);

/// max |sum_r v_r q q'^* - delta delta delta |X|^2 h_k| / (|X|^2 h_k).
double verify_orthogonality(const Decomposition &decomposition, const PairOrbits &orbits);

/// max_r ||sum p_r(k,i,j) E_{k,i,j} - B_r||_F.
double reconstruction_residual(const Decomposition &decomposition, const BlockImage &image,
                               const PairOrbits &orbits);

/// max over generators a and tuples of ||P_a E P_a^{-1} - E||_F.
double commutant_residual(const Decomposition &decomposition, const GroupAction &action);

/// max ||E_{k,j,i} - E_{k,i,j}^*||_F.
double adjoint_residual(const Decomposition &decomposition);

/// max |trace E_{k,i,i} - h_k| together with ||E_{k,i,i}^2 - E_{k,i,i}||_F.
double idempotent_residual(const Decomposition &decomposition);

/// Random Hermitian y over the orbit basis; compares the sorted spectrum of
/// sum y_r B_r with the h_k-replicated block spectra. Returns the max mismatch.
double spectrum_preservation_check(const Decomposition &decomposition, const BlockImage &image,
                                   const PairOrbits &orbits, int trials, std::uint64_t seed);

/// Sorted eigenvalues of sum y_r phi(B_r) with each block's spectrum
/// repeated by its h_k.
RVector replicated_block_spectrum(const BlockImage &image, const std::vector<std::size_t> &dims,
                                  const CVector &y);

/// Structure constants of the orbit algebra recovered through phi:
/// phi(B_r) phi(B_s) expanded in {phi(B_t)}, stored at [(r*N + s)*N + t].
std::vector<Complex> structure_constants(const BlockImage &image);

struct DecompositionReport {
  double multiplication = 0;
  double orthogonality = 0;
  double reconstruction = 0;
  double commutant = 0;
  double adjoint = 0;
  double idempotent = 0;

  double max() const;
};

DecompositionReport verify_decomposition(const Decomposition &decomposition,
                                         const BlockImage &image, const GroupAction &action,
                                         const PairOrbits &orbits);

} // namespace symsdp
