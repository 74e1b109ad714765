#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "symsdp/decomposer.hpp"
#include "symsdp/permgroup.hpp"
#include "symsdp/types.hpp"

// Reduction of a G-invariant SDP
//   max <C, Y>  s.t.  <A_i, Y> = b_i,  Y psd,   <M, Y> = trace(M Y),
// to orbit coefficients y_r (Y = sum y_r B_r) and block pencils
// sum y_r phi(B_r).
namespace symsdp {

/// Hermitian matrix stored by its entries; setting (x, y) also sets (y, x)
/// to the conjugate.
class SparseHermitian {
public:
  SparseHermitian() = default;
  explicit SparseHermitian(std::size_t dimension) : dim_(dimension) {}

  std::size_t dimension() const noexcept { return dim_; }
  /// Adds value at (x, y) and conj(value) at (y, x); a diagonal value must be real.
  void add(Index x, Index y, Complex value);
  const std::map<std::pair<Index, Index>, Complex> &entries() const noexcept { return entries_; }

  CMatrix dense() const;
  static SparseHermitian from_dense(const CMatrix &m, double drop_tol = 0.0);

private:
  std::size_t dim_ = 0;
  std::map<std::pair<Index, Index>, Complex> entries_;
};

struct SdpConstraint {
  SparseHermitian matrix;
  double rhs = 0.0;
};

struct InvariantSDP {
  std::string name;
  std::size_t domain_size = 0;
  SparseHermitian objective;
  std::vector<SdpConstraint> constraints;
};

struct InvarianceReport {
  std::vector<double> distances; // [0] objective, [1 + i] constraint i
  double max_distance = 0.0;
  bool invariant = true;
};

/// Frobenius distance of each data matrix to its group average.
InvarianceReport check_invariance(const InvariantSDP &sdp, const PairOrbits &orbits, double tol = 1e-10);

/// Replaces every data matrix by its group average.
InvariantSDP symmetrize(const InvariantSDP &sdp, const PairOrbits &orbits);

/// Orbit values of a sparse matrix: mean over each orbit.
CVector orbit_means(const SparseHermitian &m, const PairOrbits &orbits);

/// trace(M B_r) for every orbit, summed over the entries of M.
CVector trace_products(const SparseHermitian &m, const PairOrbits &orbits);

/// A real variable of a realified program: y_r itself (self-paired orbit),
/// or the real or imaginary part of y_r for a transpose pair r < r'.
struct RealVariable {
  enum class Kind { Self, RealPart, ImagPart };
  Kind kind = Kind::Self;
  std::size_t orbit = 0;
};

struct ReducedSDP {
  std::string name;
  std::size_t domain_size = 0;
  std::vector<std::size_t> orbit_sizes;
  std::vector<std::size_t> transpose_of;

  CVector objective;              // c_r = trace(C B_r)
  std::vector<CVector> rows;      // a_ir = trace(A_i B_r)
  std::vector<double> rhs;        // b_i
  CVector objective_values;       // C = sum gamma_r B_r
  std::vector<CVector> row_values; // A_i = sum alpha_ir B_r

  std::vector<std::size_t> block_dims;  // h_k
  std::vector<std::size_t> block_sizes; // pencil size per block
  std::vector<std::vector<CMatrix>> pencils; // [variable][block]

  bool realified = false;
  std::vector<RealVariable> variables; // realified only
  std::vector<bool> doubled;           // realified only: block embedded at 2m

  std::size_t variable_count() const noexcept { return pencils.size(); }
};

/// Throws Invariance when any data matrix is farther than tol from its
/// group average.
ReducedSDP reduce(const InvariantSDP &sdp, const PairOrbits &orbits, const Decomposition &decomposition,
                  const BlockImage &image, double tol = 1e-10);

/// Real form: transpose pairs become (Re, Im) variables and complex blocks
/// become [[Re, -Im], [Im, Re]]. Blocks with imaginary parts below 1e-10
/// keep size m.
ReducedSDP realify(const ReducedSDP &reduced);

struct SdpaEntry {
  int matrix = 0; // 0 = objective
  int block = 0;  // 1-based
  int row = 0;    // 1-based, row <= col
  int col = 0;
  double value = 0.0;

  friend bool operator==(const SdpaEntry &, const SdpaEntry &) = default;
};

/// max F_0 . Y  s.t.  F_i . Y = c_i,  Y = diag(Y_1, ..., Y_K) psd.
struct SdpaProblem {
  std::vector<int> block_sizes;
  std::vector<double> rhs;
  std::vector<SdpaEntry> entries;

  std::size_t constraint_count() const noexcept { return rhs.size(); }
  friend bool operator==(const SdpaProblem &, const SdpaProblem &) = default;
};

/// Block variables are Y_k = phi(Y)_k; F_{i,k} = h_k phi(A_i)_k, halved on
/// doubled blocks. Requires a realified program (Contract otherwise).
SdpaProblem to_sdpa(const ReducedSDP &reduced, double drop_tol = 1e-12);

/// SDPA sparse text, values printed with %.17g.
void write_sdpa(const SdpaProblem &problem, std::ostream &out);
void export_sdpa(const ReducedSDP &reduced, const std::filesystem::path &path);
SdpaProblem parse_sdpa(std::istream &in);

struct LiftReport {
  CMatrix Y;
  double min_eigenvalue = 0.0;
  std::vector<double> block_min_eigenvalues;
  Complex objective_full;    // <C, Y>
  Complex objective_reduced; // sum c_r y_r
  std::vector<double> constraint_residuals; // |<A_i, Y> - b_i|
  bool psd = false;
};

/// Checks y_{r'} = conj(y_r) (and y_r real on self-paired orbits) to
/// pairing_tol, assembles Y = sum y_r B_r, and compares the full and reduced
/// objective to 1e-8 (VerificationError otherwise).
LiftReport lift_solution(const CVector &y, const PairOrbits &orbits, const InvariantSDP &sdp,
                         const ReducedSDP &reduced, double psd_tol = 1e-8, double pairing_tol = 1e-12);

} // namespace symsdp
