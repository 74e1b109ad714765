#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "symsdp/decomposer.hpp"
#include "symsdp/exact.hpp"
#include "symsdp/permgroup.hpp"

// Closed-form block diagonalization of the Terwilliger algebra of the binary
// Hamming scheme: the commutant of S_n acting on {0,1}^n by permuting
// coordinates. Everything here is exact; square roots are carried as
// rational * sqrt(square-free integer).
//
// Pair orbits are triples (r, s, d): x has weight r, y has weight s and
// d = v(x, y) = |{l : x_l = 1, y_l = 0}|. Blocks are k = 0..floor(n/2) with
// row/column labels i, j = k..n-k.
namespace symsdp::terwilliger {

inline constexpr int kTableCap = 12;
inline constexpr int kMatrixCap = 8;
inline constexpr int kExactVerifyCap = 6;

/// C(n, k), zero outside 0 <= k <= n.
Integer binomial(long n, long k);

/// Rising factorial (a)_k = a (a+1) ... (a+k-1), (a)_0 = 1.
Rational pochhammer(const Rational &a, unsigned k);

/// Q_k(x; -a-1, -b-1, m) for a >= m, b >= m >= 0, 0 <= k, x <= m. Throws Domain.
Rational hahn_Q(int k, int a, int b, int m, int x);

/// The same hypergeometric sum on the wider domain where it stays finite:
/// 0 <= k <= min(m, a, b), 0 <= x <= m.
Rational hahn_Q_extended(int k, int a, int b, int m, int x);

struct HahnCheck {
  bool ok = true;
  int k = -1; // witness pair when !ok
  int l = -1;
  Rational value;
};

/// sum_x C(a,x) C(b,m-x) Q_k(x) Q_l(x) == 0 for all k < l <= m.
HahnCheck hahn_orthogonality_check(int a, int b, int m);

struct BlockDims {
  std::vector<std::int64_t> h; // h_k = C(n,k) - C(n,k-1)
  std::vector<std::int64_t> m; // m_k = n - 2k + 1
};

BlockDims dims(int n);

struct OrbitTriple {
  int r = 0;
  int s = 0;
  int d = 0;
  Integer size;
};

/// v_{r,s,d} = C(n,d) C(n-d, r-d) C(n-r, s-r+d).
Integer triple_size(int n, int r, int s, int d);

/// All (r,s,d) with 0 <= d <= r <= n and 0 <= s-r+d <= n-r, sorted.
std::vector<OrbitTriple> orbit_triples(int n);

/// v(x, y) for points encoded as bit masks.
inline int v_count(std::uint64_t x, std::uint64_t y) { return __builtin_popcountll(x & ~y); }

/// E_{k,i,j}(x, y) for x in X_i, y in X_j with v(x, y) = d, before any sign
/// adjustment. Valid for k <= i, j <= n-k; i > j is served through
/// E_{k,i,j} = E_{k,j,i}^t.
QuadExact E_analytic(int n, int k, int i, int j, int d);

/// p_{r,s,d}(k,i,j) = v_{r,s,d} E_{k,i,j}(x, y) / h_k, zero unless (r,s) = (i,j).
QuadExact p_analytic(int n, int r, int s, int d, int k, int i, int j);

struct SignFlip {
  int k, i, j;
};

struct TerwilligerTables {
  int n = 0;
  std::vector<OrbitTriple> triples;
  BlockDims block_dims;
  std::map<std::tuple<int, int, int, int>, QuadExact> e_entries; // (k,i,j,d), i <= j
  std::map<std::array<int, 6>, QuadExact> p_coeffs;              // (r,s,d,k,i,j), nonzero pattern
  std::vector<SignFlip> sign_flips;

  /// E_{k,i,j} at v(x,y) = d for any i, j (transpose rule for i > j).
  QuadExact entry(int k, int i, int j, int d) const;
  /// p_{r,s,d}(k,i,j); zero outside the stored pattern.
  QuadExact p(int r, int s, int d, int k, int i, int j) const;
};

/// Full tables with the sign-fixing pass applied. Throws ResourceLimit for
/// n > kTableCap.
TerwilligerTables assemble_exact_decomposition(int n);

/// E_{k,i,j} restricted to its support X_i x X_j, as coefficients * sqrt(radicand).
struct ExactEMatrix {
  int k = 0, i = 0, j = 0;
  Integer radicand = 1;
  std::vector<std::uint64_t> rows; // points of X_i, ascending
  std::vector<std::uint64_t> cols; // points of X_j, ascending
  std::vector<Rational> coefficients; // row-major

  const Rational &coefficient(std::size_t row, std::size_t col) const {
    return coefficients[row * cols.size() + col];
  }
};

/// Throws ResourceLimit for n > kMatrixCap.
ExactEMatrix exact_E_matrix(const TerwilligerTables &tables, int k, int i, int j);

struct ExactCheck {
  bool passed = true;
  std::size_t checked = 0;
  std::string witness; // first failing identity
};

/// E_{k,i,j} E_{k',i',j'} = delta delta E_{k,i,j'} on full matrices, exactly.
/// Throws ResourceLimit for n > kMatrixCap.
ExactCheck exact_multiplication_check(const TerwilligerTables &tables);

/// sum v q q' = delta delta delta 4^n h_k with q = 2^n E.
ExactCheck exact_orthogonality_check(const TerwilligerTables &tables);

/// sum_k p_{r,s,d}(k,r,s) E_{k,r,s}(d') = [d' == d] for every triple.
ExactCheck exact_reconstruction_check(const TerwilligerTables &tables);

/// C(n,j) E_{k,j,j}(d = 0) = h_k.
ExactCheck exact_trace_check(const TerwilligerTables &tables);

/// phi(B_r) in the numeric orbit numbering of hamming_group(n).
BlockImage analytic_block_image(const TerwilligerTables &tables, const PairOrbits &orbits);

/// Block dims of the numeric pipeline's conventions: h per block.
std::vector<std::size_t> analytic_block_h(const TerwilligerTables &tables);

struct CrossValidationReport {
  int n = 0;
  bool dims_match = false;
  std::vector<std::pair<std::size_t, std::size_t>> numeric_dims;  // (h, m)
  std::vector<std::pair<std::size_t, std::size_t>> analytic_dims; // (h, m)
  double structure_residual = 0;        // numeric phi vs analytic phi
  double structure_direct_residual = 0; // analytic phi vs direct counting
  double spectrum_residual = 0;
  double tol = 1e-7;
  bool passed = false;
  std::string detail;
};

/// Runs the numeric decomposer on the Hamming action and compares it with
/// the analytic tables. Throws ResourceLimit for n > kExactVerifyCap.
CrossValidationReport cross_validate(int n, std::uint64_t seed, double tol = 1e-7);

} // namespace symsdp::terwilliger
