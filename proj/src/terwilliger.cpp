#include "symsdp/terwilliger.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "symsdp/error.hpp"

namespace symsdp::terwilliger {

namespace {

std::vector<std::uint64_t> points_of_weight(int n, int w) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x)
    if (__builtin_popcountll(x) == w)
      out.push_back(x);
  return out;
}

std::uint64_t low_bits(int count) { return (std::uint64_t{1} << count) - 1; }

void require(bool condition, const std::string &what) {
  if (!condition)
    throw Error(ErrorKind::Domain, what);
}

std::string tuple_str(int k, int i, int j) {
  return "(" + std::to_string(k) + "," + std::to_string(i) + "," + std::to_string(j) + ")";
}

bool valid_block_index(int n, int k, int i) { return k >= 0 && 2 * k <= n && i >= k && i <= n - k; }

// d = v(x, y) range for x in X_i, y in X_j.
std::pair<int, int> d_range(int n, int i, int j) { return {std::max(0, i - j), std::min(i, n - j)}; }

Integer pow2(int e) { return Integer(1) << e; }

} // namespace

Integer binomial(long n, long k) {
  if (n < 0 || k < 0 || k > n)
    return 0;
  Integer out;
  mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return out;
}

Rational pochhammer(const Rational &a, unsigned k) {
  Rational out(1);
  for (unsigned t = 0; t < k; ++t)
    out *= a + Rational(long(t));
  return out;
}

Rational hahn_Q_extended(int k, int a, int b, int m, int x) {
  require(m >= 0 && k >= 0 && k <= m && k <= a && k <= b, "hahn_Q: need 0 <= k <= min(m, a, b)");
  require(x >= 0 && x <= m, "hahn_Q: need 0 <= x <= m");
  Rational sum;
  for (int j = 0; j <= k; ++j) {
    Rational term(binomial(b - k + j, j), binomial(a, j));
    term *= Rational(Integer(binomial(m - x, k - j) * binomial(x, j)));
    if (j % 2)
      sum -= term;
    else
      sum += term;
  }
  return sum / Rational(binomial(m, k));
}

Rational hahn_Q(int k, int a, int b, int m, int x) {
  require(m >= 0 && a >= m && b >= m, "hahn_Q: need a >= m, b >= m >= 0");
  require(k >= 0 && k <= m, "hahn_Q: need 0 <= k <= m");
  return hahn_Q_extended(k, a, b, m, x);
}

HahnCheck hahn_orthogonality_check(int a, int b, int m) {
  std::vector<std::vector<Rational>> q(std::size_t(m) + 1);
  for (int k = 0; k <= m; ++k)
    for (int x = 0; x <= m; ++x)
      q[std::size_t(k)].push_back(hahn_Q(k, a, b, m, x));
  for (int k = 0; k <= m; ++k)
    for (int l = k + 1; l <= m; ++l) {
      Rational sum;
      for (int x = 0; x <= m; ++x)
        sum += Rational(Integer(binomial(a, x) * binomial(b, m - x))) * q[std::size_t(k)][std::size_t(x)] *
               q[std::size_t(l)][std::size_t(x)];
      if (!sum.is_zero())
        return {false, k, l, sum};
    }
  return {};
}

BlockDims dims(int n) {
  require(n >= 1, "dims: need n >= 1");
  BlockDims out;
  for (int k = 0; 2 * k <= n; ++k) {
    out.h.push_back(Integer(binomial(n, k) - binomial(n, k - 1)).get_si());
    out.m.push_back(n - 2 * k + 1);
  }
  return out;
}

Integer triple_size(int n, int r, int s, int d) {
  return binomial(n, d) * binomial(n - d, r - d) * binomial(n - r, s - r + d);
}

std::vector<OrbitTriple> orbit_triples(int n) {
  require(n >= 1, "orbit_triples: need n >= 1");
  std::vector<OrbitTriple> out;
  for (int r = 0; r <= n; ++r)
    for (int s = 0; s <= n; ++s)
      for (int d = 0; d <= r; ++d) {
        const int t = s - r + d;
        if (t < 0 || t > n - r)
          continue;
        out.push_back({r, s, d, triple_size(n, r, s, d)});
      }
  return out;
}

QuadExact E_analytic(int n, int k, int i, int j, int d) {
  require(n >= 1, "E_analytic: need n >= 1");
  require(valid_block_index(n, k, i) && valid_block_index(n, k, j),
          "E_analytic: need 0 <= k <= n/2 and k <= i, j <= n-k, got " + tuple_str(k, i, j));
  const auto [lo, hi] = d_range(n, i, j);
  require(d >= lo && d <= hi, "E_analytic: no pair with v(x,y) = " + std::to_string(d) + " in X_" +
                                  std::to_string(i) + " x X_" + std::to_string(j));
  if (i > j)
    return E_analytic(n, k, j, i, d + j - i);

  const auto uk = unsigned(k);
  const Rational ratio = pochhammer(Rational(-j), uk) * pochhammer(Rational(i - n), uk) /
                         (pochhammer(Rational(-i), uk) * pochhammer(Rational(j - n), uk));
  if (ratio.sign() <= 0)
    throw Error(ErrorKind::Contract, "E_analytic: Pochhammer ratio " + ratio.str() + " is not positive");
  const Rational h(Integer(binomial(n, k) - binomial(n, k - 1)));
  const QuadExact scale =
      QuadExact(h) * QuadExact::sqrt(Rational(1) / (Rational(Integer(binomial(n, i) * binomial(n, j))) * ratio));
  // Hahn parameters (a, b, m) = (n-j, j, i) with variable v(x, y).
  return scale * QuadExact(hahn_Q_extended(k, n - j, j, i, d));
}

QuadExact p_analytic(int n, int r, int s, int d, int k, int i, int j) {
  require(r >= 0 && r <= n && s >= 0 && s <= n, "p_analytic: weights out of range");
  const auto [lo, hi] = d_range(n, r, s);
  require(d >= lo && d <= hi, "p_analytic: (r,s,d) is not an orbit");
  require(valid_block_index(n, k, i) && valid_block_index(n, k, j), "p_analytic: block index out of range");
  if (r != i || s != j)
    return QuadExact();
  const Rational h(Integer(binomial(n, k) - binomial(n, k - 1)));
  return QuadExact(Rational(triple_size(n, r, s, d))) * E_analytic(n, k, i, j, d) / QuadExact(h);
}

QuadExact TerwilligerTables::entry(int k, int i, int j, int d) const {
  if (i > j)
    return entry(k, j, i, d + j - i);
  const auto it = e_entries.find({k, i, j, d});
  if (it == e_entries.end())
    throw Error(ErrorKind::Domain, "no E entry for " + tuple_str(k, i, j) + " at d = " + std::to_string(d));
  return it->second;
}

QuadExact TerwilligerTables::p(int r, int s, int d, int k, int i, int j) const {
  const auto it = p_coeffs.find({r, s, d, k, i, j});
  return it == p_coeffs.end() ? QuadExact() : it->second;
}

TerwilligerTables assemble_exact_decomposition(int n) {
  if (n < 1 || n > kTableCap)
    throw Error(ErrorKind::ResourceLimit,
                "Terwilliger tables support 1 <= n <= " + std::to_string(kTableCap));
  TerwilligerTables t;
  t.n = n;
  t.triples = orbit_triples(n);
  t.block_dims = dims(n);

  for (int k = 0; 2 * k <= n; ++k)
    for (int i = k; i <= n - k; ++i)
      for (int j = i; j <= n - k; ++j) {
        const auto [lo, hi] = d_range(n, i, j);
        for (int d = lo; d <= hi; ++d)
          t.e_entries[{k, i, j, d}] = E_analytic(n, k, i, j, d);
      }

  // Sign pass: E_{k,i,i+1} E_{k,i+1,j} must equal E_{k,i,j}. Checked at
  // x = 1^i 0^{n-i}, z = 1^j 0^{n-j}, where the target is nonzero.
  for (int k = 0; 2 * k <= n; ++k)
    for (int gap = 2; gap <= n - 2 * k; ++gap)
      for (int i = k; i + gap <= n - k; ++i) {
        const int j = i + gap;
        const std::uint64_t x = low_bits(i), z = low_bits(j);
        QuadExact product;
        for (std::uint64_t y : points_of_weight(n, i + 1))
          product += t.entry(k, i, i + 1, v_count(x, y)) * t.entry(k, i + 1, j, v_count(y, z));
        const QuadExact target = t.entry(k, i, j, 0);
        if (product == target)
          continue;
        if (product == -target) {
          const auto [lo, hi] = d_range(n, i, j);
          for (int d = lo; d <= hi; ++d)
            t.e_entries[{k, i, j, d}] = -t.e_entries[{k, i, j, d}];
          t.sign_flips.push_back({k, i, j});
          continue;
        }
        throw Error(ErrorKind::Verification, "E" + tuple_str(k, i, j) +
                                                 " is not fixed by a sign: product " + product.str() +
                                                 " vs " + target.str());
      }

  for (const auto &tr : t.triples)
    for (int k = 0; 2 * k <= n; ++k) {
      if (!valid_block_index(n, k, tr.r) || !valid_block_index(n, k, tr.s))
        continue;
      const Rational h(t.block_dims.h[std::size_t(k)]);
      t.p_coeffs[{tr.r, tr.s, tr.d, k, tr.r, tr.s}] =
          QuadExact(Rational(tr.size)) * t.entry(k, tr.r, tr.s, tr.d) / QuadExact(h);
    }
  return t;
}

ExactEMatrix exact_E_matrix(const TerwilligerTables &tables, int k, int i, int j) {
  if (tables.n > kMatrixCap)
    throw Error(ErrorKind::ResourceLimit,
                "full E matrices are limited to n <= " + std::to_string(kMatrixCap));
  require(valid_block_index(tables.n, k, i) && valid_block_index(tables.n, k, j),
          "exact_E_matrix: index out of range");
  ExactEMatrix e;
  e.k = k;
  e.i = i;
  e.j = j;
  e.rows = points_of_weight(tables.n, i);
  e.cols = points_of_weight(tables.n, j);
  e.coefficients.reserve(e.rows.size() * e.cols.size());
  bool have_radicand = false;
  for (auto x : e.rows)
    for (auto y : e.cols) {
      const QuadExact value = tables.entry(k, i, j, v_count(x, y));
      if (!value.is_zero()) {
        if (!have_radicand) {
          e.radicand = value.radicand();
          have_radicand = true;
        } else if (value.radicand() != e.radicand) {
          throw Error(ErrorKind::Contract, "E" + tuple_str(k, i, j) + " mixes square-root classes");
        }
      }
      e.coefficients.push_back(value.coefficient());
    }
  return e;
}

namespace {

// Coefficients over a common denominator.
struct IntegerMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<Integer> values;
  Integer denominator = 1;
  Integer radicand = 1;
};

IntegerMatrix to_integer(const ExactEMatrix &e) {
  IntegerMatrix out;
  out.rows = e.rows.size();
  out.cols = e.cols.size();
  out.radicand = e.radicand;
  for (const auto &c : e.coefficients)
    mpz_lcm(out.denominator.get_mpz_t(), out.denominator.get_mpz_t(), c.denominator().get_mpz_t());
  out.values.reserve(e.coefficients.size());
  for (const auto &c : e.coefficients)
    out.values.push_back(c.numerator() * (out.denominator / c.denominator()));
  return out;
}

std::vector<Integer> multiply(const IntegerMatrix &a, const IntegerMatrix &b) {
  std::vector<Integer> out(a.rows * b.cols, 0);
  Integer tmp;
  for (std::size_t x = 0; x < a.rows; ++x)
    for (std::size_t y = 0; y < a.cols; ++y) {
      const Integer &axy = a.values[x * a.cols + y];
      if (axy == 0)
        continue;
      for (std::size_t z = 0; z < b.cols; ++z) {
        const Integer &byz = b.values[y * b.cols + z];
        if (byz != 0) {
          mpz_mul(tmp.get_mpz_t(), axy.get_mpz_t(), byz.get_mpz_t());
          out[x * b.cols + z] += tmp;
        }
      }
    }
  return out;
}

} // namespace

ExactCheck exact_multiplication_check(const TerwilligerTables &tables) {
  const int n = tables.n;
  if (n > kMatrixCap)
    throw Error(ErrorKind::ResourceLimit, "exact multiplication check is limited to n <= " +
                                              std::to_string(kMatrixCap));
  std::map<std::tuple<int, int, int>, IntegerMatrix> mats;
  std::vector<std::tuple<int, int, int>> tuples;
  for (int k = 0; 2 * k <= n; ++k)
    for (int i = k; i <= n - k; ++i)
      for (int j = k; j <= n - k; ++j) {
        mats[{k, i, j}] = to_integer(exact_E_matrix(tables, k, i, j));
        tuples.emplace_back(k, i, j);
      }

  ExactCheck check;
  auto fail = [&](const std::string &what) {
    if (check.passed)
      check.witness = what;
    check.passed = false;
  };
  for (const auto &[k, i, j] : tuples)
    for (const auto &[k2, i2, j2] : tuples) {
      ++check.checked;
      if (i2 != j)
        continue; // supports X_j and X_{i2} are disjoint: product and target vanish
      const auto &a = mats.at({k, i, j});
      const auto &b = mats.at({k2, i2, j2});
      const auto product = multiply(a, b);
      const std::string label = "E" + tuple_str(k, i, j) + " E" + tuple_str(k2, i2, j2);
      if (k != k2) {
        if (std::any_of(product.begin(), product.end(), [](const Integer &v) { return v != 0; }))
          fail(label + " should vanish");
        continue;
      }
      const auto &target = mats.at({k, i, j2});
      Integer g;
      mpz_gcd(g.get_mpz_t(), a.radicand.get_mpz_t(), b.radicand.get_mpz_t());
      const Integer radicand = (a.radicand / g) * (b.radicand / g);
      if (radicand != target.radicand) {
        fail(label + " lands in sqrt(" + radicand.get_str() + "), target in sqrt(" +
             target.radicand.get_str() + ")");
        continue;
      }
      const Integer lhs_scale = g * target.denominator;
      const Integer rhs_scale = a.denominator * b.denominator;
      for (std::size_t e = 0; e < product.size(); ++e)
        if (product[e] * lhs_scale != target.values[e] * rhs_scale) {
          fail(label + " differs from E" + tuple_str(k, i, j2));
          break;
        }
    }
  return check;
}

ExactCheck exact_orthogonality_check(const TerwilligerTables &tables) {
  const int n = tables.n;
  const Rational four_n(pow2(2 * n));
  ExactCheck check;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      const auto [lo, hi] = d_range(n, i, j);
      for (int k = 0; 2 * k <= n; ++k)
        for (int k2 = 0; 2 * k2 <= n; ++k2) {
          if (!valid_block_index(n, k, i) || !valid_block_index(n, k, j) ||
              !valid_block_index(n, k2, i) || !valid_block_index(n, k2, j))
            continue;
          ++check.checked;
          QuadExact sum;
          for (int d = lo; d <= hi; ++d)
            sum += QuadExact(Rational(triple_size(n, i, j, d)) * four_n) * tables.entry(k, i, j, d) *
                   tables.entry(k2, i, j, d);
          const QuadExact target =
              k == k2 ? QuadExact(four_n * Rational(tables.block_dims.h[std::size_t(k)])) : QuadExact();
          if (!(sum == target) && check.passed) {
            check.passed = false;
            check.witness = "orthogonality at (i,j) = (" + std::to_string(i) + "," + std::to_string(j) +
                            "), k = " + std::to_string(k) + ", k' = " + std::to_string(k2) + ": " +
                            sum.str() + " vs " + target.str();
          }
        }
    }
  return check;
}

ExactCheck exact_reconstruction_check(const TerwilligerTables &tables) {
  const int n = tables.n;
  ExactCheck check;
  for (const auto &tr : tables.triples) {
    const auto [lo, hi] = d_range(n, tr.r, tr.s);
    for (int d2 = lo; d2 <= hi; ++d2) {
      ++check.checked;
      QuadExact sum;
      for (int k = 0; 2 * k <= n; ++k)
        if (valid_block_index(n, k, tr.r) && valid_block_index(n, k, tr.s))
          sum += tables.p(tr.r, tr.s, tr.d, k, tr.r, tr.s) * tables.entry(k, tr.r, tr.s, d2);
      const QuadExact target(d2 == tr.d ? 1 : 0);
      if (!(sum == target) && check.passed) {
        check.passed = false;
        check.witness = "B(" + std::to_string(tr.r) + "," + std::to_string(tr.s) + "," +
                        std::to_string(tr.d) + ") at d = " + std::to_string(d2) + ": " + sum.str();
      }
    }
  }
  return check;
}

ExactCheck exact_trace_check(const TerwilligerTables &tables) {
  const int n = tables.n;
  ExactCheck check;
  for (int k = 0; 2 * k <= n; ++k)
    for (int j = k; j <= n - k; ++j) {
      ++check.checked;
      const QuadExact trace = QuadExact(Rational(binomial(n, j))) * tables.entry(k, j, j, 0);
      const QuadExact h(Rational(tables.block_dims.h[std::size_t(k)]));
      if (!(trace == h) && check.passed) {
        check.passed = false;
        check.witness = "trace of E" + tuple_str(k, j, j) + " is " + trace.str() + ", expected " + h.str();
      }
    }
  return check;
}

std::vector<std::size_t> analytic_block_h(const TerwilligerTables &tables) {
  std::vector<std::size_t> out;
  for (auto h : tables.block_dims.h)
    out.push_back(std::size_t(h));
  return out;
}

BlockImage analytic_block_image(const TerwilligerTables &tables, const PairOrbits &orbits) {
  const int n = tables.n;
  if (orbits.domain_size() != (std::size_t{1} << n))
    throw Error(ErrorKind::Shape, "orbit table is not over {0,1}^n");
  std::vector<std::size_t> sizes;
  for (auto m : tables.block_dims.m)
    sizes.push_back(std::size_t(m));
  std::vector<std::vector<CMatrix>> per_orbit(orbits.count());
  for (std::size_t r = 0; r < orbits.count(); ++r) {
    const auto [x, y] = orbits.representative(r);
    const int wx = __builtin_popcount(x), wy = __builtin_popcount(y), d = v_count(x, y);
    for (int k = 0; 2 * k <= n; ++k) {
      const auto m = Eigen::Index(sizes[std::size_t(k)]);
      CMatrix block = CMatrix::Zero(m, m);
      if (valid_block_index(n, k, wx) && valid_block_index(n, k, wy))
        block(wx - k, wy - k) = tables.p(wx, wy, d, k, wx, wy).to_double();
      per_orbit[r].push_back(std::move(block));
    }
  }
  return BlockImage(std::move(sizes), std::move(per_orbit));
}

CrossValidationReport cross_validate(int n, std::uint64_t seed, double tol) {
  if (n < 1 || n > kExactVerifyCap)
    throw Error(ErrorKind::ResourceLimit,
                "cross-validation is limited to 1 <= n <= " + std::to_string(kExactVerifyCap));
  CrossValidationReport report;
  report.n = n;
  report.tol = tol;

  const auto action = hamming_group(std::size_t(n));
  const auto orbits = pair_orbits(action);
  DecomposeOptions options;
  options.seed = seed;
  const auto numeric = decompose(action, orbits, options);
  const auto numeric_image = coefficients_p(numeric, orbits);

  const auto tables = assemble_exact_decomposition(n);
  const auto analytic_image = analytic_block_image(tables, orbits);

  for (const auto &b : numeric.blocks())
    report.numeric_dims.emplace_back(b.h, b.m);
  for (std::size_t k = 0; k < tables.block_dims.h.size(); ++k)
    report.analytic_dims.emplace_back(std::size_t(tables.block_dims.h[k]),
                                      std::size_t(tables.block_dims.m[k]));
  auto a = report.numeric_dims, b = report.analytic_dims;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  report.dims_match = a == b;

  const auto sc_numeric = structure_constants(numeric_image);
  const auto sc_analytic = structure_constants(analytic_image);
  const auto sc_direct = orbit_structure_constants(orbits);
  for (std::size_t e = 0; e < sc_direct.size(); ++e) {
    report.structure_residual = std::max(report.structure_residual, std::abs(sc_numeric[e] - sc_analytic[e]));
    report.structure_direct_residual =
        std::max(report.structure_direct_residual, std::abs(sc_analytic[e] - sc_direct[e]));
  }

  std::vector<std::size_t> numeric_h;
  for (const auto &blk : numeric.blocks())
    numeric_h.push_back(blk.h);
  const auto analytic_h = analytic_block_h(tables);
  for (int trial = 0; trial < 20; ++trial) {
    const CVector y = random_hermitian_coefficients(orbits, seed * 1000003u + std::uint64_t(trial));
    const RVector s1 = replicated_block_spectrum(numeric_image, numeric_h, y);
    const RVector s2 = replicated_block_spectrum(analytic_image, analytic_h, y);
    report.spectrum_residual = std::max(report.spectrum_residual, (s1 - s2).cwiseAbs().maxCoeff());
  }

  report.passed = report.dims_match && report.structure_residual < tol &&
                  report.structure_direct_residual < tol && report.spectrum_residual < tol;
  std::ostringstream detail;
  detail << "n=" << n << " dims " << (report.dims_match ? "match" : "differ")
         << ", structure residual " << report.structure_residual << " (direct "
         << report.structure_direct_residual << "), spectrum residual " << report.spectrum_residual;
  report.detail = detail.str();
  return report;
}

} // namespace symsdp::terwilliger
