#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "symsdp/decomposer.hpp"
#include "symsdp/error.hpp"
#include "symsdp/io.hpp"
#include "symsdp/sdpreduce.hpp"

using namespace symsdp;

namespace {

struct Setup {
  GroupAction action;
  PairOrbits orbits;
  Decomposition dec;
  BlockImage image;
};

Setup setup(GroupAction g) {
  auto orbits = pair_orbits(g);
  auto dec = decompose(g, orbits);
  auto image = coefficients_p(dec, orbits);
  return {std::move(g), std::move(orbits), std::move(dec), std::move(image)};
}

InvariantSDP theta_c5() { return io::parse_sdp(io::read_json(SYMSDP_TEST_DATA "/theta_c5.json")); }

CVector theta_optimum() { return io::parse_orbit_values(io::read_json(SYMSDP_TEST_DATA "/theta_c5_y.json")); }

CVector random_paired(const PairOrbits &orbits, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  CVector y = CVector::Zero(Eigen::Index(orbits.count()));
  for (std::size_t r = 0; r < orbits.count(); ++r) {
    const auto t = orbits.transpose(r);
    if (t == r)
      y[Eigen::Index(r)] = u(rng);
    else if (r < t) {
      const Complex z(u(rng), u(rng));
      y[Eigen::Index(r)] = z;
      y[Eigen::Index(t)] = std::conj(z);
    }
  }
  return y;
}

CMatrix embed(const CMatrix &z) {
  const auto m = z.rows();
  RMatrix out(2 * m, 2 * m);
  out << z.real(), -z.imag(), z.imag(), z.real();
  return out.cast<Complex>();
}

// F_matrix . Y over the SDPA entries, Y given per block.
double sdpa_inner(const SdpaProblem &p, int matrix, const std::vector<RMatrix> &y) {
  double sum = 0;
  for (const auto &e : p.entries)
    if (e.matrix == matrix) {
      const double v = y[std::size_t(e.block - 1)](e.row - 1, e.col - 1);
      sum += (e.row == e.col ? 1.0 : 2.0) * e.value * v;
    }
  return sum;
}

std::vector<RMatrix> sdpa_blocks(const ReducedSDP &complex_form, const ReducedSDP &real_form, const CVector &y) {
  std::vector<RMatrix> out;
  for (std::size_t k = 0; k < complex_form.block_sizes.size(); ++k) {
    CMatrix z = CMatrix::Zero(Eigen::Index(complex_form.block_sizes[k]), Eigen::Index(complex_form.block_sizes[k]));
    for (std::size_t r = 0; r < complex_form.pencils.size(); ++r)
      z += y[Eigen::Index(r)] * complex_form.pencils[r][k];
    out.push_back(real_form.doubled[k] ? RMatrix(embed(z).real()) : RMatrix(z.real()));
  }
  return out;
}

Complex full_trace(const SparseHermitian &m, const CMatrix &y) { return (m.dense() * y).trace(); }

double min_eig(const CMatrix &m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> s((m + m.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
  return s.eigenvalues()[0];
}

InvariantSDP random_invariant_sdp(const PairOrbits &orbits, std::uint64_t seed) {
  InvariantSDP sdp;
  sdp.name = "random";
  sdp.domain_size = orbits.domain_size();
  sdp.objective = SparseHermitian::from_dense(random_invariant_hermitian(orbits, seed));
  sdp.constraints.push_back({SparseHermitian::from_dense(CMatrix::Identity(Eigen::Index(orbits.domain_size()),
                                                                         Eigen::Index(orbits.domain_size()))),
                             1.0});
  sdp.constraints.push_back({SparseHermitian::from_dense(random_invariant_hermitian(orbits, seed + 1)), 0.25});
  return sdp;
}

ErrorKind kind_of(auto &&call) {
  try {
    call();
  } catch (const Error &e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Contract;
}

} // namespace

TEST_SUITE("sdpreduce") {

TEST_CASE("sparse Hermitian closure") {
  SparseHermitian m(3);
  m.add(0, 1, Complex(1, 2));
  m.add(2, 2, 4.0);
  const CMatrix d = m.dense();
  CHECK(d(1, 0) == Complex(1, -2));
  CHECK(d(2, 2) == Complex(4, 0));
  CHECK(kind_of([&] { m.add(1, 1, Complex(0, 1)); }) == ErrorKind::MalformedInput);
  CHECK(kind_of([&] { m.add(3, 0, 1.0); }) == ErrorKind::MalformedInput);
  CHECK(SparseHermitian::from_dense(d).dense() == d);
}

TEST_CASE("check_invariance examples") {
  const auto orbits = pair_orbits(dihedral_group(5));
  InvariantSDP sdp;
  sdp.domain_size = 5;
  sdp.objective = SparseHermitian::from_dense(CMatrix::Identity(5, 5).eval());
  sdp.constraints.push_back({SparseHermitian::from_dense(canonical_basis_matrix(orbits, 1).cast<Complex>()), 0.0});
  auto report = check_invariance(sdp, orbits);
  CHECK(report.invariant);
  CHECK(report.max_distance == 0.0);

  SparseHermitian e(5);
  e.add(0, 0, 1.0);
  sdp.constraints.push_back({e, 1.0});
  report = check_invariance(sdp, orbits);
  CHECK_FALSE(report.invariant);
  CHECK(report.distances[2] > 0.0);
  // distance to the average, computed densely
  const CMatrix dense = e.dense();
  CHECK(report.distances[2] == doctest::Approx((dense - group_average(orbits, dense)).norm()));

  InvariantSDP wrong;
  wrong.domain_size = 4;
  wrong.objective = SparseHermitian(4);
  CHECK(kind_of([&] { check_invariance(wrong, orbits); }) == ErrorKind::Shape);
}

TEST_CASE("symmetrize") {
  const auto c5 = pair_orbits(dihedral_group(5));
  const auto theta = theta_c5();
  const auto same = symmetrize(theta, c5);
  CHECK(same.objective.dense() == theta.objective.dense());

  const auto s4 = pair_orbits(symmetric_group(4));
  InvariantSDP sdp;
  sdp.domain_size = 4;
  sdp.objective = SparseHermitian(4);
  sdp.objective.add(0, 0, 1.0);
  const auto avg = symmetrize(sdp, s4);
  CHECK((avg.objective.dense() - CMatrix::Identity(4, 4) / 4.0).norm() < 1e-15);

  const auto h3 = pair_orbits(hamming_group(3));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  InvariantSDP random;
  random.domain_size = 8;
  random.objective = SparseHermitian(8);
  for (Index x = 0; x < 8; ++x)
    for (Index y = x; y < 8; ++y)
      random.objective.add(x, y, x == y ? Complex(u(rng), 0) : Complex(u(rng), u(rng)));
  const auto once = symmetrize(random, h3);
  const auto twice = symmetrize(once, h3);
  CHECK((once.objective.dense() - twice.objective.dense()).norm() < 1e-14);
  CHECK(check_invariance(once, h3).invariant);
}

TEST_CASE("reduce: theta(C5)") {
  const auto s = setup(dihedral_group(5));
  const auto reduced = reduce(theta_c5(), s.orbits, s.dec, s.image);
  CHECK(reduced.variable_count() == 3);
  CHECK(reduced.block_sizes == std::vector<std::size_t>{1, 1, 1});
  CHECK(reduced.objective[0] == Complex(5, 0));
  CHECK(reduced.objective[1] == Complex(10, 0));
  CHECK(reduced.rows[0][0] == Complex(5, 0));
  CHECK(reduced.rows[1][1] == Complex(10, 0));
}

TEST_CASE("reduce: trivial group keeps the program") {
  const auto s = setup(trivial_group(3));
  const auto sdp = random_invariant_sdp(s.orbits, 4);
  const auto reduced = reduce(sdp, s.orbits, s.dec, s.image);
  CHECK(reduced.variable_count() == 9);
  CHECK(reduced.block_sizes == std::vector<std::size_t>{3});
  const CMatrix c = sdp.objective.dense();
  for (std::size_t r = 0; r < 9; ++r) {
    const auto [x, y] = s.orbits.representative(r);
    CHECK(std::abs(reduced.objective[Eigen::Index(r)] - c(y, x)) < 1e-14);
  }
}

TEST_CASE("reduce: objective pairing and invariance error") {
  const auto s = setup(cyclic_group(5));
  const auto sdp = random_invariant_sdp(s.orbits, 8);
  const auto reduced = reduce(sdp, s.orbits, s.dec, s.image);
  for (std::size_t r = 0; r < s.orbits.count(); ++r)
    CHECK(std::abs(reduced.objective[Eigen::Index(s.orbits.transpose(r))] -
                   std::conj(reduced.objective[Eigen::Index(r)])) < 1e-12);
  // c_r = trace(C B_r)
  const CMatrix c = sdp.objective.dense();
  for (std::size_t r = 0; r < s.orbits.count(); ++r)
    CHECK(std::abs(reduced.objective[Eigen::Index(r)] -
                   (c * canonical_basis_matrix(s.orbits, r).cast<Complex>()).trace()) < 1e-12);

  auto broken = sdp;
  broken.objective.add(0, 1, 0.5);
  CHECK(kind_of([&] { reduce(broken, s.orbits, s.dec, s.image); }) == ErrorKind::Invariance);
}

TEST_CASE("realify: real decompositions pass through") {
  const auto s = setup(dihedral_group(5));
  const auto reduced = reduce(theta_c5(), s.orbits, s.dec, s.image);
  const auto real = realify(reduced);
  CHECK(real.realified);
  CHECK(real.variable_count() == 3);
  CHECK(real.block_sizes == reduced.block_sizes);
  for (std::size_t v = 0; v < 3; ++v) {
    CHECK(real.variables[v].kind == RealVariable::Kind::Self);
    for (std::size_t k = 0; k < 3; ++k)
      CHECK((real.pencils[v][k] - reduced.pencils[v][k]).norm() < 1e-15);
  }
  CHECK((real.objective - reduced.objective).norm() == 0.0);

  const auto h = setup(hamming_group(4));
  InvariantSDP toy = io::parse_sdp(io::read_json(SYMSDP_TEST_DATA "/hamming4_toy.json"));
  const auto hr = realify(reduce(toy, h.orbits, h.dec, h.image));
  CHECK(hr.block_sizes == std::vector<std::size_t>{5, 3, 1});
  CHECK(std::none_of(hr.doubled.begin(), hr.doubled.end(), [](bool b) { return b; }));
}

TEST_CASE("realify: 1x1 imaginary pencil") {
  ReducedSDP r;
  r.domain_size = 1;
  r.orbit_sizes = {1};
  r.transpose_of = {0};
  r.objective = CVector::Ones(1);
  r.objective_values = CVector::Ones(1);
  r.block_dims = {1};
  r.block_sizes = {1};
  r.pencils = {{CMatrix::Constant(1, 1, Complex(0, 1))}};
  const auto real = realify(r);
  REQUIRE(real.block_sizes == std::vector<std::size_t>{2});
  CHECK(real.doubled[0]);
  RMatrix expected(2, 2);
  expected << 0, -1, 1, 0;
  CHECK(real.pencils[0][0].real() == expected);
  CHECK(real.pencils[0][0].imag().norm() == 0.0);
}

TEST_CASE("realify: complex blocks double their spectrum") {
  const auto s = setup(cyclic_group(5));
  const auto sdp = random_invariant_sdp(s.orbits, 2);
  const auto reduced = reduce(sdp, s.orbits, s.dec, s.image);
  const auto real = realify(reduced);
  CHECK(real.variable_count() == 5);
  std::mt19937_64 rng(4);
  for (int t = 0; t < 10; ++t) {
    const CVector y = random_paired(s.orbits, rng);
    CVector yt(Eigen::Index(real.variable_count()));
    for (std::size_t v = 0; v < real.variable_count(); ++v) {
      const Complex z = y[Eigen::Index(real.variables[v].orbit)];
      yt[Eigen::Index(v)] = real.variables[v].kind == RealVariable::Kind::ImagPart ? z.imag() : z.real();
    }
    for (std::size_t k = 0; k < reduced.block_sizes.size(); ++k) {
      CMatrix z = CMatrix::Zero(1, 1), w = CMatrix::Zero(Eigen::Index(real.block_sizes[k]), Eigen::Index(real.block_sizes[k]));
      for (std::size_t r = 0; r < reduced.pencils.size(); ++r)
        z += y[Eigen::Index(r)] * reduced.pencils[r][k];
      for (std::size_t v = 0; v < real.variable_count(); ++v)
        w += yt[Eigen::Index(v)] * real.pencils[v][k];
      const CMatrix expected = real.doubled[k] ? embed(z) : CMatrix(z.real().cast<Complex>());
      CHECK((w - expected).norm() < 1e-12);
      if (real.doubled[k]) {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(w);
        CHECK(std::abs(es.eigenvalues()[0] - z(0, 0).real()) < 1e-12);
        CHECK(std::abs(es.eigenvalues()[1] - z(0, 0).real()) < 1e-12);
      }
    }
  }
}

TEST_CASE("SDPA export: theta(C5) data") {
  const auto s = setup(dihedral_group(5));
  const auto problem = to_sdpa(realify(reduce(theta_c5(), s.orbits, s.dec, s.image)));
  CHECK(problem.block_sizes == std::vector<int>{1, 1, 1});
  CHECK(problem.rhs == std::vector<double>{1.0, 0.0});
  std::map<std::pair<int, int>, double> f;
  for (const auto &e : problem.entries) {
    CHECK(e.row == 1);
    CHECK(e.col == 1);
    f[{e.matrix, e.block}] = e.value;
  }
  CHECK(f.size() == 7); // F0 vanishes on the two 2-dim blocks
  CHECK(f[{0, 1}] == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(f[{1, 1}] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f[{1, 2}] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(f[{1, 3}] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(f[{2, 1}] == doctest::Approx(2.0).epsilon(1e-12));
  const std::vector<double> adj{f[{2, 2}], f[{2, 3}]};
  CHECK(*std::max_element(adj.begin(), adj.end()) == doctest::Approx(4 * std::cos(2 * M_PI / 5)).epsilon(1e-12));
  CHECK(*std::min_element(adj.begin(), adj.end()) == doctest::Approx(4 * std::cos(4 * M_PI / 5)).epsilon(1e-12));
}

TEST_CASE("SDPA export: block program equals the full program") {
  for (auto g : {cyclic_group(5), hamming_group(3), dihedral_group(6)}) {
    const auto s = setup(std::move(g));
    const auto sdp = random_invariant_sdp(s.orbits, 11);
    const auto reduced = reduce(sdp, s.orbits, s.dec, s.image);
    const auto real = realify(reduced);
    const auto problem = to_sdpa(real);
    std::mt19937_64 rng(2);
    for (int t = 0; t < 5; ++t) {
      const CVector y = random_paired(s.orbits, rng);
      const CMatrix full = from_orbit_values(s.orbits, y);
      const auto blocks = sdpa_blocks(reduced, real, y);
      CHECK(sdpa_inner(problem, 0, blocks) == doctest::Approx(full_trace(sdp.objective, full).real()));
      for (std::size_t i = 0; i < sdp.constraints.size(); ++i)
        CHECK(sdpa_inner(problem, int(i) + 1, blocks) ==
              doctest::Approx(full_trace(sdp.constraints[i].matrix, full).real()));
    }
  }
}

TEST_CASE("SDPA writer and reader") {
  SdpaProblem empty;
  empty.block_sizes = {2};
  empty.entries.push_back({0, 1, 1, 2, 0.5});
  std::ostringstream out;
  write_sdpa(empty, out);
  CHECK(out.str() == "0\n1\n2\n\n0 1 1 2 0.5\n");
  std::istringstream in(out.str());
  CHECK(parse_sdpa(in) == empty);

  const auto s = setup(dihedral_group(5));
  const auto problem = to_sdpa(realify(reduce(theta_c5(), s.orbits, s.dec, s.image)));
  std::ostringstream text;
  write_sdpa(problem, text);
  std::istringstream back(text.str());
  CHECK(parse_sdpa(back) == problem);

  std::istringstream decorated("\"comment\n2 =mDIM\n1\n{3}\n1.0, 2.0\n1 1 1 1 1\n");
  const auto parsed = parse_sdpa(decorated);
  CHECK(parsed.block_sizes == std::vector<int>{3});
  CHECK(parsed.rhs == std::vector<double>{1.0, 2.0});

  std::istringstream broken("1\n1\n2\n1\n1 1 3 1 1.0\n");
  CHECK(kind_of([&] { parse_sdpa(broken); }) == ErrorKind::MalformedInput);

  CHECK(kind_of([&] { to_sdpa(reduce(theta_c5(), s.orbits, s.dec, s.image)); }) == ErrorKind::Contract);
}

TEST_CASE("SDPA export matches the golden file") {
  const auto s = setup(dihedral_group(5));
  const auto reduced = realify(reduce(theta_c5(), s.orbits, s.dec, s.image));
  const auto path = std::filesystem::temp_directory_path() / "symsdp_theta_c5_test.dat-s";
  export_sdpa(reduced, path);
  auto slurp = [](const std::filesystem::path &p) {
    std::ifstream f(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(f), {});
  };
  CHECK(slurp(path) == slurp(SYMSDP_TEST_DATA "/theta_c5.dat-s"));
  std::filesystem::remove(path);
  CHECK(kind_of([&] { export_sdpa(reduced, "/nonexistent-dir/x.dat-s"); }) == ErrorKind::Io);
}

TEST_CASE("lift_solution") {
  const auto s = setup(dihedral_group(5));
  const auto theta = theta_c5();
  const auto reduced = reduce(theta, s.orbits, s.dec, s.image);

  const auto zero = lift_solution(CVector::Zero(3), s.orbits, theta, reduced);
  CHECK(zero.Y.norm() == 0.0);
  CHECK(zero.min_eigenvalue == doctest::Approx(0.0));

  const auto best = lift_solution(theta_optimum(), s.orbits, theta, reduced);
  CHECK(best.psd);
  CHECK(best.min_eigenvalue > -1e-12);
  CHECK(best.objective_full.real() == doctest::Approx(oracle::odd_cycle_theta(5)).epsilon(1e-12));
  CHECK(best.objective_full.real() == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
  CHECK(best.constraint_residuals[0] < 1e-12);
  CHECK(best.constraint_residuals[1] < 1e-12);

  CVector bad = theta_optimum();
  bad[0] = Complex(0.2, 0.1);
  CHECK(kind_of([&] { lift_solution(bad, s.orbits, theta, reduced); }) == ErrorKind::MalformedInput);
  CHECK(kind_of([&] { lift_solution(CVector::Zero(2), s.orbits, theta, reduced); }) == ErrorKind::MalformedInput);
  CHECK(kind_of([&] { lift_solution(theta_optimum(), s.orbits, theta, realify(reduced)); }) ==
        ErrorKind::Contract);
}

TEST_CASE("lift: min eigenvalue and objective factor through the blocks") {
  for (auto g : {hamming_group(3), cyclic_group(6)}) {
    const auto s = setup(std::move(g));
    const auto sdp = random_invariant_sdp(s.orbits, 5);
    const auto reduced = reduce(sdp, s.orbits, s.dec, s.image);
    std::mt19937_64 rng(8);
    int agreements = 0, trials = 0;
    for (int t = 0; t < 50; ++t) {
      CVector y = random_paired(s.orbits, rng);
      y[0] += 1.0; // orbit 0 is the diagonal orbit of point 0, shifts the spectrum
      const auto report = lift_solution(y, s.orbits, sdp, reduced);
      const double block_min =
          *std::min_element(report.block_min_eigenvalues.begin(), report.block_min_eigenvalues.end());
      CHECK(report.min_eigenvalue == doctest::Approx(block_min).epsilon(1e-9));
      CHECK(std::abs(report.objective_full - report.objective_reduced) < 1e-8);
      if (std::abs(report.min_eigenvalue) > 1e-8) {
        ++trials;
        agreements += (report.min_eigenvalue >= 0) == (block_min >= 0);
      }
    }
    CHECK(agreements == trials);
  }
}

} // TEST_SUITE
