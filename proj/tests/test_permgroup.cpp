#include <doctest.h>

#include <cstdlib>
#include <random>

#include "oracles.hpp"
#include "symsdp/error.hpp"
#include "symsdp/permgroup.hpp"

using namespace symsdp;

namespace {

std::vector<oracle::Perm> raw_generators(const GroupAction &g) {
  std::vector<oracle::Perm> out;
  for (const auto &p : g.generators()) {
    oracle::Perm raw;
    for (auto x : p.images())
      raw.push_back(int(x));
    out.push_back(raw);
  }
  return out;
}

Permutation perm(std::vector<Index> images) { return Permutation(std::move(images)); }

Permutation random_perm(std::size_t n, std::mt19937_64 &rng) {
  std::vector<Index> images(n);
  for (std::size_t x = 0; x < n; ++x)
    images[x] = Index(x);
  std::shuffle(images.begin(), images.end(), rng);
  return Permutation(images);
}

// Orbit labels from the library, checked against the brute-force partition.
void check_orbits_against_oracle(const GroupAction &g) {
  const auto n = int(g.domain_size());
  const auto labels = oracle::pair_orbit_labels(oracle::closure(raw_generators(g), n), n);
  const auto orbits = pair_orbits(g);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      CHECK(orbits.orbit(Index(x), Index(y)) == std::size_t(labels[std::size_t(x * n + y)]));
}

} // namespace

TEST_SUITE("permgroup") {

TEST_CASE("permutation validates bijection") {
  CHECK_THROWS_AS(perm({0, 0, 1}), Error);
  try {
    perm({0, 3, 1});
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::MalformedInput);
  }
  const auto a = perm({1, 2, 0});
  CHECK((a * a.inverse()).is_identity());
  CHECK((a * a)(0) == 2);
}

TEST_CASE("generate_group: trivial, cyclic, symmetric") {
  CHECK(generate_group({}, 4).order() == 1);
  CHECK(generate_group({perm({1, 2, 3, 4, 0})}, 5).order() == 5);
  const auto s5 = generate_group({perm({1, 2, 3, 4, 0}), perm({1, 0, 2, 3, 4})}, 5);
  CHECK(s5.order() == 120);
  CHECK(s5.order() == oracle::closure(raw_generators(s5), 5).size());
  for (std::size_t n = 1; n <= 6; ++n)
    CHECK(symmetric_group(n).order() == std::size_t(oracle::factorial(int(n))));
}

TEST_CASE("element list: identity first, closed, generator order") {
  const auto g = dihedral_group(6);
  const auto &elements = g.elements();
  CHECK(elements.front().is_identity());
  CHECK(elements.size() == 12);
  CHECK(elements[1] == g.generators()[0]);
  std::set<std::vector<Index>> seen;
  for (const auto &e : elements)
    seen.insert({e.images().begin(), e.images().end()});
  for (const auto &a : elements)
    for (const auto &b : elements) {
      const auto c = a * b;
      CHECK(seen.count({c.images().begin(), c.images().end()}) == 1);
    }
}

TEST_CASE("group size cap") {
  GroupLimits limits;
  limits.max_order = 100;
  const GroupAction s5(5, {perm({1, 2, 3, 4, 0}), perm({1, 0, 2, 3, 4})}, limits);
  try {
    (void)s5.order();
    FAIL("cap not enforced");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::ResourceLimit);
  }
  setenv("SYMSDP_CAP_GROUP", "50", 1);
  CHECK(GroupLimits::from_environment().max_order == 50);
  unsetenv("SYMSDP_CAP_GROUP");
  CHECK(GroupLimits::from_environment().max_order == 10'000'000);
}

TEST_CASE("pair_orbits examples") {
  const auto trivial = pair_orbits(trivial_group(3));
  CHECK(trivial.count() == 9);
  for (std::size_t r = 0; r < 9; ++r)
    CHECK(trivial.size(r) == 1);
  CHECK(pair_orbits(hamming_group(2)).count() == 10);
  const auto c5 = pair_orbits(dihedral_group(5));
  CHECK(c5.count() == 3);
  CHECK(c5.representative(0) == std::pair<Index, Index>{0, 0});
  CHECK(c5.representative(1) == std::pair<Index, Index>{0, 1});
  CHECK(c5.representative(2) == std::pair<Index, Index>{0, 2});
}

TEST_CASE("pair_orbits match brute-force enumeration") {
  check_orbits_against_oracle(trivial_group(3));
  check_orbits_against_oracle(cyclic_group(6));
  check_orbits_against_oracle(dihedral_group(7));
  check_orbits_against_oracle(symmetric_group(4));
  check_orbits_against_oracle(hamming_group(3));
  check_orbits_against_oracle(hamming_group(4));
}

TEST_CASE("pair_orbits invariants") {
  for (const auto &g : {cyclic_group(5), dihedral_group(8), hamming_group(4), symmetric_group(4)}) {
    const auto orbits = pair_orbits(g);
    const auto n = g.domain_size();
    std::size_t total = 0;
    for (std::size_t r = 0; r < orbits.count(); ++r) {
      total += orbits.size(r);
      CHECK(orbits.transpose(orbits.transpose(r)) == r);
      CHECK(orbits.size(orbits.transpose(r)) == orbits.size(r));
      const auto [x, y] = orbits.representative(r);
      CHECK(orbits.orbit(x, y) == r);
      CHECK(orbits.orbit(y, x) == orbits.transpose(r));
    }
    CHECK(total == n * n);
    // representative is the smallest member
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y) {
        const auto rep = orbits.representative(orbits.orbit(Index(x), Index(y)));
        CHECK(rep <= std::pair<Index, Index>(Index(x), Index(y)));
      }
    for (const auto &a : g.elements())
      for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y)
          CHECK(orbits.orbit(a(Index(x)), a(Index(y))) == orbits.orbit(Index(x), Index(y)));
  }
}

TEST_CASE("canonical_basis_matrix") {
  const auto trivial = pair_orbits(trivial_group(3));
  RMatrix e00 = RMatrix::Zero(3, 3);
  e00(0, 0) = 1;
  CHECK(canonical_basis_matrix(trivial, 0) == e00);

  const auto c5 = pair_orbits(dihedral_group(5));
  RMatrix sum = RMatrix::Zero(5, 5);
  for (std::size_t r = 0; r < c5.count(); ++r) {
    const auto b = canonical_basis_matrix(c5, r);
    CHECK(b.sum() == doctest::Approx(double(c5.size(r))));
    CHECK(b.transpose() == canonical_basis_matrix(c5, c5.transpose(r)));
    sum += b;
  }
  CHECK(sum == RMatrix::Ones(5, 5));
  const auto adj = canonical_basis_matrix(c5, 1);
  const std::vector<double> row{0, 1, 0, 0, 1};
  for (int y = 0; y < 5; ++y)
    CHECK(adj(0, y) == row[std::size_t(y)]);
  for (int x = 0; x < 5; ++x)
    for (int y = 0; y < 5; ++y)
      CHECK(adj(x, y) == adj((x + 1) % 5, (y + 1) % 5));

  try {
    canonical_basis_matrix(c5, 3);
    FAIL("no index error");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::Index);
  }
}

TEST_CASE("permutation_matrix") {
  CHECK(permutation_matrix(Permutation::identity(4)) == RMatrix::Identity(4, 4));
  RMatrix swap(2, 2);
  swap << 0, 1, 1, 0;
  CHECK(permutation_matrix(perm({1, 0})) == swap);
  // P_a e_y = e_{a y}
  const auto a = perm({2, 0, 1});
  const RMatrix p = permutation_matrix(a);
  for (Index y = 0; y < 3; ++y)
    CHECK(p(a(y), y) == 1.0);

  std::mt19937_64 rng(7);
  for (int t = 0; t < 100; ++t) {
    const auto x = random_perm(5, rng);
    const auto y = random_perm(5, rng);
    CHECK(permutation_matrix(x) * permutation_matrix(x.inverse()) == RMatrix::Identity(5, 5));
    CHECK(permutation_matrix(x) * permutation_matrix(y) == permutation_matrix(x * y));
  }
}

TEST_CASE("group_average") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  RMatrix m(5, 5);
  for (Eigen::Index i = 0; i < m.size(); ++i)
    m.data()[i] = u(rng);

  CHECK(group_average(pair_orbits(trivial_group(5)), m) == m);

  const auto g = dihedral_group(5);
  const auto orbits = pair_orbits(g);
  const RMatrix avg = group_average(orbits, m);
  CHECK((group_average(orbits, avg) - avg).norm() < 1e-14);

  // explicit (1/|G|) sum_a P_a M P_a^t
  RMatrix explicit_avg = RMatrix::Zero(5, 5);
  for (const auto &a : g.elements())
    explicit_avg += permutation_matrix(a) * m * permutation_matrix(a).transpose();
  explicit_avg /= double(g.order());
  CHECK((explicit_avg - avg).norm() < 1e-14);

  RMatrix e01 = RMatrix::Zero(5, 5);
  e01(0, 1) = 1;
  const RMatrix a01 = group_average(orbits, e01);
  const RMatrix adj = canonical_basis_matrix(orbits, 1);
  CHECK((a01 - adj / 10.0).norm() < 1e-15);

  for (std::size_t r = 0; r < orbits.count(); ++r)
    CHECK(group_average(orbits, canonical_basis_matrix(orbits, r)) == canonical_basis_matrix(orbits, r));

  try {
    group_average(orbits, RMatrix::Zero(4, 4).eval());
    FAIL("no shape error");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::Shape);
  }
}

TEST_CASE("orbit structure constants by counting") {
  const auto orbits = pair_orbits(hamming_group(3));
  const auto c = orbit_structure_constants(orbits);
  const auto n = orbits.count();
  for (std::size_t r = 0; r < n; r += 3)
    for (std::size_t s = 0; s < n; s += 2) {
      const RMatrix prod = canonical_basis_matrix(orbits, r) * canonical_basis_matrix(orbits, s);
      RMatrix expanded = RMatrix::Zero(8, 8);
      for (std::size_t t = 0; t < n; ++t)
        expanded += c[(r * n + s) * n + t] * canonical_basis_matrix(orbits, t);
      CHECK((prod - expanded).norm() == 0.0);
    }
}

TEST_CASE("hamming_group acts by coordinate permutation") {
  const auto g = hamming_group(3);
  CHECK(g.domain_size() == 8);
  CHECK(g.order() == 6);
  for (const auto &a : g.elements())
    for (Index x = 0; x < 8; ++x)
      CHECK(oracle::popcount(a(x)) == oracle::popcount(x));
}

} // TEST_SUITE
