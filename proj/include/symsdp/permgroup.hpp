#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "symsdp/error.hpp"
#include "symsdp/types.hpp"

namespace symsdp {

/// A bijection on {0, ..., n-1}; images()[x] is the image a.x.
class Permutation {
public:
  Permutation() = default;
  /// Throws MalformedInput unless images is a bijection.
  explicit Permutation(std::vector<Index> images);

  static Permutation identity(std::size_t n);

  std::size_t size() const noexcept { return images_.size(); }
  Index operator()(Index x) const { return images_[x]; }
  std::span<const Index> images() const noexcept { return images_; }

  Permutation inverse() const;
  bool is_identity() const noexcept;

  /// (a * b)(x) = a(b(x)).
  friend Permutation operator*(const Permutation &a, const Permutation &b);
  friend bool operator==(const Permutation &, const Permutation &) = default;

private:
  std::vector<Index> images_;
};

struct GroupLimits {
  std::size_t max_order = 10'000'000;

  /// Default limits, with max_order overridden by SYMSDP_CAP_GROUP when set.
  static GroupLimits from_environment();
};

/// A finite permutation group acting on {0, ..., domain_size-1}, given by
/// generators. The element list is built on first request and then shared by
/// all copies.
class GroupAction {
public:
  GroupAction(std::size_t domain_size, std::vector<Permutation> generators,
              GroupLimits limits = {});

  std::size_t domain_size() const noexcept { return domain_size_; }
  const std::vector<Permutation> &generators() const noexcept { return generators_; }
  const GroupLimits &limits() const noexcept { return limits_; }

  /// Breadth-first closure from the identity, generators applied in input
  /// order. Throws ResourceLimit past limits().max_order.
  const std::vector<Permutation> &elements() const;
  std::size_t order() const { return elements().size(); }

private:
  struct Lazy;

  std::size_t domain_size_;
  std::vector<Permutation> generators_;
  GroupLimits limits_;
  std::shared_ptr<Lazy> lazy_;
};

GroupAction generate_group(std::vector<Permutation> generators, std::size_t domain_size,
                           GroupLimits limits = {});

// Common actions used by tests, fixtures and the CLI.
GroupAction trivial_group(std::size_t n);
GroupAction cyclic_group(std::size_t n);
/// Dihedral group of order 2n on the vertices of an n-cycle.
GroupAction dihedral_group(std::size_t n);
GroupAction symmetric_group(std::size_t n);
/// S_n permuting coordinates of {0,1}^n; point x is the integer whose bit l
/// is coordinate l.
GroupAction hamming_group(std::size_t n);

/// Orbits of G on X x X. Orbits are numbered 0..N-1 in increasing order of
/// their lexicographically smallest pair, which is also the representative.
class PairOrbits {
public:
  PairOrbits(std::size_t domain_size, std::vector<Index> orbit_of,
             std::vector<std::pair<Index, Index>> representatives,
             std::vector<std::size_t> sizes, std::vector<std::size_t> transpose_of);

  std::size_t domain_size() const noexcept { return domain_size_; }
  std::size_t count() const noexcept { return sizes_.size(); }

  std::size_t orbit(Index x, Index y) const { return orbit_of_[std::size_t(x) * domain_size_ + y]; }
  std::pair<Index, Index> representative(std::size_t r) const { return representatives_.at(r); }
  std::size_t size(std::size_t r) const { return sizes_.at(r); }
  std::size_t transpose(std::size_t r) const { return transpose_of_.at(r); }
  bool self_paired(std::size_t r) const { return transpose(r) == r; }

  const std::vector<std::size_t> &sizes() const noexcept { return sizes_; }
  const std::vector<std::size_t> &transpose_map() const noexcept { return transpose_of_; }
  std::span<const Index> orbit_map() const noexcept { return orbit_of_; }

private:
  std::size_t domain_size_;
  std::vector<Index> orbit_of_;
  std::vector<std::pair<Index, Index>> representatives_;
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> transpose_of_;
};

/// Union-find over generator images on pairs; never enumerates the group.
PairOrbits pair_orbits(const GroupAction &action);

/// B_r as a dense 0/1 matrix. Throws Index on out-of-range r.
RMatrix canonical_basis_matrix(const PairOrbits &orbits, std::size_t r);

/// P_a(x, y) = 1 iff a^{-1} x = y, so P_a P_b = P_{ab}.
RMatrix permutation_matrix(const Permutation &a);

/// Structure constants of the orbit algebra by direct counting:
/// B_r B_s = sum_t c(r, s, t) B_t, stored at [(r * N + s) * N + t].
std::vector<double> orbit_structure_constants(const PairOrbits &orbits);

/// Mean of M over each pair orbit.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>
orbit_values(const PairOrbits &orbits, const Eigen::MatrixBase<Derived> &m) {
  using Scalar = typename Derived::Scalar;
  const auto n = orbits.domain_size();
  if (std::size_t(m.rows()) != n || std::size_t(m.cols()) != n)
    throw Error(ErrorKind::Shape, "matrix shape does not match the domain size");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> sums = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(orbits.count());
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      sums[orbits.orbit(Index(x), Index(y))] += m(x, y);
  for (std::size_t r = 0; r < orbits.count(); ++r)
    sums[r] /= double(orbits.size(r));
  return sums;
}

/// sum_r values[r] * B_r.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
from_orbit_values(const PairOrbits &orbits, const Eigen::MatrixBase<Derived> &values) {
  using Scalar = typename Derived::Scalar;
  const auto n = orbits.domain_size();
  if (std::size_t(values.size()) != orbits.count())
    throw Error(ErrorKind::Shape, "coefficient vector length does not match the orbit count");
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(n, n);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      out(x, y) = values(orbits.orbit(Index(x), Index(y)));
  return out;
}

/// (1/|G|) sum_a aM, computed orbit-wise.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
group_average(const PairOrbits &orbits, const Eigen::MatrixBase<Derived> &m) {
  return from_orbit_values(orbits, orbit_values(orbits, m));
}

} // namespace symsdp
