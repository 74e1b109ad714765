#include "symsdp/permgroup.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <mutex>
#include <numeric>
#include <string>
#include <unordered_set>

namespace symsdp {

Permutation::Permutation(std::vector<Index> images) : images_(std::move(images)) {
  std::vector<bool> seen(images_.size(), false);
  for (Index x : images_) {
    if (x >= images_.size() || seen[x])
      throw Error(ErrorKind::MalformedInput, "permutation images are not a bijection");
    seen[x] = true;
  }
}

Permutation Permutation::identity(std::size_t n) {
  std::vector<Index> images(n);
  std::iota(images.begin(), images.end(), Index{0});
  return Permutation(std::move(images));
}

Permutation Permutation::inverse() const {
  Permutation out;
  out.images_.resize(images_.size());
  for (std::size_t x = 0; x < images_.size(); ++x)
    out.images_[images_[x]] = Index(x);
  return out;
}

bool Permutation::is_identity() const noexcept {
  for (std::size_t x = 0; x < images_.size(); ++x)
    if (images_[x] != x)
      return false;
  return true;
}

Permutation operator*(const Permutation &a, const Permutation &b) {
  if (a.size() != b.size())
    throw Error(ErrorKind::Shape, "composing permutations of different degree");
  Permutation out;
  out.images_.resize(a.size());
  for (std::size_t x = 0; x < a.size(); ++x)
    out.images_[x] = a.images_[b.images_[x]];
  return out;
}

GroupLimits GroupLimits::from_environment() {
  GroupLimits limits;
  if (const char *env = std::getenv("SYMSDP_CAP_GROUP")) {
    try {
      limits.max_order = std::stoull(env);
    } catch (const std::exception &) {
      throw Error(ErrorKind::MalformedInput, std::string("SYMSDP_CAP_GROUP is not an integer: ") + env);
    }
  }
  return limits;
}

namespace {

struct PermutationHash {
  std::size_t operator()(const Permutation &p) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (Index x : p.images()) {
      h ^= x;
      h *= 1099511628211ull;
    }
    return h;
  }
};

} // namespace

struct GroupAction::Lazy {
  std::once_flag once;
  std::vector<Permutation> elements;
};

GroupAction::GroupAction(std::size_t domain_size, std::vector<Permutation> generators,
                         GroupLimits limits)
    : domain_size_(domain_size), generators_(std::move(generators)), limits_(limits),
      lazy_(std::make_shared<Lazy>()) {
  if (domain_size_ == 0)
    throw Error(ErrorKind::MalformedInput, "domain size must be positive");
  for (const auto &g : generators_)
    if (g.size() != domain_size_)
      throw Error(ErrorKind::MalformedInput,
                  "generator has " + std::to_string(g.size()) + " images, expected " +
                      std::to_string(domain_size_));
}

const std::vector<Permutation> &GroupAction::elements() const {
  std::call_once(lazy_->once, [this] {
    std::vector<Permutation> list{Permutation::identity(domain_size_)};
    std::unordered_set<Permutation, PermutationHash> seen{list.front()};
    for (std::size_t head = 0; head < list.size(); ++head) {
      for (const auto &g : generators_) {
        Permutation next = g * list[head];
        if (seen.insert(next).second) {
          if (list.size() >= limits_.max_order)
            throw Error(ErrorKind::ResourceLimit,
                        "group order exceeds the cap of " + std::to_string(limits_.max_order));
          list.push_back(std::move(next));
        }
      }
    }
    lazy_->elements = std::move(list);
  });
  return lazy_->elements;
}

GroupAction generate_group(std::vector<Permutation> generators, std::size_t domain_size,
                           GroupLimits limits) {
  GroupAction action(domain_size, std::move(generators), limits);
  action.elements();
  return action;
}

GroupAction trivial_group(std::size_t n) { return GroupAction(n, {}); }

GroupAction cyclic_group(std::size_t n) {
  std::vector<Index> shift(n);
  for (std::size_t x = 0; x < n; ++x)
    shift[x] = Index((x + 1) % n);
  return GroupAction(n, {Permutation(std::move(shift))});
}

GroupAction dihedral_group(std::size_t n) {
  std::vector<Index> shift(n), flip(n);
  for (std::size_t x = 0; x < n; ++x) {
    shift[x] = Index((x + 1) % n);
    flip[x] = Index((n - x) % n);
  }
  return GroupAction(n, {Permutation(std::move(shift)), Permutation(std::move(flip))});
}

GroupAction symmetric_group(std::size_t n) {
  std::vector<Permutation> gens;
  if (n >= 2) {
    std::vector<Index> swap(n), cycle(n);
    std::iota(swap.begin(), swap.end(), Index{0});
    std::swap(swap[0], swap[1]);
    for (std::size_t x = 0; x < n; ++x)
      cycle[x] = Index((x + 1) % n);
    gens.emplace_back(std::move(swap));
    if (n > 2)
      gens.emplace_back(std::move(cycle));
  }
  return GroupAction(n, std::move(gens));
}

GroupAction hamming_group(std::size_t n) {
  if (n == 0 || n > 20)
    throw Error(ErrorKind::ResourceLimit, "hamming_group supports 1 <= n <= 20");
  const std::size_t size = std::size_t{1} << n;
  std::vector<Permutation> gens;
  const auto coordinates = symmetric_group(n);
  for (const auto &coord : coordinates.generators()) {
    std::vector<Index> images(size);
    for (std::size_t x = 0; x < size; ++x) {
      std::size_t y = 0;
      for (std::size_t l = 0; l < n; ++l)
        if (x >> l & 1u)
          y |= std::size_t{1} << coord(Index(l));
      images[x] = Index(y);
    }
    gens.emplace_back(std::move(images));
  }
  return GroupAction(size, std::move(gens));
}

PairOrbits::PairOrbits(std::size_t domain_size, std::vector<Index> orbit_of,
                       std::vector<std::pair<Index, Index>> representatives,
                       std::vector<std::size_t> sizes, std::vector<std::size_t> transpose_of)
    : domain_size_(domain_size), orbit_of_(std::move(orbit_of)),
      representatives_(std::move(representatives)), sizes_(std::move(sizes)),
      transpose_of_(std::move(transpose_of)) {}

namespace {

class DisjointSets {
public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // The smaller root wins, so every root is the minimum of its set.
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b)
      return;
    if (b < a)
      std::swap(a, b);
    parent_[b] = a;
  }

private:
  std::vector<std::size_t> parent_;
};

} // namespace

PairOrbits pair_orbits(const GroupAction &action) {
  const std::size_t n = action.domain_size();
  const std::size_t pairs = n * n;
  DisjointSets sets(pairs);
  for (const auto &g : action.generators())
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y)
        sets.unite(x * n + y, std::size_t(g(Index(x))) * n + g(Index(y)));

  constexpr Index unassigned = ~Index{0};
  std::vector<Index> root_label(pairs, unassigned);
  std::vector<Index> orbit_of(pairs);
  std::vector<std::pair<Index, Index>> reps;
  std::vector<std::size_t> sizes;
  for (std::size_t p = 0; p < pairs; ++p) {
    const std::size_t root = sets.find(p);
    if (root_label[root] == unassigned) {
      root_label[root] = Index(reps.size());
      reps.emplace_back(Index(p / n), Index(p % n));
      sizes.push_back(0);
    }
    orbit_of[p] = root_label[root];
    ++sizes[orbit_of[p]];
  }

  std::vector<std::size_t> transpose(reps.size());
  for (std::size_t r = 0; r < reps.size(); ++r)
    transpose[r] = orbit_of[std::size_t(reps[r].second) * n + reps[r].first];

  return PairOrbits(n, std::move(orbit_of), std::move(reps), std::move(sizes), std::move(transpose));
}

RMatrix canonical_basis_matrix(const PairOrbits &orbits, std::size_t r) {
  if (r >= orbits.count())
    throw Error(ErrorKind::Index, "orbit index " + std::to_string(r) + " out of range");
  const auto n = orbits.domain_size();
  RMatrix b = RMatrix::Zero(n, n);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (orbits.orbit(Index(x), Index(y)) == r)
        b(x, y) = 1.0;
  return b;
}

RMatrix permutation_matrix(const Permutation &a) {
  const auto n = a.size();
  RMatrix p = RMatrix::Zero(n, n);
  for (std::size_t y = 0; y < n; ++y)
    p(a(Index(y)), y) = 1.0;
  return p;
}

std::vector<double> orbit_structure_constants(const PairOrbits &orbits) {
  const std::size_t n = orbits.domain_size();
  const std::size_t count = orbits.count();
  std::vector<double> c(count * count * count, 0.0);
  for (std::size_t t = 0; t < count; ++t) {
    const auto [x, y] = orbits.representative(t);
    for (std::size_t z = 0; z < n; ++z) {
      const std::size_t r = orbits.orbit(x, Index(z));
      const std::size_t s = orbits.orbit(Index(z), y);
      c[(r * count + s) * count + t] += 1.0;
    }
  }
  return c;
}

} // namespace symsdp
