#include "symsdp/decomposer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <limits>
#include <random>
#include <string>
#include <tuple>

#include "symsdp/numkernel.hpp"

namespace symsdp {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Independent streams derived from one user seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0) {
  return splitmix64(splitmix64(seed ^ (stream * 0xD1B54A32D192ED03ull)) + index);
}

enum Stream : std::uint64_t {
  kSampleStream = 1,
  kIrreducibleStream = 2,
  kIntertwinerStream = 3,
  kRefineStream = 4,
  kRealStream = 5,
};

CMatrix random_complex_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed, bool real = false) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  CMatrix out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double re = uniform(rng);
      const double im = uniform(rng);
      out(i, j) = Complex(re, real ? 0.0 : im);
    }
  return out;
}

// (P_a V)(a(y), :) = V(y, :).
CMatrix permute_rows(const CMatrix &v, const Permutation &a) {
  CMatrix out(v.rows(), v.cols());
  for (Eigen::Index y = 0; y < v.rows(); ++y)
    out.row(a(Index(y))) = v.row(y);
  return out;
}

// (1/|G|) sum_a R_to(a) P R_from(a)^*
CMatrix average_map(const GroupAction &action, const IrreducibleSpace &from,
                    const IrreducibleSpace &to, const CMatrix &p) {
  CMatrix sum = CMatrix::Zero(p.rows(), p.cols());
  for (const auto &a : action.elements())
    sum.noalias() += restricted_action(to, a) * p * restricted_action(from, a).adjoint();
  return sum / double(action.order());
}

CMatrix polar_unitary(const CMatrix &t, bool real) {
  if (real) {
    Eigen::JacobiSVD<RMatrix> svd(t.real(), Eigen::ComputeFullU | Eigen::ComputeFullV);
    return (svd.matrixU() * svd.matrixV().transpose()).cast<Complex>();
  }
  Eigen::JacobiSVD<CMatrix> svd(t, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

void fix_phase(CMatrix &u) {
  const double scale = u.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < u.rows(); ++i)
    for (Eigen::Index j = 0; j < u.cols(); ++j)
      if (std::abs(u(i, j)) > 1e-8 * scale) {
        u *= std::conj(u(i, j)) / std::abs(u(i, j));
        return;
      }
}

template <typename Matrix>
std::vector<CMatrix> cluster_bases(const Matrix &m, double cluster_tol) {
  std::vector<CMatrix> out;
  for (const auto &c : hermitian_eig(m, cluster_tol).clusters)
    out.push_back(c.basis.template cast<Complex>());
  return out;
}

// Real mode works with real symmetric samples only, so every basis stays real.
std::vector<CMatrix> invariant_clusters(const CMatrix &m, double cluster_tol, bool real) {
  if (real)
    return cluster_bases(RMatrix(m.real()), cluster_tol);
  return cluster_bases(m, cluster_tol);
}

std::vector<IrreducibleSpace> eigenspaces(const PairOrbits &orbits, std::uint64_t seed,
                                          double cluster_tol, bool real) {
  const double root = std::sqrt(double(orbits.domain_size()));
  std::vector<IrreducibleSpace> spaces;
  for (auto &basis : invariant_clusters(from_orbit_values(orbits, random_hermitian_coefficients(orbits, seed, real)),
                                        cluster_tol, real))
    spaces.push_back({basis * root});
  return spaces;
}

// Splits a G-invariant space by the eigenspaces of a second random invariant
// matrix compressed to it.
std::vector<IrreducibleSpace> refine(const GroupAction &action, const PairOrbits &orbits,
                                     const IrreducibleSpace &space, std::uint64_t seed,
                                     const DecomposeOptions &options, int depth) {
  if (is_irreducible(action, space, derive_seed(seed, kIrreducibleStream), options.intertwiner_tol))
    return {space};
  if (depth >= 4)
    throw Error(ErrorKind::DegenerateSample,
                "could not split a reducible eigenspace of dimension " +
                    std::to_string(space.dimension()) + " after refinement");
  const double n = double(orbits.domain_size());
  const CMatrix m = random_invariant_hermitian(orbits, derive_seed(seed, kRefineStream, depth));
  const CMatrix compressed = space.basis.adjoint() * m * space.basis / n;
  const auto spectrum = hermitian_eig(compressed, options.cluster_tol);
  if (spectrum.clusters.size() == 1)
    return refine(action, orbits, space, derive_seed(seed, kRefineStream, depth + 100), options, depth + 1);
  std::vector<IrreducibleSpace> out;
  for (const auto &c : spectrum.clusters) {
    auto parts = refine(action, orbits, {space.basis * c.basis}, derive_seed(seed, depth + 7), options,
                        depth + 1);
    out.insert(out.end(), parts.begin(), parts.end());
  }
  return out;
}

struct BlockKey {
  std::size_t m;
  std::size_t h;
  std::vector<long long> diagonal;
};

bool key_less(const BlockKey &a, const BlockKey &b) {
  if (a.m != b.m)
    return a.m > b.m;
  if (a.h != b.h)
    return a.h < b.h;
  return a.diagonal > b.diagonal;
}

// The central idempotent of a block is basis independent; its values on the
// orbit representatives separate blocks with equal (m, h).
BlockKey block_key(const IsotypicBlock &block, const PairOrbits &orbits) {
  const double n = double(orbits.domain_size());
  BlockKey key{block.m, block.h, {}};
  key.diagonal.reserve(2 * orbits.count());
  for (std::size_t r = 0; r < orbits.count(); ++r) {
    const auto [x, y] = orbits.representative(r);
    Complex z = 0.0;
    for (const auto &s : block.spaces)
      z += s.basis.row(y).dot(s.basis.row(x)); // sum_l V(x,l) conj(V(y,l))
    z /= n;
    key.diagonal.push_back(std::llround(z.real() * 1e6));
    key.diagonal.push_back(std::llround(z.imag() * 1e6));
  }
  return key;
}

void check_below(double residual, double tol, const char *what) {
  if (!(residual <= tol))
    throw VerificationError(what, residual);
}

} // namespace

Decomposition::Decomposition(std::size_t domain_size, std::vector<IsotypicBlock> blocks)
    : domain_size_(domain_size), blocks_(std::move(blocks)) {
  index_tuples();
  e_.reserve(offsets_.back());
  const double n = double(domain_size_);
  for (const auto &b : blocks_)
    for (std::size_t i = 0; i < b.m; ++i)
      for (std::size_t j = 0; j < b.m; ++j)
        e_.push_back(b.spaces[i].basis * b.spaces[j].basis.adjoint() / n);
}

Decomposition::Decomposition(std::size_t domain_size, std::vector<IsotypicBlock> blocks,
                             std::vector<CMatrix> e_matrices)
    : domain_size_(domain_size), blocks_(std::move(blocks)), e_(std::move(e_matrices)) {
  index_tuples();
  if (e_.size() != offsets_.back())
    throw Error(ErrorKind::Shape, "E matrix count does not match sum of m_k^2");
}

void Decomposition::index_tuples() {
  offsets_.clear();
  std::size_t total = 0;
  for (const auto &b : blocks_) {
    if (b.spaces.size() != b.m && !b.spaces.empty())
      throw Error(ErrorKind::Shape, "isotypic block lists a different number of spaces than m");
    offsets_.push_back(total);
    total += b.m * b.m;
  }
  offsets_.push_back(total);
}

BlockImage::BlockImage(std::vector<std::size_t> block_sizes,
                       std::vector<std::vector<CMatrix>> per_orbit)
    : sizes_(std::move(block_sizes)), blocks_(std::move(per_orbit)) {
  for (const auto &orbit : blocks_) {
    if (orbit.size() != sizes_.size())
      throw Error(ErrorKind::Shape, "block image has the wrong number of blocks");
    for (std::size_t k = 0; k < sizes_.size(); ++k)
      if (std::size_t(orbit[k].rows()) != sizes_[k] || std::size_t(orbit[k].cols()) != sizes_[k])
        throw Error(ErrorKind::Shape, "block image block has the wrong size");
  }
}

std::vector<CMatrix> BlockImage::apply(const CVector &y) const {
  if (std::size_t(y.size()) != orbit_count())
    throw Error(ErrorKind::Shape, "coefficient vector length does not match the orbit count");
  std::vector<CMatrix> out;
  for (auto m : sizes_)
    out.push_back(CMatrix::Zero(Eigen::Index(m), Eigen::Index(m)));
  for (std::size_t r = 0; r < orbit_count(); ++r)
    for (std::size_t k = 0; k < sizes_.size(); ++k)
      out[k] += y[Eigen::Index(r)] * blocks_[r][k];
  return out;
}

CVector random_hermitian_coefficients(const PairOrbits &orbits, std::uint64_t seed, bool real) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  CVector y = CVector::Zero(Eigen::Index(orbits.count()));
  for (std::size_t r = 0; r < orbits.count(); ++r) {
    const std::size_t t = orbits.transpose(r);
    if (t == r) {
      y[Eigen::Index(r)] = uniform(rng);
    } else if (r < t) {
      const double re = uniform(rng);
      const double im = uniform(rng);
      y[Eigen::Index(r)] = Complex(re, real ? 0.0 : im);
      y[Eigen::Index(t)] = Complex(re, real ? 0.0 : -im);
    }
  }
  return y;
}

CMatrix random_invariant_hermitian(const PairOrbits &orbits, std::uint64_t seed) {
  return from_orbit_values(orbits, random_hermitian_coefficients(orbits, seed));
}

CMatrix restricted_action(const IrreducibleSpace &space, const Permutation &a) {
  return space.basis.adjoint() * permute_rows(space.basis, a) / double(space.basis.rows());
}

std::optional<CMatrix> intertwiner(const GroupAction &action, const IrreducibleSpace &from,
                                   const IrreducibleSpace &to, std::uint64_t seed, double tol, bool real) {
  const auto h = Eigen::Index(from.dimension());
  if (from.dimension() != to.dimension() || h == 0)
    return std::nullopt;
  const CMatrix p = random_complex_matrix(h, h, seed, real);
  const CMatrix t = average_map(action, from, to, p);
  const double norm2 = t.squaredNorm();
  if (std::sqrt(norm2) < tol * p.norm())
    return std::nullopt;
  CMatrix u = polar_unitary(t * std::sqrt(double(h) / norm2), real);
  fix_phase(u);
  return u;
}

bool is_irreducible(const GroupAction &action, const IrreducibleSpace &space, std::uint64_t seed,
                    double tol, bool real) {
  const auto h = Eigen::Index(space.dimension());
  if (h <= 1)
    return h == 1;
  const CMatrix p = random_complex_matrix(h, h, seed, real);
  const CMatrix t = average_map(action, space, space, p);
  const Complex scalar = t.trace() / double(h);
  const CMatrix off = t - scalar * CMatrix::Identity(h, h);
  return off.norm() <= tol * p.norm();
}

Decomposition decompose(const GroupAction &action, const PairOrbits &orbits,
                        const DecomposeOptions &options) {
  const std::size_t n = action.domain_size();
  if (orbits.domain_size() != n)
    throw Error(ErrorKind::Shape, "orbit table and action have different domain sizes");

  auto irreducible = [&](const std::vector<IrreducibleSpace> &list, std::uint64_t seed, bool real) {
    return std::all_of(list.begin(), list.end(), [&](const IrreducibleSpace &s) {
      return is_irreducible(action, s, derive_seed(seed, kIrreducibleStream), options.intertwiner_tol, real);
    });
  };

  std::vector<IrreducibleSpace> spaces;
  bool real = false;
  if (options.prefer_real) {
    const auto seed = derive_seed(options.seed, kRealStream);
    spaces = eigenspaces(orbits, seed, options.cluster_tol, true);
    real = irreducible(spaces, seed, true);
  }
  bool all_irreducible = real;
  std::uint64_t sample_seed = 0;
  for (int attempt = 0; attempt <= options.max_retries && !all_irreducible; ++attempt) {
    sample_seed = derive_seed(options.seed, kSampleStream, std::uint64_t(attempt));
    spaces = eigenspaces(orbits, sample_seed, options.cluster_tol, false);
    all_irreducible = irreducible(spaces, sample_seed, false);
  }
  if (!all_irreducible) {
    std::vector<IrreducibleSpace> refined;
    for (std::size_t s = 0; s < spaces.size(); ++s) {
      auto parts = refine(action, orbits, spaces[s], derive_seed(sample_seed, kRefineStream, s), options, 0);
      refined.insert(refined.end(), parts.begin(), parts.end());
    }
    spaces = std::move(refined);
  }

  std::vector<IsotypicBlock> blocks;
  std::uint64_t pair_index = 0;
  for (auto &space : spaces) {
    bool placed = false;
    for (auto &block : blocks) {
      if (block.h != space.dimension())
        continue;
      const auto u = intertwiner(action, block.spaces.front(), space,
                                 derive_seed(options.seed, kIntertwinerStream, pair_index++),
                                 options.intertwiner_tol, real);
      if (u) {
        block.spaces.push_back({space.basis * *u});
        ++block.m;
        placed = true;
        break;
      }
    }
    if (!placed)
      blocks.push_back({space.dimension(), 1, {std::move(space)}});
  }

  std::vector<BlockKey> keys;
  for (const auto &b : blocks)
    keys.push_back(block_key(b, orbits));
  std::vector<std::size_t> order(blocks.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return key_less(keys[a], keys[b]); });
  std::vector<IsotypicBlock> sorted;
  for (auto idx : order)
    sorted.push_back(std::move(blocks[idx]));

  Decomposition result(n, std::move(sorted));

  std::size_t dim_sum = 0, square_sum = 0;
  for (const auto &b : result.blocks()) {
    dim_sum += b.h * b.m;
    square_sum += b.m * b.m;
  }
  if (dim_sum != n)
    throw VerificationError("sum h_k m_k = " + std::to_string(dim_sum) + " differs from |X| = " +
                                std::to_string(n),
                            double(dim_sum) - double(n));
  if (square_sum != orbits.count())
    throw VerificationError("sum m_k^2 = " + std::to_string(square_sum) +
                                " differs from the orbit count " + std::to_string(orbits.count()),
                            double(square_sum) - double(orbits.count()));

  if (options.verify) {
    check_below(adjoint_residual(result), options.tol, "E_{k,j,i} != E_{k,i,j}^*");
    check_below(idempotent_residual(result), options.tol, "E_{k,i,i} not a rank-h_k idempotent");
    check_below(commutant_residual(result, action), options.tol, "E not in the commutant");
    check_below(verify_multiplication(result), options.tol, "multiplication formula");
  }
  return result;
}

CMatrix q_values(const Decomposition &decomposition, const PairOrbits &orbits) {
  const double n = double(decomposition.domain_size());
  CMatrix q(Eigen::Index(decomposition.tuple_count()), Eigen::Index(orbits.count()));
  for (std::size_t t = 0; t < decomposition.tuple_count(); ++t)
    for (std::size_t r = 0; r < orbits.count(); ++r) {
      const auto [x, y] = orbits.representative(r);
      q(Eigen::Index(t), Eigen::Index(r)) = n * decomposition.e_matrices()[t](x, y);
    }
  return q;
}

BlockImage coefficients_p(const Decomposition &decomposition, const PairOrbits &orbits, double tol) {
  const double n = double(decomposition.domain_size());
  const CMatrix q = q_values(decomposition, orbits);
  std::vector<std::size_t> sizes;
  for (const auto &b : decomposition.blocks())
    sizes.push_back(b.m);

  std::vector<std::vector<CMatrix>> per_orbit(orbits.count());
  for (std::size_t r = 0; r < orbits.count(); ++r) {
    const double v = double(orbits.size(r));
    for (std::size_t k = 0; k < decomposition.block_count(); ++k) {
      const auto m = Eigen::Index(decomposition.m(k));
      CMatrix block(m, m);
      for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j) {
          const auto t = Eigen::Index(decomposition.tuple_index(k, std::size_t(i), std::size_t(j)));
          block(i, j) = v * std::conj(q(t, Eigen::Index(r))) / (n * double(decomposition.h(k)));
        }
      per_orbit[r].push_back(std::move(block));
    }
  }
  BlockImage image(std::move(sizes), std::move(per_orbit));
  check_below(reconstruction_residual(decomposition, image, orbits), tol, "reconstruction of B_r");
  return image;
}

double verify_multiplication(const Decomposition &decomposition) {
  const auto &e = decomposition.e_matrices();
  const auto n = Eigen::Index(decomposition.domain_size());
  const auto count = Eigen::Index(e.size());
  if (count == 0)
    return 0.0;

  // Right factors side by side so each left factor is one wide product.
  CMatrix wide(n, n * count);
  for (Eigen::Index t = 0; t < count; ++t)
    wide.middleCols(t * n, n) = e[std::size_t(t)];

  double worst = 0.0;
  CMatrix product(n, n * count);
  for (std::size_t k = 0; k < decomposition.block_count(); ++k) {
    const auto m = decomposition.m(k);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        product.noalias() = decomposition.E(k, i, j) * wide;
        for (std::size_t k2 = 0; k2 < decomposition.block_count(); ++k2) {
          const auto m2 = decomposition.m(k2);
          for (std::size_t i2 = 0; i2 < m2; ++i2)
            for (std::size_t j2 = 0; j2 < m2; ++j2) {
              const auto t2 = Eigen::Index(decomposition.tuple_index(k2, i2, j2));
              auto block = product.middleCols(t2 * n, n);
              double r;
              if (k == k2 && j == i2)
                r = (block - decomposition.E(k, i, j2)).norm();
              else
                r = block.norm();
              worst = std::max(worst, r);
            }
        }
      }
  }
  return worst;
}

double verify_orthogonality(const Decomposition &decomposition, const PairOrbits &orbits) {
  const double n = double(decomposition.domain_size());
  const CMatrix q = q_values(decomposition, orbits);
  RVector v(Eigen::Index(orbits.count()));
  for (std::size_t r = 0; r < orbits.count(); ++r)
    v[Eigen::Index(r)] = double(orbits.size(r));
  const CMatrix gram = q * v.asDiagonal() * q.adjoint();

  std::vector<double> h_of_tuple(decomposition.tuple_count());
  for (std::size_t k = 0; k < decomposition.block_count(); ++k)
    for (std::size_t i = 0; i < decomposition.m(k); ++i)
      for (std::size_t j = 0; j < decomposition.m(k); ++j)
        h_of_tuple[decomposition.tuple_index(k, i, j)] = double(decomposition.h(k));

  double worst = 0.0;
  for (Eigen::Index a = 0; a < gram.rows(); ++a) {
    const double scale = n * n * h_of_tuple[std::size_t(a)];
    for (Eigen::Index b = 0; b < gram.cols(); ++b) {
      const double target = a == b ? scale : 0.0;
      worst = std::max(worst, std::abs(gram(a, b) - target) / scale);
    }
  }
  return worst;
}

double reconstruction_residual(const Decomposition &decomposition, const BlockImage &image,
                               const PairOrbits &orbits) {
  const auto n = Eigen::Index(decomposition.domain_size());
  double worst = 0.0;
  for (std::size_t r = 0; r < orbits.count(); ++r) {
    CMatrix sum = CMatrix::Zero(n, n);
    for (std::size_t k = 0; k < decomposition.block_count(); ++k) {
      const auto &p = image(r, k);
      for (std::size_t i = 0; i < decomposition.m(k); ++i)
        for (std::size_t j = 0; j < decomposition.m(k); ++j)
          sum += p(Eigen::Index(i), Eigen::Index(j)) * decomposition.E(k, i, j);
    }
    worst = std::max(worst, (sum - canonical_basis_matrix(orbits, r).cast<Complex>()).norm());
  }
  return worst;
}

double commutant_residual(const Decomposition &decomposition, const GroupAction &action) {
  double worst = 0.0;
  for (const auto &a : action.generators())
    for (const auto &e : decomposition.e_matrices()) {
      double sum = 0.0;
      for (Eigen::Index x = 0; x < e.rows(); ++x)
        for (Eigen::Index y = 0; y < e.cols(); ++y)
          sum += std::norm(e(a(Index(x)), a(Index(y))) - e(x, y));
      worst = std::max(worst, std::sqrt(sum));
    }
  return worst;
}

double adjoint_residual(const Decomposition &decomposition) {
  double worst = 0.0;
  for (std::size_t k = 0; k < decomposition.block_count(); ++k)
    for (std::size_t i = 0; i < decomposition.m(k); ++i)
      for (std::size_t j = 0; j < decomposition.m(k); ++j)
        worst = std::max(worst, (decomposition.E(k, j, i) - decomposition.E(k, i, j).adjoint()).norm());
  return worst;
}

double idempotent_residual(const Decomposition &decomposition) {
  double worst = 0.0;
  for (std::size_t k = 0; k < decomposition.block_count(); ++k)
    for (std::size_t i = 0; i < decomposition.m(k); ++i) {
      const auto &e = decomposition.E(k, i, i);
      worst = std::max(worst, std::abs(e.trace() - double(decomposition.h(k))));
      worst = std::max(worst, (e * e - e).norm());
    }
  return worst;
}

RVector replicated_block_spectrum(const BlockImage &image, const std::vector<std::size_t> &dims,
                                  const CVector &y) {
  const auto blocks = image.apply(y);
  std::vector<double> values;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const CMatrix sym = (blocks[k] + blocks[k].adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym, Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
      values.insert(values.end(), dims.at(k), solver.eigenvalues()[i]);
  }
  std::sort(values.begin(), values.end());
  return Eigen::Map<RVector>(values.data(), Eigen::Index(values.size()));
}

double spectrum_preservation_check(const Decomposition &decomposition, const BlockImage &image,
                                   const PairOrbits &orbits, int trials, std::uint64_t seed) {
  std::vector<std::size_t> dims;
  for (const auto &b : decomposition.blocks())
    dims.push_back(b.h);
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    const CVector y = random_hermitian_coefficients(orbits, derive_seed(seed, 99, std::uint64_t(trial)));
    const CMatrix full = from_orbit_values(orbits, y);
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(full, Eigen::EigenvaluesOnly);
    const RVector blocks = replicated_block_spectrum(image, dims, y);
    if (blocks.size() != solver.eigenvalues().size())
      return std::numeric_limits<double>::infinity();
    worst = std::max(worst, (solver.eigenvalues() - blocks).cwiseAbs().maxCoeff());
  }
  return worst;
}

std::vector<Complex> structure_constants(const BlockImage &image) {
  const std::size_t count = image.orbit_count();
  std::size_t flat = 0;
  for (auto m : image.block_sizes())
    flat += m * m;

  auto flatten = [&](const std::vector<CMatrix> &blocks, CMatrix::ColXpr column) {
    Eigen::Index row = 0;
    for (const auto &b : blocks)
      for (Eigen::Index i = 0; i < b.rows(); ++i)
        for (Eigen::Index j = 0; j < b.cols(); ++j)
          column[row++] = b(i, j);
  };

  CMatrix basis(static_cast<Eigen::Index>(flat), static_cast<Eigen::Index>(count));
  for (std::size_t r = 0; r < count; ++r) {
    std::vector<CMatrix> blocks;
    for (std::size_t k = 0; k < image.block_count(); ++k)
      blocks.push_back(image(r, k));
    flatten(blocks, basis.col(Eigen::Index(r)));
  }

  CMatrix products(static_cast<Eigen::Index>(flat), static_cast<Eigen::Index>(count * count));
  for (std::size_t r = 0; r < count; ++r)
    for (std::size_t s = 0; s < count; ++s) {
      std::vector<CMatrix> blocks;
      for (std::size_t k = 0; k < image.block_count(); ++k)
        blocks.push_back(image(r, k) * image(s, k));
      flatten(blocks, products.col(Eigen::Index(r * count + s)));
    }

  const CMatrix coeffs = basis.colPivHouseholderQr().solve(products);
  std::vector<Complex> out(count * count * count);
  for (std::size_t rs = 0; rs < count * count; ++rs)
    for (std::size_t t = 0; t < count; ++t)
      out[rs * count + t] = coeffs(Eigen::Index(t), Eigen::Index(rs));
  return out;
}

double DecompositionReport::max() const {
  return std::max({multiplication, orthogonality, reconstruction, commutant, adjoint, idempotent});
}

DecompositionReport verify_decomposition(const Decomposition &decomposition,
                                         const BlockImage &image, const GroupAction &action,
                                         const PairOrbits &orbits) {
  DecompositionReport report;
  report.multiplication = verify_multiplication(decomposition);
  report.orthogonality = verify_orthogonality(decomposition, orbits);
  report.reconstruction = reconstruction_residual(decomposition, image, orbits);
  report.commutant = commutant_residual(decomposition, action);
  report.adjoint = adjoint_residual(decomposition);
  report.idempotent = idempotent_residual(decomposition);
  return report;
}

} // namespace symsdp
