#include "symsdp/sdpreduce.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "symsdp/error.hpp"
#include "symsdp/numkernel.hpp"

namespace symsdp {

namespace {

constexpr double kImagTol = 1e-10;

void check_index(const SparseHermitian &m, Index x, Index y) {
  if (x >= m.dimension() || y >= m.dimension())
    throw Error(ErrorKind::MalformedInput, "entry (" + std::to_string(x) + ", " + std::to_string(y) +
                                               ") outside a " + std::to_string(m.dimension()) +
                                               "-dimensional matrix");
}

void check_domain(const SparseHermitian &m, const PairOrbits &orbits) {
  if (m.dimension() != orbits.domain_size())
    throw Error(ErrorKind::Shape, "SDP matrix dimension " + std::to_string(m.dimension()) +
                                      " does not match the group domain " +
                                      std::to_string(orbits.domain_size()));
}

double invariance_distance(const SparseHermitian &m, const PairOrbits &orbits) {
  check_domain(m, orbits);
  const CVector mean = orbit_means(m, orbits);
  std::vector<std::size_t> stored(orbits.count(), 0);
  double sum = 0.0;
  for (const auto &[pos, value] : m.entries()) {
    const auto r = orbits.orbit(pos.first, pos.second);
    ++stored[r];
    sum += std::norm(value - mean[Eigen::Index(r)]);
  }
  for (std::size_t r = 0; r < orbits.count(); ++r)
    sum += double(orbits.size(r) - stored[r]) * std::norm(mean[Eigen::Index(r)]);
  return std::sqrt(sum);
}

SparseHermitian averaged(const SparseHermitian &m, const PairOrbits &orbits) {
  const CVector mean = orbit_means(m, orbits);
  SparseHermitian out(m.dimension());
  const auto n = orbits.domain_size();
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x; y < n; ++y) {
      const Complex value = mean[Eigen::Index(orbits.orbit(Index(x), Index(y)))];
      if (value != Complex(0.0))
        out.add(Index(x), Index(y), x == y ? Complex(value.real(), 0.0) : value);
    }
  return out;
}

CMatrix embed_real(const CMatrix &z) {
  const auto m = z.rows();
  RMatrix out(2 * m, 2 * m);
  out.topLeftCorner(m, m) = z.real();
  out.topRightCorner(m, m) = -z.imag();
  out.bottomLeftCorner(m, m) = z.imag();
  out.bottomRightCorner(m, m) = z.real();
  return out.cast<Complex>();
}

double max_imag(const CMatrix &z) { return z.size() == 0 ? 0.0 : z.imag().cwiseAbs().maxCoeff(); }

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

} // namespace

void SparseHermitian::add(Index x, Index y, Complex value) {
  check_index(*this, x, y);
  if (x == y) {
    if (std::abs(value.imag()) > 1e-12)
      throw Error(ErrorKind::MalformedInput, "diagonal entry (" + std::to_string(x) + ", " +
                                                 std::to_string(x) + ") of a Hermitian matrix is not real");
    entries_[{x, x}] += Complex(value.real(), 0.0);
    return;
  }
  entries_[{x, y}] += value;
  entries_[{y, x}] += std::conj(value);
}

CMatrix SparseHermitian::dense() const {
  CMatrix out = CMatrix::Zero(Eigen::Index(dim_), Eigen::Index(dim_));
  for (const auto &[pos, value] : entries_)
    out(pos.first, pos.second) = value;
  return out;
}

SparseHermitian SparseHermitian::from_dense(const CMatrix &m, double drop_tol) {
  if (!is_hermitian(m, 1e-12))
    throw Error(ErrorKind::Contract, "from_dense: matrix is not Hermitian");
  SparseHermitian out(std::size_t(m.rows()));
  for (Eigen::Index x = 0; x < m.rows(); ++x)
    for (Eigen::Index y = x; y < m.cols(); ++y)
      if (std::abs(m(x, y)) > drop_tol)
        out.add(Index(x), Index(y), x == y ? Complex(m(x, x).real(), 0.0) : m(x, y));
  return out;
}

CVector orbit_means(const SparseHermitian &m, const PairOrbits &orbits) {
  check_domain(m, orbits);
  CVector sums = CVector::Zero(Eigen::Index(orbits.count()));
  for (const auto &[pos, value] : m.entries())
    sums[Eigen::Index(orbits.orbit(pos.first, pos.second))] += value;
  for (std::size_t r = 0; r < orbits.count(); ++r)
    sums[Eigen::Index(r)] /= double(orbits.size(r));
  return sums;
}

CVector trace_products(const SparseHermitian &m, const PairOrbits &orbits) {
  check_domain(m, orbits);
  // trace(M B_r) = sum over (x, y) in R_r of M(y, x)
  CVector out = CVector::Zero(Eigen::Index(orbits.count()));
  for (const auto &[pos, value] : m.entries())
    out[Eigen::Index(orbits.orbit(pos.second, pos.first))] += value;
  return out;
}

InvarianceReport check_invariance(const InvariantSDP &sdp, const PairOrbits &orbits, double tol) {
  InvarianceReport report;
  report.distances.push_back(invariance_distance(sdp.objective, orbits));
  for (const auto &c : sdp.constraints)
    report.distances.push_back(invariance_distance(c.matrix, orbits));
  report.max_distance = *std::max_element(report.distances.begin(), report.distances.end());
  report.invariant = report.max_distance < tol;
  return report;
}

InvariantSDP symmetrize(const InvariantSDP &sdp, const PairOrbits &orbits) {
  InvariantSDP out;
  out.name = sdp.name;
  out.domain_size = sdp.domain_size;
  out.objective = averaged(sdp.objective, orbits);
  for (const auto &c : sdp.constraints)
    out.constraints.push_back({averaged(c.matrix, orbits), c.rhs});
  return out;
}

ReducedSDP reduce(const InvariantSDP &sdp, const PairOrbits &orbits, const Decomposition &decomposition,
                  const BlockImage &image, double tol) {
  const auto report = check_invariance(sdp, orbits, tol);
  if (!report.invariant)
    throw Error(ErrorKind::Invariance, "SDP data is not invariant (distance " +
                                           format_double(report.max_distance) +
                                           " to the group average); symmetrize it first");
  if (image.orbit_count() != orbits.count() || image.block_count() != decomposition.block_count())
    throw Error(ErrorKind::Shape, "block image does not match the decomposition");

  ReducedSDP out;
  out.name = sdp.name;
  out.domain_size = orbits.domain_size();
  out.orbit_sizes = orbits.sizes();
  out.transpose_of = orbits.transpose_map();
  out.objective = trace_products(sdp.objective, orbits);
  out.objective_values = orbit_means(sdp.objective, orbits);
  for (const auto &c : sdp.constraints) {
    out.rows.push_back(trace_products(c.matrix, orbits));
    out.row_values.push_back(orbit_means(c.matrix, orbits));
    out.rhs.push_back(c.rhs);
  }
  for (const auto &b : decomposition.blocks()) {
    out.block_dims.push_back(b.h);
    out.block_sizes.push_back(b.m);
  }
  out.pencils.resize(orbits.count());
  for (std::size_t r = 0; r < orbits.count(); ++r)
    for (std::size_t k = 0; k < image.block_count(); ++k)
      out.pencils[r].push_back(image(r, k));
  return out;
}

ReducedSDP realify(const ReducedSDP &reduced) {
  if (reduced.realified)
    return reduced;
  const std::size_t count = reduced.pencils.size();
  const std::size_t blocks = reduced.block_sizes.size();

  bool all_real = true;
  for (const auto &per_block : reduced.pencils)
    for (const auto &p : per_block)
      all_real = all_real && max_imag(p) < kImagTol;
  auto real_vector = [](const CVector &v) { return v.size() == 0 || v.imag().cwiseAbs().maxCoeff() < kImagTol; };
  all_real = all_real && real_vector(reduced.objective_values);
  for (const auto &v : reduced.row_values)
    all_real = all_real && real_vector(v);

  ReducedSDP out;
  out.name = reduced.name;
  out.domain_size = reduced.domain_size;
  out.orbit_sizes = reduced.orbit_sizes;
  out.transpose_of = reduced.transpose_of;
  out.rhs = reduced.rhs;
  out.block_dims = reduced.block_dims;
  out.realified = true;

  const std::size_t rows = reduced.rows.size();
  std::vector<std::vector<Complex>> obj_parts(2), row_parts(2 * rows);
  std::vector<Complex> objective, objective_values;
  std::vector<std::vector<Complex>> row_coeffs(rows), row_vals(rows);
  std::vector<std::vector<CMatrix>> pencils;

  auto push = [&](RealVariable var, std::vector<CMatrix> pencil, auto coeff, auto value) {
    out.variables.push_back(var);
    pencils.push_back(std::move(pencil));
    objective.push_back(coeff(reduced.objective));
    objective_values.push_back(value(reduced.objective_values));
    for (std::size_t i = 0; i < rows; ++i) {
      row_coeffs[i].push_back(coeff(reduced.rows[i]));
      row_vals[i].push_back(value(reduced.row_values[i]));
    }
  };

  for (std::size_t r = 0; r < count; ++r) {
    const std::size_t t = reduced.transpose_of[r];
    const auto er = Eigen::Index(r), et = Eigen::Index(t);
    if (t == r) {
      push({RealVariable::Kind::Self, r}, reduced.pencils[r],
           [&](const CVector &c) { return Complex(c[er].real(), 0.0); },
           [&](const CVector &v) { return Complex(v[er].real(), 0.0); });
    } else if (r < t) {
      std::vector<CMatrix> re, im;
      for (std::size_t k = 0; k < blocks; ++k) {
        re.push_back(reduced.pencils[r][k] + reduced.pencils[t][k]);
        im.push_back(Complex(0.0, 1.0) * (reduced.pencils[r][k] - reduced.pencils[t][k]));
      }
      push({RealVariable::Kind::RealPart, r}, std::move(re),
           [&](const CVector &c) { return Complex(2.0 * c[er].real(), 0.0); },
           [&](const CVector &v) { return Complex(v[er].real(), 0.0); });
      // With real pencils and real data the imaginary parts carry no
      // objective, no constraint and can be zeroed in any feasible point.
      if (!all_real)
        push({RealVariable::Kind::ImagPart, r}, std::move(im),
             [&](const CVector &c) { return Complex(-2.0 * c[er].imag(), 0.0); },
             [&](const CVector &v) { return Complex(v[er].imag(), 0.0); });
    }
    (void)et;
  }

  auto to_vector = [](const std::vector<Complex> &v) {
    return CVector(Eigen::Map<const CVector>(v.data(), Eigen::Index(v.size())));
  };
  out.objective = to_vector(objective);
  out.objective_values = to_vector(objective_values);
  for (std::size_t i = 0; i < rows; ++i) {
    out.rows.push_back(to_vector(row_coeffs[i]));
    out.row_values.push_back(to_vector(row_vals[i]));
  }

  out.doubled.assign(blocks, false);
  for (std::size_t k = 0; k < blocks; ++k)
    for (const auto &p : pencils)
      if (max_imag(p[k]) >= kImagTol)
        out.doubled[k] = true;
  for (std::size_t k = 0; k < blocks; ++k)
    out.block_sizes.push_back(out.doubled[k] ? 2 * reduced.block_sizes[k] : reduced.block_sizes[k]);
  for (auto &p : pencils)
    for (std::size_t k = 0; k < blocks; ++k)
      p[k] = out.doubled[k] ? embed_real(p[k]) : CMatrix(p[k].real().cast<Complex>());
  out.pencils = std::move(pencils);
  return out;
}

SdpaProblem to_sdpa(const ReducedSDP &reduced, double drop_tol) {
  if (!reduced.realified)
    throw Error(ErrorKind::Contract, "SDPA export needs a realified program");
  SdpaProblem problem;
  for (auto s : reduced.block_sizes)
    problem.block_sizes.push_back(int(s));
  problem.rhs = reduced.rhs;

  auto emit = [&](int matrix, const CVector &values) {
    for (std::size_t k = 0; k < reduced.block_sizes.size(); ++k) {
      const auto size = Eigen::Index(reduced.block_sizes[k]);
      RMatrix f = RMatrix::Zero(size, size);
      for (std::size_t v = 0; v < reduced.variable_count(); ++v)
        f += values[Eigen::Index(v)].real() * reduced.pencils[v][k].real();
      f *= double(reduced.block_dims[k]) * (reduced.doubled[k] ? 0.5 : 1.0);
      for (Eigen::Index i = 0; i < size; ++i)
        for (Eigen::Index j = i; j < size; ++j) {
          const double value = (f(i, j) + f(j, i)) / 2.0;
          if (std::abs(value) > drop_tol)
            problem.entries.push_back({matrix, int(k) + 1, int(i) + 1, int(j) + 1, value});
        }
    }
  };
  emit(0, reduced.objective_values);
  for (std::size_t i = 0; i < reduced.row_values.size(); ++i)
    emit(int(i) + 1, reduced.row_values[i]);
  return problem;
}

void write_sdpa(const SdpaProblem &problem, std::ostream &out) {
  out << problem.constraint_count() << '\n';
  out << problem.block_sizes.size() << '\n';
  for (std::size_t k = 0; k < problem.block_sizes.size(); ++k)
    out << (k ? " " : "") << problem.block_sizes[k];
  out << '\n';
  for (std::size_t i = 0; i < problem.rhs.size(); ++i)
    out << (i ? " " : "") << format_double(problem.rhs[i]);
  out << '\n';
  for (const auto &e : problem.entries)
    out << e.matrix << ' ' << e.block << ' ' << e.row << ' ' << e.col << ' ' << format_double(e.value)
        << '\n';
}

void export_sdpa(const ReducedSDP &reduced, const std::filesystem::path &path) {
  const auto problem = to_sdpa(reduced);
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file)
    throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  write_sdpa(problem, file);
  if (!file)
    throw Error(ErrorKind::Io, "failed writing " + path.string());
}

SdpaProblem parse_sdpa(std::istream &in) {
  auto fail = [](const std::string &what) { throw Error(ErrorKind::MalformedInput, "SDPA: " + what); };
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && (line[0] == '"' || line[0] == '*'))
      continue;
    for (char &c : line)
      if (c == ',' || c == '{' || c == '}' || c == '(' || c == ')')
        c = ' ';
    lines.push_back(line);
  }
  if (lines.size() < 3)
    fail("truncated header");

  SdpaProblem problem;
  long constraints = 0, blocks = 0;
  {
    std::istringstream a(lines[0]), b(lines[1]);
    if (!(a >> constraints) || !(b >> blocks) || constraints < 0 || blocks < 0)
      fail("bad constraint or block count");
  }
  {
    std::istringstream s(lines[2]);
    for (long k = 0; k < blocks; ++k) {
      int size;
      if (!(s >> size) || size == 0)
        fail("bad block size list");
      problem.block_sizes.push_back(size);
    }
  }
  std::size_t next = 3;
  {
    // The right-hand side may wrap over several lines.
    std::string joined;
    while (long(problem.rhs.size()) < constraints) {
      if (next >= lines.size())
        fail("truncated right-hand side");
      std::istringstream s(lines[next++]);
      double value;
      while (long(problem.rhs.size()) < constraints && s >> value)
        problem.rhs.push_back(value);
    }
    if (constraints == 0 && next < lines.size()) {
      std::istringstream s(lines[next]);
      std::string token;
      if (!(s >> token))
        ++next; // empty right-hand-side line
    }
  }
  for (; next < lines.size(); ++next) {
    std::istringstream s(lines[next]);
    SdpaEntry e;
    if (!(s >> e.matrix)) {
      continue; // blank line
    }
    if (!(s >> e.block >> e.row >> e.col >> e.value))
      fail("bad entry line " + std::to_string(next + 1));
    if (e.matrix < 0 || e.matrix > constraints || e.block < 1 || e.block > blocks)
      fail("entry index out of range on line " + std::to_string(next + 1));
    const int size = std::abs(problem.block_sizes[std::size_t(e.block - 1)]);
    if (e.row < 1 || e.col < 1 || e.row > size || e.col > size)
      fail("entry position out of range on line " + std::to_string(next + 1));
    problem.entries.push_back(e);
  }
  return problem;
}

LiftReport lift_solution(const CVector &y, const PairOrbits &orbits, const InvariantSDP &sdp,
                         const ReducedSDP &reduced, double psd_tol, double pairing_tol) {
  if (reduced.realified)
    throw Error(ErrorKind::Contract, "lift_solution works on the complex reduced program");
  if (std::size_t(y.size()) != orbits.count())
    throw Error(ErrorKind::MalformedInput, "expected " + std::to_string(orbits.count()) +
                                               " orbit values, got " + std::to_string(y.size()));
  for (std::size_t r = 0; r < orbits.count(); ++r) {
    const std::size_t t = orbits.transpose(r);
    const Complex yr = y[Eigen::Index(r)];
    if (std::abs(yr - std::conj(y[Eigen::Index(t)])) > pairing_tol)
      throw Error(ErrorKind::MalformedInput, "orbit values violate y_" + std::to_string(t) + " = conj(y_" +
                                                 std::to_string(r) + ")");
  }

  LiftReport report;
  report.Y = from_orbit_values(orbits, y);
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(report.Y, Eigen::EigenvaluesOnly);
  report.min_eigenvalue = solver.eigenvalues().size() ? solver.eigenvalues()[0] : 0.0;

  std::vector<CMatrix> blocks;
  for (std::size_t k = 0; k < reduced.block_sizes.size(); ++k) {
    const auto m = Eigen::Index(reduced.block_sizes[k]);
    CMatrix sum = CMatrix::Zero(m, m);
    for (std::size_t r = 0; r < reduced.pencils.size(); ++r)
      sum += y[Eigen::Index(r)] * reduced.pencils[r][k];
    Eigen::SelfAdjointEigenSolver<CMatrix> block_solver((sum + sum.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
    report.block_min_eigenvalues.push_back(block_solver.eigenvalues()[0]);
  }

  auto full_trace = [&](const SparseHermitian &m) {
    Complex sum = 0.0;
    for (const auto &[pos, value] : m.entries())
      sum += value * report.Y(pos.second, pos.first);
    return sum;
  };
  report.objective_full = full_trace(sdp.objective);
  report.objective_reduced = reduced.objective.dot(y.conjugate()); // sum c_r y_r
  const double gap = std::abs(report.objective_full - report.objective_reduced);
  if (gap > 1e-8 * std::max(1.0, std::abs(report.objective_full)))
    throw VerificationError("full and reduced objectives disagree", gap);
  for (std::size_t i = 0; i < sdp.constraints.size(); ++i)
    report.constraint_residuals.push_back(std::abs(full_trace(sdp.constraints[i].matrix) - sdp.constraints[i].rhs));
  report.psd = report.min_eigenvalue >= -psd_tol;
  return report;
}

} // namespace symsdp
