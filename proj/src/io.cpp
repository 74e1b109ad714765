#include "symsdp/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "symsdp/error.hpp"

namespace symsdp::io {

namespace {

[[noreturn]] void malformed(const std::string &what) { throw Error(ErrorKind::MalformedInput, what); }

const Json &field(const Json &doc, const char *name) {
  if (!doc.is_object() || !doc.contains(name))
    malformed(std::string("missing field \"") + name + "\"");
  return doc.at(name);
}

std::size_t as_size(const Json &v, const std::string &what) {
  if (!v.is_number_integer() || v.get<long long>() < 0)
    malformed(what + " must be a non-negative integer");
  return std::size_t(v.get<long long>());
}

double as_double(const Json &v, const std::string &what) {
  if (!v.is_number())
    malformed(what + " must be a number");
  return v.get<double>();
}

double clean(double v) { return std::abs(v) < 1e-14 ? 0.0 : v; }

using EntryMap = std::map<std::pair<Index, Index>, Complex>;

EntryMap parse_entries(const Json &list, std::size_t n, const std::string &what) {
  if (!list.is_array())
    malformed(what + " must be an array of [x, y, re, im]");
  EntryMap given;
  for (std::size_t e = 0; e < list.size(); ++e) {
    const Json &item = list[e];
    const std::string where = what + "[" + std::to_string(e) + "]";
    if (!item.is_array() || item.size() < 3 || item.size() > 4)
      malformed(where + " must be [x, y, re] or [x, y, re, im]");
    const auto x = as_size(item[0], where + " x");
    const auto y = as_size(item[1], where + " y");
    if (x >= n || y >= n)
      malformed(where + " index outside the domain of size " + std::to_string(n));
    const double re = as_double(item[2], where + " re");
    const double im = item.size() == 4 ? as_double(item[3], where + " im") : 0.0;
    given[{Index(x), Index(y)}] += Complex(re, im);
  }
  return given;
}

SparseHermitian close_hermitian(const EntryMap &given, std::size_t n, const std::string &what) {
  SparseHermitian out(n);
  for (const auto &[pos, value] : given) {
    const auto [x, y] = pos;
    if (x > y) {
      const auto mirror = given.find({y, x});
      if (mirror != given.end()) {
        if (std::abs(mirror->second - std::conj(value)) > 1e-12 * std::max(1.0, std::abs(value)))
          malformed(what + ": entries (" + std::to_string(x) + ", " + std::to_string(y) +
                    ") and its mirror are not conjugate");
        continue;
      }
    }
    try {
      out.add(x, y, value);
    } catch (const Error &e) {
      malformed(what + ": " + e.what());
    }
  }
  return out;
}

Json matrix_json(const CMatrix &m, bool real_only) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back(real_only ? Json(clean(m(i, j).real())) : complex_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

} // namespace

Json read_json(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    malformed("cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception &e) {
    malformed(path.string() + ": " + e.what());
  }
}

GroupAction parse_group(const Json &doc, GroupLimits limits) {
  const auto n = as_size(field(doc, "domain_size"), "domain_size");
  if (n == 0)
    malformed("domain_size must be positive");
  const Json &gens = field(doc, "generators");
  if (!gens.is_array())
    malformed("generators must be an array of image arrays");
  std::vector<Permutation> generators;
  for (std::size_t g = 0; g < gens.size(); ++g) {
    const std::string where = "generators[" + std::to_string(g) + "]";
    if (!gens[g].is_array() || gens[g].size() != n)
      malformed(where + " must list " + std::to_string(n) + " images");
    std::vector<Index> images;
    for (const auto &v : gens[g]) {
      const auto image = as_size(v, where + " entry");
      if (image >= n)
        malformed(where + " maps outside the domain");
      images.push_back(Index(image));
    }
    try {
      generators.emplace_back(std::move(images));
    } catch (const Error &e) {
      malformed(where + ": " + e.what());
    }
  }
  return GroupAction(n, std::move(generators), limits);
}

InvariantSDP parse_sdp(const Json &doc) {
  InvariantSDP sdp;
  sdp.domain_size = as_size(field(doc, "domain_size"), "domain_size");
  if (doc.contains("name")) {
    if (!doc["name"].is_string())
      malformed("name must be a string");
    sdp.name = doc["name"].get<std::string>();
  }
  const auto n = sdp.domain_size;
  sdp.objective = close_hermitian(parse_entries(field(doc, "objective"), n, "objective"), n, "objective");
  const Json &constraints = field(doc, "constraints");
  if (!constraints.is_array())
    malformed("constraints must be an array");
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    const std::string where = "constraints[" + std::to_string(i) + "]";
    const auto entries = parse_entries(field(constraints[i], "entries"), n, where + ".entries");
    sdp.constraints.push_back(
        {close_hermitian(entries, n, where), as_double(field(constraints[i], "rhs"), where + ".rhs")});
  }
  return sdp;
}

CVector parse_orbit_values(const Json &doc) {
  const Json &list = doc.is_object() ? field(doc, "y") : doc;
  if (!list.is_array())
    malformed("orbit values must be an array");
  CVector y(Eigen::Index(list.size()));
  for (std::size_t r = 0; r < list.size(); ++r) {
    const Json &v = list[r];
    const std::string where = "y[" + std::to_string(r) + "]";
    if (v.is_number())
      y[Eigen::Index(r)] = v.get<double>();
    else if (v.is_array() && v.size() == 2)
      y[Eigen::Index(r)] = Complex(as_double(v[0], where), as_double(v[1], where));
    else
      malformed(where + " must be a number or [re, im]");
  }
  return y;
}

Json complex_json(Complex z) { return Json::array({clean(z.real()), clean(z.imag())}); }

Json orbits_json(const PairOrbits &orbits) {
  Json list = Json::array();
  for (std::size_t r = 0; r < orbits.count(); ++r) {
    const auto [x, y] = orbits.representative(r);
    list.push_back(Json{{"r", r},
                        {"size", orbits.size(r)},
                        {"representative", {x, y}},
                        {"transpose", orbits.transpose(r)}});
  }
  return Json{{"domain_size", orbits.domain_size()}, {"N", orbits.count()}, {"orbits", std::move(list)}};
}

Json decomposition_json(const Decomposition &decomposition, const BlockImage &image, const PairOrbits &orbits,
                        const DecompositionReport &report, bool with_e_basis) {
  Json blocks = Json::array();
  for (std::size_t k = 0; k < decomposition.block_count(); ++k) {
    bool is_real = true;
    for (std::size_t r = 0; r < image.orbit_count(); ++r)
      if (image(r, k).imag().cwiseAbs().maxCoeff() > 1e-10)
        is_real = false;
    blocks.push_back(Json{{"k", k}, {"h", decomposition.h(k)}, {"m", decomposition.m(k)}, {"is_real", is_real}});
  }

  Json p = Json::array();
  for (std::size_t r = 0; r < image.orbit_count(); ++r) {
    Json per_block = Json::array();
    for (std::size_t k = 0; k < image.block_count(); ++k)
      per_block.push_back(matrix_json(image(r, k), false));
    p.push_back(Json{{"r", r}, {"blocks", std::move(per_block)}});
  }

  Json doc{{"domain_size", decomposition.domain_size()},
           {"N", orbits.count()},
           {"blocks", std::move(blocks)},
           {"p", std::move(p)},
           {"residuals",
            {{"multiplication", report.multiplication},
             {"orthogonality", report.orthogonality},
             {"reconstruction", report.reconstruction},
             {"commutant", report.commutant},
             {"adjoint", report.adjoint},
             {"idempotent", report.idempotent}}}};
  if (with_e_basis) {
    Json e = Json::array();
    for (std::size_t k = 0; k < decomposition.block_count(); ++k)
      for (std::size_t i = 0; i < decomposition.m(k); ++i)
        for (std::size_t j = 0; j < decomposition.m(k); ++j)
          e.push_back(Json{{"k", k}, {"i", i}, {"j", j}, {"matrix", matrix_json(decomposition.E(k, i, j), false)}});
    doc["e_basis"] = std::move(e);
  }
  return doc;
}

Json reduce_report_json(const ReducedSDP &reduced, const InvarianceReport &invariance, bool symmetrized) {
  std::size_t total = 0;
  Json blocks = Json::array();
  for (std::size_t k = 0; k < reduced.block_sizes.size(); ++k) {
    total += reduced.block_sizes[k];
    Json b{{"k", k}, {"h", reduced.block_dims[k]}, {"size", reduced.block_sizes[k]}};
    if (reduced.realified)
      b["doubled"] = bool(reduced.doubled[k]);
    blocks.push_back(std::move(b));
  }
  return Json{{"name", reduced.name},
              {"domain_size", reduced.domain_size},
              {"N", reduced.orbit_sizes.size()},
              {"variables", reduced.variable_count()},
              {"constraints", reduced.rhs.size()},
              {"blocks", std::move(blocks)},
              {"reduced_size", total},
              {"size_ratio", double(total) / double(reduced.domain_size)},
              {"invariance_distance", invariance.max_distance},
              {"symmetrized", symmetrized}};
}

Json lift_report_json(const LiftReport &report) {
  Json residuals = Json::array();
  for (double r : report.constraint_residuals)
    residuals.push_back(clean(r));
  Json blocks = Json::array();
  for (double v : report.block_min_eigenvalues)
    blocks.push_back(clean(v));
  return Json{{"objective_full", complex_json(report.objective_full)},
              {"objective_reduced", complex_json(report.objective_reduced)},
              {"min_eigenvalue", clean(report.min_eigenvalue)},
              {"block_min_eigenvalues", std::move(blocks)},
              {"constraint_residuals", std::move(residuals)},
              {"psd", report.psd}};
}

Json terwilliger_json(const terwilliger::TerwilligerTables &tables) {
  Json blocks = Json::array();
  for (std::size_t k = 0; k < tables.block_dims.h.size(); ++k)
    blocks.push_back(Json{{"k", k}, {"h", tables.block_dims.h[k]}, {"m", tables.block_dims.m[k]}});
  Json triples = Json::array();
  for (const auto &t : tables.triples)
    triples.push_back(Json{{"r", t.r}, {"s", t.s}, {"d", t.d}, {"size", t.size.get_str()}});
  Json p = Json::array();
  for (const auto &[key, value] : tables.p_coeffs)
    p.push_back(Json{{"r", key[0]},
                     {"s", key[1]},
                     {"d", key[2]},
                     {"k", key[3]},
                     {"i", key[4]},
                     {"j", key[5]},
                     {"exact", value.str()},
                     {"value", value.to_double()}});
  Json flips = Json::array();
  for (const auto &f : tables.sign_flips)
    flips.push_back(Json{{"k", f.k}, {"i", f.i}, {"j", f.j}});
  return Json{{"n", tables.n},
              {"blocks", std::move(blocks)},
              {"triples", std::move(triples)},
              {"p", std::move(p)},
              {"sign_flips", std::move(flips)}};
}

void write_terwilliger_csv(const terwilliger::TerwilligerTables &tables, std::ostream &out) {
  std::map<std::array<int, 3>, std::string> sizes;
  for (const auto &t : tables.triples)
    sizes[{t.r, t.s, t.d}] = t.size.get_str();
  out << "r,s,d,size,k,i,j,exact,value\n";
  for (const auto &[key, value] : tables.p_coeffs) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.17g", value.to_double());
    out << key[0] << ',' << key[1] << ',' << key[2] << ',' << sizes[{key[0], key[1], key[2]}] << ',' << key[3]
        << ',' << key[4] << ',' << key[5] << ',' << value.str() << ',' << buffer << '\n';
  }
}

std::string dump(const Json &doc) { return doc.dump(2) + "\n"; }

} // namespace symsdp::io
