// symsdp: orbits, decompose, reduce, lift and terwilliger subcommands.
//
// Exit codes: 0 ok, 1 verification failure, 2 parse, 3 resource,
// 4 degenerate randomness, 5 invariance.
#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "symsdp/decomposer.hpp"
#include "symsdp/error.hpp"
#include "symsdp/io.hpp"
#include "symsdp/permgroup.hpp"
#include "symsdp/sdpreduce.hpp"
#include "symsdp/terwilliger.hpp"

namespace {

using namespace symsdp;
using io::Json;

enum Exit { kOk = 0, kVerification = 1, kParse = 2, kResource = 3, kDegenerate = 4, kInvariance = 5 };

struct RunConfig {
  std::uint64_t seed = 42;
  std::optional<double> tol;
  std::string out;
  std::string format = "json";
};

int exit_code(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::MalformedInput:
  case ErrorKind::Shape:
  case ErrorKind::Io:
    return kParse;
  case ErrorKind::ResourceLimit:
    return kResource;
  case ErrorKind::DegenerateSample:
    return kDegenerate;
  case ErrorKind::Invariance:
    return kInvariance;
  default:
    return kVerification;
  }
}

void emit(const std::string &text, const std::string &path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file || !(file << text))
    throw Error(ErrorKind::Io, "cannot write " + path);
}

struct Loaded {
  GroupAction action;
  PairOrbits orbits;
};

Loaded load_group(const std::string &path) {
  auto action = io::parse_group(io::read_json(path));
  auto orbits = pair_orbits(action);
  return {std::move(action), std::move(orbits)};
}

InvariantSDP load_sdp(const std::string &path, const PairOrbits &orbits) {
  auto sdp = io::parse_sdp(io::read_json(path));
  if (sdp.domain_size != orbits.domain_size())
    throw Error(ErrorKind::MalformedInput, "SDP domain_size " + std::to_string(sdp.domain_size) +
                                               " does not match the group's " +
                                               std::to_string(orbits.domain_size()));
  if (sdp.name.empty())
    sdp.name = std::filesystem::path(path).stem().string();
  return sdp;
}

struct Pipeline {
  Decomposition decomposition;
  BlockImage image;
};

Pipeline run_decomposer(const Loaded &g, const RunConfig &config, bool verify) {
  DecomposeOptions options;
  options.seed = config.seed;
  options.verify = verify;
  if (config.tol)
    options.tol = *config.tol;
  auto decomposition = decompose(g.action, g.orbits, options);
  auto image = coefficients_p(decomposition, g.orbits);
  return {std::move(decomposition), std::move(image)};
}

int cmd_orbits(const std::string &group_file, const RunConfig &config) {
  const auto g = load_group(group_file);
  emit(io::dump(io::orbits_json(g.orbits)), config.out);
  return kOk;
}

int cmd_decompose(const std::string &group_file, const RunConfig &config, bool verify, bool e_basis) {
  const double tol = config.tol.value_or(1e-8);
  const auto g = load_group(group_file);
  // The residual gate runs below so the report is written even when it fails.
  const auto p = run_decomposer(g, config, false);
  DecompositionReport report;
  if (verify)
    report = verify_decomposition(p.decomposition, p.image, g.action, g.orbits);
  emit(io::dump(io::decomposition_json(p.decomposition, p.image, g.orbits, report, e_basis)), config.out);
  if (verify && !(report.max() <= tol)) {
    std::cerr << "symsdp: residual " << report.max() << " exceeds tol " << tol << '\n';
    return kVerification;
  }
  return kOk;
}

int cmd_reduce(const std::string &group_file, const std::string &sdp_file, const RunConfig &config,
               const std::string &report_path, bool symmetrize_input) {
  const double tol = config.tol.value_or(1e-10);
  const auto g = load_group(group_file);
  auto sdp = load_sdp(sdp_file, g.orbits);
  const auto invariance = check_invariance(sdp, g.orbits, tol);
  if (!invariance.invariant && symmetrize_input)
    sdp = symmetrize(sdp, g.orbits);
  const auto p = run_decomposer(g, config, true);
  const auto reduced = realify(reduce(sdp, g.orbits, p.decomposition, p.image, tol));

  std::ostringstream sdpa;
  write_sdpa(to_sdpa(reduced), sdpa);
  emit(sdpa.str(), config.out);
  const auto report = io::dump(io::reduce_report_json(reduced, invariance, !invariance.invariant));
  if (!report_path.empty())
    emit(report, report_path);
  else if (!config.out.empty() && config.out != "-")
    std::cout << report;
  return kOk;
}

int cmd_lift(const std::string &group_file, const std::string &sdp_file, const std::string &y_file,
             const RunConfig &config) {
  const double tol = config.tol.value_or(1e-8);
  const auto g = load_group(group_file);
  const auto sdp = load_sdp(sdp_file, g.orbits);
  const auto y = io::parse_orbit_values(io::read_json(y_file));
  const auto p = run_decomposer(g, config, true);
  const auto reduced = reduce(sdp, g.orbits, p.decomposition, p.image);
  const auto report = lift_solution(y, g.orbits, sdp, reduced, tol);
  emit(io::dump(io::lift_report_json(report)), config.out);
  bool feasible = report.psd;
  for (double r : report.constraint_residuals)
    feasible = feasible && r <= tol;
  if (!feasible) {
    std::cerr << "symsdp: lifted matrix is infeasible\n";
    return kVerification;
  }
  return kOk;
}

Json check_json(const terwilliger::ExactCheck &check) {
  Json out{{"passed", check.passed}, {"checked", check.checked}};
  if (!check.passed)
    out["witness"] = check.witness;
  return out;
}

int cmd_terwilliger(int n, const RunConfig &config, bool full_verify, bool skip_verify) {
  namespace tw = terwilliger;
  if (n < 1)
    throw Error(ErrorKind::MalformedInput, "--n must be positive");
  const auto tables = tw::assemble_exact_decomposition(n);
  if (config.format == "csv") {
    std::ostringstream csv;
    io::write_terwilliger_csv(tables, csv);
    emit(csv.str(), config.out);
  } else {
    emit(io::dump(io::terwilliger_json(tables)), config.out);
  }
  if (skip_verify && !full_verify)
    return kOk;

  bool passed = true;
  Json report{{"n", n}};
  auto record = [&](const char *name, const tw::ExactCheck &check) {
    report[name] = check_json(check);
    passed = passed && check.passed;
  };
  record("trace", tw::exact_trace_check(tables));
  record("reconstruction", tw::exact_reconstruction_check(tables));
  if (full_verify) {
    record("orthogonality", tw::exact_orthogonality_check(tables));
    if (n <= tw::kMatrixCap)
      record("multiplication", tw::exact_multiplication_check(tables));
    if (n <= tw::kExactVerifyCap) {
      const auto cv = tw::cross_validate(n, config.seed, config.tol.value_or(1e-7));
      report["cross_validation"] = Json{{"passed", cv.passed},
                                        {"dims_match", cv.dims_match},
                                        {"structure_residual", cv.structure_residual},
                                        {"structure_direct_residual", cv.structure_direct_residual},
                                        {"spectrum_residual", cv.spectrum_residual}};
      passed = passed && cv.passed;
    }
  }
  report["passed"] = passed;
  // Tables own stdout unless written to a file.
  if (full_verify)
    (config.out.empty() || config.out == "-" ? std::cerr : std::cout) << io::dump(report);
  if (!passed) {
    std::cerr << "symsdp: exact verification failed\n";
    return kVerification;
  }
  return kOk;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Symmetry reduction of permutation-invariant semidefinite programs"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig config;
  app.add_option("--seed", config.seed, "seed for every random draw")->default_val(42);
  app.add_option("--tol", config.tol, "residual or invariance tolerance")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", config.out, "output file (stdout when absent)");
  app.add_option("--format", config.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  std::string group_file, sdp_file, y_file, report_path;
  bool no_verify = false, verify = false, e_basis = false, symmetrize_input = false;
  int n = 0;

  auto *orbits = app.add_subcommand("orbits", "pair orbits of a group file");
  orbits->add_option("group", group_file)->required();

  auto *decomp = app.add_subcommand("decompose", "numeric block decomposition");
  decomp->add_option("group", group_file)->required();
  decomp->add_flag("--no-verify", no_verify, "skip the residual checks");
  decomp->add_flag("--e-basis", e_basis, "include the E matrices");

  auto *red = app.add_subcommand("reduce", "reduce an invariant SDP to SDPA blocks");
  red->add_option("group", group_file)->required();
  red->add_option("sdp", sdp_file)->required();
  red->add_option("--report", report_path, "reduction report JSON");
  red->add_flag("--symmetrize", symmetrize_input, "replace non-invariant data by its group average");

  auto *lift = app.add_subcommand("lift", "check an orbit vector against the full SDP");
  lift->add_option("group", group_file)->required();
  lift->add_option("sdp", sdp_file)->required();
  lift->add_option("y", y_file)->required();

  auto *ter = app.add_subcommand("terwilliger", "exact Terwilliger tables of the binary Hamming scheme");
  ter->add_option("--n", n, "length n")->required();
  ter->add_flag("--verify", verify, "run the exact identity suite and cross-validation");
  ter->add_flag("--no-verify", no_verify, "skip the default table checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kParse;
  }

  try {
    if (*orbits)
      return cmd_orbits(group_file, config);
    if (*decomp)
      return cmd_decompose(group_file, config, !no_verify, e_basis);
    if (*red)
      return cmd_reduce(group_file, sdp_file, config, report_path, symmetrize_input);
    if (*lift)
      return cmd_lift(group_file, sdp_file, y_file, config);
    if (*ter)
      return cmd_terwilliger(n, config, verify, no_verify);
  } catch (const Error &e) {
    std::cerr << "symsdp: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception &e) {
    std::cerr << "symsdp: " << e.what() << '\n';
    return kVerification;
  }
  return kOk;
}
