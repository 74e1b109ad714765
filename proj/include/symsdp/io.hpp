#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "symsdp/decomposer.hpp"
#include "symsdp/permgroup.hpp"
#include "symsdp/sdpreduce.hpp"
#include "symsdp/terwilliger.hpp"

// JSON readers and writers for the command-line tool. Readers throw
// MalformedInput on anything they cannot interpret.
namespace symsdp::io {

using Json = nlohmann::ordered_json;

Json read_json(const std::filesystem::path &path);

/// { "domain_size": n, "generators": [[...], ...] }
GroupAction parse_group(const Json &doc, GroupLimits limits = GroupLimits::from_environment());

/// { "domain_size": n, "objective": [[x,y,re,im],...],
///   "constraints": [{ "entries": [...], "rhs": b }, ...] }
/// Entries may give im or omit it. A position listed together with its
/// mirror must carry conjugate values; it is then counted once.
InvariantSDP parse_sdp(const Json &doc);

/// Orbit values y_r: { "y": [v, ...] } or a bare array, each v either a
/// number or [re, im].
CVector parse_orbit_values(const Json &doc);

Json orbits_json(const PairOrbits &orbits);

/// Values with magnitude below 1e-14 are written as 0.
Json complex_json(Complex z);

Json decomposition_json(const Decomposition &decomposition, const BlockImage &image,
                        const PairOrbits &orbits, const DecompositionReport &report,
                        bool with_e_basis);

Json reduce_report_json(const ReducedSDP &reduced, const InvarianceReport &invariance, bool symmetrized);

Json lift_report_json(const LiftReport &report);

Json terwilliger_json(const terwilliger::TerwilligerTables &tables);
void write_terwilliger_csv(const terwilliger::TerwilligerTables &tables, std::ostream &out);

/// Two-space indented dump followed by a newline.
std::string dump(const Json &doc);

} // namespace symsdp::io
