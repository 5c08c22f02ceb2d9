#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "rdeed/conservation.hpp"
#include "rdeed/constants.hpp"
#include "rdeed/entropy.hpp"
#include "rdeed/equilibrium.hpp"
#include "rdeed/network.hpp"
#include "rdeed/simulator.hpp"
#include "rdeed/verification.hpp"
#include "rdeed/verify.hpp"

namespace rdeed {

using Json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

Json to_json(const Vec& v);
Json to_json(const Mat& m);  // array of rows
Json to_json(const ReactionNetwork& net);
Json to_json(const ConservationBasis& basis);
Json to_json(const DetailedBalanceCheck& db);
Json to_json(const Equilibrium& eq);
Json to_json(const BoundaryEquilibriumReport& rep, const ReactionNetwork& net);
Json to_json(const EntropyBreakdown& e);
Json to_json(const DissipationBreakdown& d);
Json to_json(const DomainConstants& d);
Json to_json(const ConstantsReport& rep);
Json to_json(const VerificationReport& rep);
Json to_json(const DecayFit& fit);

// Sorted keys, two-space indent, numbers as %.17g (integers without a
// fraction), non-finite numbers as null. Ends with a newline.
std::string dump_json(const Json& j);

// "%.17g"
std::string format_number(double x);

// time, entropy_total, entropy_inhomogeneous, entropy_average, dissipation_fisher,
// dissipation_reaction, mass_1..mass_m, min_concentration, l1_distance_sq
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
// time, x, one column per species; one row per (snapshot, cell).
void write_snapshots_csv(std::ostream& os, const Trajectory& traj);

// Writes text to path; throws Error when the file cannot be written.
void write_file(const std::string& path, const std::string& text);

}  // namespace rdeed
