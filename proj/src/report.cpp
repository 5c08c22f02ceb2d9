#include "rdeed/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace rdeed {

Json to_json(const Vec& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json to_json(const Mat& m) {
  Json a = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    a.push_back(std::move(row));
  }
  return a;
}

Json to_json(const ReactionNetwork& net) {
  Json j;
  j["species"] = net.species();
  j["diffusion"] = to_json(net.diffusion());
  Json rs = Json::array();
  for (int r = 0; r < net.num_reactions(); ++r) {
    const Reaction& rx = net.reaction(r);
    rs.push_back({{"alpha", to_json(rx.alpha)},
                  {"beta", to_json(rx.beta)},
                  {"kf", rx.kf},
                  {"kb", rx.kb},
                  {"text", format_reaction(net, r)}});
  }
  j["reactions"] = std::move(rs);
  return j;
}

Json to_json(const ConservationBasis& b) {
  return {{"Q", to_json(b.Q)},
          {"m", b.m},
          {"nonnegative", b.nonnegative},
          {"exact", b.exact},
          {"row_labels", b.row_labels}};
}

Json to_json(const DetailedBalanceCheck& db) {
  return {{"balanced", db.balanced}, {"log_witness", to_json(db.log_witness)}, {"residual", db.residual}};
}

Json to_json(const Equilibrium& eq) {
  return {{"c_inf", to_json(eq.c_inf)},
          {"residual_reactions", eq.residual_reactions},
          {"residual_mass", eq.residual_mass},
          {"iterations", eq.iterations}};
}

Json to_json(const BoundaryEquilibriumReport& rep, const ReactionNetwork& net) {
  Json found = Json::array();
  for (const auto& b : rep.found) {
    Json zeros = Json::array();
    for (int i : b.zero_pattern) zeros.push_back(net.species()[i]);
    found.push_back({{"zero_species", zeros}, {"state", to_json(b.state)}, {"residual", b.residual}});
  }
  return {{"found", found}, {"patterns_searched", rep.patterns_searched}, {"heuristic", rep.heuristic}};
}

Json to_json(const EntropyBreakdown& e) {
  return {{"total_relative", e.total_relative},
          {"inhomogeneous_part", e.inhomogeneous_part},
          {"average_part", e.average_part}};
}

Json to_json(const DissipationBreakdown& d) {
  return {{"fisher_part", d.fisher_part}, {"reaction_part", d.reaction_part}, {"total", d.total()}};
}

Json to_json(const DomainConstants& d) {
  return {{"C_P", d.C_P}, {"C_LSI", d.C_LSI}, {"source", to_string(d.source)}, {"C_LSI_heuristic", d.lsi_heuristic}};
}

Json to_json(const ConstantsReport& r) {
  const CoreConstants& c = r.core;
  Json j;
  j["family"] = r.family;
  j["I"] = r.I;
  j["R"] = r.R;
  j["E0"] = r.E0;
  j["K_entropy"] = r.K_entropy;
  j["K_mass"] = r.K_mass;
  j["K"] = r.K;
  j["d_min"] = c.d_min;
  j["k_min"] = c.k_min;
  j["K1"] = c.K1;
  j["K2"] = c.K2;
  j["K3"] = c.K3;
  j["kappa"] = c.kappa;
  j["gamma"] = c.gamma;
  j["L"] = c.L;
  j["B"] = c.B;
  j["C_box"] = c.C_box;
  j["C_taylor"] = c.C_taylor;
  j["degree"] = c.degree;
  j["stoich_sum"] = c.stoich_sum;
  j["H4"] = r.fam.H4;
  j["H5"] = r.fam.H5;
  j["epsilon"] = r.fam.epsilon;
  j["C_eps"] = r.C_eps;
  j["theta"] = r.theta;
  j["min_cinf_alpha"] = r.min_cinf_alpha;
  j["min_cinf"] = r.min_cinf;
  j["max_cinf"] = r.max_cinf;
  j["H6_case1"] = r.H6_case1;
  j["H6_case2"] = r.H6_case2;
  j["H6"] = r.H6;
  j["mu_max"] = r.mu_max;
  j["C0"] = r.C0;
  j["C_CKP"] = r.C_CKP;
  j["domain"] = to_json(r.domain);
  j["lambda"] = r.lambda;
  j["formulas"] = r.formulas;
  return j;
}

Json to_json(const VerificationReport& r) {
  return {{"name", r.name},
          {"samples", r.samples},
          {"violations", r.violations},
          {"passed", r.passed()},
          {"min_slack", r.min_slack},
          {"min_relative_slack", r.min_relative_slack},
          {"median_relative_slack", r.median_relative_slack},
          {"parameters", r.parameters},
          {"seed", r.seed}};
}

Json to_json(const DecayFit& f) {
  return {{"rate", f.rate}, {"converged", f.converged}, {"points_used", f.points_used}};
}

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

void write_json(std::ostream& os, const Json& j, int indent) {
  const std::string pad(indent, ' '), inner(indent + 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map order: sorted keys
        if (!first) os << ",\n";
        first = false;
        os << inner << Json(it.key()).dump() << ": ";
        write_json(os, it.value(), indent + 2);
      }
      os << "\n" << pad << "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      bool flat = true;
      for (const auto& e : j)
        if (e.is_structured()) flat = false;
      if (flat) {
        os << "[";
        for (std::size_t k = 0; k < j.size(); ++k) {
          if (k) os << ", ";
          write_json(os, j[k], indent);
        }
        os << "]";
        return;
      }
      os << "[\n";
      for (std::size_t k = 0; k < j.size(); ++k) {
        if (k) os << ",\n";
        os << inner;
        write_json(os, j[k], indent + 2);
      }
      os << "\n" << pad << "]";
      return;
    }
    case Json::value_t::number_float: {
      double x = j.get<double>();
      if (std::isfinite(x))
        os << format_number(x);
      else
        os << "null";
      return;
    }
    default:
      os << j.dump();
  }
}

void write_row(std::ostream& os, const std::vector<double>& row) {
  for (std::size_t k = 0; k < row.size(); ++k) {
    if (k) os << ',';
    os << format_number(row[k]);
  }
  os << '\n';
}

}  // namespace

std::string dump_json(const Json& j) {
  std::ostringstream os;
  write_json(os, j, 0);
  os << '\n';
  return os.str();
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "time,entropy_total,entropy_inhomogeneous,entropy_average,dissipation_fisher,dissipation_reaction";
  for (int k = 0; k < traj.basis.m; ++k) os << ",mass_" << (k + 1);
  os << ",min_concentration,l1_distance_sq\n";
  std::vector<double> row;
  for (const auto& p : traj.series) {
    row = {p.time,
           p.entropy.total_relative,
           p.entropy.inhomogeneous_part,
           p.entropy.average_part,
           p.dissipation.fisher_part,
           p.dissipation.reaction_part};
    for (int k = 0; k < p.masses.size(); ++k) row.push_back(p.masses[k]);
    row.push_back(p.min_concentration);
    row.push_back(p.l1_distance_sq);
    write_row(os, row);
  }
}

void write_snapshots_csv(std::ostream& os, const Trajectory& traj) {
  os << "time,x";
  for (const auto& s : traj.species) os << ',' << s;
  os << '\n';
  std::vector<double> row;
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const Field& f = traj.snapshots[k];
    for (int j = 0; j < f.cells(); ++j) {
      row = {traj.snapshot_times[k], f.x(j)};
      for (int i = 0; i < f.species(); ++i) row.push_back(f(j, i));
      write_row(os, row);
    }
  }
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write output file " + path);
  out << text;
  out.flush();
  if (!out) throw Error("cannot write output file " + path);
}

}  // namespace rdeed
