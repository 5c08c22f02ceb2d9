#include "rdeed/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "rdeed/constants.hpp"
#include "rdeed/family.hpp"
#include "rdeed/report.hpp"
#include "rdeed/simulator.hpp"
#include "rdeed/verify.hpp"

namespace rdeed {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Vec to_vec(const std::vector<double>& v) { return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())); }

std::string family_name(const ReactionNetwork& net) {
  if (as_single_reaction(net)) return "single";
  if (as_enzyme_chain(net)) return "chain";
  return "general";
}

Vec require_masses(const std::vector<double>& masses, const ConservationBasis& basis) {
  if (masses.empty()) throw UsageError("--masses is required");
  if (static_cast<int>(masses.size()) != basis.m)
    throw UsageError("--masses expects " + std::to_string(basis.m) + " values (one per conservation law), got " +
                     std::to_string(masses.size()));
  return to_vec(masses);
}

struct DomainFlags {
  std::optional<double> cp, clsi;
  int grid_domain = 0;

  DomainConstants build(int default_cells) const {
    int cells = grid_domain > 0 ? grid_domain : default_cells;
    DomainConstants d = cells > 0 ? DomainConstants::discrete_interval(cells) : DomainConstants::unit_interval();
    if (cp || clsi) {
      double C_P = cp.value_or(d.C_P);
      d = DomainConstants::user(C_P, clsi.value_or(C_P / 2.0));
      d.lsi_heuristic = !clsi.has_value();
    }
    return d;
  }

  void add(CLI::App* app) {
    app->add_option("--cp", cp, "Poincare constant of the domain")->check(CLI::PositiveNumber);
    app->add_option("--clsi", clsi, "log-Sobolev constant of the domain (default C_P / 2, heuristic)")
        ->check(CLI::PositiveNumber);
  }
};

struct ConstantFlags {
  std::optional<double> c0, entropy0, H4, H5, epsilon;

  void add(CLI::App* app) {
    app->add_option("--c0", c0, "domain constant C0 of the CKP inequality (default 1/(2K))")->check(CLI::PositiveNumber);
    app->add_option("--entropy0", entropy0, "initial entropy E(c0) entering K (default: entropy of c_inf)")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--H4", H4, "user-supplied H4 for networks outside the built-in families")->check(CLI::PositiveNumber);
    app->add_option("--H5", H5, "user-supplied H5")->check(CLI::PositiveNumber);
    app->add_option("--epsilon", epsilon, "user-supplied epsilon")->check(CLI::PositiveNumber);
  }

  ConstantsOptions build(const DomainConstants& dom) const {
    ConstantsOptions o;
    o.domain = dom;
    o.E0 = entropy0;
    o.C0 = c0;
    if (H4 || H5 || epsilon) {
      if (!(H4 && H5 && epsilon)) throw UsageError("--H4, --H5 and --epsilon must be given together");
      o.user_family = FamilyConstants{*H4, *H5, *epsilon};
    }
    return o;
  }
};

void emit(const Json& j, const std::string& out) {
  Json doc = j;
  doc["version"] = kVersion;
  std::string text = dump_json(doc);
  if (!out.empty()) write_file(out, text);
  std::cout << text;
}

// base_i (1 + a cos((i+1) pi x)) per species, then projected to the masses.
Field initial_field(const ConservationBasis& basis, const Vec& base, const Vec& M, int cells, double amplitude,
                    double noise, std::uint64_t seed) {
  const int I = static_cast<int>(base.size());
  const double pi = std::acos(-1.0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Field f(cells, I);
  for (int j = 0; j < cells; ++j)
    for (int i = 0; i < I; ++i) {
      double v = base[i] * (1.0 + amplitude * std::cos((i + 1) * pi * f.x(j)));
      if (noise > 0.0) v *= 1.0 + noise * U(rng);
      f(j, i) = std::max(v, 0.0);
    }
  return project_to_masses(f, basis, M);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

void read_trajectory_csv(const std::string& path, std::vector<double>& times, std::vector<double>& values) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open trajectory file " + path + ": file not found or unreadable");
  std::string line;
  if (!std::getline(in, line)) throw Error("trajectory file " + path + " is empty");
  auto header = split_csv_line(line);
  int tcol = -1, ecol = -1;
  for (int k = 0; k < static_cast<int>(header.size()); ++k) {
    if (header[k] == "time") tcol = k;
    if (header[k] == "entropy_total") ecol = k;
  }
  if (tcol < 0 || ecol < 0) throw Error("trajectory file " + path + " lacks time or entropy_total columns");
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (static_cast<int>(cells.size()) <= std::max(tcol, ecol))
      throw Error("trajectory file " + path + ": row " + std::to_string(row) + " is too short");
    try {
      times.push_back(std::stod(cells[tcol]));
      values.push_back(std::stod(cells[ecol]));
    } catch (const std::exception&) {
      throw Error("trajectory file " + path + ": row " + std::to_string(row) + " is not numeric");
    }
  }
}

}  // namespace

int dispatch(int argc, char** argv) {
  CLI::App app{"Entropy method toolkit for detailed-balanced reaction-diffusion networks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  std::string network_path, out;
  std::vector<double> masses, state;
  std::uint64_t seed = 42;
  DomainFlags dflags;
  ConstantFlags cflags;

  auto* analyze = app.add_subcommand("analyze", "stoichiometry, conservation laws and detailed balance");
  analyze->add_option("network", network_path, "network file")->required();
  analyze->add_option("--state", state, "state c0 used to evaluate the masses Q c0")->delimiter(',');
  analyze->add_option("--out", out, "also write the JSON report to this file");

  bool boundary = false;
  auto* equilibrium = app.add_subcommand("equilibrium", "positive detailed-balance equilibrium for given masses");
  equilibrium->add_option("network", network_path, "network file")->required();
  equilibrium->add_option("--masses", masses, "mass vector M (comma separated)")->delimiter(',');
  equilibrium->add_flag("--boundary", boundary, "also search for boundary equilibria");
  equilibrium->add_option("--seed", seed, "seed of the boundary search");
  equilibrium->add_option("--out", out, "also write the JSON report to this file");

  auto* constants = app.add_subcommand("constants", "explicit constants and the rate lambda");
  constants->add_option("network", network_path, "network file")->required();
  constants->add_option("--masses", masses, "mass vector M (comma separated)")->delimiter(',');
  constants->add_option("--grid-domain", dflags.grid_domain,
                        "use the Poincare constant of the N-cell grid instead of the continuous interval")
      ->check(CLI::PositiveNumber);
  dflags.add(constants);
  cflags.add(constants);
  constants->add_option("--out", out, "also write the JSON report to this file");

  int grid = 128, record_every = 1;
  double t_end = 1.0, dt = 1e-3, amplitude = 0.5, noise = 0.0, window = 0.5;
  auto* simulate_cmd = app.add_subcommand("simulate", "finite-volume simulation with entropy instrumentation");
  simulate_cmd->add_option("network", network_path, "network file")->required();
  simulate_cmd->add_option("--masses", masses, "mass vector of the initial field (default: Q applied to all ones)")
      ->delimiter(',');
  simulate_cmd->add_option("--grid", grid, "number of cells")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--tend", t_end, "final time")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--dt", dt, "time step")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--record-every", record_every, "record every K steps")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--amplitude", amplitude, "cosine perturbation amplitude of the initial field")
      ->check(CLI::Range(0.0, 1.0));
  simulate_cmd->add_option("--noise", noise, "relative uniform cell noise of the initial field")
      ->check(CLI::Range(0.0, 1.0));
  simulate_cmd->add_option("--seed", seed, "seed of the initial noise");
  simulate_cmd->add_option("--window", window, "trailing fraction used for the decay-rate fit")
      ->check(CLI::Range(0.0, 1.0));
  simulate_cmd->add_option("--out", out, "output directory (default: current directory)");

  long samples = 1000;
  std::optional<double> lambda_opt;
  double inflate = 1.0;
  auto* veed = app.add_subcommand("verify-eed", "sample D(c) >= lambda (E(c) - E(c_inf)) on random fields");
  veed->add_option("network", network_path, "network file")->required();
  veed->add_option("--masses", masses, "mass vector M (comma separated)")->delimiter(',');
  veed->add_option("--grid", grid, "number of cells")->check(CLI::PositiveNumber);
  veed->add_option("--samples", samples, "number of random fields")->check(CLI::PositiveNumber);
  veed->add_option("--seed", seed, "sampling seed");
  veed->add_option("--lambda", lambda_opt, "rate to test (default: computed with the grid Poincare constant)")
      ->check(CLI::NonNegativeNumber);
  veed->add_option("--inflate", inflate, "multiply lambda (falsification control)")->check(CLI::PositiveNumber);
  dflags.add(veed);
  cflags.add(veed);
  veed->add_option("--out", out, "also write the JSON report to this file");

  std::string lemma;
  LemmaParams lp;
  std::vector<double> alpha, beta, cinf_list;
  std::optional<double> mu_max;
  auto* vlemma = app.add_subcommand("verify-lemma", "brute-force certification of a lemma-level inequality");
  vlemma->add_option("--lemma", lemma, "H4_single | H4_chain | average_K3 | elementary")->required();
  vlemma->add_option("--I", lp.I, "left species count (H4_single)")->check(CLI::PositiveNumber);
  vlemma->add_option("--J", lp.J, "right species count (H4_single)")->check(CLI::PositiveNumber);
  vlemma->add_option("--alpha", alpha, "left exponents (default: random in [1,3])")->delimiter(',');
  vlemma->add_option("--beta", beta, "right exponents (default: random in [1,3])")->delimiter(',');
  vlemma->add_option("--cinf", cinf_list, "equilibrium used by the sampler (default: all ones)")->delimiter(',');
  vlemma->add_option("--mu-max", mu_max, "upper bound of the perturbations")->check(CLI::PositiveNumber);
  vlemma->add_option("--K", lp.K, "a priori bound K")->check(CLI::NonNegativeNumber);
  vlemma->add_option("--network", network_path, "network file (average_K3)");
  vlemma->add_option("--cells", lp.cells, "grid size (average_K3)")->check(CLI::PositiveNumber);
  vlemma->add_option("--scale", lp.scale, "multiply the constant under test")->check(CLI::PositiveNumber);
  vlemma->add_option("--samples", samples, "number of samples")->check(CLI::PositiveNumber);
  vlemma->add_option("--seed", seed, "sampling seed");
  vlemma->add_option("--out", out, "also write the JSON report to this file");

  std::string traj_path;
  auto* fit = app.add_subcommand("fit-rate", "exponential decay rate of the relative entropy in trajectory.csv");
  fit->add_option("--trajectory", traj_path, "trajectory.csv written by simulate")->required();
  fit->add_option("--window", window, "trailing fraction of the positive entropy values")->check(CLI::Range(0.0, 1.0));
  fit->add_option("--out", out, "also write the JSON report to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*analyze) {
      ReactionNetwork net = load_network(network_path);
      ConservationBasis basis = conservation_basis(net);
      Json j;
      j["network"] = to_json(net);
      j["family"] = family_name(net);
      j["wegscheider"] = to_json(wegscheider_matrix(net));
      j["conservation"] = to_json(basis);
      j["m"] = basis.m;
      j["Q"] = to_json(basis.Q);
      j["detailed_balance"] = to_json(check_detailed_balance(net));
      ConservationCheck cc = check_conserved(basis, net, 1000, seed);
      j["conservation_check"] = {{"samples", cc.samples}, {"max_residual", cc.max_residual}, {"passed", cc.passed}};
      if (!state.empty()) {
        if (static_cast<int>(state.size()) != net.num_species())
          throw UsageError("--state expects one value per species");
        j["masses"] = to_json(mass_vector(basis, to_vec(state)));
      }
      emit(j, out);
    } else if (*equilibrium) {
      ReactionNetwork net = load_network(network_path);
      ConservationBasis basis = conservation_basis(net);
      Vec M = require_masses(masses, basis);
      Json j;
      j["masses"] = to_json(M);
      j["family"] = family_name(net);
      j["equilibrium"] = to_json(solve_equilibrium(net, basis, M));
      if (boundary) j["boundary"] = to_json(boundary_equilibria(net, basis, M, seed), net);
      emit(j, out);
    } else if (*constants) {
      ReactionNetwork net = load_network(network_path);
      ConservationBasis basis = conservation_basis(net);
      Vec M = require_masses(masses, basis);
      Vec c_inf;
      ConstantsReport rep = compute_constants_for_masses(net, M, cflags.build(dflags.build(0)), &c_inf);
      Json j;
      j["masses"] = to_json(M);
      j["c_inf"] = to_json(c_inf);
      j["constants"] = to_json(rep);
      emit(j, out);
    } else if (*simulate_cmd) {
      ReactionNetwork net = load_network(network_path);
      ConservationBasis basis = conservation_basis(net);
      Vec M = masses.empty() ? Vec(basis.Q * Vec::Ones(net.num_species())) : require_masses(masses, basis);
      SimulationOptions so;
      so.t_end = t_end;
      so.dt0 = dt;
      so.record_every = record_every;
      Vec base = Vec::Ones(net.num_species());
      bool positive_masses = basis.m == 0 || M.minCoeff() > 0.0;
      if (positive_masses && net.num_reactions() > 0 && check_detailed_balance(net).balanced) {
        Vec c_inf = basis.m ? solve_equilibrium(net, basis, M).c_inf : Vec(Vec::Ones(net.num_species()));
        so.reference = c_inf;
        base = c_inf;
      }
      Field c0 = initial_field(basis, base, M, grid, amplitude, noise, seed);
      Trajectory tr = simulate(net, c0, so);

      std::filesystem::path dir = out.empty() ? std::filesystem::path(".") : std::filesystem::path(out);
      std::error_code ec;
      std::filesystem::create_directories(dir, ec);
      std::ostringstream traj_csv, snap_csv;
      write_trajectory_csv(traj_csv, tr);
      write_snapshots_csv(snap_csv, tr);
      write_file((dir / "trajectory.csv").string(), traj_csv.str());
      write_file((dir / "snapshots.csv").string(), snap_csv.str());

      Json j;
      j["steps"] = tr.steps;
      j["dt"] = t_end / tr.steps;
      j["t_end"] = t_end;
      j["grid"] = grid;
      j["masses"] = to_json(M);
      j["max_halvings"] = tr.max_halvings;
      j["max_entropy_increase"] = tr.max_entropy_increase;
      j["max_mass_drift"] = tr.max_mass_drift;
      j["has_reference"] = tr.has_reference;
      j["reference"] = to_json(tr.reference);
      j["initial_entropy"] = to_json(entropy(c0));
      j["final"] = {{"time", tr.times.back()},
                    {"averages", to_json(tr.final_state.averages())},
                    {"entropy", to_json(tr.series.back().entropy)},
                    {"dissipation", to_json(tr.series.back().dissipation)},
                    {"min_concentration", tr.series.back().min_concentration}};
      if (tr.has_reference && tr.times.size() >= 10) j["decay_fit"] = to_json(fit_decay_rate(tr, window));
      j["files"] = {(dir / "trajectory.csv").string(), (dir / "snapshots.csv").string()};
      Json doc = j;
      doc["version"] = kVersion;
      write_file((dir / "summary.json").string(), dump_json(doc));
      std::cout << dump_json(doc);
    } else if (*veed) {
      ReactionNetwork net = load_network(network_path);
      ConservationBasis basis = conservation_basis(net);
      Vec M = require_masses(masses, basis);
      Json j;
      double lambda;
      if (lambda_opt) {
        lambda = *lambda_opt;
        j["lambda_source"] = "user-supplied";
      } else {
        ConstantsReport rep = compute_constants_for_masses(net, M, cflags.build(dflags.build(grid)));
        lambda = rep.lambda;
        j["lambda_source"] = "computed";
        j["constants"] = to_json(rep);
      }
      j["lambda"] = lambda;
      j["inflate"] = inflate;
      j["report"] = to_json(verify_eed(net, basis, M, lambda * inflate, samples, grid, seed));
      emit(j, out);
    } else if (*vlemma) {
      if (!alpha.empty()) lp.alpha = to_vec(alpha);
      if (!beta.empty()) lp.beta = to_vec(beta);
      if (!cinf_list.empty()) lp.c_inf = to_vec(cinf_list);
      lp.mu_max = mu_max;
      std::optional<ReactionNetwork> net;
      if (!network_path.empty()) {
        net = load_network(network_path);
        lp.network = &*net;
      }
      Json j;
      j["lemma"] = lemma;
      j["report"] = to_json(verify_lemma(lemma, lp, samples, seed));
      emit(j, out);
    } else if (*fit) {
      std::vector<double> times, values;
      read_trajectory_csv(traj_path, times, values);
      Json j;
      j["trajectory"] = traj_path;
      j["window"] = window;
      j["fit"] = to_json(fit_decay_rate(times, values, window));
      emit(j, out);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace rdeed
