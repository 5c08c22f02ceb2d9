#include "rdeed/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "rdeed/equilibrium.hpp"

namespace rdeed {

namespace {

struct NegativeCell {
  int cell = -1;
  int species = -1;
};

// sum_i c_i (log c_i - u0_i - 1) with W u0 = log(kf/kb): a Lyapunov function
// of the reaction ODE in every cell.
double free_energy(const Vec& c, const Vec& u0) {
  double s = 0.0;
  for (int i = 0; i < c.size(); ++i)
    if (c[i] > 0.0) s += c[i] * (std::log(c[i]) - u0[i] - 1.0);
  return s;
}

// du/dt = -R(u) for one cell, SSP-RK3 written as convex combinations of
// forward Euler stages; every stage must stay nonnegative, and with a
// detailed-balance witness the free energy must not grow.
bool reaction_cell(const ReactionNetwork& net, const std::optional<Vec>& u0, Vec& u, double h, int& bad_species) {
  auto euler = [&](const Vec& x, Vec& out) {
    out = x - h * reaction_vector(net, x);
    for (int i = 0; i < out.size(); ++i)
      if (!(out[i] >= 0.0)) {
        bad_species = i;
        return false;
      }
    return true;
  };
  Vec e1, e2, e3;
  if (!euler(u, e1)) return false;
  if (!euler(e1, e2)) return false;
  Vec u2 = 0.75 * u + 0.25 * e2;
  if (!euler(u2, e3)) return false;
  Vec next = (u / 3.0 + (2.0 / 3.0) * e3).cwiseMax(0.0);  // clamp is rounding only
  if (u0) {
    double before = free_energy(u, *u0), after = free_energy(next, *u0);
    if (after > before + 1e-12 * std::max(1.0, std::abs(before))) {
      bad_species = -1;
      return false;
    }
  }
  u = next;
  return true;
}

bool reaction_substep(const ReactionNetwork& net, const std::optional<Vec>& u0, Mat& v, double h, NegativeCell& bad) {
  if (net.num_reactions() == 0) return true;
  for (int j = 0; j < v.rows(); ++j) {
    Vec u = v.row(j).transpose();
    int s = -1;
    if (!reaction_cell(net, u0, u, h, s)) {
      bad = {j, s};
      return false;
    }
    v.row(j) = u.transpose();
  }
  return true;
}

// (I - h d Laplacian) x = b per species, Neumann via ghost reflection.
void diffusion_substep(const ReactionNetwork& net, Mat& v, double h) {
  const int N = static_cast<int>(v.rows());
  if (N < 2) return;
  const double dx = 1.0 / N;
  std::vector<double> cp(N), dp(N);
  for (int i = 0; i < v.cols(); ++i) {
    const double r = h * net.diffusion()[i] / (dx * dx);
    // Thomas algorithm; sub/super diagonal -r, diagonal 1 + 2r (1 + r at the ends).
    double b0 = 1.0 + r;
    cp[0] = -r / b0;
    dp[0] = v(0, i) / b0;
    for (int j = 1; j < N; ++j) {
      double bj = (j == N - 1) ? 1.0 + r : 1.0 + 2.0 * r;
      double den = bj + r * cp[j - 1];
      cp[j] = -r / den;
      dp[j] = (v(j, i) + r * dp[j - 1]) / den;
    }
    const double before = v.col(i).sum();
    v(N - 1, i) = dp[N - 1];
    for (int j = N - 2; j >= 0; --j) v(j, i) = dp[j] - cp[j] * v(j + 1, i);
    // The exact solve conserves the column sum; remove the rounding drift so
    // it does not accumulate over many steps.
    const double shift = (before - v.col(i).sum()) / N;
    if (v.col(i).minCoeff() + shift >= 0.0) v.col(i).array() += shift;
  }
}

void step_recursive(const ReactionNetwork& net, const std::optional<Vec>& u0, Mat& v, double dt, int depth,
                    StepInfo& info) {
  Mat trial = v;
  NegativeCell bad;
  if (reaction_substep(net, u0, trial, dt, bad)) {
    diffusion_substep(net, trial, dt);
    v = std::move(trial);
    info.halvings = std::max(info.halvings, depth);
    return;
  }
  if (depth == 40)
    throw Error("time step underflow after 40 halvings: cell " + std::to_string(bad.cell) +
                (bad.species >= 0 ? ", species " + net.species()[bad.species] + " would become negative"
                                  : ", the reaction step would increase the free energy"));
  info.substeps += 1;
  step_recursive(net, u0, v, 0.5 * dt, depth + 1, info);
  step_recursive(net, u0, v, 0.5 * dt, depth + 1, info);
}

}  // namespace

Field step(const ReactionNetwork& net, const Field& field, double dt, StepInfo* info) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error("step: dt must be positive");
  if (field.species() != net.num_species()) throw Error("step: field has wrong number of species");
  if (!(field.min_value() >= 0.0)) throw Error("step: field must be nonnegative");
  StepInfo local;
  Mat v = field.values();
  std::optional<Vec> u0;
  if (net.num_reactions() > 0) {
    auto db = check_detailed_balance(net);
    if (db.balanced) u0 = db.log_witness;
  }
  step_recursive(net, u0, v, dt, 0, local);
  if (info) *info = local;
  return Field(std::move(v));
}

Trajectory simulate(const ReactionNetwork& net, const Field& c0, const SimulationOptions& opts) {
  if (!(opts.t_end > 0.0)) throw Error("simulate: t_end must be positive");
  if (!(opts.dt0 > 0.0)) throw Error("simulate: dt must be positive");
  if (opts.record_every < 1) throw Error("simulate: record_every must be >= 1");
  if (c0.species() != net.num_species()) throw Error("simulate: initial field has wrong number of species");
  if (!(c0.min_value() >= 0.0)) throw Error("simulate: initial field must be nonnegative");

  Trajectory tr;
  tr.species = net.species();
  tr.basis = conservation_basis(net);
  tr.has_reference = opts.reference.has_value();
  tr.reference = opts.reference.value_or(Vec::Ones(net.num_species()));
  if (tr.reference.size() != net.num_species() || !(tr.reference.minCoeff() > 0.0))
    throw Error("simulate: reference state must be positive");

  const long n_steps = std::max(1L, static_cast<long>(std::ceil(opts.t_end / opts.dt0 - 1e-9)));
  const double dt = opts.t_end / n_steps;
  const long n_records = (n_steps + opts.record_every - 1) / opts.record_every + 1;
  const std::size_t max_snap = std::max<std::size_t>(1, opts.max_snapshots);
  const long stride = std::max(1L, static_cast<long>((n_records + static_cast<long>(max_snap) - 1) /
                                                    static_cast<long>(max_snap)));

  const Vec M0 = tr.basis.Q * c0.averages();
  long record_index = 0;
  auto record = [&](double t, const Field& f) {
    TrajectoryPoint p;
    p.time = t;
    p.entropy = entropy(f, tr.reference);
    p.dissipation = dissipation(net, f);
    p.masses = tr.basis.Q * f.averages();
    p.min_concentration = f.min_value();
    if (tr.has_reference) p.l1_distance_sq = l1_distance_sq(f, tr.reference);
    tr.times.push_back(t);
    tr.series.push_back(std::move(p));
    if (record_index % stride == 0 && tr.snapshots.size() < max_snap) {
      tr.snapshot_times.push_back(t);
      tr.snapshots.push_back(f);
    }
    ++record_index;
  };

  Field f = c0;
  record(0.0, f);
  double E_prev = entropy(f, tr.reference).total_relative;
  for (long n = 1; n <= n_steps; ++n) {
    StepInfo info;
    f = step(net, f, dt, &info);
    tr.max_halvings = std::max(tr.max_halvings, info.halvings);
    double E = entropy(f, tr.reference).total_relative;
    tr.max_entropy_increase = std::max(tr.max_entropy_increase, E - E_prev);
    E_prev = E;
    if (tr.basis.m > 0)
      tr.max_mass_drift = std::max(tr.max_mass_drift, (tr.basis.Q * f.averages() - M0).cwiseAbs().maxCoeff());
    if (n % opts.record_every == 0 || n == n_steps) record(n * dt, f);
  }
  tr.steps = static_cast<int>(n_steps);
  tr.final_state = std::move(f);
  return tr;
}

Field project_to_masses(const Field& field, const ConservationBasis& basis, const Vec& M_target) {
  if (M_target.size() != basis.m) throw Error("project_to_masses: target has wrong length");
  if (field.species() != basis.Q.cols()) throw Error("project_to_masses: field has wrong number of species");
  if (!(field.min_value() >= 0.0)) throw Error("project_to_masses: field must be nonnegative");
  const int I = field.species();
  const Vec cbar = field.averages();
  if (basis.m == 0) return field;
  const double scale = std::max(1.0, M_target.cwiseAbs().maxCoeff());
  if ((basis.Q * cbar - M_target).cwiseAbs().maxCoeff() <= 1e-14 * scale) return field;

  // Closest nonnegative averages on the affine set Q t = M (active set on t >= 0).
  std::vector<bool> fixed(I, false);
  Vec t = cbar;
  for (int pass = 0; pass <= I; ++pass) {
    std::vector<int> freev;
    for (int i = 0; i < I; ++i)
      if (!fixed[i]) freev.push_back(i);
    Mat QF(basis.m, static_cast<int>(freev.size()));
    Vec cF(freev.size());
    for (std::size_t k = 0; k < freev.size(); ++k) {
      QF.col(static_cast<int>(k)) = basis.Q.col(freev[k]);
      cF[static_cast<int>(k)] = cbar[freev[k]];
    }
    Vec tF = cF;
    if (!freev.empty()) {
      Mat G = QF * QF.transpose();
      Vec lam = G.completeOrthogonalDecomposition().solve(M_target - QF * cF);
      tF = cF + QF.transpose() * lam;
    }
    t = Vec::Zero(I);
    for (std::size_t k = 0; k < freev.size(); ++k) t[freev[k]] = tF[static_cast<int>(k)];
    if ((basis.Q * t - M_target).cwiseAbs().maxCoeff() > 1e-12 * scale)
      throw Error("project_to_masses: infeasible target (no nonnegative state has these masses)");
    bool any_negative = false;
    for (int i = 0; i < I; ++i)
      if (t[i] < 0.0) {
        fixed[i] = true;
        any_negative = true;
      }
    if (!any_negative) break;
    if (pass == I) throw Error("project_to_masses: infeasible target (no nonnegative state has these masses)");
  }

  Mat v = field.values();
  for (int i = 0; i < I; ++i) {
    double target = std::max(0.0, t[i]);
    auto col = v.col(i);
    if (target == 0.0) {
      col.setZero();
      continue;
    }
    double s = target - cbar[i];
    if (col.minCoeff() + s >= 0.0) {
      col.array() += s;
    } else {
      col = (col.array() + s).cwiseMax(0.0).matrix();
      double mean = col.mean();
      if (mean > 0.0)
        col *= target / mean;
      else
        col.setConstant(target);
    }
  }
  return Field(std::move(v));
}

}  // namespace rdeed
