#include "rdeed/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "rdeed/family.hpp"

namespace rdeed {

DetailedBalanceCheck check_detailed_balance(const ReactionNetwork& net) {
  const int I = net.num_species(), R = net.num_reactions();
  DetailedBalanceCheck out;
  if (R == 0) {
    out.balanced = true;
    out.log_witness = Vec::Zero(I);
    return out;
  }
  Mat W = wegscheider_matrix(net);
  Vec rhs(R);
  for (int r = 0; r < R; ++r) rhs[r] = std::log(net.reaction(r).kf / net.reaction(r).kb);
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(W);
  out.log_witness = cod.solve(rhs);
  out.residual = (W * out.log_witness - rhs).cwiseAbs().maxCoeff();
  out.balanced = out.residual < 1e-10;
  return out;
}

RescaledNetwork rescale_to_unit_rates(const ReactionNetwork& net) {
  auto db = check_detailed_balance(net);
  if (!db.balanced)
    throw Error("network does not satisfy detailed balance (least-squares residual " + std::to_string(db.residual) +
                ")");
  std::vector<Reaction> rx = net.reactions();
  for (auto& r : rx) {
    double k = r.kf * std::exp(r.alpha.dot(db.log_witness));
    r.kf = k;
    r.kb = k;
  }
  return {ReactionNetwork(net.species(), std::move(rx), net.diffusion()), db.log_witness.array().exp().matrix()};
}

namespace {

// k_r of the unit-rate form, from the witness.
Vec unit_rates(const ReactionNetwork& net, const Vec& witness) {
  Vec k(net.num_reactions());
  for (int r = 0; r < net.num_reactions(); ++r) k[r] = net.reaction(r).kf * std::exp(net.reaction(r).alpha.dot(witness));
  return k;
}

double residual_with(const ReactionNetwork& net, const Vec& witness, const Vec& c) {
  Vec k = unit_rates(net, witness);
  double res = 0.0;
  for (int r = 0; r < net.num_reactions(); ++r) {
    const Reaction& rx = net.reaction(r);
    res = std::max(res, std::abs(rx.kf * monomial(c, rx.alpha) - rx.kb * monomial(c, rx.beta)) / k[r]);
  }
  return res;
}

}  // namespace

double reaction_residual(const ReactionNetwork& net, const Vec& c) {
  return residual_with(net, check_detailed_balance(net).log_witness, c);
}

Equilibrium solve_equilibrium_single(const ReactionNetwork& net, const Vec& M) {
  auto fam = as_single_reaction(net);
  if (!fam) throw Error("solve_equilibrium_single: network is not a single reversible reaction between disjoint species");
  const int I = static_cast<int>(fam->a.size()), J = static_cast<int>(fam->b.size());
  if (M.size() != I + J - 1) throw Error("solve_equilibrium_single: mass vector has wrong length");
  if ((M.array() <= 0.0).any()) throw Error("solve_equilibrium_single: masses must be positive");

  // Full mass table from the rows v_j (M_{1,j}) and w_i (M_{i,1}).
  Vec M1j = M.head(J);
  Vec Mi1(I);
  Mi1[0] = M[0];
  for (int i = 1; i < I; ++i) Mi1[i] = M[J + i - 1];

  // Reindex so that the first left species carries the smallest M_{i,1}.
  int p = 0;
  for (int i = 1; i < I; ++i)
    if (Mi1[i] < Mi1[p]) p = i;
  std::vector<int> order(I);
  std::iota(order.begin(), order.end(), 0);
  std::swap(order[0], order[p]);
  Vec al(I), N(I), Mpj(J);
  for (int i = 0; i < I; ++i) {
    al[i] = fam->alpha[order[i]];
    N[i] = Mi1[order[i]] - Mi1[p];
  }
  for (int j = 0; j < J; ++j) Mpj[j] = Mi1[p] + M1j[j] - M1j[0];  // M_{p,j}
  const Vec& be = fam->beta;
  const double kf = net.reaction(0).kf, kb = net.reaction(0).kb;

  auto f = [&](double a1) {
    double v = kf * std::pow(a1, al[0]);
    for (int i = 1; i < I; ++i) v *= std::pow(al[i] * N[i] + al[i] / al[0] * a1, al[i]);
    return v;
  };
  auto g = [&](double a1) {
    double v = kb;
    for (int j = 0; j < J; ++j) v *= std::pow(std::max(0.0, be[j] * Mpj[j] - be[j] / al[0] * a1), be[j]);
    return v;
  };

  double hi = std::numeric_limits<double>::infinity();
  for (int j = 0; j < J; ++j) hi = std::min(hi, al[0] * Mpj[j]);
  double lo = 0.0;
  double a1 = 0.5 * hi;
  int it = 0;
  for (; it < 400; ++it) {
    a1 = 0.5 * (lo + hi);
    double fv = f(a1), gv = g(a1);
    if (std::abs(fv - gv) < 1e-13 * std::max(1.0, fv)) break;
    if (fv < gv)
      lo = a1;
    else
      hi = a1;
    if (hi - lo <= std::numeric_limits<double>::epsilon() * hi) break;
  }

  Equilibrium eq;
  eq.iterations = it;
  eq.c_inf = Vec::Zero(net.num_species());
  for (int i = 0; i < I; ++i) eq.c_inf[fam->a[order[i]]] = i == 0 ? a1 : al[i] * N[i] + al[i] / al[0] * a1;
  for (int j = 0; j < J; ++j) eq.c_inf[fam->b[j]] = be[j] * Mpj[j] - be[j] / al[0] * a1;
  ConservationBasis basis = conservation_basis(net);
  eq.residual_mass = (basis.Q * eq.c_inf - M).cwiseAbs().maxCoeff();
  eq.residual_reactions = reaction_residual(net, eq.c_inf);
  return eq;
}

Equilibrium solve_equilibrium_general(const ReactionNetwork& net, const ConservationBasis& basis, const Vec& M,
                                      const std::optional<Vec>& x0) {
  auto db = check_detailed_balance(net);
  if (!db.balanced) throw Error("solve_equilibrium_general: network is not detailed balanced");
  if (M.size() != basis.m) throw Error("solve_equilibrium_general: mass vector has wrong length");
  if (basis.nonnegative && (M.array() <= 0.0).any())
    throw Error("infeasible masses: a positive equilibrium needs every mass to be positive");
  const Vec& u0 = db.log_witness;
  const Mat& Q = basis.Q;
  const int m = basis.m;

  // Every solution of W u = log(kf/kb) is u0 + Q^T y, so only the mass
  // equations remain; they are the gradient of a strictly convex potential.
  Vec y = Vec::Zero(m);
  if (x0) {
    if (x0->size() != net.num_species() || (x0->array() <= 0.0).any())
      throw Error("initial guess must be a positive state of the right dimension");
    Vec shift = x0->array().log().matrix() - u0;
    y = Q.transpose().completeOrthogonalDecomposition().solve(shift);
  }
  auto state = [&](const Vec& yy) -> Vec { return (u0 + Q.transpose() * yy).array().exp().matrix(); };
  auto potential = [&](const Vec& yy) { return state(yy).sum() - M.dot(yy); };

  const double scale = std::max(1.0, M.size() ? M.cwiseAbs().maxCoeff() : 1.0);
  const double tol = 1e-13 * scale;
  Equilibrium eq;
  Vec c = state(y);
  Vec F = Q * c - M;
  int it = 0;
  for (; it < 200 && m > 0; ++it) {
    double fn = F.cwiseAbs().maxCoeff();
    if (fn < tol) break;
    Mat H = Q * c.asDiagonal() * Q.transpose();
    Vec step = -H.ldlt().solve(F);
    if (fn < 1e-6 * scale) {
      // Close to the root the potential is flat to rounding; take full
      // Newton steps while the residual keeps dropping.
      Vec yt = y + step;
      Vec ct = state(yt);
      Vec Ft = Q * ct - M;
      if (!(Ft.cwiseAbs().maxCoeff() < fn)) break;
      y = yt;
      c = ct;
      F = Ft;
      continue;
    }
    double phi0 = potential(y), slope = F.dot(step);
    double t = 1.0;
    bool accepted = false;
    for (int h = 0; h < 60; ++h, t *= 0.5) {
      Vec yt = y + t * step;
      double phit = potential(yt);
      if (std::isfinite(phit) && phit <= phi0 + 1e-4 * t * slope) {
        y = yt;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // Potential flat to rounding: accept the Newton step if the residual drops.
      Vec yt = y + step;
      Vec Ft = Q * state(yt) - M;
      if (Ft.cwiseAbs().maxCoeff() >= fn) break;
      y = yt;
    }
    c = state(y);
    F = Q * c - M;
  }
  eq.iterations = it;
  eq.c_inf = c;
  eq.residual_mass = m ? F.cwiseAbs().maxCoeff() : 0.0;
  eq.residual_reactions = residual_with(net, u0, c);
  if (!(eq.residual_mass < 1e-9 * std::max(1.0, M.size() ? M.cwiseAbs().maxCoeff() : 1.0)))
    throw Error("equilibrium Newton iteration did not converge after " + std::to_string(it) +
                " iterations (mass residual " + std::to_string(eq.residual_mass) + "); masses may be infeasible");
  return eq;
}

Equilibrium solve_equilibrium(const ReactionNetwork& net, const ConservationBasis& basis, const Vec& M) {
  if (as_single_reaction(net)) return solve_equilibrium_single(net, M);
  return solve_equilibrium_general(net, basis, M);
}

// ---------------------------------------------------------------------------

BoundaryEquilibriumReport boundary_equilibria(const ReactionNetwork& net, const ConservationBasis& basis,
                                              const Vec& M, std::uint64_t seed) {
  const int I = net.num_species();
  if (I > 12) throw Error("boundary_equilibria: enumeration supports at most 12 species");
  if (M.size() != basis.m) throw Error("boundary_equilibria: mass vector has wrong length");
  const Mat& Q = basis.Q;
  Vec caps = species_bounds(basis, M);
  double fallback = std::max(1.0, M.size() ? M.cwiseAbs().maxCoeff() : 1.0);
  for (int i = 0; i < I; ++i)
    if (!std::isfinite(caps[i])) caps[i] = fallback;

  auto residual = [&](const Vec& c) {
    Vec G(I + basis.m);
    G.head(I) = reaction_vector(net, c);
    G.tail(basis.m) = Q * c - M;
    return G;
  };

  BoundaryEquilibriumReport rep;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (unsigned mask = 1; mask < (1u << I); ++mask) {
    ++rep.patterns_searched;
    std::vector<int> freev;
    for (int i = 0; i < I; ++i)
      if (!(mask & (1u << i))) freev.push_back(i);
    const int nf = static_cast<int>(freev.size());
    for (int start = 0; start < 16; ++start) {
      Vec c = Vec::Zero(I);
      for (int i : freev) c[i] = caps[i] * U(rng);
      Vec G = residual(c);
      double lm = 1e-3;
      for (int it = 0; it < 200 && nf > 0; ++it) {
        if (G.cwiseAbs().maxCoeff() < 1e-14) break;
        Mat Jfull(I + basis.m, I);
        Jfull.topRows(I) = reaction_jacobian(net, c);
        Jfull.bottomRows(basis.m) = Q;
        Mat J(I + basis.m, nf);
        for (int k = 0; k < nf; ++k) J.col(k) = Jfull.col(freev[k]);
        Mat A = J.transpose() * J;
        Vec g = J.transpose() * G;
        Mat Areg = A;
        for (int k = 0; k < nf; ++k) Areg(k, k) += lm * std::max(A(k, k), 1e-12);
        Vec d = -Areg.ldlt().solve(g);
        Vec cn = c;
        for (int k = 0; k < nf; ++k) cn[freev[k]] = std::max(0.0, c[freev[k]] + d[k]);
        Vec Gn = residual(cn);
        if (Gn.squaredNorm() < G.squaredNorm()) {
          c = cn;
          G = Gn;
          lm = std::max(lm / 3.0, 1e-12);
        } else {
          lm *= 4.0;
          if (lm > 1e12) break;
        }
      }
      double res = G.cwiseAbs().maxCoeff();
      if (!(res < 1e-9)) continue;
      BoundaryEquilibrium be;
      for (int i = 0; i < I; ++i) {
        if (c[i] <= 1e-12) {
          c[i] = 0.0;
          be.zero_pattern.push_back(i);
        }
      }
      be.state = c;
      be.residual = residual(c).cwiseAbs().maxCoeff();
      if (!(be.residual < 1e-9)) continue;
      bool dup = false;
      for (const auto& f : rep.found) dup = dup || (f.state - c).cwiseAbs().maxCoeff() < 1e-7;
      if (!dup) rep.found.push_back(std::move(be));
    }
  }
  std::sort(rep.found.begin(), rep.found.end(), [](const auto& a, const auto& b) {
    return std::lexicographical_compare(a.state.data(), a.state.data() + a.state.size(), b.state.data(),
                                        b.state.data() + b.state.size());
  });
  return rep;
}

}  // namespace rdeed
