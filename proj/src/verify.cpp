#include "rdeed/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "rdeed/entropy.hpp"
#include "rdeed/equilibrium.hpp"

namespace rdeed {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

// Perturbation variable in [-1, mu_max]: uniform, tiny, or exactly -1.
double draw_mu(Rng& rng, double mu_max) {
  double u = uniform(rng, 0.0, 1.0);
  if (u < 0.45) return uniform(rng, -1.0, mu_max);
  if (u < 0.9) {
    double mag = std::pow(10.0, uniform(rng, -8.0, 0.0));
    return uniform(rng, 0.0, 1.0) < 0.5 ? -mag : std::min(mag * mu_max, mu_max);
  }
  return -1.0;
}

// (1+mu)^2 = 1 + p / c; nullopt when outside [-1, mu_max].
std::optional<double> mu_from_deviation(double p, double c, double mu_max) {
  double arg = 1.0 + p / c;
  if (arg < -1e-15) return std::nullopt;
  double mu = std::sqrt(std::max(arg, 0.0)) - 1.0;
  if (mu > mu_max) return std::nullopt;
  return mu;
}

double deviation(double mu, double c) { return c * mu * (mu + 2.0); }

double resolve_mu_max(const LemmaParams& p, const Vec& c_inf, int species) {
  if (p.mu_max) {
    if (!(*p.mu_max > 0.0)) throw Error("verify_lemma: mu_max must be positive");
    return *p.mu_max;
  }
  double K = p.K > 0.0 ? p.K : 2.0 * species;
  return std::sqrt(K / c_inf.minCoeff()) - 1.0;
}

VerificationReport lemma_h4_single(const LemmaParams& p, long samples, std::uint64_t seed) {
  const int I = p.I, J = p.J;
  if (I < 1 || J < 1) throw Error("verify_lemma H4_single: I and J must be >= 1");
  if (p.alpha && p.alpha->size() != I) throw Error("verify_lemma H4_single: alpha has wrong length");
  if (p.beta && p.beta->size() != J) throw Error("verify_lemma H4_single: beta has wrong length");
  for (const auto& e : {p.alpha, p.beta})
    if (e && !(e->minCoeff() >= 1.0)) throw Error("verify_lemma H4_single: exponents must be >= 1");
  Vec c_inf = p.c_inf.value_or(Vec::Ones(I + J));
  if (c_inf.size() != I + J || !(c_inf.minCoeff() > 0.0))
    throw Error("verify_lemma H4_single: c_inf must be positive with I + J entries");
  const double mu_max = resolve_mu_max(p, c_inf, I + J);
  const double H4 = p.scale / std::max(I, J);

  SlackAccumulator acc;
  long accepted = 0, attempts = 0;
  Rng rng(seed);
  Vec alpha(I), beta(J), mu(I), xi(J);
  while (accepted < samples) {
    if (++attempts > 100 * samples + 1000) throw Error("verify_lemma H4_single: sampler rejected too many draws");
    bool random_exp = !p.alpha && uniform(rng, 0.0, 1.0) < 0.5;
    for (int i = 0; i < I; ++i) alpha[i] = p.alpha ? (*p.alpha)[i] : (random_exp ? uniform(rng, 1.0, 3.0) : 1.0);
    for (int j = 0; j < J; ++j) beta[j] = p.beta ? (*p.beta)[j] : (random_exp ? uniform(rng, 1.0, 3.0) : 1.0);
    // Mass laws a_i/alpha_i + b_j/beta_j: deviations are -alpha_i t and beta_j t.
    int driver = static_cast<int>(uniform(rng, 0.0, I + J));
    driver = std::min(driver, I + J - 1);
    double x = draw_mu(rng, mu_max);
    double t = driver < I ? -deviation(x, c_inf[driver]) / alpha[driver]
                          : deviation(x, c_inf[driver]) / beta[driver - I];
    bool ok = true;
    for (int i = 0; i < I && ok; ++i) {
      auto m = i == driver ? std::optional<double>(x) : mu_from_deviation(-alpha[i] * t, c_inf[i], mu_max);
      if (m) mu[i] = *m; else ok = false;
    }
    for (int j = 0; j < J && ok; ++j) {
      auto m = I + j == driver ? std::optional<double>(x)
                               : mu_from_deviation(beta[j] * t, c_inf[I + j], mu_max);
      if (m) xi[j] = *m; else ok = false;
    }
    if (!ok) continue;
    double pa = 1.0, pb = 1.0;
    for (int i = 0; i < I; ++i) pa *= std::pow(1.0 + mu[i], alpha[i]);
    for (int j = 0; j < J; ++j) pb *= std::pow(1.0 + xi[j], beta[j]);
    double lhs = (pa - pb) * (pa - pb);
    acc.add(lhs, H4 * (mu.squaredNorm() + xi.squaredNorm()));
    ++accepted;
  }
  VerificationReport rep;
  rep.name = "H4_single";
  rep.seed = seed;
  acc.finish(rep);
  rep.parameters["I"] = I;
  rep.parameters["J"] = J;
  rep.parameters["H4"] = H4;
  rep.parameters["mu_max"] = mu_max;
  rep.parameters["scale"] = p.scale;
  rep.parameters["attempts"] = static_cast<double>(attempts);
  return rep;
}

VerificationReport lemma_h4_chain(const LemmaParams& p, long samples, std::uint64_t seed) {
  Vec c = p.c_inf.value_or(Vec::Ones(5));
  if (c.size() != 5 || !(c.minCoeff() > 0.0)) throw Error("verify_lemma H4_chain: c_inf must be positive with 5 entries");
  const double mu_max = resolve_mu_max(p, c, 5);
  const double H4 = p.scale / 12.0;

  SlackAccumulator acc;
  long accepted = 0, attempts = 0;
  Rng rng(seed);
  // Laws: p1 + p3 + p4 = 0, p1 + p3 + p5 = 0, p2 + p3 + p4 = 0  =>  p2 = p1, p5 = p4.
  static const int pairs[3][3] = {{0, 2, 3}, {0, 3, 2}, {2, 3, 0}};  // two drivers, solved index
  while (accepted < samples) {
    if (++attempts > 100 * samples + 1000) throw Error("verify_lemma H4_chain: sampler rejected too many draws");
    const int* pr = pairs[std::min(2, static_cast<int>(uniform(rng, 0.0, 3.0)))];
    std::array<double, 5> mu{};
    std::array<double, 5> dev{};
    mu[pr[0]] = draw_mu(rng, mu_max);
    mu[pr[1]] = draw_mu(rng, mu_max);
    dev[pr[0]] = deviation(mu[pr[0]], c[pr[0]]);
    dev[pr[1]] = deviation(mu[pr[1]], c[pr[1]]);
    dev[pr[2]] = -dev[pr[0]] - dev[pr[1]];
    auto solved = mu_from_deviation(dev[pr[2]], c[pr[2]], mu_max);
    if (!solved) continue;
    mu[pr[2]] = *solved;
    auto m2 = mu_from_deviation(dev[0], c[1], mu_max);
    auto m5 = mu_from_deviation(dev[3], c[4], mu_max);
    if (!m2 || !m5) continue;
    mu[1] = *m2;
    mu[4] = *m5;
    double g1 = (1 + mu[0]) * (1 + mu[1]) - (1 + mu[2]);
    double g2 = (1 + mu[3]) * (1 + mu[4]) - (1 + mu[2]);
    double s = 0.0;
    for (double m : mu) s += m * m;
    acc.add(g1 * g1 + g2 * g2, H4 * s);
    ++accepted;
  }
  VerificationReport rep;
  rep.name = "H4_chain";
  rep.seed = seed;
  acc.finish(rep);
  rep.parameters["H4"] = H4;
  rep.parameters["mu_max"] = mu_max;
  rep.parameters["scale"] = p.scale;
  rep.parameters["attempts"] = static_cast<double>(attempts);
  return rep;
}

// 2 ||grad C||^2 + 2 sum_r ||C^a - C^b||^2 >= K3 (||grad C||^2 + sum_r (Cbar^a - Cbar^b)^2), C = sqrt c.
VerificationReport lemma_average_k3(const LemmaParams& p, long samples, std::uint64_t seed) {
  if (!p.network) throw Error("verify_lemma average_K3: needs a network");
  const ReactionNetwork& net = *p.network;
  if (!(p.K > 0.0)) throw Error("verify_lemma average_K3: needs K > 0");
  if (p.cells < 2) throw Error("verify_lemma average_K3: needs at least 2 cells");
  const int I = net.num_species();
  Vec c_inf = p.c_inf.value_or(Vec::Ones(I));
  if (c_inf.size() != I || !(c_inf.minCoeff() > 0.0)) throw Error("verify_lemma average_K3: c_inf must be positive");
  // Grid gradients obey the discrete Poincare inequality, so the constant is
  // computed with the grid's own C_P.
  DomainConstants dom = DomainConstants::discrete_interval(p.cells);
  CoreConstants core = compute_core_constants(net, c_inf, p.K, dom);
  const double K3 = p.scale * core.K3;

  SlackAccumulator acc;
  for (long s = 0; s < samples; ++s) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
    std::normal_distribution<double> Z(0.0, 1.0);
    double rough = std::pow(10.0, uniform(rng, -3.0, 1.0));
    Field f(p.cells, I);
    for (int i = 0; i < I; ++i) {
      double mean = p.K * std::pow(10.0, uniform(rng, -4.0, 0.0));
      for (int j = 0; j < p.cells; ++j) f(j, i) = std::exp(rough * Z(rng));
      double m = f.values().col(i).mean();
      f.values().col(i) *= mean / m;
    }
    double grad = sqrt_gradient_sq(f);
    double gap = monomial_gap_sq(net, f, false);
    Mat C = f.values().cwiseSqrt();
    Vec Cbar = C.colwise().mean().transpose();
    double avg = 0.0;
    for (const auto& rx : net.reactions()) {
      double g = monomial(Cbar, rx.alpha) - monomial(Cbar, rx.beta);
      avg += g * g;
    }
    acc.add(2.0 * grad + 2.0 * gap, K3 * (grad + avg));
  }
  VerificationReport rep;
  rep.name = "average_K3";
  rep.seed = seed;
  acc.finish(rep);
  rep.parameters["K"] = p.K;
  rep.parameters["K3"] = K3;
  rep.parameters["C_P"] = dom.C_P;
  rep.parameters["cells"] = p.cells;
  rep.parameters["scale"] = p.scale;
  return rep;
}

}  // namespace

VerificationReport verify_eed(const ReactionNetwork& net, const ConservationBasis& basis, const Vec& M,
                              double lambda, long samples, int cells, std::uint64_t seed) {
  if (samples < 1) throw Error("verify_eed: samples must be >= 1");
  if (cells < 1) throw Error("verify_eed: grid must have at least one cell");
  if (!(lambda >= 0.0)) throw Error("verify_eed: lambda must be nonnegative");
  const Vec c_inf = solve_equilibrium(net, basis, M).c_inf;
  const int I = net.num_species();

  SlackAccumulator acc;
  double min_ratio = std::numeric_limits<double>::infinity();
  for (long s = 0; s < samples; ++s) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
    std::normal_distribution<double> Z(0.0, 1.0);
    // Log-normal species levels; cell noise amplitude spread over three decades
    // so that nearly homogeneous fields are sampled as well as rough ones.
    double rough = std::pow(10.0, uniform(rng, -3.0, 0.0));
    Field f(cells, I);
    for (int i = 0; i < I; ++i) {
      double level = c_inf[i] * std::exp(Z(rng));
      for (int j = 0; j < cells; ++j) f(j, i) = level * std::exp(rough * Z(rng));
    }
    f = project_to_masses(f, basis, M);
    double E = entropy(f, c_inf).total_relative;
    double D = dissipation(net, f).total();
    if (E > 0.0) min_ratio = std::min(min_ratio, D / E);
    acc.add(D, lambda * E);
  }
  VerificationReport rep;
  rep.name = "eed";
  rep.seed = seed;
  acc.finish(rep);
  rep.parameters["lambda"] = lambda;
  rep.parameters["cells"] = cells;
  rep.parameters["min_dissipation_ratio"] = min_ratio;
  return rep;
}

DecayFit fit_decay_rate(const std::vector<double>& times, const std::vector<double>& values, double window) {
  if (times.size() != values.size()) throw Error("fit_decay_rate: times and values differ in length");
  if (times.size() < 10) throw Error("fit_decay_rate: need at least 10 recorded times");
  if (!(window > 0.0 && window <= 1.0)) throw Error("fit_decay_rate: window must be in (0, 1]");
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < values.size(); ++k)
    if (values[k] > 1e-14) idx.push_back(k);
  DecayFit fit;
  std::size_t n = static_cast<std::size_t>(std::ceil(window * idx.size()));
  n = std::min(idx.size(), std::max<std::size_t>(n, 2));
  if (idx.size() < 2) {
    fit.rate = std::numeric_limits<double>::infinity();
    fit.converged = true;
    return fit;
  }
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t k = idx.size() - n; k < idx.size(); ++k) {
    double t = times[idx[k]], y = std::log(values[idx[k]]);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
  }
  double dn = static_cast<double>(n);
  double den = dn * stt - st * st;
  if (!(den > 0.0)) throw Error("fit_decay_rate: fitted times are degenerate");
  fit.rate = -(dn * sty - st * sy) / den;
  fit.points_used = static_cast<int>(n);
  return fit;
}

DecayFit fit_decay_rate(const Trajectory& traj, double window) {
  if (!traj.has_reference) throw Error("fit_decay_rate: trajectory has no reference equilibrium");
  std::vector<double> v;
  v.reserve(traj.series.size());
  for (const auto& p : traj.series) v.push_back(p.entropy.total_relative);
  return fit_decay_rate(traj.times, v, window);
}

VerificationReport verify_ckp(const Trajectory& traj, double C_CKP) {
  if (!traj.has_reference) throw Error("verify_ckp: trajectory has no reference equilibrium");
  if (!(C_CKP >= 0.0)) throw Error("verify_ckp: constant must be nonnegative");
  SlackAccumulator acc;
  for (const auto& p : traj.series) acc.add(p.entropy.total_relative, C_CKP * p.l1_distance_sq);
  VerificationReport rep;
  rep.name = "ckp";
  acc.finish(rep);
  rep.parameters["C_CKP"] = C_CKP;
  return rep;
}

VerificationReport verify_lemma(const std::string& name, const LemmaParams& params, long samples,
                                std::uint64_t seed) {
  if (samples < 1) throw Error("verify_lemma: samples must be >= 1");
  if (name == "H4_single") return lemma_h4_single(params, samples, seed);
  if (name == "H4_chain") return lemma_h4_chain(params, samples, seed);
  if (name == "average_K3") return lemma_average_k3(params, samples, seed);
  if (name == "elementary") return elementary_bounds_check(samples, seed);
  throw Error("unknown lemma '" + name + "' (expected H4_single, H4_chain, average_K3 or elementary)");
}

}  // namespace rdeed
