#include "rdeed/constants.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>

#include "rdeed/entropy.hpp"
#include "rdeed/equilibrium.hpp"
#include "rdeed/family.hpp"

namespace rdeed {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) throw Error(std::string(what) + " must be positive and finite");
}

}  // namespace

DomainConstants DomainConstants::unit_interval() {
  DomainConstants d;
  d.C_P = kPi * kPi;
  d.C_LSI = d.C_P / 2.0;
  d.source = Source::IntervalDefault;
  d.lsi_heuristic = true;
  return d;
}

DomainConstants DomainConstants::discrete_interval(int cells) {
  if (cells < 2) throw Error("discrete Poincare constant needs at least two cells");
  DomainConstants d;
  double s = std::sin(kPi / (2.0 * cells));
  d.C_P = 4.0 * cells * cells * s * s;
  d.C_LSI = d.C_P / 2.0;
  d.source = Source::DiscreteInterval;
  d.lsi_heuristic = true;
  return d;
}

DomainConstants DomainConstants::user(double C_P, double C_LSI) {
  require_positive(C_P, "C_P");
  require_positive(C_LSI, "C_LSI");
  DomainConstants d;
  d.C_P = C_P;
  d.C_LSI = C_LSI;
  d.source = Source::UserSupplied;
  d.lsi_heuristic = false;
  return d;
}

std::string to_string(DomainConstants::Source s) {
  switch (s) {
    case DomainConstants::Source::IntervalDefault:
      return "interval-default";
    case DomainConstants::Source::DiscreteInterval:
      return "discrete-interval";
    case DomainConstants::Source::UserSupplied:
      return "user-supplied";
  }
  return "unknown";
}

double compute_K(double E0, int I) {
  if (!(E0 >= 0.0)) throw Error("compute_K: initial entropy must be nonnegative");
  if (I < 1) throw Error("compute_K: need at least one species");
  return 2.0 * (E0 + I);
}

CoreConstants compute_core_constants(const ReactionNetwork& net, const Vec& c_inf, double K,
                                     const DomainConstants& domain) {
  require_positive(K, "K");
  if (c_inf.size() != net.num_species() || !(c_inf.minCoeff() > 0.0))
    throw Error("compute_core_constants: equilibrium must be positive");
  const int I = net.num_species(), R = net.num_reactions();
  CoreConstants c;
  c.d_min = net.diffusion().minCoeff();
  c.k_min = std::numeric_limits<double>::infinity();
  for (const auto& rx : net.reactions()) c.k_min = std::min({c.k_min, rx.kf, rx.kb});
  c.K1 = 2.0 * std::min(c.d_min, c.k_min);

  c.K2 = 0.0;
  for (int i = 0; i < I; ++i) c.K2 = std::max(c.K2, phi(K / c_inf[i]));

  const double Kb = std::max(1.0, K);
  c.degree = 0;
  c.C_box = 0.0;
  for (const auto& rx : net.reactions()) {
    double na = rx.alpha.sum(), nb = rx.beta.sum();
    c.degree = std::max(c.degree, static_cast<int>(std::ceil(std::max(na, nb))));
    // |Cbar^a - Cbar^b|^2 <= max(Cbar^a, Cbar^b)^2 <= K^max(|a|,|b|) on [0, sqrt K]^I.
    c.C_box += std::pow(Kb, std::max(na, nb));
  }
  c.stoich_sum = 0.0;
  for (int i = 0; i < I; ++i) {
    double mx = 0.0;
    for (const auto& rx : net.reactions()) mx = std::max(mx, rx.alpha[i] + rx.beta[i]);
    c.stoich_sum += mx;
  }
  double L2 = std::max(K * (1.0 + 1e-6), 2.0 * c.C_box / domain.C_P);
  c.L = std::sqrt(L2);
  c.B = std::sqrt(K) + c.L;
  double deg_exp = c.degree > 0 ? 2.0 * (c.degree - 1) : 0.0;
  c.C_taylor = 2.0 * R * c.stoich_sum * c.stoich_sum * std::pow(std::max(1.0, c.B), deg_exp);
  c.gamma = c.C_taylor > 0.0 ? std::min(2.0 - 1e-6, domain.C_P / (2.0 * c.C_taylor)) : 2.0 - 1e-6;
  c.kappa = 0.5 * std::min(1.0, c.gamma);
  c.K3 = std::min(1.0, c.kappa);
  return c;
}

FamilyConstants compute_H4_H5_single(const Vec& alpha, const Vec& beta, const Mat& M, const DomainConstants& domain) {
  const int I = static_cast<int>(alpha.size()), J = static_cast<int>(beta.size());
  if (I < 1 || J < 1 || M.rows() != I || M.cols() != J) throw Error("compute_H4_H5_single: dimension mismatch");
  if (!(M.minCoeff() > 0.0)) throw Error("compute_H4_H5_single: masses must be positive");
  FamilyConstants f;
  f.H4 = 1.0 / std::max(I, J);

  double eps2 = 1.0;
  // Some left species has a small average.
  for (int i0 = 0; i0 < I; ++i0) {
    for (int j = 0; j < J; ++j) eps2 = std::min(eps2, alpha[i0] * beta[j] * M(i0, j) / (4.0 * (beta[j] + 1.0)));
    double others = 1.0, right = 1.0;
    for (int i = 0; i < I; ++i)
      if (i != i0) others *= std::pow(alpha[i] * M(i, 0), alpha[i]);
    for (int j = 0; j < J; ++j) right *= std::pow(beta[j] * M(i0, j) / 2.0, beta[j]);
    eps2 = std::min(eps2, 0.25 * right / others);
  }
  // Mirrored: some right species has a small average.
  for (int j0 = 0; j0 < J; ++j0) {
    for (int i = 0; i < I; ++i) eps2 = std::min(eps2, beta[j0] * alpha[i] * M(i, j0) / (4.0 * (alpha[i] + 1.0)));
    double others = 1.0, left = 1.0;
    for (int j = 0; j < J; ++j)
      if (j != j0) others *= std::pow(beta[j] * M(0, j), beta[j]);
    for (int i = 0; i < I; ++i) left *= std::pow(alpha[i] * M(i, j0) / 2.0, alpha[i]);
    eps2 = std::min(eps2, 0.25 * left / others);
  }
  f.epsilon = std::sqrt(eps2);

  double h5 = std::min(domain.C_P * eps2 / alpha.maxCoeff(), domain.C_P * eps2 / beta.maxCoeff());
  for (int i = 0; i < I; ++i) {
    double p = 1.0;
    for (int j = 0; j < J; ++j) p *= std::pow(beta[j] * M(i, j) / 2.0, beta[j]);
    h5 = std::min(h5, 0.25 * p);
  }
  for (int j = 0; j < J; ++j) {
    double p = 1.0;
    for (int i = 0; i < I; ++i) p *= std::pow(alpha[i] * M(i, j) / 2.0, alpha[i]);
    h5 = std::min(h5, 0.25 * p);
  }
  f.H5 = h5;
  return f;
}

FamilyConstants compute_H4_H5_chain(double M14, double M15, double M24, double M25, const DomainConstants& domain) {
  for (double x : {M14, M15, M24, M25}) require_positive(x, "chain mass");
  double scale = std::max({M14, M15, M24, M25});
  if (std::abs(M14 + M25 - M15 - M24) > 1e-9 * scale)
    throw Error("inconsistent chain masses: M14 + M25 must equal M15 + M24");

  // The estimates are stated for one labelling; take the worst case over the
  // relabellings 1<->2, 4<->5 and (1,2)<->(4,5).
  using T = std::array<double, 4>;  // M14, M15, M24, M25
  std::set<T> orbit{{M14, M15, M24, M25}};
  std::vector<T> todo(orbit.begin(), orbit.end());
  while (!todo.empty()) {
    T t = todo.back();
    todo.pop_back();
    for (T n : {T{t[2], t[3], t[0], t[1]}, T{t[1], t[0], t[3], t[2]}, T{t[0], t[2], t[1], t[3]}})
      if (orbit.insert(n).second) todo.push_back(n);
  }

  double eps2 = std::numeric_limits<double>::infinity();
  for (const T& t : orbit) {
    double m14 = t[0], m15 = t[1], m24 = t[2], m25 = t[3];
    eps2 = std::min({eps2, m14 / 4.0, m15 / 4.0, m25 / 4.0, m15 / (32.0 * m24), m14 * m15 / (256.0 * m24),
                     m25 * m25 / 256.0});
  }
  double h5 = domain.C_P * eps2 / 2.0;
  for (const T& t : orbit) {
    double m14 = t[0], m15 = t[1], m25 = t[3];
    h5 = std::min({h5, m15 / 32.0, m14 * m15 / 512.0, m25 * m25 / 256.0});
  }
  return {1.0 / 12.0, h5, std::sqrt(eps2)};
}

double assemble_lambda(double C_LSI, double d_min, double K1, double K2, double K3, double H6) {
  for (double x : {C_LSI, d_min, K1, K2, K3, H6}) require_positive(x, "lambda part");
  return 0.5 * std::min(C_LSI * d_min, K1 * K3 * H6 / K2);
}

ConstantsReport compute_lambda(ConstantsReport p, const Vec& c_inf, const ReactionNetwork& net) {
  require_positive(p.K, "K");
  require_positive(p.fam.H4, "H4");
  require_positive(p.fam.H5, "H5");
  require_positive(p.fam.epsilon, "epsilon");
  const CoreConstants& c = p.core;
  const double K = p.K;

  // Taylor bound on [0, sqrt K]^I plus the 1/eps factor from R(C_i) <= 1/eps
  // (and |delta-correction| <= sqrt K).
  double deg_exp = c.degree > 0 ? c.degree - 1.0 : 0.0;
  p.C_eps = 2.0 * p.R * c.stoich_sum * c.stoich_sum * std::pow(std::max(1.0, K), deg_exp) * std::sqrt(K) /
            p.fam.epsilon;
  p.theta = p.C_eps > 0.0 ? std::min(1.0 - 1e-6, p.domain.C_P / p.C_eps) : 1.0 - 1e-6;

  p.min_cinf = c_inf.minCoeff();
  p.max_cinf = c_inf.maxCoeff();
  p.min_cinf_alpha = net.num_reactions() ? std::numeric_limits<double>::infinity() : 1.0;
  for (const auto& rx : net.reactions()) p.min_cinf_alpha = std::min(p.min_cinf_alpha, monomial(c_inf, rx.alpha));

  p.H6_case1 = 0.5 * p.theta * p.min_cinf_alpha * p.fam.H4 / p.max_cinf;
  p.H6_case2 = p.fam.H5 / (4.0 * p.I * K);
  p.H6 = std::min(p.H6_case1, p.H6_case2);
  p.mu_max = std::sqrt(K / p.min_cinf) - 1.0;
  if (!(p.C0 > 0.0)) p.C0 = 1.0 / (2.0 * K);
  p.C_CKP = ckp_constant(K, p.C0);
  p.lambda = assemble_lambda(p.domain.C_LSI, c.d_min, c.K1, c.K2, c.K3, p.H6);

  auto& f = p.formulas;
  f["K"] = "max{2(E0 + I), max_i sup cbar_i from masses}";
  f["K_entropy"] = "2(E0 + I)";
  f["K1"] = "2 min{d_min, min_r k_r}";
  f["K2"] = "max_i Phi(K / c_inf_i)";
  f["C_box"] = "sum_r K^max(|alpha_r|, |beta_r|)";
  f["L"] = "sqrt(max{K(1 + 1e-6), 2 C_box / C_P})";
  f["B"] = "sqrt(K) + L";
  f["C_taylor"] = "2 R (sum_i max_r(alpha_i + beta_i))^2 B^(2(deg - 1))";
  f["gamma"] = "min{2 - 1e-6, C_P / (2 C_taylor)}";
  f["kappa"] = "1/2 min{1, gamma}";
  f["K3"] = "min{1, kappa}";
  f["C_eps"] = "2 R (sum_i max_r(alpha_i + beta_i))^2 K^(deg - 1) sqrt(K) / epsilon";
  f["theta"] = "min{1 - 1e-6, C_P / C_eps}";
  f["H6_case1"] = "1/2 theta min_r c_inf^alpha_r H4 / max_i c_inf_i";
  f["H6_case2"] = "H5 / (4 I K)";
  f["H6"] = "min{H6_case1, H6_case2}";
  f["mu_max"] = "sqrt(K / min_i c_inf_i) - 1";
  f["C0"] = "1 / (2K) unless supplied";
  f["C_CKP"] = "1/2 min{C0, 1/(4K)}";
  f["lambda"] = "1/2 min{C_LSI d_min, K1 K3 H6 / K2}";
  if (p.family == "single") {
    f["H4"] = "1 / max{I, J}";
    f["H5"] =
        "min{C_P eps^2 / max alpha, C_P eps^2 / max beta, 1/4 min_i prod_j (beta_j M_ij / 2)^beta_j, "
        "1/4 min_j prod_i (alpha_i M_ij / 2)^alpha_i}";
    f["epsilon"] =
        "sqrt(min over i0, j0 of min{alpha_i0 beta_j M_i0j / (4(beta_j + 1)), 1/4 prod_j (beta_j M_i0j / 2)^beta_j / "
        "prod_{i != i0} (alpha_i M_i1)^alpha_i, mirrored terms, 1})";
  } else if (p.family == "chain") {
    f["H4"] = "1/12";
    f["H5"] = "min over relabellings of min{C_P eps^2 / 2, M15/32, M14 M15/512, M25^2/256}";
    f["epsilon"] =
        "sqrt(min over relabellings of min{M14/4, M15/4, M25/4, M15/(32 M24), M14 M15/(256 M24), M25^2/256})";
  } else {
    f["H4"] = "user-supplied";
    f["H5"] = "user-supplied";
    f["epsilon"] = "user-supplied";
  }
  return p;
}

ConstantsReport compute_constants(const ReactionNetwork& net, const ConservationBasis& basis, const Vec& c_inf,
                                  const ConstantsOptions& opts) {
  if (!net.unit_rates())
    throw Error("constants need a network in unit-rate form (kf == kb for every reaction); rescale it first");
  if (c_inf.size() != net.num_species() || !(c_inf.minCoeff() > 0.0))
    throw Error("constants need a positive equilibrium");
  ConstantsReport p;
  p.I = net.num_species();
  p.R = net.num_reactions();
  p.domain = opts.domain;

  p.E0 = 0.0;
  if (opts.E0) {
    p.E0 = *opts.E0;
  } else {
    for (int i = 0; i < p.I; ++i) p.E0 += entropy_density(c_inf[i]);
  }
  p.K_entropy = compute_K(p.E0, p.I);
  Vec bounds = species_bounds(basis, basis.Q * c_inf);
  p.K_mass = 0.0;
  for (int i = 0; i < bounds.size(); ++i)
    if (std::isfinite(bounds[i])) p.K_mass = std::max(p.K_mass, bounds[i]);
  p.K = std::max(p.K_entropy, p.K_mass);

  p.core = compute_core_constants(net, c_inf, p.K, p.domain);

  if (opts.user_family) {
    p.family = "user";
    p.fam = *opts.user_family;
  } else if (auto s = as_single_reaction(net)) {
    p.family = "single";
    const int I = static_cast<int>(s->a.size()), J = static_cast<int>(s->b.size());
    Mat M(I, J);
    for (int i = 0; i < I; ++i)
      for (int j = 0; j < J; ++j) M(i, j) = c_inf[s->a[i]] / s->alpha[i] + c_inf[s->b[j]] / s->beta[j];
    p.fam = compute_H4_H5_single(s->alpha, s->beta, M, p.domain);
  } else if (auto ch = as_enzyme_chain(net)) {
    p.family = "chain";
    auto c = [&](int k) { return c_inf[ch->c[k - 1]]; };
    p.fam = compute_H4_H5_chain(c(1) + c(3) + c(4), c(1) + c(3) + c(5), c(2) + c(3) + c(4), c(2) + c(3) + c(5),
                                p.domain);
  } else {
    throw Error("network is neither a single reversible reaction nor the enzyme chain; supply H4, H5 and epsilon");
  }
  p.C0 = opts.C0.value_or(0.0);
  if (opts.C0) require_positive(*opts.C0, "C0");
  return compute_lambda(p, c_inf, net);
}

ConstantsReport compute_constants_for_masses(const ReactionNetwork& net, const Vec& M, const ConstantsOptions& opts,
                                             Vec* c_inf_out) {
  ConservationBasis basis = conservation_basis(net);
  Vec c_inf = solve_equilibrium(net, basis, M).c_inf;
  if (c_inf_out) *c_inf_out = c_inf;
  if (net.unit_rates()) return compute_constants(net, basis, c_inf, opts);
  RescaledNetwork rs = rescale_to_unit_rates(net);
  Vec c_hat = c_inf.cwiseQuotient(rs.scale);
  return compute_constants(rs.network, conservation_basis(rs.network), c_hat, opts);
}

}  // namespace rdeed
