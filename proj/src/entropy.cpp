#include "rdeed/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace rdeed {

namespace {

constexpr double kFloor = 1e-300;

// sum_{n>=2} (-1)^n w^(n-2) / (n(n-1)), so that h(1+w) = w^2 S(w).
double entropy_series(double w) {
  double s = 0.0, p = 1.0;
  for (int n = 2; n <= 18; ++n) {
    double term = p / (n * (n - 1.0));
    s += (n % 2 == 0) ? term : -term;
    p *= w;
  }
  return s;
}

constexpr double kSeriesRadius = 0.05;

double safe_log(double x) { return std::log(std::max(x, kFloor)); }

// log(a/b) with the sign of a - b preserved.
double log_ratio(double a, double b) {
  a = std::max(a, kFloor);
  b = std::max(b, kFloor);
  return std::log1p((a - b) / b);
}

void check_nonnegative(const Mat& v) {
  if (v.size() && !(v.minCoeff() >= 0.0)) throw Error("entropy functional requires nonnegative concentrations");
}

// sum_r (kf c^a - kb c^b)(log kf c^a - log kb c^b) at one state.
double reaction_density(const ReactionNetwork& net, const Vec& c) {
  double total = 0.0;
  for (const Reaction& rx : net.reactions()) {
    double x = rx.kf * monomial(c, rx.alpha), y = rx.kb * monomial(c, rx.beta);
    double lr;
    if (x > kFloor && y > kFloor) {
      lr = std::log1p((x - y) / y);
    } else {
      double lx = std::log(rx.kf), ly = std::log(rx.kb);
      for (int i = 0; i < c.size(); ++i) {
        if (rx.alpha[i] != 0.0) lx += rx.alpha[i] * safe_log(c[i]);
        if (rx.beta[i] != 0.0) ly += rx.beta[i] * safe_log(c[i]);
      }
      lr = lx - ly;
    }
    total += std::max(0.0, (x - y) * lr);
  }
  return total;
}

}  // namespace

double entropy_density(double x) {
  if (x < 0.0) throw Error("entropy density of a negative concentration");
  if (x == 0.0) return 1.0;
  double w = x - 1.0;
  if (std::abs(w) < kSeriesRadius) return w * w * entropy_series(w);
  return x * std::log(x) - x + 1.0;
}

double relative_entropy_density(double c, double ref) {
  if (!(ref > 0.0)) throw Error("relative entropy needs a positive reference");
  return ref * entropy_density(c / ref);
}

EntropyBreakdown entropy(const Field& field, const Vec& c_inf) {
  const Mat& v = field.values();
  check_nonnegative(v);
  if (c_inf.size() != field.species()) throw Error("entropy: reference has wrong dimension");
  const double h = field.h();
  EntropyBreakdown e;
  Vec cbar = field.averages();
  for (int i = 0; i < field.species(); ++i) {
    double tot = 0.0, inh = 0.0;
    for (int j = 0; j < field.cells(); ++j) {
      tot += relative_entropy_density(v(j, i), c_inf[i]);
      if (cbar[i] > 0.0) inh += relative_entropy_density(v(j, i), cbar[i]);
    }
    e.total_relative += h * tot;
    e.inhomogeneous_part += h * inh;
    e.average_part += relative_entropy_density(cbar[i], c_inf[i]);
  }
  return e;
}

EntropyBreakdown entropy(const Field& field) { return entropy(field, Vec::Ones(field.species())); }

EntropyBreakdown entropy(const Vec& state, const Vec& c_inf) { return entropy(Field::constant(1, state), c_inf); }

EntropyBreakdown entropy(const Vec& state) { return entropy(Field::constant(1, state)); }

DissipationBreakdown dissipation(const ReactionNetwork& net, const Field& field) {
  const Mat& v = field.values();
  check_nonnegative(v);
  if (field.species() != net.num_species()) throw Error("dissipation: field has wrong number of species");
  const double h = field.h();
  DissipationBreakdown d;
  for (int i = 0; i < field.species(); ++i) {
    double s = 0.0;
    for (int j = 0; j + 1 < field.cells(); ++j) {
      double a = v(j + 1, i), b = v(j, i);
      if (a == b) continue;
      if (a == 0.0 || b == 0.0) {
        // Log-mean face value vanishes; use the arithmetic mean instead.
        s += (a - b) * (a - b) / std::max(0.5 * (a + b), kFloor);
        continue;
      }
      s += (a - b) * log_ratio(a, b);
    }
    d.fisher_part += net.diffusion()[i] * s / h;
  }
  for (int j = 0; j < field.cells(); ++j) d.reaction_part += h * reaction_density(net, v.row(j).transpose());
  return d;
}

DissipationBreakdown dissipation(const ReactionNetwork& net, const Vec& state) {
  return dissipation(net, Field::constant(1, state));
}

double phi(double z) {
  if (z < 0.0 || std::isnan(z)) throw Error("phi: argument must be nonnegative");
  if (z == 0.0) return 1.0;
  double w = z - 1.0;
  double s = std::sqrt(z);
  if (std::abs(w) < kSeriesRadius) return (s + 1.0) * (s + 1.0) * entropy_series(w);
  double den = s - 1.0;
  return (z * std::log(z) - z + 1.0) / (den * den);
}

double ckp_constant(double K, double C0) {
  if (!(K > 0.0) || !(C0 > 0.0)) throw Error("ckp_constant: K and C0 must be positive");
  return 0.5 * std::min(C0, 1.0 / (4.0 * K));
}

double l1_distance_sq(const Field& field, const Vec& c_inf) {
  double total = 0.0;
  for (int i = 0; i < field.species(); ++i) {
    double l1 = (field.values().col(i).array() - c_inf[i]).abs().sum() * field.h();
    total += l1 * l1;
  }
  return total;
}

double sqrt_gradient_sq(const Field& field) {
  double s = 0.0;
  const Mat& v = field.values();
  for (int i = 0; i < field.species(); ++i)
    for (int j = 0; j + 1 < field.cells(); ++j) {
      double d = std::sqrt(v(j + 1, i)) - std::sqrt(v(j, i));
      s += d * d;
    }
  return s / field.h();
}

double monomial_gap_sq(const ReactionNetwork& net, const Field& field, bool weighted) {
  double total = 0.0;
  for (const Reaction& rx : net.reactions()) {
    Vec ha = rx.alpha / 2.0, hb = rx.beta / 2.0;
    double s = 0.0;
    for (int j = 0; j < field.cells(); ++j) {
      Vec c = field.values().row(j).transpose();
      double g = monomial(c, ha) - monomial(c, hb);
      s += g * g;
    }
    total += (weighted ? rx.kf : 1.0) * s * field.h();
  }
  return total;
}

VerificationReport elementary_bounds_check(long samples, std::uint64_t seed) {
  if (samples < 1) throw Error("elementary_bounds_check: samples must be >= 1");
  VerificationReport rep;
  rep.name = "elementary";
  rep.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-6.0, 3.0);
  SlackAccumulator first, second;
  for (long s = 0; s < samples; ++s) {
    double a = std::pow(10.0, U(rng)), b = std::pow(10.0, U(rng));
    double sq = std::sqrt(a) - std::sqrt(b);
    first.add((a - b) * log_ratio(a, b), 4.0 * sq * sq);
    second.add(relative_entropy_density(a, b), sq * sq);
  }
  VerificationReport r1, r2;
  first.finish(r1);
  second.finish(r2);
  rep.samples = samples;
  rep.violations = r1.violations + r2.violations;
  rep.min_slack = std::min(r1.min_slack, r2.min_slack);
  rep.min_relative_slack = std::min(r1.min_relative_slack, r2.min_relative_slack);
  rep.median_relative_slack = std::min(r1.median_relative_slack, r2.median_relative_slack);
  rep.parameters["log_mean_violations"] = static_cast<double>(r1.violations);
  rep.parameters["relative_entropy_violations"] = static_cast<double>(r2.violations);
  return rep;
}

}  // namespace rdeed
