#pragma once

#include <cstdint>

#include "rdeed/field.hpp"
#include "rdeed/network.hpp"
#include "rdeed/verification.hpp"

namespace rdeed {

// total_relative = sum_i int (c_i log(c_i/c_inf_i) - c_i + c_inf_i)
//                = inhomogeneous_part + average_part.
// Without a reference the reference is the all-ones state, which gives the
// absolute entropy sum_i int (c log c - c + 1).
struct EntropyBreakdown {
  double total_relative = 0.0;
  double inhomogeneous_part = 0.0;  // sum_i int c_i log(c_i / cbar_i)
  double average_part = 0.0;        // sum_i (cbar log(cbar/c_inf) - cbar + c_inf)
};

struct DissipationBreakdown {
  double fisher_part = 0.0;    // sum_i d_i int |grad c_i|^2 / c_i
  double reaction_part = 0.0;  // sum_r int (kf c^a - kb c^b) log(kf c^a / (kb c^b))
  double total() const { return fisher_part + reaction_part; }
};

// x log x - x + 1, accurate near x = 1.
double entropy_density(double x);
// c log(c/ref) - c + ref for ref > 0.
double relative_entropy_density(double c, double ref);

EntropyBreakdown entropy(const Field& field);
EntropyBreakdown entropy(const Field& field, const Vec& c_inf);
EntropyBreakdown entropy(const Vec& state);
EntropyBreakdown entropy(const Vec& state, const Vec& c_inf);

DissipationBreakdown dissipation(const ReactionNetwork& net, const Field& field);
DissipationBreakdown dissipation(const ReactionNetwork& net, const Vec& state);

// (z log z - z + 1) / (sqrt z - 1)^2 with Phi(0) = 1, Phi(1) = 2.
double phi(double z);

// 1/2 min{C0, 1/(4K)}.
double ckp_constant(double K, double C0);

// sum_i ||c_i - c_inf_i||_{L1}^2.
double l1_distance_sq(const Field& field, const Vec& c_inf);

// sum_i ||grad sqrt(c_i)||^2 on the grid (face differences).
double sqrt_gradient_sq(const Field& field);

// sum_r w_r ||C^alpha - C^beta||^2 with C = sqrt(c); w_r = kf when weighted, else 1.
double monomial_gap_sq(const ReactionNetwork& net, const Field& field, bool weighted);

// (a-b)(log a - log b) >= 4 (sqrt a - sqrt b)^2 and
// x log(x/y) - x + y >= (sqrt x - sqrt y)^2 on log-uniform pairs in (1e-6, 1e3).
VerificationReport elementary_bounds_check(long samples, std::uint64_t seed);

}  // namespace rdeed
