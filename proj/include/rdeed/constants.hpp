#pragma once

#include <map>
#include <optional>
#include <string>

#include "rdeed/conservation.hpp"
#include "rdeed/network.hpp"

namespace rdeed {

struct DomainConstants {
  enum class Source { IntervalDefault, DiscreteInterval, UserSupplied };
  double C_P = 0.0;
  double C_LSI = 0.0;
  Source source = Source::IntervalDefault;
  bool lsi_heuristic = true;  // C_LSI = C_P / 2 was not supplied by the user

  // Unit interval: C_P = pi^2, C_LSI = C_P / 2.
  static DomainConstants unit_interval();
  // Smallest nonzero eigenvalue 4 N^2 sin^2(pi / 2N) of the cell-centred
  // Neumann Laplacian on N cells; C_LSI = C_P / 2.
  static DomainConstants discrete_interval(int cells);
  static DomainConstants user(double C_P, double C_LSI);
};

std::string to_string(DomainConstants::Source s);

// 2 (E0 + I).
double compute_K(double E0, int I);

struct CoreConstants {
  double d_min = 0, k_min = 0;
  double K1 = 0, K2 = 0, K3 = 0;
  double kappa = 0, gamma = 0, L = 0, B = 0, C_box = 0, C_taylor = 0;
  int degree = 0;
  double stoich_sum = 0;  // sum_i max_r (alpha_i^r + beta_i^r)
};

// Requires a unit-rate network (kf == kb) and c_inf > 0.
CoreConstants compute_core_constants(const ReactionNetwork& net, const Vec& c_inf, double K,
                                     const DomainConstants& domain);

struct FamilyConstants {
  double H4 = 0, H5 = 0, epsilon = 0;
};

// alpha (size I), beta (size J), masses M(i,j) = a_i/alpha_i + b_j/beta_j.
FamilyConstants compute_H4_H5_single(const Vec& alpha, const Vec& beta, const Mat& M, const DomainConstants& domain);

// Chain masses M14 = c1+c3+c4, M15 = c1+c3+c5, M24 = c2+c3+c4, M25 = c2+c3+c5.
FamilyConstants compute_H4_H5_chain(double M14, double M15, double M24, double M25, const DomainConstants& domain);

// 1/2 min{C_LSI d_min, K1 K3 H6 / K2}.
double assemble_lambda(double C_LSI, double d_min, double K1, double K2, double K3, double H6);

struct ConstantsReport {
  std::string family;  // single | chain | user
  int I = 0, R = 0;
  double E0 = 0, K_entropy = 0, K_mass = 0, K = 0;
  CoreConstants core;
  FamilyConstants fam;
  double C_eps = 0, theta = 0;
  double min_cinf_alpha = 0, max_cinf = 0, min_cinf = 0;
  double H6_case1 = 0, H6_case2 = 0, H6 = 0;
  double mu_max = 0, C0 = 0, C_CKP = 0;
  DomainConstants domain;
  double lambda = 0;
  std::map<std::string, std::string> formulas;
};

// Fills theta, both H6 cases, H6, mu_max, C_CKP and lambda from the other fields.
ConstantsReport compute_lambda(ConstantsReport parts, const Vec& c_inf, const ReactionNetwork& net);

struct ConstantsOptions {
  DomainConstants domain = DomainConstants::unit_interval();
  std::optional<double> E0;  // default: entropy of c_inf
  std::optional<double> C0;  // default: 1/(2K)
  std::optional<FamilyConstants> user_family;  // required for networks outside both families
};

ConstantsReport compute_constants(const ReactionNetwork& net, const ConservationBasis& basis, const Vec& c_inf,
                                  const ConstantsOptions& opts = {});

// Equilibrium for masses M, rescaling to unit rates when kf != kb, then
// compute_constants in the rescaled variables. c_inf_out receives the
// equilibrium in the original variables.
ConstantsReport compute_constants_for_masses(const ReactionNetwork& net, const Vec& M,
                                             const ConstantsOptions& opts = {}, Vec* c_inf_out = nullptr);

}  // namespace rdeed
