#include <doctest.h>

#include <cmath>
#include <cstring>

#include "rdeed/constants.hpp"
#include "rdeed/entropy.hpp"
#include "rdeed/equilibrium.hpp"
#include "support.hpp"

using namespace rdeed;
using testing::vec;

namespace {

const double kPi = std::acos(-1.0);

ConstantsReport report_for(const std::string& fixture, const Vec& M, const ConstantsOptions& opts = {}) {
  return compute_constants_for_masses(testing::load(fixture), M, opts);
}

}  // namespace

TEST_SUITE("constants") {
  TEST_CASE("domain constants") {
    auto u = DomainConstants::unit_interval();
    CHECK(u.C_P == doctest::Approx(kPi * kPi).epsilon(1e-15));
    CHECK(u.C_LSI == doctest::Approx(kPi * kPi / 2).epsilon(1e-15));
    CHECK(u.lsi_heuristic);
    CHECK(to_string(u.source) == "interval-default");
    auto d = DomainConstants::discrete_interval(64);
    double want = 4.0 * 64 * 64 * std::pow(std::sin(kPi / 128), 2);
    CHECK(d.C_P == doctest::Approx(want).epsilon(1e-14));
    CHECK(d.C_P < u.C_P);
    auto s = DomainConstants::user(3, 1);
    CHECK(to_string(s.source) == "user-supplied");
    CHECK_FALSE(s.lsi_heuristic);
    CHECK_THROWS_AS(DomainConstants::user(0, 1), Error);
  }

  TEST_CASE("compute_K") {
    CHECK(compute_K(0, 3) == 6);
    CHECK(compute_K(1, 5) == 12);
    // E(c0) for c0 = (e, 1, 1) is e - e + 1 = 1.
    double E0 = entropy(vec({std::exp(1.0), 1, 1})).total_relative;
    CHECK(compute_K(E0, 3) == doctest::Approx(8).epsilon(1e-15));
    CHECK_THROWS_AS(compute_K(-1, 3), Error);
  }

  TEST_CASE("core constants") {
    auto net = parse_network("A + B <-> C ; kf=1 kb=1\ndiffusion: A=0.5 B=1 C=2");
    auto dom = DomainConstants::unit_interval();
    auto c = compute_core_constants(net, Vec::Ones(3), 8, dom);
    CHECK(c.K1 == 1.0);
    CHECK(c.K2 == doctest::Approx(phi(8)).epsilon(1e-15));
    CHECK(c.K3 > 0.0);
    CHECK(c.K3 <= 1.0);
    CHECK(c.gamma < 2.0);
    CHECK(c.L * c.L >= 8.0);
    CHECK(2.0 * c.gamma * c.C_taylor <= dom.C_P * (1 + 1e-12));

    auto ab = compute_core_constants(testing::load("ab.rxn"), Vec::Ones(2), 4, dom);
    CHECK(ab.K3 > 0.0);
    CHECK(ab.K3 <= 1.0);
    // A <-> B: degree 1, stoich_sum 2, R = 1, so C_taylor = 2 * 4 = 8.
    CHECK(ab.C_taylor == 8.0);
    CHECK(ab.gamma == doctest::Approx(kPi * kPi / 16).epsilon(1e-15));
  }

  TEST_CASE("H4, H5, epsilon for the single reaction") {
    auto dom = DomainConstants::unit_interval();
    CHECK(compute_H4_H5_single(vec({1}), vec({1}), Mat{{2}}, dom).H4 == 1.0);
    CHECK(compute_H4_H5_single(vec({1, 1}), vec({1, 1}), Mat::Constant(2, 2, 2), dom).H4 == 0.5);
    // A + B <-> C with all masses 2: 1/4 min_i prod_j (1 * 2 / 2)^1 = 1/4 is the binding term.
    auto f = compute_H4_H5_single(vec({1, 1}), vec({1}), Mat::Constant(2, 1, 2), dom);
    CHECK(f.H5 == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(f.epsilon > 0.0);
    CHECK(f.epsilon <= 1.0);
    CHECK_THROWS_AS(compute_H4_H5_single(vec({1}), vec({1}), Mat{{0}}, dom), Error);
  }

  TEST_CASE("H4, H5, epsilon for the chain") {
    auto dom = DomainConstants::unit_interval();
    auto f = compute_H4_H5_chain(3, 3, 3, 3, dom);
    CHECK(f.H4 == doctest::Approx(1.0 / 12).epsilon(1e-15));
    // min{3/4, 3/4, 3/4, 3/(32*3), 9/(256*3), 9/256} = 3/256.
    CHECK(f.epsilon * f.epsilon == doctest::Approx(3.0 / 256).epsilon(1e-14));
    // min{pi^2 (3/256)/2, 3/32, 9/512, 9/256} = 9/512.
    CHECK(f.H5 == doctest::Approx(9.0 / 512).epsilon(1e-15));
    CHECK_THROWS_AS(compute_H4_H5_chain(3, 3, 3, 4, dom), Error);
  }

  TEST_CASE("chain constants are invariant under relabelling") {
    auto dom = DomainConstants::unit_interval();
    auto a = compute_H4_H5_chain(2, 3, 4, 5, dom);
    auto b = compute_H4_H5_chain(4, 5, 2, 3, dom);
    auto c = compute_H4_H5_chain(3, 2, 5, 4, dom);
    CHECK(a.H5 == b.H5);
    CHECK(a.H5 == c.H5);
    CHECK(a.epsilon == b.epsilon);
  }

  TEST_CASE("lambda assembly") {
    CHECK(assemble_lambda(1, 1, 1, 1, 1, 1) == 0.5);
    CHECK(assemble_lambda(1, 1, 0.01, 1, 1, 1) == doctest::Approx(0.005));
    CHECK_THROWS_AS(assemble_lambda(1, 1, 0, 1, 1, 1), Error);
  }

  TEST_CASE("full report is consistent with its parts") {
    for (auto [name, M] : {std::pair{"abc.rxn", vec({2, 2})}, std::pair{"chain.rxn", vec({3, 3, 3})},
                           std::pair{"ab.rxn", vec({2})}}) {
      auto r = report_for(name, M);
      CHECK(r.lambda > 0.0);
      CHECK(r.lambda == 0.5 * std::min(r.domain.C_LSI * r.core.d_min, r.core.K1 * r.core.K3 * r.H6 / r.core.K2));
      CHECK(r.H6 == std::min(r.H6_case1, r.H6_case2));
      CHECK(r.H6_case2 == doctest::Approx(r.fam.H5 / (4.0 * r.I * r.K)).epsilon(1e-15));
      CHECK(r.mu_max == doctest::Approx(std::sqrt(r.K / r.min_cinf) - 1).epsilon(1e-15));
      CHECK(r.C_CKP == ckp_constant(r.K, 1.0 / (2 * r.K)));
      CHECK(r.theta * r.C_eps <= r.domain.C_P * (1 + 1e-12));
      CHECK(r.formulas.count("lambda") == 1);
    }
    auto chain = report_for("chain.rxn", vec({3, 3, 3}));
    CHECK(chain.family == "chain");
    CHECK(chain.fam.H4 == doctest::Approx(1.0 / 12));
    CHECK(report_for("abc.rxn", vec({2, 2})).family == "single");
  }

  TEST_CASE("A <-> B end to end is reproducible") {
    auto a = report_for("ab.rxn", vec({2}));
    auto b = report_for("ab.rxn", vec({2}));
    CHECK(a.lambda > 0.0);
    CHECK(std::memcmp(&a.lambda, &b.lambda, sizeof(double)) == 0);
  }

  TEST_CASE("lambda is nondecreasing in d_min and in the rate constants") {
    const double base_d = 0.7, base_k = 0.8;
    auto lambda = [](double d, double k) {
      std::string kk = std::to_string(k), dd = std::to_string(d);
      auto net = parse_network("A + B <-> C ; kf=" + kk + " kb=" + kk + "\ndiffusion: A=" + dd + " B=1 C=1");
      return compute_constants_for_masses(net, vec({2, 2})).lambda;
    };
    double l0 = lambda(base_d, base_k);
    for (double f : {1.1, 1.5, 3.0}) {
      CHECK(lambda(base_d * f, base_k) >= l0);
      CHECK(lambda(base_d, base_k * f) >= l0);
    }
  }

  TEST_CASE("networks outside the families need user constants") {
    auto net = parse_network("A <-> B ; kf=1 kb=1\nB <-> C ; kf=1 kb=1");
    CHECK_THROWS_AS(compute_constants_for_masses(net, vec({3})), Error);
    ConstantsOptions o;
    o.user_family = FamilyConstants{0.1, 0.05, 0.2};
    auto r = compute_constants_for_masses(net, vec({3}), o);
    CHECK(r.family == "user");
    CHECK(r.lambda > 0.0);
  }

  TEST_CASE("non-unit rates are rescaled first") {
    auto r = report_for("ab_rates.rxn", vec({2}));
    CHECK(r.lambda > 0.0);
    CHECK_THROWS_AS(compute_constants(testing::load("ab_rates.rxn"), conservation_basis(testing::load("ab_rates.rxn")),
                                      vec({0.4, 1.6})),
                    Error);
  }
}
