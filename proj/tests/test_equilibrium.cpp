#include <doctest.h>

#include <cmath>
#include <random>

#include "rdeed/equilibrium.hpp"
#include "support.hpp"

using namespace rdeed;
using testing::vec;

namespace {

Equilibrium solve(const ReactionNetwork& net, const Vec& M) {
  return solve_equilibrium(net, conservation_basis(net), M);
}

}  // namespace

TEST_SUITE("equilibrium") {
  TEST_CASE("detailed balance check") {
    auto single = parse_network("2 A + B <-> 3 C ; kf=5 kb=0.3");
    CHECK(check_detailed_balance(single).balanced);

    // Triangle with kf/kb = 2 on every edge: the right-hand side log 2 (1,1,1)
    // is orthogonal to range(W) = {sum zero}, so the least-squares residual
    // is the right-hand side itself.
    auto tri = testing::load("triangle.rxn");
    auto db = check_detailed_balance(tri);
    CHECK_FALSE(db.balanced);
    CHECK(db.residual == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    auto chain = check_detailed_balance(testing::load("chain.rxn"));
    CHECK(chain.balanced);
    CHECK(chain.log_witness.cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("rescaling to unit rates") {
    auto id = rescale_to_unit_rates(testing::load("chain.rxn"));
    CHECK(id.scale == Vec::Ones(5));
    CHECK(id.network.unit_rates());

    // A <-> B, kf=4, kb=1: minimum-norm witness x = (-log 2, log 2), so
    // k = kf e^{-log 2} = 2 and exp(x) = (1/2, 2) is proportional to (1, 4).
    auto rs = rescale_to_unit_rates(testing::load("ab_rates.rxn"));
    CHECK(rs.network.reaction(0).kf == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(rs.network.reaction(0).kb == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(rs.scale[1] / rs.scale[0] == doctest::Approx(4.0).epsilon(1e-14));

    CHECK_THROWS_AS(rescale_to_unit_rates(testing::load("triangle.rxn")), Error);
  }

  TEST_CASE("single-reaction bisection") {
    auto ab = solve_equilibrium_single(testing::load("ab.rxn"), vec({2}));
    CHECK((ab.c_inf - vec({1, 1})).cwiseAbs().maxCoeff() < 1e-12);

    auto abc = solve_equilibrium_single(testing::load("abc.rxn"), vec({2, 2}));
    CHECK((abc.c_inf - vec({1, 1, 1})).cwiseAbs().maxCoeff() < 1e-12);

    // 2A <-> B with a/2 + b = 3/2 and a^2 = b: a^2 + a/2 - 3/2 = 0 => a = 1.
    auto dimer = solve_equilibrium_single(testing::load("dimer.rxn"), vec({1.5}));
    CHECK((dimer.c_inf - vec({1, 1})).cwiseAbs().maxCoeff() < 1e-12);

    CHECK_THROWS_AS(solve_equilibrium_single(testing::load("abc.rxn"), vec({2, 0})), Error);
    CHECK_THROWS_AS(solve_equilibrium_single(testing::load("chain.rxn"), vec({3, 3, 3})), Error);
  }

  TEST_CASE("single-reaction bisection honours rate constants") {
    auto net = parse_network("A + B <-> C ; kf=3 kb=2");
    auto eq = solve(net, vec({2, 1.5}));
    const Vec& c = eq.c_inf;
    CHECK(3 * c[0] * c[1] == doctest::Approx(2 * c[2]).epsilon(1e-12));
    CHECK(c[0] + c[2] == doctest::Approx(2).epsilon(1e-12));
    CHECK(c[1] + c[2] == doctest::Approx(1.5).epsilon(1e-12));
  }

  TEST_CASE("general Newton solver") {
    auto chain = testing::load("chain.rxn");
    auto basis = conservation_basis(chain);
    auto three = solve_equilibrium_general(chain, basis, vec({3, 3, 3}));
    CHECK((three.c_inf - Vec::Ones(5)).cwiseAbs().maxCoeff() < 1e-10);

    // c1 = c2 = c4 = c5 = s, c3 = s^2 with 2s + s^2 = 4.
    double s = std::sqrt(5.0) - 1.0;
    auto four = solve_equilibrium_general(chain, basis, vec({4, 4, 4}));
    CHECK((four.c_inf - vec({s, s, s * s, s, s})).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(four.residual_mass < 1e-10);
    CHECK(four.residual_reactions < 1e-10);

    auto abc = testing::load("abc.rxn");
    auto g = solve_equilibrium_general(abc, conservation_basis(abc), vec({2, 2}));
    CHECK((g.c_inf - vec({1, 1, 1})).cwiseAbs().maxCoeff() < 1e-10);

    CHECK_THROWS_AS(solve_equilibrium_general(chain, basis, vec({3, -1, 3})), Error);
    auto tri = testing::load("triangle.rxn");
    CHECK_THROWS_AS(solve_equilibrium_general(tri, conservation_basis(tri), vec({3})), Error);
  }

  TEST_CASE("general solver handles non-unit rates") {
    auto net = testing::load("ab_rates.rxn");
    auto eq = solve_equilibrium_general(net, conservation_basis(net), vec({5}));
    CHECK(eq.c_inf[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(eq.c_inf[1] == doctest::Approx(4.0).epsilon(1e-12));
  }

  TEST_CASE("uniqueness probe: 32 random starts coincide") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-3.0, 3.0);
    for (const char* name : {"chain.rxn", "abc.rxn"}) {
      auto net = testing::load(name);
      auto basis = conservation_basis(net);
      Vec M = basis.Q * Vec::Constant(net.num_species(), 1.7);
      Vec first;
      for (int s = 0; s < 32; ++s) {
        Vec x0(net.num_species());
        for (int i = 0; i < x0.size(); ++i) x0[i] = std::exp(U(rng));
        Vec c = solve_equilibrium_general(net, basis, M, x0).c_inf;
        if (s == 0) first = c;
        CHECK((c - first).cwiseAbs().maxCoeff() < 1e-9);
      }
    }
  }

  TEST_CASE("single and general solvers agree on 100 random instances") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> size(1, 4);
    std::uniform_real_distribution<double> coeff(1.0, 3.0), logc(std::log(0.05), std::log(5.0));
    double worst = 0.0;
    for (int s = 0; s < 100; ++s) {
      int I = size(rng), J = size(rng);
      std::vector<std::string> names;
      for (int k = 0; k < I + J; ++k) names.push_back("S" + std::to_string(k));
      Reaction rx;
      rx.alpha = Vec::Zero(I + J);
      rx.beta = Vec::Zero(I + J);
      for (int i = 0; i < I; ++i) rx.alpha[i] = coeff(rng);
      for (int j = 0; j < J; ++j) rx.beta[I + j] = coeff(rng);
      ReactionNetwork net(names, {rx}, Vec::Ones(I + J));
      auto basis = conservation_basis(net);
      Vec c0(I + J);
      for (int k = 0; k < I + J; ++k) c0[k] = std::exp(logc(rng));
      Vec M = basis.Q * c0;
      Vec a = solve_equilibrium_single(net, M).c_inf;
      Vec b = solve_equilibrium_general(net, basis, M).c_inf;
      worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-9);
  }

  TEST_CASE("reaction residual") {
    auto net = testing::load("abc.rxn");
    CHECK(reaction_residual(net, vec({1, 1, 1})) == 0.0);
    CHECK(reaction_residual(net, vec({2, 1, 1})) == doctest::Approx(1.0));
  }

  TEST_CASE("boundary equilibria") {
    auto b = testing::load("boundary.rxn");
    auto rep = boundary_equilibria(b, conservation_basis(b), vec({1}));
    REQUIRE(rep.found.size() == 1);
    CHECK(rep.heuristic);
    CHECK(rep.found[0].zero_pattern == std::vector<int>{0});
    CHECK((rep.found[0].state - vec({0, 1})).cwiseAbs().maxCoeff() < 1e-9);

    auto abc = testing::load("abc.rxn");
    CHECK(boundary_equilibria(abc, conservation_basis(abc), vec({2, 2})).found.empty());
    auto chain = testing::load("chain.rxn");
    CHECK(boundary_equilibria(chain, conservation_basis(chain), vec({3, 3, 3})).found.empty());

    std::vector<std::string> names;
    for (int k = 0; k < 13; ++k) names.push_back("S" + std::to_string(k));
    Reaction rx{Vec::Zero(13), Vec::Zero(13), 1, 1};
    rx.alpha[0] = 1;
    rx.beta[1] = 1;
    ReactionNetwork big(names, {rx}, Vec::Ones(13));
    auto bb = conservation_basis(big);
    CHECK_THROWS_AS(boundary_equilibria(big, bb, bb.Q * Vec::Ones(13)), Error);
  }
}
