#include <doctest.h>

#include "rdeed/conservation.hpp"
#include "support.hpp"

using namespace rdeed;
using testing::vec;

TEST_SUITE("conservation") {
  TEST_CASE("single reaction A + B <-> C") {
    auto b = conservation_basis(parse_network("A + B <-> C ; kf=1 kb=1"));
    CHECK(b.m == 2);
    CHECK(b.nonnegative);
    CHECK(b.Q == Mat{{1, 0, 1}, {0, 1, 1}});
  }

  TEST_CASE("single reaction rows are 1/alpha and 1/beta") {
    // 2 A + B <-> 3 C: v_1 = (1/2, 0, 1/3), w_2 = (0, 1, 1/3).
    auto b = conservation_basis(parse_network("2 A + B <-> 3 C ; kf=1 kb=1"));
    REQUIRE(b.m == 2);
    CHECK(b.Q == Mat{{0.5, 0, 1.0 / 3}, {0, 1, 1.0 / 3}});
    // A <-> B + C: v_1 = A + B, v_2 = A + C.
    auto c = conservation_basis(parse_network("A <-> B + C ; kf=1 kb=1"));
    CHECK(c.Q == Mat{{1, 1, 0}, {1, 0, 1}});
  }

  TEST_CASE("enzyme chain matrix") {
    auto b = conservation_basis(testing::load("chain.rxn"));
    Mat Q(3, 5);
    Q << 1, 0, 1, 1, 0, 1, 0, 1, 0, 1, 0, 1, 1, 1, 0;
    CHECK(b.m == 3);
    CHECK(b.nonnegative);
    CHECK(b.exact);
    CHECK(b.Q == Q);
  }

  TEST_CASE("total mass for A <-> B") {
    auto b = conservation_basis(testing::load("ab.rxn"));
    CHECK(b.Q == Mat{{1, 1}});
  }

  TEST_CASE("Q W^T = 0 exactly for integer stoichiometry") {
    for (const char* text : {"2 A + B <-> C ; kf=1 kb=1\nC <-> D + E ; kf=1 kb=1\nA + E <-> 3 F ; kf=1 kb=1",
                             "A <-> B ; kf=1 kb=1\nB <-> C ; kf=1 kb=1\nC <-> A ; kf=1 kb=1",
                             "2 A <-> A + B ; kf=1 kb=1"}) {
      auto net = parse_network(text);
      auto b = conservation_basis(net);
      CHECK(b.exact);
      CHECK((b.Q * wegscheider_matrix(net).transpose()).cwiseAbs().maxCoeff() == 0.0);
      Eigen::FullPivLU<Mat> lu(b.Q);
      CHECK(lu.rank() == b.m);
    }
  }

  TEST_CASE("floating path for real coefficients") {
    auto net = parse_network("1.5 A <-> B + C ; kf=1 kb=1\nB <-> 2.5 D ; kf=1 kb=1");
    auto b = conservation_basis(net);
    CHECK_FALSE(b.exact);
    CHECK(b.m == 2);
    CHECK((b.Q * wegscheider_matrix(net).transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  }

  TEST_CASE("mass vectors") {
    auto abc = conservation_basis(parse_network("A + B <-> C ; kf=1 kb=1"));
    CHECK(mass_vector(abc, vec({1, 1, 1})) == vec({2, 2}));
    auto chain = conservation_basis(testing::load("chain.rxn"));
    CHECK(mass_vector(chain, Vec::Ones(5)) == vec({3, 3, 3}));
    auto none = conservation_basis(parse_network("A <-> 2 A ; kf=1 kb=1"));
    CHECK(none.m == 0);
    CHECK(mass_vector(none, vec({1})).size() == 0);
    CHECK_THROWS_AS(mass_vector(abc, vec({1, 1})), Error);
  }

  TEST_CASE("sampled conservation check") {
    auto net = parse_network("A + B <-> C ; kf=1 kb=1");
    auto b = conservation_basis(net);
    auto ok = check_conserved(b, net, 1000, 42);
    CHECK(ok.passed);
    CHECK(ok.max_residual < 1e-10);
    auto chain = testing::load("chain.rxn");
    CHECK(check_conserved(conservation_basis(chain), chain, 1000, 42).passed);

    auto bad = b;
    bad.Q(0, 0) += 1e-3;
    auto r = check_conserved(bad, net, 1000, 42);
    CHECK_FALSE(r.passed);
    CHECK(r.max_residual > 1e-6);
  }

  TEST_CASE("species bounds from nonnegative laws") {
    auto b = conservation_basis(parse_network("A + B <-> C ; kf=1 kb=1"));
    Vec ub = species_bounds(b, vec({2, 3}));
    CHECK(ub == vec({2, 3, 2}));
  }
}
