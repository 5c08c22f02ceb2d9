#include <doctest.h>

#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <numbers>
#include <vector>

#include "rdeed/equilibrium.hpp"
#include "rdeed/simulator.hpp"
#include "rdeed/verify.hpp"
#include "support.hpp"

using namespace rdeed;
using testing::vec;

namespace {

// Reference ODE solution for a spatially homogeneous state.
Vec ode_reference(const ReactionNetwork& net, const Vec& c0, double t_end) {
  using State = std::vector<double>;
  namespace odeint = boost::numeric::odeint;
  State x(c0.data(), c0.data() + c0.size());
  auto rhs = [&](const State& s, State& ds, double) {
    Vec c = Eigen::Map<const Vec>(s.data(), static_cast<Eigen::Index>(s.size())).cwiseMax(0.0);
    Vec r = reaction_vector(net, c);
    for (std::size_t i = 0; i < s.size(); ++i) ds[i] = -r[static_cast<Eigen::Index>(i)];
  };
  odeint::integrate_adaptive(odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(1e-13, 1e-13), rhs, x, 0.0,
                             t_end, 1e-4);
  return Eigen::Map<Vec>(x.data(), static_cast<Eigen::Index>(x.size()));
}

Field cosine_field(int cells, const Vec& base, double amp) {
  Field f(cells, static_cast<int>(base.size()));
  for (int j = 0; j < cells; ++j)
    for (int i = 0; i < base.size(); ++i) f(j, i) = base[i] * (1.0 + amp * std::cos((i + 1) * std::numbers::pi * f.x(j)));
  return f;
}

}  // namespace

TEST_SUITE("simulator") {
  TEST_CASE("equilibrium is a fixed point") {
    auto net = testing::load("chain.rxn");
    Field f = Field::constant(16, Vec::Ones(5));
    Field g = f;
    for (int n = 0; n < 100; ++n) g = step(net, g, 1e-2);
    CHECK((g.values() - f.values()).cwiseAbs().maxCoeff() < 1e-14);
  }

  TEST_CASE("homogeneous fields stay homogeneous") {
    auto net = testing::load("abc.rxn");
    Field f = Field::constant(8, vec({2, 0.5, 0.1}));
    for (int n = 0; n < 50; ++n) f = step(net, f, 1e-2);
    for (int j = 1; j < 8; ++j) CHECK((f.values().row(j) - f.values().row(0)).cwiseAbs().maxCoeff() < 1e-15);
  }

  TEST_CASE("homogeneous run matches an adaptive ODE reference") {
    for (auto [name, c0] : {std::pair{"abc.rxn", vec({2, 0.5, 0.1})}, std::pair{"chain.rxn", vec({2, 0.3, 1, 0.2, 1.5})},
                            std::pair{"dimer.rxn", vec({0.2, 3})}}) {
      auto net = testing::load(name);
      SimulationOptions o;
      o.t_end = 1.0;
      o.dt0 = 1e-3;
      auto tr = simulate(net, Field::constant(4, c0), o);
      Vec want = ode_reference(net, c0, 1.0);
      Vec got = tr.final_state.values().row(0).transpose();
      CHECK(((got - want).cwiseAbs().array() / want.cwiseAbs().array()).maxCoeff() < 1e-6);
    }
  }

  TEST_CASE("diffusion conserves the total and smooths") {
    auto net = parse_network("A <-> B ; kf=1 kb=1\ndiffusion: A=2 B=0.5");
    Field f = cosine_field(64, vec({1, 1}), 0.5);
    double before = f.values().sum();
    double spread = f.values().col(0).maxCoeff() - f.values().col(0).minCoeff();
    for (int n = 0; n < 200; ++n) f = step(net, f, 1e-3);
    CHECK(std::abs(f.values().sum() - before) / 64 < 1e-13);
    CHECK(f.values().col(0).maxCoeff() - f.values().col(0).minCoeff() < spread);

    // Without reactions each species is conserved on its own.
    ReactionNetwork still({"A", "B"}, {}, vec({2, 0.5}));
    Field g = cosine_field(64, vec({1, 3}), 0.5);
    Vec avg = g.averages();
    for (int n = 0; n < 200; ++n) g = step(still, g, 1e-3);
    CHECK((g.averages() - avg).cwiseAbs().maxCoeff() < 1e-13);
  }

  TEST_CASE("stiff reaction triggers step halving and stays nonnegative") {
    auto net = parse_network("A <-> B ; kf=1e4 kb=1e4");
    StepInfo info;
    Field f = step(net, Field::constant(4, vec({2, 0})), 1e-2, &info);
    CHECK(info.halvings > 0);
    CHECK(info.substeps > 1);
    CHECK(f.min_value() >= 0.0);
    CHECK(f(0, 0) + f(0, 1) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(std::abs(f(0, 0) - 1.0) < 1.0);
    // Positivity, not L-stability, bounds the accepted substeps, so the
    // deviation contracts over repeated steps.
    for (int n = 0; n < 30; ++n) f = step(net, f, 1e-2);
    CHECK(f(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
  }

  TEST_CASE("step rejects bad input") {
    auto net = testing::load("abc.rxn");
    CHECK_THROWS_AS(step(net, Field::constant(4, vec({1, 1, 1})), 0.0), Error);
    CHECK_THROWS_AS(step(net, Field::constant(4, vec({1, 1})), 1e-3), Error);
    CHECK_THROWS_AS(step(net, Field::constant(4, vec({1, -1, 1})), 1e-3), Error);
  }

  TEST_CASE("abc run converges to equilibrium") {
    auto net = testing::load("abc.rxn");
    auto basis = conservation_basis(net);
    Field f0 = project_to_masses(cosine_field(32, vec({1.5, 0.5, 1}), 0.5), basis, vec({2, 2}));
    SimulationOptions o;
    o.t_end = 6.0;
    o.dt0 = 1e-3;
    o.record_every = 10;
    o.reference = vec({1, 1, 1});
    auto tr = simulate(net, f0, o);
    CHECK(tr.max_entropy_increase <= 1e-12);
    CHECK(tr.max_mass_drift <= 1e-12);
    CHECK(tr.series.back().entropy.total_relative < 1e-8 * tr.series.front().entropy.total_relative);
    CHECK((tr.final_state.averages() - vec({1, 1, 1})).cwiseAbs().maxCoeff() < 1e-5);
    CHECK(tr.times.size() == 601);
  }

  TEST_CASE("chain run decays monotonically at a positive rate") {
    auto net = testing::load("chain.rxn");
    auto basis = conservation_basis(net);
    Field f0 = project_to_masses(cosine_field(32, Vec::Ones(5), 0.5), basis, vec({3, 3, 3}));
    SimulationOptions o;
    o.t_end = 3.0;
    o.reference = Vec::Ones(5);
    auto tr = simulate(net, f0, o);
    for (std::size_t k = 1; k < tr.series.size(); ++k)
      CHECK(tr.series[k].entropy.total_relative <= tr.series[k - 1].entropy.total_relative + 1e-14);
    auto fit = fit_decay_rate(tr, 0.5);
    CHECK(fit.rate > 0.0);
    CHECK(tr.series.back().min_concentration > 0.0);
  }

  TEST_CASE("snapshots are capped") {
    auto net = testing::load("ab.rxn");
    SimulationOptions o;
    o.t_end = 3.0;
    o.dt0 = 1e-3;
    auto tr = simulate(net, cosine_field(8, vec({1, 1}), 0.3), o);
    CHECK(tr.times.size() == 3001);
    CHECK(tr.snapshots.size() <= 1024);
    CHECK(tr.snapshots.size() >= 512);
    CHECK(tr.snapshot_times.front() == 0.0);
    o.max_snapshots = 10;
    CHECK(simulate(net, cosine_field(8, vec({1, 1}), 0.3), o).snapshots.size() <= 10);
  }

  TEST_CASE("project_to_masses") {
    auto net = testing::load("abc.rxn");
    auto basis = conservation_basis(net);
    Field f = cosine_field(16, vec({1, 1, 1}), 0.3);
    Vec M = basis.Q * f.averages();
    Field same = project_to_masses(f, basis, M);
    CHECK((same.values() - f.values()).cwiseAbs().maxCoeff() == 0.0);

    Field g = project_to_masses(f, basis, vec({3, 1.5}));
    CHECK((basis.Q * g.averages() - vec({3, 1.5})).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(g.min_value() >= 0.0);

    // Reaching masses (0.1, 5) forces A and C near zero; shifts would go negative.
    Field h = project_to_masses(f, basis, vec({0.1, 5}));
    CHECK((basis.Q * h.averages() - vec({0.1, 5})).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(h.min_value() >= 0.0);

    CHECK_THROWS_AS(project_to_masses(f, basis, vec({-1, 2})), Error);
    CHECK_THROWS_AS(project_to_masses(f, basis, vec({1})), Error);
  }
}
