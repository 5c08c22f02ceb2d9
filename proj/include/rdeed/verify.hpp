#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rdeed/conservation.hpp"
#include "rdeed/constants.hpp"
#include "rdeed/network.hpp"
#include "rdeed/simulator.hpp"
#include "rdeed/verification.hpp"

namespace rdeed {

// Samples random positive fields on N cells, projects them to the masses M and
// checks D(c) >= lambda (E(c) - E(c_inf)). The equilibrium is computed from M.
VerificationReport verify_eed(const ReactionNetwork& net, const ConservationBasis& basis, const Vec& M,
                              double lambda, long samples, int cells, std::uint64_t seed);

struct DecayFit {
  double rate = 0.0;       // minus the least-squares slope of log E
  bool converged = false;  // no point above 1e-14 left to fit; rate is +inf
  int points_used = 0;
};

// Fits the trailing `window` fraction of the points with E > 1e-14.
DecayFit fit_decay_rate(const std::vector<double>& times, const std::vector<double>& values, double window);
// Uses the relative entropy series; needs a trajectory simulated with a reference equilibrium.
DecayFit fit_decay_rate(const Trajectory& traj, double window);

// E(c) - E(c_inf) >= C_CKP sum_i ||c_i - c_inf_i||_1^2 at every recorded time.
VerificationReport verify_ckp(const Trajectory& traj, double C_CKP);

struct LemmaParams {
  int I = 1, J = 1;                     // H4_single sizes
  std::optional<Vec> alpha, beta;       // H4_single exponents; random in [1,3] when absent
  std::optional<Vec> c_inf;             // equilibrium used by the samplers; all ones by default
  std::optional<double> mu_max;         // default sqrt(K / min c_inf) - 1
  double K = 0.0;                       // 0: 2 I_total for the sampler bound; required > 0 for average_K3
  const ReactionNetwork* network = nullptr;  // average_K3
  int cells = 8;                        // average_K3 grid
  double scale = 1.0;                   // multiplies the constant under test (falsification controls)
};

// name: H4_single | H4_chain | average_K3 | elementary.
VerificationReport verify_lemma(const std::string& name, const LemmaParams& params, long samples,
                                std::uint64_t seed);

}  // namespace rdeed
