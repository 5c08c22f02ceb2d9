#pragma once

#include <optional>
#include <vector>

#include "rdeed/conservation.hpp"
#include "rdeed/entropy.hpp"
#include "rdeed/field.hpp"
#include "rdeed/network.hpp"

namespace rdeed {

struct StepInfo {
  int halvings = 0;  // deepest dt halving used
  int substeps = 1;
};

// One Lie-split step: explicit reaction (strong-stability-preserving RK3 per
// cell) followed by implicit Euler diffusion with zero-flux boundaries. If a
// reaction stage would leave a cell negative, or (for detailed-balanced
// networks) the cell free energy would grow, the step is redone as two half
// steps, recursively, at most 40 levels deep.
Field step(const ReactionNetwork& net, const Field& field, double dt, StepInfo* info = nullptr);

struct TrajectoryPoint {
  double time = 0.0;
  EntropyBreakdown entropy;
  DissipationBreakdown dissipation;
  Vec masses;  // Q * cbar
  double min_concentration = 0.0;
  double l1_distance_sq = 0.0;  // sum_i ||c_i - c_inf_i||_L1^2 (only with a reference)
};

struct Trajectory {
  std::vector<std::string> species;
  std::vector<double> times;
  std::vector<TrajectoryPoint> series;
  std::vector<double> snapshot_times;
  std::vector<Field> snapshots;  // at most 1024, uniform in recorded index
  Field final_state;
  ConservationBasis basis;
  Vec reference;  // entropy reference: c_inf if supplied, else all ones
  bool has_reference = false;
  int steps = 0;
  int max_halvings = 0;
  double max_entropy_increase = 0.0;  // max over steps of E(t_{n+1}) - E(t_n)
  double max_mass_drift = 0.0;        // max over steps and laws of |q.cbar(t) - q.cbar(0)|
};

struct SimulationOptions {
  double t_end = 1.0;
  double dt0 = 1e-3;
  int record_every = 1;
  std::optional<Vec> reference;  // equilibrium for relative entropy
  std::size_t max_snapshots = 1024;
};

Trajectory simulate(const ReactionNetwork& net, const Field& c0, const SimulationOptions& opts);

// Moves the species averages to a nonnegative target t with Q t = M_target
// (closest to the current averages), shifting each species by a constant;
// species where the shift would go negative are clipped at zero and rescaled.
Field project_to_masses(const Field& field, const ConservationBasis& basis, const Vec& M_target);

}  // namespace rdeed
