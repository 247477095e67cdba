#pragma once

#include "chemdyn/core.hpp"
#include "chemdyn/potentials.hpp"

#include <Eigen/Dense>

#include <vector>

namespace chemdyn {

struct NebConfig {
  int n_images = 11;          // total images including the fixed endpoints
  double spring_k = 1.0;
  bool climbing = true;
  double max_force_tol = 1e-3;  // max per-image perpendicular force norm
  int max_steps = 10000;
  double step_size = 1e-3;      // damped-velocity time step
};

struct NebResult {
  std::vector<Eigen::VectorXd> images;  // endpoints bitwise equal to inputs
  EnergyProfile profile;                // one energy per image
  bool converged = false;
  int steps_taken = 0;
};

struct ProfileAnalysis {
  int ts_index = 0;       // first index attaining the maximum
  double barrier_ev = 0.0;
  double enthalpy_ev = 0.0;
};

/// ts = first argmax; barrier = p[ts] - p[0]; enthalpy = p[last] - p[0].
ProfileAnalysis analyze_profile(const EnergyProfile& p);

/// Nudged elastic band with the energy-weighted upwind tangent, perpendicular
/// true force, tangential spring force, and an optional climbing image (the
/// highest-energy interior image gets the full true force with its parallel
/// component inverted and no springs). Positions are relaxed by damped
/// velocity descent: the velocity is zeroed whenever it opposes the force.
/// Throws std::runtime_error naming the image when a non-finite energy or
/// gradient appears.
NebResult run_neb(const Potential& pot, const Eigen::VectorXd& start,
                  const Eigen::VectorXd& end, const NebConfig& cfg = {});

}  // namespace chemdyn
