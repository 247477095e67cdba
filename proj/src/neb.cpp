#include "chemdyn/neb.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chemdyn {

ProfileAnalysis analyze_profile(const EnergyProfile& p) {
  if (p.size() < 2) {
    throw std::invalid_argument("analyze_profile: need at least 2 energies");
  }
  int ts = 0;
  for (int i = 1; i < p.size(); ++i) {
    if (p.energies[i] > p.energies[ts]) ts = i;
  }
  return {ts, p.energies[ts] - p.energies.front(),
          p.energies.back() - p.energies.front()};
}

namespace {

[[noreturn]] void fail_nonfinite(int image) {
  throw std::runtime_error("non-finite energy or gradient at image " +
                           std::to_string(image));
}

// Energy-weighted upwind tangent (normalized; zero when degenerate).
Eigen::VectorXd upwind_tangent(const Eigen::VectorXd& prev,
                               const Eigen::VectorXd& cur,
                               const Eigen::VectorXd& next, double e_prev,
                               double e_cur, double e_next) {
  const Eigen::VectorXd tau_plus = next - cur;
  const Eigen::VectorXd tau_minus = cur - prev;
  Eigen::VectorXd tau;
  if (e_next > e_cur && e_cur > e_prev) {
    tau = tau_plus;
  } else if (e_next < e_cur && e_cur < e_prev) {
    tau = tau_minus;
  } else {
    const double d_max = std::max(std::abs(e_next - e_cur), std::abs(e_prev - e_cur));
    const double d_min = std::min(std::abs(e_next - e_cur), std::abs(e_prev - e_cur));
    if (e_next > e_prev) {
      tau = tau_plus * d_max + tau_minus * d_min;
    } else {
      tau = tau_plus * d_min + tau_minus * d_max;
    }
  }
  const double norm = tau.norm();
  if (norm < 1e-14) return Eigen::VectorXd::Zero(cur.size());
  return tau / norm;
}

}  // namespace

NebResult run_neb(const Potential& pot, const Eigen::VectorXd& start,
                  const Eigen::VectorXd& end, const NebConfig& cfg) {
  if (start.size() != end.size()) {
    throw std::invalid_argument("run_neb: endpoint dimensions differ");
  }
  if (cfg.n_images < 3) throw std::invalid_argument("run_neb: need >= 3 images");
  if (cfg.spring_k <= 0 || cfg.max_force_tol <= 0 || cfg.step_size <= 0) {
    throw std::invalid_argument("run_neb: config values must be positive");
  }

  const int m = cfg.n_images;
  const Eigen::Index dim = start.size();

  std::vector<Eigen::VectorXd> images(m);
  for (int i = 0; i < m; ++i) {
    const double s = static_cast<double>(i) / (m - 1);
    images[i] = (1.0 - s) * start + s * end;
  }
  images.front() = start;
  images.back() = end;

  std::vector<Eigen::VectorXd> velocity(m, Eigen::VectorXd::Zero(dim));
  std::vector<double> energies(m);
  std::vector<Eigen::VectorXd> gradients(m, Eigen::VectorXd::Zero(dim));

  auto evaluate = [&]() {
    for (int i = 0; i < m; ++i) {
      energies[i] = pot.energy(images[i]);
      if (!std::isfinite(energies[i])) fail_nonfinite(i);
      if (i > 0 && i < m - 1) {
        gradients[i] = pot.gradient(images[i]);
        if (!gradients[i].allFinite()) fail_nonfinite(i);
      }
    }
  };

  NebResult result;
  int steps = 0;
  bool converged = false;
  while (steps < cfg.max_steps && !converged) {
    evaluate();
    ++steps;

    int climb = -1;
    if (cfg.climbing) {
      for (int i = 1; i < m - 1; ++i) {
        if (climb < 0 || energies[i] > energies[climb]) climb = i;
      }
    }

    double max_force = 0.0;
    for (int i = 1; i < m - 1; ++i) {
      const Eigen::VectorXd tau = upwind_tangent(
          images[i - 1], images[i], images[i + 1], energies[i - 1],
          energies[i], energies[i + 1]);
      Eigen::VectorXd force;
      if (i == climb) {
        // Climbing image: full true force with the parallel part inverted.
        force = -gradients[i] + 2.0 * gradients[i].dot(tau) * tau;
        max_force = std::max(max_force, force.norm());
      } else {
        const Eigen::VectorXd f_perp =
            -gradients[i] + gradients[i].dot(tau) * tau;
        const double spring_mag =
            cfg.spring_k * ((images[i + 1] - images[i]).norm() -
                            (images[i] - images[i - 1]).norm());
        force = f_perp + spring_mag * tau;
        max_force = std::max(max_force, f_perp.norm());
      }

      Eigen::VectorXd& v = velocity[i];
      v += cfg.step_size * force;
      const double along = v.dot(force);
      if (along <= 0.0) {
        v.setZero();
      } else if (force.squaredNorm() > 0.0) {
        // Project the velocity onto the force direction (quick-min).
        v = along / force.squaredNorm() * force;
      }
      images[i] += cfg.step_size * v;
    }
    converged = max_force < cfg.max_force_tol;
  }

  // Final profile over the relaxed path.
  result.profile.energies.resize(m);
  for (int i = 0; i < m; ++i) {
    result.profile.energies[i] = pot.energy(images[i]);
    if (!std::isfinite(result.profile.energies[i])) fail_nonfinite(i);
  }
  result.images = std::move(images);
  result.images.front() = start;
  result.images.back() = end;
  result.converged = converged;
  result.steps_taken = steps;
  return result;
}

}  // namespace chemdyn
