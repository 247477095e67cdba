#include "chemdyn/potentials.hpp"

#include <cmath>
#include <stdexcept>

namespace chemdyn {

namespace {

// Standard Muller-Brown constants.
constexpr double kA[4] = {-200.0, -100.0, -170.0, 15.0};
constexpr double ka[4] = {-1.0, -1.0, -6.5, 0.7};
constexpr double kb[4] = {0.0, 0.0, 11.0, 0.6};
constexpr double kc[4] = {-10.0, -10.0, -6.5, 0.7};
constexpr double kx0[4] = {1.0, 0.0, -0.5, -1.0};
constexpr double ky0[4] = {0.0, 0.5, 1.5, 1.0};

void check_dim(const Eigen::VectorXd& x, int expected, const char* name) {
  if (x.size() != expected) {
    throw std::invalid_argument(std::string(name) + ": expected dimension " +
                                std::to_string(expected) + ", got " +
                                std::to_string(x.size()));
  }
}

}  // namespace

double MullerBrown::energy(const Eigen::VectorXd& x) const {
  check_dim(x, 2, "muller_brown");
  double e = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double dx = x[0] - kx0[k];
    const double dy = x[1] - ky0[k];
    e += kA[k] * std::exp(ka[k] * dx * dx + kb[k] * dx * dy + kc[k] * dy * dy);
  }
  return e;
}

Eigen::VectorXd MullerBrown::gradient(const Eigen::VectorXd& x) const {
  check_dim(x, 2, "muller_brown");
  Eigen::VectorXd g = Eigen::VectorXd::Zero(2);
  for (int k = 0; k < 4; ++k) {
    const double dx = x[0] - kx0[k];
    const double dy = x[1] - ky0[k];
    const double e =
        kA[k] * std::exp(ka[k] * dx * dx + kb[k] * dx * dy + kc[k] * dy * dy);
    g[0] += e * (2.0 * ka[k] * dx + kb[k] * dy);
    g[1] += e * (kb[k] * dx + 2.0 * kc[k] * dy);
  }
  return g;
}

LjPair::LjPair(double epsilon, double sigma, int particles, int dims)
    : epsilon_(epsilon), sigma_(sigma), particles_(particles), dims_(dims) {
  if (particles < 2) throw std::invalid_argument("lj_pair needs >= 2 particles");
  if (dims < 1) throw std::invalid_argument("lj_pair needs >= 1 dimension");
}

double LjPair::energy(const Eigen::VectorXd& x) const {
  check_dim(x, dimension(), "lj_pair");
  double e = 0.0;
  for (int i = 0; i < particles_; ++i) {
    for (int j = i + 1; j < particles_; ++j) {
      const double r2 = (x.segment(i * dims_, dims_) -
                         x.segment(j * dims_, dims_)).squaredNorm();
      const double s2 = sigma_ * sigma_ / r2;
      const double s6 = s2 * s2 * s2;
      e += 4.0 * epsilon_ * (s6 * s6 - s6);
    }
  }
  return e;
}

Eigen::VectorXd LjPair::gradient(const Eigen::VectorXd& x) const {
  check_dim(x, dimension(), "lj_pair");
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dimension());
  for (int i = 0; i < particles_; ++i) {
    for (int j = i + 1; j < particles_; ++j) {
      const Eigen::VectorXd rij =
          x.segment(i * dims_, dims_) - x.segment(j * dims_, dims_);
      const double r2 = rij.squaredNorm();
      const double s2 = sigma_ * sigma_ / r2;
      const double s6 = s2 * s2 * s2;
      // dE/dr2 = 4 eps (-12 s12 + 6 s6) / (2 r2)
      const double de_dr2 = 4.0 * epsilon_ * (6.0 * s6 - 12.0 * s6 * s6) / (2.0 * r2);
      const Eigen::VectorXd contrib = 2.0 * de_dr2 * rij;
      g.segment(i * dims_, dims_) += contrib;
      g.segment(j * dims_, dims_) -= contrib;
    }
  }
  return g;
}

MorseBond::MorseBond(double depth, double width, double r0)
    : depth_(depth), width_(width), r0_(r0) {}

double MorseBond::energy(const Eigen::VectorXd& x) const {
  check_dim(x, 6, "morse_bond");
  const double r = (x.head(3) - x.tail(3)).norm();
  const double u = 1.0 - std::exp(-width_ * (r - r0_));
  return depth_ * u * u;
}

Eigen::VectorXd MorseBond::gradient(const Eigen::VectorXd& x) const {
  check_dim(x, 6, "morse_bond");
  const Eigen::Vector3d rij = x.head(3) - x.tail(3);
  const double r = rij.norm();
  const double ex = std::exp(-width_ * (r - r0_));
  const double de_dr = 2.0 * depth_ * (1.0 - ex) * width_ * ex;
  Eigen::VectorXd g(6);
  const Eigen::Vector3d dir = r > 0.0 ? (rij / r).eval() : Eigen::Vector3d::Zero();
  g.head(3) = de_dr * dir;
  g.tail(3) = -de_dr * dir;
  return g;
}

HarmonicWell::HarmonicWell(Eigen::VectorXd center, double k)
    : center_(std::move(center)), k_(k) {}

double HarmonicWell::energy(const Eigen::VectorXd& x) const {
  check_dim(x, dimension(), "harmonic_well");
  return 0.5 * k_ * (x - center_).squaredNorm();
}

Eigen::VectorXd HarmonicWell::gradient(const Eigen::VectorXd& x) const {
  check_dim(x, dimension(), "harmonic_well");
  return k_ * (x - center_);
}

std::vector<std::string> builtin_potential_names() {
  return {"muller_brown", "lj_pair", "morse_bond", "harmonic_well"};
}

std::unique_ptr<Potential> make_potential(const std::string& name) {
  if (name == "muller_brown") return std::make_unique<MullerBrown>();
  if (name == "lj_pair") return std::make_unique<LjPair>();
  if (name == "morse_bond") return std::make_unique<MorseBond>();
  if (name == "harmonic_well") {
    return std::make_unique<HarmonicWell>(Eigen::VectorXd::Zero(2), 1.0);
  }
  return nullptr;
}

}  // namespace chemdyn
