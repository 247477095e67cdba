#pragma once

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <vector>

namespace chemdyn {

/// Analytic energy surface over flattened coordinates. Gradients must match
/// central finite differences of the energy (contract-tested).
class Potential {
 public:
  virtual ~Potential() = default;
  virtual std::string name() const = 0;
  virtual int dimension() const = 0;
  virtual double energy(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd gradient(const Eigen::VectorXd& x) const = 0;
};

/// Four-Gaussian 2D surface with three minima and two saddles; the standard
/// parameters are recorded in docs/FORMATS.md.
class MullerBrown final : public Potential {
 public:
  std::string name() const override { return "muller_brown"; }
  int dimension() const override { return 2; }
  double energy(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override;

  // Refined stationary points (deep minimum, second minimum, third minimum).
  static Eigen::Vector2d minimum_a() { return {-0.558224, 1.441726}; }
  static Eigen::Vector2d minimum_b() { return {0.623499, 0.028038}; }
  static Eigen::Vector2d minimum_c() { return {-0.050011, 0.466694}; }
};

/// Pairwise 12-6 Lennard-Jones over n particles in d dimensions.
class LjPair final : public Potential {
 public:
  LjPair(double epsilon = 1.0, double sigma = 1.0, int particles = 2,
         int dims = 3);
  std::string name() const override { return "lj_pair"; }
  int dimension() const override { return particles_ * dims_; }
  double energy(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override;

 private:
  double epsilon_;
  double sigma_;
  int particles_;
  int dims_;
};

/// Two-body Morse bond between two 3D particles.
class MorseBond final : public Potential {
 public:
  MorseBond(double depth = 1.0, double width = 1.0, double r0 = 1.0);
  std::string name() const override { return "morse_bond"; }
  int dimension() const override { return 6; }
  double energy(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override;

 private:
  double depth_;
  double width_;
  double r0_;
};

/// Isotropic quadratic well around a configurable center.
class HarmonicWell final : public Potential {
 public:
  explicit HarmonicWell(Eigen::VectorXd center, double k = 1.0);
  std::string name() const override { return "harmonic_well"; }
  int dimension() const override { return static_cast<int>(center_.size()); }
  double energy(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override;
  const Eigen::VectorXd& center() const { return center_; }

 private:
  Eigen::VectorXd center_;
  double k_;
};

std::vector<std::string> builtin_potential_names();

/// Factory over the builtin set with default parameters; returns nullptr for
/// unknown names.
std::unique_ptr<Potential> make_potential(const std::string& name);

}  // namespace chemdyn
