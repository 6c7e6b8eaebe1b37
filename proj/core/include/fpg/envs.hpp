#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fpg/rng.hpp"

namespace fpg::envs {

using Observation = std::vector<double>;
/// Discrete actions carry the action index as the single element.
using Action = std::vector<double>;

struct ActionSpace {
  enum class Kind { Discrete, Box };
  Kind kind = Kind::Discrete;
  int n = 0;  // number of discrete actions
  double low = 0.0;
  double high = 0.0;
  int dim = 1;  // Box dimension; 1 for Discrete

  static ActionSpace discrete(int n) { return {Kind::Discrete, n, 0, 0, 1}; }
  static ActionSpace box(double lo, double hi, int dim) {
    return {Kind::Box, 0, lo, hi, dim};
  }
  bool is_discrete() const { return kind == Kind::Discrete; }
};

struct EnvSpec {
  std::string name;
  int obs_dim = 0;
  ActionSpace action_space;
  int max_steps = 0;
  double solved_threshold = 0.0;
  double default_gamma = 0.99;
};

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool done = false;       // terminal state reached
  bool truncated = false;  // step limit reached
};

class ActionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Environment {
 public:
  virtual ~Environment() = default;

  virtual const EnvSpec& spec() const = 0;
  virtual Observation reset(std::uint64_t seed) = 0;
  virtual StepResult step(std::span<const double> action) = 0;
  /// Raw internal state (CartPole x, x_dot, theta, theta_dot;
  /// MountainCar position, velocity; Pendulum theta, theta_dot).
  virtual std::vector<double> state() const = 0;
  virtual void set_state(std::span<const double> state) = 0;
  virtual Observation observe() const = 0;

  int elapsed_steps() const { return elapsed_; }

 protected:
  void check_action(std::span<const double> action) const;
  StepResult finish(double reward, bool done);

  Rng rng_;
  int elapsed_ = 0;
};

class CartPole final : public Environment {
 public:
  static constexpr double kGravity = 9.8;
  static constexpr double kCartMass = 1.0;
  static constexpr double kPoleMass = 0.1;
  static constexpr double kHalfLength = 0.5;
  static constexpr double kForce = 10.0;
  static constexpr double kTau = 0.02;
  static constexpr double kThetaLimit = 12.0 * 2.0 * 3.14159265358979323846 / 360.0;
  static constexpr double kXLimit = 2.4;

  CartPole();
  const EnvSpec& spec() const override { return spec_; }
  Observation reset(std::uint64_t seed) override;
  StepResult step(std::span<const double> action) override;
  std::vector<double> state() const override { return {x_, x_dot_, theta_, theta_dot_}; }
  void set_state(std::span<const double> state) override;
  Observation observe() const override { return state(); }

 private:
  EnvSpec spec_;
  double x_ = 0, x_dot_ = 0, theta_ = 0, theta_dot_ = 0;
};

class MountainCarContinuous final : public Environment {
 public:
  static constexpr double kMinPosition = -1.2;
  static constexpr double kMaxPosition = 0.6;
  static constexpr double kMaxSpeed = 0.07;
  static constexpr double kGoalPosition = 0.45;
  static constexpr double kPower = 0.0015;

  MountainCarContinuous();
  const EnvSpec& spec() const override { return spec_; }
  Observation reset(std::uint64_t seed) override;
  StepResult step(std::span<const double> action) override;
  std::vector<double> state() const override { return {position_, velocity_}; }
  void set_state(std::span<const double> state) override;
  Observation observe() const override { return state(); }

 private:
  EnvSpec spec_;
  double position_ = 0, velocity_ = 0;
  bool goal_reached_ = false;
};

class Pendulum final : public Environment {
 public:
  static constexpr double kMaxSpeed = 8.0;
  static constexpr double kMaxTorque = 2.0;
  static constexpr double kDt = 0.05;
  static constexpr double kGravity = 10.0;
  static constexpr double kMass = 1.0;
  static constexpr double kLength = 1.0;

  Pendulum();
  const EnvSpec& spec() const override { return spec_; }
  Observation reset(std::uint64_t seed) override;
  StepResult step(std::span<const double> action) override;
  std::vector<double> state() const override { return {theta_, theta_dot_}; }
  void set_state(std::span<const double> state) override;
  Observation observe() const override;

 private:
  EnvSpec spec_;
  double theta_ = 0, theta_dot_ = 0;
};

/// Wraps an angle into [-pi, pi).
double normalize_angle(double x);

/// Accepts "cartpole", "mountaincar" (or "mountaincarcontinuous"),
/// "pendulum"; case-insensitive.
std::unique_ptr<Environment> make_env(const std::string& name);
std::vector<std::string> env_names();

/// Trajectory dump: t,obs0..,act0..,reward,done
class TrajectoryWriter {
 public:
  TrajectoryWriter(std::ostream& out, int obs_dim, int action_dim);
  void write(int t, std::span<const double> obs, std::span<const double> action,
             double reward, bool done);

 private:
  std::ostream& out_;
};

}  // namespace fpg::envs
