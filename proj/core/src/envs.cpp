#include "fpg/envs.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <ostream>

namespace fpg::envs {

void Environment::check_action(std::span<const double> action) const {
  const auto& space = spec().action_space;
  if (static_cast<int>(action.size()) != space.dim) {
    throw ActionError(spec().name + ": expected action of dimension " +
                      std::to_string(space.dim) + ", got " +
                      std::to_string(action.size()));
  }
  for (double a : action) {
    if (!std::isfinite(a)) throw ActionError(spec().name + ": non-finite action");
  }
  if (space.is_discrete()) {
    const double a = action[0];
    if (a != std::floor(a) || a < 0 || a >= space.n) {
      throw ActionError(spec().name + ": discrete action out of range");
    }
  }
}

StepResult Environment::finish(double reward, bool done) {
  ++elapsed_;
  StepResult r;
  r.observation = observe();
  r.reward = reward;
  r.done = done;
  r.truncated = !done && elapsed_ >= spec().max_steps;
  return r;
}

double normalize_angle(double x) {
  constexpr double pi = std::numbers::pi;
  double y = std::fmod(x + pi, 2.0 * pi);
  if (y < 0) y += 2.0 * pi;
  return y - pi;
}

// ---------------------------------------------------------------------------
// CartPole

CartPole::CartPole() {
  spec_.name = "cartpole";
  spec_.obs_dim = 4;
  spec_.action_space = ActionSpace::discrete(2);
  spec_.max_steps = 500;
  spec_.solved_threshold = 200.0;
  spec_.default_gamma = 0.99;
}

Observation CartPole::reset(std::uint64_t seed) {
  rng_.seed(seed);
  x_ = rng_.uniform(-0.05, 0.05);
  x_dot_ = rng_.uniform(-0.05, 0.05);
  theta_ = rng_.uniform(-0.05, 0.05);
  theta_dot_ = rng_.uniform(-0.05, 0.05);
  elapsed_ = 0;
  return observe();
}

void CartPole::set_state(std::span<const double> s) {
  if (s.size() != 4) throw std::invalid_argument("cartpole: state has 4 entries");
  x_ = s[0];
  x_dot_ = s[1];
  theta_ = s[2];
  theta_dot_ = s[3];
}

StepResult CartPole::step(std::span<const double> action) {
  check_action(action);
  constexpr double total_mass = kCartMass + kPoleMass;
  constexpr double pole_mass_length = kPoleMass * kHalfLength;

  const double force = action[0] == 1.0 ? kForce : -kForce;
  const double cos_t = std::cos(theta_);
  const double sin_t = std::sin(theta_);
  const double temp =
      (force + pole_mass_length * theta_dot_ * theta_dot_ * sin_t) / total_mass;
  const double theta_acc =
      (kGravity * sin_t - cos_t * temp) /
      (kHalfLength * (4.0 / 3.0 - kPoleMass * cos_t * cos_t / total_mass));
  const double x_acc = temp - pole_mass_length * theta_acc * cos_t / total_mass;

  // Explicit Euler.
  x_ += kTau * x_dot_;
  x_dot_ += kTau * x_acc;
  theta_ += kTau * theta_dot_;
  theta_dot_ += kTau * theta_acc;

  const bool done = x_ < -kXLimit || x_ > kXLimit || theta_ < -kThetaLimit ||
                    theta_ > kThetaLimit;
  return finish(1.0, done);
}

// ---------------------------------------------------------------------------
// MountainCarContinuous

MountainCarContinuous::MountainCarContinuous() {
  spec_.name = "mountaincar";
  spec_.obs_dim = 2;
  spec_.action_space = ActionSpace::box(-1.0, 1.0, 1);
  spec_.max_steps = 999;
  spec_.solved_threshold = 90.0;
  spec_.default_gamma = 0.99;
}

Observation MountainCarContinuous::reset(std::uint64_t seed) {
  rng_.seed(seed);
  position_ = rng_.uniform(-0.6, -0.4);
  velocity_ = 0.0;
  goal_reached_ = false;
  elapsed_ = 0;
  return observe();
}

void MountainCarContinuous::set_state(std::span<const double> s) {
  if (s.size() != 2) throw std::invalid_argument("mountaincar: state has 2 entries");
  position_ = s[0];
  velocity_ = s[1];
  goal_reached_ = false;
}

StepResult MountainCarContinuous::step(std::span<const double> action) {
  check_action(action);
  const double force = std::clamp(action[0], -1.0, 1.0);

  velocity_ += force * kPower - 0.0025 * std::cos(3.0 * position_);
  velocity_ = std::clamp(velocity_, -kMaxSpeed, kMaxSpeed);
  position_ += velocity_;
  position_ = std::clamp(position_, kMinPosition, kMaxPosition);
  if (position_ == kMinPosition && velocity_ < 0) velocity_ = 0.0;

  const bool done = position_ >= kGoalPosition && velocity_ >= 0.0;
  double reward = -0.1 * force * force;
  if (done && !goal_reached_) {
    reward += 100.0;
    goal_reached_ = true;
  }
  return finish(reward, done);
}

// ---------------------------------------------------------------------------
// Pendulum

Pendulum::Pendulum() {
  spec_.name = "pendulum";
  spec_.obs_dim = 3;
  spec_.action_space = ActionSpace::box(-kMaxTorque, kMaxTorque, 1);
  spec_.max_steps = 200;
  spec_.solved_threshold = -150.0;
  spec_.default_gamma = 0.95;
}

Observation Pendulum::reset(std::uint64_t seed) {
  rng_.seed(seed);
  theta_ = rng_.uniform(-std::numbers::pi, std::numbers::pi);
  theta_dot_ = rng_.uniform(-1.0, 1.0);
  elapsed_ = 0;
  return observe();
}

void Pendulum::set_state(std::span<const double> s) {
  if (s.size() != 2) throw std::invalid_argument("pendulum: state has 2 entries");
  theta_ = s[0];
  theta_dot_ = s[1];
}

Observation Pendulum::observe() const {
  return {std::cos(theta_), std::sin(theta_), theta_dot_};
}

StepResult Pendulum::step(std::span<const double> action) {
  check_action(action);
  const double u = std::clamp(action[0], -kMaxTorque, kMaxTorque);
  const double th = normalize_angle(theta_);
  const double cost = th * th + 0.1 * theta_dot_ * theta_dot_ + 0.001 * u * u;

  double new_theta_dot =
      theta_dot_ + (3.0 * kGravity / (2.0 * kLength) * std::sin(theta_) +
                    3.0 / (kMass * kLength * kLength) * u) *
                       kDt;
  new_theta_dot = std::clamp(new_theta_dot, -kMaxSpeed, kMaxSpeed);
  theta_ += new_theta_dot * kDt;
  theta_dot_ = new_theta_dot;
  return finish(-cost, false);
}

// ---------------------------------------------------------------------------

std::unique_ptr<Environment> make_env(const std::string& name) {
  std::string key;
  for (char c : name) {
    if (c != '-' && c != '_') {
      key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  if (key == "cartpole" || key == "cartpolev1") return std::make_unique<CartPole>();
  if (key == "mountaincar" || key == "mountaincarcontinuous" ||
      key == "mountaincarcontinuousv0") {
    return std::make_unique<MountainCarContinuous>();
  }
  if (key == "pendulum" || key == "pendulumv1") return std::make_unique<Pendulum>();
  throw std::invalid_argument("unknown environment '" + name + "'");
}

std::vector<std::string> env_names() {
  return {"cartpole", "mountaincar", "pendulum"};
}

TrajectoryWriter::TrajectoryWriter(std::ostream& out, int obs_dim,
                                   int action_dim)
    : out_(out) {
  out_.precision(17);
  out_ << 't';
  for (int i = 0; i < obs_dim; ++i) out_ << ",obs" << i;
  for (int i = 0; i < action_dim; ++i) out_ << ",act" << i;
  out_ << ",reward,done\n";
}

void TrajectoryWriter::write(int t, std::span<const double> obs,
                             std::span<const double> action, double reward,
                             bool done) {
  out_ << t;
  for (double o : obs) out_ << ',' << o;
  for (double a : action) out_ << ',' << a;
  out_ << ',' << reward << ',' << (done ? 1 : 0) << '\n';
}

}  // namespace fpg::envs
