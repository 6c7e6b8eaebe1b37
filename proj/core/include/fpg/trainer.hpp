#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fpg/envs.hpp"
#include "fpg/frac_math.hpp"
#include "fpg/frac_td.hpp"
#include "fpg/policy.hpp"
#include "fpg/rng.hpp"

namespace fpg::trainer {

enum class Algo { Fpg, Reinforce, A2c, PpoLite };

std::string to_string(Algo a);
Algo parse_algo(const std::string& s);

/// Whether the adaptive step-size sums run over the whole training run or
/// restart with every episode.
enum class LrAccumulation { Run, Episode };

std::string to_string(LrAccumulation a);
LrAccumulation parse_lr_accumulation(const std::string& s);

/// Sign of the critic step. TdDescent applies phi += lr * delta * grad V,
/// the semi-gradient descent direction on delta^2 / 2. AsPrinted applies
/// phi -= lr * delta * grad V, which moves V(s) away from its TD target.
enum class ValueUpdate { TdDescent, AsPrinted };

std::string to_string(ValueUpdate v);
ValueUpdate parse_value_update(const std::string& s);

struct Ablations {
  bool clipping_off = false;
  bool recursion_off = false;  // use plain delta_t in place of delta_t^alpha
  bool minibatch_off = false;  // online updates only
};

struct TrainConfig {
  std::string env = "cartpole";
  Algo algo = Algo::Fpg;
  double alpha = 0.7;
  double gamma = 0.99;
  double beta_theta = 1e-2;
  double beta_v = 1e-1;
  double eps_tol = 1e-8;
  double eps_clip = 0.2;
  std::size_t max_episodes = 2000;
  std::size_t horizon = 0;  // 0: the environment's step limit
  std::size_t minibatch = 64;
  td::MuVariant mu_variant = td::MuVariant::Theorem;
  td::EtaVariant eta_variant = td::EtaVariant::GlConsistent;
  bool clipping = true;
  Ablations ablations;
  LrAccumulation lr_accumulation = LrAccumulation::Episode;
  ValueUpdate value_update = ValueUpdate::TdDescent;
  int hidden = 64;
  int ppo_epochs = 4;
  std::uint64_t seed = 0;
  bool record_wall_time = false;

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
  /// Recursion settings with ablations applied.
  td::FracTdConfig frac_config() const;
};

/// Defaults tuned per environment (gamma 0.95 for Pendulum, 0.99 otherwise).
TrainConfig default_config(const std::string& env);

struct Transition {
  std::vector<double> state;
  std::vector<double> action;  // as sampled, before clipping
  double reward = 0.0;
  std::vector<double> next_state;
  double old_log_prob = 0.0;
  double frac_delta = 0.0;  // delta_t^alpha at collection time
  bool done = false;
};

/// Running sums of squared gradient norms for the AdaGrad-norm step sizes.
struct AdaptiveLrState {
  math::KahanSum sum_sq_rho;
  math::KahanSum sum_sq_nu;

  double policy_lr(double beta_theta) const;
  double value_lr(double beta_v) const;
};

class NumericalAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StepOutcome {
  double delta = 0.0;
  double frac_delta = 0.0;
  double rho = 0.0;  // ||grad log pi||
  double nu = 0.0;   // ||grad V||
  double policy_lr = 0.0;
  double value_lr = 0.0;
  bool clipped = false;
  bool bound_violated = false;
};

/// One online actor-critic step. `fractional` selects delta_t^alpha via the
/// recursion; otherwise delta_t is used directly (A2C, recursion ablation).
/// Writes delta_t^alpha into `transition.frac_delta`.
StepOutcome online_update(policy::PolicyParams& theta,
                          policy::ValueParams& phi, Transition& transition,
                          td::FracTdState& frac_state, AdaptiveLrState& lr,
                          const td::FracTdConfig& frac, const TrainConfig& config,
                          bool fractional);

struct MinibatchStats {
  std::size_t batch = 0;
  double mean_weight = 0.0;
  std::size_t clipped_weights = 0;
};

/// Importance-weighted update over B transitions sampled without
/// replacement; sets theta_old to the updated theta.
MinibatchStats minibatch_update(policy::PolicyParams& theta,
                                policy::ValueParams& phi,
                                policy::PolicyParams& theta_old,
                                const std::vector<Transition>& buffer,
                                const TrainConfig& config, Rng& rng);

/// Importance weight min(exp(log_now - log_old), 1 + eps_clip).
double importance_weight(double log_prob_now, double log_prob_old,
                         double eps_clip);

struct EpisodeTrace {
  std::size_t steps = 0;
  double ret = 0.0;
  bool terminated = false;
  std::vector<double> deltas;
  std::vector<double> frac_deltas;
  std::vector<double> grad_norms;  // per-step policy-gradient norm
  std::vector<double> policy_lrs;
  std::vector<double> value_lrs;
  std::vector<Transition> transitions;
  std::uint64_t clip_events = 0;
  std::uint64_t bound_violations = 0;
  double max_abs_frac_delta = 0.0;
  double grad_norm_variance = 0.0;
};

/// Mutable state of one training run.
struct Learner {
  TrainConfig config;
  td::FracTdConfig frac;
  policy::PolicyParams theta;
  policy::PolicyParams theta_old;
  policy::ValueParams phi;
  AdaptiveLrState lr;
  Rng action_rng;
  Rng batch_rng;
  Rng env_seed_rng;

  explicit Learner(const TrainConfig& config);
};

/// Runs one episode of the configured algorithm, including its end-of-episode
/// update (minibatch, REINFORCE or PPO epochs).
EpisodeTrace run_episode(envs::Environment& env, Learner& learner,
                         std::uint64_t env_seed);

/// PPO clipped-surrogate policy gradient over a batch of (obs, action,
/// advantage, old log-prob) samples. Exposed for testing.
policy::GradientVector ppo_surrogate_gradient(
    const policy::PolicyParams& theta,
    const std::vector<const Transition*>& batch,
    const std::vector<double>& advantages, double eps_clip);

struct MetricsRecord {
  std::size_t episode = 0;
  std::size_t steps = 0;
  double ret = 0.0;
  double grad_var_window = 0.0;
  double max_abs_frac_delta = 0.0;
  std::uint64_t clip_events = 0;
  double wall_ms = 0.0;
};

inline constexpr std::size_t kGradVarWindow = 20;

enum class RunStatus { Ok, NumericalAbort };

struct RunArtifact {
  TrainConfig config;
  std::vector<MetricsRecord> metrics;
  policy::PolicyParams theta;
  policy::ValueParams phi;
  RunStatus status = RunStatus::Ok;
  std::string message;
  std::uint64_t bound_violations = 0;
  std::uint64_t total_steps = 0;
};

/// Invoked after every episode.
using EpisodeObserver =
    std::function<void(const MetricsRecord&, const EpisodeTrace&)>;

/// M episodes; one MetricsRecord per episode. On a non-finite update the run
/// stops and the parameters from before the failing episode are returned.
RunArtifact train(const TrainConfig& config,
                  const EpisodeObserver& observer = {});

}  // namespace fpg::trainer
