#include "fpg/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <numeric>

namespace fpg::trainer {

using policy::GradientVector;
using policy::PolicyParams;
using policy::ValueParams;

std::string to_string(Algo a) {
  switch (a) {
    case Algo::Fpg: return "fpg";
    case Algo::Reinforce: return "reinforce";
    case Algo::A2c: return "a2c";
    case Algo::PpoLite: return "ppo_lite";
  }
  return "?";
}

Algo parse_algo(const std::string& s) {
  if (s == "fpg") return Algo::Fpg;
  if (s == "reinforce") return Algo::Reinforce;
  if (s == "a2c") return Algo::A2c;
  if (s == "ppo_lite" || s == "ppo") return Algo::PpoLite;
  throw std::invalid_argument("unknown algorithm '" + s + "'");
}

std::string to_string(ValueUpdate v) {
  return v == ValueUpdate::TdDescent ? "td_descent" : "as_printed";
}

ValueUpdate parse_value_update(const std::string& s) {
  if (s == "td_descent") return ValueUpdate::TdDescent;
  if (s == "as_printed") return ValueUpdate::AsPrinted;
  throw std::invalid_argument("unknown value update '" + s + "'");
}

std::string to_string(LrAccumulation a) {
  return a == LrAccumulation::Run ? "run" : "episode";
}

LrAccumulation parse_lr_accumulation(const std::string& s) {
  if (s == "run") return LrAccumulation::Run;
  if (s == "episode") return LrAccumulation::Episode;
  throw std::invalid_argument("unknown lr accumulation '" + s + "'");
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& m) { throw std::invalid_argument(m); };
  envs::make_env(env);  // throws on unknown names
  if (!(gamma > 0.0 && gamma <= 1.0)) fail("gamma must lie in (0,1]");
  if (!(eps_clip > 0.0)) fail("eps_clip must be positive");
  if (!(eps_tol > 0.0)) fail("eps_tol must be positive");
  if (minibatch < 1) fail("minibatch must be >= 1");
  if (!(beta_theta >= 0.0) || !(beta_v >= 0.0)) fail("learning rates must be >= 0");
  if (hidden < 1) fail("hidden must be >= 1");
  if (ppo_epochs < 1) fail("ppo_epochs must be >= 1");
  if (algo == Algo::Fpg && !(alpha > 0.0 && alpha < 1.0)) {
    fail("alpha must lie in (0,1)");
  }
}

td::FracTdConfig TrainConfig::frac_config() const {
  return td::make_frac_td_config(alpha, mu_variant, eta_variant,
                                 clipping && !ablations.clipping_off, eps_tol);
}

TrainConfig default_config(const std::string& env) {
  TrainConfig c;
  c.env = env;
  c.gamma = envs::make_env(env)->spec().default_gamma;
  return c;
}

double AdaptiveLrState::policy_lr(double beta_theta) const {
  return beta_theta / std::sqrt(1.0 + sum_sq_rho.value());
}

double AdaptiveLrState::value_lr(double beta_v) const {
  return beta_v / std::sqrt(1.0 + sum_sq_nu.value());
}

namespace {

void axpy(double a, const std::vector<double>& x, std::vector<double>& y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

void require_finite(const PolicyParams& theta, const ValueParams& phi) {
  if (!policy::all_finite(theta.theta) || !policy::all_finite(phi.phi)) {
    throw NumericalAbort("non-finite parameters after update");
  }
}

double population_variance(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  math::KahanSum s;
  for (double x : v) s += x;
  const double mean = s.value() / static_cast<double>(v.size());
  math::KahanSum ss;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss.value() / static_cast<double>(v.size());
}

std::vector<double> discounted_returns(const std::vector<Transition>& tr,
                                       double gamma) {
  std::vector<double> g(tr.size());
  double acc = 0.0;
  for (std::size_t i = tr.size(); i-- > 0;) {
    acc = tr[i].reward + gamma * acc;
    g[i] = acc;
  }
  return g;
}

// +1 moves V(s) toward the TD target; -1 is the sign of the printed listing.
double value_sign(const TrainConfig& c) {
  return c.value_update == ValueUpdate::TdDescent ? 1.0 : -1.0;
}

// Compensated per-component accumulator for gradient sums.
struct GradAccumulator {
  std::vector<math::KahanSum> parts;
  explicit GradAccumulator(std::size_t n) : parts(n) {}
  void add(double scale, const GradientVector& g) {
    for (std::size_t i = 0; i < parts.size(); ++i) parts[i] += scale * g[i];
  }
  double operator[](std::size_t i) const { return parts[i].value(); }
};

}  // namespace

StepOutcome online_update(PolicyParams& theta, ValueParams& phi,
                          Transition& tr, td::FracTdState& frac_state,
                          AdaptiveLrState& lr, const td::FracTdConfig& frac,
                          const TrainConfig& config, bool fractional) {
  StepOutcome out;
  const double v_curr = policy::value(phi, tr.state);
  const double v_next = policy::value(phi, tr.next_state);
  out.delta = td::td_error(tr.reward, v_next, v_curr, config.gamma, tr.done);
  if (!std::isfinite(out.delta)) throw NumericalAbort("non-finite TD-error");

  if (fractional) {
    const auto before = frac_state;
    auto [next, value] = td::recursive_step(frac_state, out.delta, frac);
    frac_state = next;
    out.frac_delta = value;
    out.clipped = next.clip_events > before.clip_events;
    out.bound_violated =
        frac.clipping_enabled &&
        std::abs(value) > td::clip_bound(before.t, next.max_abs_delta, frac);
  } else {
    out.frac_delta = out.delta;
  }
  tr.frac_delta = out.frac_delta;

  const auto g_theta = policy::score(theta, tr.state, tr.action);
  const auto g_phi = policy::value_grad(phi, tr.state);
  out.rho = policy::grad_norm(g_theta);
  out.nu = policy::grad_norm(g_phi);
  lr.sum_sq_rho += out.rho * out.rho;
  lr.sum_sq_nu += out.nu * out.nu;
  out.policy_lr = lr.policy_lr(config.beta_theta);
  out.value_lr = lr.value_lr(config.beta_v);

  axpy(out.policy_lr * out.frac_delta, g_theta.values, theta.theta);
  axpy(value_sign(config) * out.value_lr * out.frac_delta, g_phi.values, phi.phi);
  policy::clamp_log_std(theta);
  require_finite(theta, phi);
  return out;
}

double importance_weight(double log_prob_now, double log_prob_old,
                         double eps_clip) {
  return std::min(std::exp(log_prob_now - log_prob_old), 1.0 + eps_clip);
}

MinibatchStats minibatch_update(PolicyParams& theta, ValueParams& phi,
                                PolicyParams& theta_old,
                                const std::vector<Transition>& buffer,
                                const TrainConfig& config, Rng& rng) {
  if (buffer.empty()) throw std::invalid_argument("minibatch_update: empty buffer");
  const std::size_t b = std::min(config.minibatch, buffer.size());

  // Partial Fisher-Yates: the first b entries form the sample.
  std::vector<std::size_t> idx(buffer.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < b; ++i) {
    const std::size_t j = i + rng.below(idx.size() - i);
    std::swap(idx[i], idx[j]);
  }

  GradAccumulator g_theta(theta.theta.size());
  GradAccumulator g_phi(phi.phi.size());
  MinibatchStats stats;
  stats.batch = b;
  math::KahanSum weight_sum;
  for (std::size_t i = 0; i < b; ++i) {
    const auto& tr = buffer[idx[i]];
    const double lp_now = policy::log_prob(theta, tr.state, tr.action);
    const double lp_old = policy::log_prob(theta_old, tr.state, tr.action);
    const double w = importance_weight(lp_now, lp_old, config.eps_clip);
    if (w >= 1.0 + config.eps_clip) ++stats.clipped_weights;
    weight_sum += w;
    g_theta.add(w * tr.frac_delta, policy::score(theta, tr.state, tr.action));
    g_phi.add(value_sign(config) * w * tr.frac_delta,
              policy::value_grad(phi, tr.state));
  }
  const double inv_b = 1.0 / static_cast<double>(b);
  for (std::size_t i = 0; i < theta.theta.size(); ++i) {
    theta.theta[i] += config.beta_theta * inv_b * g_theta[i];
  }
  for (std::size_t i = 0; i < phi.phi.size(); ++i) {
    phi.phi[i] += config.beta_v * inv_b * g_phi[i];
  }
  policy::clamp_log_std(theta);
  require_finite(theta, phi);
  theta_old = theta;
  stats.mean_weight = weight_sum.value() * inv_b;
  return stats;
}

GradientVector ppo_surrogate_gradient(const PolicyParams& theta,
                                      const std::vector<const Transition*>& batch,
                                      const std::vector<double>& advantages,
                                      double eps_clip) {
  GradAccumulator acc(theta.theta.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& tr = *batch[i];
    const double a = advantages[i];
    const double ratio =
        std::exp(policy::log_prob(theta, tr.state, tr.action) - tr.old_log_prob);
    // d/dtheta min(r A, clip(r) A) is r A grad log pi inside the trust
    // region and 0 where the clipped branch is the minimum.
    const bool clipped = (a > 0.0 && ratio > 1.0 + eps_clip) ||
                         (a < 0.0 && ratio < 1.0 - eps_clip);
    if (clipped) continue;
    acc.add(ratio * a, policy::score(theta, tr.state, tr.action));
  }
  GradientVector g{std::vector<double>(theta.theta.size())};
  const double inv = batch.empty() ? 0.0 : 1.0 / static_cast<double>(batch.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = acc[i] * inv;
  return g;
}

Learner::Learner(const TrainConfig& cfg) : config(cfg) {
  Rng master(cfg.seed);
  Rng init_rng(master.split());
  action_rng.seed(master.split());
  batch_rng.seed(master.split());
  env_seed_rng.seed(master.split());
  const auto env = envs::make_env(cfg.env);
  theta = policy::init_policy(policy::policy_arch_for(env->spec(), cfg.hidden),
                              init_rng);
  phi = policy::init_value(env->spec().obs_dim, cfg.hidden, init_rng);
  theta_old = theta;
  if (cfg.algo == Algo::Fpg) frac = cfg.frac_config();
}

namespace {

std::size_t horizon_for(const envs::Environment& env, const TrainConfig& c) {
  const auto limit = static_cast<std::size_t>(env.spec().max_steps);
  return c.horizon == 0 ? limit : std::min(c.horizon, limit);
}

// Samples a trajectory under the current policy without updating it.
void collect(envs::Environment& env, Learner& L, std::uint64_t env_seed,
             EpisodeTrace& trace) {
  auto obs = env.reset(env_seed);
  const std::size_t horizon = horizon_for(env, L.config);
  for (std::size_t t = 0; t < horizon; ++t) {
    const auto sa = policy::sample_action(L.theta, obs, L.action_rng);
    auto res = env.step(sa.executed);
    Transition tr{obs, sa.action, res.reward, res.observation, sa.log_prob, 0.0,
                  res.done};
    trace.ret += res.reward;
    trace.transitions.push_back(std::move(tr));
    obs = std::move(res.observation);
    if (res.done) trace.terminated = true;
    if (res.done || res.truncated) break;
  }
  trace.steps = trace.transitions.size();
}

void online_episode(envs::Environment& env, Learner& L, std::uint64_t env_seed,
                    EpisodeTrace& trace) {
  const auto& cfg = L.config;
  const bool fractional = cfg.algo == Algo::Fpg && !cfg.ablations.recursion_off;
  if (cfg.lr_accumulation == LrAccumulation::Episode) L.lr = {};
  td::FracTdState frac_state;  // fresh at every episode start

  auto obs = env.reset(env_seed);
  const std::size_t horizon = horizon_for(env, cfg);
  for (std::size_t t = 0; t < horizon; ++t) {
    const auto sa = policy::sample_action(L.theta, obs, L.action_rng);
    auto res = env.step(sa.executed);
    Transition tr{obs, sa.action, res.reward, res.observation, sa.log_prob, 0.0,
                  res.done};
    const auto out =
        online_update(L.theta, L.phi, tr, frac_state, L.lr, L.frac, cfg, fractional);
    trace.ret += res.reward;
    trace.deltas.push_back(out.delta);
    trace.frac_deltas.push_back(out.frac_delta);
    trace.grad_norms.push_back(std::abs(out.frac_delta) * out.rho);
    trace.policy_lrs.push_back(out.policy_lr);
    trace.value_lrs.push_back(out.value_lr);
    trace.max_abs_frac_delta =
        std::max(trace.max_abs_frac_delta, std::abs(out.frac_delta));
    if (out.bound_violated) ++trace.bound_violations;
    trace.transitions.push_back(std::move(tr));
    obs = std::move(res.observation);
    if (res.done) trace.terminated = true;
    if (res.done || res.truncated) break;
  }
  trace.steps = trace.transitions.size();
  trace.clip_events = frac_state.clip_events;

  if (!cfg.ablations.minibatch_off && !trace.transitions.empty()) {
    minibatch_update(L.theta, L.phi, L.theta_old, trace.transitions, cfg,
                     L.batch_rng);
  }
}

void reinforce_episode(envs::Environment& env, Learner& L,
                       std::uint64_t env_seed, EpisodeTrace& trace) {
  collect(env, L, env_seed, trace);
  if (trace.transitions.empty()) return;
  const auto returns = discounted_returns(trace.transitions, L.config.gamma);
  GradAccumulator acc(L.theta.theta.size());
  for (std::size_t i = 0; i < trace.transitions.size(); ++i) {
    const auto& tr = trace.transitions[i];
    const auto g = policy::score(L.theta, tr.state, tr.action);
    trace.grad_norms.push_back(std::abs(returns[i]) * policy::grad_norm(g));
    acc.add(returns[i], g);
  }
  const double scale =
      L.config.beta_theta / static_cast<double>(trace.transitions.size());
  for (std::size_t i = 0; i < L.theta.theta.size(); ++i) {
    L.theta.theta[i] += scale * acc[i];
  }
  policy::clamp_log_std(L.theta);
  require_finite(L.theta, L.phi);
}

void ppo_episode(envs::Environment& env, Learner& L, std::uint64_t env_seed,
                 EpisodeTrace& trace) {
  collect(env, L, env_seed, trace);
  const std::size_t n = trace.transitions.size();
  if (n == 0) return;
  const auto& cfg = L.config;
  L.theta_old = L.theta;
  const auto returns = discounted_returns(trace.transitions, cfg.gamma);
  std::vector<double> adv(n);
  for (std::size_t i = 0; i < n; ++i) {
    adv[i] = returns[i] - policy::value(L.phi, trace.transitions[i].state);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& tr = trace.transitions[i];
    trace.grad_norms.push_back(
        std::abs(adv[i]) *
        policy::grad_norm(policy::score(L.theta, tr.state, tr.action)));
  }
  if (n >= 2) {
    double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / n;
    double var = 0.0;
    for (double a : adv) var += (a - mean) * (a - mean);
    const double sd = std::sqrt(var / n);
    if (sd > 1e-8) {
      for (double& a : adv) a = (a - mean) / sd;
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (int epoch = 0; epoch < cfg.ppo_epochs; ++epoch) {
    for (std::size_t i = n; i > 1; --i) {
      std::swap(order[i - 1], order[L.batch_rng.below(i)]);
    }
    for (std::size_t start = 0; start < n; start += cfg.minibatch) {
      const std::size_t stop = std::min(n, start + cfg.minibatch);
      std::vector<const Transition*> batch;
      std::vector<double> batch_adv;
      for (std::size_t k = start; k < stop; ++k) {
        batch.push_back(&trace.transitions[order[k]]);
        batch_adv.push_back(adv[order[k]]);
      }
      const auto g = ppo_surrogate_gradient(L.theta, batch, batch_adv, cfg.eps_clip);
      axpy(cfg.beta_theta, g.values, L.theta.theta);

      GradAccumulator vg(L.phi.phi.size());
      for (std::size_t k = start; k < stop; ++k) {
        const auto& tr = trace.transitions[order[k]];
        const double err = returns[order[k]] - policy::value(L.phi, tr.state);
        vg.add(err, policy::value_grad(L.phi, tr.state));
      }
      const double scale = cfg.beta_v / static_cast<double>(stop - start);
      for (std::size_t i = 0; i < L.phi.phi.size(); ++i) L.phi.phi[i] += scale * vg[i];
      policy::clamp_log_std(L.theta);
      require_finite(L.theta, L.phi);
    }
  }
  L.theta_old = L.theta;
}

}  // namespace

EpisodeTrace run_episode(envs::Environment& env, Learner& learner,
                         std::uint64_t env_seed) {
  EpisodeTrace trace;
  switch (learner.config.algo) {
    case Algo::Fpg:
    case Algo::A2c:
      online_episode(env, learner, env_seed, trace);
      break;
    case Algo::Reinforce:
      reinforce_episode(env, learner, env_seed, trace);
      break;
    case Algo::PpoLite:
      ppo_episode(env, learner, env_seed, trace);
      break;
  }
  trace.grad_norm_variance = population_variance(trace.grad_norms);
  return trace;
}

RunArtifact train(const TrainConfig& config, const EpisodeObserver& observer) {
  config.validate();
  RunArtifact art;
  art.config = config;
  Learner learner(config);
  auto env = envs::make_env(config.env);
  std::deque<double> window;  // per-episode gradient-norm variances

  for (std::size_t ep = 1; ep <= config.max_episodes; ++ep) {
    const auto theta_before = learner.theta;
    const auto phi_before = learner.phi;
    const auto start = std::chrono::steady_clock::now();
    EpisodeTrace trace;
    try {
      trace = run_episode(*env, learner, learner.env_seed_rng.next_u64());
    } catch (const NumericalAbort& e) {
      learner.theta = theta_before;
      learner.phi = phi_before;
      art.status = RunStatus::NumericalAbort;
      art.message = "episode " + std::to_string(ep) + ": " + e.what();
      break;
    }
    const auto stop = std::chrono::steady_clock::now();

    window.push_back(trace.grad_norm_variance);
    if (window.size() > kGradVarWindow) window.pop_front();
    math::KahanSum wsum;
    for (double v : window) wsum += v;

    MetricsRecord rec;
    rec.episode = ep;
    rec.steps = trace.steps;
    rec.ret = trace.ret;
    rec.grad_var_window = wsum.value() / static_cast<double>(window.size());
    rec.max_abs_frac_delta = trace.max_abs_frac_delta;
    rec.clip_events = trace.clip_events;
    rec.wall_ms = config.record_wall_time
                      ? std::chrono::duration<double, std::milli>(stop - start).count()
                      : 0.0;
    art.metrics.push_back(rec);
    art.bound_violations += trace.bound_violations;
    art.total_steps += trace.steps;
    if (observer) observer(rec, trace);
  }
  art.theta = learner.theta;
  art.phi = learner.phi;
  return art;
}

}  // namespace fpg::trainer
