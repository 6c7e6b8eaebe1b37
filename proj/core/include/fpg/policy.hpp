#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "fpg/envs.hpp"
#include "fpg/rng.hpp"

namespace fpg::policy {

enum class HeadKind { Categorical, Gaussian };

inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;

/// Shape of a one-hidden-layer tanh network.
///
/// Flat parameter layout: W1 (hidden x obs_dim, row-major), b1 (hidden),
/// W2 (out x hidden), b2 (out), then log_std (action_dim) for Gaussian
/// heads. `out` is the number of logits or the action dimension.
struct PolicyArch {
  int obs_dim = 0;
  int hidden = 64;
  HeadKind head = HeadKind::Categorical;
  int action_dim = 0;  // actions (categorical) or action dimension (Gaussian)
  double action_low = 0.0;
  double action_high = 0.0;

  std::size_t param_count() const;
  std::size_t log_std_offset() const;
};

PolicyArch policy_arch_for(const envs::EnvSpec& spec, int hidden = 64);

struct PolicyParams {
  PolicyArch arch;
  std::vector<double> theta;
};

struct ValueParams {
  int obs_dim = 0;
  int hidden = 64;
  std::vector<double> phi;
};

/// Gradient aligned with a parameter vector.
struct GradientVector {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
};

struct SampledAction {
  envs::Action action;    // as sampled; log_prob refers to this
  envs::Action executed;  // clipped to the action bounds
  double log_prob = 0.0;
};

PolicyParams init_policy(const PolicyArch& arch, Rng& rng);
ValueParams init_value(int obs_dim, int hidden, Rng& rng);
PolicyParams zero_policy(const PolicyArch& arch);
ValueParams zero_value(int obs_dim, int hidden = 64);

/// Network head output: logits (categorical) or Gaussian mean.
std::vector<double> head_output(const PolicyParams& params,
                                std::span<const double> obs);
std::vector<double> probabilities(const PolicyParams& params,
                                  std::span<const double> obs);

SampledAction sample_action(const PolicyParams& params,
                            std::span<const double> obs, Rng& rng);
double log_prob(const PolicyParams& params, std::span<const double> obs,
                std::span<const double> action);
/// d log pi(action | obs) / d theta.
GradientVector score(const PolicyParams& params, std::span<const double> obs,
                     std::span<const double> action);

double value(const ValueParams& params, std::span<const double> obs);
GradientVector value_grad(const ValueParams& params,
                          std::span<const double> obs);

/// Euclidean norm with compensated accumulation of the squares.
double grad_norm(const GradientVector& g);

void clamp_log_std(PolicyParams& params);
bool all_finite(std::span<const double> v);

/// Softmax with max subtraction.
std::vector<double> softmax(std::span<const double> logits);

// Checkpoints: one architecture header line, then "section,index,value" rows.
void write_checkpoint(std::ostream& out, const PolicyParams& policy,
                      const ValueParams& value);
void read_checkpoint(std::istream& in, PolicyParams& policy,
                     ValueParams& value);

}  // namespace fpg::policy
