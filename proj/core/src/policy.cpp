#include "fpg/policy.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "fpg/frac_math.hpp"

namespace fpg::policy {
namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // ln(2 pi)

// Forward pass of a one-hidden-layer tanh network over a flat parameter
// vector. `hidden_out` receives tanh activations for backprop.
void mlp_forward(std::span<const double> p, int in, int hidden, int out,
                 std::span<const double> x, std::vector<double>& hidden_out,
                 std::vector<double>& y) {
  if (static_cast<int>(x.size()) != in) {
    throw std::invalid_argument("observation dimension mismatch");
  }
  const double* w1 = p.data();
  const double* b1 = w1 + hidden * in;
  const double* w2 = b1 + hidden;
  const double* b2 = w2 + out * hidden;
  hidden_out.resize(hidden);
  for (int j = 0; j < hidden; ++j) {
    double a = b1[j];
    const double* row = w1 + j * in;
    for (int i = 0; i < in; ++i) a += row[i] * x[i];
    hidden_out[j] = std::tanh(a);
  }
  y.resize(out);
  for (int o = 0; o < out; ++o) {
    double a = b2[o];
    const double* row = w2 + o * hidden;
    for (int j = 0; j < hidden; ++j) a += row[j] * hidden_out[j];
    y[o] = a;
  }
}

// Accumulates d(sum_o dy[o] * y[o]) / dp into grad (same layout as p).
void mlp_backward(std::span<const double> p, int in, int hidden, int out,
                  std::span<const double> x, const std::vector<double>& h,
                  const std::vector<double>& dy, std::span<double> grad) {
  const double* w2 = p.data() + hidden * in + hidden;
  double* g_w1 = grad.data();
  double* g_b1 = g_w1 + hidden * in;
  double* g_w2 = g_b1 + hidden;
  double* g_b2 = g_w2 + out * hidden;
  for (int o = 0; o < out; ++o) {
    g_b2[o] += dy[o];
    double* row = g_w2 + o * hidden;
    for (int j = 0; j < hidden; ++j) row[j] += dy[o] * h[j];
  }
  for (int j = 0; j < hidden; ++j) {
    double dh = 0.0;
    for (int o = 0; o < out; ++o) dh += w2[o * hidden + j] * dy[o];
    const double dpre = dh * (1.0 - h[j] * h[j]);
    g_b1[j] += dpre;
    double* row = g_w1 + j * in;
    for (int i = 0; i < in; ++i) row[i] += dpre * x[i];
  }
}

std::size_t mlp_size(int in, int hidden, int out) {
  return static_cast<std::size_t>(hidden) * in + hidden +
         static_cast<std::size_t>(out) * hidden + out;
}

void init_mlp(std::span<double> p, int in, int hidden, int out, Rng& rng,
              double final_scale) {
  const double b_in = 1.0 / std::sqrt(static_cast<double>(in));
  const double b_h = 1.0 / std::sqrt(static_cast<double>(hidden));
  std::size_t i = 0;
  for (int k = 0; k < hidden * in + hidden; ++k) p[i++] = rng.uniform(-b_in, b_in);
  for (int k = 0; k < out * hidden; ++k) {
    p[i++] = final_scale * rng.uniform(-b_h, b_h);
  }
  for (int k = 0; k < out; ++k) p[i++] = rng.uniform(-b_h, b_h);
}

double log_std_at(const PolicyParams& params, int d) {
  return std::clamp(params.theta[params.arch.log_std_offset() + d], kLogStdMin,
                    kLogStdMax);
}

void check_action_shape(const PolicyArch& arch, std::span<const double> a) {
  const std::size_t want =
      arch.head == HeadKind::Categorical ? 1 : static_cast<std::size_t>(arch.action_dim);
  if (a.size() != want) throw std::invalid_argument("action dimension mismatch");
  if (arch.head == HeadKind::Categorical) {
    const double idx = a[0];
    if (idx != std::floor(idx) || idx < 0 || idx >= arch.action_dim) {
      throw std::invalid_argument("categorical action out of range");
    }
  }
}

}  // namespace

std::size_t PolicyArch::param_count() const {
  return mlp_size(obs_dim, hidden, action_dim) +
         (head == HeadKind::Gaussian ? static_cast<std::size_t>(action_dim) : 0);
}

std::size_t PolicyArch::log_std_offset() const {
  return mlp_size(obs_dim, hidden, action_dim);
}

PolicyArch policy_arch_for(const envs::EnvSpec& spec, int hidden) {
  PolicyArch a;
  a.obs_dim = spec.obs_dim;
  a.hidden = hidden;
  if (spec.action_space.is_discrete()) {
    a.head = HeadKind::Categorical;
    a.action_dim = spec.action_space.n;
  } else {
    a.head = HeadKind::Gaussian;
    a.action_dim = spec.action_space.dim;
    a.action_low = spec.action_space.low;
    a.action_high = spec.action_space.high;
  }
  return a;
}

PolicyParams init_policy(const PolicyArch& arch, Rng& rng) {
  PolicyParams p = zero_policy(arch);
  init_mlp(p.theta, arch.obs_dim, arch.hidden, arch.action_dim, rng, 0.01);
  return p;
}

ValueParams init_value(int obs_dim, int hidden, Rng& rng) {
  ValueParams v = zero_value(obs_dim, hidden);
  init_mlp(v.phi, obs_dim, hidden, 1, rng, 1.0);
  return v;
}

PolicyParams zero_policy(const PolicyArch& arch) {
  return {arch, std::vector<double>(arch.param_count(), 0.0)};
}

ValueParams zero_value(int obs_dim, int hidden) {
  return {obs_dim, hidden, std::vector<double>(mlp_size(obs_dim, hidden, 1), 0.0)};
}

std::vector<double> softmax(std::span<const double> logits) {
  const double m = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - m);
    z += p[i];
  }
  for (double& v : p) v /= z;
  return p;
}

std::vector<double> head_output(const PolicyParams& params,
                                std::span<const double> obs) {
  const auto& a = params.arch;
  std::vector<double> h, y;
  mlp_forward(params.theta, a.obs_dim, a.hidden, a.action_dim, obs, h, y);
  return y;
}

std::vector<double> probabilities(const PolicyParams& params,
                                  std::span<const double> obs) {
  if (params.arch.head != HeadKind::Categorical) {
    throw std::logic_error("probabilities: categorical head required");
  }
  return softmax(head_output(params, obs));
}

SampledAction sample_action(const PolicyParams& params,
                            std::span<const double> obs, Rng& rng) {
  const auto& arch = params.arch;
  const auto y = head_output(params, obs);
  SampledAction out;
  if (arch.head == HeadKind::Categorical) {
    const auto p = softmax(y);
    const double u = rng.uniform();
    std::size_t idx = p.size() - 1;
    double cdf = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      cdf += p[i];
      if (u < cdf) {
        idx = i;
        break;
      }
    }
    out.action = {static_cast<double>(idx)};
    out.executed = out.action;
    const double m = *std::max_element(y.begin(), y.end());
    double z = 0.0;
    for (double v : y) z += std::exp(v - m);
    out.log_prob = y[idx] - m - std::log(z);
    return out;
  }
  out.action.resize(arch.action_dim);
  out.executed.resize(arch.action_dim);
  double lp = 0.0;
  for (int d = 0; d < arch.action_dim; ++d) {
    const double ls = log_std_at(params, d);
    const double eps = rng.normal();
    out.action[d] = y[d] + std::exp(ls) * eps;
    out.executed[d] = std::clamp(out.action[d], arch.action_low, arch.action_high);
    lp += -0.5 * (eps * eps + kLog2Pi) - ls;
  }
  out.log_prob = lp;
  return out;
}

double log_prob(const PolicyParams& params, std::span<const double> obs,
                std::span<const double> action) {
  const auto& arch = params.arch;
  check_action_shape(arch, action);
  const auto y = head_output(params, obs);
  if (arch.head == HeadKind::Categorical) {
    const double m = *std::max_element(y.begin(), y.end());
    double z = 0.0;
    for (double v : y) z += std::exp(v - m);
    return y[static_cast<std::size_t>(action[0])] - m - std::log(z);
  }
  double lp = 0.0;
  for (int d = 0; d < arch.action_dim; ++d) {
    const double ls = log_std_at(params, d);
    const double z = (action[d] - y[d]) * std::exp(-ls);
    lp += -0.5 * (z * z + kLog2Pi) - ls;
  }
  return lp;
}

GradientVector score(const PolicyParams& params, std::span<const double> obs,
                     std::span<const double> action) {
  const auto& arch = params.arch;
  check_action_shape(arch, action);
  std::vector<double> h, y;
  mlp_forward(params.theta, arch.obs_dim, arch.hidden, arch.action_dim, obs, h, y);
  GradientVector g{std::vector<double>(params.theta.size(), 0.0)};
  std::vector<double> dy(arch.action_dim);
  if (arch.head == HeadKind::Categorical) {
    const auto p = softmax(y);
    const auto a = static_cast<std::size_t>(action[0]);
    for (std::size_t i = 0; i < p.size(); ++i) dy[i] = (i == a ? 1.0 : 0.0) - p[i];
  } else {
    const std::size_t off = arch.log_std_offset();
    for (int d = 0; d < arch.action_dim; ++d) {
      const double raw = params.theta[off + d];
      const double ls = log_std_at(params, d);
      const double inv_var = std::exp(-2.0 * ls);
      const double diff = action[d] - y[d];
      dy[d] = diff * inv_var;
      // Zero where the clamp is active.
      const bool inside = raw > kLogStdMin && raw < kLogStdMax;
      g.values[off + d] = inside ? diff * diff * inv_var - 1.0 : 0.0;
    }
  }
  mlp_backward(params.theta, arch.obs_dim, arch.hidden, arch.action_dim, obs, h,
               dy, g.values);
  return g;
}

double value(const ValueParams& params, std::span<const double> obs) {
  std::vector<double> h, y;
  mlp_forward(params.phi, params.obs_dim, params.hidden, 1, obs, h, y);
  return y[0];
}

GradientVector value_grad(const ValueParams& params,
                          std::span<const double> obs) {
  std::vector<double> h, y;
  mlp_forward(params.phi, params.obs_dim, params.hidden, 1, obs, h, y);
  GradientVector g{std::vector<double>(params.phi.size(), 0.0)};
  mlp_backward(params.phi, params.obs_dim, params.hidden, 1, obs, h, {1.0},
               g.values);
  return g;
}

double grad_norm(const GradientVector& g) {
  math::KahanSum acc;
  for (double v : g.values) acc += v * v;
  return std::sqrt(acc.value());
}

void clamp_log_std(PolicyParams& params) {
  if (params.arch.head != HeadKind::Gaussian) return;
  const std::size_t off = params.arch.log_std_offset();
  for (int d = 0; d < params.arch.action_dim; ++d) {
    params.theta[off + d] = std::clamp(params.theta[off + d], kLogStdMin, kLogStdMax);
  }
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// ---------------------------------------------------------------------------
// Checkpoints

void write_checkpoint(std::ostream& out, const PolicyParams& policy,
                      const ValueParams& value) {
  const auto& a = policy.arch;
  const auto old_precision = out.precision(17);
  out << "# fpg-checkpoint obs_dim=" << a.obs_dim << " hidden=" << a.hidden
      << " head=" << (a.head == HeadKind::Categorical ? "categorical" : "gaussian")
      << " action_dim=" << a.action_dim << " action_low=" << a.action_low
      << " action_high=" << a.action_high << " value_hidden=" << value.hidden
      << " policy_size=" << policy.theta.size()
      << " value_size=" << value.phi.size() << '\n';
  out << "section,index,value\n";
  for (std::size_t i = 0; i < policy.theta.size(); ++i) {
    out << "policy," << i << ',' << policy.theta[i] << '\n';
  }
  for (std::size_t i = 0; i < value.phi.size(); ++i) {
    out << "value," << i << ',' << value.phi[i] << '\n';
  }
  out.precision(old_precision);
}

void read_checkpoint(std::istream& in, PolicyParams& policy,
                     ValueParams& value) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# fpg-checkpoint", 0) != 0) {
    throw std::runtime_error("checkpoint: missing architecture header");
  }
  std::map<std::string, std::string> kv;
  std::istringstream hs(line.substr(16));
  for (std::string tok; hs >> tok;) {
    const auto eq = tok.find('=');
    if (eq != std::string::npos) kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  auto need = [&](const char* k) -> const std::string& {
    auto it = kv.find(k);
    if (it == kv.end()) throw std::runtime_error(std::string("checkpoint: missing ") + k);
    return it->second;
  };
  PolicyArch a;
  a.obs_dim = std::stoi(need("obs_dim"));
  a.hidden = std::stoi(need("hidden"));
  a.head = need("head") == "gaussian" ? HeadKind::Gaussian : HeadKind::Categorical;
  a.action_dim = std::stoi(need("action_dim"));
  a.action_low = std::stod(need("action_low"));
  a.action_high = std::stod(need("action_high"));
  policy = zero_policy(a);
  value = zero_value(a.obs_dim, std::stoi(need("value_hidden")));
  if (std::stoul(need("policy_size")) != policy.theta.size() ||
      std::stoul(need("value_size")) != value.phi.size()) {
    throw std::runtime_error("checkpoint: sizes disagree with architecture");
  }
  std::getline(in, line);  // column header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string section, idx, val;
    std::getline(ls, section, ',');
    std::getline(ls, idx, ',');
    std::getline(ls, val, ',');
    auto& vec = section == "policy" ? policy.theta : value.phi;
    const auto i = std::stoul(idx);
    if (i >= vec.size()) throw std::runtime_error("checkpoint: index out of range");
    vec[i] = std::stod(val);
  }
}

}  // namespace fpg::policy
