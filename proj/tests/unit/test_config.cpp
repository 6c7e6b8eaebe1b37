#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "fpg/config.hpp"

namespace cfg = fpg::config;
namespace tr = fpg::trainer;
namespace td = fpg::td;

TEST(Config, ParsesSectionsAndDefaults) {
  const auto c = cfg::parse_config_string(R"(
# comment
[run]
env = pendulum
algo = a2c
seed = 42
max_episodes = 300

[frac]
alpha = 0.65
mu_variant = derivation
eta_variant = paper_literal
clipping = false

[ablation]
minibatch_off = yes
)");
  EXPECT_EQ(c.env, "pendulum");
  EXPECT_EQ(c.algo, tr::Algo::A2c);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.max_episodes, 300u);
  EXPECT_EQ(c.alpha, 0.65);
  EXPECT_EQ(c.mu_variant, td::MuVariant::Derivation);
  EXPECT_EQ(c.eta_variant, td::EtaVariant::PaperLiteral);
  EXPECT_FALSE(c.clipping);
  EXPECT_TRUE(c.ablations.minibatch_off);
  EXPECT_EQ(c.gamma, 0.95);  // pendulum default
  EXPECT_EQ(c.minibatch, tr::TrainConfig{}.minibatch);
}

TEST(Config, RoundTripIsExact) {
  auto c = tr::default_config("mountaincarcontinuous");
  c.alpha = 0.1 + 0.2;  // not representable in few digits
  c.beta_theta = 1.0 / 3.0;
  c.seed = 18446744073709551615ull;
  c.lr_accumulation = tr::LrAccumulation::Run;
  c.value_update = tr::ValueUpdate::AsPrinted;
  c.ablations.recursion_off = true;
  c.record_wall_time = true;
  const auto text = cfg::config_to_string(c);
  const auto back = cfg::parse_config_string(text);
  EXPECT_EQ(cfg::config_to_string(back), text);
  EXPECT_EQ(back.alpha, c.alpha);
  EXPECT_EQ(back.beta_theta, c.beta_theta);
  EXPECT_EQ(back.seed, c.seed);
}

TEST(Config, UnknownKeyIsHardErrorWithLine) {
  try {
    cfg::parse_config_string("[run]\nenv = cartpole\n\n[frac]\nalpah = 0.5\n");
    FAIL() << "expected ConfigError";
  } catch (const cfg::ConfigError& e) {
    EXPECT_EQ(e.line(), 5u);
    EXPECT_EQ(e.key(), "alpah");
    EXPECT_NE(std::string(e.what()).find(":5"), std::string::npos);
  }
}

TEST(Config, OtherErrors) {
  EXPECT_THROW(cfg::parse_config_string("[bogus]\n"), cfg::ConfigError);
  EXPECT_THROW(cfg::parse_config_string("env = cartpole\n"), cfg::ConfigError);
  EXPECT_THROW(cfg::parse_config_string("[run]\nenv cartpole\n"), cfg::ConfigError);
  EXPECT_THROW(cfg::parse_config_string("[run]\nseed = -3\n"), cfg::ConfigError);
  EXPECT_THROW(cfg::parse_config_string("[train]\ngamma = 0.9x\n"), cfg::ConfigError);
  EXPECT_THROW(cfg::parse_config_string("[train]\ngamma = 1.5\n"), cfg::ConfigError);
  EXPECT_THROW(cfg::parse_config_string("[run]\nseed = 1\nseed = 2\n"), cfg::ConfigError);
  EXPECT_THROW(cfg::parse_config_string("[run]\nenv = hopper\n"), cfg::ConfigError);
  EXPECT_THROW(cfg::parse_config_string("[frac]\nclipping = maybe\n"), cfg::ConfigError);
  EXPECT_THROW(cfg::parse_config_string("[run\n"), cfg::ConfigError);
  EXPECT_THROW(cfg::load_config("/nonexistent/x.cfg"), cfg::ConfigError);
}

TEST(Manifest, IsAValidConfigAndKeepsMetadata) {
  cfg::RunManifest m;
  m.config = tr::default_config("cartpole");
  m.config.seed = 7;
  m.tool_version = cfg::tool_version();
  m.timestamp = cfg::utc_timestamp();
  m.artifacts = {{"metrics", "metrics.csv"}, {"checkpoint", "checkpoint.csv"}};
  std::stringstream io;
  cfg::write_manifest(io, m);
  const std::string text = io.str();

  const auto c = cfg::parse_config_string(text);
  EXPECT_EQ(cfg::config_to_string(c), cfg::config_to_string(m.config));

  std::istringstream in(text);
  const auto back = cfg::read_manifest(in);
  EXPECT_EQ(back.tool_version, m.tool_version);
  EXPECT_EQ(back.timestamp, m.timestamp);
  EXPECT_EQ(back.artifacts, m.artifacts);
  EXPECT_EQ(back.config.seed, 7u);
}

TEST(Config, OutputRootFromEnvironment) {
  ::setenv("FPG_OUTPUT_ROOT", "/tmp/fpg-out", 1);
  EXPECT_EQ(cfg::default_output_root(), "/tmp/fpg-out");
  ::unsetenv("FPG_OUTPUT_ROOT");
  EXPECT_EQ(cfg::default_output_root(), "runs");
}

TEST(Config, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1e-8, 3.0000000000000004, 123456.789, -0.7}) {
    EXPECT_EQ(std::stod(cfg::format_double(v)), v);
  }
}
