#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numbers>

#include "gradcheck.hpp"
#include "navarena/network.hpp"
#include "navarena/observation.hpp"
#include "navarena/reward.hpp"
#include "navarena/training.hpp"
#include "reward_cases.hpp"
#include "test_util.hpp"

using namespace navarena;

TEST(Observation, OpenScanIsAllOnes) {
  LidarScan s;
  s.range_max = 3.5;
  s.angle_increment = 2 * std::numbers::pi / 360;
  s.ranges.assign(360, 3.5);
  RobotState r;
  const Observation o = build_observation(s, r, {1.0, 0.0});
  ASSERT_EQ(o.lidar.size(), 344u);
  for (double v : o.lidar) EXPECT_EQ(v, 1.0);
  EXPECT_DOUBLE_EQ(o.goal_distance, 1.0);
  EXPECT_DOUBLE_EQ(o.goal_angle, 0.0);
  EXPECT_EQ(o.to_input().size(), static_cast<std::size_t>(kObservationSize));
}

TEST(Observation, SubgoalInRobotFrame) {
  LidarScan s;
  s.range_max = 3.5;
  s.ranges.assign(344, 3.5);
  RobotState r;
  r.x = 1.0;
  r.y = 1.0;
  r.theta = std::numbers::pi / 2;
  const Observation o = build_observation(s, r, {0.0, 1.0});  // to the robot's left
  EXPECT_NEAR(o.goal_distance, 1.0, 1e-15);
  EXPECT_NEAR(o.goal_angle, std::numbers::pi / 2, 1e-15);
  const Observation back = build_observation(s, r, {1.0, 0.0});
  EXPECT_NEAR(back.goal_angle, std::numbers::pi, 1e-15);
}

TEST(Observation, MinPoolingMatchesBruteForce) {
  LidarScan s;
  s.range_max = 4.0;
  s.ranges.assign(688, 4.0);
  s.ranges[301] = 2.0;
  const Observation o = build_observation(s, RobotState{}, {1.0, 0.0});
  int half = 0;
  for (double v : o.lidar) {
    if (v == 0.5) ++half;
    else EXPECT_EQ(v, 1.0);
  }
  EXPECT_EQ(half, 1);

  // Uneven beam counts: each bin is the min over beams i with floor(i*344/n) == bin.
  Rng rng(6);
  for (int n : {344, 360, 500, 1000}) {
    s.ranges.resize(static_cast<std::size_t>(n));
    for (double& v : s.ranges) v = uniform(rng, 0.0, 4.0);
    const Observation p = build_observation(s, RobotState{}, {1.0, 0.0});
    for (int b = 0; b < kLidarBins; ++b) {
      double m = 4.0;
      for (int i = 0; i < n; ++i) {
        if (i * kLidarBins / n == b) m = std::min(m, s.ranges[static_cast<std::size_t>(i)]);
      }
      EXPECT_EQ(p.lidar[static_cast<std::size_t>(b)], m / 4.0);
    }
  }
}

TEST(Observation, TooFewBeamsRejected) {
  LidarScan s;
  s.range_max = 3.5;
  s.ranges.assign(343, 3.5);
  EXPECT_THROW(build_observation(s, RobotState{}, {1.0, 0.0}), std::invalid_argument);
}

TEST(Reward, TwentyCaseTable) {
  const RewardParams params;
  for (const auto& c : testutil::kRewardCases) {
    const RewardBreakdown r = compute_reward(c.prev, c.curr, params);
    EXPECT_NEAR(r.total, c.expected, 1e-12) << c.name;
    EXPECT_EQ(r.total, r.r_s + r.r_c + r.r_d + r.r_p + r.r_m) << c.name;
    EXPECT_TRUE(r.r_s == 0.0 || r.r_s == 15.0);
    EXPECT_TRUE(r.r_c == 0.0 || r.r_c == -10.0);
    EXPECT_TRUE(r.r_d == 0.0 || r.r_d == -0.15);
    EXPECT_TRUE(r.r_m == 0.0 || r.r_m == -0.01);
  }
}

TEST(Reward, DocumentedExamples) {
  const RewardParams p;
  StepSnapshot prev{0.32, 1.0, 0.0}, curr{0.30, 1.0, 0.02, false, true};
  EXPECT_NEAR(compute_reward(prev, curr, p).total, 15.005, 1e-12);
  curr = {0.4, 0.1, 0.02, true, false};
  EXPECT_EQ(compute_reward(prev, curr, p).r_c, -10.0);
  prev = curr = {3.0, 3.0, 0.0};
  EXPECT_EQ(compute_reward(prev, curr, p).total, -0.01);
  prev = {1.0, 3.0, 0.0};
  curr = {1.1, 3.0, 0.1};
  EXPECT_NEAR(compute_reward(prev, curr, p).r_p, -0.04, 1e-12);
}

namespace {

double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Scalar-loop forward pass reading weights element by element.
ForwardResult scalar_forward(const NetworkParams& p, const std::vector<double>& x,
                             const HiddenState& h) {
  const NetworkShape& s = p.shape();
  auto W = [&](Tensor t, int r, int c) { return p.tensor(t)(r, c); };
  std::vector<double> a1(s.hidden1), a2(s.hidden2);
  for (int i = 0; i < s.hidden1; ++i) {
    double acc = W(Tensor::kFc1B, i, 0);
    for (int j = 0; j < s.input; ++j) acc += W(Tensor::kFc1W, i, j) * x[j];
    a1[i] = acc > 0 ? acc : 0.0;
  }
  for (int i = 0; i < s.hidden2; ++i) {
    double acc = W(Tensor::kFc2B, i, 0);
    for (int j = 0; j < s.hidden1; ++j) acc += W(Tensor::kFc2W, i, j) * a1[j];
    a2[i] = acc > 0 ? acc : 0.0;
  }
  const int g = s.gru;
  auto gate_in = [&](int row) {
    double acc = W(Tensor::kGruBih, row, 0);
    for (int j = 0; j < s.hidden2; ++j) acc += W(Tensor::kGruWih, row, j) * a2[j];
    return acc;
  };
  auto gate_h = [&](int row) {
    double acc = W(Tensor::kGruBhh, row, 0);
    for (int j = 0; j < g; ++j) acc += W(Tensor::kGruWhh, row, j) * h(j);
    return acc;
  };
  ForwardResult out;
  out.hidden.resize(g);
  for (int i = 0; i < g; ++i) {
    const double r = sig(gate_in(i) + gate_h(i));
    const double z = sig(gate_in(g + i) + gate_h(g + i));
    const double n = std::tanh(gate_in(2 * g + i) + r * gate_h(2 * g + i));
    out.hidden(i) = (1 - z) * n + z * h(i);
  }
  out.logits.resize(s.actions);
  for (int k = 0; k < s.actions; ++k) {
    double acc = W(Tensor::kActorB, k, 0);
    for (int j = 0; j < g; ++j) acc += W(Tensor::kActorW, k, j) * out.hidden(j);
    out.logits(k) = acc;
  }
  out.value = W(Tensor::kCriticB, 0, 0);
  for (int j = 0; j < g; ++j) out.value += W(Tensor::kCriticW, 0, j) * out.hidden(j);
  return out;
}

std::vector<double> random_input(int n, Rng& rng) {
  std::vector<double> x(static_cast<std::size_t>(n));
  for (double& v : x) v = uniform(rng, -1.0, 1.0);
  return x;
}

}  // namespace

TEST(Network, ZeroParamsGiveZeroOutputs) {
  const NetworkParams p{NetworkShape{}};
  Rng rng(1);
  const ForwardResult f = forward(p, random_input(346, rng), zero_hidden(p.shape()));
  EXPECT_TRUE(f.logits.isZero(0.0));
  EXPECT_EQ(f.value, 0.0);
  EXPECT_TRUE(f.hidden.isZero(0.0));
}

TEST(Network, MatchesScalarOracle) {
  const NetworkParams p = NetworkParams::random(NetworkShape{}, 21);
  Rng rng(2);
  HiddenState h = zero_hidden(p.shape());
  HiddenState ho = h;
  for (int t = 0; t < 5; ++t) {
    const auto x = random_input(346, rng);
    const ForwardResult a = forward(p, x, h);
    const ForwardResult b = scalar_forward(p, x, ho);
    EXPECT_LE((a.logits - b.logits).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE((a.hidden - b.hidden).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_NEAR(a.value, b.value, 1e-10);
    h = a.hidden;
    ho = b.hidden;
  }
}

TEST(Network, UnrollMatchesRepeatedForward) {
  const NetworkShape s{8, 4, 4, 4, 3};
  const NetworkParams p = NetworkParams::random(s, 4);
  Rng rng(3);
  Eigen::MatrixXd in(8, 6);
  for (int t = 0; t < 6; ++t) {
    const auto x = random_input(8, rng);
    for (int i = 0; i < 8; ++i) in(i, t) = x[i];
  }
  const Unroll u = unroll(p, in, zero_hidden(s));
  HiddenState h = zero_hidden(s);
  for (int t = 0; t < 6; ++t) {
    std::vector<double> x(in.col(t).data(), in.col(t).data() + 8);
    const ForwardResult f = forward(p, x, h);
    EXPECT_LE((f.logits - u.logits.col(t)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(f.value, u.values(t), 1e-12);
    h = f.hidden;
  }
}

TEST(Network, SoftmaxNormalizedAndGruBounded) {
  Rng rng(8);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    NetworkParams p = NetworkParams::random(NetworkShape{}, seed);
    HiddenState h = zero_hidden(p.shape());
    for (int t = 0; t < 10; ++t) {
      const ForwardResult f = forward(p, random_input(346, rng), h);
      EXPECT_NEAR(softmax(f.logits).sum(), 1.0, 1e-9);
      EXPECT_LT(f.hidden.cwiseAbs().maxCoeff(), 1.0);
      h = f.hidden;
    }
    // Large weights saturate tanh to +-1 in double precision but never beyond.
    for (double& w : p.data()) w *= 5.0;
    for (int t = 0; t < 10; ++t) {
      auto x = random_input(346, rng);
      for (double& v : x) v *= 10.0;
      const ForwardResult f = forward(p, x, h);
      EXPECT_NEAR(softmax(f.logits).sum(), 1.0, 1e-9);
      EXPECT_LE(f.hidden.cwiseAbs().maxCoeff(), 1.0);
      h = f.hidden;
    }
  }
  Eigen::VectorXd big(3);
  big << 1000.0, 0.0, -1000.0;
  EXPECT_NEAR(softmax(big)(0), 1.0, 1e-15);
  EXPECT_TRUE(log_softmax(big).allFinite());
}

TEST(Network, ShapeMismatchRejected) {
  const NetworkParams p{NetworkShape{}};
  EXPECT_THROW(forward(p, std::vector<double>(10, 0.0), zero_hidden(p.shape())), ShapeMismatchError);
  EXPECT_THROW(forward(p, std::vector<double>(346, 0.0), HiddenState::Zero(3)), ShapeMismatchError);
  EXPECT_THROW((NetworkShape{346, 128, 64, 64, 1}.validate()), ShapeMismatchError);
}

TEST(Checkpoint, RoundTripIsBitExact) {
  const NetworkParams p = NetworkParams::random(NetworkShape{}, 13);
  const auto dir = testutil::scratch_dir("ckpt");
  save_params(p, dir / "p.ckpt");
  const NetworkParams q = load_params(dir / "p.ckpt");
  EXPECT_TRUE(p == q);
  Rng rng(1);
  const auto x = random_input(346, rng);
  EXPECT_EQ(forward(p, x, zero_hidden(p.shape())).logits, forward(q, x, zero_hidden(q.shape())).logits);
}

TEST(Checkpoint, CorruptInputsRejected) {
  const NetworkParams p = NetworkParams::random(NetworkShape{8, 4, 4, 4, 3}, 1);
  auto bytes = serialize_params(p);
  EXPECT_TRUE(deserialize_params(bytes) == p);
  auto truncated = bytes;
  truncated.resize(bytes.size() - 5);
  EXPECT_THROW(deserialize_params(truncated), CheckpointError);
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(deserialize_params(bad_magic), CheckpointError);
  auto padded = bytes;
  padded.push_back(0);
  EXPECT_THROW(deserialize_params(padded), CheckpointError);
  EXPECT_THROW(load_params("/nonexistent/p.ckpt"), CheckpointError);
}

TEST(Returns, ClosedForms) {
  const std::vector<double> ones{1, 1, 1};
  const auto a = discounted_returns(ones, 123.0, 0.99, true);
  EXPECT_NEAR(a[0], 2.9701, 1e-12);
  EXPECT_NEAR(a[1], 1.99, 1e-12);
  EXPECT_NEAR(a[2], 1.0, 1e-12);
  EXPECT_NEAR(discounted_returns(std::vector<double>{0.0}, 5.0, 0.9, false)[0], 4.5, 1e-12);
  const std::vector<double> r{0.3, -1.0, 2.0};
  EXPECT_EQ(discounted_returns(r, 7.0, 0.0, false), r);
  // Constant reward c over n steps: c (1 - g^n) / (1 - g).
  const std::vector<double> c(50, 0.7);
  const auto rc = discounted_returns(c, 0.0, 0.95, true);
  for (std::size_t t = 0; t < c.size(); ++t) {
    EXPECT_NEAR(rc[t], 0.7 * (1 - std::pow(0.95, 50 - t)) / 0.05, 1e-12);
  }
  EXPECT_THROW(discounted_returns(std::vector<double>{}, 0.0, 0.9, true), std::invalid_argument);
}

TEST(Returns, GaeWithUnitLambdaEqualsReturnMinusValue) {
  const std::vector<double> r{0.5, -0.2, 1.0, 0.1};
  const std::vector<double> v{0.3, 0.1, -0.4, 0.9};
  const auto ret = discounted_returns(r, 2.0, 0.9, false);
  const auto adv = gae_advantages(r, v, 2.0, 0.9, 1.0, false);
  for (std::size_t t = 0; t < r.size(); ++t) EXPECT_NEAR(adv[t], ret[t] - v[t], 1e-12);
  const auto one_step = gae_advantages(r, v, 2.0, 0.9, 0.0, false);
  EXPECT_NEAR(one_step[1], r[1] + 0.9 * v[2] - v[1], 1e-12);
  EXPECT_NEAR(one_step[3], r[3] + 0.9 * 2.0 - v[3], 1e-12);
}

TEST(Gradients, MatchCentralFiniteDifferences) {
  for (std::uint64_t seed : {3u, 4u, 5u}) {
    const auto r = testutil::gradient_check(seed);
    EXPECT_LT(r.max_rel_error, 1e-3) << "seed " << seed << " index " << r.worst_index;
  }
}

namespace {

Trajectory small_trajectory(const NetworkParams& p, Rng& rng, int length) {
  Trajectory tr;
  HiddenState h = zero_hidden(p.shape());
  for (int t = 0; t < length; ++t) {
    TrajectoryStep st;
    st.input = random_input(p.shape().input, rng);
    st.hidden_in = h;
    st.action = t % p.shape().actions;
    st.reward = uniform(rng, -5.0, 5.0);
    const ForwardResult f = forward(p, st.input, h);
    h = f.hidden;
    st.value = f.value;
    tr.steps.push_back(std::move(st));
  }
  return tr;
}

}  // namespace

TEST(Gradients, ZeroAdvantageLeavesOnlyValueTerm) {
  const NetworkShape s{8, 4, 4, 4, 3};
  const NetworkParams p = NetworkParams::random(s, 2);
  Rng rng(5);
  Trajectory tr = small_trajectory(p, rng, 1);
  tr.steps[0].terminal = true;
  tr.steps[0].reward = tr.steps[0].value;  // R == V
  TrainConfig cfg;
  cfg.network = s;
  cfg.entropy_beta = 0.0;
  cfg.max_gradient_norm = 0.0;
  const GradientResult g = compute_gradients(p, tr, cfg);
  EXPECT_NEAR(g.report.policy_loss, 0.0, 1e-15);
  EXPECT_NEAR(std::sqrt(g.gradient.squared_norm()), 0.0, 1e-12);
}

TEST(Gradients, ClippedToMaxNorm) {
  const NetworkParams p = NetworkParams::random(NetworkShape{}, 6);
  Rng rng(6);
  const Trajectory tr = small_trajectory(p, rng, 8);
  TrainConfig cfg;
  const GradientResult g = compute_gradients(p, tr, cfg);
  ASSERT_TRUE(g.report.clipped);
  EXPECT_GT(g.report.grad_norm, 0.5);
  EXPECT_NEAR(std::sqrt(g.gradient.squared_norm()), 0.5, 1e-12);
}

TEST(Gradients, NonFiniteLossReported) {
  const NetworkShape s{8, 4, 4, 4, 3};
  const NetworkParams p = NetworkParams::random(s, 2);
  Rng rng(5);
  Trajectory tr = small_trajectory(p, rng, 2);
  tr.steps[1].reward = std::numeric_limits<double>::quiet_NaN();
  TrainConfig cfg;
  cfg.network = s;
  EXPECT_THROW(compute_gradients(p, tr, cfg), NonFiniteLossError);
}

TEST(Adam, ScalarOracle) {
  const double lr = 0.00025, b1 = 0.9, b2 = 0.999, eps = 1e-5;
  Adam opt(2, lr, b1, b2, eps);
  std::vector<double> w{1.0, -2.0};
  const std::vector<double> g1{0.5, -3.0};
  opt.step(w, g1);
  // First step: m_hat = g, v_hat = g^2, so the move is lr * g / (|g| + eps).
  EXPECT_NEAR(w[0], 1.0 - lr * 0.5 / (0.5 + eps), 1e-10);
  EXPECT_NEAR(w[1], -2.0 + lr * 3.0 / (3.0 + eps), 1e-10);
  const double w0 = w[0];
  const std::vector<double> g2{-1.0, 0.0};
  opt.step(w, g2);
  const double m = (b1 * (1 - b1) * 0.5 + (1 - b1) * -1.0) / (1 - b1 * b1);
  const double v = (b2 * (1 - b2) * 0.25 + (1 - b2) * 1.0) / (1 - b2 * b2);
  EXPECT_NEAR(w[0], w0 - lr * m / (std::sqrt(v) + eps), 1e-10);
  EXPECT_EQ(opt.steps(), 2);
}

TEST(Curriculum, PromotionFloorAndHysteresis) {
  CurriculumState up{CurriculumParams{}};
  for (int i = 0; i < 99; ++i) EXPECT_FALSE(up.update(true));
  EXPECT_TRUE(up.update(true));
  EXPECT_EQ(up.obstacles(), 2);
  EXPECT_EQ(up.recorded(), 0u);

  CurriculumState floor{CurriculumParams{}};
  for (int i = 0; i < 100; ++i) floor.update(false);
  EXPECT_EQ(floor.obstacles(), 0);

  CurriculumParams cp;
  cp.initial_obstacles = 6;
  CurriculumState band{cp};
  for (int i = 0; i < 300; ++i) band.update(i % 5 < 3);  // 60 %
  EXPECT_EQ(band.obstacles(), 6);
  EXPECT_NEAR(band.success_average(), 0.6, 1e-12);

  CurriculumState down{cp};
  for (int i = 0; i < 100; ++i) down.update(i % 5 == 0);  // 20 %
  EXPECT_EQ(down.obstacles(), 4);

  cp.initial_obstacles = 16;
  CurriculumState cap{cp};
  for (int i = 0; i < 200; ++i) EXPECT_FALSE(cap.update(true));
  EXPECT_EQ(cap.obstacles(), 16);
  EXPECT_TRUE(cap.at_max());
}

TEST(TrainConfig, Validation) {
  TrainConfig c;
  EXPECT_NO_THROW(c.validate());
  c.gamma = 1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = TrainConfig{};
  c.curriculum.down_threshold = 0.9;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}
