#include "navarena/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace navarena {

void TrainConfig::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
  if (!(learning_rate > 0.0) || !(adam_epsilon > 0.0)) {
    throw std::invalid_argument("learning rate and Adam epsilon must be positive");
  }
  if (n_workers < 1) throw std::invalid_argument("need at least one worker");
  if (rollout_length < 1 || max_episode_steps < 1 || batch_size < 1) {
    throw std::invalid_argument("rollout, episode and batch lengths must be positive");
  }
  if (total_steps < 0) throw std::invalid_argument("step budget must be non-negative");
  if (!(max_wall_seconds >= 0.0)) throw std::invalid_argument("max_wall_seconds must be non-negative");
  if (entropy_beta < 0.0 || value_coef < 0.0) throw std::invalid_argument("loss weights must be >= 0");
  if (!(gae_lambda >= 0.0 && gae_lambda <= 1.0)) throw std::invalid_argument("lambda must be in [0, 1]");
  if (curriculum.step < 1 || curriculum.window < 1 || curriculum.max_obstacles < 0 ||
      curriculum.initial_obstacles < 0 || curriculum.initial_obstacles > curriculum.max_obstacles) {
    throw std::invalid_argument("invalid curriculum parameters");
  }
  if (curriculum.down_threshold > curriculum.up_threshold) {
    throw std::invalid_argument("curriculum down threshold above up threshold");
  }
  network.validate();
}

std::vector<double> discounted_returns(std::span<const double> rewards, double bootstrap,
                                       double gamma, bool terminal) {
  if (rewards.empty()) throw std::invalid_argument("rewards must be non-empty");
  std::vector<double> out(rewards.size());
  double running = terminal ? 0.0 : bootstrap;
  for (std::size_t i = rewards.size(); i-- > 0;) {
    running = rewards[i] + gamma * running;
    out[i] = running;
  }
  return out;
}

std::vector<double> gae_advantages(std::span<const double> rewards, std::span<const double> values,
                                   double bootstrap, double gamma, double lambda, bool terminal) {
  if (rewards.empty() || rewards.size() != values.size()) {
    throw std::invalid_argument("rewards and values must be non-empty and aligned");
  }
  std::vector<double> adv(rewards.size());
  double next_value = terminal ? 0.0 : bootstrap;
  double running = 0.0;
  for (std::size_t i = rewards.size(); i-- > 0;) {
    const double delta = rewards[i] + gamma * next_value - values[i];
    running = delta + gamma * lambda * running;
    adv[i] = running;
    next_value = values[i];
  }
  return adv;
}

GradientResult compute_gradients(const NetworkParams& params, const Trajectory& traj,
                                 const TrainConfig& cfg) {
  const auto& steps = traj.steps;
  if (steps.empty()) throw std::invalid_argument("empty trajectory");
  const NetworkShape& shape = params.shape();
  const auto n = static_cast<Eigen::Index>(steps.size());
  const double inv_n = 1.0 / static_cast<double>(n);

  Eigen::MatrixXd inputs(shape.input, n);
  std::vector<double> rewards(steps.size());
  for (Eigen::Index t = 0; t < n; ++t) {
    const auto& s = steps[static_cast<std::size_t>(t)];
    if (static_cast<int>(s.input.size()) != shape.input) {
      throw ShapeMismatchError("trajectory input size does not match network");
    }
    if (s.action < 0 || s.action >= shape.actions) throw std::out_of_range("action index");
    inputs.col(t) = Eigen::Map<const Eigen::VectorXd>(s.input.data(), shape.input);
    rewards[static_cast<std::size_t>(t)] = s.reward;
  }
  const Unroll u = unroll(params, inputs, steps.front().hidden_in);

  std::vector<double> values(u.values.data(), u.values.data() + n);
  std::vector<double> returns = discounted_returns(rewards, traj.bootstrap_value, cfg.gamma,
                                                   traj.terminal());
  std::vector<double> advantages(steps.size());
  if (cfg.use_gae) {
    advantages = gae_advantages(rewards, values, traj.bootstrap_value, cfg.gamma, cfg.gae_lambda,
                                traj.terminal());
    for (std::size_t i = 0; i < steps.size(); ++i) returns[i] = advantages[i] + values[i];
  } else {
    for (std::size_t i = 0; i < steps.size(); ++i) advantages[i] = returns[i] - values[i];
  }

  GradientResult out{NetworkParams(shape), {}};
  LossReport& rep = out.report;
  Eigen::MatrixXd dlogits(shape.actions, n);
  Eigen::VectorXd dvalues(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    const auto ti = static_cast<std::size_t>(t);
    const Eigen::VectorXd logits = u.logits.col(t);
    const Eigen::VectorXd logp = log_softmax(logits);
    const Eigen::VectorXd p = logp.array().exp().matrix();
    const double entropy = -(p.array() * logp.array()).sum();
    const double adv = advantages[ti];
    const int a = steps[ti].action;

    rep.policy_loss += -logp(a) * adv * inv_n;
    rep.entropy += entropy * inv_n;
    Eigen::VectorXd d = p * (adv * inv_n);
    d(a) -= adv * inv_n;
    d += (cfg.entropy_beta * inv_n) * (p.array() * (logp.array() + entropy)).matrix();
    dlogits.col(t) = d;

    const double v = values[ti];
    const double r = returns[ti];
    double sq = (v - r) * (v - r);
    double dv = 2.0 * (v - r);
    if (cfg.clip_value_loss) {
      const double v_old = steps[ti].value;
      const double delta = std::clamp(v - v_old, -cfg.value_clip_range, cfg.value_clip_range);
      const double v_clip = v_old + delta;
      const double sq_clip = (v_clip - r) * (v_clip - r);
      if (sq_clip > sq) {
        sq = sq_clip;
        dv = std::abs(v - v_old) < cfg.value_clip_range ? 2.0 * (v_clip - r) : 0.0;
      }
    }
    rep.value_loss += sq * inv_n;
    dvalues(t) = cfg.value_coef * dv * inv_n;
  }
  rep.total_loss = rep.policy_loss + cfg.value_coef * rep.value_loss - cfg.entropy_beta * rep.entropy;
  if (!std::isfinite(rep.total_loss)) {
    throw NonFiniteLossError("non-finite loss: policy=" + std::to_string(rep.policy_loss) +
                                 " value=" + std::to_string(rep.value_loss) +
                                 " entropy=" + std::to_string(rep.entropy),
                             rep);
  }
  backprop(params, u, dlogits, dvalues, out.gradient);
  rep.grad_norm = std::sqrt(out.gradient.squared_norm());
  if (!std::isfinite(rep.grad_norm)) throw NonFiniteLossError("non-finite gradient", rep);
  if (cfg.max_gradient_norm > 0.0 && rep.grad_norm > cfg.max_gradient_norm) {
    out.gradient.scale(cfg.max_gradient_norm / rep.grad_norm);
    rep.clipped = true;
  }
  return out;
}

Adam::Adam(std::size_t n, double learning_rate, double beta1, double beta2, double epsilon)
    : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(epsilon), m_(n, 0.0), v_(n, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    throw std::invalid_argument("Adam state size mismatch");
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    const double m_hat = m_[i] / c1;
    const double v_hat = v_[i] / c2;
    params[i] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
  }
}

CurriculumState::CurriculumState(const CurriculumParams& params)
    : params_(params), obstacles_(params.initial_obstacles) {}

double CurriculumState::success_average() const {
  if (recent_.empty()) return 0.0;
  const auto wins = std::count(recent_.begin(), recent_.end(), true);
  return static_cast<double>(wins) / static_cast<double>(recent_.size());
}

bool CurriculumState::update(bool success) {
  recent_.push_back(success);
  while (static_cast<int>(recent_.size()) > params_.window) recent_.pop_front();
  if (static_cast<int>(recent_.size()) < params_.window) return false;
  const double avg = success_average();
  int next = obstacles_;
  if (avg >= params_.up_threshold) {
    next = std::min(params_.max_obstacles, obstacles_ + params_.step);
  } else if (avg <= params_.down_threshold) {
    next = std::max(0, obstacles_ - params_.step);
  }
  if (next == obstacles_) return false;
  obstacles_ = next;
  recent_.clear();
  return true;
}

}  // namespace navarena
