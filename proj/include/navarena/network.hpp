#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace navarena {

/// Layer widths of the actor-critic: FC(input->hidden1), FC(hidden1->hidden2),
/// GRU(hidden2->gru), then a K-way actor head and a scalar critic head on the
/// shared GRU output.
struct NetworkShape {
  int input = 346;
  int hidden1 = 128;
  int hidden2 = 64;
  int gru = 64;
  int actions = 7;

  bool operator==(const NetworkShape&) const = default;
  void validate() const;
};

enum class Tensor : int {
  kFc1W,
  kFc1B,
  kFc2W,
  kFc2B,
  kGruWih,  // 3G x H2, gate rows ordered [reset, update, candidate]
  kGruWhh,  // 3G x G
  kGruBih,
  kGruBhh,
  kActorW,
  kActorB,
  kCriticW,
  kCriticB,
  kCount
};

inline constexpr std::size_t kTensorCount = static_cast<std::size_t>(Tensor::kCount);

std::string_view tensor_name(Tensor t);

struct TensorSpec {
  int rows = 0;
  int cols = 0;
  std::size_t offset = 0;
  std::size_t size() const { return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols); }
};

class ShapeMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// All weights and biases in one contiguous column-major buffer. The same type
/// holds gradients.
class NetworkParams {
 public:
  using MatMap = Eigen::Map<Eigen::MatrixXd>;
  using ConstMatMap = Eigen::Map<const Eigen::MatrixXd>;

  NetworkParams() = default;
  /// Zero-filled parameters.
  explicit NetworkParams(const NetworkShape& shape);

  /// Glorot-uniform FC layers, PyTorch-style GRU init, near-zero actor head.
  static NetworkParams random(const NetworkShape& shape, std::uint64_t seed);

  const NetworkShape& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  const TensorSpec& spec(Tensor t) const { return layout_[static_cast<std::size_t>(t)]; }

  MatMap tensor(Tensor t);
  ConstMatMap tensor(Tensor t) const;

  void set_zero();
  double squared_norm() const;
  void scale(double s);
  void add(const NetworkParams& other);

  bool operator==(const NetworkParams& o) const { return shape_ == o.shape_ && data_ == o.data_; }

 private:
  NetworkShape shape_;
  std::array<TensorSpec, kTensorCount> layout_{};
  std::vector<double> data_;
};

using HiddenState = Eigen::VectorXd;

HiddenState zero_hidden(const NetworkShape& shape);

struct ForwardResult {
  Eigen::VectorXd logits;
  double value = 0.0;
  HiddenState hidden;
};

/// relu(FC1) -> relu(FC2) -> GRU cell -> actor/critic heads.
ForwardResult forward(const NetworkParams& params, std::span<const double> input,
                      const HiddenState& hidden);

Eigen::VectorXd softmax(const Eigen::VectorXd& logits);
Eigen::VectorXd log_softmax(const Eigen::VectorXd& logits);

/// Activations of a T-step unroll, kept for backpropagation.
struct Unroll {
  Eigen::MatrixXd inputs;   // In x T
  Eigen::MatrixXd a1;       // H1 x T (post-relu)
  Eigen::MatrixXd a2;       // H2 x T (post-relu)
  Eigen::MatrixXd reset;    // G x T
  Eigen::MatrixXd update;   // G x T
  Eigen::MatrixXd cand;     // G x T
  Eigen::MatrixXd hh_cand;  // G x T, W_hn h + b_hn
  Eigen::MatrixXd hidden;   // G x (T+1), column 0 is the initial state
  Eigen::MatrixXd logits;   // K x T
  Eigen::VectorXd values;   // T

  int steps() const { return static_cast<int>(values.size()); }
};

Unroll unroll(const NetworkParams& params, const Eigen::MatrixXd& inputs, const HiddenState& h0);

/// Accumulates dL/dparams into `grad` given dL/dlogits (K x T) and dL/dvalue
/// (T), backpropagating through the GRU over all T steps. The initial hidden
/// state is treated as a constant.
void backprop(const NetworkParams& params, const Unroll& u, const Eigen::MatrixXd& dlogits,
              const Eigen::VectorXd& dvalues, NetworkParams& grad);

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Versioned binary container: magic, shape header, little-endian float64 payload.
void save_params(const NetworkParams& params, const std::filesystem::path& path);
NetworkParams load_params(const std::filesystem::path& path);
std::vector<std::uint8_t> serialize_params(const NetworkParams& params);
NetworkParams deserialize_params(std::span<const std::uint8_t> bytes);

}  // namespace navarena
