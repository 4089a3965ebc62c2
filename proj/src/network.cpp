#include "navarena/network.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "navarena/random.hpp"

namespace navarena {

void NetworkShape::validate() const {
  if (input < 1 || hidden1 < 1 || hidden2 < 1 || gru < 1 || actions < 2) {
    throw ShapeMismatchError("network layer sizes must be positive (actions >= 2)");
  }
}

std::string_view tensor_name(Tensor t) {
  static constexpr std::array<std::string_view, kTensorCount> kNames = {
      "fc1.weight", "fc1.bias",  "fc2.weight",   "fc2.bias",     "gru.weight_ih", "gru.weight_hh",
      "gru.bias_ih", "gru.bias_hh", "actor.weight", "actor.bias", "critic.weight", "critic.bias"};
  return kNames[static_cast<std::size_t>(t)];
}

NetworkParams::NetworkParams(const NetworkShape& shape) : shape_(shape) {
  shape.validate();
  const int g3 = 3 * shape.gru;
  const std::array<std::pair<int, int>, kTensorCount> dims = {{
      {shape.hidden1, shape.input},
      {shape.hidden1, 1},
      {shape.hidden2, shape.hidden1},
      {shape.hidden2, 1},
      {g3, shape.hidden2},
      {g3, shape.gru},
      {g3, 1},
      {g3, 1},
      {shape.actions, shape.gru},
      {shape.actions, 1},
      {1, shape.gru},
      {1, 1},
  }};
  std::size_t offset = 0;
  for (std::size_t i = 0; i < kTensorCount; ++i) {
    layout_[i] = {dims[i].first, dims[i].second, offset};
    offset += layout_[i].size();
  }
  data_.assign(offset, 0.0);
}

NetworkParams::MatMap NetworkParams::tensor(Tensor t) {
  const auto& s = spec(t);
  return MatMap(data_.data() + s.offset, s.rows, s.cols);
}

NetworkParams::ConstMatMap NetworkParams::tensor(Tensor t) const {
  const auto& s = spec(t);
  return ConstMatMap(data_.data() + s.offset, s.rows, s.cols);
}

void NetworkParams::set_zero() { std::fill(data_.begin(), data_.end(), 0.0); }

double NetworkParams::squared_norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return s;
}

void NetworkParams::scale(double s) {
  for (double& v : data_) v *= s;
}

void NetworkParams::add(const NetworkParams& other) {
  if (!(shape_ == other.shape_)) throw ShapeMismatchError("adding parameters of different shape");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
}

NetworkParams NetworkParams::random(const NetworkShape& shape, std::uint64_t seed) {
  NetworkParams p(shape);
  Rng rng(seed);
  auto fill_uniform = [&](Tensor t, double bound) {
    auto m = p.tensor(t);
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = uniform(rng, -bound, bound);
    }
  };
  auto glorot = [](int fan_in, int fan_out) { return std::sqrt(6.0 / (fan_in + fan_out)); };
  fill_uniform(Tensor::kFc1W, glorot(shape.input, shape.hidden1));
  fill_uniform(Tensor::kFc2W, glorot(shape.hidden1, shape.hidden2));
  const double gru_bound = 1.0 / std::sqrt(static_cast<double>(shape.gru));
  fill_uniform(Tensor::kGruWih, gru_bound);
  fill_uniform(Tensor::kGruWhh, gru_bound);
  fill_uniform(Tensor::kGruBih, gru_bound);
  fill_uniform(Tensor::kGruBhh, gru_bound);
  fill_uniform(Tensor::kActorW, 0.01 * glorot(shape.gru, shape.actions));
  fill_uniform(Tensor::kCriticW, glorot(shape.gru, 1));
  return p;
}

HiddenState zero_hidden(const NetworkShape& shape) { return HiddenState::Zero(shape.gru); }

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  const double m = logits.maxCoeff();
  Eigen::VectorXd e = (logits.array() - m).exp().matrix();
  return e / e.sum();
}

Eigen::VectorXd log_softmax(const Eigen::VectorXd& logits) {
  const double m = logits.maxCoeff();
  const double lse = m + std::log((logits.array() - m).exp().sum());
  return (logits.array() - lse).matrix();
}

ForwardResult forward(const NetworkParams& p, std::span<const double> input,
                      const HiddenState& h) {
  const NetworkShape& s = p.shape();
  if (static_cast<int>(input.size()) != s.input) {
    throw ShapeMismatchError("observation has " + std::to_string(input.size()) +
                             " values, network expects " + std::to_string(s.input));
  }
  if (h.size() != s.gru) throw ShapeMismatchError("hidden state size mismatch");
  const Eigen::Map<const Eigen::VectorXd> x(input.data(), s.input);
  const Eigen::VectorXd a1 =
      (p.tensor(Tensor::kFc1W) * x + p.tensor(Tensor::kFc1B)).cwiseMax(0.0);
  const Eigen::VectorXd a2 =
      (p.tensor(Tensor::kFc2W) * a1 + p.tensor(Tensor::kFc2B)).cwiseMax(0.0);
  const Eigen::VectorXd gi = p.tensor(Tensor::kGruWih) * a2 + p.tensor(Tensor::kGruBih);
  const Eigen::VectorXd gh = p.tensor(Tensor::kGruWhh) * h + p.tensor(Tensor::kGruBhh);
  const int g = s.gru;
  ForwardResult out;
  out.hidden.resize(g);
  for (int i = 0; i < g; ++i) {
    const double r = sigmoid(gi(i) + gh(i));
    const double z = sigmoid(gi(g + i) + gh(g + i));
    const double n = std::tanh(gi(2 * g + i) + r * gh(2 * g + i));
    out.hidden(i) = (1.0 - z) * n + z * h(i);
  }
  out.logits = p.tensor(Tensor::kActorW) * out.hidden + p.tensor(Tensor::kActorB);
  out.value = (p.tensor(Tensor::kCriticW) * out.hidden)(0) + p.tensor(Tensor::kCriticB)(0, 0);
  return out;
}

Unroll unroll(const NetworkParams& p, const Eigen::MatrixXd& inputs, const HiddenState& h0) {
  const NetworkShape& s = p.shape();
  if (inputs.rows() != s.input) throw ShapeMismatchError("unroll input rows mismatch");
  if (h0.size() != s.gru) throw ShapeMismatchError("hidden state size mismatch");
  const Eigen::Index steps = inputs.cols();
  const int g = s.gru;
  Unroll u;
  u.inputs = inputs;
  u.a1 = ((p.tensor(Tensor::kFc1W) * inputs).colwise() + p.tensor(Tensor::kFc1B).col(0))
             .cwiseMax(0.0);
  u.a2 = ((p.tensor(Tensor::kFc2W) * u.a1).colwise() + p.tensor(Tensor::kFc2B).col(0))
             .cwiseMax(0.0);
  const Eigen::MatrixXd gi =
      (p.tensor(Tensor::kGruWih) * u.a2).colwise() + p.tensor(Tensor::kGruBih).col(0);
  u.reset.resize(g, steps);
  u.update.resize(g, steps);
  u.cand.resize(g, steps);
  u.hh_cand.resize(g, steps);
  u.hidden.resize(g, steps + 1);
  u.hidden.col(0) = h0;
  const auto whh = p.tensor(Tensor::kGruWhh);
  const auto bhh = p.tensor(Tensor::kGruBhh).col(0);
  for (Eigen::Index t = 0; t < steps; ++t) {
    const Eigen::VectorXd h = u.hidden.col(t);
    const Eigen::VectorXd gh = whh * h + bhh;
    for (int i = 0; i < g; ++i) {
      const double r = sigmoid(gi(i, t) + gh(i));
      const double z = sigmoid(gi(g + i, t) + gh(g + i));
      const double n = std::tanh(gi(2 * g + i, t) + r * gh(2 * g + i));
      u.reset(i, t) = r;
      u.update(i, t) = z;
      u.cand(i, t) = n;
      u.hh_cand(i, t) = gh(2 * g + i);
      u.hidden(i, t + 1) = (1.0 - z) * n + z * h(i);
    }
  }
  const auto hout = u.hidden.rightCols(steps);
  u.logits = (p.tensor(Tensor::kActorW) * hout).colwise() + p.tensor(Tensor::kActorB).col(0);
  u.values = ((p.tensor(Tensor::kCriticW) * hout).array() + p.tensor(Tensor::kCriticB)(0, 0))
                 .matrix()
                 .transpose();
  return u;
}

void backprop(const NetworkParams& p, const Unroll& u, const Eigen::MatrixXd& dlogits,
              const Eigen::VectorXd& dvalues, NetworkParams& grad) {
  const NetworkShape& s = p.shape();
  if (!(grad.shape() == s)) throw ShapeMismatchError("gradient shape mismatch");
  const Eigen::Index steps = u.steps();
  if (dlogits.cols() != steps || dlogits.rows() != s.actions || dvalues.size() != steps) {
    throw ShapeMismatchError("loss gradient shape mismatch");
  }
  const int g = s.gru;
  const auto hout = u.hidden.rightCols(steps);
  const auto hprev = u.hidden.leftCols(steps);

  grad.tensor(Tensor::kActorW) += dlogits * hout.transpose();
  grad.tensor(Tensor::kActorB).col(0) += dlogits.rowwise().sum();
  grad.tensor(Tensor::kCriticW) += dvalues.transpose() * hout.transpose();
  grad.tensor(Tensor::kCriticB)(0, 0) += dvalues.sum();

  const auto wa = p.tensor(Tensor::kActorW);
  const auto wv = p.tensor(Tensor::kCriticW);
  const Eigen::MatrixXd dh_heads = wa.transpose() * dlogits + wv.transpose() * dvalues.transpose();

  const auto whh = p.tensor(Tensor::kGruWhh);
  Eigen::MatrixXd dgi(3 * g, steps);
  Eigen::MatrixXd dgh(3 * g, steps);
  Eigen::VectorXd carry = Eigen::VectorXd::Zero(g);
  for (Eigen::Index t = steps - 1; t >= 0; --t) {
    const Eigen::VectorXd dh = dh_heads.col(t) + carry;
    Eigen::VectorXd direct(g);
    for (int i = 0; i < g; ++i) {
      const double r = u.reset(i, t);
      const double z = u.update(i, t);
      const double n = u.cand(i, t);
      const double hp = u.hidden(i, t);
      const double dn = dh(i) * (1.0 - z);
      const double dz = dh(i) * (hp - n);
      const double dan = dn * (1.0 - n * n);
      const double dr = dan * u.hh_cand(i, t);
      const double dar = dr * r * (1.0 - r);
      const double daz = dz * z * (1.0 - z);
      dgi(i, t) = dar;
      dgi(g + i, t) = daz;
      dgi(2 * g + i, t) = dan;
      dgh(i, t) = dar;
      dgh(g + i, t) = daz;
      dgh(2 * g + i, t) = dan * r;
      direct(i) = dh(i) * z;
    }
    carry = whh.transpose() * dgh.col(t) + direct;
  }
  grad.tensor(Tensor::kGruWih) += dgi * u.a2.transpose();
  grad.tensor(Tensor::kGruBih).col(0) += dgi.rowwise().sum();
  grad.tensor(Tensor::kGruWhh) += dgh * hprev.transpose();
  grad.tensor(Tensor::kGruBhh).col(0) += dgh.rowwise().sum();

  const Eigen::MatrixXd dp2 =
      ((p.tensor(Tensor::kGruWih).transpose() * dgi).array() * (u.a2.array() > 0.0).cast<double>())
          .matrix();
  grad.tensor(Tensor::kFc2W) += dp2 * u.a1.transpose();
  grad.tensor(Tensor::kFc2B).col(0) += dp2.rowwise().sum();
  const Eigen::MatrixXd dp1 =
      ((p.tensor(Tensor::kFc2W).transpose() * dp2).array() * (u.a1.array() > 0.0).cast<double>())
          .matrix();
  grad.tensor(Tensor::kFc1W) += dp1 * u.inputs.transpose();
  grad.tensor(Tensor::kFc1B).col(0) += dp1.rowwise().sum();
}

// Checkpoint container.
//   8 bytes  magic "NAVCKPT1"
//   u32      format version
//   u32      tensor count
//   per tensor: u32 rows, u32 cols
//   u64      payload value count
//   payload  float64 little-endian, tensors in declaration order, column-major
namespace {

constexpr std::array<char, 8> kMagic = {'N', 'A', 'V', 'C', 'K', 'P', 'T', '1'};
constexpr std::uint32_t kFormatVersion = 1;

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>((value >> (8 * i)) & 0xFF));
  }
}

template <typename T>
T get_le(std::span<const std::uint8_t> bytes, std::size_t& pos) {
  if (pos + sizeof(T) > bytes.size()) throw CheckpointError("checkpoint truncated");
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(bytes[pos + i]) << (8 * i);
  pos += sizeof(T);
  return value;
}

}  // namespace

std::vector<std::uint8_t> serialize_params(const NetworkParams& params) {
  std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
  put_le<std::uint32_t>(out, kFormatVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(kTensorCount));
  for (std::size_t i = 0; i < kTensorCount; ++i) {
    const auto& s = params.spec(static_cast<Tensor>(i));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.rows));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.cols));
  }
  put_le<std::uint64_t>(out, params.size());
  out.reserve(out.size() + 8 * params.size());
  for (double v : params.data()) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

NetworkParams deserialize_params(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kMagic.size() ||
      !std::equal(kMagic.begin(), kMagic.end(), bytes.begin(),
                  [](char a, std::uint8_t b) { return static_cast<std::uint8_t>(a) == b; })) {
    throw CheckpointError("not a checkpoint (bad magic)");
  }
  std::size_t pos = kMagic.size();
  const auto version = get_le<std::uint32_t>(bytes, pos);
  if (version != kFormatVersion) throw CheckpointError("unsupported checkpoint version");
  const auto count = get_le<std::uint32_t>(bytes, pos);
  if (count != kTensorCount) throw CheckpointError("unexpected tensor count");
  std::array<std::pair<int, int>, kTensorCount> dims{};
  for (auto& d : dims) {
    d.first = static_cast<int>(get_le<std::uint32_t>(bytes, pos));
    d.second = static_cast<int>(get_le<std::uint32_t>(bytes, pos));
  }
  NetworkShape shape;
  shape.hidden1 = dims[0].first;
  shape.input = dims[0].second;
  shape.hidden2 = dims[2].first;
  shape.gru = dims[5].second;
  shape.actions = dims[8].first;
  NetworkParams params;
  try {
    params = NetworkParams(shape);
  } catch (const ShapeMismatchError& e) {
    throw CheckpointError(std::string("invalid shape header: ") + e.what());
  }
  for (std::size_t i = 0; i < kTensorCount; ++i) {
    const auto& s = params.spec(static_cast<Tensor>(i));
    if (s.rows != dims[i].first || s.cols != dims[i].second) {
      throw CheckpointError("inconsistent shape for " + std::string(tensor_name(static_cast<Tensor>(i))));
    }
  }
  const auto n = get_le<std::uint64_t>(bytes, pos);
  if (n != params.size()) throw CheckpointError("payload size does not match shape header");
  if (bytes.size() - pos != 8 * n) throw CheckpointError("checkpoint truncated or padded");
  auto data = params.data();
  for (std::size_t i = 0; i < n; ++i) {
    data[i] = std::bit_cast<double>(get_le<std::uint64_t>(bytes, pos));
  }
  return params;
}

void save_params(const NetworkParams& params, const std::filesystem::path& path) {
  const auto bytes = serialize_params(params);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot write checkpoint " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CheckpointError("write failed for " + path.string());
}

NetworkParams load_params(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_params(bytes);
}

}  // namespace navarena
