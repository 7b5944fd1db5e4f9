#include "socnav/netopt.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "socnav/errors.hpp"

namespace socnav {

namespace {

std::string join_sizes(const std::vector<int>& sizes) {
  std::string out;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(sizes[i]);
  }
  return out;
}

bool all_finite(const MlpParams& t) {
  for (const auto& w : t.weights) {
    if (!w.allFinite()) return false;
  }
  for (const auto& b : t.biases) {
    if (!b.allFinite()) return false;
  }
  return true;
}

void write_values(std::ostream& out, const double* data, Eigen::Index count) {
  char buf[32];
  for (Eigen::Index i = 0; i < count; ++i) {
    std::snprintf(buf, sizeof(buf), " %.17g", data[i]);
    out << buf;
  }
}

std::vector<int> parse_sizes(const std::string& text, const std::string& section) {
  std::vector<int> sizes;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (ec != std::errc() || ptr != item.data() + item.size() || value <= 0) {
      throw CheckpointFormatError("checkpoint section '" + section +
                                  "': bad layer size '" + item + "'");
    }
    sizes.push_back(value);
  }
  if (sizes.size() < 2) {
    throw CheckpointFormatError("checkpoint section '" + section +
                                "': need at least input and output sizes");
  }
  return sizes;
}

void read_tensor_line(std::istream& in, const std::string& name, Eigen::Index rows,
                      Eigen::Index cols, double* dest) {
  std::string line;
  if (!std::getline(in, line)) {
    throw CheckpointFormatError("checkpoint section '" + name + "': missing");
  }
  std::istringstream ls(line);
  std::string tag, shape;
  ls >> tag >> shape;
  const std::string want_shape = cols > 0 ? std::to_string(rows) + "x" + std::to_string(cols)
                                          : std::to_string(rows);
  if (tag != name) {
    throw CheckpointFormatError("checkpoint section '" + name + "': found '" + tag + "'");
  }
  if (shape != want_shape) {
    throw DimensionError("checkpoint section '" + name + "': shape " + shape +
                         " does not match header (" + want_shape + ")");
  }
  const Eigen::Index count = rows * (cols > 0 ? cols : 1);
  std::string token;
  for (Eigen::Index i = 0; i < count; ++i) {
    if (!(ls >> token)) {
      throw CheckpointFormatError("checkpoint section '" + name + "': truncated after " +
                                  std::to_string(i) + " values");
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
      throw CheckpointFormatError("checkpoint section '" + name + "': bad value '" +
                                  token + "'");
    }
    dest[i] = v;
  }
  if (ls >> token) {
    throw CheckpointFormatError("checkpoint section '" + name + "': trailing values");
  }
}

}  // namespace

std::size_t MlpParams::num_parameters() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    n += weights[l].size() + biases[l].size();
  }
  return n;
}

void MlpParams::check_shapes() const {
  if (layer_sizes.size() < 2 || weights.size() != layer_sizes.size() - 1 ||
      biases.size() != weights.size()) {
    throw DimensionError("mlp: tensor count does not match layer sizes " +
                         join_sizes(layer_sizes));
  }
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].rows() != layer_sizes[l + 1] || weights[l].cols() != layer_sizes[l] ||
        biases[l].size() != layer_sizes[l + 1]) {
      throw DimensionError("mlp: layer " + std::to_string(l) +
                           " shape does not chain with " + join_sizes(layer_sizes));
    }
  }
}

MlpParams zeros_mlp(const std::vector<int>& layer_sizes) {
  if (layer_sizes.size() < 2) throw DimensionError("mlp needs at least two layer sizes");
  MlpParams p;
  p.layer_sizes = layer_sizes;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    if (layer_sizes[l] <= 0 || layer_sizes[l + 1] <= 0) {
      throw DimensionError("mlp layer sizes must be positive");
    }
    p.weights.push_back(Eigen::MatrixXd::Zero(layer_sizes[l + 1], layer_sizes[l]));
    p.biases.push_back(Eigen::VectorXd::Zero(layer_sizes[l + 1]));
  }
  return p;
}

MlpParams zeros_like(const MlpParams& params) { return zeros_mlp(params.layer_sizes); }

MlpParams glorot_mlp(const std::vector<int>& layer_sizes, Rng& rng) {
  MlpParams p = zeros_mlp(layer_sizes);
  for (auto& w : p.weights) {
    const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    // Fill in row-major order so the draw sequence is independent of storage.
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = uniform(rng, -limit, limit);
    }
  }
  return p;
}

ForwardTrace forward(const MlpParams& params, const Eigen::MatrixXd& inputs) {
  if (inputs.rows() != params.input_size()) {
    throw DimensionError("forward: input has " + std::to_string(inputs.rows()) +
                         " rows, network expects " + std::to_string(params.input_size()));
  }
  ForwardTrace trace;
  trace.activations.reserve(params.num_layers() + 1);
  trace.activations.push_back(inputs);
  const std::size_t last = params.num_layers() - 1;
  for (std::size_t l = 0; l < params.num_layers(); ++l) {
    Eigen::MatrixXd z = params.weights[l] * trace.activations.back();
    z.colwise() += params.biases[l];
    if (l != last) z = z.array().tanh().matrix();
    trace.activations.push_back(std::move(z));
  }
  return trace;
}

Eigen::VectorXd forward(const MlpParams& params, const Eigen::VectorXd& input,
                        ForwardTrace* trace) {
  ForwardTrace t = forward(params, Eigen::MatrixXd(input));
  Eigen::VectorXd out = t.activations.back().col(0);
  if (trace != nullptr) *trace = std::move(t);
  return out;
}

MlpParams backward(const MlpParams& params, const ForwardTrace& trace,
                   const Eigen::MatrixXd& output_grad) {
  const std::size_t layers = params.num_layers();
  if (trace.activations.size() != layers + 1) {
    throw DimensionError("backward: trace depth does not match network");
  }
  for (std::size_t l = 0; l <= layers; ++l) {
    if (trace.activations[l].rows() != params.layer_sizes[l]) {
      throw DimensionError("backward: stale trace at layer " + std::to_string(l));
    }
  }
  if (output_grad.rows() != params.output_size() ||
      output_grad.cols() != static_cast<Eigen::Index>(trace.batch_size())) {
    throw DimensionError("backward: output gradient shape mismatch");
  }

  MlpParams grads = zeros_like(params);
  Eigen::MatrixXd delta = output_grad;
  for (std::size_t l = layers; l-- > 0;) {
    grads.weights[l].noalias() = delta * trace.activations[l].transpose();
    grads.biases[l] = delta.rowwise().sum();
    if (l == 0) break;
    Eigen::MatrixXd upstream = params.weights[l].transpose() * delta;
    const auto& h = trace.activations[l].array();
    delta = (upstream.array() * (1.0 - h * h)).matrix();
  }
  return grads;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  const double top = logits.maxCoeff();
  Eigen::VectorXd e = (logits.array() - top).exp().matrix();
  return e / e.sum();
}

double global_norm(const MlpParams& tensors) {
  double sq = 0.0;
  for (const auto& w : tensors.weights) sq += w.squaredNorm();
  for (const auto& b : tensors.biases) sq += b.squaredNorm();
  return std::sqrt(sq);
}

void scale_in_place(MlpParams& tensors, double factor) {
  for (auto& w : tensors.weights) w *= factor;
  for (auto& b : tensors.biases) b *= factor;
}

RmspropState make_rmsprop(const MlpParams& params, double learning_rate, double decay_rho,
                          double epsilon) {
  return RmspropState{learning_rate, decay_rho, epsilon, zeros_like(params)};
}

void rmsprop_step(MlpParams& params, const MlpParams& grads, RmspropState& state) {
  grads.check_shapes();
  if (grads.layer_sizes != params.layer_sizes ||
      state.accumulators.layer_sizes != params.layer_sizes) {
    throw DimensionError("rmsprop: gradient/state shapes do not match parameters");
  }
  if (!all_finite(grads)) {
    throw TrainingDivergenceError("rmsprop: non-finite gradient");
  }
  const double rho = state.decay_rho;
  const double lr = state.learning_rate;
  const double eps = state.epsilon;
  auto apply = [&](auto& param, const auto& g, auto& acc) {
    acc.array() = rho * acc.array() + (1.0 - rho) * g.array().square();
    param.array() -= lr * g.array() / (acc.array() + eps).sqrt();
  };
  for (std::size_t l = 0; l < params.num_layers(); ++l) {
    apply(params.weights[l], grads.weights[l], state.accumulators.weights[l]);
    apply(params.biases[l], grads.biases[l], state.accumulators.biases[l]);
  }
}

void save_checkpoint(const MlpParams& params, std::ostream& out,
                     const std::vector<std::string>& trailer) {
  params.check_shapes();
  out << "mlp-v1 " << join_sizes(params.layer_sizes) << '\n';
  for (std::size_t l = 0; l < params.num_layers(); ++l) {
    const auto& w = params.weights[l];
    out << 'W' << l << ' ' << w.rows() << 'x' << w.cols();
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = w;
    write_values(out, rm.data(), rm.size());
    out << '\n';
    const auto& b = params.biases[l];
    out << 'b' << l << ' ' << b.size();
    write_values(out, b.data(), b.size());
    out << '\n';
  }
  for (const auto& line : trailer) out << line << '\n';
}

void save_checkpoint(const MlpParams& params, const std::filesystem::path& path,
                     const std::vector<std::string>& trailer) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open checkpoint for writing: " + path.string());
  save_checkpoint(params, out, trailer);
  if (!out) throw Error("failed writing checkpoint: " + path.string());
}

Checkpoint load_checkpoint(std::istream& in,
                           const std::optional<std::vector<int>>& expected_sizes) {
  std::string header;
  if (!std::getline(in, header)) throw CheckpointFormatError("checkpoint section 'header': empty file");
  std::istringstream hs(header);
  std::string magic, sizes_text, extra;
  hs >> magic >> sizes_text;
  if (magic != "mlp-v1" || sizes_text.empty() || (hs >> extra)) {
    throw CheckpointFormatError("checkpoint section 'header': expected 'mlp-v1 <sizes>'");
  }
  const std::vector<int> sizes = parse_sizes(sizes_text, "header");
  if (expected_sizes && *expected_sizes != sizes) {
    throw DimensionError("checkpoint architecture " + sizes_text + " does not match expected " +
                         join_sizes(*expected_sizes));
  }

  Checkpoint ck;
  ck.params = zeros_mlp(sizes);
  for (std::size_t l = 0; l < ck.params.num_layers(); ++l) {
    auto& w = ck.params.weights[l];
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(w.rows(), w.cols());
    read_tensor_line(in, "W" + std::to_string(l), w.rows(), w.cols(), rm.data());
    w = rm;
    auto& b = ck.params.biases[l];
    read_tensor_line(in, "b" + std::to_string(l), b.size(), 0, b.data());
  }
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) ck.trailer.push_back(line);
  }
  return ck;
}

Checkpoint load_checkpoint(const std::filesystem::path& path,
                           const std::optional<std::vector<int>>& expected_sizes) {
  std::ifstream in(path);
  if (!in) throw CheckpointFormatError("checkpoint section 'file': cannot open " + path.string());
  return load_checkpoint(in, expected_sizes);
}

}  // namespace socnav
