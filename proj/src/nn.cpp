#include "td3fg/nn.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "td3fg/errors.hpp"
#include "td3fg/rng.hpp"
#include "td3fg/textio.hpp"

namespace td3fg {

const char* to_string(Activation a) {
  switch (a) {
    case Activation::Relu: return "relu";
    case Activation::Tanh: return "tanh";
    case Activation::Identity: return "identity";
  }
  return "?";
}

Activation activation_from_string(const std::string& s) {
  if (s == "relu") return Activation::Relu;
  if (s == "tanh") return Activation::Tanh;
  if (s == "identity") return Activation::Identity;
  throw ConfigError("unknown activation: '" + s + "'");
}

std::size_t MlpNet::param_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l)
    n += weights[l].size() + biases[l].size();
  return n;
}

bool MlpNet::same_architecture(const MlpNet& other) const {
  return layer_sizes == other.layer_sizes && hidden_act == other.hidden_act &&
         output_act == other.output_act;
}

bool MlpNet::same_parameters(const MlpNet& other) const {
  if (!same_architecture(other)) return false;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (std::memcmp(weights[l].data(), other.weights[l].data(),
                    weights[l].size() * sizeof(double)) != 0)
      return false;
    if (std::memcmp(biases[l].data(), other.biases[l].data(),
                    biases[l].size() * sizeof(double)) != 0)
      return false;
  }
  return true;
}

MlpNet mlp_init(const std::vector<int>& layer_sizes, Activation hidden_act,
                Activation output_act, std::uint64_t seed) {
  if (layer_sizes.size() < 2)
    throw ShapeError("invalid architecture: need at least input and output layer");
  for (int s : layer_sizes)
    if (s < 1) throw ShapeError("invalid architecture: layer size must be >= 1");

  MlpNet net;
  net.layer_sizes = layer_sizes;
  net.hidden_act = hidden_act;
  net.output_act = output_act;

  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const int in = layer_sizes[l];
    const int out = layer_sizes[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    std::vector<double> w(static_cast<std::size_t>(in) * out);
    std::vector<double> b(out);
    for (auto& v : w) v = rng.uniform(-bound, bound);
    for (auto& v : b) v = rng.uniform(-bound, bound);
    net.weights.push_back(std::move(w));
    net.biases.push_back(std::move(b));
  }
  return net;
}

namespace {

inline double apply_act(Activation a, double z) {
  switch (a) {
    case Activation::Relu: return z > 0.0 ? z : 0.0;
    case Activation::Tanh: return std::tanh(z);
    case Activation::Identity: return z;
  }
  return z;
}

// Derivative written in terms of the activation value itself, which is all
// the cache keeps. relu: a>0 ? 1 : 0; tanh: 1-a^2; identity: 1.
inline double act_deriv_from_value(Activation a, double v) {
  switch (a) {
    case Activation::Relu: return v > 0.0 ? 1.0 : 0.0;
    case Activation::Tanh: return 1.0 - v * v;
    case Activation::Identity: return 1.0;
  }
  return 1.0;
}

}  // namespace

std::vector<double> forward(const MlpNet& net, std::span<const double> input) {
  if (input.size() != static_cast<std::size_t>(net.input_dim()))
    throw ShapeError("forward: input dimension mismatch");

  std::vector<double> cur(input.begin(), input.end());
  std::vector<double> next;
  const std::size_t layers = net.num_layers();
  for (std::size_t l = 0; l < layers; ++l) {
    const int in = net.layer_sizes[l];
    const int out = net.layer_sizes[l + 1];
    const Activation act = (l + 1 == layers) ? net.output_act : net.hidden_act;
    next.assign(out, 0.0);
    const double* w = net.weights[l].data();
    for (int o = 0; o < out; ++o) {
      double z = net.biases[l][o];
      const double* wrow = w + static_cast<std::size_t>(o) * in;
      for (int i = 0; i < in; ++i) z += wrow[i] * cur[i];
      next[o] = apply_act(act, z);
    }
    cur.swap(next);
  }
  return cur;
}

ForwardCache forward_batch(const MlpNet& net, const Matrix& inputs) {
  if (inputs.cols != static_cast<std::size_t>(net.input_dim()))
    throw ShapeError("forward_batch: input dimension mismatch");
  if (inputs.rows == 0) throw ShapeError("forward_batch: empty batch");

  ForwardCache cache;
  cache.acts.reserve(net.num_layers() + 1);
  cache.acts.push_back(inputs);

  const std::size_t layers = net.num_layers();
  for (std::size_t l = 0; l < layers; ++l) {
    const int in = net.layer_sizes[l];
    const int out = net.layer_sizes[l + 1];
    const Activation act = (l + 1 == layers) ? net.output_act : net.hidden_act;
    const Matrix& prev = cache.acts.back();
    Matrix cur(inputs.rows, out);
    const double* w = net.weights[l].data();
    for (std::size_t r = 0; r < inputs.rows; ++r) {
      const double* x = prev.row(r);
      double* y = cur.row(r);
      for (int o = 0; o < out; ++o) {
        double z = net.biases[l][o];
        const double* wrow = w + static_cast<std::size_t>(o) * in;
        for (int i = 0; i < in; ++i) z += wrow[i] * x[i];
        y[o] = apply_act(act, z);
      }
    }
    cache.acts.push_back(std::move(cur));
  }
  return cache;
}

Gradients backward(const MlpNet& net, const ForwardCache& cache,
                   const Matrix& upstream) {
  const std::size_t layers = net.num_layers();
  if (cache.acts.size() != layers + 1)
    throw ShapeError("backward: cache does not match net");
  const std::size_t n = cache.acts[0].rows;
  if (n == 0) throw ShapeError("backward: empty batch");
  if (upstream.rows != n ||
      upstream.cols != static_cast<std::size_t>(net.output_dim()))
    throw ShapeError("backward: upstream gradient shape mismatch");

  Gradients g;
  g.weights.resize(layers);
  g.biases.resize(layers);

  // delta(r, o) = dL_r/dz at the current layer's pre-activation.
  Matrix delta(n, net.output_dim());
  {
    const Matrix& out_act = cache.acts[layers];
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t o = 0; o < delta.cols; ++o)
        delta(r, o) = upstream(r, o) *
                      act_deriv_from_value(net.output_act, out_act(r, o));
  }

  const double inv_n = 1.0 / static_cast<double>(n);
  Matrix prev_delta;
  for (std::size_t l = layers; l-- > 0;) {
    const int in = net.layer_sizes[l];
    const int out = net.layer_sizes[l + 1];
    const Matrix& below = cache.acts[l];

    g.weights[l].assign(static_cast<std::size_t>(in) * out, 0.0);
    g.biases[l].assign(out, 0.0);
    double* dw = g.weights[l].data();
    for (std::size_t r = 0; r < n; ++r) {
      const double* x = below.row(r);
      const double* d = delta.row(r);
      for (int o = 0; o < out; ++o) {
        const double c = d[o];
        if (c == 0.0) continue;
        double* dwrow = dw + static_cast<std::size_t>(o) * in;
        for (int i = 0; i < in; ++i) dwrow[i] += c * x[i];
        g.biases[l][o] += c;
      }
    }
    for (auto& v : g.weights[l]) v *= inv_n;
    for (auto& v : g.biases[l]) v *= inv_n;

    // Propagate to the layer below: per-row, unscaled.
    prev_delta = Matrix(n, in);
    const double* w = net.weights[l].data();
    for (std::size_t r = 0; r < n; ++r) {
      const double* d = delta.row(r);
      double* pd = prev_delta.row(r);
      for (int o = 0; o < out; ++o) {
        const double c = d[o];
        if (c == 0.0) continue;
        const double* wrow = w + static_cast<std::size_t>(o) * in;
        for (int i = 0; i < in; ++i) pd[i] += c * wrow[i];
      }
      if (l > 0) {
        const double* a = below.row(r);
        for (int i = 0; i < in; ++i)
          pd[i] *= act_deriv_from_value(net.hidden_act, a[i]);
      }
    }
    delta = std::move(prev_delta);
  }
  g.inputs = std::move(delta);
  return g;
}

AdamState adam_init(const MlpNet& net, double lr, double l2_coef) {
  AdamState st;
  st.lr = lr;
  st.l2_coef = l2_coef;
  st.m_w.resize(net.num_layers());
  st.v_w.resize(net.num_layers());
  st.m_b.resize(net.num_layers());
  st.v_b.resize(net.num_layers());
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    st.m_w[l].assign(net.weights[l].size(), 0.0);
    st.v_w[l].assign(net.weights[l].size(), 0.0);
    st.m_b[l].assign(net.biases[l].size(), 0.0);
    st.v_b[l].assign(net.biases[l].size(), 0.0);
  }
  return st;
}

namespace {

void adam_update_array(std::vector<double>& params,
                       const std::vector<double>& grad, std::vector<double>& m,
                       std::vector<double>& v, const AdamState& st,
                       double bc1, double bc2) {
  if (params.size() != grad.size())
    throw ShapeError("adam_step: gradient shape mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    double g = grad[i] + st.l2_coef * params[i];
    if (!std::isfinite(g)) throw NumericError("adam_step: non-finite gradient");
    m[i] = st.beta1 * m[i] + (1.0 - st.beta1) * g;
    v[i] = st.beta2 * v[i] + (1.0 - st.beta2) * g * g;
    const double mhat = m[i] / bc1;
    const double vhat = v[i] / bc2;
    params[i] -= st.lr * mhat / (std::sqrt(vhat) + st.eps);
  }
}

}  // namespace

void adam_step(MlpNet& net, const Gradients& grads, AdamState& state) {
  if (grads.weights.size() != net.num_layers())
    throw ShapeError("adam_step: layer count mismatch");
  state.step_count += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step_count));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step_count));
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    adam_update_array(net.weights[l], grads.weights[l], state.m_w[l],
                      state.v_w[l], state, bc1, bc2);
    adam_update_array(net.biases[l], grads.biases[l], state.m_b[l],
                      state.v_b[l], state, bc1, bc2);
  }
}

namespace {

double mse_loss(const MlpNet& net, const Matrix& inputs, const Matrix& targets) {
  ForwardCache cache = forward_batch(net, inputs);
  const Matrix& y = cache.output();
  double total = 0.0;
  for (std::size_t r = 0; r < y.rows; ++r)
    for (std::size_t c = 0; c < y.cols; ++c) {
      const double d = y(r, c) - targets(r, c);
      total += d * d;
    }
  return total / static_cast<double>(y.rows);
}

double rel_error(double a, double b) {
  const double diff = std::fabs(a - b);
  if (diff == 0.0) return 0.0;
  return diff / std::max({1.0, std::fabs(a), std::fabs(b)});
}

}  // namespace

double grad_check(const MlpNet& net, const Matrix& inputs,
                  const Matrix& targets, double epsilon) {
  if (inputs.rows == 0) throw ShapeError("grad_check: empty batch");
  if (epsilon <= 0.0) throw ConfigError("grad_check: epsilon must be > 0");
  if (targets.rows != inputs.rows ||
      targets.cols != static_cast<std::size_t>(net.output_dim()))
    throw ShapeError("grad_check: target shape mismatch");

  ForwardCache cache = forward_batch(net, inputs);
  const Matrix& y = cache.output();
  Matrix upstream(y.rows, y.cols);
  for (std::size_t r = 0; r < y.rows; ++r)
    for (std::size_t c = 0; c < y.cols; ++c)
      upstream(r, c) = 2.0 * (y(r, c) - targets(r, c));
  Gradients analytic = backward(net, cache, upstream);

  MlpNet probe = net;
  double worst = 0.0;
  auto check_array = [&](std::vector<double>& params,
                         const std::vector<double>& grad) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double orig = params[i];
      params[i] = orig + epsilon;
      const double lp = mse_loss(probe, inputs, targets);
      params[i] = orig - epsilon;
      const double lm = mse_loss(probe, inputs, targets);
      params[i] = orig;
      const double fd = (lp - lm) / (2.0 * epsilon);
      worst = std::max(worst, rel_error(grad[i], fd));
    }
  };
  for (std::size_t l = 0; l < probe.num_layers(); ++l) {
    check_array(probe.weights[l], analytic.weights[l]);
    check_array(probe.biases[l], analytic.biases[l]);
  }
  return worst;
}

void save_net(const MlpNet& net, std::ostream& out) {
  out << "mlpnet-v1\n";
  out << "sizes";
  for (int s : net.layer_sizes) out << ' ' << s;
  out << "\nhidden " << to_string(net.hidden_act);
  out << "\noutput " << to_string(net.output_act) << '\n';
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    out << 'W' << l;
    for (double v : net.weights[l]) out << ' ' << fmt_double(v);
    out << "\nb" << l;
    for (double v : net.biases[l]) out << ' ' << fmt_double(v);
    out << '\n';
  }
  out << "end\n";
}

MlpNet load_net(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "mlpnet-v1")
    throw IoError("load_net: bad header");

  if (!std::getline(in, line)) throw IoError("load_net: truncated file");
  auto tok = split_ws(line);
  if (tok.empty() || tok[0] != "sizes") throw IoError("load_net: missing sizes");
  std::vector<int> sizes;
  for (std::size_t i = 1; i < tok.size(); ++i)
    sizes.push_back(static_cast<int>(parse_int(tok[i])));

  auto read_tag = [&](const std::string& key) {
    if (!std::getline(in, line)) throw IoError("load_net: truncated file");
    auto t = split_ws(line);
    if (t.size() != 2 || t[0] != key) throw IoError("load_net: missing " + key);
    return activation_from_string(t[1]);
  };
  const Activation hidden = read_tag("hidden");
  const Activation output = read_tag("output");

  MlpNet net = mlp_init(sizes, hidden, output, 0);
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    for (int pass = 0; pass < 2; ++pass) {
      if (!std::getline(in, line)) throw IoError("load_net: truncated file");
      auto t = split_ws(line);
      std::vector<double>& dst = pass == 0 ? net.weights[l] : net.biases[l];
      const std::string want = (pass == 0 ? "W" : "b") + std::to_string(l);
      if (t.empty() || t[0] != want || t.size() != dst.size() + 1)
        throw IoError("load_net: bad array line, expected " + want);
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = parse_double(t[i + 1]);
    }
  }
  if (!std::getline(in, line) || trim(line) != "end")
    throw IoError("load_net: missing end marker");
  return net;
}

void save_net(const MlpNet& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for write: " + path);
  save_net(net, out);
  if (!out.good()) throw IoError("write failed: " + path);
}

MlpNet load_net(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  return load_net(in);
}

}  // namespace td3fg
