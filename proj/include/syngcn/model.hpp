#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "syngcn/graph.hpp"
#include "syngcn/matrix.hpp"
#include "syngcn/rng.hpp"

namespace syngcn {

struct GcnConfig {
  size_t dim = 300;
  size_t layers = 1;
  bool gating = true;
  // Divide each node's aggregate by its in-degree. Off by default; the
  // gates already provide adaptive weighting.
  bool normalize = false;
};

// Entries uniform in [-a, a] with a = sqrt(6 / (rows + cols)).
template <typename S>
Matrix<S> xavier_init(size_t rows, size_t cols, Rng& rng) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("xavier_init: empty");
  const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Matrix<S> m(rows, cols);
  for (size_t i = 0; i < m.size(); ++i)
    m.data()[i] = static_cast<S>(rng.uniform(-a, a));
  return m;
}

// One graph-convolution layer: a d x d weight matrix per edge direction,
// a bias vector per (label, direction), and the edge-gate parameters.
template <typename S>
struct GcnLayer {
  std::array<Matrix<S>, kNumDirections> weight;       // d x d each
  std::array<std::vector<S>, kNumDirections> gate_weight;  // d each
  Matrix<S> bias;                 // (num_labels * 3) x d, row = label*3 + dir
  std::vector<S> gate_bias;       // num_labels * 3

  const S* bias_row(uint32_t label, EdgeDirection dir) const {
    return bias.row(label * kNumDirections + static_cast<uint32_t>(dir));
  }
  S* bias_row(uint32_t label, EdgeDirection dir) {
    return bias.row(label * kNumDirections + static_cast<uint32_t>(dir));
  }
  S gate_bias_at(uint32_t label, EdgeDirection dir) const {
    return gate_bias[label * kNumDirections + static_cast<uint32_t>(dir)];
  }
  S& gate_bias_at(uint32_t label, EdgeDirection dir) {
    return gate_bias[label * kNumDirections + static_cast<uint32_t>(dir)];
  }
};

template <typename S>
struct GcnParams {
  GcnConfig config;
  size_t num_labels = 0;
  std::vector<GcnLayer<S>> layers;

  static GcnParams zeros(const GcnConfig& config, size_t num_labels) {
    GcnParams p;
    p.config = config;
    p.num_labels = num_labels;
    p.layers.resize(config.layers);
    for (auto& layer : p.layers) {
      for (int d = 0; d < kNumDirections; ++d) {
        layer.weight[d] = Matrix<S>(config.dim, config.dim);
        layer.gate_weight[d].assign(config.dim, S(0));
      }
      layer.bias = Matrix<S>(num_labels * kNumDirections, config.dim);
      layer.gate_bias.assign(num_labels * kNumDirections, S(0));
    }
    return p;
  }

  // Weight matrices and gate vectors Xavier-initialized, biases zero.
  // Tensors are drawn in declared order from `rng`.
  static GcnParams xavier(const GcnConfig& config, size_t num_labels,
                          Rng& rng) {
    GcnParams p = zeros(config, num_labels);
    for (auto& layer : p.layers) {
      for (int d = 0; d < kNumDirections; ++d)
        layer.weight[d] = xavier_init<S>(config.dim, config.dim, rng);
      for (int d = 0; d < kNumDirections; ++d) {
        Matrix<S> gw = xavier_init<S>(1, config.dim, rng);
        layer.gate_weight[d].assign(gw.row(0), gw.row(0) + config.dim);
      }
    }
    return p;
  }

  size_t parameter_count() const {
    const size_t d = config.dim, L = num_labels;
    return config.layers * (3 * d * d + L * 3 * d + 3 * d + 3 * L);
  }

  void set_zero() {
    for (auto& layer : layers) {
      for (int d = 0; d < kNumDirections; ++d) {
        layer.weight[d].fill(S(0));
        layer.gate_weight[d].assign(layer.gate_weight[d].size(), S(0));
      }
      layer.bias.fill(S(0));
      layer.gate_bias.assign(layer.gate_bias.size(), S(0));
    }
  }

  template <typename T>
  GcnParams<T> cast() const {
    GcnParams<T> out = GcnParams<T>::zeros(config, num_labels);
    for (size_t l = 0; l < layers.size(); ++l) {
      for (int d = 0; d < kNumDirections; ++d) {
        out.layers[l].weight[d] = layers[l].weight[d].template cast<T>();
        for (size_t i = 0; i < config.dim; ++i)
          out.layers[l].gate_weight[d][i] =
              static_cast<T>(layers[l].gate_weight[d][i]);
      }
      out.layers[l].bias = layers[l].bias.template cast<T>();
      for (size_t i = 0; i < layers[l].gate_bias.size(); ++i)
        out.layers[l].gate_bias[i] = static_cast<T>(layers[l].gate_bias[i]);
    }
    return out;
  }
};

using GcnParamsF = GcnParams<float>;
using GcnParamsD = GcnParams<double>;

// Visits every parameter tensor as a flat array, in the declared order used
// by the optimizer, the checkpoint format and the gradient checks.
template <typename S, typename F>
void for_each_tensor(GcnParams<S>& p, F&& f) {
  static const char* dir_tag[kNumDirections] = {"forward", "inverse", "self"};
  for (size_t l = 0; l < p.layers.size(); ++l) {
    auto& layer = p.layers[l];
    const std::string prefix = "layer" + std::to_string(l) + ".";
    for (int d = 0; d < kNumDirections; ++d)
      f(prefix + "weight." + dir_tag[d], layer.weight[d].data(),
        layer.weight[d].size());
    for (int d = 0; d < kNumDirections; ++d)
      f(prefix + "gate_weight." + dir_tag[d], layer.gate_weight[d].data(),
        layer.gate_weight[d].size());
    f(prefix + "bias", layer.bias.data(), layer.bias.size());
    f(prefix + "gate_bias", layer.gate_bias.data(), layer.gate_bias.size());
  }
}

template <typename S, typename F>
void for_each_tensor(const GcnParams<S>& p, F&& f) {
  for_each_tensor(const_cast<GcnParams<S>&>(p),
                  [&f](const std::string& name, const S* data, size_t size) {
                    f(name, data, size);
                  });
}

template <typename S>
inline double sigmoid_scalar(S x) {
  const double v = static_cast<double>(x);
  if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

// Edge gate in (0, 1): sigma(gate_w[dir] . h_u + gate_b[label][dir]).
template <typename S>
S gate(const S* h_u, uint32_t label, EdgeDirection dir,
       const GcnParams<S>& params, size_t layer) {
  const auto& ly = params.layers[layer];
  const int d = static_cast<int>(dir);
  double z = dot(ly.gate_weight[d].data(), h_u, params.config.dim) +
             static_cast<double>(ly.gate_bias_at(label, dir));
  return static_cast<S>(sigmoid_scalar(z));
}

// Everything the backward pass needs from one forward run.
template <typename S>
struct ForwardTape {
  size_t node_count = 0;
  size_t edge_count = 0;
  std::vector<Matrix<S>> hidden;        // layers+1 entries, hidden[0] = inputs
  std::vector<Matrix<S>> preact;        // per layer, before ReLU
  std::vector<std::vector<S>> gates;    // per layer, one scalar per edge slot
};

namespace detail {

// Messages into node v are accumulated in the incoming-index order, which
// follows edge-list order. Accumulation is in 64-bit.
template <typename S>
void gcn_layer_forward(const Matrix<S>& h_in, const SentenceGraph& g,
                       const GcnParams<S>& params, size_t layer,
                       Matrix<S>& pre_out, Matrix<S>& h_out,
                       std::vector<S>* gate_out) {
  const size_t n = g.node_count();
  const size_t dim = params.config.dim;
  const auto& ly = params.layers[layer];
  std::vector<double> acc(dim);
  for (uint32_t v = 0; v < n; ++v) {
    std::fill(acc.begin(), acc.end(), 0.0);
    const auto range = g.incoming(v);
    for (uint32_t ei : range) {
      const Edge& e = g.edges()[ei];
      const S* h_u = h_in.row(e.src);
      const int d = static_cast<int>(e.dir);
      const Matrix<S>& W = ly.weight[d];
      const S* b = ly.bias_row(e.label, e.dir);
      double gv = 1.0;
      if (params.config.gating)
        gv = static_cast<double>(gate(h_u, e.label, e.dir, params, layer));
      if (gate_out) (*gate_out)[ei] = static_cast<S>(gv);
      for (size_t j = 0; j < dim; ++j) {
        double m = dot(W.row(j), h_u, dim) + static_cast<double>(b[j]);
        acc[j] += gv * m;
      }
    }
    const double scale =
        params.config.normalize && range.size() > 0 ? 1.0 / range.size() : 1.0;
    for (size_t j = 0; j < dim; ++j) {
      const S pre = static_cast<S>(acc[j] * scale);
      pre_out(v, j) = pre;
      h_out(v, j) = pre > S(0) ? pre : S(0);
    }
  }
}

}  // namespace detail

// Layer-wise propagation over the direction-augmented graph:
//   h_v^{l+1} = ReLU( sum_{(u,label,dir) in N(v)}
//                     g(h_u, label, dir) * (W[dir] h_u + b[label][dir]) )
// With gating disabled g is identically 1. Pass a tape to enable backward.
template <typename S>
Matrix<S> gcn_forward(const Matrix<S>& inputs, const SentenceGraph& g,
                      const GcnParams<S>& params,
                      ForwardTape<S>* tape = nullptr) {
  const size_t n = g.node_count();
  const size_t dim = params.config.dim;
  require_shape(inputs, n, dim, "gcn_forward inputs");
  for (const Edge& e : g.edges())
    if (e.label >= params.num_labels)
      throw std::invalid_argument("gcn_forward: edge label out of range");

  if (tape) {
    tape->node_count = n;
    tape->edge_count = g.edge_count();
    tape->hidden.assign(1, inputs);
    tape->preact.clear();
    tape->gates.clear();
  }
  Matrix<S> h = inputs;
  Matrix<S> pre(n, dim), h_next(n, dim);
  for (size_t l = 0; l < params.config.layers; ++l) {
    std::vector<S>* gate_slot = nullptr;
    if (tape) {
      tape->gates.emplace_back(g.edge_count(), S(1));
      gate_slot = &tape->gates.back();
    }
    detail::gcn_layer_forward(h, g, params, l, pre, h_next, gate_slot);
    if (tape) {
      tape->preact.push_back(pre);
      tape->hidden.push_back(h_next);
    }
    std::swap(h, h_next);
  }
  return h;
}

// Exact gradients of gcn_forward. Parameter gradients are accumulated into
// `param_grads` (callers zero it when starting fresh); `input_grads` is
// overwritten. ReLU uses subgradient 0 at exactly 0.
template <typename S>
void gcn_backward(const ForwardTape<S>& tape, const Matrix<S>& upstream,
                  const SentenceGraph& g, const GcnParams<S>& params,
                  GcnParams<S>& param_grads, Matrix<S>& input_grads) {
  const size_t n = g.node_count();
  const size_t dim = params.config.dim;
  if (tape.node_count != n || tape.edge_count != g.edge_count() ||
      tape.hidden.size() != params.config.layers + 1)
    throw std::invalid_argument("gcn_backward: tape does not match graph");
  require_shape(upstream, n, dim, "gcn_backward upstream");

  Matrix<S> grad_h = upstream;
  Matrix<S> grad_h_prev(n, dim);
  std::vector<double> dpre(dim);
  for (size_t l = params.config.layers; l-- > 0;) {
    const auto& ly = params.layers[l];
    auto& gly = param_grads.layers[l];
    const Matrix<S>& h_in = tape.hidden[l];
    const Matrix<S>& pre = tape.preact[l];
    const std::vector<S>& gates = tape.gates[l];
    grad_h_prev.fill(S(0));
    for (uint32_t v = 0; v < n; ++v) {
      const S* gh = grad_h.row(v);
      bool zero = true;
      for (size_t j = 0; j < dim; ++j)
        if (gh[j] != S(0)) { zero = false; break; }
      if (zero) continue;
      const auto range = g.incoming(v);
      const double scale =
          params.config.normalize && range.size() > 0 ? 1.0 / range.size()
                                                      : 1.0;
      for (size_t j = 0; j < dim; ++j)
        dpre[j] = pre(v, j) > S(0) ? static_cast<double>(gh[j]) * scale : 0.0;
      for (uint32_t ei : range) {
        const Edge& e = g.edges()[ei];
        const S* h_u = h_in.row(e.src);
        const int d = static_cast<int>(e.dir);
        const Matrix<S>& W = ly.weight[d];
        const S* b = ly.bias_row(e.label, e.dir);
        const double gv = static_cast<double>(gates[ei]);
        Matrix<S>& gW = gly.weight[d];
        S* gb = gly.bias_row(e.label, e.dir);
        S* ghu = grad_h_prev.row(e.src);
        // d/dW, d/db, and the gate's dot with the message
        double dz_dot = 0.0;
        for (size_t j = 0; j < dim; ++j) {
          const double dj = dpre[j];
          if (dj == 0.0) continue;
          const double gdj = gv * dj;
          S* gWrow = gW.row(j);
          for (size_t i = 0; i < dim; ++i)
            gWrow[i] = static_cast<S>(gWrow[i] + gdj * h_u[i]);
          gb[j] = static_cast<S>(gb[j] + gdj);
          if (params.config.gating) {
            const double m = dot(W.row(j), h_u, dim) + static_cast<double>(b[j]);
            dz_dot += dj * m;
          }
        }
        // d/dh_u through the message: g * W^T dpre
        for (size_t i = 0; i < dim; ++i) {
          double acc = 0.0;
          for (size_t j = 0; j < dim; ++j)
            if (dpre[j] != 0.0) acc += dpre[j] * static_cast<double>(W(j, i));
          ghu[i] = static_cast<S>(ghu[i] + gv * acc);
        }
        if (params.config.gating) {
          const double dz = dz_dot * gv * (1.0 - gv);
          auto& ggw = gly.gate_weight[d];
          const auto& gw = ly.gate_weight[d];
          for (size_t i = 0; i < dim; ++i) {
            ggw[i] = static_cast<S>(ggw[i] + dz * h_u[i]);
            ghu[i] = static_cast<S>(ghu[i] + dz * static_cast<double>(gw[i]));
          }
          S& gbias = gly.gate_bias_at(e.label, e.dir);
          gbias = static_cast<S>(static_cast<double>(gbias) + dz);
        }
      }
    }
    std::swap(grad_h, grad_h_prev);
  }
  input_grads = std::move(grad_h);
}

// Binary parameter checkpoint (see README for the exact layout).
void save_checkpoint(const GcnParamsF& params, const LabelSet& labels,
                     const std::vector<float>& placeholder,
                     const std::string& path);

struct Checkpoint {
  GcnParamsF params;
  LabelSet labels;
  std::vector<float> placeholder;  // empty when absent
};

Checkpoint load_checkpoint(const std::string& path);

}  // namespace syngcn
