#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "syngcn/matrix.hpp"

namespace syngcn {

// Sparse per-row gradient accumulator for the embedding matrices.
template <typename S>
struct SparseRowGrads {
  size_t cols = 0;
  std::map<uint32_t, std::vector<S>> rows;  // ordered, so updates are too

  explicit SparseRowGrads(size_t c = 0) : cols(c) {}

  S* row(uint32_t r) {
    auto it = rows.find(r);
    if (it == rows.end())
      it = rows.emplace(r, std::vector<S>(cols, S(0))).first;
    return it->second.data();
  }

  void clear() { rows.clear(); }

  void merge(const SparseRowGrads& other) {
    for (const auto& [r, g] : other.rows) {
      S* dst = row(r);
      for (size_t j = 0; j < cols; ++j) dst[j] += g[j];
    }
  }
};

// Bias-corrected Adam over a set of named tensors. Each tensor keeps its own
// first/second moment buffers; the step counter advances once per batch.
// Embedding matrices update lazily: rows without a gradient this step are
// skipped and their moments stay untouched.
template <typename S>
class Adam {
 public:
  explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999,
                double epsilon = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {}

  size_t add_tensor(std::string name, size_t size) {
    slots_.push_back({std::move(name), std::vector<S>(size, S(0)),
                      std::vector<S>(size, S(0))});
    return slots_.size() - 1;
  }

  void begin_step() { ++t_; }
  uint64_t step_count() const { return t_; }
  double learning_rate() const { return lr_; }
  void set_learning_rate(double lr) { lr_ = lr; }

  void update_dense(size_t handle, S* param, const S* grad, size_t n) {
    Slot& s = slots_[handle];
    if (s.m.size() != n)
      throw std::invalid_argument("adam: size mismatch for " + s.name);
    for (size_t i = 0; i < n; ++i)
      update_one(s, i, param[i], grad[i]);
  }

  void update_rows(size_t handle, Matrix<S>& param,
                   const SparseRowGrads<S>& grads) {
    Slot& s = slots_[handle];
    if (s.m.size() != param.size() || grads.cols != param.cols())
      throw std::invalid_argument("adam: size mismatch for " + s.name);
    for (const auto& [r, g] : grads.rows) {
      S* p = param.row(r);
      const size_t base = r * param.cols();
      for (size_t j = 0; j < param.cols(); ++j)
        update_one(s, base + j, p[j], g[j]);
    }
  }

 private:
  struct Slot {
    std::string name;
    std::vector<S> m, v;
  };

  void update_one(Slot& s, size_t i, S& param, S grad) {
    const double g = static_cast<double>(grad);
    if (!std::isfinite(g))
      throw std::runtime_error("adam: non-finite gradient in tensor " +
                               s.name);
    const double m = beta1_ * static_cast<double>(s.m[i]) + (1 - beta1_) * g;
    const double v =
        beta2_ * static_cast<double>(s.v[i]) + (1 - beta2_) * g * g;
    s.m[i] = static_cast<S>(m);
    s.v[i] = static_cast<S>(v);
    const double m_hat = m / (1 - std::pow(beta1_, static_cast<double>(t_)));
    const double v_hat = v / (1 - std::pow(beta2_, static_cast<double>(t_)));
    param = static_cast<S>(static_cast<double>(param) -
                           lr_ * m_hat / (std::sqrt(v_hat) + epsilon_));
  }

  double lr_;
  double beta1_, beta2_, epsilon_;
  uint64_t t_ = 0;
  std::vector<Slot> slots_;
};

}  // namespace syngcn
