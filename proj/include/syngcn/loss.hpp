#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "syngcn/adam.hpp"
#include "syngcn/matrix.hpp"

namespace syngcn {

// log(sigmoid(x)) without overflow anywhere on the real line.
inline double log_sigmoid(double x) {
  return std::fmin(x, 0.0) - std::log1p(std::exp(-std::fabs(x)));
}

inline double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Negative-sampling objective for predicting `target_id` from an encoded
// context vector:
//
//   L = -log sigmoid(o_t . h) - sum_n log sigmoid(-o_n . h)
//
// Writes dL/dh into `context_grad` (size dim, overwritten) and accumulates
// dL/do for the touched output rows into `output_grads`.
template <typename S>
double target_loss(const S* context, size_t dim, uint32_t target_id,
                   const std::vector<uint32_t>& negative_ids,
                   const Matrix<S>& output_embeddings, S* context_grad,
                   SparseRowGrads<S>& output_grads) {
  if (output_embeddings.cols() != dim)
    throw std::invalid_argument("target_loss: dimension mismatch");
  for (uint32_t n : negative_ids)
    if (n == target_id)
      throw std::invalid_argument("target_loss: target among negatives");

  std::vector<double> dh(dim, 0.0);
  const S* o_t = output_embeddings.row(target_id);
  const double score_t = dot(o_t, context, dim);
  double loss = -log_sigmoid(score_t);
  // d/dx of -log sig(x) is sig(x) - 1
  const double coef_t = sigmoid(score_t) - 1.0;
  S* g_t = output_grads.row(target_id);
  for (size_t j = 0; j < dim; ++j) {
    dh[j] += coef_t * static_cast<double>(o_t[j]);
    g_t[j] = static_cast<S>(static_cast<double>(g_t[j]) +
                            coef_t * static_cast<double>(context[j]));
  }
  for (uint32_t nid : negative_ids) {
    const S* o_n = output_embeddings.row(nid);
    const double score_n = dot(o_n, context, dim);
    loss -= log_sigmoid(-score_n);
    const double coef_n = sigmoid(score_n);
    S* g_n = output_grads.row(nid);
    for (size_t j = 0; j < dim; ++j) {
      dh[j] += coef_n * static_cast<double>(o_n[j]);
      g_n[j] = static_cast<S>(static_cast<double>(g_n[j]) +
                              coef_n * static_cast<double>(context[j]));
    }
  }
  for (size_t j = 0; j < dim; ++j) context_grad[j] = static_cast<S>(dh[j]);
  return loss;
}

}  // namespace syngcn
