#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace syngcn {

// Dense row-major matrix. Training stores float32; gradient checks
// instantiate the same code with double.
template <typename S>
class Matrix {
 public:
  Matrix() = default;
  Matrix(size_t rows, size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, S(0)) {}

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  size_t size() const { return data_.size(); }

  S* row(size_t i) { return data_.data() + i * cols_; }
  const S* row(size_t i) const { return data_.data() + i * cols_; }

  S& operator()(size_t i, size_t j) { return data_[i * cols_ + j]; }
  S operator()(size_t i, size_t j) const { return data_[i * cols_ + j]; }

  S* data() { return data_.data(); }
  const S* data() const { return data_.data(); }

  void fill(S v) { data_.assign(data_.size(), v); }

  bool same_shape(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

  template <typename T>
  Matrix<T> cast() const {
    Matrix<T> out(rows_, cols_);
    for (size_t i = 0; i < data_.size(); ++i)
      out.data()[i] = static_cast<T>(data_[i]);
    return out;
  }

 private:
  size_t rows_ = 0, cols_ = 0;
  std::vector<S> data_;
};

using MatrixF = Matrix<float>;
using MatrixD = Matrix<double>;

// Dot product with 64-bit accumulation.
template <typename S>
inline double dot(const S* a, const S* b, size_t n) {
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) acc += static_cast<double>(a[i]) * b[i];
  return acc;
}

template <typename S>
inline double squared_norm(const S* a, size_t n) {
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) acc += static_cast<double>(a[i]) * a[i];
  return acc;
}

template <typename S>
inline void require_shape(const Matrix<S>& m, size_t rows, size_t cols,
                          const char* what) {
  if (m.rows() != rows || m.cols() != cols)
    throw std::invalid_argument(std::string("shape mismatch in ") + what);
}

}  // namespace syngcn
