#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace crf {

using cd = std::complex<double>;

/// Maximum complex dimension handled by the pointwise kernel.
inline constexpr int kMaxDim = 3;

/// Small complex matrix, stack allocated. Row i, column j of a metric holds g_{i jbar}.
using CMat = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;
using CVec = Eigen::Matrix<cd, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using RVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;

/// A point of a chart in holomorphic coordinates (z_1, ..., z_n).
using Point = CVec;

/// Dense rank-3 complex tensor with n^3 entries, index order as written.
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(int n) : n_(n) { data_.fill(cd{}); }
  int dim() const { return n_; }
  cd& operator()(int i, int j, int k) { return data_[(i * n_ + j) * n_ + k]; }
  cd operator()(int i, int j, int k) const { return data_[(i * n_ + j) * n_ + k]; }
  std::size_t size() const { return static_cast<std::size_t>(n_) * n_ * n_; }
  cd flat(std::size_t idx) const { return data_[idx]; }
  double max_abs() const;

 private:
  int n_ = 0;
  std::array<cd, kMaxDim * kMaxDim * kMaxDim> data_{};
};

/// Dense rank-4 complex tensor with n^4 entries.
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(int n) : n_(n) { data_.fill(cd{}); }
  int dim() const { return n_; }
  cd& operator()(int i, int j, int k, int l) { return data_[((i * n_ + j) * n_ + k) * n_ + l]; }
  cd operator()(int i, int j, int k, int l) const {
    return data_[((i * n_ + j) * n_ + k) * n_ + l];
  }
  std::size_t size() const { return static_cast<std::size_t>(n_) * n_ * n_ * n_; }
  cd flat(std::size_t idx) const { return data_[idx]; }
  double max_abs() const;

 private:
  int n_ = 0;
  std::array<cd, kMaxDim * kMaxDim * kMaxDim * kMaxDim> data_{};
};

inline double Tensor3::max_abs() const {
  double m = 0.0;
  for (std::size_t i = 0; i < size(); ++i) m = std::max(m, std::abs(data_[i]));
  return m;
}

inline double Tensor4::max_abs() const {
  double m = 0.0;
  for (std::size_t i = 0; i < size(); ++i) m = std::max(m, std::abs(data_[i]));
  return m;
}

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class DegenerateMetricError : public Error {
 public:
  using Error::Error;
};

class DerivativeOrderError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Raised when the two inputs of the uniqueness check are not Kahler-Einstein.
class NotKahlerEinsteinError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace crf
