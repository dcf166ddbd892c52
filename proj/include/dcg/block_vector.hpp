#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "dcg/errors.hpp"

namespace dcg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Element of the product space R^d x ... x R^d, one block per node (or per
/// edge). Blocks are stored as the columns of a d x count matrix, so matrix
/// valued blocks are flattened column-major and the block inner product is
/// the Frobenius inner product.
class BlockVector {
 public:
  BlockVector() = default;
  BlockVector(std::size_t block_count, std::size_t block_dim)
      : data_(Matrix::Zero(static_cast<Eigen::Index>(block_dim),
                           static_cast<Eigen::Index>(block_count))) {}
  explicit BlockVector(Matrix columns) : data_(std::move(columns)) {}

  /// Every block set to the same vector.
  static BlockVector replicate(const Vector& block, std::size_t block_count) {
    return BlockVector(block.replicate(1, static_cast<Eigen::Index>(block_count)));
  }

  std::size_t block_count() const { return static_cast<std::size_t>(data_.cols()); }
  std::size_t block_dim() const { return static_cast<std::size_t>(data_.rows()); }

  auto block(std::size_t i) { return data_.col(static_cast<Eigen::Index>(i)); }
  auto block(std::size_t i) const { return data_.col(static_cast<Eigen::Index>(i)); }

  Matrix& matrix() { return data_; }
  const Matrix& matrix() const { return data_; }

  double dot(const BlockVector& other) const {
    require_same_shape(other);
    return data_.cwiseProduct(other.data_).sum();
  }
  double squared_norm() const { return data_.squaredNorm(); }
  double norm() const { return data_.norm(); }
  bool all_finite() const { return data_.allFinite(); }

  BlockVector& operator+=(const BlockVector& other) {
    require_same_shape(other);
    data_ += other.data_;
    return *this;
  }
  BlockVector& operator-=(const BlockVector& other) {
    require_same_shape(other);
    data_ -= other.data_;
    return *this;
  }
  BlockVector& operator*=(double s) {
    data_ *= s;
    return *this;
  }
  friend BlockVector operator+(BlockVector a, const BlockVector& b) { return a += b; }
  friend BlockVector operator-(BlockVector a, const BlockVector& b) { return a -= b; }
  friend BlockVector operator*(double s, BlockVector a) { return a *= s; }

  bool operator==(const BlockVector& other) const {
    return data_.rows() == other.data_.rows() && data_.cols() == other.data_.cols() &&
           data_ == other.data_;
  }

 private:
  void require_same_shape(const BlockVector& other) const {
    if (data_.rows() != other.data_.rows() || data_.cols() != other.data_.cols())
      throw DimensionError("block vector shape mismatch");
  }

  Matrix data_;
};

}  // namespace dcg
