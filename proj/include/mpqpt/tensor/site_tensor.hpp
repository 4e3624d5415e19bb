// Copyright 2026 The mpqpt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <utility>

#include "mpqpt/common.hpp"

namespace mpqpt {

/// Rank-3 tensor T[l, p, r] with left bond l, physical index p and right
/// bond r. Storage is column-major with l fastest, so the tensor can be viewed
/// without copying as a (left*phys) x right matrix, a left x (phys*right)
/// matrix, or as `phys` strided left x right slices.
///
/// MPO sites reuse this type with a fused physical index p = 2*out + in.
class SiteTensor {
 public:
  using ConstSlice = Eigen::Map<const Matrix, 0, Eigen::OuterStride<>>;
  using Slice = Eigen::Map<Matrix, 0, Eigen::OuterStride<>>;

  SiteTensor() = default;
  SiteTensor(Index left, Index phys, Index right)
      : left_(left), phys_(phys), right_(right), data_(Vector::Zero(left * phys * right)) {}
  SiteTensor(Index left, Index phys, Index right, Vector data)
      : left_(left), phys_(phys), right_(right), data_(std::move(data)) {
    if (data_.size() != left * phys * right) throw DimensionError("SiteTensor: data size mismatch");
  }

  Index left_dim() const { return left_; }
  Index phys_dim() const { return phys_; }
  Index right_dim() const { return right_; }
  Index size() const { return data_.size(); }

  cplx operator()(Index l, Index p, Index r) const { return data_[l + left_ * (p + phys_ * r)]; }
  cplx& operator()(Index l, Index p, Index r) { return data_[l + left_ * (p + phys_ * r)]; }

  /// (left*phys) x right view, row index l + left*p.
  Eigen::Map<const Matrix> left_grouped() const { return {data_.data(), left_ * phys_, right_}; }
  Eigen::Map<Matrix> left_grouped() { return {data_.data(), left_ * phys_, right_}; }

  /// left x (phys*right) view, column index p + phys*r.
  Eigen::Map<const Matrix> right_grouped() const { return {data_.data(), left_, phys_ * right_}; }
  Eigen::Map<Matrix> right_grouped() { return {data_.data(), left_, phys_ * right_}; }

  ConstSlice slice(Index p) const {
    return ConstSlice(data_.data() + left_ * p, left_, right_, Eigen::OuterStride<>(left_ * phys_));
  }
  Slice slice(Index p) {
    return Slice(data_.data() + left_ * p, left_, right_, Eigen::OuterStride<>(left_ * phys_));
  }

  const Vector& data() const { return data_; }
  Vector& data() { return data_; }

  static SiteTensor from_left_grouped(const Matrix& m, Index left, Index phys) {
    if (m.rows() != left * phys) throw DimensionError("from_left_grouped: row count mismatch");
    return SiteTensor(left, phys, m.cols(), Eigen::Map<const Vector>(m.data(), m.size()));
  }

  static SiteTensor from_right_grouped(const Matrix& m, Index phys, Index right) {
    if (m.cols() != phys * right) throw DimensionError("from_right_grouped: column count mismatch");
    return SiteTensor(m.rows(), phys, right, Eigen::Map<const Vector>(m.data(), m.size()));
  }

  SiteTensor conjugate() const { return SiteTensor(left_, phys_, right_, data_.conjugate()); }

  friend bool operator==(const SiteTensor& a, const SiteTensor& b) {
    return a.left_ == b.left_ && a.phys_ == b.phys_ && a.right_ == b.right_ && a.data_ == b.data_;
  }

 private:
  Index left_ = 0;
  Index phys_ = 0;
  Index right_ = 0;
  Vector data_;
};

/// Multiplies every slice from the left: T'^p = m * T^p.
inline SiteTensor left_multiply(const Matrix& m, const SiteTensor& t) {
  if (m.cols() != t.left_dim()) throw DimensionError("left_multiply: bond mismatch");
  Matrix out = m * t.right_grouped();
  return SiteTensor::from_right_grouped(out, t.phys_dim(), t.right_dim());
}

/// Multiplies every slice from the right: T'^p = T^p * m.
inline SiteTensor right_multiply(const SiteTensor& t, const Matrix& m) {
  if (m.rows() != t.right_dim()) throw DimensionError("right_multiply: bond mismatch");
  Matrix out = t.left_grouped() * m;
  return SiteTensor::from_left_grouped(out, t.left_dim(), t.phys_dim());
}

}  // namespace mpqpt
