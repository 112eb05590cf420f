// Copyright 2026 The pcqa Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pcqa/ndarray.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "pcqa/error.h"

namespace pcqa {
namespace {

std::size_t Product(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

}  // namespace

NdArray::NdArray(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)), data_(Product(shape_), fill) {
  for (std::size_t d : shape_) {
    if (d == 0) Fail(ErrorCode::kShapeMismatch, "zero-sized dimension");
  }
}

NdArray::NdArray(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(data.begin(), data.end()) {
  if (data_.size() != Product(shape_)) {
    Fail(ErrorCode::kShapeMismatch,
         "data length " + std::to_string(data_.size()) + " for shape " + ShapeString());
  }
}

NdArray NdArray::FromRows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r ? rows.begin()->size() : 0;
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) Fail(ErrorCode::kShapeMismatch, "ragged rows");
    data.insert(data.end(), row.begin(), row.end());
  }
  return NdArray({r, c}, std::move(data));
}

NdArray NdArray::Row(std::span<const double> values) {
  return NdArray({1, values.size()}, std::vector<double>(values.begin(), values.end()));
}

std::size_t NdArray::rows() const {
  if (shape_.size() <= 1) return 1;
  return size() / shape_.back();
}

std::size_t NdArray::cols() const { return shape_.empty() ? 0 : shape_.back(); }

bool NdArray::SameShape(const NdArray& other) const {
  return rows() == other.rows() && cols() == other.cols();
}

bool NdArray::AllFinite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

void NdArray::Fill(double v) { std::fill(data_.begin(), data_.end(), v); }

NdArray NdArray::Reshaped(std::vector<std::size_t> shape) const {
  if (Product(shape) != data_.size()) {
    Fail(ErrorCode::kShapeMismatch, "cannot reshape " + ShapeString());
  }
  NdArray out = *this;
  out.shape_ = std::move(shape);
  return out;
}

std::string NdArray::ShapeString() const {
  std::string s = "(";
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape_[i]);
  }
  return s + ")";
}

Param::Param(std::string n, NdArray v, bool is_trainable)
    : name(std::move(n)), value(std::move(v)), trainable(is_trainable) {
  grad = NdArray(value.shape(), 0.0);
}

}  // namespace pcqa
