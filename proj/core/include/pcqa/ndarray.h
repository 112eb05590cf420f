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

#ifndef PCQA_NDARRAY_H_
#define PCQA_NDARRAY_H_

#include <cstddef>
#include <initializer_list>
#include <new>
#include <span>
#include <string>
#include <vector>

namespace pcqa {

// Allocator with a fixed over-alignment. Numeric kernels pick their code
// path from the pointer alignment, so a fixed alignment keeps results
// independent of heap layout.
template <typename T, std::size_t Align>
struct AlignedAllocator {
  using value_type = T;
  template <typename U>
  struct rebind {
    using other = AlignedAllocator<U, Align>;
  };

  AlignedAllocator() = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U, Align>&) {}

  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), std::align_val_t{Align}));
  }
  void deallocate(T* p, std::size_t) { ::operator delete(p, std::align_val_t{Align}); }

  template <typename U>
  bool operator==(const AlignedAllocator<U, Align>&) const { return true; }
};

using AlignedDoubles = std::vector<double, AlignedAllocator<double, 64>>;

// Dense row-major array of doubles. Most numeric code treats arrays as 2-D
// (rows x cols); a rank-1 array of length n behaves as a 1 x n row.
class NdArray {
 public:
  NdArray() = default;
  explicit NdArray(std::vector<std::size_t> shape, double fill = 0.0);
  NdArray(std::vector<std::size_t> shape, std::vector<double> data);

  static NdArray Zeros(std::size_t rows, std::size_t cols) {
    return NdArray({rows, cols});
  }
  static NdArray FromRows(std::initializer_list<std::initializer_list<double>> rows);
  static NdArray Row(std::span<const double> values);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  std::size_t rows() const;
  std::size_t cols() const;

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& at(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }

  bool SameShape(const NdArray& other) const;
  bool AllFinite() const;
  void Fill(double v);
  // Reinterprets the data with a new shape of equal element count.
  NdArray Reshaped(std::vector<std::size_t> shape) const;

  std::string ShapeString() const;

  friend bool operator==(const NdArray&, const NdArray&) = default;

 private:
  std::vector<std::size_t> shape_;
  AlignedDoubles data_;
};

// A named parameter with its gradient accumulator. Frozen parameters never
// receive gradient.
struct Param {
  std::string name;
  NdArray value;
  NdArray grad;
  bool trainable = true;

  Param() = default;
  Param(std::string n, NdArray v, bool is_trainable = true);

  void ZeroGrad() { grad.Fill(0.0); }
};

}  // namespace pcqa

#endif  // PCQA_NDARRAY_H_
