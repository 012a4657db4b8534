/*
 * Copyright (c) 2026, The snapfwd Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
*/

#ifndef SNAPFWD_STATIC_VEC_HPP_
#define SNAPFWD_STATIC_VEC_HPP_

#include <array>
#include <cassert>
#include <cstddef>

namespace snapfwd {

/// Fixed-capacity vector for the per-node guard sets, which are evaluated
/// for every node on every step and must not allocate.
template <class T, std::size_t N>
class StaticVec {
 public:
  using value_type = T;
  using iterator = T*;
  using const_iterator = const T*;

  void push_back(const T& v) {
    assert(size_ < N);
    items_[size_++] = v;
  }
  void clear() { size_ = 0; }

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  T& operator[](std::size_t i) { return items_[i]; }
  const T& operator[](std::size_t i) const { return items_[i]; }

  iterator begin() { return items_.data(); }
  iterator end() { return items_.data() + size_; }
  const_iterator begin() const { return items_.data(); }
  const_iterator end() const { return items_.data() + size_; }

  template <class Pred>
  bool any_of(Pred p) const {
    for (const auto& v : *this) {
      if (p(v)) return true;
    }
    return false;
  }

 private:
  std::array<T, N> items_{};
  std::size_t size_ = 0;
};

}  // namespace snapfwd

#endif  // SNAPFWD_STATIC_VEC_HPP_
