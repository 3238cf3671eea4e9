#pragma once

#include <bit>
#include <cmath>
#include <span>

#include "rprobe/errors.hpp"

namespace rprobe {

// In-place normalized Walsh-Hadamard transform (H_d tensored over log2(size)
// qubits). Self-inverse. size must be a power of two.
template <typename T>
void fwht(std::span<T> data) {
  const std::size_t len = data.size();
  if (len == 0 || !std::has_single_bit(len)) throw ArgumentError("FWHT length must be a power of two");
  for (std::size_t h = 1; h < len; h <<= 1) {
    for (std::size_t i = 0; i < len; i += h << 1) {
      for (std::size_t j = i; j < i + h; ++j) {
        const T a = data[j];
        const T b = data[j + h];
        data[j] = a + b;
        data[j + h] = a - b;
      }
    }
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(len));
  for (auto& v : data) v *= scale;
}

}  // namespace rprobe
