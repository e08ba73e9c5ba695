#pragma once

#include "gapcert/types.hpp"

#include <span>
#include <vector>

namespace gapcert {

/// Mixed-radix little-endian encoding of finite product configurations.
/// Site k contributes coordinate c_k in {0, ..., radix_k - 1}; the packed
/// state index is sum_k c_k * prod_{l<k} radix_l.
class StateSpace {
 public:
  StateSpace() = default;

  explicit StateSpace(std::vector<int> radices) : radices_(std::move(radices)) {
    strides_.resize(radices_.size());
    size_ = 1;
    for (std::size_t k = 0; k < radices_.size(); ++k) {
      if (radices_[k] < 1) throw InvalidInput("StateSpace: radix must be >= 1");
      strides_[k] = size_;
      size_ *= static_cast<std::size_t>(radices_[k]);
    }
  }

  int num_sites() const { return static_cast<int>(radices_.size()); }
  int radix(int site) const { return radices_[static_cast<std::size_t>(site)]; }
  std::size_t size() const { return size_; }
  std::size_t stride(int site) const { return strides_[static_cast<std::size_t>(site)]; }

  int coord(std::size_t state, int site) const {
    return static_cast<int>((state / strides_[static_cast<std::size_t>(site)]) %
                            static_cast<std::size_t>(radices_[static_cast<std::size_t>(site)]));
  }

  std::size_t with_coord(std::size_t state, int site, int value) const {
    const std::size_t s = strides_[static_cast<std::size_t>(site)];
    const int cur = coord(state, site);
    return state + (static_cast<std::ptrdiff_t>(value) - cur) * static_cast<std::ptrdiff_t>(s);
  }

  std::vector<int> decode(std::size_t state) const {
    std::vector<int> config(radices_.size());
    for (std::size_t k = 0; k < radices_.size(); ++k) {
      config[k] = static_cast<int>(state % static_cast<std::size_t>(radices_[k]));
      state /= static_cast<std::size_t>(radices_[k]);
    }
    return config;
  }

  std::size_t encode(std::span<const int> config) const {
    std::size_t state = 0;
    for (std::size_t k = radices_.size(); k-- > 0;) {
      state = state * static_cast<std::size_t>(radices_[k]) + static_cast<std::size_t>(config[k]);
    }
    return state;
  }

 private:
  std::vector<int> radices_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 1;
};

}  // namespace gapcert
