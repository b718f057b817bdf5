#pragma once

#include <array>
#include <cassert>
#include <cstdint>
#include <vector>

namespace graspkit {

struct Pixel {
  int u = 0;  // column
  int v = 0;  // row

  friend bool operator==(const Pixel&, const Pixel&) = default;
};

/// Dense row-major image plane.
template <typename T>
class Image {
 public:
  Image() = default;
  Image(int width, int height, T fill = T{})
      : width_(width), height_(height), data_(static_cast<size_t>(width) * height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  bool contains(int u, int v) const { return u >= 0 && v >= 0 && u < width_ && v < height_; }

  T& operator()(int u, int v) {
    assert(contains(u, v));
    return data_[static_cast<size_t>(v) * width_ + u];
  }
  const T& operator()(int u, int v) const {
    assert(contains(u, v));
    return data_[static_cast<size_t>(v) * width_ + u];
  }

  T& operator[](size_t i) { return data_[i]; }
  const T& operator[](size_t i) const { return data_[i]; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using Rgb = std::array<std::uint8_t, 3>;
using Mask = Image<std::uint8_t>;
using LabelId = std::uint16_t;

}  // namespace graspkit
