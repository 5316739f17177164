#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "error.hpp"

namespace uwvo {

// W x H plane of doubles, row-major. Shared storage for depth maps,
// luminance, transmission and weight data.
class ScalarGrid {
 public:
  ScalarGrid() : width_(0), height_(0) {}
  ScalarGrid(int width, int height, double fill = 0.0)
      : width_(width), height_(height) {
    if (width < 1 || height < 1)
      throw InvalidArgumentError("ScalarGrid: non-positive size");
    data_.assign(static_cast<size_t>(width) * height, fill);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  size_t size() const { return data_.size(); }

  double& at(int x, int y) { return data_[static_cast<size_t>(y) * width_ + x]; }
  double at(int x, int y) const {
    return data_[static_cast<size_t>(y) * width_ + x];
  }
  double& operator[](size_t i) { return data_[i]; }
  double operator[](size_t i) const { return data_[i]; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  // Sample with clamp-to-edge border handling.
  double at_clamped(int x, int y) const {
    if (x < 0) x = 0;
    if (x >= width_) x = width_ - 1;
    if (y < 0) y = 0;
    if (y >= height_) y = height_ - 1;
    return at(x, y);
  }

  double sample_bilinear(double x, double y) const {
    int x0 = static_cast<int>(std::floor(x));
    int y0 = static_cast<int>(std::floor(y));
    double fx = x - x0;
    double fy = y - y0;
    double v00 = at_clamped(x0, y0);
    double v10 = at_clamped(x0 + 1, y0);
    double v01 = at_clamped(x0, y0 + 1);
    double v11 = at_clamped(x0 + 1, y0 + 1);
    return (1 - fy) * ((1 - fx) * v00 + fx * v10) +
           fy * ((1 - fx) * v01 + fx * v11);
  }

  double min_value() const {
    double m = data_[0];
    for (double v : data_) m = v < m ? v : m;
    return m;
  }
  double max_value() const {
    double m = data_[0];
    for (double v : data_) m = v > m ? v : m;
    return m;
  }
  double mean() const {
    double s = 0.0;
    for (double v : data_) s += v;
    return s / static_cast<double>(data_.size());
  }

  bool same_shape(const ScalarGrid& o) const {
    return width_ == o.width_ && height_ == o.height_;
  }

 private:
  int width_, height_;
  std::vector<double> data_;
};

// Per-pixel validity flags.
class Mask {
 public:
  Mask() : width_(0), height_(0) {}
  Mask(int width, int height, bool fill = true)
      : width_(width), height_(height),
        data_(static_cast<size_t>(width) * height, fill ? 1 : 0) {}

  int width() const { return width_; }
  int height() const { return height_; }
  bool at(int x, int y) const {
    return data_[static_cast<size_t>(y) * width_ + x] != 0;
  }
  void set(int x, int y, bool v) {
    data_[static_cast<size_t>(y) * width_ + x] = v ? 1 : 0;
  }
  size_t count() const {
    size_t n = 0;
    for (uint8_t v : data_) n += v;
    return n;
  }

 private:
  int width_, height_;
  std::vector<uint8_t> data_;
};

// Builds a mask that keeps only pixels at least `margin` away from the border.
Mask interior_mask(int width, int height, int margin);

// H x W x 3 radiance image, planar storage (R plane, G plane, B plane),
// values kept in [0, 1].
class Image {
 public:
  static constexpr int kMinDimension = 8;

  Image() : width_(0), height_(0) {}
  Image(int width, int height, double fill = 0.0)
      : width_(width), height_(height) {
    check_dims(width, height);
    data_.assign(static_cast<size_t>(width) * height * 3, fill);
  }

  // Takes ownership of planar data (3 * W * H doubles). Non-finite values are
  // rejected; out-of-range values are clamped to [0, 1].
  static Image from_planar(int width, int height, std::vector<double> data);

  int width() const { return width_; }
  int height() const { return height_; }
  size_t plane_size() const { return static_cast<size_t>(width_) * height_; }

  double& at(int x, int y, int c) {
    return data_[c * plane_size() + static_cast<size_t>(y) * width_ + x];
  }
  double at(int x, int y, int c) const {
    return data_[c * plane_size() + static_cast<size_t>(y) * width_ + x];
  }

  double at_clamped(int x, int y, int c) const {
    if (x < 0) x = 0;
    if (x >= width_) x = width_ - 1;
    if (y < 0) y = 0;
    if (y >= height_) y = height_ - 1;
    return at(x, y, c);
  }

  double sample_bilinear(double x, double y, int c) const {
    int x0 = static_cast<int>(std::floor(x));
    int y0 = static_cast<int>(std::floor(y));
    double fx = x - x0;
    double fy = y - y0;
    double v00 = at_clamped(x0, y0, c);
    double v10 = at_clamped(x0 + 1, y0, c);
    double v01 = at_clamped(x0, y0 + 1, c);
    double v11 = at_clamped(x0 + 1, y0 + 1, c);
    return (1 - fy) * ((1 - fx) * v00 + fx * v10) +
           fy * ((1 - fx) * v01 + fx * v11);
  }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  bool same_shape(const Image& o) const {
    return width_ == o.width_ && height_ == o.height_;
  }

  void clamp01() {
    for (double& v : data_) v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
  }

 private:
  static void check_dims(int width, int height) {
    if (width < kMinDimension || height < kMinDimension)
      throw InvalidArgumentError("Image: dimensions must be at least " +
                                 std::to_string(kMinDimension) + "x" +
                                 std::to_string(kMinDimension));
  }

  int width_, height_;
  std::vector<double> data_;
};

// Rec.601 luma; flow estimation runs on this single channel.
ScalarGrid luminance(const Image& img);

}  // namespace uwvo
