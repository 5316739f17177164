#pragma once

#include <optional>

#include "grid.hpp"
#include "imaging.hpp"

namespace uwvo {

// Dense per-pixel displacement field between two frames. u is the column
// displacement, v the row displacement, positive right/down, in pixels.
class FlowField {
 public:
  FlowField() : width_(0), height_(0) {}
  FlowField(int width, int height) : width_(width), height_(height) {
    if (width < 1 || height < 1)
      throw InvalidArgumentError("FlowField: non-positive size");
    uv_.assign(static_cast<size_t>(width) * height * 2, 0.0);
  }

  int width() const { return width_; }
  int height() const { return height_; }

  double& u(int x, int y) { return uv_[idx(x, y)]; }
  double u(int x, int y) const { return uv_[idx(x, y)]; }
  double& v(int x, int y) { return uv_[idx(x, y) + 1]; }
  double v(int x, int y) const { return uv_[idx(x, y) + 1]; }

  const std::vector<double>& data() const { return uv_; }
  std::vector<double>& data() { return uv_; }

  bool same_shape(const FlowField& o) const {
    return width_ == o.width_ && height_ == o.height_;
  }

  // Enforces finiteness and |u| <= width, |v| <= height.
  void validate() const;

 private:
  size_t idx(int x, int y) const {
    return (static_cast<size_t>(y) * width_ + x) * 2;
  }
  int width_, height_;
  std::vector<double> uv_;
};

struct FlowParams {
  int pyramid_levels = 4;
  int iterations_per_level = 10;
  int window = 15;

  void validate() const;
};

// Coarse-to-fine iterative Lucas-Kanade dense flow on the luminance channel.
// Deterministic: identical inputs give bit-identical fields.
FlowField estimate_flow(const Image& frame_a, const Image& frame_b,
                        const FlowParams& params);

// Hadamard product: both components of F(x) scaled by the weight at x.
FlowField weight_flow(const FlowField& flow, const WeightMap& weights);

// Bilinear backward warp of `frame` by `flow`; out-of-bounds samples clamp
// to the border. warp(frame_b, true_flow) approximates frame_a.
Image warp_image(const Image& frame, const FlowField& flow);

// Mean endpoint error sqrt((u-u*)^2 + (v-v*)^2) over the mask (all pixels if
// absent). Throws if the mask is empty.
double flow_epe(const FlowField& estimate, const FlowField& truth,
                const Mask* mask = nullptr);

}  // namespace uwvo
