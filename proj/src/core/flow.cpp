#include "flow.hpp"

#include <algorithm>
#include <cmath>

namespace uwvo {

namespace {

// 5-tap binomial blur + 2x subsample.
ScalarGrid downsample(const ScalarGrid& src) {
  static const double k[5] = {1 / 16.0, 4 / 16.0, 6 / 16.0, 4 / 16.0, 1 / 16.0};
  const int w = src.width(), h = src.height();
  ScalarGrid blur_x(w, h), blur(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int i = -2; i <= 2; ++i) s += k[i + 2] * src.at_clamped(x + i, y);
      blur_x.at(x, y) = s;
    }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int i = -2; i <= 2; ++i) s += k[i + 2] * blur_x.at_clamped(x, y + i);
      blur.at(x, y) = s;
    }
  const int ow = w / 2, oh = h / 2;
  ScalarGrid out(ow, oh);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) out.at(x, y) = blur.at(2 * x, 2 * y);
  return out;
}

// Centered spatial gradients, clamp-to-edge.
void gradients(const ScalarGrid& img, ScalarGrid& gx, ScalarGrid& gy) {
  const int w = img.width(), h = img.height();
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      gx.at(x, y) = 0.5 * (img.at_clamped(x + 1, y) - img.at_clamped(x - 1, y));
      gy.at(x, y) = 0.5 * (img.at_clamped(x, y + 1) - img.at_clamped(x, y - 1));
    }
}

// Separable Gaussian-weighted window sum with radius r (sigma = r/2),
// clamp-to-edge. A flat box window is not an option here: its transfer
// function has negative sidelobes, which turn the per-pixel update into an
// amplifier for mid-frequency flow error.
class WindowSum {
 public:
  explicit WindowSum(int r) : r_(r), taps_(2 * r + 1) {
    const double sigma = std::max(0.5 * r, 1.0);
    for (int i = -r; i <= r; ++i)
      taps_[i + r] = std::exp(-0.5 * (i * i) / (sigma * sigma));
  }

  void apply(const ScalarGrid& src, ScalarGrid& dst, ScalarGrid& tmp) const {
    const int w = src.width(), h = src.height();
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        double s = 0.0;
        for (int i = -r_; i <= r_; ++i)
          s += taps_[i + r_] * src.at_clamped(x + i, y);
        tmp.at(x, y) = s;
      }
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        double s = 0.0;
        for (int i = -r_; i <= r_; ++i)
          s += taps_[i + r_] * tmp.at_clamped(x, y + i);
        dst.at(x, y) = s;
      }
  }

  // Sum of all window weights; scales eigenvalue thresholds.
  double weight_total() const {
    double s = 0.0;
    for (double t : taps_) s += t;
    return s * s;
  }

 private:
  int r_;
  std::vector<double> taps_;
};

// 3x3 median on both flow components. Applied once per warp iteration; the
// per-pixel solves otherwise amplify high-frequency flow noise from one
// iteration to the next instead of contracting it.
void median_filter_flow(FlowField& flow, FlowField& scratch) {
  const int w = flow.width(), h = flow.height();
  auto median9 = [](double* v) {
    std::nth_element(v, v + 4, v + 9);
    return v[4];
  };
  double vals[9];
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      int k = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          int cx = std::clamp(x + dx, 0, w - 1);
          int cy = std::clamp(y + dy, 0, h - 1);
          vals[k++] = flow.u(cx, cy);
        }
      scratch.u(x, y) = median9(vals);
      k = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          int cx = std::clamp(x + dx, 0, w - 1);
          int cy = std::clamp(y + dy, 0, h - 1);
          vals[k++] = flow.v(cx, cy);
        }
      scratch.v(x, y) = median9(vals);
    }
  std::swap(flow, scratch);
}

// Resize flow to (w, h), scaling displacements by the size ratio.
FlowField upsample_flow(const FlowField& coarse, int w, int h) {
  FlowField fine(w, h);
  const double sx = static_cast<double>(coarse.width()) / w;
  const double sy = static_cast<double>(coarse.height()) / h;
  const double ux = static_cast<double>(w) / coarse.width();
  const double uy = static_cast<double>(h) / coarse.height();
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double cx = (x + 0.5) * sx - 0.5;
      double cy = (y + 0.5) * sy - 0.5;
      int x0 = static_cast<int>(std::floor(cx));
      int y0 = static_cast<int>(std::floor(cy));
      double fx = cx - x0, fy = cy - y0;
      auto sample = [&](auto&& get) {
        auto cl = [&](int xx, int yy) {
          xx = std::clamp(xx, 0, coarse.width() - 1);
          yy = std::clamp(yy, 0, coarse.height() - 1);
          return get(xx, yy);
        };
        return (1 - fy) * ((1 - fx) * cl(x0, y0) + fx * cl(x0 + 1, y0)) +
               fy * ((1 - fx) * cl(x0, y0 + 1) + fx * cl(x0 + 1, y0 + 1));
      };
      fine.u(x, y) = ux * sample([&](int a, int b) { return coarse.u(a, b); });
      fine.v(x, y) = uy * sample([&](int a, int b) { return coarse.v(a, b); });
    }
  return fine;
}

void lk_refine(const ScalarGrid& a, const ScalarGrid& b, FlowField& flow,
               int iterations, int window) {
  const int w = a.width(), h = a.height();
  const int r = window / 2;
  ScalarGrid ax(w, h), ay(w, h);
  gradients(a, ax, ay);

  ScalarGrid bw(w, h), ix(w, h), iy(w, h);
  ScalarGrid pxx(w, h), pxy(w, h), pyy(w, h), pxt(w, h), pyt(w, h);
  ScalarGrid sxx(w, h), sxy(w, h), syy(w, h), sxt(w, h), syt(w, h);
  ScalarGrid tmp(w, h);
  const WindowSum window_sum(r);

  const double npix = window_sum.weight_total();
  const double min_eig = 1e-7 * npix;
  // Pyramid handoff leaves at most a few pixels of residual motion, so each
  // iteration only needs a small correction; larger steps are runaway solves
  // on badly conditioned windows.
  const double max_step = 2.0;

  ScalarGrid it(w, h);
  FlowField median_scratch(w, h);
  // Pyramid trust region: a level refines the upsampled prior by at most
  // half a window, the method's validity range. Keeps weak-texture pixels
  // from walking away over many iterations.
  const double trust = 0.5 * window;
  const FlowField init = flow;
  auto clamp_to_trust = [&]() {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        flow.u(x, y) = std::clamp(flow.u(x, y), init.u(x, y) - trust,
                                  init.u(x, y) + trust);
        flow.v(x, y) = std::clamp(flow.v(x, y), init.v(x, y) - trust,
                                  init.v(x, y) + trust);
      }
  };
  for (int iter = 0; iter < iterations; ++iter) {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        double bx = x + flow.u(x, y);
        double by = y + flow.v(x, y);
        bw.at(x, y) = b.sample_bilinear(bx, by);
        it.at(x, y) = bw.at(x, y) - a.at(x, y);
      }
    // Symmetric gradients (template and warped image averaged) cut the
    // first-order bias of the update, which otherwise shows up as a radial
    // magnitude error in the recovered flow.
    gradients(bw, ix, iy);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        ix.at(x, y) = 0.5 * (ix.at(x, y) + ax.at(x, y));
        iy.at(x, y) = 0.5 * (iy.at(x, y) + ay.at(x, y));
      }
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        pxx.at(x, y) = ix.at(x, y) * ix.at(x, y);
        pxy.at(x, y) = ix.at(x, y) * iy.at(x, y);
        pyy.at(x, y) = iy.at(x, y) * iy.at(x, y);
        pxt.at(x, y) = ix.at(x, y) * it.at(x, y);
        pyt.at(x, y) = iy.at(x, y) * it.at(x, y);
      }
    window_sum.apply(pxx, sxx, tmp);
    window_sum.apply(pxy, sxy, tmp);
    window_sum.apply(pyy, syy, tmp);
    window_sum.apply(pxt, sxt, tmp);
    window_sum.apply(pyt, syt, tmp);

    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        double gxx = sxx.at(x, y), gxy = sxy.at(x, y), gyy = syy.at(x, y);
        double tr = gxx + gyy;
        double det = gxx * gyy - gxy * gxy;
        double disc = tr * tr - 4.0 * det;
        double root = std::sqrt(disc > 0.0 ? disc : 0.0);
        double lam_min = 0.5 * (tr - root);
        double lam_max = 0.5 * (tr + root);
        // Skip flat windows and aperture-problem (near rank-1) windows; the
        // pyramid prior is a better answer there than an exploding solve.
        if (lam_min < min_eig || lam_min < 1e-3 * lam_max) continue;
        // Light Tikhonov damping keeps marginal windows stable.
        double eps = 1e-4 * tr;
        double dxx = gxx + eps, dyy = gyy + eps;
        double ddet = dxx * dyy - gxy * gxy;
        double bx = -sxt.at(x, y), by = -syt.at(x, y);
        double du = (dyy * bx - gxy * by) / ddet;
        double dv = (dxx * by - gxy * bx) / ddet;
        du = std::clamp(du, -max_step, max_step);
        dv = std::clamp(dv, -max_step, max_step);
        flow.u(x, y) += du;
        flow.v(x, y) += dv;
      }
    clamp_to_trust();
    median_filter_flow(flow, median_scratch);
  }
}

}  // namespace

void FlowField::validate() const {
  for (int y = 0; y < height_; ++y)
    for (int x = 0; x < width_; ++x) {
      if (!std::isfinite(u(x, y)) || !std::isfinite(v(x, y)))
        throw InvalidArgumentError("FlowField: non-finite displacement");
      if (std::abs(u(x, y)) > width_ || std::abs(v(x, y)) > height_)
        throw InvalidArgumentError("FlowField: displacement exceeds image size");
    }
}

void FlowParams::validate() const {
  if (pyramid_levels < 1)
    throw InvalidArgumentError("FlowParams: pyramid_levels must be >= 1");
  if (iterations_per_level < 1)
    throw InvalidArgumentError("FlowParams: iterations_per_level must be >= 1");
  if (window < 5 || window % 2 == 0)
    throw InvalidArgumentError("FlowParams: window must be odd and >= 5");
}

FlowField estimate_flow(const Image& frame_a, const Image& frame_b,
                        const FlowParams& params) {
  params.validate();
  if (!frame_a.same_shape(frame_b))
    throw ShapeMismatchError("estimate_flow: frame sizes differ");
  const int min_dim = std::min(frame_a.width(), frame_a.height());
  const long needed = static_cast<long>(params.window)
                      << (params.pyramid_levels - 1);
  if (min_dim < needed)
    throw InvalidArgumentError(
        "estimate_flow: image too small for " +
        std::to_string(params.pyramid_levels) + " pyramid levels with window " +
        std::to_string(params.window));

  std::vector<ScalarGrid> pyr_a, pyr_b;
  pyr_a.push_back(luminance(frame_a));
  pyr_b.push_back(luminance(frame_b));
  for (int l = 1; l < params.pyramid_levels; ++l) {
    pyr_a.push_back(downsample(pyr_a.back()));
    pyr_b.push_back(downsample(pyr_b.back()));
  }

  FlowField flow(pyr_a.back().width(), pyr_a.back().height());
  for (int l = params.pyramid_levels - 1; l >= 0; --l) {
    if (l != params.pyramid_levels - 1)
      flow = upsample_flow(flow, pyr_a[l].width(), pyr_a[l].height());
    lk_refine(pyr_a[l], pyr_b[l], flow, params.iterations_per_level,
              params.window);
  }

  // Guard the field invariant (|u| <= W, |v| <= H).
  const double uw = frame_a.width(), vh = frame_a.height();
  for (double* p = flow.data().data(); p < flow.data().data() + flow.data().size();
       p += 2) {
    p[0] = std::clamp(p[0], -uw, uw);
    p[1] = std::clamp(p[1], -vh, vh);
  }
  return flow;
}

FlowField weight_flow(const FlowField& flow, const WeightMap& weights) {
  if (flow.width() != weights.width() || flow.height() != weights.height())
    throw ShapeMismatchError("weight_flow: dimension mismatch");
  FlowField out(flow.width(), flow.height());
  for (int y = 0; y < flow.height(); ++y)
    for (int x = 0; x < flow.width(); ++x) {
      double wv = weights.at(x, y);
      out.u(x, y) = flow.u(x, y) * wv;
      out.v(x, y) = flow.v(x, y) * wv;
    }
  return out;
}

Image warp_image(const Image& frame, const FlowField& flow) {
  if (frame.width() != flow.width() || frame.height() != flow.height())
    throw ShapeMismatchError("warp_image: dimension mismatch");
  Image out(frame.width(), frame.height());
  for (int y = 0; y < frame.height(); ++y)
    for (int x = 0; x < frame.width(); ++x) {
      double sx = x + flow.u(x, y);
      double sy = y + flow.v(x, y);
      for (int c = 0; c < 3; ++c)
        out.at(x, y, c) = frame.sample_bilinear(sx, sy, c);
    }
  return out;
}

double flow_epe(const FlowField& estimate, const FlowField& truth,
                const Mask* mask) {
  if (!estimate.same_shape(truth))
    throw ShapeMismatchError("flow_epe: dimension mismatch");
  if (mask && (mask->width() != estimate.width() ||
               mask->height() != estimate.height()))
    throw ShapeMismatchError("flow_epe: mask dimension mismatch");
  double sum = 0.0;
  size_t n = 0;
  for (int y = 0; y < estimate.height(); ++y)
    for (int x = 0; x < estimate.width(); ++x) {
      if (mask && !mask->at(x, y)) continue;
      double du = estimate.u(x, y) - truth.u(x, y);
      double dv = estimate.v(x, y) - truth.v(x, y);
      sum += std::sqrt(du * du + dv * dv);
      ++n;
    }
  if (n == 0) throw InvalidArgumentError("flow_epe: empty mask");
  return sum / static_cast<double>(n);
}

}  // namespace uwvo
