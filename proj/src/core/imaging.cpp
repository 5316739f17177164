#include "imaging.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

namespace uwvo {

namespace {

void check_same_shape(int aw, int ah, int bw, int bh, const char* what) {
  if (aw != bw || ah != bh)
    throw ShapeMismatchError(std::string(what) + ": dimension mismatch (" +
                             std::to_string(aw) + "x" + std::to_string(ah) +
                             " vs " + std::to_string(bw) + "x" +
                             std::to_string(bh) + ")");
}

// Sliding-window minimum over one row/column (monotonic deque), window = 2r+1,
// clamped at the borders.
void sliding_min(const double* src, double* dst, int n, int stride, int r) {
  std::deque<int> q;
  auto value = [&](int i) { return src[static_cast<size_t>(i) * stride]; };
  int right = 0;
  for (int i = 0; i < n; ++i) {
    int hi = std::min(n - 1, i + r);
    for (; right <= hi; ++right) {
      while (!q.empty() && value(q.back()) >= value(right)) q.pop_back();
      q.push_back(right);
    }
    while (q.front() < i - r) q.pop_front();
    dst[static_cast<size_t>(i) * stride] = value(q.front());
  }
}

// Separable grayscale erosion with a (2r+1)^2 window.
ScalarGrid min_filter(const ScalarGrid& src, int r) {
  const int w = src.width(), h = src.height();
  ScalarGrid tmp(w, h), out(w, h);
  for (int y = 0; y < h; ++y)
    sliding_min(&src.data()[static_cast<size_t>(y) * w],
                &tmp.data()[static_cast<size_t>(y) * w], w, 1, r);
  for (int x = 0; x < w; ++x)
    sliding_min(&tmp.data()[x], &out.data()[x], h, w, r);
  return out;
}

// min over channels of I(y,c)/A_c, then min over the patch window.
ScalarGrid dark_channel(const Image& img, const AmbientLight& ambient,
                        int patch) {
  ScalarGrid ratio(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      double m = img.at(x, y, 0) / ambient[0];
      for (int c = 1; c < 3; ++c)
        m = std::min(m, img.at(x, y, c) / ambient[c]);
      ratio.at(x, y) = m;
    }
  }
  return min_filter(ratio, patch / 2);
}

constexpr int kAmbientPatch = 15;

}  // namespace

AmbientLight::AmbientLight(double r, double g, double b) : rgb{r, g, b} {
  for (double v : rgb)
    if (!std::isfinite(v) || v < 0.0 || v > 1.0)
      throw InvalidArgumentError("AmbientLight: components must be in [0,1]");
}

TransmissionMap TransmissionMap::from_grid(ScalarGrid grid) {
  for (double v : grid.data())
    if (!std::isfinite(v) || v < kTransmissionEpsilon || v > 1.0)
      throw InvalidArgumentError(
          "TransmissionMap: values must lie in [epsilon, 1]");
  return TransmissionMap(std::move(grid));
}

TransmissionMap TransmissionMap::clamped(ScalarGrid grid) {
  for (double& v : grid.data()) {
    if (!std::isfinite(v))
      throw InvalidArgumentError("TransmissionMap: non-finite value");
    v = std::clamp(v, kTransmissionEpsilon, 1.0);
  }
  return TransmissionMap(std::move(grid));
}

InverseTransmissionMap InverseTransmissionMap::from_grid(ScalarGrid grid) {
  for (double v : grid.data())
    if (!std::isfinite(v) || v < 1.0 || v > 1.0 / kTransmissionEpsilon + 1e-9)
      throw InvalidArgumentError(
          "InverseTransmissionMap: values must lie in [1, 1/epsilon]");
  return InverseTransmissionMap(std::move(grid));
}

NormalizationParams::NormalizationParams(double alpha_, double beta_bias_)
    : alpha(alpha_), beta_bias(beta_bias_) {
  validate();
}

void NormalizationParams::validate() const {
  if (!std::isfinite(alpha) || alpha < 0.0)
    throw InvalidArgumentError("NormalizationParams: alpha must be >= 0");
  if (!std::isfinite(beta_bias) || beta_bias <= 0.0)
    throw InvalidArgumentError("NormalizationParams: beta_bias must be > 0");
  // Worst case sigma = alpha * max(t) / beta_bias with max(t) = 1; sigma >= 1
  // would produce non-positive weights.
  if (alpha / beta_bias >= 1.0)
    throw InvalidArgumentError(
        "NormalizationParams: alpha/beta_bias must be < 1 (weights would not "
        "stay positive)");
}

WeightMap WeightMap::uniform(int width, int height, double value) {
  if (!(value > 0.0))
    throw InvalidArgumentError("WeightMap::uniform: value must be > 0");
  return WeightMap(ScalarGrid(width, height, value), 0.0, value, value);
}

WeightMap WeightMap::from_grid(ScalarGrid grid) {
  double lo = grid.min_value();
  double hi = grid.max_value();
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo > 0.0))
    throw InvalidArgumentError(
        "WeightMap::from_grid: values must be finite and strictly positive");
  return WeightMap(std::move(grid), 1.0 - lo, lo, hi);
}

HazeParams::HazeParams(std::array<double, 3> attenuation_,
                       AmbientLight ambient_)
    : attenuation(attenuation_), ambient(ambient_) {
  for (double b : attenuation)
    if (!std::isfinite(b) || b < 0.0)
      throw InvalidArgumentError("HazeParams: attenuation must be >= 0");
}

Image apply_degradation(const Image& radiance, const TransmissionMap& t,
                        const AmbientLight& ambient) {
  check_same_shape(radiance.width(), radiance.height(), t.width(), t.height(),
                   "apply_degradation");
  Image out(radiance.width(), radiance.height());
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < radiance.height(); ++y)
      for (int x = 0; x < radiance.width(); ++x) {
        double tv = t.at(x, y);
        out.at(x, y, c) =
            radiance.at(x, y, c) * tv + ambient[c] * (1.0 - tv);
      }
  out.clamp01();
  return out;
}

Image apply_degradation(const Image& radiance,
                        const std::array<TransmissionMap, 3>& t,
                        const AmbientLight& ambient) {
  for (const auto& tc : t)
    check_same_shape(radiance.width(), radiance.height(), tc.width(),
                     tc.height(), "apply_degradation");
  Image out(radiance.width(), radiance.height());
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < radiance.height(); ++y)
      for (int x = 0; x < radiance.width(); ++x) {
        double tv = t[c].at(x, y);
        out.at(x, y, c) =
            radiance.at(x, y, c) * tv + ambient[c] * (1.0 - tv);
      }
  out.clamp01();
  return out;
}

Image restore_radiance(const Image& observed, const TransmissionMap& t,
                       const AmbientLight& ambient) {
  check_same_shape(observed.width(), observed.height(), t.width(), t.height(),
                   "restore_radiance");
  Image out(observed.width(), observed.height());
  for (int c = 0; c < 3; ++c)
    for (int y = 0; y < observed.height(); ++y)
      for (int x = 0; x < observed.width(); ++x) {
        double tv = t.at(x, y);
        out.at(x, y, c) =
            (observed.at(x, y, c) - ambient[c] * (1.0 - tv)) / tv;
      }
  out.clamp01();
  return out;
}

AmbientLight estimate_ambient(const Image& observed) {
  const int w = observed.width();
  // Haziest pixels carry the purest ambient color, so rank by dark channel
  // computed against a neutral (all-ones) reference.
  ScalarGrid dark = dark_channel(observed, AmbientLight(1.0, 1.0, 1.0),
                                 kAmbientPatch);
  const size_t n = dark.size();
  size_t k = std::max<size_t>(1, n / 1000);
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::nth_element(order.begin(), order.begin() + (k - 1), order.end(),
                   [&](size_t a, size_t b) {
                     if (dark[a] != dark[b]) return dark[a] > dark[b];
                     return a < b;  // deterministic tie-break
                   });
  double sum[3] = {0, 0, 0};
  for (size_t i = 0; i < k; ++i) {
    size_t idx = order[i];
    int x = static_cast<int>(idx % w);
    int y = static_cast<int>(idx / w);
    for (int c = 0; c < 3; ++c) sum[c] += observed.at(x, y, c);
  }
  return AmbientLight(sum[0] / k, sum[1] / k, sum[2] / k);
}

TransmissionMap estimate_transmission(const Image& observed,
                                      const AmbientLight& ambient, int patch) {
  if (patch < 3 || patch % 2 == 0)
    throw InvalidArgumentError(
        "estimate_transmission: patch must be odd and >= 3");
  for (int c = 0; c < 3; ++c)
    if (ambient[c] <= 0.0)
      throw InvalidArgumentError(
          "estimate_transmission: ambient channels must be > 0");
  ScalarGrid dark = dark_channel(observed, ambient, patch);
  ScalarGrid t(observed.width(), observed.height());
  for (size_t i = 0; i < t.size(); ++i)
    t[i] = std::clamp(1.0 - kDarkChannelOmega * dark[i], kTransmissionEpsilon,
                      1.0);
  return TransmissionMap::from_grid(std::move(t));
}

InverseTransmissionMap invert(const TransmissionMap& t) {
  ScalarGrid g(t.width(), t.height());
  for (size_t i = 0; i < g.size(); ++i) g[i] = 1.0 / t.grid()[i];
  return InverseTransmissionMap(std::move(g));
}

TransmissionMap invert(const InverseTransmissionMap& t_inv) {
  ScalarGrid g(t_inv.width(), t_inv.height());
  for (size_t i = 0; i < g.size(); ++i) g[i] = 1.0 / t_inv.grid()[i];
  return TransmissionMap::from_grid(std::move(g));
}

WeightMap normalize_transmission(const InverseTransmissionMap& t_inv,
                                 const NormalizationParams& params) {
  params.validate();
  const ScalarGrid& inv = t_inv.grid();
  double max_t = 0.0;
  for (size_t i = 0; i < inv.size(); ++i)
    max_t = std::max(max_t, 1.0 / inv[i]);
  double sigma = params.alpha * max_t / params.beta_bias;
  if (sigma >= 1.0)
    throw InvalidArgumentError(
        "normalize_transmission: sigma >= 1 would produce non-positive "
        "weights");
  const double offset = 1.0 - sigma;
  ScalarGrid out(inv.width(), inv.height());
  for (size_t i = 0; i < inv.size(); ++i)
    out[i] = params.alpha * (1.0 / inv[i]) + offset;
  const double lower = offset;
  const double upper = params.alpha * max_t + offset;
  return WeightMap(std::move(out), sigma, lower, upper);
}

}  // namespace uwvo
