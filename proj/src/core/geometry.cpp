#include "geometry.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <array>
#include <cmath>

#include "rng.hpp"

namespace uwvo {

namespace {

struct NormalizedPoints {
  std::vector<Eigen::Vector2d> x1, x2;
};

NormalizedPoints normalize_points(const CorrespondenceSet& cs,
                                  const CameraIntrinsics& k) {
  NormalizedPoints np;
  np.x1.reserve(cs.size());
  np.x2.reserve(cs.size());
  for (const auto& c : cs) {
    np.x1.push_back(k.normalize(c.x1));
    np.x2.push_back(k.normalize(c.x2));
  }
  return np;
}

// Isotropic (Hartley) conditioning transform for a subset of points.
Eigen::Matrix3d conditioning_transform(const std::vector<Eigen::Vector2d>& pts,
                                       const std::vector<int>& idx) {
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  for (int i : idx) centroid += pts[i];
  centroid /= static_cast<double>(idx.size());
  double mean_dist = 0.0;
  for (int i : idx) mean_dist += (pts[i] - centroid).norm();
  mean_dist /= static_cast<double>(idx.size());
  double s = mean_dist > 1e-300 ? std::sqrt(2.0) / mean_dist : 1.0;
  Eigen::Matrix3d t;
  t << s, 0, -s * centroid.x(), 0, s, -s * centroid.y(), 0, 0, 1;
  return t;
}

Eigen::Matrix3d project_to_essential(const Eigen::Matrix3d& e) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(
      e, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * Eigen::Vector3d(1, 1, 0).asDiagonal() *
         svd.matrixV().transpose();
}

// Weighted eight-point solve on the given subset. Returns false when the
// linear system does not pin down a unique (up to scale) solution, i.e. the
// geometry is degenerate (zero baseline, collinear points, ...).
bool solve_eight_point(const NormalizedPoints& np,
                       const std::vector<double>& weights,
                       const std::vector<int>& idx, Eigen::Matrix3d* out) {
  const int n = static_cast<int>(idx.size());
  Eigen::Matrix3d t1 = conditioning_transform(np.x1, idx);
  Eigen::Matrix3d t2 = conditioning_transform(np.x2, idx);

  Eigen::MatrixXd a(n, 9);
  for (int r = 0; r < n; ++r) {
    int i = idx[r];
    Eigen::Vector3d p1 = t1 * np.x1[i].homogeneous();
    Eigen::Vector3d p2 = t2 * np.x2[i].homogeneous();
    double w = weights[i];
    a.row(r) << w * p2.x() * p1.x(), w * p2.x() * p1.y(), w * p2.x(),
        w * p2.y() * p1.x(), w * p2.y() * p1.y(), w * p2.y(), w * p1.x(),
        w * p1.y(), w;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  // Unique null direction requires rank 8: the 8th singular value must be
  // clearly nonzero relative to the largest.
  if (sv(0) <= 0.0 || sv(7) / sv(0) < 1e-9) return false;

  Eigen::Matrix3d e_cond;
  Eigen::VectorXd null_vec = svd.matrixV().col(8);
  e_cond << null_vec(0), null_vec(1), null_vec(2), null_vec(3), null_vec(4),
      null_vec(5), null_vec(6), null_vec(7), null_vec(8);
  Eigen::Matrix3d e = t2.transpose() * e_cond * t1;
  *out = project_to_essential(e);
  return true;
}

void sample_distinct(SplitMix64& rng, size_t n, int k, std::vector<int>* out) {
  out->clear();
  while (static_cast<int>(out->size()) < k) {
    int cand = static_cast<int>(rng.next_below(n));
    if (std::find(out->begin(), out->end(), cand) == out->end())
      out->push_back(cand);
  }
}

// Midpoint triangulation depths of one correspondence for candidate (r, t)
// in the x2 = r * x1 + t mapping convention. Returns false when the rays are
// near parallel.
bool midpoint_depths(const Eigen::Matrix3d& r, const Eigen::Vector3d& t,
                     const Eigen::Vector2d& x1n, const Eigen::Vector2d& x2n,
                     double* depth1, double* depth2) {
  Eigen::Vector3d d1 = x1n.homogeneous();
  Eigen::Vector3d c2 = -r.transpose() * t;           // camera 2 center
  Eigen::Vector3d d2 = r.transpose() * x2n.homogeneous();
  Eigen::Vector3d w0 = -c2;                          // p1 - p2
  double a = d1.dot(d1);
  double b = d1.dot(d2);
  double c = d2.dot(d2);
  double d = d1.dot(w0);
  double e = d2.dot(w0);
  double denom = a * c - b * b;
  if (std::abs(denom) < 1e-12 * a * c) return false;
  *depth1 = (b * e - c * d) / denom;
  *depth2 = (a * e - b * d) / denom;
  return true;
}

}  // namespace

CameraIntrinsics::CameraIntrinsics(double fx_, double fy_, double cx_,
                                   double cy_)
    : fx(fx_), fy(fy_), cx(cx_), cy(cy_) {
  validate();
}

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0))
    throw InvalidArgumentError("CameraIntrinsics: focal lengths must be > 0");
  if (!std::isfinite(cx) || !std::isfinite(cy))
    throw InvalidArgumentError("CameraIntrinsics: non-finite principal point");
}

void CameraIntrinsics::validate_for(int width, int height) const {
  validate();
  if (cx < 0 || cx > width - 1 || cy < 0 || cy > height - 1)
    throw InvalidArgumentError(
        "CameraIntrinsics: principal point outside image");
}

RelativeMotion RelativeMotion::identity() { return RelativeMotion{}; }

RelativeMotion RelativeMotion::inverse() const {
  RelativeMotion inv;
  inv.rotation = rotation.conjugate();
  inv.translation = -(rotation.conjugate() * translation);
  return inv;
}

void RelativeMotion::validate() const {
  if (std::abs(rotation.norm() - 1.0) > 1e-9)
    throw InvalidArgumentError("RelativeMotion: quaternion not unit");
  if (std::abs(translation.norm() - 1.0) > 1e-9)
    throw InvalidArgumentError("RelativeMotion: translation not unit");
}

CorrespondenceSet flow_to_correspondences(const FlowField& flow,
                                          const WeightMap* weights, int stride,
                                          PoseBackend mode) {
  if (stride < 1)
    throw InvalidArgumentError("flow_to_correspondences: stride must be >= 1");
  if (weights &&
      (weights->width() != flow.width() || weights->height() != flow.height()))
    throw ShapeMismatchError("flow_to_correspondences: weight map mismatch");

  CorrespondenceSet cs;
  const double w_max = flow.width() - 1.0;
  const double h_max = flow.height() - 1.0;
  for (int y = 0; y < flow.height(); y += stride)
    for (int x = 0; x < flow.width(); x += stride) {
      double scale = 1.0, conf = 1.0;
      if (weights) {
        if (mode == PoseBackend::ScaledFlow)
          scale = weights->at(x, y);
        else
          conf = weights->at(x, y);
      }
      Eigen::Vector2d x1(x, y);
      Eigen::Vector2d x2(x + scale * flow.u(x, y), y + scale * flow.v(x, y));
      if (x2.x() < 0.0 || x2.x() > w_max || x2.y() < 0.0 || x2.y() > h_max)
        continue;
      cs.push_back({x1, x2, conf});
    }
  if (cs.size() < 8)
    throw DegenerateGeometryError(
        "flow_to_correspondences: fewer than 8 in-bounds correspondences");
  return cs;
}

// First-order geometric (Sampson) distance in normalized coordinates.
double sampson_error(const Eigen::Matrix3d& essential,
                     const Eigen::Vector2d& x1n, const Eigen::Vector2d& x2n) {
  Eigen::Vector3d p1 = x1n.homogeneous();
  Eigen::Vector3d p2 = x2n.homogeneous();
  Eigen::Vector3d e1 = essential * p1;
  Eigen::Vector3d e2 = essential.transpose() * p2;
  double num = p2.dot(e1);
  double denom = e1.x() * e1.x() + e1.y() * e1.y() + e2.x() * e2.x() +
                 e2.y() * e2.y();
  if (denom < 1e-300) return std::numeric_limits<double>::infinity();
  return std::abs(num) / std::sqrt(denom);
}

EssentialResult estimate_essential(const CorrespondenceSet& cs,
                                   const CameraIntrinsics& k,
                                   const RansacParams& ransac) {
  if (cs.size() < 8)
    throw InvalidArgumentError(
        "estimate_essential: at least 8 correspondences required");
  if (ransac.iterations < 1 || !(ransac.threshold > 0.0))
    throw InvalidArgumentError("estimate_essential: bad RANSAC parameters");
  k.validate();

  const size_t n = cs.size();
  NormalizedPoints np = normalize_points(cs, k);
  std::vector<double> weights(n);
  for (size_t i = 0; i < n; ++i) weights[i] = cs[i].weight;

  Eigen::Matrix3d best_e = Eigen::Matrix3d::Zero();
  double best_score = std::numeric_limits<double>::infinity();
  size_t best_count = 0;
  bool have_model = false;

  // MSAC scoring: truncated squared Sampson distance, scaled by the
  // per-correspondence confidence. Plain inlier counts are too coarse to
  // rank models reliably at subpixel thresholds. A global rescaling of the
  // weights rescales every score identically, so model selection is
  // invariant to it.
  const double thr2 = ransac.threshold * ransac.threshold;
  auto msac_score = [&](const Eigen::Matrix3d& e, size_t* count) {
    double score = 0.0;
    size_t cnt = 0;
    for (size_t i = 0; i < n; ++i) {
      double d = sampson_error(e, np.x1[i], np.x2[i]);
      double d2 = d * d;
      if (d2 < thr2) {
        score += weights[i] * d2;
        ++cnt;
      } else {
        score += weights[i] * thr2;
      }
    }
    if (count) *count = cnt;
    return score;
  };

  std::vector<int> sample;
  for (int iter = 0; iter < ransac.iterations; ++iter) {
    // Counter-based per-iteration RNG keeps results identical regardless of
    // how iterations are scheduled.
    SplitMix64 rng(hash_mix(ransac.seed, static_cast<uint64_t>(iter)));
    sample_distinct(rng, n, 8, &sample);
    Eigen::Matrix3d e;
    if (!solve_eight_point(np, weights, sample, &e)) continue;
    size_t count = 0;
    double score = msac_score(e, &count);
    if (count >= 8 && score < best_score) {
      best_score = score;
      best_count = count;
      best_e = e;
      have_model = true;
    }
  }

  if (!have_model || best_count < 8)
    throw DegenerateGeometryError(
        "estimate_essential: no non-degenerate model found (zero baseline or "
        "degenerate correspondences)");

  // Refit with an annealed inlier threshold (4x -> 2x -> 1x). Going straight
  // to the final threshold contracts onto whatever subset the winning
  // minimal sample happened to explain.
  Eigen::Matrix3d model = best_e;
  std::vector<int> inliers;
  for (double factor : {4.0, 2.0, 1.0}) {
    double gate = factor * ransac.threshold;
    inliers.clear();
    for (size_t i = 0; i < n; ++i)
      if (sampson_error(model, np.x1[i], np.x2[i]) < gate)
        inliers.push_back(static_cast<int>(i));
    if (inliers.size() < 8)
      throw DegenerateGeometryError(
          "estimate_essential: fewer than 8 inliers after refit");
    Eigen::Matrix3d refit;
    if (!solve_eight_point(np, weights, inliers, &refit))
      throw DegenerateGeometryError(
          "estimate_essential: inlier set is degenerate (zero baseline or "
          "collinear points)");
    model = refit;
  }

  EssentialResult result;
  result.essential = model;
  result.inlier_mask.assign(n, 0);
  for (size_t i = 0; i < n; ++i) {
    if (sampson_error(model, np.x1[i], np.x2[i]) < ransac.threshold) {
      result.inlier_mask[i] = 1;
      ++result.inlier_count;
    }
  }
  if (result.inlier_count < 8)
    throw DegenerateGeometryError(
        "estimate_essential: fewer than 8 inliers after refit");
  return result;
}

RelativeMotion decompose_essential(const Eigen::Matrix3d& essential,
                                   const CorrespondenceSet& cs,
                                   const CameraIntrinsics& k) {
  if (cs.empty())
    throw InvalidArgumentError("decompose_essential: empty correspondences");
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(
      essential, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(0) <= 0.0 || sv(2) / sv(0) > 0.05 ||
      (sv(0) - sv(1)) / sv(0) > 0.2)
    throw InvalidArgumentError(
        "decompose_essential: singular values not close to (1, 1, 0)");

  Eigen::Matrix3d u = svd.matrixU();
  Eigen::Matrix3d v = svd.matrixV();
  if (u.determinant() < 0) u = -u;
  if (v.determinant() < 0) v = -v;

  Eigen::Matrix3d w;
  w << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  std::array<Eigen::Matrix3d, 2> rs = {u * w * v.transpose(),
                                       u * w.transpose() * v.transpose()};
  std::array<Eigen::Vector3d, 2> ts = {u.col(2), -u.col(2)};

  NormalizedPoints np = normalize_points(cs, k);
  int best_count = -1;
  Eigen::Matrix3d best_r;
  Eigen::Vector3d best_t;
  for (const auto& r : rs)
    for (const auto& t : ts) {
      int count = 0;
      for (size_t i = 0; i < cs.size(); ++i) {
        double d1, d2;
        if (midpoint_depths(r, t, np.x1[i], np.x2[i], &d1, &d2) && d1 > 0.0 &&
            d2 > 0.0)
          ++count;
      }
      if (count > best_count) {
        best_count = count;
        best_r = r;
        best_t = t;
      }
    }

  if (best_count * 2 <= static_cast<int>(cs.size()))
    throw CheiralityError(
        "decompose_essential: no candidate places more than half the points "
        "in front of both cameras");

  // Convert the x2 = R x1 + t mapping into the pose of camera t+1 in camera
  // t's frame.
  RelativeMotion motion;
  Eigen::Matrix3d r_pose = best_r.transpose();
  motion.rotation = Eigen::Quaterniond(r_pose).normalized();
  if (motion.rotation.w() < 0.0) motion.rotation.coeffs() *= -1.0;
  motion.translation = (-(r_pose * best_t)).normalized();
  return motion;
}

RelativeMotion recover_motion(const Image& frame_a, const Image& frame_b,
                              const CameraIntrinsics& k,
                              const NormalizationParams& normalization,
                              const FlowParams& flow_params,
                              const RansacParams& ransac, PoseBackend mode,
                              int stride, int transmission_patch) {
  k.validate_for(frame_a.width(), frame_a.height());
  AmbientLight ambient = estimate_ambient(frame_a);
  // Dark channel needs strictly positive ambient channels; a black channel
  // means no backscatter information there anyway.
  AmbientLight safe_ambient(std::max(ambient[0], 1e-3),
                            std::max(ambient[1], 1e-3),
                            std::max(ambient[2], 1e-3));
  TransmissionMap t =
      estimate_transmission(frame_a, safe_ambient, transmission_patch);
  WeightMap weights = normalize_transmission(invert(t), normalization);
  FlowField flow = estimate_flow(frame_a, frame_b, flow_params);

  CorrespondenceSet cs;
  if (mode == PoseBackend::ScaledFlow) {
    FlowField weighted = weight_flow(flow, weights);
    cs = flow_to_correspondences(weighted, nullptr, stride, mode);
  } else {
    cs = flow_to_correspondences(flow, &weights, stride, mode);
  }

  EssentialResult er = estimate_essential(cs, k, ransac);
  CorrespondenceSet inliers;
  for (size_t i = 0; i < cs.size(); ++i)
    if (er.inlier_mask[i]) inliers.push_back(cs[i]);
  return decompose_essential(er.essential, inliers, k);
}

}  // namespace uwvo
