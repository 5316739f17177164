#include "trajectory.hpp"

#include <Eigen/SVD>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace uwvo {

namespace {

std::vector<Eigen::Vector3d> matched_positions(const Trajectory& t,
                                               const Association& assoc,
                                               bool first) {
  std::vector<Eigen::Vector3d> out;
  out.reserve(assoc.pairs.size());
  for (const auto& [ei, ri] : assoc.pairs)
    out.push_back(first ? t[ei].position : t[ri].position);
  return out;
}

AlignmentResult umeyama_on_points(const std::vector<Eigen::Vector3d>& src,
                                  const std::vector<Eigen::Vector3d>& dst,
                                  bool with_scale) {
  const size_t n = src.size();
  Eigen::Vector3d mu_src = Eigen::Vector3d::Zero();
  Eigen::Vector3d mu_dst = Eigen::Vector3d::Zero();
  for (size_t i = 0; i < n; ++i) {
    mu_src += src[i];
    mu_dst += dst[i];
  }
  mu_src /= static_cast<double>(n);
  mu_dst /= static_cast<double>(n);

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  double var_src = 0.0;
  for (size_t i = 0; i < n; ++i) {
    Eigen::Vector3d s = src[i] - mu_src;
    Eigen::Vector3d d = dst[i] - mu_dst;
    cov += d * s.transpose();
    var_src += s.squaredNorm();
  }
  cov /= static_cast<double>(n);
  var_src /= static_cast<double>(n);

  Eigen::JacobiSVD<Eigen::Matrix3d> svd(
      cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(0) <= 0.0 || sv(1) / sv(0) < 1e-9)
    throw DegenerateGeometryError(
        "umeyama_align: points are collinear (rank-deficient covariance)");

  Eigen::Vector3d s_diag = Eigen::Vector3d::Ones();
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0)
    s_diag(2) = -1.0;

  AlignmentResult result;
  result.rotation =
      svd.matrixU() * s_diag.asDiagonal() * svd.matrixV().transpose();
  result.scale =
      with_scale ? (sv.dot(s_diag)) / var_src : 1.0;
  result.translation = mu_dst - result.scale * (result.rotation * mu_src);
  return result;
}

void format_double(std::string& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

}  // namespace

void Trajectory::append(Pose pose) {
  if (!std::isfinite(pose.timestamp))
    throw InvalidArgumentError("Trajectory: non-finite timestamp");
  if (!poses_.empty() && pose.timestamp <= poses_.back().timestamp)
    throw InvalidArgumentError(
        "Trajectory: timestamps must be strictly increasing");
  double norm = pose.rotation.norm();
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw InvalidArgumentError("Trajectory: invalid quaternion");
  pose.rotation.coeffs() /= norm;
  poses_.push_back(std::move(pose));
}

Association associate(const Trajectory& estimate, const Trajectory& reference,
                      double tolerance) {
  Association assoc;
  size_t ri = 0;
  std::vector<bool> ref_used(reference.size(), false);
  for (size_t ei = 0; ei < estimate.size(); ++ei) {
    double ts = estimate[ei].timestamp;
    while (ri + 1 < reference.size() &&
           std::abs(reference[ri + 1].timestamp - ts) <=
               std::abs(reference[ri].timestamp - ts))
      ++ri;
    if (ri < reference.size() && !ref_used[ri] &&
        std::abs(reference[ri].timestamp - ts) <= tolerance) {
      assoc.pairs.emplace_back(ei, ri);
      ref_used[ri] = true;
    } else {
      ++assoc.dropped_estimate;
    }
  }
  assoc.dropped_reference = reference.size() - assoc.pairs.size();
  return assoc;
}

Trajectory compose_trajectory(const std::vector<RelativeMotion>& motions,
                              const std::vector<double>& timestamps) {
  if (motions.empty())
    throw InvalidArgumentError("compose_trajectory: no motions");
  if (timestamps.size() != motions.size() + 1)
    throw InvalidArgumentError(
        "compose_trajectory: need exactly motions+1 timestamps");
  Trajectory traj;
  Pose current;
  current.timestamp = timestamps[0];
  traj.append(current);
  for (size_t i = 0; i < motions.size(); ++i) {
    current.position += current.rotation * motions[i].translation;
    current.rotation =
        (current.rotation * motions[i].rotation).normalized();
    current.timestamp = timestamps[i + 1];
    traj.append(current);
  }
  return traj;
}

AlignmentResult umeyama_align(const Trajectory& estimate,
                              const Trajectory& reference, bool with_scale) {
  Association assoc = associate(estimate, reference);
  if (assoc.pairs.size() < 3)
    throw InvalidArgumentError(
        "umeyama_align: need at least 3 associated poses");
  return umeyama_on_points(matched_positions(estimate, assoc, true),
                           matched_positions(reference, assoc, false),
                           with_scale);
}

double ate(const Trajectory& estimate, const Trajectory& reference,
           bool align) {
  Association assoc = associate(estimate, reference);
  if (assoc.pairs.size() < 2)
    throw InvalidArgumentError("ate: fewer than 2 associated poses");
  AlignmentResult alignment;  // identity when align is off
  if (align) {
    if (assoc.pairs.size() < 3)
      throw InvalidArgumentError("ate: alignment needs at least 3 poses");
    alignment =
        umeyama_on_points(matched_positions(estimate, assoc, true),
                          matched_positions(reference, assoc, false), true);
  }
  double sum_sq = 0.0;
  for (const auto& [ei, ri] : assoc.pairs)
    sum_sq +=
        (alignment.apply(estimate[ei].position) - reference[ri].position)
            .squaredNorm();
  return std::sqrt(sum_sq / static_cast<double>(assoc.pairs.size()));
}

double rte(const Trajectory& estimate, const Trajectory& reference,
           int delta_frames) {
  Association assoc = associate(estimate, reference);
  if (assoc.pairs.size() < 2)
    throw InvalidArgumentError("rte: fewer than 2 associated poses");
  if (delta_frames < 1 ||
      delta_frames >= static_cast<int>(assoc.pairs.size()))
    throw InvalidArgumentError(
        "rte: delta_frames must be in [1, matched poses)");

  double sum_sq = 0.0;
  size_t windows = assoc.pairs.size() - delta_frames;
  for (size_t i = 0; i < windows; ++i) {
    const auto& [e0, r0] = assoc.pairs[i];
    const auto& [e1, r1] = assoc.pairs[i + delta_frames];
    // Rigid first-pose alignment of the window (no scale).
    Eigen::Matrix3d r_align = (reference[r0].rotation *
                               estimate[e0].rotation.conjugate())
                                  .toRotationMatrix();
    Eigen::Vector3d mapped_end =
        r_align * (estimate[e1].position - estimate[e0].position) +
        reference[r0].position;
    sum_sq += (mapped_end - reference[r1].position).squaredNorm();
  }
  return std::sqrt(sum_sq / static_cast<double>(windows));
}

double trajectory_length(const Trajectory& t) {
  if (t.size() < 2)
    throw InvalidArgumentError("trajectory_length: need at least 2 poses");
  double total = 0.0;
  for (size_t i = 1; i < t.size(); ++i)
    total += (t[i].position - t[i - 1].position).norm();
  return total;
}

Trajectory load_tum(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_tum: cannot open " + path);
  Trajectory traj;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    std::istringstream ss(line);
    double ts, tx, ty, tz, qx, qy, qz, qw;
    if (!(ss >> ts >> tx >> ty >> tz >> qx >> qy >> qz >> qw))
      throw ParseError("load_tum: malformed pose at " + path + ":" +
                       std::to_string(line_no));
    std::string extra;
    if (ss >> extra)
      throw ParseError("load_tum: trailing fields at " + path + ":" +
                       std::to_string(line_no));
    Pose p;
    p.timestamp = ts;
    p.position = {tx, ty, tz};
    p.rotation = Eigen::Quaterniond(qw, qx, qy, qz);
    try {
      traj.append(std::move(p));
    } catch (const InvalidArgumentError& e) {
      throw ParseError("load_tum: " + std::string(e.what()) + " at " + path +
                       ":" + std::to_string(line_no));
    }
  }
  return traj;
}

void save_tum(const Trajectory& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("save_tum: cannot open " + path);
  std::string buf = "# timestamp tx ty tz qx qy qz qw\n";
  for (const Pose& p : t) {
    format_double(buf, p.timestamp);
    for (double v : {p.position.x(), p.position.y(), p.position.z(),
                     p.rotation.x(), p.rotation.y(), p.rotation.z(),
                     p.rotation.w()}) {
      buf.push_back(' ');
      format_double(buf, v);
    }
    buf.push_back('\n');
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("save_tum: write failed for " + path);
}

Trajectory transform_trajectory(const Trajectory& t,
                                const AlignmentResult& alignment) {
  Trajectory out;
  Eigen::Quaterniond q(alignment.rotation);
  for (const Pose& p : t) {
    Pose m = p;
    m.position = alignment.apply(p.position);
    m.rotation = (q * p.rotation).normalized();
    out.append(std::move(m));
  }
  return out;
}

}  // namespace uwvo
