#include <doctest.h>

#include <cmath>
#include <fstream>

#include "test_support.hpp"
#include "trajectory.hpp"

using namespace uwvo;

namespace {

Trajectory random_trajectory(uint64_t seed, size_t n, double t0 = 0.0) {
  SplitMix64 rng(seed);
  Trajectory t;
  Eigen::Vector3d p = Eigen::Vector3d::Zero();
  for (size_t i = 0; i < n; ++i) {
    Pose pose;
    pose.timestamp = t0 + 0.1 * static_cast<double>(i);
    p += Eigen::Vector3d(rng.next_double(-1, 1), rng.next_double(-1, 1),
                         rng.next_double(-0.2, 0.2));
    pose.position = p;
    Eigen::Vector3d axis(rng.next_double(-1, 1), rng.next_double(-1, 1),
                         rng.next_double(-1, 1));
    if (axis.norm() < 1e-9) axis = Eigen::Vector3d::UnitZ();
    pose.rotation = Eigen::Quaterniond(
        Eigen::AngleAxisd(rng.next_double(0, 0.4), axis.normalized()));
    t.append(pose);
  }
  return t;
}

Trajectory apply_similarity(const Trajectory& t, double s,
                            const Eigen::Matrix3d& r,
                            const Eigen::Vector3d& trans) {
  AlignmentResult a;
  a.scale = s;
  a.rotation = r;
  a.translation = trans;
  return transform_trajectory(t, a);
}

}  // namespace

TEST_CASE("compose_trajectory") {
  SUBCASE("single translation step") {
    RelativeMotion m;
    m.translation = Eigen::Vector3d::UnitX();
    Trajectory t = compose_trajectory({m}, {0.0, 0.1});
    REQUIRE(t.size() == 2);
    CHECK(t[0].position.norm() == 0.0);
    CHECK((t[1].position - Eigen::Vector3d(1, 0, 0)).norm() < 1e-15);
  }
  SUBCASE("empty input is rejected") {
    CHECK_THROWS_AS(compose_trajectory({}, {0.0}), InvalidArgumentError);
    RelativeMotion m;
    CHECK_THROWS_AS(compose_trajectory({m}, {0.0}), InvalidArgumentError);
  }
  SUBCASE("chained rotations trace a regular polygon") {
    // Unit step then yaw by theta each time: vertices of a regular N-gon
    // with circumradius 1 / (2 sin(theta/2)).
    const int n = 12;
    const double theta = 2.0 * M_PI / n;
    RelativeMotion m;
    m.translation = Eigen::Vector3d::UnitX();
    m.rotation =
        Eigen::Quaterniond(Eigen::AngleAxisd(theta, Eigen::Vector3d::UnitZ()));
    std::vector<RelativeMotion> motions(n, m);
    std::vector<double> stamps;
    for (int i = 0; i <= n; ++i) stamps.push_back(0.1 * i);
    Trajectory t = compose_trajectory(motions, stamps);
    REQUIRE(t.size() == n + 1);
    // Closed-form: after N steps the chain returns to the start.
    CHECK((t[n].position - t[0].position).norm() < 1e-9);
    // Every step has unit length and all vertices lie on one circle whose
    // circumcenter sits on the perpendicular of the first edge midpoint.
    const double radius = 1.0 / (2.0 * std::sin(theta / 2.0));
    Eigen::Vector3d mid = 0.5 * (t[0].position + t[1].position);
    Eigen::Vector3d edge = (t[1].position - t[0].position).normalized();
    Eigen::Vector3d inward = Eigen::Vector3d::UnitZ().cross(edge);
    double apothem = radius * std::cos(theta / 2.0);
    Eigen::Vector3d c = mid + apothem * inward;
    for (size_t i = 0; i < t.size(); ++i)
      CHECK(std::abs((t[i].position - c).norm() - radius) < 1e-9);
  }
}

TEST_CASE("umeyama_align") {
  Trajectory ref = random_trajectory(1, 40);
  SUBCASE("identity for equal trajectories") {
    AlignmentResult a = umeyama_align(ref, ref, true);
    CHECK(a.scale == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((a.rotation - Eigen::Matrix3d::Identity()).norm() < 1e-12);
    CHECK(a.translation.norm() < 1e-12);
  }
  SUBCASE("recovers a known similarity transform") {
    Eigen::Matrix3d r =
        Eigen::AngleAxisd(0.8, Eigen::Vector3d(1, -2, 0.5).normalized())
            .toRotationMatrix();
    Eigen::Vector3d trans(4.0, -2.0, 1.5);
    const double s = 2.5;
    // The transform mapping estimate -> reference must invert this.
    Trajectory est = apply_similarity(ref, s, r, trans);
    AlignmentResult a = umeyama_align(est, ref, true);
    Trajectory mapped = transform_trajectory(est, a);
    for (size_t i = 0; i < ref.size(); ++i)
      CHECK((mapped[i].position - ref[i].position).norm() < 1e-9);
    CHECK(a.scale == doctest::Approx(1.0 / s).epsilon(1e-9));
  }
  SUBCASE("with_scale=false forces scale 1") {
    Trajectory est = apply_similarity(ref, 2.0, Eigen::Matrix3d::Identity(),
                                      Eigen::Vector3d::Zero());
    AlignmentResult a = umeyama_align(est, ref, false);
    CHECK(a.scale == 1.0);
    double residual = ate(est, ref, false);
    CHECK(residual > 0.0);
  }
  SUBCASE("collinear points are rejected") {
    Trajectory line_est, line_ref;
    for (int i = 0; i < 10; ++i) {
      Pose p;
      p.timestamp = 0.1 * i;
      p.position = Eigen::Vector3d(static_cast<double>(i), 0, 0);
      line_est.append(p);
      line_ref.append(p);
    }
    CHECK_THROWS_AS(umeyama_align(line_est, line_ref, true),
                    DegenerateGeometryError);
  }
}

TEST_CASE("ate") {
  Trajectory ref = random_trajectory(2, 50);
  SUBCASE("identical trajectories score zero") {
    CHECK(ate(ref, ref, false) == 0.0);
  }
  SUBCASE("constant offset without alignment") {
    Eigen::Vector3d d(0.3, -0.4, 1.2);
    Trajectory est = apply_similarity(ref, 1.0, Eigen::Matrix3d::Identity(),
                                      d);
    CHECK(ate(est, ref, false) == doctest::Approx(d.norm()).epsilon(1e-12));
  }
  SUBCASE("matches a brute-force RMSE oracle") {
    Trajectory est = random_trajectory(3, 50);
    double sum = 0.0;
    for (size_t i = 0; i < est.size(); ++i)
      sum += (est[i].position - ref[i].position).squaredNorm();
    double oracle = std::sqrt(sum / est.size());
    CHECK(ate(est, ref, false) == doctest::Approx(oracle).epsilon(1e-12));
  }
  SUBCASE("aligned ATE is invariant to similarity transforms") {
    Trajectory est = random_trajectory(4, 50);
    double base = ate(est, ref, true);
    Eigen::Matrix3d r =
        Eigen::AngleAxisd(1.1, Eigen::Vector3d(0.2, 1, -3).normalized())
            .toRotationMatrix();
    Trajectory moved =
        apply_similarity(est, 3.7, r, Eigen::Vector3d(10, -5, 2));
    CHECK(ate(moved, ref, true) == doctest::Approx(base).epsilon(1e-9));
  }
  SUBCASE("alignment self-consistency") {
    Trajectory est = random_trajectory(5, 50);
    AlignmentResult a = umeyama_align(est, ref, true);
    Trajectory mapped = transform_trajectory(est, a);
    CHECK(ate(mapped, ref, false) ==
          doctest::Approx(ate(est, ref, true)).epsilon(1e-12));
  }
}

TEST_CASE("rte") {
  Trajectory ref = random_trajectory(6, 60);
  SUBCASE("identical trajectories score zero") {
    CHECK(rte(ref, ref, 10) < 1e-12);
  }
  SUBCASE("delta = N-1 reduces to one full-window comparison") {
    Trajectory est = random_trajectory(7, 60);
    double one_window = rte(est, ref, 59);
    // Oracle: single window starting at 0.
    Eigen::Matrix3d r_align =
        (ref[0].rotation * est[0].rotation.conjugate()).toRotationMatrix();
    Eigen::Vector3d mapped =
        r_align * (est[59].position - est[0].position) + ref[0].position;
    CHECK(one_window ==
          doctest::Approx((mapped - ref[59].position).norm()).epsilon(1e-12));
  }
  SUBCASE("matches a brute-force window oracle on a drifting estimate") {
    // Reference plus small increasing drift.
    Trajectory est;
    for (size_t i = 0; i < ref.size(); ++i) {
      Pose p = ref[i];
      p.position += Eigen::Vector3d(0.01 * i, 0.005 * i, 0.0);
      est.append(p);
    }
    const int delta = 12;
    double sum = 0.0;
    size_t windows = ref.size() - delta;
    for (size_t i = 0; i < windows; ++i) {
      Eigen::Matrix3d r_align =
          (ref[i].rotation * est[i].rotation.conjugate()).toRotationMatrix();
      Eigen::Vector3d mapped =
          r_align * (est[i + delta].position - est[i].position) +
          ref[i].position;
      sum += (mapped - ref[i + delta].position).squaredNorm();
    }
    double oracle = std::sqrt(sum / windows);
    CHECK(rte(est, ref, delta) == doctest::Approx(oracle).epsilon(1e-12));
  }
  SUBCASE("bad delta is rejected") {
    CHECK_THROWS_AS(rte(ref, ref, 0), InvalidArgumentError);
    CHECK_THROWS_AS(rte(ref, ref, 60), InvalidArgumentError);
  }
}

TEST_CASE("trajectory_length") {
  Trajectory t;
  Pose p;
  p.timestamp = 0.0;
  p.position = {0, 0, 0};
  t.append(p);
  p.timestamp = 1.0;
  p.position = {1, 0, 0};
  t.append(p);
  p.timestamp = 2.0;
  p.position = {1, 1, 0};
  t.append(p);
  CHECK(trajectory_length(t) == doctest::Approx(2.0).epsilon(1e-15));

  Trajectory seg;
  p.timestamp = 0.0;
  p.position = {0, 0, 0};
  seg.append(p);
  p.timestamp = 1.0;
  p.position = {3, 4, 0};
  seg.append(p);
  CHECK(trajectory_length(seg) == doctest::Approx(5.0).epsilon(1e-15));

  SUBCASE("matches a direct-sum oracle and is rigid-invariant") {
    Trajectory walk = random_trajectory(8, 30);
    double oracle = 0.0;
    for (size_t i = 1; i < walk.size(); ++i)
      oracle += (walk[i].position - walk[i - 1].position).norm();
    CHECK(trajectory_length(walk) == doctest::Approx(oracle).epsilon(1e-12));
    Eigen::Matrix3d r =
        Eigen::AngleAxisd(0.7, Eigen::Vector3d(1, 1, 1).normalized())
            .toRotationMatrix();
    Trajectory moved =
        apply_similarity(walk, 1.0, r, Eigen::Vector3d(5, 6, 7));
    CHECK(trajectory_length(moved) ==
          doctest::Approx(oracle).epsilon(1e-9));
  }
}

TEST_CASE("tum io") {
  SUBCASE("parses a simple pose line and skips comments") {
    std::string dir = testsup::temp_dir("tum");
    std::string path = dir + "/simple.tum";
    {
      std::ofstream out(path);
      out << "# a comment\n";
      out << "0.0 1 2 3 0 0 0 1\n";
      out << "\n";
      out << "0.5 4 5 6 0 0 0 1\n";
    }
    Trajectory t = load_tum(path);
    REQUIRE(t.size() == 2);
    CHECK((t[0].position - Eigen::Vector3d(1, 2, 3)).norm() == 0.0);
    CHECK(t[0].rotation.w() == 1.0);
    CHECK(t[0].timestamp == 0.0);
  }
  SUBCASE("roundtrip preserves poses") {
    Trajectory t = random_trajectory(9, 25, 1000.0);
    std::string path = testsup::temp_dir("tum") + "/round.tum";
    save_tum(t, path);
    Trajectory back = load_tum(path);
    REQUIRE(back.size() == t.size());
    for (size_t i = 0; i < t.size(); ++i) {
      CHECK(back[i].timestamp == t[i].timestamp);
      CHECK((back[i].position - t[i].position).norm() == 0.0);
      CHECK(std::abs(back[i].rotation.dot(t[i].rotation)) ==
            doctest::Approx(1.0).epsilon(1e-15));
    }
    // A second save emits identical bytes.
    std::string path2 = testsup::temp_dir("tum") + "/round2.tum";
    save_tum(back, path2);
    std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
    std::string s1((std::istreambuf_iterator<char>(f1)), {});
    std::string s2((std::istreambuf_iterator<char>(f2)), {});
    CHECK(s1 == s2);
  }
  SUBCASE("malformed line reports its number") {
    std::string path = testsup::temp_dir("tum") + "/bad.tum";
    {
      std::ofstream out(path);
      out << "0.0 1 2 3 0 0 0 1\n";
      out << "0.5 oops\n";
    }
    try {
      load_tum(path);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find(":2") != std::string::npos);
    }
  }
  SUBCASE("non-monotone timestamps are rejected") {
    std::string path = testsup::temp_dir("tum") + "/mono.tum";
    {
      std::ofstream out(path);
      out << "1.0 0 0 0 0 0 0 1\n";
      out << "0.5 1 0 0 0 0 0 1\n";
    }
    CHECK_THROWS_AS(load_tum(path), ParseError);
  }
}

TEST_CASE("associate matches by nearest timestamp") {
  Trajectory a = random_trajectory(10, 20);
  // Same instants shifted by less than the tolerance.
  Trajectory b;
  for (size_t i = 0; i < a.size(); ++i) {
    Pose p = a[i];
    p.timestamp += 0.005;
    b.append(p);
  }
  Association assoc = associate(a, b);
  CHECK(assoc.pairs.size() == a.size());
  CHECK(assoc.dropped_estimate == 0);

  // Out-of-tolerance reference is dropped.
  Trajectory c;
  for (size_t i = 0; i < a.size(); ++i) {
    Pose p = a[i];
    p.timestamp += 0.05;
    c.append(p);
  }
  Association far = associate(a, c);
  CHECK(far.pairs.empty());
}
