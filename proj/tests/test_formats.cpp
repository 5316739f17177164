#include <doctest.h>

#include <fstream>

#include "flow_io.hpp"
#include "image_io.hpp"
#include "test_support.hpp"
#include "toml.hpp"
#include "trajectory.hpp"

using namespace uwvo;

namespace {

std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string((std::istreambuf_iterator<char>(in)), {});
}

#ifndef UWVO_GOLDEN_DIR
#define UWVO_GOLDEN_DIR "tests/golden"
#endif
const std::string kGolden = UWVO_GOLDEN_DIR;

}  // namespace

TEST_CASE("flo writer matches the golden bytes") {
  FlowField f(2, 2);
  f.u(0, 0) = 1.5;
  f.v(0, 0) = -0.25;
  f.u(1, 0) = 0.0;
  f.v(1, 0) = 0.5;
  f.u(0, 1) = -2.0;
  f.v(0, 1) = 1.0;
  f.u(1, 1) = 0.125;
  f.v(1, 1) = 1.0;
  std::string path = testsup::temp_dir("fmt") + "/out.flo";
  save_flo(f, path);
  CHECK(read_bytes(path) == read_bytes(kGolden + "/golden.flo"));

  FlowField back = load_flo(kGolden + "/golden.flo");
  REQUIRE(back.width() == 2);
  REQUIRE(back.height() == 2);
  CHECK(back.u(0, 1) == -2.0);
  CHECK(back.v(1, 1) == 1.0);
}

TEST_CASE("pfm writer matches the golden bytes") {
  ScalarGrid g(3, 2);
  g.at(0, 0) = 0.5;
  g.at(1, 0) = 1.0;
  g.at(2, 0) = 0.25;
  g.at(0, 1) = 2.0;
  g.at(1, 1) = -1.5;
  g.at(2, 1) = 0.0625;
  std::string path = testsup::temp_dir("fmt") + "/out.pfm";
  save_pfm(g, path);
  CHECK(read_bytes(path) == read_bytes(kGolden + "/golden.pfm"));

  ScalarGrid back = load_pfm(kGolden + "/golden.pfm");
  REQUIRE(back.width() == 3);
  REQUIRE(back.height() == 2);
  CHECK(back.at(1, 1) == -1.5);
  CHECK(back.at(2, 0) == 0.25);
}

TEST_CASE("tum writer matches the golden bytes") {
  Trajectory t;
  Pose p;
  p.timestamp = 0.0;
  t.append(p);
  p.timestamp = 0.5;
  p.position = {1.5, -2.25, 0.125};
  p.rotation = Eigen::Quaterniond(0.5, 0.5, 0.5, 0.5);
  t.append(p);
  p.timestamp = 1.0;
  p.position = {-0.75, 3.0, -4.5};
  p.rotation = Eigen::Quaterniond::Identity();
  t.append(p);
  std::string path = testsup::temp_dir("fmt") + "/out.tum";
  save_tum(t, path);
  CHECK(read_bytes(path) == read_bytes(kGolden + "/golden.tum"));

  Trajectory back = load_tum(kGolden + "/golden.tum");
  REQUIRE(back.size() == 3);
  CHECK(back[1].rotation.x() == 0.5);
  CHECK(back[2].position.x() == -0.75);
}

TEST_CASE("flo roundtrips bit-exactly") {
  SplitMix64 rng(6);
  FlowField f(17, 9);
  for (double& v : f.data())
    v = static_cast<float>(rng.next_double(-8, 8));  // float32-representable
  std::string dir = testsup::temp_dir("fmt");
  save_flo(f, dir + "/r.flo");
  FlowField back = load_flo(dir + "/r.flo");
  CHECK(back.data() == f.data());
  save_flo(back, dir + "/r2.flo");
  CHECK(read_bytes(dir + "/r.flo") == read_bytes(dir + "/r2.flo"));
}

TEST_CASE("pfm roundtrips bit-exactly") {
  SplitMix64 rng(8);
  ScalarGrid g(13, 7);
  for (double& v : g.data()) v = static_cast<float>(rng.next_double(0, 5));
  std::string dir = testsup::temp_dir("fmt");
  save_pfm(g, dir + "/r.pfm");
  ScalarGrid back = load_pfm(dir + "/r.pfm");
  CHECK(back.data() == g.data());
}

TEST_CASE("png roundtrip is exact at 8-bit resolution") {
  Image img = testsup::make_textured_image(32, 24, 3);
  std::string dir = testsup::temp_dir("fmt");
  save_image(img, dir + "/img.png");
  Image back = load_image(dir + "/img.png");
  REQUIRE(back.width() == 32);
  double max_err = 0.0;
  for (size_t i = 0; i < img.data().size(); ++i)
    max_err = std::max(max_err, std::abs(back.data()[i] - img.data()[i]));
  CHECK(max_err <= 0.5 / 255.0 + 1e-12);
  // Re-encoding the decoded image is byte-stable.
  save_image(back, dir + "/img2.png");
  Image back2 = load_image(dir + "/img2.png");
  CHECK(back2.data() == back.data());
  CHECK(read_bytes(dir + "/img.png") == read_bytes(dir + "/img2.png"));
}

TEST_CASE("ppm and pgm roundtrip") {
  Image img = testsup::make_textured_image(16, 12, 4);
  std::string dir = testsup::temp_dir("fmt");
  save_image(img, dir + "/img.ppm");
  Image back = load_image(dir + "/img.ppm");
  double max_err = 0.0;
  for (size_t i = 0; i < img.data().size(); ++i)
    max_err = std::max(max_err, std::abs(back.data()[i] - img.data()[i]));
  CHECK(max_err <= 0.5 / 255.0 + 1e-12);
  save_image(img, dir + "/img.pgm");  // luminance projection, just parses back
  Image gray = load_image(dir + "/img.pgm");
  CHECK(gray.width() == 16);
}

TEST_CASE("corrupt inputs raise parse errors") {
  std::string dir = testsup::temp_dir("fmt");
  {
    std::ofstream out(dir + "/bad.flo", std::ios::binary);
    out << "nope";
  }
  CHECK_THROWS_AS(load_flo(dir + "/bad.flo"), ParseError);
  {
    std::ofstream out(dir + "/bad.pfm", std::ios::binary);
    out << "PF\n2 2\n-1.0\n";  // color PFM unsupported
  }
  CHECK_THROWS_AS(load_pfm(dir + "/bad.pfm"), ParseError);
  CHECK_THROWS_AS(load_image(dir + "/missing.png"), IoError);
}

TEST_CASE("toml parser handles the config subset") {
  std::string text =
      "# comment\n"
      "seed = 42\n"
      "fps = 12.5\n"
      "[normalization]\n"
      "alpha = 0.25  # inline comment\n"
      "beta_bias = 4.0\n"
      "[pose]\n"
      "mode = \"confidence\"\n"
      "flags = [1, 2, 3]\n"
      "enabled = true\n";
  toml::Table t = toml::parse(text);
  CHECK(t.get_int("seed", 0) == 42);
  CHECK(t.get_double("fps", 0) == 12.5);
  CHECK(t.get_double("normalization.alpha", 0) == 0.25);
  CHECK(t.get_string("pose.mode", "") == "confidence");
  CHECK(t.get_bool("pose.enabled", false));
  auto arr = t.get_double_array("pose.flags");
  REQUIRE(arr.size() == 3);
  CHECK(arr[2] == 3.0);

  // Serialize then reparse.
  toml::Table back = toml::parse(toml::serialize(t));
  CHECK(back.get_double("normalization.alpha", 0) == 0.25);
  CHECK(back.get_int("seed", 0) == 42);

  CHECK_THROWS_AS(toml::parse("key 42\n"), ParseError);
  try {
    toml::parse("a = 1\nb = ???\n", "cfg");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("cfg:2") != std::string::npos);
  }
}
