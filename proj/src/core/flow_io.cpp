#include "flow_io.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

namespace uwvo {

namespace {

constexpr char kFloMagic[4] = {'P', 'I', 'E', 'H'};

void put_u32le(std::vector<char>& buf, uint32_t v) {
  buf.push_back(static_cast<char>(v & 0xff));
  buf.push_back(static_cast<char>((v >> 8) & 0xff));
  buf.push_back(static_cast<char>((v >> 16) & 0xff));
  buf.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_f32le(std::vector<char>& buf, float f) {
  uint32_t v;
  std::memcpy(&v, &f, 4);
  put_u32le(buf, v);
}

uint32_t get_u32le(const char* p) {
  return static_cast<uint8_t>(p[0]) | (static_cast<uint8_t>(p[1]) << 8) |
         (static_cast<uint8_t>(p[2]) << 16) |
         (static_cast<uint8_t>(p[3]) << 24);
}

float get_f32le(const char* p) {
  uint32_t v = get_u32le(p);
  float f;
  std::memcpy(&f, &v, 4);
  return f;
}

// Standard 55-entry color wheel (RY/YG/GC/CB/BM/MR sectors).
std::vector<std::array<double, 3>> make_color_wheel() {
  const int ry = 15, yg = 6, gc = 4, cb = 11, bm = 13, mr = 6;
  std::vector<std::array<double, 3>> wheel;
  wheel.reserve(ry + yg + gc + cb + bm + mr);
  for (int i = 0; i < ry; ++i)
    wheel.push_back({1.0, static_cast<double>(i) / ry, 0.0});
  for (int i = 0; i < yg; ++i)
    wheel.push_back({1.0 - static_cast<double>(i) / yg, 1.0, 0.0});
  for (int i = 0; i < gc; ++i)
    wheel.push_back({0.0, 1.0, static_cast<double>(i) / gc});
  for (int i = 0; i < cb; ++i)
    wheel.push_back({0.0, 1.0 - static_cast<double>(i) / cb, 1.0});
  for (int i = 0; i < bm; ++i)
    wheel.push_back({static_cast<double>(i) / bm, 0.0, 1.0});
  for (int i = 0; i < mr; ++i)
    wheel.push_back({1.0, 0.0, 1.0 - static_cast<double>(i) / mr});
  return wheel;
}

}  // namespace

FlowField load_flo(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_flo: cannot open " + path);
  char header[12];
  in.read(header, 12);
  if (in.gcount() != 12 || std::memcmp(header, kFloMagic, 4) != 0)
    throw ParseError("load_flo: bad magic in " + path);
  int w = static_cast<int32_t>(get_u32le(header + 4));
  int h = static_cast<int32_t>(get_u32le(header + 8));
  if (w < 1 || h < 1 || w > 1 << 20 || h > 1 << 20)
    throw ParseError("load_flo: implausible size in " + path);
  std::vector<char> buf(static_cast<size_t>(w) * h * 2 * 4);
  in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (static_cast<size_t>(in.gcount()) != buf.size())
    throw ParseError("load_flo: truncated data in " + path);
  FlowField flow(w, h);
  const char* p = buf.data();
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      flow.u(x, y) = get_f32le(p);
      flow.v(x, y) = get_f32le(p + 4);
      p += 8;
    }
  flow.validate();
  return flow;
}

void save_flo(const FlowField& flow, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("save_flo: cannot open " + path);
  std::vector<char> buf;
  buf.reserve(12 + flow.data().size() * 4);
  buf.insert(buf.end(), kFloMagic, kFloMagic + 4);
  put_u32le(buf, static_cast<uint32_t>(flow.width()));
  put_u32le(buf, static_cast<uint32_t>(flow.height()));
  for (int y = 0; y < flow.height(); ++y)
    for (int x = 0; x < flow.width(); ++x) {
      put_f32le(buf, static_cast<float>(flow.u(x, y)));
      put_f32le(buf, static_cast<float>(flow.v(x, y)));
    }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("save_flo: write failed for " + path);
}

Image colorize_flow(const FlowField& flow, double max_magnitude) {
  static const auto wheel = make_color_wheel();
  const int n = static_cast<int>(wheel.size());

  double max_mag = max_magnitude;
  if (max_mag <= 0.0) {
    for (int y = 0; y < flow.height(); ++y)
      for (int x = 0; x < flow.width(); ++x)
        max_mag = std::max(max_mag, std::hypot(flow.u(x, y), flow.v(x, y)));
    if (max_mag <= 0.0) max_mag = 1.0;
  }

  Image img(flow.width(), flow.height());
  for (int y = 0; y < flow.height(); ++y)
    for (int x = 0; x < flow.width(); ++x) {
      double u = flow.u(x, y) / max_mag;
      double v = flow.v(x, y) / max_mag;
      double rad = std::min(1.0, std::hypot(u, v));
      double angle = std::atan2(-v, -u) / M_PI;  // [-1, 1]
      double fk = (angle + 1.0) / 2.0 * (n - 1);
      int k0 = static_cast<int>(fk);
      int k1 = (k0 + 1) % n;
      double f = fk - k0;
      for (int c = 0; c < 3; ++c) {
        double col = (1 - f) * wheel[k0][c] + f * wheel[k1][c];
        // Saturate toward white at zero motion.
        img.at(x, y, c) = 1.0 - rad * (1.0 - col);
      }
    }
  return img;
}

}  // namespace uwvo
