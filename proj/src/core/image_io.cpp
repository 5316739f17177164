#include "image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

namespace uwvo {

namespace {

std::string lower_ext(const std::string& path) {
  size_t dot = path.find_last_of('.');
  if (dot == std::string::npos) return "";
  std::string ext = path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext;
}

uint8_t to_byte(double v) {
  double s = std::lround(std::clamp(v, 0.0, 1.0) * 255.0);
  return static_cast<uint8_t>(s);
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

Image load_png(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw IoError("load_image: cannot open " + path);

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("load_image: libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("load_image: libpng init failed");
  }
  std::vector<std::vector<png_byte>> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw ParseError("load_image: not a valid PNG: " + path);
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  png_set_expand(png);         // palette/low-bit gray -> 8-bit
  png_set_strip_16(png);       // 16-bit -> 8-bit
  png_set_strip_alpha(png);
  png_set_gray_to_rgb(png);
  png_read_update_info(png, info);

  const int w = static_cast<int>(png_get_image_width(png, info));
  const int h = static_cast<int>(png_get_image_height(png, info));
  rows.assign(h, std::vector<png_byte>(png_get_rowbytes(png, info)));
  std::vector<png_bytep> row_ptrs(h);
  for (int y = 0; y < h; ++y) row_ptrs[y] = rows[y].data();
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  Image img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c)
        img.at(x, y, c) = rows[y][3 * x + c] / 255.0;
  return img;
}

void save_png(const Image& img, const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw IoError("save_image: cannot open " + path);
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("save_image: libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("save_image: libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("save_image: PNG write failed for " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, img.width(), img.height(), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  std::vector<png_byte> row(static_cast<size_t>(img.width()) * 3);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x)
      for (int c = 0; c < 3; ++c) row[3 * x + c] = to_byte(img.at(x, y, c));
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

// Reads one PNM header token, skipping whitespace and '#' comments.
std::string pnm_token(std::istream& in, const std::string& path) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (!std::isspace(c)) {
      tok.push_back(static_cast<char>(c));
      break;
    }
  }
  while ((c = in.get()) != EOF && !std::isspace(c))
    tok.push_back(static_cast<char>(c));
  if (tok.empty()) throw ParseError("truncated PNM header in " + path);
  return tok;
}

Image load_pnm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_image: cannot open " + path);
  std::string magic = pnm_token(in, path);
  if (magic != "P5" && magic != "P6")
    throw ParseError("load_image: unsupported PNM magic '" + magic + "' in " +
                     path);
  int w = std::stoi(pnm_token(in, path));
  int h = std::stoi(pnm_token(in, path));
  int maxval = std::stoi(pnm_token(in, path));
  if (maxval != 255)
    throw ParseError("load_image: only maxval 255 supported in " + path);
  const int channels = magic == "P6" ? 3 : 1;
  std::vector<uint8_t> buf(static_cast<size_t>(w) * h * channels);
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size()));
  if (static_cast<size_t>(in.gcount()) != buf.size())
    throw ParseError("load_image: truncated pixel data in " + path);
  Image img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) {
        size_t i = (static_cast<size_t>(y) * w + x) * channels +
                   (channels == 3 ? c : 0);
        img.at(x, y, c) = buf[i] / 255.0;
      }
  return img;
}

void save_pnm(const Image& img, const std::string& path, bool color) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("save_image: cannot open " + path);
  out << (color ? "P6" : "P5") << "\n"
      << img.width() << " " << img.height() << "\n255\n";
  std::vector<uint8_t> buf;
  buf.reserve(static_cast<size_t>(img.width()) * img.height() *
              (color ? 3 : 1));
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      if (color) {
        for (int c = 0; c < 3; ++c) buf.push_back(to_byte(img.at(x, y, c)));
      } else {
        buf.push_back(to_byte(0.299 * img.at(x, y, 0) +
                              0.587 * img.at(x, y, 1) +
                              0.114 * img.at(x, y, 2)));
      }
    }
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("save_image: write failed for " + path);
}

}  // namespace

Image load_image(const std::string& path) {
  std::string ext = lower_ext(path);
  if (ext == "png") return load_png(path);
  if (ext == "pgm" || ext == "ppm") return load_pnm(path);
  throw InvalidArgumentError("load_image: unsupported extension ." + ext);
}

void save_image(const Image& img, const std::string& path) {
  std::string ext = lower_ext(path);
  if (ext == "png") return save_png(img, path);
  if (ext == "ppm") return save_pnm(img, path, true);
  if (ext == "pgm") return save_pnm(img, path, false);
  throw InvalidArgumentError("save_image: unsupported extension ." + ext);
}

ScalarGrid load_pfm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_pfm: cannot open " + path);
  std::string magic = pnm_token(in, path);
  if (magic != "Pf")
    throw ParseError("load_pfm: expected grayscale 'Pf' magic in " + path);
  int w = std::stoi(pnm_token(in, path));
  int h = std::stoi(pnm_token(in, path));
  double scale = std::stod(pnm_token(in, path));
  if (scale >= 0.0)
    throw ParseError("load_pfm: big-endian PFM not supported in " + path);
  std::vector<float> buf(static_cast<size_t>(w) * h);
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (static_cast<size_t>(in.gcount()) != buf.size() * sizeof(float))
    throw ParseError("load_pfm: truncated pixel data in " + path);
  ScalarGrid grid(w, h);
  // PFM stores rows bottom-to-top.
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      grid.at(x, y) = buf[static_cast<size_t>(h - 1 - y) * w + x];
  return grid;
}

void save_pfm(const ScalarGrid& grid, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("save_pfm: cannot open " + path);
  out << "Pf\n" << grid.width() << " " << grid.height() << "\n-1.0\n";
  std::vector<float> buf(grid.size());
  const int w = grid.width(), h = grid.height();
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      buf[static_cast<size_t>(h - 1 - y) * w + x] =
          static_cast<float>(grid.at(x, y));
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!out) throw IoError("save_pfm: write failed for " + path);
}

void save_pgm_preview(const ScalarGrid& grid, const std::string& path) {
  double lo = grid.min_value();
  double hi = grid.max_value();
  double span = hi > lo ? hi - lo : 1.0;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("save_pgm_preview: cannot open " + path);
  out << "P5\n" << grid.width() << " " << grid.height() << "\n255\n";
  std::vector<uint8_t> buf(grid.size());
  for (size_t i = 0; i < grid.size(); ++i)
    buf[i] = static_cast<uint8_t>(
        std::lround(255.0 * (grid[i] - lo) / span));
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("save_pgm_preview: write failed for " + path);
}

}  // namespace uwvo
