#include "grid.hpp"

namespace uwvo {

Image Image::from_planar(int width, int height, std::vector<double> data) {
  check_dims(width, height);
  if (data.size() != static_cast<size_t>(width) * height * 3)
    throw InvalidArgumentError("Image::from_planar: data size mismatch");
  for (double v : data)
    if (!std::isfinite(v))
      throw InvalidArgumentError("Image::from_planar: non-finite value");
  Image img;
  img.width_ = width;
  img.height_ = height;
  img.data_ = std::move(data);
  img.clamp01();
  return img;
}

Mask interior_mask(int width, int height, int margin) {
  if (margin < 0) throw InvalidArgumentError("interior_mask: negative margin");
  Mask m(width, height, false);
  for (int y = margin; y < height - margin; ++y)
    for (int x = margin; x < width - margin; ++x) m.set(x, y, true);
  return m;
}

ScalarGrid luminance(const Image& img) {
  ScalarGrid g(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      g.at(x, y) = 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) +
                   0.114 * img.at(x, y, 2);
  return g;
}

}  // namespace uwvo
