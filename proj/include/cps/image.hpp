#pragma once

#include <string>
#include <vector>

namespace cps {

// Row-major real-valued 2D grid. Pixel values are doubles so a grid can
// hold intermediate solver iterates; `peak` is the reference dynamic range
// used by the quality metrics (255 for 8-bit imagery).
struct ImageGrid {
  int rows = 0;
  int cols = 0;
  std::vector<double> pixels;
  double peak = 255.0;

  ImageGrid() = default;
  ImageGrid(int r, int c, double fill = 0.0);

  double& at(int r, int c) { return pixels[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return pixels[static_cast<std::size_t>(r) * cols + c]; }
  std::size_t size() const { return pixels.size(); }
};

// 8-bit binary PGM (P5).
ImageGrid read_pgm(const std::string& path);
void write_pgm(const ImageGrid& img, const std::string& path);

#ifdef CPS_HAVE_PNG
// 8-bit grayscale PNG, read-only.
ImageGrid read_png_gray(const std::string& path);
#endif

// Dispatches on file magic: P5 -> PGM, \x89PNG -> PNG (when compiled in).
ImageGrid read_image(const std::string& path);

}  // namespace cps
