#include "cps/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#ifdef CPS_HAVE_PNG
#include <png.h>
#endif

namespace cps {

ImageGrid::ImageGrid(int r, int c, double fill) : rows(r), cols(c) {
  if (r < 1 || c < 1) throw std::invalid_argument("ImageGrid: rows and cols must be >= 1");
  pixels.assign(static_cast<std::size_t>(r) * c, fill);
}

namespace {

// Skips whitespace and '#' comment lines between PGM header tokens.
int next_header_int(std::istream& in) {
  while (true) {
    int ch = in.peek();
    if (ch == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(ch)) {
      in.get();
    } else {
      break;
    }
  }
  int value = -1;
  in >> value;
  if (!in) throw std::runtime_error("malformed PGM header");
  return value;
}

}  // namespace

ImageGrid read_pgm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open image: " + path);
  char magic[2] = {0, 0};
  f.read(magic, 2);
  if (magic[0] != 'P' || magic[1] != '5')
    throw std::runtime_error("not a binary PGM (P5) file: " + path);
  const int cols = next_header_int(f);
  const int rows = next_header_int(f);
  const int maxval = next_header_int(f);
  if (cols < 1 || rows < 1) throw std::runtime_error("bad PGM dimensions: " + path);
  if (maxval != 255) throw std::runtime_error("only 8-bit PGM supported: " + path);
  f.get();  // single whitespace byte after maxval
  std::vector<unsigned char> raw(static_cast<std::size_t>(rows) * cols);
  f.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!f) throw std::runtime_error("truncated PGM data: " + path);
  ImageGrid img(rows, cols);
  for (std::size_t i = 0; i < raw.size(); ++i) img.pixels[i] = raw[i];
  return img;
}

void write_pgm(const ImageGrid& img, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << "P5\n" << img.cols << " " << img.rows << "\n255\n";
  std::vector<unsigned char> raw(img.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double v = std::clamp(img.pixels[i], 0.0, 255.0);
    raw[i] = static_cast<unsigned char>(std::lround(v));
  }
  f.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

#ifdef CPS_HAVE_PNG

ImageGrid read_png_gray(const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "rb");
  if (!fp) throw std::runtime_error("cannot open image: " + path);
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    if (png) png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    throw std::runtime_error("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    throw std::runtime_error("failed to decode PNG: " + path);
  }
  png_init_io(png, fp);
  png_read_info(png, info);

  const png_uint_32 cols = png_get_image_width(png, info);
  const png_uint_32 rows = png_get_image_height(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);

  // Normalize everything to 8-bit gray: palette/RGB are converted, 16-bit
  // is stripped, alpha dropped.
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (depth == 16) png_set_strip_16(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (color == PNG_COLOR_TYPE_RGB || color == PNG_COLOR_TYPE_RGB_ALPHA ||
      color == PNG_COLOR_TYPE_PALETTE)
    png_set_rgb_to_gray_fixed(png, 1, -1, -1);
  png_read_update_info(png, info);

  std::vector<unsigned char> raw(static_cast<std::size_t>(rows) * cols);
  std::vector<png_bytep> row_ptrs(rows);
  for (png_uint_32 r = 0; r < rows; ++r) row_ptrs[r] = raw.data() + static_cast<std::size_t>(r) * cols;
  png_read_image(png, row_ptrs.data());
  png_destroy_read_struct(&png, &info, nullptr);
  std::fclose(fp);

  ImageGrid img(static_cast<int>(rows), static_cast<int>(cols));
  for (std::size_t i = 0; i < raw.size(); ++i) img.pixels[i] = raw[i];
  return img;
}

#endif  // CPS_HAVE_PNG

ImageGrid read_image(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open image: " + path);
  unsigned char magic[2] = {0, 0};
  f.read(reinterpret_cast<char*>(magic), 2);
  f.close();
  if (magic[0] == 'P' && magic[1] == '5') return read_pgm(path);
#ifdef CPS_HAVE_PNG
  if (magic[0] == 0x89 && magic[1] == 'P') return read_png_gray(path);
#endif
  throw std::runtime_error("unsupported image format: " + path);
}

}  // namespace cps
