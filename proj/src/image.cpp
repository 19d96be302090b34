#include "asc/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <set>
#include <sstream>

namespace asc {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void check_dimensions(long w, long h) {
  if (w <= 0 || h <= 0) throw Error(Status::io_error, "image has empty dimensions");
  if (w > 1 << 20 || h > 1 << 20 || static_cast<long long>(w) * h > 64LL * 1024 * 1024)
    throw Error(Status::io_error, "image too large");
}

// deterministic palette: evenly spaced hues, constant saturation/value
void label_color(int label, int count, std::uint8_t* rgb) {
  const double h = count > 0 ? 360.0 * static_cast<double>(label) / static_cast<double>(count) : 0.0;
  const double s = 0.75, v = 0.95;
  const double c = v * s;
  const double hp = h / 60.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  if (hp < 1) { r = c; g = x; }
  else if (hp < 2) { r = x; g = c; }
  else if (hp < 3) { g = c; b = x; }
  else if (hp < 4) { g = x; b = c; }
  else if (hp < 5) { r = x; b = c; }
  else { r = c; b = x; }
  const double m = v - c;
  rgb[0] = static_cast<std::uint8_t>(std::lround((r + m) * 255.0));
  rgb[1] = static_cast<std::uint8_t>(std::lround((g + m) * 255.0));
  rgb[2] = static_cast<std::uint8_t>(std::lround((b + m) * 255.0));
}

}  // namespace

Image read_image(const std::string& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw Error(Status::io_error, "cannot open " + path);
  unsigned char sig[8] = {};
  probe.read(reinterpret_cast<char*>(sig), 8);
  if (probe.gcount() >= 8 && png_sig_cmp(sig, 0, 8) == 0) return read_png(path);
  if (probe.gcount() >= 2 && sig[0] == 'P' && sig[1] == '6') return read_ppm(path);
  throw Error(Status::io_error, path + " is not a PNG or binary PPM (P6) image");
}

Image read_png(const std::string& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw Error(Status::io_error, "cannot open " + path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error(Status::io_error, "libpng initialization failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error(Status::io_error, "libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(Status::io_error, "undecodable PNG: " + path);
  }

  png_init_io(png, f.get());
  png_read_info(png, info);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  check_dimensions(static_cast<long>(width), static_cast<long>(height));
  const png_byte color_type = png_get_color_type(png, info);
  const png_byte bit_depth = png_get_bit_depth(png, info);

  if (bit_depth == 16) png_set_strip_16(png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
    png_set_gray_to_rgb(png);
  if (color_type & PNG_COLOR_MASK_ALPHA || png_get_valid(png, info, PNG_INFO_tRNS))
    png_set_strip_alpha(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  Image img;
  img.width = static_cast<int>(width);
  img.height = static_cast<int>(height);
  img.rgb.resize(img.pixel_count() * 3);

  const std::size_t rowbytes = png_get_rowbytes(png, info);
  if (rowbytes != static_cast<std::size_t>(width) * 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(Status::io_error, "unexpected PNG row layout in " + path);
  }
  std::vector<png_bytep> rows(height);
  for (png_uint_32 y = 0; y < height; ++y)
    rows[y] = img.rgb.data() + static_cast<std::size_t>(y) * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

Image read_ppm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Status::io_error, "cannot open " + path);

  auto next_token = [&]() -> std::string {
    std::string tok;
    int c;
    while ((c = f.get()) != EOF) {
      if (c == '#') {
        while ((c = f.get()) != EOF && c != '\n') {
        }
        continue;
      }
      if (std::isspace(c)) {
        if (!tok.empty()) break;
        continue;
      }
      tok.push_back(static_cast<char>(c));
    }
    return tok;
  };

  if (next_token() != "P6") throw Error(Status::io_error, path + " is not a binary PPM (P6)");
  long width = 0, height = 0, maxval = 0;
  try {
    width = std::stol(next_token());
    height = std::stol(next_token());
    maxval = std::stol(next_token());
  } catch (const std::exception&) {
    throw Error(Status::io_error, "undecodable PPM header in " + path);
  }
  check_dimensions(width, height);
  if (maxval <= 0 || maxval > 65535)
    throw Error(Status::io_error, "unsupported PPM maxval in " + path);

  Image img;
  img.width = static_cast<int>(width);
  img.height = static_cast<int>(height);
  img.rgb.resize(img.pixel_count() * 3);

  const std::size_t samples = img.pixel_count() * 3;
  if (maxval < 256) {
    f.read(reinterpret_cast<char*>(img.rgb.data()), static_cast<std::streamsize>(samples));
    if (static_cast<std::size_t>(f.gcount()) != samples)
      throw Error(Status::io_error, "truncated PPM data in " + path);
    if (maxval != 255) {
      for (std::uint8_t& v : img.rgb)
        v = static_cast<std::uint8_t>(v * 255L / maxval);
    }
  } else {
    std::vector<std::uint8_t> raw(samples * 2);
    f.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(f.gcount()) != raw.size())
      throw Error(Status::io_error, "truncated PPM data in " + path);
    for (std::size_t i = 0; i < samples; ++i) {
      const long v = (static_cast<long>(raw[2 * i]) << 8) | raw[2 * i + 1];
      img.rgb[i] = static_cast<std::uint8_t>(v * 255L / maxval);
    }
  }
  return img;
}

void write_ppm(const Image& image, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Status::io_error, "cannot open " + path + " for writing");
  f << "P6\n" << image.width << " " << image.height << "\n255\n";
  f.write(reinterpret_cast<const char*>(image.rgb.data()),
          static_cast<std::streamsize>(image.rgb.size()));
}

int LabelImage::label_count() const {
  std::set<int> distinct(labels.begin(), labels.end());
  return static_cast<int>(distinct.size());
}

FeatureMode feature_mode_from_string(const std::string& name) {
  if (name == "rgb") return FeatureMode::rgb;
  if (name == "rgbxy") return FeatureMode::rgbxy;
  throw Error(Status::invalid_argument, "unknown feature mode '" + name + "' (rgb|rgbxy)");
}

const char* feature_mode_name(FeatureMode mode) {
  return mode == FeatureMode::rgb ? "rgb" : "rgbxy";
}

ImageFeatures extract_features(const Image& image, FeatureMode mode) {
  if (image.width <= 0 || image.height <= 0 || image.rgb.size() != image.pixel_count() * 3)
    throw Error(Status::invalid_argument, "invalid image buffer");

  const std::size_t dim = mode == FeatureMode::rgb ? 3 : 5;
  ImageFeatures out;
  out.width = image.width;
  out.height = image.height;
  out.features = Matrix(image.pixel_count(), dim);

  const double xnorm = image.width > 1 ? 1.0 / (image.width - 1) : 0.0;
  const double ynorm = image.height > 1 ? 1.0 / (image.height - 1) : 0.0;
  std::size_t p = 0;
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x, ++p) {
      const std::uint8_t* px = image.rgb.data() + p * 3;
      out.features(p, 0) = px[0] / 255.0;
      out.features(p, 1) = px[1] / 255.0;
      out.features(p, 2) = px[2] / 255.0;
      if (mode == FeatureMode::rgbxy) {
        out.features(p, 3) = x * xnorm;
        out.features(p, 4) = y * ynorm;
      }
    }
  }
  return out;
}

LabelImage assign_pixels(const GngModel& model, const std::vector<int>& neuron_labels,
                         const ImageFeatures& features) {
  if (neuron_labels.size() != model.neurons.size())
    throw Error(Status::dimension_mismatch, "neuron label count does not match neuron count");
  if (model.dimension() != features.features.cols())
    throw Error(Status::dimension_mismatch, "feature dimension does not match model dimension");
  if (model.neurons.empty()) throw Error(Status::invalid_argument, "model has no neurons");

  LabelImage out;
  out.width = features.width;
  out.height = features.height;
  out.labels.resize(features.features.rows());
  const std::size_t dim = features.features.cols();
  for (std::size_t p = 0; p < features.features.rows(); ++p) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < model.neurons.size(); ++i) {
      const double d = squared_distance(features.features.row_ptr(p),
                                        model.neurons[i].position.data(), dim);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    out.labels[p] = neuron_labels[best];
  }
  return out;
}

LabelImage median_filter_3x3(const LabelImage& in) {
  if (in.width <= 0 || in.height <= 0 ||
      in.labels.size() != static_cast<std::size_t>(in.width) * static_cast<std::size_t>(in.height))
    throw Error(Status::invalid_argument, "invalid label image");

  LabelImage out = in;
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < in.width; ++x) {
      int window[9];
      int counts[9];
      int distinct = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        const int yy = y + dy;
        if (yy < 0 || yy >= in.height) continue;
        for (int dx = -1; dx <= 1; ++dx) {
          const int xx = x + dx;
          if (xx < 0 || xx >= in.width) continue;
          const int l = in.labels[static_cast<std::size_t>(yy) * in.width + xx];
          int k = 0;
          while (k < distinct && window[k] != l) ++k;
          if (k == distinct) {
            window[distinct] = l;
            counts[distinct] = 1;
            ++distinct;
          } else {
            ++counts[k];
          }
        }
      }
      int best = 0;
      bool tie = false;
      for (int k = 1; k < distinct; ++k) {
        if (counts[k] > counts[best]) {
          best = k;
          tie = false;
        } else if (counts[k] == counts[best]) {
          tie = true;
        }
      }
      if (!tie) out.labels[static_cast<std::size_t>(y) * in.width + x] = window[best];
      // ties keep the center label
    }
  }
  return out;
}

namespace {

struct LabelPngData {
  int width = 0;
  int height = 0;
  int count = 0;                    // distinct labels
  std::vector<png_byte> indices;    // dense label id per pixel
  std::vector<png_color> palette;
  std::vector<std::uint8_t> truecolor;  // used past 256 labels
};

void encode_label_png(png_structp png, png_infop info, const LabelPngData& data) {
  if (data.count <= 256) {
    png_set_IHDR(png, info, static_cast<png_uint_32>(data.width),
                 static_cast<png_uint_32>(data.height), 8, PNG_COLOR_TYPE_PALETTE,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_PLTE(png, info, const_cast<png_color*>(data.palette.data()),
                 static_cast<int>(data.palette.size()));
    png_write_info(png, info);
    for (int y = 0; y < data.height; ++y)
      png_write_row(png, const_cast<png_byte*>(data.indices.data()) +
                             static_cast<std::size_t>(y) * data.width);
  } else {
    png_set_IHDR(png, info, static_cast<png_uint_32>(data.width),
                 static_cast<png_uint_32>(data.height), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < data.height; ++y)
      png_write_row(png, const_cast<std::uint8_t*>(data.truecolor.data()) +
                             static_cast<std::size_t>(y) * data.width * 3);
  }
  png_write_end(png, nullptr);
}

}  // namespace

void write_label_png(const LabelImage& labels, const std::string& path) {
  std::map<int, int> ids;
  for (int l : labels.labels) ids.emplace(l, 0);
  int next = 0;
  for (auto& [label, id] : ids) id = next++;

  LabelPngData data;
  data.width = labels.width;
  data.height = labels.height;
  data.count = next;
  if (data.count <= 256) {
    data.palette.resize(static_cast<std::size_t>(std::max(data.count, 1)));
    for (int i = 0; i < data.count; ++i) {
      std::uint8_t rgb[3];
      label_color(i, data.count, rgb);
      data.palette[static_cast<std::size_t>(i)] = {rgb[0], rgb[1], rgb[2]};
    }
    data.indices.resize(labels.labels.size());
    for (std::size_t p = 0; p < labels.labels.size(); ++p)
      data.indices[p] = static_cast<png_byte>(ids[labels.labels[p]]);
  } else {
    data.truecolor.resize(labels.labels.size() * 3);
    for (std::size_t p = 0; p < labels.labels.size(); ++p)
      label_color(ids[labels.labels[p]], data.count, data.truecolor.data() + p * 3);
  }

  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw Error(Status::io_error, "cannot open " + path + " for writing");

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error(Status::io_error, "libpng initialization failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(Status::io_error, "libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(Status::io_error, "failed writing PNG " + path);
  }
  png_init_io(png, f.get());
  encode_label_png(png, info, data);
  png_destroy_write_struct(&png, &info);
}

void write_label_csv(const LabelImage& labels, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error(Status::io_error, "cannot open " + path + " for writing");
  for (int y = 0; y < labels.height; ++y) {
    for (int x = 0; x < labels.width; ++x) {
      if (x) f << ",";
      f << labels.labels[static_cast<std::size_t>(y) * labels.width + x];
    }
    f << "\n";
  }
}

LabelImage read_label_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(Status::io_error, "cannot open " + path);

  LabelImage out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    int width = 0;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t pos = 0;
        const int v = std::stoi(cell, &pos);
        while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
        if (pos != cell.size()) throw std::invalid_argument(cell);
        out.labels.push_back(v);
      } catch (const std::exception&) {
        throw Error(Status::parse_error,
                    path + ": line " + std::to_string(lineno) + ": '" + cell + "' is not an integer");
      }
      ++width;
    }
    if (out.width == 0) out.width = width;
    else if (width != out.width)
      throw Error(Status::parse_error,
                  path + ": line " + std::to_string(lineno) + ": expected " +
                      std::to_string(out.width) + " columns, got " + std::to_string(width));
    ++out.height;
  }
  if (out.labels.empty()) throw Error(Status::parse_error, path + ": no labels found");
  return out;
}

LabelImage label_image_from_colors(const Image& image) {
  std::map<std::uint32_t, int> ids;
  for (std::size_t p = 0; p < image.pixel_count(); ++p) {
    const std::uint8_t* px = image.rgb.data() + p * 3;
    const std::uint32_t key = (static_cast<std::uint32_t>(px[0]) << 16) |
                              (static_cast<std::uint32_t>(px[1]) << 8) | px[2];
    ids.emplace(key, 0);
  }
  int next = 0;
  for (auto& [color, id] : ids) id = next++;

  LabelImage out;
  out.width = image.width;
  out.height = image.height;
  out.labels.resize(image.pixel_count());
  for (std::size_t p = 0; p < image.pixel_count(); ++p) {
    const std::uint8_t* px = image.rgb.data() + p * 3;
    const std::uint32_t key = (static_cast<std::uint32_t>(px[0]) << 16) |
                              (static_cast<std::uint32_t>(px[1]) << 8) | px[2];
    out.labels[p] = ids[key];
  }
  return out;
}

}  // namespace asc
