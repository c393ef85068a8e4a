// SPDX-FileCopyrightText: 2026 The pluvia authors
// SPDX-License-Identifier: Apache-2.0

#include "pluvia/image_io.hpp"

#include <jpeglib.h>
#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <cctype>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <vector>

#include "pluvia/depth.hpp"
#include "pluvia/srgb.hpp"

namespace pluvia {
namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error(path + ": " + what);
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::string& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) fail(path, mode[0] == 'r' ? "cannot open file" : "cannot open file for writing");
  return f;
}

enum class Container { kPng, kJpeg, kPfm, kUnknown };

Container sniff(const std::string& path) {
  FilePtr f = open_file(path, "rb");
  unsigned char magic[8] = {0};
  const std::size_t n = std::fread(magic, 1, sizeof(magic), f.get());
  if (n >= 8 && png_sig_cmp(magic, 0, 8) == 0) return Container::kPng;
  if (n >= 2 && magic[0] == 0xFF && magic[1] == 0xD8) return Container::kJpeg;
  if (n >= 2 && magic[0] == 'P' && (magic[1] == 'f' || magic[1] == 'F')) return Container::kPfm;
  return Container::kUnknown;
}

struct RasterU8 {
  Eigen::Index width = 0, height = 0;
  std::vector<unsigned char> rgb;  // interleaved, 3 channels
};

RasterU8 read_png_rgb8(const std::string& path) {
  FilePtr f = open_file(path, "rb");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(path, "libpng init failed");
  }
  std::vector<png_bytep> row_ptrs;
  RasterU8 out;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(path, "corrupt PNG");
  }
  png_init_io(png, f.get());
  png_read_info(png, info);

  const int bit_depth = png_get_bit_depth(png, info);
  if (bit_depth > 8) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(path, "unsupported bit depth " + std::to_string(bit_depth) +
                   " for image input (expected 8-bit sRGB)");
  }
  png_set_expand(png);  // palette/gray/low-bit -> 8-bit
  if (png_get_color_type(png, info) & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if ((png_get_color_type(png, info) & PNG_COLOR_MASK_COLOR) == 0) png_set_gray_to_rgb(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  out.width = static_cast<Eigen::Index>(png_get_image_width(png, info));
  out.height = static_cast<Eigen::Index>(png_get_image_height(png, info));
  if (png_get_rowbytes(png, info) != static_cast<std::size_t>(out.width) * 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(path, "unexpected PNG channel layout");
  }
  out.rgb.resize(static_cast<std::size_t>(out.width) * out.height * 3);
  row_ptrs.resize(out.height);
  for (Eigen::Index y = 0; y < out.height; ++y)
    row_ptrs[y] = out.rgb.data() + static_cast<std::size_t>(y) * out.width * 3;
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

void write_png_rgb8(const std::string& path, Eigen::Index width, Eigen::Index height,
                    const std::vector<unsigned char>& rgb) {
  FilePtr f = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    fail(path, "libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(path, "PNG write failed");
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (Eigen::Index y = 0; y < height; ++y)
    png_write_row(png, const_cast<png_bytep>(rgb.data() + static_cast<std::size_t>(y) * width * 3));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

Planef read_png_depth16(const std::string& path, double unit_scale) {
  FilePtr f = open_file(path, "rb");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(path, "libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(path, "corrupt PNG");
  }
  png_init_io(png, f.get());
  png_read_info(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  const int color = png_get_color_type(png, info);
  if (bit_depth != 16 || color != PNG_COLOR_TYPE_GRAY) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(path, "depth PNG must be 16-bit single-channel grayscale");
  }
#if defined(PNG_READ_SWAP_SUPPORTED)
  png_set_swap(png);  // PNG stores big-endian
#endif
  png_read_update_info(png, info);

  const Eigen::Index width = static_cast<Eigen::Index>(png_get_image_width(png, info));
  const Eigen::Index height = static_cast<Eigen::Index>(png_get_image_height(png, info));
  std::vector<std::uint16_t> raw(static_cast<std::size_t>(width) * height);
  std::vector<png_bytep> row_ptrs(height);
  for (Eigen::Index y = 0; y < height; ++y)
    row_ptrs[y] = reinterpret_cast<png_bytep>(raw.data() + static_cast<std::size_t>(y) * width);
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  Planef depth(height, width);
  for (Eigen::Index y = 0; y < height; ++y)
    for (Eigen::Index x = 0; x < width; ++x)
      depth(y, x) = static_cast<float>(raw[static_cast<std::size_t>(y) * width + x] * unit_scale);
  return depth;
}

struct JpegErrorMgr {
  jpeg_error_mgr pub;
  jmp_buf jump;
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
  longjmp(err->jump, 1);
}

RasterU8 read_jpeg_rgb8(const std::string& path) {
  FilePtr f = open_file(path, "rb");
  jpeg_decompress_struct cinfo;
  JpegErrorMgr jerr;
  cinfo.err = jpeg_std_error(&jerr.pub);
  jerr.pub.error_exit = jpeg_error_exit;
  if (setjmp(jerr.jump)) {
    jpeg_destroy_decompress(&cinfo);
    fail(path, "corrupt JPEG");
  }
  jpeg_create_decompress(&cinfo);
  jpeg_stdio_src(&cinfo, f.get());
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);

  RasterU8 out;
  out.width = cinfo.output_width;
  out.height = cinfo.output_height;
  out.rgb.resize(static_cast<std::size_t>(out.width) * out.height * 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = out.rgb.data() + static_cast<std::size_t>(cinfo.output_scanline) * out.width * 3;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return out;
}

void write_jpeg_rgb8(const std::string& path, Eigen::Index width, Eigen::Index height,
                     const std::vector<unsigned char>& rgb) {
  FilePtr f = open_file(path, "wb");
  jpeg_compress_struct cinfo;
  JpegErrorMgr jerr;
  cinfo.err = jpeg_std_error(&jerr.pub);
  jerr.pub.error_exit = jpeg_error_exit;
  if (setjmp(jerr.jump)) {
    jpeg_destroy_compress(&cinfo);
    fail(path, "JPEG write failed");
  }
  jpeg_create_compress(&cinfo);
  jpeg_stdio_dest(&cinfo, f.get());
  cinfo.image_width = static_cast<JDIMENSION>(width);
  cinfo.image_height = static_cast<JDIMENSION>(height);
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, 95, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(rgb.data() +
                                        static_cast<std::size_t>(cinfo.next_scanline) * width * 3);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
}

// PFM: "Pf" header, width height, scale (sign = endianness), rows bottom-up.
Planef read_pfm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open file");
  std::string tag;
  in >> tag;
  if (tag != "Pf") fail(path, "expected single-channel PFM (Pf)");
  Eigen::Index width = 0, height = 0;
  double scale = 0.0;
  in >> width >> height >> scale;
  if (!in || width <= 0 || height <= 0 || scale == 0.0) fail(path, "malformed PFM header");
  in.get();  // single whitespace before binary data
  std::vector<float> raw(static_cast<std::size_t>(width) * height);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size() * 4));
  if (!in) fail(path, "truncated PFM payload");
  const bool file_little = scale < 0.0;
  const std::uint16_t probe = 1;
  const bool host_little = *reinterpret_cast<const unsigned char*>(&probe) == 1;
  if (file_little != host_little) {
    for (float& v : raw) {
      auto* b = reinterpret_cast<unsigned char*>(&v);
      std::swap(b[0], b[3]);
      std::swap(b[1], b[2]);
    }
  }
  Planef depth(height, width);
  for (Eigen::Index y = 0; y < height; ++y) {
    const float* row = raw.data() + static_cast<std::size_t>(height - 1 - y) * width;
    for (Eigen::Index x = 0; x < width; ++x) depth(y, x) = row[x];
  }
  return depth;
}

bool has_extension(const std::string& path, const char* ext) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return false;
  std::string e = path.substr(dot + 1);
  for (char& c : e) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return e == ext;
}

}  // namespace

LinearImage load_image(const std::string& path) {
  RasterU8 raw;
  switch (sniff(path)) {
    case Container::kPng:
      raw = read_png_rgb8(path);
      break;
    case Container::kJpeg:
      raw = read_jpeg_rgb8(path);
      break;
    default:
      fail(path, "unsupported image container (expected PNG or JPEG)");
  }
  // Decode through a lookup table; ingestion dominates batch I/O time.
  static const auto lut = [] {
    std::array<float, 256> t{};
    for (int i = 0; i < 256; ++i) t[static_cast<std::size_t>(i)] = srgb_byte_to_linear(static_cast<std::uint8_t>(i));
    return t;
  }();
  LinearImage img(raw.width, raw.height);
  for (Eigen::Index y = 0; y < raw.height; ++y) {
    const unsigned char* row = raw.rgb.data() + static_cast<std::size_t>(y) * raw.width * 3;
    for (Eigen::Index x = 0; x < raw.width; ++x) {
      img.channel(0)(y, x) = lut[row[3 * x + 0]];
      img.channel(1)(y, x) = lut[row[3 * x + 1]];
      img.channel(2)(y, x) = lut[row[3 * x + 2]];
    }
  }
  return img;
}

void save_image(const LinearImage& img, const std::string& path) {
  if (img.empty()) throw std::invalid_argument(path + ": refusing to write empty image");
  std::vector<unsigned char> rgb(static_cast<std::size_t>(img.width()) * img.height() * 3);
  for (Eigen::Index y = 0; y < img.height(); ++y) {
    unsigned char* row = rgb.data() + static_cast<std::size_t>(y) * img.width() * 3;
    for (Eigen::Index x = 0; x < img.width(); ++x)
      for (int c = 0; c < 3; ++c)
        row[3 * x + c] = linear_to_srgb_byte(static_cast<double>(img.channel(c)(y, x)));
  }
  if (has_extension(path, "jpg") || has_extension(path, "jpeg"))
    write_jpeg_rgb8(path, img.width(), img.height(), rgb);
  else
    write_png_rgb8(path, img.width(), img.height(), rgb);
}

Planef load_gray8(const std::string& path) {
  RasterU8 raw;
  switch (sniff(path)) {
    case Container::kPng:
      raw = read_png_rgb8(path);
      break;
    case Container::kJpeg:
      raw = read_jpeg_rgb8(path);
      break;
    default:
      fail(path, "unsupported image container (expected PNG or JPEG)");
  }
  Planef plane(raw.height, raw.width);
  for (Eigen::Index y = 0; y < raw.height; ++y) {
    const unsigned char* row = raw.rgb.data() + static_cast<std::size_t>(y) * raw.width * 3;
    for (Eigen::Index x = 0; x < raw.width; ++x)
      plane(y, x) = static_cast<float>(row[3 * x]) / 255.0f;
  }
  return plane;
}

DepthMap load_depth(const std::string& path, double unit_scale) {
  Planef raw;
  switch (sniff(path)) {
    case Container::kPng:
      if (!(unit_scale > 0.0))
        fail(path, "16-bit PNG depth requires a positive unit scale (meters per stored unit)");
      raw = read_png_depth16(path, unit_scale);
      break;
    case Container::kPfm:
      raw = read_pfm(path);
      break;
    default:
      fail(path, "unsupported depth container (expected 16-bit PNG or PFM)");
  }
  try {
    return fill_depth_holes(raw);
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
}

void save_depth_png16(const Planef& depth_m, const std::string& path, double unit_scale) {
  if (!(unit_scale > 0.0)) throw std::invalid_argument(path + ": unit scale must be > 0");
  const Eigen::Index h = depth_m.rows(), w = depth_m.cols();
  FilePtr f = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    fail(path, "libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(path, "PNG write failed");
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 16,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<unsigned char> row(static_cast<std::size_t>(w) * 2);
  for (Eigen::Index y = 0; y < h; ++y) {
    for (Eigen::Index x = 0; x < w; ++x) {
      const double units = std::clamp(std::round(depth_m(y, x) / unit_scale), 0.0, 65535.0);
      const auto v = static_cast<std::uint16_t>(units);
      row[static_cast<std::size_t>(2 * x)] = static_cast<unsigned char>(v >> 8);  // big-endian
      row[static_cast<std::size_t>(2 * x + 1)] = static_cast<unsigned char>(v & 0xFF);
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void save_depth_pfm(const Planef& depth_m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open file for writing");
  out << "Pf\n" << depth_m.cols() << " " << depth_m.rows() << "\n-1.0\n";
  for (Eigen::Index y = depth_m.rows() - 1; y >= 0; --y)  // PFM rows run bottom-up
    out.write(reinterpret_cast<const char*>(depth_m.row(y).data()),
              static_cast<std::streamsize>(depth_m.cols() * 4));
}

CameraRig load_camera_rig(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open calibration file");
  CameraRig rig;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos)
      fail(path, "line " + std::to_string(lineno) + ": expected 'key: value'");
    std::string key = line.substr(0, colon);
    key.erase(0, key.find_first_not_of(" \t"));
    key.erase(key.find_last_not_of(" \t") + 1);
    std::istringstream values(line.substr(colon + 1));

    auto scalar = [&](double& dst) {
      if (!(values >> dst)) fail(path, "line " + std::to_string(lineno) + ": bad value for " + key);
    };
    if (key == "focal_length_m") scalar(rig.focal_length_m);
    else if (key == "f_number") scalar(rig.f_number);
    else if (key == "exposure_s") scalar(rig.exposure_s);
    else if (key == "focus_plane_m") scalar(rig.focus_plane_m);
    else if (key == "pixels_per_meter") scalar(rig.pixels_per_meter);
    else if (key == "camera_height_m") scalar(rig.camera_height_m);
    else if (key == "ego_speed_mps") scalar(rig.ego_speed_mps);
    else if (key == "principal_point_px") {
      scalar(rig.principal_point_px.x());
      scalar(rig.principal_point_px.y());
    } else if (key == "rotation") {
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) scalar(rig.cam_to_world(r, c));
    } else {
      fail(path, "line " + std::to_string(lineno) + ": unknown calibration key '" + key + "'");
    }
  }
  try {
    rig.validate();
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
  return rig;
}

}  // namespace pluvia
