#include "aglbp/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>

#include "aglbp/error.hpp"

namespace aglbp {

namespace {

std::string quoted(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

// Next whitespace-delimited header token, skipping '#' comments.
std::string pnm_token(std::istream& in) {
  std::string tok;
  char c;
  while (in.get(c)) {
    if (c == '#') {
      std::string ignored;
      std::getline(in, ignored);
      if (!tok.empty()) break;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(c);
  }
  return tok;
}

int pnm_int(std::istream& in, const std::filesystem::path& path) {
  const std::string tok = pnm_token(in);
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw FormatError("malformed PNM header in " + quoted(path));
  }
}

RasterImage load_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + quoted(path));
  const std::string magic = pnm_token(in);
  const bool ascii = magic == "P2" || magic == "P3";
  const bool binary = magic == "P5" || magic == "P6";
  if (!ascii && !binary) throw FormatError("unsupported PNM variant '" + magic + "' in " + quoted(path));

  RasterImage img;
  img.channels = (magic == "P2" || magic == "P5") ? 1 : 3;
  img.width = pnm_int(in, path);
  img.height = pnm_int(in, path);
  img.max_value = pnm_int(in, path);
  if (img.width < 1 || img.height < 1 || img.max_value < 1 || img.max_value > 65535)
    throw FormatError("invalid PNM header values in " + quoted(path));

  const std::size_t count = static_cast<std::size_t>(img.width) * img.height * img.channels;
  img.samples.resize(count);
  if (ascii) {
    for (std::size_t i = 0; i < count; ++i) {
      const int v = pnm_int(in, path);
      if (v < 0 || v > img.max_value) throw FormatError("sample out of range in " + quoted(path));
      img.samples[i] = static_cast<std::uint16_t>(v);
    }
  } else {
    // The single whitespace after maxval was consumed by pnm_token.
    const bool wide = img.max_value > 255;
    std::vector<unsigned char> raw(count * (wide ? 2 : 1));
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
      throw FormatError("truncated pixel data in " + quoted(path));
    for (std::size_t i = 0; i < count; ++i)
      img.samples[i] = wide ? static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]) : raw[i];
  }
  return img;
}

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};

// Runs the libpng read with only trivially destructible locals so that a
// longjmp out of libpng is well defined. Returns nullptr or an error text.
const char* read_png(std::FILE* fp, RasterImage& img, std::vector<unsigned char>& buffer) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) return "libpng initialization failed";
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return "libpng initialization failed";
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return "corrupt PNG";
  }
  png_init_io(png, fp);
  png_read_info(png, info);

  const int color = png_get_color_type(png, info);
  const char* failure = nullptr;
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8)
    png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) failure = "transparency is not supported";
  if (color & PNG_COLOR_MASK_ALPHA) failure = "alpha channels are not supported";
  if (failure) {
    png_destroy_read_struct(&png, &info, nullptr);
    return failure;
  }
  const int passes = png_set_interlace_handling(png);
  png_read_update_info(png, info);

  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  img.channels = png_get_channels(png, info);
  img.max_value = png_get_bit_depth(png, info) == 16 ? 65535 : 255;
  const std::size_t stride = png_get_rowbytes(png, info);
  buffer.resize(stride * img.height);
  for (int pass = 0; pass < passes; ++pass)
    for (int y = 0; y < img.height; ++y) png_read_row(png, buffer.data() + stride * y, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return nullptr;
}

RasterImage load_png(const std::filesystem::path& path) {
  std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw DataError("cannot open " + quoted(path));

  RasterImage img;
  std::vector<unsigned char> buffer;
  if (const char* failure = read_png(fp.get(), img, buffer))
    throw FormatError(std::string(failure) + " in " + quoted(path));
  if (img.channels != 1 && img.channels != 3)
    throw FormatError("unsupported channel count " + std::to_string(img.channels) + " in " +
                      quoted(path));

  const bool wide = img.max_value > 255;
  const std::size_t count = static_cast<std::size_t>(img.width) * img.height * img.channels;
  img.samples.resize(count);
  for (std::size_t i = 0; i < count; ++i)
    img.samples[i] = wide ? static_cast<std::uint16_t>((buffer[2 * i] << 8) | buffer[2 * i + 1])
                          : buffer[i];
  return img;
}

}  // namespace

RasterImage load_raster(const std::filesystem::path& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw DataError("cannot open " + quoted(path));
  unsigned char sig[8] = {};
  probe.read(reinterpret_cast<char*>(sig), 8);
  if (probe.gcount() == 8 && png_sig_cmp(sig, 0, 8) == 0) return load_png(path);
  if (probe.gcount() >= 2 && sig[0] == 'P') return load_pnm(path);
  if (probe.gcount() >= 4 && sig[0] == 0x59 && sig[1] == 0xa6 && sig[2] == 0x6a && sig[3] == 0x95)
    throw FormatError("Sun raster input " + quoted(path) + " must be converted to PGM or PNG first");
  throw FormatError("unrecognized image format " + quoted(path));
}

GrayImage load_gray(const std::filesystem::path& path) { return to_grayscale(load_raster(path)); }

void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + quoted(path));
  out << "P5\n" << img.width() << " " << img.height() << "\n255\n";
  std::vector<unsigned char> raw(img.data().size());
  std::transform(img.data().begin(), img.data().end(), raw.begin(), [](double v) {
    return static_cast<unsigned char>(std::clamp(std::lround(v), 0l, 255l));
  });
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw DataError("write failed for " + quoted(path));
}

}  // namespace aglbp
