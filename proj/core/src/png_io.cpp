#include "radonkit/png_io.hpp"

#include <zlib.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

#include "radonkit/errors.hpp"

namespace radonkit {

namespace {

void put_u32(std::vector<unsigned char>& out, uint32_t v) {
  out.push_back(uint8_t(v >> 24));
  out.push_back(uint8_t(v >> 16));
  out.push_back(uint8_t(v >> 8));
  out.push_back(uint8_t(v));
}

void put_chunk(std::vector<unsigned char>& out, const char type[4], const std::vector<unsigned char>& data) {
  put_u32(out, uint32_t(data.size()));
  size_t start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  uint32_t crc = uint32_t(crc32(0L, out.data() + start, uInt(out.size() - start)));
  put_u32(out, crc);
}

}  // namespace

void png_export(const Tensor& image, const std::string& path, double lo, double hi) {
  if (!(hi > lo)) throw ValidationError("png_export: window_hi must exceed window_lo");
  int64_t h, w, offset = 0;
  if (image.ndim() == 2) {
    h = image.dim(0);
    w = image.dim(1);
  } else if (image.ndim() == 3 && image.dim(0) == 1) {
    h = image.dim(1);
    w = image.dim(2);
  } else {
    throw ValidationError("png_export expects an HxW image or a batch of one, got " + shape_str(image.shape()));
  }

  // one filter byte (0 = none) per row, then big-endian 16-bit samples
  std::vector<unsigned char> raw(size_t(h) * (1 + size_t(w) * 2));
  double span = hi - lo;
  for (int64_t i = 0; i < h; ++i) {
    unsigned char* row = raw.data() + size_t(i) * (1 + size_t(w) * 2);
    row[0] = 0;
    for (int64_t j = 0; j < w; ++j) {
      double v = (image.at(offset + i * w + j) - lo) / span;
      v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
      auto q = uint16_t(std::lround(v * 65535.0));
      row[1 + j * 2] = uint8_t(q >> 8);
      row[2 + j * 2] = uint8_t(q & 0xFF);
    }
  }

  uLongf bound = compressBound(uLong(raw.size()));
  std::vector<unsigned char> compressed(bound);
  if (compress2(compressed.data(), &bound, raw.data(), uLong(raw.size()), Z_DEFAULT_COMPRESSION) != Z_OK)
    throw NumericalError("png_export: deflate failed");
  compressed.resize(bound);

  std::vector<unsigned char> file;
  const unsigned char sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
  file.insert(file.end(), sig, sig + 8);
  std::vector<unsigned char> ihdr;
  put_u32(ihdr, uint32_t(w));
  put_u32(ihdr, uint32_t(h));
  ihdr.push_back(16);  // bit depth
  ihdr.push_back(0);   // grayscale
  ihdr.push_back(0);   // deflate
  ihdr.push_back(0);   // adaptive filtering
  ihdr.push_back(0);   // no interlace
  put_chunk(file, "IHDR", ihdr);
  put_chunk(file, "IDAT", compressed);
  put_chunk(file, "IEND", {});

  std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ValidationError(path + ": cannot open for writing");
    f.write(reinterpret_cast<const char*>(file.data()), std::streamsize(file.size()));
    if (!f) throw ValidationError(path + ": write failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw ValidationError(path + ": rename failed: " + ec.message());
  }
}

}  // namespace radonkit
