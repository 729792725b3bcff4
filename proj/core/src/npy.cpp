#include "radonkit/npy.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "radonkit/errors.hpp"

static_assert(std::endian::native == std::endian::little, "npy reader assumes a little-endian host");

namespace radonkit {

namespace {

constexpr char kMagic[6] = {'\x93', 'N', 'U', 'M', 'P', 'Y'};

size_t item_size(Precision p) {
  switch (p) {
    case Precision::Half: return 2;
    case Precision::Single: return 4;
    case Precision::Double: return 8;
  }
  return 0;
}

const char* descr_of(Precision p) {
  switch (p) {
    case Precision::Half: return "<f2";
    case Precision::Single: return "<f4";
    case Precision::Double: return "<f8";
  }
  return "";
}

// Minimal parser for the python dict literal numpy writes. Only the three
// known keys are extracted; anything structurally unexpected is an error.
std::string dict_field(const std::string& header, const std::string& key, const std::string& path) {
  std::string needle = "'" + key + "':";
  size_t pos = header.find(needle);
  if (pos == std::string::npos)
    throw ValidationError(path + ": npy header is missing the '" + key + "' field");
  pos += needle.size();
  while (pos < header.size() && header[pos] == ' ') ++pos;
  if (pos >= header.size()) throw ValidationError(path + ": npy header ends inside the '" + key + "' field");
  if (header[pos] == '\'') {
    size_t end = header.find('\'', pos + 1);
    if (end == std::string::npos) throw ValidationError(path + ": unterminated string in npy header");
    return header.substr(pos + 1, end - pos - 1);
  }
  if (header[pos] == '(') {
    size_t end = header.find(')', pos);
    if (end == std::string::npos) throw ValidationError(path + ": unterminated tuple in npy header");
    return header.substr(pos, end - pos + 1);
  }
  size_t end = header.find_first_of(",}", pos);
  if (end == std::string::npos) throw ValidationError(path + ": malformed npy header");
  std::string v = header.substr(pos, end - pos);
  while (!v.empty() && v.back() == ' ') v.pop_back();
  return v;
}

Shape parse_shape(const std::string& tuple, const std::string& path) {
  Shape shape;
  std::string inner = tuple.substr(1, tuple.size() - 2);
  std::istringstream ss(inner);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    size_t a = tok.find_first_not_of(' ');
    if (a == std::string::npos) continue;
    size_t b = tok.find_last_not_of(' ');
    tok = tok.substr(a, b - a + 1);
    if (tok.empty()) continue;
    try {
      shape.push_back(std::stoll(tok));
    } catch (const std::exception&) {
      throw ValidationError(path + ": bad dimension '" + tok + "' in npy shape");
    }
  }
  return shape;
}

}  // namespace

Tensor read_array(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError(path + ": cannot open file");
  char preamble[10];
  f.read(preamble, 10);
  if (f.gcount() != 10) throw ValidationError(path + ": truncated npy preamble at byte offset 0");
  if (std::memcmp(preamble, kMagic, 6) != 0) throw ValidationError(path + ": bad npy magic at byte offset 0");
  uint8_t major = uint8_t(preamble[6]);
  if (major != 1)
    throw ValidationError(path + ": unsupported npy version " + std::to_string(major) + " at byte offset 6");
  uint16_t header_len = uint16_t(uint8_t(preamble[8])) | uint16_t(uint8_t(preamble[9])) << 8;
  std::string header(header_len, '\0');
  f.read(header.data(), header_len);
  if (f.gcount() != header_len) throw ValidationError(path + ": truncated npy header at byte offset 10");

  std::string descr = dict_field(header, "descr", path);
  std::string order = dict_field(header, "fortran_order", path);
  std::string shape_tok = dict_field(header, "shape", path);
  if (order == "True")
    throw ValidationError(path + ": fortran_order arrays are an unsupported layout");
  if (order != "False") throw ValidationError(path + ": bad fortran_order value '" + order + "'");

  Precision p;
  if (descr == "<f2") p = Precision::Half;
  else if (descr == "<f4") p = Precision::Single;
  else if (descr == "<f8") p = Precision::Double;
  else throw ValidationError(path + ": unsupported dtype '" + descr + "' (expected <f2, <f4, or <f8)");

  Shape shape = parse_shape(shape_tok, path);
  if (shape.empty()) throw ValidationError(path + ": 0-d arrays are not supported");
  for (int64_t d : shape)
    if (d <= 0) throw ValidationError(path + ": empty array (shape " + shape_str(shape) + ")");

  int64_t n = shape_numel(shape);
  size_t isz = item_size(p);
  size_t payload_offset = 10 + size_t(header_len);
  std::vector<char> payload(size_t(n) * isz);
  f.read(payload.data(), std::streamsize(payload.size()));
  if (size_t(f.gcount()) != payload.size())
    throw ValidationError(path + ": truncated payload at byte offset " +
                          std::to_string(payload_offset + size_t(f.gcount())) + " (expected " +
                          std::to_string(payload.size()) + " payload bytes)");

  switch (p) {
    case Precision::Half: {
      std::vector<uint16_t> bits(static_cast<size_t>(n));
      std::memcpy(bits.data(), payload.data(), payload.size());
      return Tensor::from_half_bits(std::move(shape), std::move(bits));
    }
    case Precision::Single: {
      std::vector<float> v(static_cast<size_t>(n));
      std::memcpy(v.data(), payload.data(), payload.size());
      return Tensor::from_vec(std::move(shape), std::move(v));
    }
    case Precision::Double: {
      std::vector<double> v(static_cast<size_t>(n));
      std::memcpy(v.data(), payload.data(), payload.size());
      return Tensor::from_vec(std::move(shape), std::move(v));
    }
  }
  throw ValidationError(path + ": unreachable dtype");
}

void write_array(const std::string& path, const Tensor& t) {
  if (!t.defined()) throw ValidationError("write_array: tensor is undefined");
  std::ostringstream dict;
  dict << "{'descr': '" << descr_of(t.precision()) << "', 'fortran_order': False, 'shape': (";
  for (int i = 0; i < t.ndim(); ++i) {
    dict << t.dim(i);
    if (t.ndim() == 1 || i + 1 < t.ndim()) dict << ",";
    if (i + 1 < t.ndim()) dict << " ";
  }
  dict << "), }";
  std::string header = dict.str();
  size_t unpadded = 10 + header.size() + 1;  // trailing newline
  size_t padded = (unpadded + 63) / 64 * 64;
  header.append(padded - unpadded, ' ');
  header.push_back('\n');

  std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ValidationError(path + ": cannot open for writing");
    f.write(kMagic, 6);
    char ver[2] = {1, 0};
    f.write(ver, 2);
    uint16_t hlen = uint16_t(header.size());
    char lenb[2] = {char(hlen & 0xFF), char(hlen >> 8)};
    f.write(lenb, 2);
    f.write(header.data(), std::streamsize(header.size()));
    switch (t.precision()) {
      case Precision::Half:
        f.write(reinterpret_cast<const char*>(t.half_bits().data()), std::streamsize(t.size() * 2));
        break;
      case Precision::Single:
        f.write(reinterpret_cast<const char*>(t.float_data().data()), std::streamsize(t.size() * 4));
        break;
      case Precision::Double:
        f.write(reinterpret_cast<const char*>(t.double_data().data()), std::streamsize(t.size() * 8));
        break;
    }
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
