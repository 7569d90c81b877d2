#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "radarsr/errors.hpp"

namespace radarsr::detail {

// Little-endian encoders; byte order is explicit so files match on any host.
class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& os) : os_(os) {}

  void bytes(const void* p, std::size_t n) { os_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); }
  void u32(std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(b, 4);
  }
  void u64(std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(b, 8);
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

 private:
  std::ostream& os_;
};

class BinaryReader {
 public:
  BinaryReader(std::istream& is, std::string path) : is_(is), path_(std::move(path)) {}

  std::uint64_t offset() const { return offset_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& what) const { throw LoadError(path_, offset_, what); }

  void bytes(void* p, std::size_t n) {
    is_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is_.gcount()) != n) fail("unexpected end of file");
    offset_ += n;
  }
  std::uint32_t u32() {
    unsigned char b[4];
    bytes(b, 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    unsigned char b[8];
    bytes(b, 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  void expect_magic(const char (&magic)[5]) {
    char m[4];
    bytes(m, 4);
    if (std::memcmp(m, magic, 4) != 0) {
      offset_ -= 4;
      fail(std::string("bad magic, expected ") + magic);
    }
  }
  void expect_eof() {
    if (is_.peek() != std::char_traits<char>::eof()) fail("trailing bytes after payload");
  }

 private:
  std::istream& is_;
  std::string path_;
  std::uint64_t offset_ = 0;
};

}  // namespace radarsr::detail
