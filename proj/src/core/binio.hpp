#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "core/errors.hpp"

namespace mmb {

// Little-endian binary readers/writers used by the dataset and checkpoint
// containers, with CRC32 running over every byte written/read.

inline std::uint32_t crc32_update(std::uint32_t crc, const void* bytes,
                                  std::size_t n) {
  static const auto table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  const auto* p = static_cast<const unsigned char*>(bytes);
  crc = ~crc;
  for (std::size_t i = 0; i < n; ++i) crc = table[(crc ^ p[i]) & 0xff] ^ (crc >> 8);
  return ~crc;
}

class BinWriter {
 public:
  explicit BinWriter(const std::string& path)
      : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw IoError("cannot open '" + path + "' for writing");
  }

  void bytes(const void* p, std::size_t n) {
    out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    crc_ = crc32_update(crc_, p, n);
  }

  void u8(std::uint8_t v) { bytes(&v, 1); }

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

  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

  void str(const std::string& s) {
    u64(s.size());
    bytes(s.data(), s.size());
  }

  std::uint32_t crc() const { return crc_; }

  // Appends the running CRC (not itself checksummed) and closes.
  void finish_with_crc() {
    const std::uint32_t c = crc_;
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(c >> (8 * i));
    out_.write(reinterpret_cast<const char*>(b), 4);
    out_.close();
    if (!out_) throw IoError("write failed for '" + path_ + "'");
  }

 private:
  std::string path_;
  std::ofstream out_;
  std::uint32_t crc_ = 0;
};

class BinReader {
 public:
  explicit BinReader(const std::string& path) : path_(path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    buf_.assign(std::istreambuf_iterator<char>(in),
                std::istreambuf_iterator<char>());
  }

  void bytes(void* p, std::size_t n) {
    if (pos_ + n > buf_.size())
      throw IoError("truncated file '" + path_ + "'");
    std::memcpy(p, buf_.data() + pos_, n);
    pos_ += n;
  }

  std::uint8_t u8() {
    std::uint8_t v;
    bytes(&v, 1);
    return v;
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

  double f64() { return std::bit_cast<double>(u64()); }

  std::string str() {
    const std::uint64_t n = u64();
    if (n > buf_.size()) throw IoError("corrupt string length in '" + path_ + "'");
    std::string s(n, '\0');
    bytes(s.data(), n);
    return s;
  }

  // Verifies the trailing CRC against all bytes before it. Call before any
  // reads; reading then proceeds from the start of the payload.
  void verify_trailing_crc() {
    if (buf_.size() < 4) throw IoError("truncated file '" + path_ + "'");
    const std::size_t body = buf_.size() - 4;
    std::uint32_t stored = 0;
    for (int i = 0; i < 4; ++i)
      stored |= static_cast<std::uint32_t>(
                    static_cast<unsigned char>(buf_[body + i]))
                << (8 * i);
    const std::uint32_t actual = crc32_update(0, buf_.data(), body);
    if (stored != actual)
      throw IoError("checksum mismatch in '" + path_ +
                     "' (file corrupted or truncated)");
    end_ = body;
  }

  bool at_payload_end() const { return pos_ >= end_; }

 private:
  std::string path_;
  std::vector<char> buf_;
  std::size_t pos_ = 0;
  std::size_t end_ = 0;
};

}  // namespace mmb
