#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "synve/error.hpp"

namespace synve::detail {

static_assert(std::endian::native == std::endian::little,
              "binary formats are little-endian and read with memcpy");

class ByteWriter {
 public:
  template <typename T>
    requires std::is_arithmetic_v<T>
  void put(T value) {
    const auto* p = reinterpret_cast<const char*>(&value);
    bytes_.insert(bytes_.end(), p, p + sizeof(T));
  }

  template <typename T>
    requires std::is_arithmetic_v<T>
  void put_array(std::span<const T> values) {
    const auto* p = reinterpret_cast<const char*>(values.data());
    bytes_.insert(bytes_.end(), p, p + values.size_bytes());
  }

  void put_raw(std::string_view raw) { bytes_.insert(bytes_.end(), raw.begin(), raw.end()); }

  // u16 length prefix + bytes.
  void put_short_string(std::string_view s) {
    if (s.size() > UINT16_MAX) throw InputError("string longer than 65535 bytes: " + std::string(s.substr(0, 32)));
    put(static_cast<std::uint16_t>(s.size()));
    put_raw(s);
  }

  std::vector<char>& bytes() { return bytes_; }

 private:
  std::vector<char> bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const char> bytes) : bytes_(bytes) {}

  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::size_t position() const { return pos_; }

  template <typename T>
    requires std::is_arithmetic_v<T>
  T get(const char* what) {
    require(sizeof(T), what);
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  template <typename T>
    requires std::is_arithmetic_v<T>
  void get_array(std::span<T> out, const char* what) {
    require(out.size_bytes(), what);
    std::memcpy(out.data(), bytes_.data() + pos_, out.size_bytes());
    pos_ += out.size_bytes();
  }

  std::string_view get_raw(std::size_t n, const char* what) {
    require(n, what);
    std::string_view s(bytes_.data() + pos_, n);
    pos_ += n;
    return s;
  }

  std::string get_short_string(const char* what) {
    const auto len = get<std::uint16_t>(what);
    return std::string(get_raw(len, what));
  }

 private:
  void require(std::size_t n, const char* what) const {
    if (remaining() < n) throw InputError(std::string("truncated payload: ") + what);
  }

  std::span<const char> bytes_;
  std::size_t pos_ = 0;
};

std::vector<char> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const char> bytes);

}  // namespace synve::detail
