#pragma once

#include "ocokit/prox.hpp"

#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

namespace ocokit {

/// 64-bit FNV-1a, used for trace and comparator fingerprints.
class Fnv1a {
 public:
  void bytes(const void* data, size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= 0x100000001b3ULL;
    }
  }
  void add(double v) { bytes(&v, sizeof v); }
  void add(std::int64_t v) { bytes(&v, sizeof v); }
  void add(std::string_view s) { bytes(s.data(), s.size()); }
  void add(const Vector& v) {
    add(static_cast<std::int64_t>(v.size()));
    if (v.size() > 0) bytes(v.data(), sizeof(double) * static_cast<size_t>(v.size()));
  }
  std::uint64_t value() const { return h_; }
  std::string hex() const;

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

inline std::string Fnv1a::hex() const {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  std::uint64_t h = h_;
  for (int i = 15; i >= 0; --i) {
    s[static_cast<size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return s;
}

inline std::string hash_vector(const Vector& v) {
  Fnv1a h;
  h.add(v);
  return h.hex();
}

}  // namespace ocokit
