// Copyright 2026 The tgode Authors
// SPDX-License-Identifier: Apache-2.0
//
// Little-endian fixed-width primitives shared by the snapshot and checkpoint
// formats.

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "tgode/error.hpp"

namespace tgode::binary {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

inline void put_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

inline void put_i64(std::ostream& out, std::int64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

inline void put_f64(std::ostream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

inline void put_f64s(std::ostream& out, const double* data, std::size_t n) {
  put_u64(out, n);
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
}

inline void put_string(std::ostream& out, std::string_view s) {
  put_u64(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline void put_magic(std::ostream& out, std::string_view magic, std::uint64_t version) {
  out.write(magic.data(), static_cast<std::streamsize>(magic.size()));
  put_u64(out, version);
}

inline void read_exact(std::istream& in, void* dst, std::size_t n) {
  in.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) throw IoError("unexpected end of file");
}

inline std::uint64_t get_u64(std::istream& in) {
  std::uint64_t v;
  read_exact(in, &v, sizeof v);
  return v;
}

inline std::int64_t get_i64(std::istream& in) {
  std::int64_t v;
  read_exact(in, &v, sizeof v);
  return v;
}

inline double get_f64(std::istream& in) {
  double v;
  read_exact(in, &v, sizeof v);
  return v;
}

// Rejects lengths beyond `limit` so a corrupt header cannot request a huge
// allocation.
inline std::uint64_t get_length(std::istream& in, std::uint64_t limit = 1ull << 34) {
  const std::uint64_t n = get_u64(in);
  if (n > limit) throw IoError("corrupt length field");
  return n;
}

inline std::vector<double> get_f64s(std::istream& in) {
  std::vector<double> v(get_length(in));
  if (!v.empty()) read_exact(in, v.data(), v.size() * sizeof(double));
  return v;
}

inline std::string get_string(std::istream& in) {
  std::string s(get_length(in, 1ull << 30), '\0');
  if (!s.empty()) read_exact(in, s.data(), s.size());
  return s;
}

inline void expect_magic(std::istream& in, std::string_view magic, std::uint64_t version) {
  std::string got(magic.size(), '\0');
  read_exact(in, got.data(), got.size());
  if (got != magic) throw IoError("bad magic: expected " + std::string(magic));
  const std::uint64_t v = get_u64(in);
  if (v != version) {
    throw IoError("unsupported " + std::string(magic) + " version " + std::to_string(v));
  }
}

}  // namespace tgode::binary
