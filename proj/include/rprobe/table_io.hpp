#pragma once

// Binary cache for diagonal tables.
//
// Layout (all integers little-endian):
//   magic    8 bytes  "RPROBE1\0"
//   n, x, y  3 x u32
//   L        u32
//   N        u64
//   payload  N x u16
//   checksum u64      FNV-1a over the payload bytes

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <span>
#include <string>

#include "rprobe/errors.hpp"
#include "rprobe/spectrum.hpp"

namespace rprobe {

inline constexpr std::array<char, 8> kTableMagic = {'R', 'P', 'R', 'O', 'B', 'E', '1', '\0'};

inline std::uint64_t fnv1a64(std::span<const unsigned char> bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a64(const std::string& s) {
  return fnv1a64(std::span(reinterpret_cast<const unsigned char*>(s.data()), s.size()));
}

namespace detail {

template <typename T>
void put_le(std::string& buf, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) buf.push_back(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff));
}

template <typename T>
T get_le(const unsigned char* p) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return static_cast<T>(v);
}

inline std::string payload_bytes(const DiagonalTable& table) {
  std::string buf;
  buf.reserve(table.values.size() * 2);
  for (auto v : table.values) put_le<std::uint16_t>(buf, v);
  return buf;
}

}  // namespace detail

// Digest of the table payload; used to tag traces and manifests.
inline std::uint64_t table_digest(const DiagonalTable& table) { return fnv1a64(detail::payload_bytes(table)); }

inline void save_table(const DiagonalTable& table, const std::string& path) {
  std::string buf(kTableMagic.begin(), kTableMagic.end());
  detail::put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(table.n));
  detail::put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(table.x));
  detail::put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(table.y));
  detail::put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(table.pairs()));
  detail::put_le<std::uint64_t>(buf, table.size());
  const std::string payload = detail::payload_bytes(table);
  buf += payload;
  detail::put_le<std::uint64_t>(buf, fnv1a64(payload));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open '" + path + "' for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw FormatError("write to '" + path + "' failed");
}

inline DiagonalTable load_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  const std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  constexpr std::size_t header = 8 + 4 * 4 + 8;
  if (raw.size() < header + 8) throw FormatError("'" + path + "' is too short for a table header");
  if (std::memcmp(raw.data(), kTableMagic.data(), kTableMagic.size()) != 0)
    throw FormatError("'" + path + "' has a bad magic string");

  const auto* p = reinterpret_cast<const unsigned char*>(raw.data());
  DiagonalTable table;
  table.n = static_cast<int>(detail::get_le<std::uint32_t>(p + 8));
  table.x = static_cast<int>(detail::get_le<std::uint32_t>(p + 12));
  table.y = static_cast<int>(detail::get_le<std::uint32_t>(p + 16));
  const auto L = detail::get_le<std::uint32_t>(p + 20);
  const auto N = detail::get_le<std::uint64_t>(p + 24);
  if (table.n < 2 || table.n > kMaxVertices || static_cast<int>(L) != pair_count(table.n))
    throw FormatError("header L=" + std::to_string(L) + " disagrees with n=" + std::to_string(table.n));
  if (N != (std::uint64_t{1} << L)) throw FormatError("header N=" + std::to_string(N) + " is not 2^L");
  if (raw.size() != header + 2 * N + 8)
    throw FormatError("payload length " + std::to_string(raw.size()) + " bytes, expected " +
                      std::to_string(header + 2 * N + 8));

  const std::string payload = raw.substr(header, 2 * N);
  if (fnv1a64(payload) != detail::get_le<std::uint64_t>(p + header + 2 * N))
    throw FormatError("checksum mismatch in '" + path + "'");
  table.values.resize(N);
  for (std::uint64_t k = 0; k < N; ++k) table.values[k] = detail::get_le<std::uint16_t>(p + header + 2 * k);
  return table;
}

// Loads and checks the header against the expected problem.
inline DiagonalTable load_table(const std::string& path, int n, int x, int y) {
  auto table = load_table(path);
  if (table.n != n || table.x != x || table.y != y)
    throw FormatError("table '" + path + "' holds (n,x,y)=(" + std::to_string(table.n) + "," +
                      std::to_string(table.x) + "," + std::to_string(table.y) + "), expected (" +
                      std::to_string(n) + "," + std::to_string(x) + "," + std::to_string(y) + ")");
  return table;
}

}  // namespace rprobe
