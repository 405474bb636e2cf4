#ifndef BIHNLS_FIELD_IO_HPP
#define BIHNLS_FIELD_IO_HPP

// BFLD1 container: one line of JSON metadata terminated by '\n', then the raw
// physical-space samples as little-endian IEEE-754 doubles, (re, im) per grid
// point in row-major order.  Round-trips are bit-exact: the bytes written are
// the bytes of the in-memory physical view, and the reader reconstructs the
// frequency view from them.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "bihnls/field.hpp"

namespace bihnls {

namespace detail {

inline void put_le64(std::ostream& os, double v) {
  std::uint64_t u = std::bit_cast<std::uint64_t>(v);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 8);
}

inline double get_le64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  if (!is) throw std::runtime_error("BFLD1: truncated sample block");
  std::uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(u);
}

}  // namespace detail

inline void write_field(const std::string& path, const Field& u,
                        const nlohmann::json& params = nlohmann::json::object()) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("BFLD1: cannot open '" + path + "' for writing");
  nlohmann::json head;
  head["format"] = "BFLD1";
  head["dim"] = u.grid().dim();
  head["halfWidth"] = u.grid().half_width();
  head["pointsPerAxis"] = u.grid().points_per_axis();
  head["syncState"] = to_string(u.origin());
  head["params"] = params;
  os << head.dump() << '\n';
  for (const auto& v : u.physical()) {
    detail::put_le64(os, v.real());
    detail::put_le64(os, v.imag());
  }
  if (!os) throw std::runtime_error("BFLD1: write failure on '" + path + "'");
}

inline Field read_field(const std::string& path, nlohmann::json* params_out = nullptr) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("BFLD1: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("BFLD1: missing header line in '" + path + "'");
  nlohmann::json head = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/true);
  if (head.value("format", "") != std::string("BFLD1"))
    throw std::runtime_error("BFLD1: '" + path + "' does not declare format BFLD1");
  SpectralGrid g(head.at("dim").get<int>(), head.at("halfWidth").get<double>(),
                 head.at("pointsPerAxis").get<int>());
  cvec phys(g.size());
  for (auto& v : phys) {
    const double re = detail::get_le64(is);
    const double im = detail::get_le64(is);
    v = {re, im};
  }
  if (params_out && head.contains("params")) *params_out = head["params"];
  return Field::from_physical(g, std::move(phys));
}

}  // namespace bihnls

#endif
