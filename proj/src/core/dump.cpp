#include "core/dump.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

namespace fredlab::dump {

static_assert(std::endian::native == std::endian::little, "dump format assumes a little-endian host");

using json = nlohmann::json;
using lattice::LatticeGeometry;

namespace {

json geometry_to(const LatticeGeometry& g) {
  return json{{"kind", g.kind == lattice::GeometryKind::bulk ? "bulk" : "half-space"},
              {"x1", {g.x1.lo, g.x1.hi}},
              {"x2", {g.x2.lo, g.x2.hi}},
              {"n_internal", g.n_internal},
              {"origin_offset", {g.origin_offset[0], g.origin_offset[1]}},
              {"periodic", {g.periodic[0], g.periodic[1]}}};
}

LatticeGeometry geometry_from(const json& j) {
  try {
    LatticeGeometry g;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "bulk")
      g.kind = lattice::GeometryKind::bulk;
    else if (kind == "half-space")
      g.kind = lattice::GeometryKind::half_space;
    else
      fail(ErrorCode::schema, "unknown geometry kind '" + kind + "'");
    g.x1 = {j.at("x1").at(0).get<int>(), j.at("x1").at(1).get<int>()};
    g.x2 = {j.at("x2").at(0).get<int>(), j.at("x2").at(1).get<int>()};
    g.n_internal = j.at("n_internal").get<int>();
    g.origin_offset = {j.at("origin_offset").at(0).get<double>(), j.at("origin_offset").at(1).get<double>()};
    g.periodic = {j.at("periodic").at(0).get<bool>(), j.at("periodic").at(1).get<bool>()};
    g.validate();
    return g;
  } catch (const json::exception& e) {
    fail(ErrorCode::schema, std::string("geometry header: ") + e.what());
  }
}

}  // namespace

std::string geometry_json(const LatticeGeometry& g) { return geometry_to(g).dump(); }

LatticeGeometry geometry_from_json(const std::string& text) {
  try {
    return geometry_from(json::parse(text));
  } catch (const json::parse_error& e) {
    fail(ErrorCode::schema, std::string("geometry header: ") + e.what());
  }
}

void write_operator(std::ostream& os, const lattice::LatticeOperator& a) {
  json header = geometry_to(a.geometry());
  header["rows"] = a.matrix().rows();
  header["cols"] = a.matrix().cols();
  header["ordering"] = "x2-major,x1,s";
  const std::string text = header.dump();
  const auto len = static_cast<std::uint32_t>(text.size());
  os.write(kMagic, 8);
  os.write(reinterpret_cast<const char*>(&len), sizeof len);
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  const auto& m = a.matrix();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double pair[2] = {m(r, c).real(), m(r, c).imag()};
      os.write(reinterpret_cast<const char*>(pair), sizeof pair);
    }
  if (!os) fail(ErrorCode::io, "operator dump: write failed");
}

lattice::LatticeOperator read_operator(std::istream& is) {
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) fail(ErrorCode::schema, "operator dump: bad magic");
  std::uint32_t len = 0;
  if (!is.read(reinterpret_cast<char*>(&len), sizeof len) || len > (1u << 20))
    fail(ErrorCode::schema, "operator dump: bad header length");
  std::string text(len, '\0');
  if (!is.read(text.data(), len)) fail(ErrorCode::schema, "operator dump: truncated header");
  json header;
  try {
    header = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::schema, std::string("operator dump header: ") + e.what());
  }
  const LatticeGeometry g = geometry_from(header);
  const auto rows = header.value("rows", Eigen::Index{-1}), cols = header.value("cols", Eigen::Index{-1});
  if (rows != g.dim() || cols != g.dim()) fail(ErrorCode::schema, "operator dump: matrix size does not match geometry");
  lattice::Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) {
      double pair[2];
      if (!is.read(reinterpret_cast<char*>(pair), sizeof pair)) fail(ErrorCode::schema, "operator dump: truncated data");
      m(r, c) = {pair[0], pair[1]};
    }
  return lattice::LatticeOperator(g, std::move(m));
}

void save_operator(const std::string& path, const lattice::LatticeOperator& a) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorCode::io, "cannot open '" + path + "' for writing");
  write_operator(os, a);
}

lattice::LatticeOperator load_operator(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCode::io, "cannot open '" + path + "'");
  return read_operator(is);
}

}  // namespace fredlab::dump
