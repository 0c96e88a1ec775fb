#pragma once

#include <iosfwd>
#include <string>

#include "core/lattice.hpp"

namespace fredlab::dump {

// Layout: 8-byte magic "FRLBOP01", little-endian uint32 header length, JSON header with
// the geometry fields, then rows*cols (re, im) float64 pairs in row-major order.
inline constexpr char kMagic[9] = "FRLBOP01";

void write_operator(std::ostream& os, const lattice::LatticeOperator& a);
lattice::LatticeOperator read_operator(std::istream& is);

void save_operator(const std::string& path, const lattice::LatticeOperator& a);
lattice::LatticeOperator load_operator(const std::string& path);

std::string geometry_json(const lattice::LatticeGeometry& g);
lattice::LatticeGeometry geometry_from_json(const std::string& text);

}  // namespace fredlab::dump
