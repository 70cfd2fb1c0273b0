// STL (binary and ASCII) and minimal OBJ readers/writers.
//
// Binary STL: 80-byte header (ignored on read), little-endian uint32 triangle
// count, then 50 bytes per triangle (normal + 3 vertices as float32, 2-byte
// attribute written as zero). Binary round trips are bit-exact.
// ASCII STL: solid/facet/loop grammar, writer emits 6 significant digits.
// OBJ: `v x y z` and `f i j k` (1-based) records only.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shellforge/mesh.hpp"

namespace shellforge {

enum class MeshFormat { StlBinary, StlAscii, Obj };

TriangleMesh parse_mesh(const std::vector<std::uint8_t>& bytes, MeshFormat format);
std::vector<std::uint8_t> write_mesh(const TriangleMesh& mesh, MeshFormat format);

// File helpers. Format chosen by extension (.stl/.obj); for .stl files the
// content decides binary vs ASCII (exact byte-count check, not just the
// "solid" prefix).
TriangleMesh load_mesh(const std::string& path);
void save_mesh(const TriangleMesh& mesh, const std::string& path);

std::vector<std::uint8_t> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes);

}  // namespace shellforge
