#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "cousinlab/delaunay.hpp"
#include "cousinlab/grid.hpp"

namespace cousinlab {

using json = nlohmann::ordered_json;

std::string base64_encode(const unsigned char* data, size_t len);
std::vector<unsigned char> base64_decode(const std::string& text);

/// Grid as a JSON record: header fields plus the node quaternions as a
/// base64 little-endian float64 array in [w, x, y, z] component order.
json grid_to_json(const ImmersionGrid& g);
ImmersionGrid grid_from_json(const json& j);

void save_grid(const ImmersionGrid& g, const std::string& path);
ImmersionGrid load_grid(const std::string& path);

/// OBJ export of an R^3 grid: vertices in row-major node order, quads split
/// into two triangles wound so the face normals match the orientation
/// normal fx x fy.  Coordinates are printed with 17 significant digits so a
/// decimal round trip is exact.
void export_obj(const ImmersionGrid& g, const std::string& path);

struct ObjMesh {
    std::vector<Eigen::Vector3d> vertices;
    std::vector<std::array<int, 3>> faces; // zero-based
};
ObjMesh import_obj(const std::string& path);

/// Profile CSV with columns s, r, z, phi, force.
void export_profile_csv(const UnduloidProfile& p, const std::string& path);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

} // namespace cousinlab
