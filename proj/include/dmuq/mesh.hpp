#pragma once
// Structured triangulation of the closed unit square: n x n vertices, every
// cell split along the same diagonal.

#include <array>
#include <cstdint>
#include <vector>

#include "dmuq/deformation.hpp"

namespace dmuq {

struct Mesh {
  int n = 0;      // vertices per side
  double h = 0;   // 1 / (n - 1)
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;  // counterclockwise
  std::vector<std::uint8_t> on_boundary;
  std::vector<int> interior_index;  // -1 on the boundary
  std::vector<int> boundary_index;  // -1 in the interior
  int n_interior = 0;
  int n_boundary = 0;

  int vertex_id(int i, int j) const { return j * n + i; }
};

Mesh build_unit_square_mesh(int n);

double triangle_area(const Vec2& a, const Vec2& b, const Vec2& c);
Vec2 triangle_centroid(const Vec2& a, const Vec2& b, const Vec2& c);

}  // namespace dmuq
