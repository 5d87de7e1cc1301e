#include "dmuq/mesh.hpp"

#include <stdexcept>

namespace dmuq {

Mesh build_unit_square_mesh(int n) {
  if (n < 3) throw std::invalid_argument("mesh needs at least 3 vertices per side");
  Mesh m;
  m.n = n;
  m.h = 1.0 / (n - 1);
  m.vertices.reserve(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      m.vertices.emplace_back(i * m.h, j * m.h);

  m.triangles.reserve(2 * static_cast<std::size_t>(n - 1) * (n - 1));
  for (int j = 0; j + 1 < n; ++j)
    for (int i = 0; i + 1 < n; ++i) {
      const int v00 = m.vertex_id(i, j), v10 = m.vertex_id(i + 1, j);
      const int v01 = m.vertex_id(i, j + 1), v11 = m.vertex_id(i + 1, j + 1);
      m.triangles.push_back({v00, v10, v11});
      m.triangles.push_back({v00, v11, v01});
    }

  m.on_boundary.assign(m.vertices.size(), 0);
  m.interior_index.assign(m.vertices.size(), -1);
  m.boundary_index.assign(m.vertices.size(), -1);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int v = m.vertex_id(i, j);
      if (i == 0 || j == 0 || i == n - 1 || j == n - 1) {
        m.on_boundary[v] = 1;
        m.boundary_index[v] = m.n_boundary++;
      } else {
        m.interior_index[v] = m.n_interior++;
      }
    }
  return m;
}

double triangle_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b - a)[0] * (c - a)[1] - (b - a)[1] * (c - a)[0]);
}

Vec2 triangle_centroid(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (a + b + c) / 3.0;
}

}  // namespace dmuq
