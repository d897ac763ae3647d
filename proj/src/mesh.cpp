#include "homogeig/mesh.hpp"

#include <algorithm>

namespace homogeig {

Mesh1 Mesh1::uniform(double length, int cells) {
  if (cells < 1) throw Error(ErrorCode::InvalidArgument, "mesh needs at least one cell");
  if (!(length > 0.0)) throw Error(ErrorCode::InvalidArgument, "mesh length must be positive");
  std::vector<double> x(static_cast<std::size_t>(cells) + 1);
  for (int i = 0; i <= cells; ++i) x[i] = length * i / cells;
  x.back() = length;
  return Mesh1(std::move(x));
}

Mesh1 Mesh1::from_nodes(std::vector<double> nodes) {
  if (nodes.size() < 2 || nodes.front() != 0.0)
    throw Error(ErrorCode::InvalidArgument, "mesh nodes must start at 0 and have two entries");
  if (!std::is_sorted(nodes.begin(), nodes.end()) ||
      std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end())
    throw Error(ErrorCode::InvalidArgument, "mesh nodes must be strictly increasing");
  return Mesh1(std::move(nodes));
}

Mesh2 Mesh2::criss_cross(double lx, double ly, int nx, int ny) {
  if (nx < 1 || ny < 1) throw Error(ErrorCode::InvalidArgument, "mesh needs nx, ny >= 1");
  if (!(lx > 0.0) || !(ly > 0.0)) throw Error(ErrorCode::InvalidArgument, "mesh sides must be positive");
  Mesh2 m;
  m.nx_ = nx;
  m.ny_ = ny;
  m.lx_ = lx;
  m.ly_ = ly;
  m.vertices_.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  m.on_boundary_.reserve(m.vertices_.capacity());
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      m.vertices_.push_back({i == nx ? lx : lx * i / nx, j == ny ? ly : ly * j / ny});
      m.on_boundary_.push_back(i == 0 || j == 0 || i == nx || j == ny);
    }
  m.triangles_.reserve(2 * static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int v00 = m.vertex(i, j), v10 = m.vertex(i + 1, j);
      const int v01 = m.vertex(i, j + 1), v11 = m.vertex(i + 1, j + 1);
      if ((i + j) % 2 == 0) {
        m.triangles_.push_back({v00, v10, v11});
        m.triangles_.push_back({v00, v11, v01});
      } else {
        m.triangles_.push_back({v00, v10, v01});
        m.triangles_.push_back({v10, v11, v01});
      }
    }
  for (int i = 0; i < nx; ++i) m.boundary_edges_.push_back({m.vertex(i, 0), m.vertex(i + 1, 0)});
  for (int j = 0; j < ny; ++j) m.boundary_edges_.push_back({m.vertex(nx, j), m.vertex(nx, j + 1)});
  for (int i = nx; i > 0; --i) m.boundary_edges_.push_back({m.vertex(i, ny), m.vertex(i - 1, ny)});
  for (int j = ny; j > 0; --j) m.boundary_edges_.push_back({m.vertex(0, j), m.vertex(0, j - 1)});
  return m;
}

double Mesh2::diameter() const { return std::hypot(hx(), hy()); }

}  // namespace homogeig
