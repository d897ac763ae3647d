#pragma once

#include <array>
#include <vector>

#include "homogeig/common.hpp"

namespace homogeig {

/// Partition 0 = x_0 < x_1 < ... < x_n = L of an interval.
class Mesh1 {
 public:
  static Mesh1 uniform(double length, int cells);
  static Mesh1 from_nodes(std::vector<double> nodes);

  int cells() const { return static_cast<int>(nodes_.size()) - 1; }
  int vertex_count() const { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& nodes() const { return nodes_; }
  double length() const { return nodes_.back(); }

 private:
  explicit Mesh1(std::vector<double> nodes) : nodes_(std::move(nodes)) {}
  std::vector<double> nodes_;
};

/// Uniform triangulation of (0, lx) x (0, ly) with nx * ny rectangular cells,
/// each cut along one diagonal. The diagonal direction alternates in a
/// checkerboard pattern, so the mesh is symmetric under the reflections of
/// the rectangle.
///
/// Vertex (i, j) has index j * (nx + 1) + i. Triangles are counterclockwise.
/// Boundary edges run counterclockwise starting at the origin.
class Mesh2 {
 public:
  static Mesh2 criss_cross(double lx, double ly, int nx, int ny);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double lx() const { return lx_; }
  double ly() const { return ly_; }
  double hx() const { return lx_ / nx_; }
  double hy() const { return ly_ / ny_; }
  /// Longest triangle edge (the cell diagonal).
  double diameter() const;

  int vertex_count() const { return static_cast<int>(vertices_.size()); }
  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<std::array<int, 2>>& boundary_edges() const { return boundary_edges_; }
  const std::vector<char>& on_boundary() const { return on_boundary_; }
  int vertex(int i, int j) const { return j * (nx_ + 1) + i; }

 private:
  Mesh2() = default;

  int nx_ = 0, ny_ = 0;
  double lx_ = 0, ly_ = 0;
  std::vector<Point> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<std::array<int, 2>> boundary_edges_;
  std::vector<char> on_boundary_;
};

}  // namespace homogeig
