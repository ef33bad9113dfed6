#pragma once

// Triangulations of the benchmark domains: plain structured meshes plus the
// Powell-Sabin (incenter, 6 children) and HCT (barycenter, 3 children)
// refinements.  All meshes are globally conforming; hanging nodes are not
// representable.  Edges are classified as interior (both neighbours in the
// same subdomain), interface (neighbours in different subdomains) or
// boundary (one neighbour).

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

namespace maxip {

using Vec2 = Eigen::Vector2d;

enum class EdgeKind { interior, interface, boundary };

struct Edge {
  int a = -1, b = -1;        // vertex ids, a < b
  int tri[2] = {-1, -1};     // adjacent triangles; tri[1] == -1 on the boundary
  EdgeKind kind = EdgeKind::interior;
};

struct Triangle {
  std::array<int, 3> v{};    // counter-clockwise vertex ids
  int subdomain = 1;         // 1-based
};

struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<Triangle> triangles;
  std::vector<Edge> edges;   // canonical order: sorted by (a, b)
  double h = 0.0;            // max over triangles of the longest edge
  int subdomain_count = 1;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }
};

enum class DomainKind { unit_square_single, square_checkerboard, lshape_three_subdomains };

// Subdomain numbering (counter-clockwise from the first quadrant):
//   unit_square_single:      (0,1)^2 -> 1
//   square_checkerboard:     (0,1)^2 -> 1, (-1,0)x(0,1) -> 2, (-1,0)^2 -> 3, (0,1)x(-1,0) -> 4
//   lshape_three_subdomains: (0,1)^2 -> 1, (-1,0)x(0,1) -> 2, (-1,0)^2 -> 3
struct DomainSpec {
  DomainKind kind = DomainKind::unit_square_single;

  int subdomain_count() const;
  // Subdomain of an interior point (points on the axes are not classified).
  int subdomain_of(const Vec2& p) const;
  // True if the open domain contains the point.
  bool contains(const Vec2& p) const;
};

// n = round(1/target_h) square cells per unit side, each split into two
// triangles along the diagonal pointing toward the origin.
Mesh generate_structured(const DomainSpec& domain, double target_h);

// Six children per triangle: incenter joined to the three vertices and the
// three edge midpoints.  Midpoints are shared between neighbours, so the
// result is conforming.
Mesh powell_sabin_refine(const Mesh& mesh);

// Three children per triangle: barycenter joined to the three vertices.
Mesh hct_refine(const Mesh& mesh);

// Rebuilds the edge list, classifies every edge and recomputes h.  Throws on
// non-manifold connectivity (an edge with more than two triangles).
Mesh classify_edges(Mesh mesh);

// Plain-text format.  First non-comment line: "nv nt"; nv lines "x y";
// nt lines "v0 v1 v2 sub" with 0-based vertices and 1-based subdomains.
// '#' starts a comment.  Reading a clockwise triangle reorients it (or throws
// when strict).  Coordinates are written with 17 significant digits.
Mesh read_mesh(const std::string& path, bool strict = false);
void write_mesh(const Mesh& mesh, const std::string& path);

double triangle_area(const Vec2& a, const Vec2& b, const Vec2& c);
Vec2 triangle_incenter(const Vec2& a, const Vec2& b, const Vec2& c);

}  // namespace maxip
