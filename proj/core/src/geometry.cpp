#include "maxip/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace maxip {

double triangle_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

Vec2 triangle_incenter(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double la = (c - b).norm();   // side opposite a
  const double lb = (a - c).norm();
  const double lc = (b - a).norm();
  return (la * a + lb * b + lc * c) / (la + lb + lc);
}

int DomainSpec::subdomain_count() const {
  switch (kind) {
    case DomainKind::unit_square_single: return 1;
    case DomainKind::square_checkerboard: return 4;
    case DomainKind::lshape_three_subdomains: return 3;
  }
  return 1;
}

int DomainSpec::subdomain_of(const Vec2& p) const {
  if (kind == DomainKind::unit_square_single) return 1;
  if (p.x() > 0 && p.y() > 0) return 1;
  if (p.x() < 0 && p.y() > 0) return 2;
  if (p.x() < 0 && p.y() < 0) return 3;
  // fourth quadrant: checkerboard subdomain 4, not part of the L-shape
  if (kind == DomainKind::square_checkerboard) return 4;
  throw std::invalid_argument("subdomain_of: point not inside the L-shaped domain");
}

bool DomainSpec::contains(const Vec2& p) const {
  switch (kind) {
    case DomainKind::unit_square_single:
      return p.x() > 0 && p.x() < 1 && p.y() > 0 && p.y() < 1;
    case DomainKind::square_checkerboard:
      return p.x() > -1 && p.x() < 1 && p.y() > -1 && p.y() < 1 && p.x() != 0 && p.y() != 0;
    case DomainKind::lshape_three_subdomains:
      return p.x() > -1 && p.x() < 1 && p.y() > -1 && p.y() < 1 && !(p.x() >= 0 && p.y() <= 0);
  }
  return false;
}

namespace {

double longest_edge(const Mesh& m, const Triangle& t) {
  const Vec2& a = m.vertices[t.v[0]];
  const Vec2& b = m.vertices[t.v[1]];
  const Vec2& c = m.vertices[t.v[2]];
  return std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
}

void require_ccw(Mesh& m, bool strict, int* reoriented) {
  for (auto& t : m.triangles) {
    const double area =
        triangle_area(m.vertices[t.v[0]], m.vertices[t.v[1]], m.vertices[t.v[2]]);
    if (area == 0.0) throw std::runtime_error("mesh: degenerate (zero-area) triangle");
    if (area < 0.0) {
      if (strict) throw std::runtime_error("mesh: clockwise triangle in strict mode");
      std::swap(t.v[1], t.v[2]);
      if (reoriented) ++*reoriented;
    }
  }
}

}  // namespace

Mesh classify_edges(Mesh mesh) {
  std::map<std::pair<int, int>, Edge> edges;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      int a = tri.v[k], b = tri.v[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      auto& e = edges[{a, b}];
      if (e.a < 0) {
        e.a = a;
        e.b = b;
        e.tri[0] = t;
      } else if (e.tri[1] < 0) {
        e.tri[1] = t;
      } else {
        throw std::runtime_error("mesh: non-manifold edge (more than two adjacent triangles)");
      }
    }
  }
  mesh.edges.clear();
  mesh.edges.reserve(edges.size());
  int max_sub = 0;
  for (const auto& t : mesh.triangles) max_sub = std::max(max_sub, t.subdomain);
  for (auto& [key, e] : edges) {
    if (e.tri[1] < 0) {
      e.kind = EdgeKind::boundary;
    } else if (mesh.triangles[e.tri[0]].subdomain == mesh.triangles[e.tri[1]].subdomain) {
      e.kind = EdgeKind::interior;
    } else {
      e.kind = EdgeKind::interface;
    }
    mesh.edges.push_back(e);
  }
  double h = 0;
  for (const auto& t : mesh.triangles) h = std::max(h, longest_edge(mesh, t));
  mesh.h = h;
  mesh.subdomain_count = max_sub;
  return mesh;
}

Mesh generate_structured(const DomainSpec& domain, double target_h) {
  if (!(target_h > 0)) throw std::invalid_argument("generate_structured: target_h must be > 0");
  const int n = std::max(1, static_cast<int>(std::lround(1.0 / target_h)));
  const double dx = 1.0 / n;

  // Grid extents in cell units.
  int i0 = 0, j0 = 0, i1 = n, j1 = n;
  if (domain.kind != DomainKind::unit_square_single) {
    i0 = j0 = -n;
  }

  Mesh mesh;
  std::unordered_map<long long, int> vertex_of;
  const long long stride = 4LL * n + 8;
  auto vertex = [&](int i, int j) {
    const long long key = (i - i0) * stride + (j - j0);
    auto it = vertex_of.find(key);
    if (it != vertex_of.end()) return it->second;
    const int id = mesh.num_vertices();
    mesh.vertices.emplace_back(i * dx, j * dx);
    vertex_of.emplace(key, id);
    return id;
  };

  for (int i = i0; i < i1; ++i) {
    for (int j = j0; j < j1; ++j) {
      const Vec2 center((i + 0.5) * dx, (j + 0.5) * dx);
      if (!domain.contains(center)) continue;
      const int sub = domain.subdomain_of(center);
      const int sw = vertex(i, j), se = vertex(i + 1, j);
      const int ne = vertex(i + 1, j + 1), nw = vertex(i, j + 1);
      // Diagonal toward the origin: quadrants 1 and 3 use sw-ne, 2 and 4 use se-nw.
      const bool sw_ne = center.x() * center.y() > 0;
      if (sw_ne) {
        mesh.triangles.push_back({{sw, se, ne}, sub});
        mesh.triangles.push_back({{sw, ne, nw}, sub});
      } else {
        mesh.triangles.push_back({{sw, se, nw}, sub});
        mesh.triangles.push_back({{se, ne, nw}, sub});
      }
    }
  }
  return classify_edges(std::move(mesh));
}

namespace {

// Shared refinement scaffolding: keeps parent vertices, adds one midpoint per
// parent edge on demand, adds per-triangle interior points.
struct Refiner {
  const Mesh& parent;
  Mesh out;
  std::map<std::pair<int, int>, int> midpoint_of;

  explicit Refiner(const Mesh& m) : parent(m) { out.vertices = m.vertices; }

  int midpoint(int a, int b) {
    if (a > b) std::swap(a, b);
    auto it = midpoint_of.find({a, b});
    if (it != midpoint_of.end()) return it->second;
    const int id = out.num_vertices();
    out.vertices.emplace_back(0.5 * (parent.vertices[a] + parent.vertices[b]));
    midpoint_of.emplace(std::make_pair(a, b), id);
    return id;
  }

  int interior(const Vec2& p) {
    out.vertices.emplace_back(p);
    return out.num_vertices() - 1;
  }
};

}  // namespace

Mesh powell_sabin_refine(const Mesh& mesh) {
  Refiner r(mesh);
  for (const auto& t : mesh.triangles) {
    const Vec2 &a = mesh.vertices[t.v[0]], &b = mesh.vertices[t.v[1]], &c = mesh.vertices[t.v[2]];
    const int ic = r.interior(triangle_incenter(a, b, c));
    for (int k = 0; k < 3; ++k) {
      const int va = t.v[k], vb = t.v[(k + 1) % 3];
      const int m = r.midpoint(va, vb);
      r.out.triangles.push_back({{va, m, ic}, t.subdomain});
      r.out.triangles.push_back({{m, vb, ic}, t.subdomain});
    }
  }
  return classify_edges(std::move(r.out));
}

Mesh hct_refine(const Mesh& mesh) {
  Refiner r(mesh);
  for (const auto& t : mesh.triangles) {
    const Vec2 &a = mesh.vertices[t.v[0]], &b = mesh.vertices[t.v[1]], &c = mesh.vertices[t.v[2]];
    const int g = r.interior((a + b + c) / 3.0);
    for (int k = 0; k < 3; ++k) {
      r.out.triangles.push_back({{t.v[k], t.v[(k + 1) % 3], g}, t.subdomain});
    }
  }
  return classify_edges(std::move(r.out));
}

namespace {

// Strips comments and returns the next non-empty line.
bool next_data_line(std::istream& in, std::string& line, int& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r\n") != std::string::npos) return true;
  }
  return false;
}

[[noreturn]] void parse_fail(const std::string& path, int line_no, const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + what);
}

}  // namespace

Mesh read_mesh(const std::string& path, bool strict) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mesh file: " + path);
  std::string line;
  int line_no = 0;

  if (!next_data_line(in, line, line_no)) parse_fail(path, line_no, "missing header line");
  long nv = -1, nt = -1;
  {
    std::istringstream ss(line);
    if (!(ss >> nv >> nt) || nv < 0 || nt < 0)
      parse_fail(path, line_no, "expected header 'nv nt'");
  }

  Mesh mesh;
  mesh.vertices.reserve(nv);
  for (long i = 0; i < nv; ++i) {
    if (!next_data_line(in, line, line_no))
      parse_fail(path, line_no, "unexpected end of file in vertex list");
    std::istringstream ss(line);
    double x, y;
    if (!(ss >> x >> y)) parse_fail(path, line_no, "expected vertex line 'x y'");
    mesh.vertices.emplace_back(x, y);
  }
  mesh.triangles.reserve(nt);
  for (long i = 0; i < nt; ++i) {
    if (!next_data_line(in, line, line_no))
      parse_fail(path, line_no, "unexpected end of file in triangle list");
    std::istringstream ss(line);
    long v0, v1, v2, sub;
    if (!(ss >> v0 >> v1 >> v2 >> sub))
      parse_fail(path, line_no, "expected triangle line 'v0 v1 v2 sub'");
    for (long v : {v0, v1, v2}) {
      if (v < 0 || v >= nv)
        parse_fail(path, line_no, "vertex index " + std::to_string(v) + " out of range");
    }
    if (sub < 1) parse_fail(path, line_no, "subdomain ids are 1-based");
    mesh.triangles.push_back(
        {{static_cast<int>(v0), static_cast<int>(v1), static_cast<int>(v2)},
         static_cast<int>(sub)});
  }

  int reoriented = 0;
  require_ccw(mesh, strict, &reoriented);
  if (reoriented > 0) {
    std::fprintf(stderr, "read_mesh: reoriented %d clockwise triangle(s) in %s\n", reoriented,
                 path.c_str());
  }
  return classify_edges(std::move(mesh));
}

void write_mesh(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open mesh file for writing: " + path);
  out << mesh.num_vertices() << ' ' << mesh.num_triangles() << '\n';
  char buf[128];
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v.x(), v.y());
    out << buf;
  }
  for (const auto& t : mesh.triangles) {
    out << t.v[0] << ' ' << t.v[1] << ' ' << t.v[2] << ' ' << t.subdomain << '\n';
  }
  if (!out) throw std::runtime_error("failed writing mesh file: " + path);
}

}  // namespace maxip
