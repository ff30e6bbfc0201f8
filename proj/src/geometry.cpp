#include "eshelby/geometry.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace eshelby {

Material Material::make(double K, double Cp) {
  Material m{K, Cp, K / Cp};
  m.validate();
  return m;
}

void Material::validate() const {
  if (!(K > 0) || !(Cp > 0)) throw PreconditionError("Material: K and Cp must be positive");
  if (std::abs(alpha * Cp - K) > 1e-12 * K) throw PreconditionError("Material: alpha != K/Cp");
}

namespace {

Vec3 newell_normal(const std::vector<Vec3>& v, const std::vector<int>& loop) {
  Vec3 n = Vec3::Zero();
  for (size_t i = 0; i < loop.size(); ++i) {
    const Vec3& p = v[loop[i]];
    const Vec3& q = v[loop[(i + 1) % loop.size()]];
    n += p.cross(q);
  }
  return n;  // 2 * area * unit normal
}

}  // namespace

Polyhedron::Polyhedron(std::vector<Vec3> vertices, std::vector<std::vector<int>> faces)
    : v_(std::move(vertices)), f_(std::move(faces)) {
  if (f_.empty()) {
    volume_ = 0;
    return;
  }
  for (const auto& loop : f_) {
    if (loop.size() < 3) throw GeometryError("face with fewer than 3 vertices");
    for (int i : loop)
      if (i < 0 || static_cast<size_t>(i) >= v_.size()) throw GeometryError("vertex index out of range");
  }

  // watertight: each directed edge once, and its reverse once
  std::map<std::pair<int, int>, int> directed;
  for (const auto& loop : f_)
    for (size_t i = 0; i < loop.size(); ++i) ++directed[{loop[i], loop[(i + 1) % loop.size()]}];
  std::ostringstream bad;
  int nbad = 0;
  for (const auto& [e, cnt] : directed) {
    auto it = directed.find({e.second, e.first});
    int rev = it == directed.end() ? 0 : it->second;
    if (cnt != 1 || rev != 1) {
      if (nbad < 20) bad << " (" << e.first << "," << e.second << ")";
      ++nbad;
    }
  }
  if (nbad) throw MeshTopologyError("mesh not watertight; offending edges:" + bad.str());

  double vol6 = 0;
  for (const auto& loop : f_) {
    Vec3 nn = newell_normal(v_, loop);
    vol6 += v_[loop[0]].dot(nn);
  }
  if (vol6 < 0) {
    for (auto& loop : f_) std::reverse(loop.begin(), loop.end());
    vol6 = -vol6;
  }
  volume_ = vol6 / 6.0;
  if (!(volume_ > 0)) throw GeometryError("polyhedron has non-positive volume");

  double tol = 1e-9 * bbox_diagonal();
  n_.reserve(f_.size());
  for (const auto& loop : f_) {
    Vec3 nn = newell_normal(v_, loop);
    double len = nn.norm();
    if (!(len > 0)) throw GeometryError("degenerate face");
    nn /= len;
    double d0 = nn.dot(v_[loop[0]]);
    for (int i : loop)
      if (std::abs(nn.dot(v_[i]) - d0) > tol) throw GeometryError("non-planar face");
    n_.push_back(nn);
  }
}

size_t Polyhedron::num_edges() const {
  size_t n = 0;
  for (const auto& f : f_) n += f.size();
  return n;
}

double Polyhedron::face_area(size_t face) const { return 0.5 * newell_normal(v_, f_[face]).norm(); }

double Polyhedron::bbox_diagonal() const {
  if (v_.empty()) return 0;
  Vec3 lo = v_[0], hi = v_[0];
  for (const auto& p : v_) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return (hi - lo).norm();
}

double Polyhedron::circumradius(const Vec3& c) const {
  double r = 0;
  for (const auto& p : v_) r = std::max(r, (p - c).norm());
  return r;
}

Polyhedron Polyhedron::triangulated() const {
  std::vector<std::vector<int>> tris;
  for (const auto& loop : f_)
    for (size_t i = 1; i + 1 < loop.size(); ++i) tris.push_back({loop[0], loop[i], loop[i + 1]});
  return Polyhedron(v_, tris);
}

Polyhedron load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open mesh file " + path);
  std::string line;
  auto next = [&](std::istringstream& ss) {
    while (std::getline(in, line)) {
      auto h = line.find('#');
      if (h != std::string::npos) line.erase(h);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      ss = std::istringstream(line);
      return true;
    }
    return false;
  };
  std::istringstream ss;
  if (!next(ss)) throw ConfigError("empty mesh file");
  std::string tag;
  ss >> tag;
  if (tag != "OFF") throw ConfigError("mesh file must start with OFF");
  if (!next(ss)) throw ConfigError("missing counts line");
  size_t nv = 0, nf = 0;
  ss >> nv >> nf;
  std::vector<Vec3> v(nv);
  for (size_t i = 0; i < nv; ++i) {
    if (!next(ss)) throw ConfigError("truncated vertex list");
    ss >> v[i].x() >> v[i].y() >> v[i].z();
    if (!ss) throw ConfigError("bad vertex line");
  }
  std::vector<std::vector<int>> f(nf);
  for (size_t i = 0; i < nf; ++i) {
    if (!next(ss)) throw ConfigError("truncated face list");
    size_t k = 0;
    ss >> k;
    f[i].resize(k);
    for (auto& idx : f[i]) ss >> idx;
    if (!ss) throw ConfigError("bad face line");
  }
  return Polyhedron(std::move(v), std::move(f));
}

void save_mesh(const Polyhedron& p, const std::string& path) {
  std::ofstream out(path);
  out << "OFF\n" << p.vertices().size() << " " << p.faces().size() << " 0\n";
  out << std::setprecision(17);
  for (const auto& v : p.vertices()) out << v.x() << " " << v.y() << " " << v.z() << "\n";
  for (const auto& f : p.faces()) {
    out << f.size();
    for (int i : f) out << " " << i;
    out << "\n";
  }
}

// Latitude-longitude sphere: pole caps are triangles, every other face is an
// isosceles trapezoid and therefore exactly planar.
Polyhedron tessellate_sphere(double radius, int refinement) {
  if (!(radius > 0)) throw PreconditionError("tessellate_sphere: radius must be positive");
  if (refinement < 0 || refinement > 8) throw PreconditionError("tessellate_sphere: refinement out of range");
  int nlat = 6 << refinement, nlon = 12 << refinement;
  std::vector<Vec3> v;
  v.push_back({0, 0, radius});
  for (int i = 1; i < nlat; ++i) {
    double th = M_PI * i / nlat;
    for (int j = 0; j < nlon; ++j) {
      double ph = 2 * M_PI * j / nlon;
      v.push_back({radius * std::sin(th) * std::cos(ph), radius * std::sin(th) * std::sin(ph),
                   radius * std::cos(th)});
    }
  }
  v.push_back({0, 0, -radius});
  int south = static_cast<int>(v.size()) - 1;
  auto ring = [&](int i, int j) { return 1 + (i - 1) * nlon + ((j % nlon) + nlon) % nlon; };
  std::vector<std::vector<int>> f;
  for (int j = 0; j < nlon; ++j) f.push_back({0, ring(1, j), ring(1, j + 1)});
  for (int i = 1; i + 1 < nlat; ++i)
    for (int j = 0; j < nlon; ++j) f.push_back({ring(i, j), ring(i + 1, j), ring(i + 1, j + 1), ring(i, j + 1)});
  for (int j = 0; j < nlon; ++j) f.push_back({south, ring(nlat - 1, j + 1), ring(nlat - 1, j)});
  return Polyhedron(std::move(v), std::move(f));
}

Polyhedron make_cuboid(double lx, double ly, double lz, const Vec3& c) {
  if (!(lx > 0 && ly > 0 && lz > 0)) throw PreconditionError("make_cuboid: edge lengths must be positive");
  double hx = lx / 2, hy = ly / 2, hz = lz / 2;
  std::vector<Vec3> v;
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 2; ++i) v.push_back(c + Vec3(i ? hx : -hx, j ? hy : -hy, k ? hz : -hz));
  // vertex id = i + 2j + 4k
  std::vector<std::vector<int>> f = {
      {0, 2, 3, 1},  // z-
      {4, 5, 7, 6},  // z+
      {0, 1, 5, 4},  // y-
      {2, 6, 7, 3},  // y+
      {0, 4, 6, 2},  // x-
      {1, 3, 7, 5},  // x+
  };
  return Polyhedron(std::move(v), std::move(f));
}

TransformedCoords transformed_coords(const Polyhedron& poly, size_t face, size_t edge, const Vec3& x) {
  const auto& loop = poly.faces().at(face);
  if (edge >= loop.size()) throw PreconditionError("transformed_coords: edge index out of range");
  const Vec3& vm = poly.vertices()[loop[edge]];
  const Vec3& vp = poly.vertices()[loop[(edge + 1) % loop.size()]];
  TransformedCoords t;
  t.xi = poly.normal(face);
  t.eta = (vp - vm).normalized();
  t.lambda = t.eta.cross(t.xi);
  Vec3 dp = x - vp;
  t.a = dp.dot(t.xi);
  t.b = dp.dot(t.lambda);
  t.l_plus = dp.dot(t.eta);
  t.l_minus = (x - vm).dot(t.eta);
  return t;
}

Vec3 prepare_point(const Polyhedron& poly, const Vec3& x0, Flags* flags) {
  Vec3 x = x0;
  const double eps = 1e-9;
  for (int pass = 0; pass < 4; ++pass) {
    bool moved = false;
    for (size_t f = 0; f < poly.num_faces() && !moved; ++f) {
      const auto& loop = poly.faces()[f];
      for (size_t e = 0; e < loop.size(); ++e) {
        auto t = transformed_coords(poly, f, e, x);
        if (std::hypot(t.a, t.b) < eps) {
          x += eps * t.lambda;
          if (flags) flags->nudged = true;
          moved = true;
          break;
        }
      }
    }
    if (!moved) break;
  }
  if (flags) {
    for (size_t f = 0; f < poly.num_faces(); ++f) {
      const auto& loop = poly.faces()[f];
      bool inside = true;
      double a = 0;
      for (size_t e = 0; e < loop.size(); ++e) {
        auto t = transformed_coords(poly, f, e, x);
        a = t.a;
        if (t.b > 0) inside = false;
      }
      if (inside && std::abs(a) < eps) flags->near_interface = true;
    }
  }
  return x;
}

}  // namespace eshelby
