#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "eshelby/errors.hpp"

namespace eshelby {

using Vec3 = Eigen::Vector3d;

struct Material {
  double K = 1;      // conductivity, W/(m K)
  double Cp = 1;     // volumetric heat capacity, J/(m^3 K)
  double alpha = 1;  // diffusivity, m^2/s

  static Material make(double K, double Cp);
  void validate() const;
};

// Closed, outward-oriented polyhedral surface. Faces are kept as polygons.
class Polyhedron {
 public:
  Polyhedron() = default;
  // validates and re-orients outward when the signed volume is negative
  Polyhedron(std::vector<Vec3> vertices, std::vector<std::vector<int>> faces);

  const std::vector<Vec3>& vertices() const { return v_; }
  const std::vector<std::vector<int>>& faces() const { return f_; }
  const Vec3& normal(size_t face) const { return n_[face]; }
  size_t num_faces() const { return f_.size(); }
  size_t num_edges() const;  // total number of (face, edge) pairs

  double volume() const { return volume_; }
  double face_area(size_t face) const;
  double bbox_diagonal() const;
  double circumradius(const Vec3& c = Vec3::Zero()) const;

  // split every polygon into a triangle fan; tensor values must not change
  Polyhedron triangulated() const;

 private:
  std::vector<Vec3> v_;
  std::vector<std::vector<int>> f_;
  std::vector<Vec3> n_;
  double volume_ = 0;
};

struct TransformedCoords {
  double a = 0;        // signed distance to the face plane, + on the outward side
  double b = 0;        // signed in-plane distance to the edge line, + outside the edge
  double l_plus = 0;   // (x - v+) . eta
  double l_minus = 0;  // (x - v-) . eta
  Vec3 xi, lambda, eta;
};

Polyhedron load_mesh(const std::string& path);
void save_mesh(const Polyhedron& p, const std::string& path);
Polyhedron tessellate_sphere(double radius, int refinement);
Polyhedron make_cuboid(double lx, double ly, double lz, const Vec3& center = Vec3::Zero());
TransformedCoords transformed_coords(const Polyhedron& poly, size_t face, size_t edge, const Vec3& x);

// Moves x by 1e-9 m along the outward in-plane normal of any edge line it lies
// on (within 1e-9 m); flags.nudged is set when that happens. Also reports
// points within 1e-9 m of a face plane inside the face.
Vec3 prepare_point(const Polyhedron& poly, const Vec3& x, Flags* flags);

}  // namespace eshelby
