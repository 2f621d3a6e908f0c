#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "autorig/embed.hpp"
#include "autorig/meshio.hpp"
#include "autorig/voxelgrid.hpp"

namespace autorig::fixtures {

TriangleMesh tetrahedron();
/// Axis-aligned cube, 8 vertices / 12 triangles.
TriangleMesh cube(const Vec3& lo, double size);
TriangleMesh icosphere(int subdivisions, double radius = 1.0);
/// Closed tube along x with `rings` vertex rings spaced evenly over
/// [x0, x1] plus one cap vertex per end. Mirror symmetric about the midpoint
/// when x0 = -x1.
TriangleMesh tube(double x0, double x1, double radius, int rings, int sides);

struct Capsule {
  Vec3 a;
  Vec3 b;
  double radius;
};

double capsule_sdf(const std::vector<Capsule>& parts, const Vec3& p);

/// Iso-surface (f < 0 inside) of a scalar field by marching tetrahedra over a
/// Kuhn-subdivided node grid. The result is closed when f > 0 on the box boundary.
TriangleMesh marching_tetrahedra(const std::function<double(const Vec3&)>& f, const Vec3& lo, const Vec3& hi,
                                 double spacing);

TriangleMesh capsule_mesh(const std::vector<Capsule>& parts, double spacing);

std::vector<Capsule> star_parts();
std::vector<Capsule> humanoid_parts();
std::vector<Capsule> quadruped_parts();

TriangleMesh star_mesh();
TriangleMesh humanoid_mesh();
TriangleMesh quadruped_mesh();

/// Solid grid painted directly (padding shell left empty).
VoxelGrid box_grid(std::array<int, 3> dims, const std::vector<Voxel>& solid);

/// Random union of balls on a small grid, padding shell empty.
VoxelGrid random_blob_grid(std::mt19937_64& rng, std::array<int, 3> dims, int balls, double rmin, double rmax);

/// Sphere-center graph shaped like a T-posed humanoid (<= 20 vertices).
EmbedGraph humanoid_graph();
/// humanoid_graph() with jittered positions and a few extra or missing edges.
EmbedGraph perturbed_humanoid_graph(std::mt19937_64& rng, int extra_vertices);

}  // namespace autorig::fixtures
