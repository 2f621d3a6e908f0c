#include "autorig/distfield.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace autorig {
namespace {

constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

std::int64_t floor_div(std::int64_t num, std::int64_t den) {
  std::int64_t q = num / den;
  if ((num % den != 0) && ((num < 0) != (den < 0))) --q;
  return q;
}

// 1D squared-distance transform of f in place (Meijster et al. style lower
// envelope). Sites with f == kInf are skipped.
void transform_line(std::vector<std::int64_t>& f, std::vector<std::int64_t>& out,
                    std::vector<int>& site, std::vector<std::int64_t>& start) {
  const int n = static_cast<int>(f.size());
  int q = -1;
  auto value = [&](std::int64_t x, int s) { return (x - s) * (x - s) + f[s]; };
  for (int u = 0; u < n; ++u) {
    if (f[u] >= kInf) continue;
    while (q >= 0 && value(start[q], site[q]) > value(start[q], u)) --q;
    if (q < 0) {
      q = 0;
      site[0] = u;
      start[0] = 0;
    } else {
      const int s = site[q];
      // First x where parabola u is strictly below parabola s.
      const std::int64_t sep =
          floor_div(static_cast<std::int64_t>(u) * u - static_cast<std::int64_t>(s) * s + f[u] - f[s],
                    2 * static_cast<std::int64_t>(u - s));
      const std::int64_t w = 1 + sep;
      if (w < n) {
        ++q;
        site[q] = u;
        start[q] = std::max<std::int64_t>(w, 0);
      }
    }
  }
  if (q < 0) {
    std::fill(out.begin(), out.end(), kInf);
    return;
  }
  for (int u = n - 1; u >= 0; --u) {
    out[u] = value(u, site[q]);
    if (u == start[q]) --q;
  }
}

}  // namespace

DistanceField::DistanceField(VoxelGrid grid, std::vector<std::int64_t> squared)
    : grid_(std::move(grid)), squared_(std::move(squared)) {
  dist_.resize(squared_.size());
  for (std::size_t i = 0; i < squared_.size(); ++i) {
    dist_[i] = std::sqrt(static_cast<double>(squared_[i]));
    max_dist_ = std::max(max_dist_, dist_[i]);
  }
}

DistanceField compute_edm(const VoxelGrid& grid) {
  if (grid.solid_count() == 0) throw Error(ErrorCode::kEmptyGrid, "grid has no solid voxels");
  const auto& dims = grid.dims();
  std::vector<std::int64_t> sq(grid.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = grid.occupancy()[i] ? kInf : 0;

  const int longest = *std::max_element(dims.begin(), dims.end());
  std::vector<std::int64_t> line(longest), out(longest), start(longest);
  std::vector<int> site(longest);
  for (int axis = 0; axis < 3; ++axis) {
    const int b = (axis + 1) % 3;
    const int c = (axis + 2) % 3;
    const int n = dims[axis];
    line.resize(n);
    out.resize(n);
    for (int k = 0; k < dims[c]; ++k) {
      for (int j = 0; j < dims[b]; ++j) {
        Voxel v{};
        v[b] = j;
        v[c] = k;
        for (int i = 0; i < n; ++i) {
          v[axis] = i;
          line[i] = sq[grid.index(v)];
        }
        transform_line(line, out, site, start);
        for (int i = 0; i < n; ++i) {
          v[axis] = i;
          sq[grid.index(v)] = out[i];
        }
      }
    }
  }
  for (auto& s : sq) {
    if (s >= kInf) throw Error(ErrorCode::kEmptyGrid, "grid has no empty voxels to measure against");
  }
  return DistanceField(grid, std::move(sq));
}

double query_distance(const DistanceField& field, const Vec3& p) {
  const auto& spec = field.grid().spec();
  const Vec3 u = (p - spec.origin) / spec.cell_size;
  for (int a = 0; a < 3; ++a) {
    if (!(u[a] >= 0.0 && u[a] <= spec.dims[a])) {
      throw Error(ErrorCode::kOutOfRange, "distance query outside grid bounds");
    }
  }
  int base[3];
  double frac[3];
  for (int a = 0; a < 3; ++a) {
    const double x = u[a] - 0.5;
    int i0 = static_cast<int>(std::floor(x));
    i0 = std::clamp(i0, 0, std::max(0, spec.dims[a] - 2));
    base[a] = i0;
    frac[a] = std::clamp(x - i0, 0.0, 1.0);
  }
  double acc = 0.0;
  for (int corner = 0; corner < 8; ++corner) {
    double w = 1.0;
    int idx[3];
    for (int a = 0; a < 3; ++a) {
      const int bit = (corner >> a) & 1;
      w *= bit ? frac[a] : 1.0 - frac[a];
      idx[a] = base[a] + bit;
    }
    if (w == 0.0) continue;
    acc += w * field.dist(idx[0], idx[1], idx[2]);
  }
  return acc * spec.cell_size;
}

void write_distance_dump(const DistanceField& field, std::ostream& out) {
  char buf[64];
  const auto& grid = field.grid();
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (!grid.occupancy()[idx]) continue;
    const Voxel v = grid.voxel(idx);
    std::snprintf(buf, sizeof(buf), "%.17g", field.dist(idx));
    out << v[0] << ' ' << v[1] << ' ' << v[2] << ' ' << buf << '\n';
  }
}

}  // namespace autorig
