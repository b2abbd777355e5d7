#pragma once

#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "confdim/geometry.hpp"

namespace confdim {

// Bucketed center index for candidate pruning. Candidates are a superset;
// callers must re-test exactly.
class CenterGrid {
 public:
  CenterGrid() = default;

  void build(const std::vector<Ball>& balls, double bucket_side) {
    side_ = bucket_side > 0 ? bucket_side : 1.0;
    dim_ = balls.empty() ? 2 : int(balls[0].center.dim());
    pts_.assign(balls.size() * 3, 0.0);
    buckets_.clear();
    for (std::size_t i = 0; i < balls.size(); ++i) {
      for (int d = 0; d < dim_; ++d) pts_[i * 3 + d] = to_double(balls[i].center.coords[d]);
      buckets_[key_of(&pts_[i * 3])].push_back(int(i));
    }
  }

  // visits ball indices whose bucket is within `range` (L-inf) of x
  template <typename F>
  void for_near(const double* x, double range, F&& fn) const {
    int lo[3], hi[3];
    for (int d = 0; d < dim_; ++d) {
      lo[d] = int(std::floor((x[d] - range) / side_));
      hi[d] = int(std::floor((x[d] + range) / side_));
    }
    int zlo = dim_ == 3 ? lo[2] : 0, zhi = dim_ == 3 ? hi[2] : 0;
    for (int ix = lo[0]; ix <= hi[0]; ++ix)
      for (int iy = lo[1]; iy <= hi[1]; ++iy)
        for (int iz = zlo; iz <= zhi; ++iz) {
          auto it = buckets_.find(pack(ix, iy, iz));
          if (it == buckets_.end()) continue;
          for (int i : it->second) fn(i);
        }
  }

  template <typename F>
  void for_near_point(const Point& p, double range, F&& fn) const {
    double x[3] = {0, 0, 0};
    for (int d = 0; d < dim_ && d < int(p.dim()); ++d) x[d] = to_double(p.coords[d]);
    for_near(x, range, std::forward<F>(fn));
  }

  const double* coords_of(std::size_t i) const { return &pts_[i * 3]; }

 private:
  std::int64_t key_of(const double* x) const {
    int ix = int(std::floor(x[0] / side_));
    int iy = int(std::floor(x[1] / side_));
    int iz = dim_ == 3 ? int(std::floor(x[2] / side_)) : 0;
    return pack(ix, iy, iz);
  }
  static std::int64_t pack(int a, int b, int c) {
    auto u = [](int v) { return std::uint64_t(std::uint32_t(v + (1 << 20))); };
    return std::int64_t((u(a) << 42) ^ (u(b) << 21) ^ u(c));
  }

  double side_ = 1.0;
  int dim_ = 2;
  std::vector<double> pts_;
  std::unordered_map<std::int64_t, std::vector<int>> buckets_;
};

}  // namespace confdim
