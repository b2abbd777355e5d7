#pragma once

#include "confdim/geometry.hpp"

namespace confdim {

// Upper estimate of the Hausdorff s-content at scale delta, together with the
// cover achieving it.
struct ContentEstimate {
  double value = 0;      // sum of diam(ball)^s over the cover
  double exponent = 0;   // s
  double scale = 0;      // delta
  std::vector<Ball> cover;

  void check() const;  // re-derives value from the stored cover
};

// Covers the curves by enclosing balls of dyadic-cell pieces, refining cells
// until every piece's enclosing ball has diameter <= delta. The returned value
// upper-bounds the true content by definition.
ContentEstimate hausdorff_content_upper(const std::vector<PolyCurve>& curves, double s,
                                        double delta, const MetricSpec& m);

}  // namespace confdim
