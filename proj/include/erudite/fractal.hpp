#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "erudite/errors.hpp"
#include "erudite/signal.hpp"

namespace erudite::dsp {

inline std::vector<double> default_box_scales() {
  // Dyadic box sizes 2^-2 .. 2^-8 of the unit square.
  std::vector<double> s;
  for (int e = 2; e <= 8; ++e) s.push_back(std::ldexp(1.0, -e));
  return s;
}

namespace detail {

// Count boxes of size eps touched by the graph of the normalised series
// (t, y) in [0,1]^2. Per time column we cover the y-range spanned by the
// samples in the column plus the interpolated values where the polyline
// crosses column boundaries.
inline std::size_t count_boxes(const std::vector<double>& t,
                               const std::vector<double>& y,
                               double eps) {
  const std::size_t ncols = static_cast<std::size_t>(std::ceil(1.0 / eps));
  const auto col_of = [&](double tv) {
    auto c = static_cast<std::size_t>(tv / eps);
    return std::min(c, ncols - 1);
  };
  const auto row_of = [&](double yv) {
    auto r = static_cast<std::size_t>(yv / eps);
    return std::min(r, ncols - 1);
  };

  std::vector<double> lo(ncols, 2.0), hi(ncols, -1.0);
  const auto cover = [&](std::size_t col, double yv) {
    lo[col] = std::min(lo[col], yv);
    hi[col] = std::max(hi[col], yv);
  };

  for (std::size_t i = 0; i < t.size(); ++i) cover(col_of(t[i]), y[i]);
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const std::size_t c0 = col_of(t[i]);
    const std::size_t c1 = col_of(t[i + 1]);
    if (c0 == c1) continue;
    // Interpolate at every boundary the segment crosses; the boundary value
    // belongs to the columns on both sides.
    for (std::size_t c = c0; c < c1; ++c) {
      const double tb = static_cast<double>(c + 1) * eps;
      const double frac = (tb - t[i]) / (t[i + 1] - t[i]);
      const double yb = y[i] + frac * (y[i + 1] - y[i]);
      cover(c, yb);
      cover(std::min(c + 1, ncols - 1), yb);
    }
  }

  std::size_t boxes = 0;
  for (std::size_t c = 0; c < ncols; ++c) {
    if (hi[c] < lo[c]) continue;  // column never visited
    boxes += row_of(hi[c]) - row_of(lo[c]) + 1;
  }
  return boxes;
}

}  // namespace detail

// Box counts N(eps) over the normalised graph, one entry per scale.
inline std::vector<std::size_t> box_counts(const SampleBuffer& buf,
                                           const std::vector<double>& scales) {
  const std::size_t n = buf.samples.size();
  std::vector<double> t(n), y(n);
  double ymin = buf.samples[0], ymax = buf.samples[0];
  for (double v : buf.samples) {
    ymin = std::min(ymin, v);
    ymax = std::max(ymax, v);
  }
  const double range = ymax - ymin;
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = static_cast<double>(i) / static_cast<double>(n - 1);
    y[i] = (buf.samples[i] - ymin) / range;
  }
  std::vector<std::size_t> counts;
  counts.reserve(scales.size());
  for (double eps : scales) counts.push_back(detail::count_boxes(t, y, eps));
  return counts;
}

// Box-counting fractal dimension of the series graph.
//
// The series is rescaled to the unit square, boxes of each scale are counted,
// and the least-squares slope of log N(eps) against log(1/eps) is returned,
// clamped to [1, 2]. A constant series has dimension 1 by definition here.
inline double box_counting_fd(const SampleBuffer& buf,
                              const std::vector<double>& scales = default_box_scales()) {
  validate(buf, "box_counting_fd");
  if (buf.samples.size() < 64) {
    throw insufficient_data_error("box_counting_fd: need at least 64 samples");
  }
  if (scales.size() < 2) throw parameter_error("box_counting_fd: need at least 2 scales");
  double smin = scales[0], smax = scales[0];
  for (double s : scales) {
    if (!(s > 0.0) || !(s <= 1.0)) throw parameter_error("box_counting_fd: scales must be in (0, 1]");
    smin = std::min(smin, s);
    smax = std::max(smax, s);
  }
  if (smax / smin < 10.0) {
    throw parameter_error("box_counting_fd: scales must span at least one decade");
  }

  double ymin = buf.samples[0], ymax = buf.samples[0];
  for (double v : buf.samples) {
    ymin = std::min(ymin, v);
    ymax = std::max(ymax, v);
  }
  if (!(ymax > ymin)) return 1.0;

  const auto counts = box_counts(buf, scales);

  // Least-squares slope of log N vs log(1/eps).
  const std::size_t m = scales.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = std::log(1.0 / scales[i]);
    const double yv = std::log(static_cast<double>(counts[i]));
    sx += x;
    sy += yv;
    sxx += x * x;
    sxy += x * yv;
  }
  const double denom = static_cast<double>(m) * sxx - sx * sx;
  if (!(std::fabs(denom) > 0.0)) throw parameter_error("box_counting_fd: degenerate scale set");
  const double slope = (static_cast<double>(m) * sxy - sx * sy) / denom;
  return std::clamp(slope, 1.0, 2.0);
}

}  // namespace erudite::dsp
