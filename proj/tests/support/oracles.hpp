#pragma once

// Independent reference implementations used to check library output.
// Aggregate oracles work in exact rational arithmetic; the correlation
// oracle is a direct Pearson over the raw 0/1 columns; the containment
// oracle is the half-plane sign test for convex polygons.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "tourmon/tourmon.hpp"

namespace oracles {

using Rational = boost::multiprecision::cpp_rational;

// Exact: a double converts to its precise binary rational.
inline Rational rat(double v) { return Rational(v); }

inline bool close(double got, const Rational& want, double tol = 1e-9) {
  Rational diff = rat(got) - want;
  if (diff < 0) diff = -diff;
  return diff <= rat(tol);
}

// --- aggregate recounts ---------------------------------------------------------

inline std::map<std::string, Rational> concentration(
    const std::vector<tourmon::AccommodationRecord>& records,
    const std::string& country) {
  std::map<std::string, long> counts;
  long total = 0;
  for (const auto& r : records) {
    if (r.country != country || !r.territory_id) continue;
    ++counts[*r.territory_id];
    ++total;
  }
  std::map<std::string, Rational> shares;
  for (const auto& [tid, c] : counts) shares[tid] = Rational(c, total);
  return shares;
}

inline std::map<std::string, Rational> type_structure(
    const std::vector<tourmon::AccommodationRecord>& records) {
  std::map<std::string, long> counts;
  for (const auto& r : records)
    ++counts[std::string(tourmon::to_string(r.unit_type))];
  std::map<std::string, Rational> shares;
  long n = static_cast<long>(records.size());
  for (const auto& [label, c] : counts) shares[label] = Rational(c, n);
  return shares;
}

struct Classification {
  Rational unclassified_share;
  std::map<int, Rational> star_shares;
  long classified = 0;
  long unclassified = 0;
};

inline Classification classification(
    const std::vector<tourmon::AccommodationRecord>& records) {
  Classification out;
  std::map<int, long> stars;
  for (const auto& r : records) {
    if (r.star_class) {
      ++out.classified;
      ++stars[*r.star_class];
    } else {
      ++out.unclassified;
    }
  }
  long n = out.classified + out.unclassified;
  if (n == 0) return out;
  out.unclassified_share = Rational(out.unclassified, n);
  for (const auto& [s, c] : stars)
    out.star_shares[s] = Rational(c, out.classified);
  return out;
}

struct MeanRecount {
  std::optional<Rational> mean;
  long coverage = 0;
};

// Mirrors the metric access rules (tax excluded when flagged unknown) but
// sums exactly, in whatever order, since rationals commute.
inline MeanRecount mean(const std::vector<tourmon::AccommodationRecord>& records,
                        const std::string& metric) {
  MeanRecount out;
  Rational sum = 0;
  for (const auto& r : records) {
    std::optional<double> v;
    if (metric == "price_eur") {
      v = r.price_eur;
    } else if (metric == "tax_eur") {
      if (!r.tax_unknown) v = r.tax_eur;
    } else if (metric == "rating_overall") {
      v = r.rating_overall;
    } else if (metric.rfind("rating_themes.", 0) == 0) {
      auto it = r.rating_themes.find(metric.substr(14));
      if (it != r.rating_themes.end()) v = it->second;
    }
    if (!v) continue;
    sum += rat(*v);
    ++out.coverage;
  }
  if (out.coverage > 0) out.mean = sum / out.coverage;
  return out;
}

// --- Pearson on binary columns ---------------------------------------------------

// Plain covariance-over-sd formula in long double; independent of the
// contingency-table expression used by the library.
inline std::optional<double> pearson_binary(const std::vector<int>& x,
                                            const std::vector<int>& y) {
  std::size_t n = x.size();
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) return std::nullopt;
  return static_cast<double>(sxy / (std::sqrt(sxx) * std::sqrt(syy)));
}

// --- convex polygon containment ---------------------------------------------------

struct XY {
  double x, y;
};

// Andrew monotone chain; returns the hull in counter-clockwise order.
inline std::vector<XY> convex_hull(std::vector<XY> pts) {
  std::sort(pts.begin(), pts.end(), [](const XY& a, const XY& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const XY& a, const XY& b) {
                          return a.x == b.x && a.y == b.y;
                        }),
            pts.end());
  auto cross = [](const XY& o, const XY& a, const XY& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
  };
  std::size_t n = pts.size();
  if (n < 3) return pts;
  std::vector<XY> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

// Half-plane sign test: inside (boundary included) iff the point sits on
// the left of, or on, every directed edge of the CCW hull. Exact when
// all coordinates are coarse dyadic values.
inline bool half_plane_inside(const std::vector<XY>& ccw_hull, double x,
                              double y) {
  std::size_t n = ccw_hull.size();
  for (std::size_t i = 0; i < n; ++i) {
    const XY& a = ccw_hull[i];
    const XY& b = ccw_hull[(i + 1) % n];
    double c = (b.x - a.x) * (y - a.y) - (b.y - a.y) * (x - a.x);
    if (c < 0.0) return false;
  }
  return true;
}

}  // namespace oracles
