#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "tourmon/error.hpp"
#include "tourmon/record.hpp"

namespace tourmon {

struct GeoPoint {
  double lon = 0.0;
  double lat = 0.0;
};

// One polygon = outer ring plus holes; even-odd testing treats them
// uniformly. A territory may span several polygons (islands, exclaves).
using Ring = std::vector<GeoPoint>;
using Polygon = std::vector<Ring>;

struct Territory {
  std::string territory_id;
  std::string name;
  std::string country;      // ISO-3166 alpha-2
  std::string level_label;  // e.g. region, governorate
  double area_km2 = 0.0;
  std::vector<Polygon> polygons;
  // bounding box over all rings, for the prefilter
  double min_lon = 0, min_lat = 0, max_lon = 0, max_lat = 0;

  void compute_bbox() {
    bool first = true;
    for (const auto& poly : polygons)
      for (const auto& ring : poly)
        for (const auto& p : ring) {
          if (first) {
            min_lon = max_lon = p.lon;
            min_lat = max_lat = p.lat;
            first = false;
          } else {
            min_lon = std::min(min_lon, p.lon);
            max_lon = std::max(max_lon, p.lon);
            min_lat = std::min(min_lat, p.lat);
            max_lat = std::max(max_lat, p.lat);
          }
        }
  }

  bool bbox_contains(double lon, double lat) const {
    return lon >= min_lon && lon <= max_lon && lat >= min_lat &&
           lat <= max_lat;
  }
};

namespace geo_detail {

inline bool on_segment(const GeoPoint& a, const GeoPoint& b, double lon,
                       double lat) {
  double cross = (b.lon - a.lon) * (lat - a.lat) - (b.lat - a.lat) * (lon - a.lon);
  if (cross != 0.0) return false;
  return lon >= std::min(a.lon, b.lon) && lon <= std::max(a.lon, b.lon) &&
         lat >= std::min(a.lat, b.lat) && lat <= std::max(a.lat, b.lat);
}

}  // namespace geo_detail

// Even-odd ray casting across all rings; a point exactly on any boundary
// segment counts as inside.
inline bool point_in_polygon(const Polygon& poly, double lon, double lat) {
  for (const auto& ring : poly)
    for (std::size_t i = 0, n = ring.size(); i < n; ++i)
      if (geo_detail::on_segment(ring[i], ring[(i + 1) % n], lon, lat))
        return true;
  bool inside = false;
  for (const auto& ring : poly) {
    for (std::size_t i = 0, n = ring.size(); i < n; ++i) {
      const GeoPoint& a = ring[i];
      const GeoPoint& b = ring[(i + 1) % n];
      if ((a.lat > lat) != (b.lat > lat)) {
        double x = a.lon + (b.lon - a.lon) * (lat - a.lat) / (b.lat - a.lat);
        if (lon < x) inside = !inside;
      }
    }
  }
  return inside;
}

inline bool territory_contains(const Territory& t, double lon, double lat) {
  if (!t.bbox_contains(lon, lat)) return false;
  for (const auto& poly : t.polygons)
    if (point_in_polygon(poly, lon, lat)) return true;
  return false;
}

// Accommodations per 100 km^2.
inline double density_per_100km2(long count, double area_km2) {
  if (!(area_km2 > 0.0))
    throw GeometryError("density needs a positive area, got " +
                        std::to_string(area_km2));
  return 100.0 * static_cast<double>(count) / area_km2;
}

struct AssignResult {
  std::optional<std::string> territory_id;
  std::vector<std::string> candidates;  // all containing territories, sorted
};

class TerritoryIndex {
 public:
  void add(Territory t) {
    if (t.territory_id.empty())
      throw ConfigError("territory with empty territory_id");
    if (!(t.area_km2 > 0.0))
      throw ConfigError("territory " + t.territory_id +
                        " needs area_km2 > 0");
    if (ids_.count(t.territory_id))
      throw ConfigError("duplicate territory_id: " + t.territory_id);
    t.compute_bbox();
    ids_.insert(t.territory_id);
    territories_.push_back(std::move(t));
  }

  // Overlapping definitions resolve to the lexicographically smallest id;
  // every containing territory is still reported in candidates.
  AssignResult assign(double lat, double lon) const {
    AssignResult res;
    for (const auto& t : territories_)
      if (territory_contains(t, lon, lat))
        res.candidates.push_back(t.territory_id);
    std::sort(res.candidates.begin(), res.candidates.end());
    if (!res.candidates.empty()) res.territory_id = res.candidates.front();
    return res;
  }

  const Territory* find(const std::string& territory_id) const {
    for (const auto& t : territories_)
      if (t.territory_id == territory_id) return &t;
    return nullptr;
  }

  const std::vector<Territory>& territories() const { return territories_; }

 private:
  std::vector<Territory> territories_;
  std::set<std::string> ids_;
};

namespace geo_detail {

inline Ring parse_ring(const nlohmann::json& j) {
  Ring ring;
  for (const auto& pair : j) {
    if (!pair.is_array() || pair.size() < 2)
      throw ConfigError("GeoJSON ring position must be [lon, lat]");
    ring.push_back(GeoPoint{pair[0].get<double>(), pair[1].get<double>()});
  }
  // tolerate explicitly closed rings
  if (ring.size() > 1 && ring.front().lon == ring.back().lon &&
      ring.front().lat == ring.back().lat)
    ring.pop_back();
  if (ring.size() < 3) throw ConfigError("GeoJSON ring needs >= 3 points");
  return ring;
}

inline Polygon parse_polygon(const nlohmann::json& rings) {
  Polygon poly;
  for (const auto& r : rings) poly.push_back(parse_ring(r));
  if (poly.empty()) throw ConfigError("GeoJSON polygon without rings");
  return poly;
}

}  // namespace geo_detail

// Loads a GeoJSON FeatureCollection whose features carry territory_id,
// name, country, level_label and area_km2 properties and Polygon or
// MultiPolygon geometry.
inline TerritoryIndex load_territories(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open territories file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad GeoJSON " + path + ": " + e.what());
  }
  if (j.value("type", "") != "FeatureCollection")
    throw ConfigError(path + ": expected a FeatureCollection");

  TerritoryIndex index;
  for (const auto& feature : j.at("features")) {
    const auto& props = feature.at("properties");
    Territory t;
    try {
      t.territory_id = props.at("territory_id").get<std::string>();
      t.name = props.at("name").get<std::string>();
      t.country = props.at("country").get<std::string>();
      t.level_label = props.at("level_label").get<std::string>();
      t.area_km2 = props.at("area_km2").get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(path + ": feature properties incomplete: " + e.what());
    }
    const auto& geom = feature.at("geometry");
    std::string type = geom.value("type", "");
    if (type == "Polygon") {
      t.polygons.push_back(geo_detail::parse_polygon(geom.at("coordinates")));
    } else if (type == "MultiPolygon") {
      for (const auto& rings : geom.at("coordinates"))
        t.polygons.push_back(geo_detail::parse_polygon(rings));
    } else {
      throw ConfigError(path + ": geometry type '" + type +
                        "' not supported (Polygon/MultiPolygon only)");
    }
    index.add(std::move(t));
  }
  return index;
}

struct AssignStats {
  long located = 0;
  long unassigned = 0;
  long ambiguous = 0;  // located, but more than one candidate
};

// Stamps territory_id onto each record (or leaves it unset).
inline AssignStats assign_territories(std::vector<AccommodationRecord>& records,
                                      const TerritoryIndex& index) {
  AssignStats stats;
  for (auto& rec : records) {
    auto res = index.assign(rec.latitude, rec.longitude);
    if (res.territory_id) {
      rec.territory_id = res.territory_id;
      ++stats.located;
      if (res.candidates.size() > 1) ++stats.ambiguous;
    } else {
      rec.territory_id.reset();
      ++stats.unassigned;
    }
  }
  return stats;
}

}  // namespace tourmon
