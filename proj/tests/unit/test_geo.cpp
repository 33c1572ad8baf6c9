#include <catch2/catch_amalgamated.hpp>

#include <fstream>

#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "tourmon/geo.hpp"

using namespace tourmon;

namespace {

Ring box(double lon0, double lat0, double lon1, double lat1) {
  return {{lon0, lat0}, {lon1, lat0}, {lon1, lat1}, {lon0, lat1}};
}

Territory make_territory(const std::string& id, Polygon poly,
                         double area = 100.0) {
  Territory t;
  t.territory_id = id;
  t.name = id;
  t.country = id.substr(0, 2);
  t.level_label = "region";
  t.area_km2 = area;
  t.polygons.push_back(std::move(poly));
  return t;
}

}  // namespace

TEST_CASE("point in polygon: interior, exterior, boundary") {
  Polygon square{box(0, 0, 10, 10)};
  CHECK(point_in_polygon(square, 5, 5));
  CHECK_FALSE(point_in_polygon(square, 15, 5));
  CHECK_FALSE(point_in_polygon(square, -0.001, 5));
  // boundary points count as inside: edges and vertices
  CHECK(point_in_polygon(square, 0, 5));
  CHECK(point_in_polygon(square, 10, 5));
  CHECK(point_in_polygon(square, 5, 0));
  CHECK(point_in_polygon(square, 0, 0));
  CHECK(point_in_polygon(square, 10, 10));
}

TEST_CASE("point in polygon: hole via even-odd rule") {
  Polygon donut{box(0, 0, 10, 10), box(4, 4, 6, 6)};
  CHECK(point_in_polygon(donut, 2, 2));
  CHECK_FALSE(point_in_polygon(donut, 5, 5));  // inside the hole
  CHECK(point_in_polygon(donut, 4, 5));        // hole boundary is boundary
  CHECK(point_in_polygon(donut, 9.5, 9.5));
}

TEST_CASE("point in polygon: concave shape") {
  // L-shape: big square minus its top-right quarter
  Ring ell = {{0, 0}, {10, 0}, {10, 5}, {5, 5}, {5, 10}, {0, 10}};
  Polygon poly{ell};
  CHECK(point_in_polygon(poly, 2, 8));
  CHECK(point_in_polygon(poly, 8, 2));
  CHECK_FALSE(point_in_polygon(poly, 8, 8));  // the notch
  CHECK(point_in_polygon(poly, 5, 7));        // notch boundary
}

TEST_CASE("vertex-grazing ray does not double count") {
  // Diamond: ray through (0,5) passes exactly by vertices at lat 5
  Ring diamond = {{5, 0}, {10, 5}, {5, 10}, {0, 5}};
  Polygon poly{diamond};
  CHECK(point_in_polygon(poly, 5, 5));
  CHECK_FALSE(point_in_polygon(poly, -3, 5));
  CHECK_FALSE(point_in_polygon(poly, 12, 5));
  CHECK(point_in_polygon(poly, 0, 5));  // the vertex itself: boundary
}

TEST_CASE("multi-polygon territories contain both parts") {
  Territory t = make_territory("TN-SF", Polygon{box(0, 0, 2, 2)});
  t.polygons.push_back(Polygon{box(5, 5, 7, 7)});
  t.compute_bbox();
  CHECK(territory_contains(t, 1, 1));
  CHECK(territory_contains(t, 6, 6));
  CHECK_FALSE(territory_contains(t, 3.5, 3.5));  // gap between parts
}

TEST_CASE("bbox prefilter never rejects a contained point") {
  Territory t = make_territory("MA-MS", Polygon{box(-10, 30, -7, 32)});
  t.compute_bbox();
  CHECK(t.bbox_contains(-10, 30));  // corner stays inside
  CHECK(territory_contains(t, -10, 30));
  CHECK_FALSE(t.bbox_contains(-6.9, 31));
}

TEST_CASE("index assignment: unique, none, and overlap tie-break") {
  TerritoryIndex index;
  index.add(make_territory("B-OVER", Polygon{box(0, 0, 10, 10)}));
  index.add(make_territory("A-OVER", Polygon{box(5, 5, 15, 15)}));
  index.add(make_territory("C-FAR", Polygon{box(100, 50, 110, 60)}));

  auto unique = index.assign(2, 2);  // (lat, lon)
  CHECK(unique.territory_id.value() == "B-OVER");
  CHECK(unique.candidates == std::vector<std::string>{"B-OVER"});

  auto overlap = index.assign(7, 7);
  CHECK(overlap.territory_id.value() == "A-OVER");  // smallest id wins
  CHECK(overlap.candidates ==
        std::vector<std::string>{"A-OVER", "B-OVER"});

  auto none = index.assign(-40, -40);
  CHECK_FALSE(none.territory_id.has_value());
  CHECK(none.candidates.empty());

  // shared border: point on the common edge belongs to both
  TerritoryIndex border;
  border.add(make_territory("T-B", Polygon{box(1, 0, 2, 1)}));
  border.add(make_territory("T-A", Polygon{box(0, 0, 1, 1)}));
  auto on_edge = border.assign(0.5, 1.0);
  CHECK(on_edge.candidates == std::vector<std::string>{"T-A", "T-B"});
  CHECK(on_edge.territory_id.value() == "T-A");
}

TEST_CASE("index rejects invalid definitions") {
  TerritoryIndex index;
  CHECK_THROWS_AS(index.add(make_territory("", Polygon{box(0, 0, 1, 1)})),
                  ConfigError);
  CHECK_THROWS_AS(
      index.add(make_territory("X-1", Polygon{box(0, 0, 1, 1)}, 0.0)),
      ConfigError);
  index.add(make_territory("X-1", Polygon{box(0, 0, 1, 1)}));
  CHECK_THROWS_AS(index.add(make_territory("X-1", Polygon{box(0, 0, 1, 1)})),
                  ConfigError);
}

TEST_CASE("density per 100 km2") {
  CHECK(density_per_100km2(291, 39167.0) ==
        Catch::Approx(100.0 * 291 / 39167.0));
  CHECK(density_per_100km2(0, 50.0) == 0.0);
  CHECK_THROWS_AS(density_per_100km2(10, 0.0), GeometryError);
  CHECK_THROWS_AS(density_per_100km2(10, -3.0), GeometryError);
}

TEST_CASE("geojson loader reads the bundled territories") {
  auto index = load_territories(fixtures::data_file("territories.geojson"));
  REQUIRE(index.territories().size() == 6);
  const Territory* ms = index.find("MA-MS");
  REQUIRE(ms != nullptr);
  CHECK(ms->country == "MA");
  CHECK(ms->level_label == "region");
  CHECK(ms->area_km2 > 0);
  const Territory* sf = index.find("TN-SF");
  REQUIRE(sf != nullptr);
  CHECK(sf->polygons.size() == 2);  // MultiPolygon feature

  // fixture centers land where the archive builder expects
  CHECK(index.assign(31.0, -8.5).territory_id.value() == "MA-MS");
  CHECK(index.assign(36.8, 10.0).territory_id.value() == "TN-TU");
  CHECK(index.assign(34.75, 11.45).territory_id.value() == "TN-SF");
  CHECK_FALSE(index.assign(20.0, 0.0).territory_id.has_value());
}

TEST_CASE("geojson loader rejects malformed files") {
  auto dir = fixtures::temp_dir("geojson");
  auto write = [&](const std::string& name, const std::string& body) {
    std::ofstream f(dir / name);
    f << body;
    return (dir / name).string();
  };
  CHECK_THROWS_AS(load_territories((dir / "missing.json").string()), IoError);
  CHECK_THROWS_AS(
      load_territories(write("notjson.json", "{ nope")), ConfigError);
  CHECK_THROWS_AS(
      load_territories(write("notfc.json", R"({"type":"Feature"})")),
      ConfigError);
  CHECK_THROWS_AS(load_territories(write("noprops.json", R"({
    "type": "FeatureCollection",
    "features": [{"type": "Feature", "properties": {"territory_id": "X-1"},
      "geometry": {"type": "Polygon",
        "coordinates": [[[0,0],[1,0],[1,1],[0,1],[0,0]]]}}]})")),
                  ConfigError);
  CHECK_THROWS_AS(load_territories(write("badring.json", R"({
    "type": "FeatureCollection",
    "features": [{"type": "Feature", "properties": {
        "territory_id": "X-1", "name": "X", "country": "XX",
        "level_label": "region", "area_km2": 10},
      "geometry": {"type": "Polygon", "coordinates": [[[0,0],[1,0]]]}}]})")),
                  ConfigError);
  CHECK_THROWS_AS(load_territories(write("badgeom.json", R"({
    "type": "FeatureCollection",
    "features": [{"type": "Feature", "properties": {
        "territory_id": "X-1", "name": "X", "country": "XX",
        "level_label": "region", "area_km2": 10},
      "geometry": {"type": "Point", "coordinates": [0, 0]}}]})")),
                  ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("closed rings are accepted and deduplicated") {
  auto dir = fixtures::temp_dir("ring");
  std::ofstream f(dir / "t.json");
  f << R"({"type": "FeatureCollection", "features": [{
      "type": "Feature",
      "properties": {"territory_id": "X-1", "name": "X", "country": "XX",
                     "level_label": "region", "area_km2": 25},
      "geometry": {"type": "Polygon",
                   "coordinates": [[[0,0],[5,0],[5,5],[0,5],[0,0]]]}}]})";
  f.close();
  auto index = load_territories((dir / "t.json").string());
  const Territory* t = index.find("X-1");
  REQUIRE(t != nullptr);
  CHECK(t->polygons[0][0].size() == 4);  // closing duplicate removed
  CHECK(index.assign(2.5, 2.5).territory_id.value() == "X-1");
  std::filesystem::remove_all(dir);
}

TEST_CASE("assign_territories stamps records and tallies") {
  TerritoryIndex index;
  index.add(make_territory("AA-T1", Polygon{box(0, 0, 10, 10)}));
  index.add(make_territory("AA-T2", Polygon{box(5, 5, 15, 15)}));

  std::vector<AccommodationRecord> records(3);
  for (auto& r : records) {
    r.name = "n";
    r.country = "AA";
  }
  records[0].accommodation_id = "a";
  records[0].latitude = 2;
  records[0].longitude = 2;
  records[1].accommodation_id = "b";
  records[1].latitude = 7;  // overlap zone
  records[1].longitude = 7;
  records[2].accommodation_id = "c";
  records[2].latitude = -40;
  records[2].longitude = -40;

  auto stats = assign_territories(records, index);
  CHECK(stats.located == 2);
  CHECK(stats.unassigned == 1);
  CHECK(stats.ambiguous == 1);
  CHECK(records[0].territory_id.value() == "AA-T1");
  CHECK(records[1].territory_id.value() == "AA-T1");  // tie-break, sorted ids
  CHECK_FALSE(records[2].territory_id.has_value());
}

TEST_CASE("half-plane oracle agrees on dense grids for convex shapes") {
  // quick structural check ahead of the acceptance sweep
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<oracles::XY> pts;
    for (int i = 0; i < 12; ++i)
      pts.push_back({static_cast<double>(uniform_below(rng, 41)) - 20.0,
                     static_cast<double>(uniform_below(rng, 41)) - 20.0});
    auto hull = oracles::convex_hull(pts);
    if (hull.size() < 3) continue;
    Ring ring;
    for (const auto& p : hull) ring.push_back({p.x, p.y});
    Polygon poly{ring};
    for (int s = 0; s < 200; ++s) {
      double x = static_cast<double>(uniform_below(rng, 177)) / 4.0 - 22.0;
      double y = static_cast<double>(uniform_below(rng, 177)) / 4.0 - 22.0;
      bool oracle = oracles::half_plane_inside(hull, x, y);
      bool got = point_in_polygon(poly, x, y);
      REQUIRE(got == oracle);
    }
  }
}
