#pragma once

#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tourmon/date.hpp"
#include "tourmon/error.hpp"

namespace tourmon {

// Vocabulary of accommodation types; unmapped source labels become `other`,
// never dropped.
enum class UnitType { room, apartment, suite, studio, holiday_home, other };

inline const char* to_string(UnitType t) {
  switch (t) {
    case UnitType::room: return "room";
    case UnitType::apartment: return "apartment";
    case UnitType::suite: return "suite";
    case UnitType::studio: return "studio";
    case UnitType::holiday_home: return "holiday_home";
    case UnitType::other: return "other";
  }
  return "other";
}

inline std::optional<UnitType> unit_type_from_string(std::string_view s) {
  if (s == "room") return UnitType::room;
  if (s == "apartment") return UnitType::apartment;
  if (s == "suite") return UnitType::suite;
  if (s == "studio") return UnitType::studio;
  if (s == "holiday_home") return UnitType::holiday_home;
  if (s == "other") return UnitType::other;
  return std::nullopt;
}

inline constexpr std::array<std::string_view, 8> kRatingThemes = {
    "staff",     "cleanliness", "comfort",         "facilities",
    "breakfast", "wifi",        "value_for_money", "location"};

inline bool is_rating_theme(std::string_view name) {
  for (auto t : kRatingThemes)
    if (t == name) return true;
  return false;
}

// One listing under the fixed stay query. Prices and taxes are EUR.
struct AccommodationRecord {
  std::string accommodation_id;
  std::string name;
  std::string country;  // ISO-3166 alpha-2
  UnitType unit_type = UnitType::other;
  std::optional<int> star_class;  // absent = unclassified
  std::optional<double> price_eur;
  std::optional<double> tax_eur;
  bool tax_unknown = false;
  double latitude = 0.0;
  double longitude = 0.0;
  std::optional<double> rating_overall;
  std::map<std::string, double> rating_themes;
  long review_count = 0;
  std::map<std::string, std::string> extra;  // pass-through attributes
  std::string snapshot_id;
  std::optional<std::string> territory_id;  // set by the geo stage
};

struct ReviewRecord {
  std::string review_id;
  std::string accommodation_id;
  std::string text;
  std::optional<std::string> language;  // BCP-47
  std::string reviewer_country = "unknown";
  Date posted_at;
  std::optional<double> score;
};

// Fixed booking parameters under which prices/taxes are comparable.
struct StayQuery {
  int adults = 0;
  int nights = 0;
  Date checkin;
  Date checkout;
  Date booked_on;

  void validate() const {
    if (adults <= 0) throw ValidationError("stay: adults must be positive");
    if (nights != days_between(checkin, checkout))
      throw ValidationError("stay: nights must equal checkout - checkin");
  }

  // The reference stay all bundled fixtures use: 2 adults, 6 nights,
  // Aug 1-7 2020, booked Feb 3 2020.
  static StayQuery reference() {
    return StayQuery{2, 6, Date{2020, 8, 1}, Date{2020, 8, 7},
                     Date{2020, 2, 3}};
  }
};

inline StayQuery load_stay_query(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open stay file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad stay file " + path + ": " + e.what());
  }
  StayQuery s;
  try {
    s.adults = j.at("adults").get<int>();
    s.nights = j.at("nights").get<int>();
    s.checkin = parse_date(j.at("checkin").get<std::string>());
    s.checkout = parse_date(j.at("checkout").get<std::string>());
    s.booked_on = parse_date(j.at("booked_on").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad stay file " + path + ": " + e.what());
  }
  s.validate();
  return s;
}

// --- Validation --------------------------------------------------------------

struct Violation {
  std::string field;
  std::string value;
  std::string rule;
};

inline std::vector<Violation> validate(
    const AccommodationRecord& r,
    std::optional<long> attached_review_count = std::nullopt) {
  std::vector<Violation> v;
  auto add = [&](std::string field, std::string value, std::string rule) {
    v.push_back({std::move(field), std::move(value), std::move(rule)});
  };
  if (r.accommodation_id.empty())
    add("accommodation_id", "", "must be non-empty");
  if (r.name.empty()) add("name", "", "must be non-empty");
  if (r.country.size() != 2 ||
      !std::isupper(static_cast<unsigned char>(r.country[0])) ||
      !std::isupper(static_cast<unsigned char>(r.country[1])))
    add("country", r.country, "must be ISO-3166 alpha-2");
  if (r.star_class && (*r.star_class < 1 || *r.star_class > 5))
    add("star_class", std::to_string(*r.star_class), "must be in 1..5");
  if (r.price_eur && (*r.price_eur < 0 || !std::isfinite(*r.price_eur)))
    add("price_eur", std::to_string(*r.price_eur), "must be >= 0");
  if (r.tax_eur && (*r.tax_eur < 0 || !std::isfinite(*r.tax_eur)))
    add("tax_eur", std::to_string(*r.tax_eur), "must be >= 0");
  if (r.tax_unknown && r.tax_eur)
    add("tax_eur", std::to_string(*r.tax_eur),
        "tax_unknown=true requires tax_eur absent");
  if (r.latitude < -90.0 || r.latitude > 90.0 || !std::isfinite(r.latitude))
    add("latitude", std::to_string(r.latitude), "must be in [-90, 90]");
  if (r.longitude < -180.0 || r.longitude > 180.0 ||
      !std::isfinite(r.longitude))
    add("longitude", std::to_string(r.longitude), "must be in [-180, 180]");
  if (r.rating_overall && (*r.rating_overall < 1.0 || *r.rating_overall > 10.0))
    add("rating_overall", std::to_string(*r.rating_overall),
        "must be in [1, 10]");
  for (const auto& [theme, score] : r.rating_themes) {
    if (!is_rating_theme(theme))
      add("rating_themes." + theme, std::to_string(score), "unknown theme");
    else if (score < 1.0 || score > 10.0)
      add("rating_themes." + theme, std::to_string(score),
          "must be in [1, 10]");
  }
  if (r.review_count < 0)
    add("review_count", std::to_string(r.review_count), "must be >= 0");
  if (attached_review_count && r.review_count < *attached_review_count)
    add("review_count", std::to_string(r.review_count),
        "must be >= number of attached reviews (" +
            std::to_string(*attached_review_count) + ")");
  return v;
}

// --- NDJSON ------------------------------------------------------------------
//
// Keys are emitted in a fixed documented order so identical inputs always
// produce byte-identical files. territory_id appears once the geo stage has
// run (null = unassigned).

inline nlohmann::ordered_json to_json(const AccommodationRecord& r,
                                      bool with_territory) {
  nlohmann::ordered_json j;
  j["accommodation_id"] = r.accommodation_id;
  j["name"] = r.name;
  j["country"] = r.country;
  j["unit_type"] = to_string(r.unit_type);
  j["star_class"] = r.star_class ? nlohmann::ordered_json(*r.star_class)
                                 : nlohmann::ordered_json(nullptr);
  j["price_eur"] = r.price_eur ? nlohmann::ordered_json(*r.price_eur)
                               : nlohmann::ordered_json(nullptr);
  j["tax_eur"] = r.tax_eur ? nlohmann::ordered_json(*r.tax_eur)
                           : nlohmann::ordered_json(nullptr);
  j["tax_unknown"] = r.tax_unknown;
  j["latitude"] = r.latitude;
  j["longitude"] = r.longitude;
  j["rating_overall"] = r.rating_overall
                            ? nlohmann::ordered_json(*r.rating_overall)
                            : nlohmann::ordered_json(nullptr);
  nlohmann::ordered_json themes = nlohmann::ordered_json::object();
  for (auto t : kRatingThemes) {
    auto it = r.rating_themes.find(std::string(t));
    if (it != r.rating_themes.end()) themes[std::string(t)] = it->second;
  }
  j["rating_themes"] = std::move(themes);
  j["review_count"] = r.review_count;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();
  for (const auto& [k, val] : r.extra) extra[k] = val;
  j["extra"] = std::move(extra);
  j["snapshot_id"] = r.snapshot_id;
  if (with_territory)
    j["territory_id"] = r.territory_id ? nlohmann::ordered_json(*r.territory_id)
                                       : nlohmann::ordered_json(nullptr);
  return j;
}

inline AccommodationRecord accommodation_from_json(const nlohmann::json& j) {
  AccommodationRecord r;
  try {
    r.accommodation_id = j.at("accommodation_id").get<std::string>();
    r.name = j.at("name").get<std::string>();
    r.country = j.at("country").get<std::string>();
    auto ut = unit_type_from_string(j.at("unit_type").get<std::string>());
    if (!ut)
      throw ParseError("unknown unit_type: " +
                       j.at("unit_type").get<std::string>());
    r.unit_type = *ut;
    if (!j.at("star_class").is_null()) r.star_class = j.at("star_class").get<int>();
    if (!j.at("price_eur").is_null()) r.price_eur = j.at("price_eur").get<double>();
    if (!j.at("tax_eur").is_null()) r.tax_eur = j.at("tax_eur").get<double>();
    r.tax_unknown = j.at("tax_unknown").get<bool>();
    r.latitude = j.at("latitude").get<double>();
    r.longitude = j.at("longitude").get<double>();
    if (!j.at("rating_overall").is_null())
      r.rating_overall = j.at("rating_overall").get<double>();
    for (const auto& [k, v] : j.at("rating_themes").items())
      r.rating_themes[k] = v.get<double>();
    r.review_count = j.at("review_count").get<long>();
    if (j.contains("extra"))
      for (const auto& [k, v] : j.at("extra").items())
        r.extra[k] = v.get<std::string>();
    r.snapshot_id = j.at("snapshot_id").get<std::string>();
    if (j.contains("territory_id") && !j.at("territory_id").is_null())
      r.territory_id = j.at("territory_id").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad accommodation record: ") + e.what());
  }
  return r;
}

inline nlohmann::ordered_json to_json(const ReviewRecord& r) {
  nlohmann::ordered_json j;
  j["review_id"] = r.review_id;
  j["accommodation_id"] = r.accommodation_id;
  j["text"] = r.text;
  j["language"] = r.language ? nlohmann::ordered_json(*r.language)
                             : nlohmann::ordered_json(nullptr);
  j["reviewer_country"] = r.reviewer_country;
  j["posted_at"] = r.posted_at.str();
  j["score"] = r.score ? nlohmann::ordered_json(*r.score)
                       : nlohmann::ordered_json(nullptr);
  return j;
}

inline ReviewRecord review_from_json(const nlohmann::json& j) {
  ReviewRecord r;
  try {
    r.review_id = j.at("review_id").get<std::string>();
    r.accommodation_id = j.at("accommodation_id").get<std::string>();
    r.text = j.at("text").get<std::string>();
    if (!j.at("language").is_null())
      r.language = j.at("language").get<std::string>();
    r.reviewer_country = j.at("reviewer_country").get<std::string>();
    r.posted_at = parse_date(j.at("posted_at").get<std::string>());
    if (!j.at("score").is_null()) r.score = j.at("score").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad review record: ") + e.what());
  }
  return r;
}

template <typename T, typename ToJson>
void write_ndjson(const std::string& path, const std::vector<T>& items,
                  ToJson&& to_json_fn) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write file: " + path);
  for (const auto& item : items) out << to_json_fn(item).dump() << '\n';
  if (!out) throw IoError("write failed: " + path);
}

inline void write_records_ndjson(const std::string& path,
                                 const std::vector<AccommodationRecord>& recs,
                                 bool with_territory) {
  write_ndjson(path, recs, [&](const AccommodationRecord& r) {
    return to_json(r, with_territory);
  });
}

inline void write_reviews_ndjson(const std::string& path,
                                 const std::vector<ReviewRecord>& reviews) {
  write_ndjson(path, reviews,
               [](const ReviewRecord& r) { return to_json(r); });
}

template <typename FromJson>
auto read_ndjson(const std::string& path, FromJson&& from_json_fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::vector<decltype(from_json_fn(nlohmann::json{}))> items;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    items.push_back(from_json_fn(j));
  }
  return items;
}

inline std::vector<AccommodationRecord> read_records_ndjson(
    const std::string& path) {
  return read_ndjson(
      path, [](const nlohmann::json& j) { return accommodation_from_json(j); });
}

inline std::vector<ReviewRecord> read_reviews_ndjson(const std::string& path) {
  return read_ndjson(path,
                     [](const nlohmann::json& j) { return review_from_json(j); });
}

}  // namespace tourmon
