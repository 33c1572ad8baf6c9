#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tourmon/currency.hpp"
#include "tourmon/date.hpp"
#include "tourmon/error.hpp"
#include "tourmon/html.hpp"
#include "tourmon/record.hpp"
#include "tourmon/rules.hpp"
#include "tourmon/snapshot.hpp"

namespace tourmon {

// Pulls one AccommodationRecord out of a listing page. Prices are converted
// to EUR at the stay's booking date; a missing rate is a hard error rather
// than a silent pass-through. Ratings outside [1,10] abort extraction.
inline AccommodationRecord extract_accommodation(const RawSnapshot& snap,
                                                 const ExtractionRules& rules,
                                                 const StayQuery& stay,
                                                 const CurrencyTable& fx) {
  html::Document doc = html::Document::parse(snap.body);
  const auto& acc = rules.accommodation;
  auto get = [&](const std::string& field) {
    return apply_rule(acc.at(field), doc, doc.root(), field);
  };

  AccommodationRecord rec;
  rec.snapshot_id = snap.snapshot_id;
  rec.accommodation_id = *get("accommodation_id");
  rec.name = *get("name");
  rec.country = *get("country");
  if (rec.accommodation_id.empty())
    throw ParseError("empty accommodation_id in " + snap.snapshot_id);
  if (rec.name.empty())
    throw ParseError("empty name in " + snap.snapshot_id);

  if (auto raw = get("unit_type")) {
    const auto& rule = acc.at("unit_type");
    std::string mapped = *raw;
    if (!rule.enum_map.empty()) {
      auto it = rule.enum_map.find(*raw);
      if (it != rule.enum_map.end())
        mapped = it->second;
      else if (rule.default_value)
        mapped = *rule.default_value;
    }
    auto ut = unit_type_from_string(mapped);
    rec.unit_type = ut ? *ut : UnitType::other;
  }

  if (auto raw = get("star_class")) {
    long stars = parse_integer(*raw, "star_class");
    if (stars < 1 || stars > 5)
      throw ValidationError("star_class out of range in " + snap.snapshot_id +
                            ": " + *raw);
    rec.star_class = static_cast<int>(stars);
  }

  // tax_unknown_marker: a matched node means the page admits extra charges
  // without stating them.
  bool tax_unknown_marked = false;
  if (!acc.at("tax_unknown_marker").is_absent())
    tax_unknown_marked = get("tax_unknown_marker").has_value();

  std::optional<std::string> currency;
  if (auto raw = get("currency")) currency = *raw;

  auto money_to_eur = [&](const std::string& raw, const std::string& field) {
    double amount =
        parse_localized_number(raw, acc.at(field).number_locale, field);
    if (amount < 0)
      throw ValidationError("negative " + field + " in " + snap.snapshot_id);
    if (!currency)
      throw ParseError("field '" + field + "' present but no currency in " +
                       snap.snapshot_id);
    return fx.to_eur(amount, *currency, stay.booked_on);
  };

  if (auto raw = get("price")) rec.price_eur = money_to_eur(*raw, "price");
  if (tax_unknown_marked) {
    rec.tax_unknown = true;
  } else if (auto raw = get("tax")) {
    rec.tax_eur = money_to_eur(*raw, "tax");
  }

  rec.latitude = parse_localized_number(
      *get("latitude"), acc.at("latitude").number_locale, "latitude");
  rec.longitude = parse_localized_number(
      *get("longitude"), acc.at("longitude").number_locale, "longitude");

  auto checked_rating = [&](const std::string& raw, const std::string& field,
                            const std::string& locale) {
    double v = parse_localized_number(raw, locale, field);
    if (v < 1.0 || v > 10.0)
      throw ValidationError("rating '" + field + "' out of [1,10] in " +
                            snap.snapshot_id + ": " + raw);
    return v;
  };
  if (auto raw = get("rating_overall"))
    rec.rating_overall = checked_rating(*raw, "rating_overall",
                                        acc.at("rating_overall").number_locale);
  for (const auto& [theme, rule] : rules.themes) {
    auto raw = apply_rule(rule, doc, doc.root(), theme);
    if (raw)
      rec.rating_themes[theme] =
          checked_rating(*raw, theme, rule.number_locale);
  }

  if (auto raw = get("review_count"))
    rec.review_count = parse_integer(*raw, "review_count");

  for (const auto& [key, rule] : rules.extra) {
    auto raw = apply_rule(rule, doc, doc.root(), "extra." + key);
    if (raw) rec.extra[key] = *raw;
  }

  auto violations = validate(rec);
  if (!violations.empty())
    throw ValidationError("extracted record invalid (" + snap.snapshot_id +
                          "): " + violations.front().field + ": " +
                          violations.front().rule);
  return rec;
}

struct ReviewExtraction {
  std::vector<ReviewRecord> reviews;  // page order
  long dropped = 0;                   // malformed entries skipped
  std::vector<std::string> drop_reasons;
};

// Walks review containers in page order. A review with an unparseable
// posted_at or an empty id/text is dropped and counted, not fatal.
inline ReviewExtraction extract_reviews(const RawSnapshot& snap,
                                        const ExtractionRules& rules,
                                        const std::string& accommodation_id) {
  ReviewExtraction out;
  if (!rules.reviews) return out;
  html::Document doc = html::Document::parse(snap.body);
  const auto& rr = *rules.reviews;
  auto containers = html::query_all(doc, rr.container);
  for (int node : containers) {
    try {
      auto get = [&](const std::string& field) {
        return apply_rule(rr.fields.at(field), doc, node, field);
      };
      ReviewRecord rev;
      rev.accommodation_id = accommodation_id;
      rev.review_id = *get("review_id");
      rev.text = *get("text");
      if (rev.review_id.empty()) throw ParseError("empty review_id");
      if (rev.text.empty()) throw ParseError("empty review text");
      if (auto raw = get("language")) rev.language = *raw;
      if (auto raw = get("reviewer_country")) rev.reviewer_country = *raw;
      rev.posted_at = parse_date(*get("posted_at"));
      if (auto raw = get("score")) {
        double v = parse_localized_number(
            *raw, rr.fields.at("score").number_locale, "score");
        if (v < 1.0 || v > 10.0)
          throw ValidationError("review score out of [1,10]: " + *raw);
        rev.score = v;
      }
      out.reviews.push_back(std::move(rev));
    } catch (const Error& e) {
      ++out.dropped;
      out.drop_reasons.push_back(e.what());
    }
  }
  return out;
}

// Deduplication: the same accommodation_id captured in several snapshots
// keeps only the most recently fetched copy. Ties on fetch time fall back
// to the lexicographically larger snapshot_id so reruns stay stable.
inline std::vector<AccommodationRecord> dedupe_latest(
    std::vector<AccommodationRecord> records,
    const std::map<std::string, Timestamp>& fetched_at_by_snapshot) {
  auto fetched = [&](const AccommodationRecord& r) {
    auto it = fetched_at_by_snapshot.find(r.snapshot_id);
    return it == fetched_at_by_snapshot.end() ? Timestamp{0} : it->second;
  };
  std::map<std::string, AccommodationRecord> best;
  for (auto& rec : records) {
    auto it = best.find(rec.accommodation_id);
    if (it == best.end()) {
      best.emplace(rec.accommodation_id, std::move(rec));
      continue;
    }
    const auto& held = it->second;
    auto a = fetched(rec), b = fetched(held);
    bool newer = a.seconds != b.seconds ? a.seconds > b.seconds
                                        : rec.snapshot_id > held.snapshot_id;
    if (newer) it->second = std::move(rec);
  }
  std::vector<AccommodationRecord> out;
  out.reserve(best.size());
  for (auto& [id, rec] : best) out.push_back(std::move(rec));
  return out;  // sorted by accommodation_id via map order
}

}  // namespace tourmon
