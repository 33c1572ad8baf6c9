#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tourmon/csv.hpp"
#include "tourmon/error.hpp"
#include "tourmon/record.hpp"

namespace tourmon {

// star_bucket: "1".."5" or "unclassified"; unset on country/territory rows.
struct GroupKey {
  std::string country;
  std::optional<std::string> territory_id;
  std::optional<std::string> star_bucket;

  std::tuple<std::string, std::string, std::string> sort_key() const {
    return {country, territory_id.value_or(""), star_bucket.value_or("")};
  }
  bool operator<(const GroupKey& o) const { return sort_key() < o.sort_key(); }
  bool operator==(const GroupKey& o) const {
    return sort_key() == o.sort_key();
  }
};

// shares is a map of distribution families; each family's ratios sum to 1
// over its own denominator (which coverage["share.<family>"] records).
struct AggregateReport {
  GroupKey group;
  long n = 0;
  std::map<std::string, std::map<std::string, double>> shares;
  std::map<std::string, double> means;  // only metrics with coverage > 0
  std::map<std::string, long> coverage;
  std::map<std::string, long> counts;       // e.g. tax_unknown_count
  std::optional<double> density_per_100km2;  // territory rows with an area
};

struct MeanResult {
  std::optional<double> mean;  // nullopt = no data, never a fabricated 0
  long coverage = 0;
};

namespace stats_detail {

inline std::optional<double> metric_value(const AccommodationRecord& r,
                                          const std::string& metric) {
  if (metric == "price_eur") return r.price_eur;
  if (metric == "tax_eur") return r.tax_unknown ? std::nullopt : r.tax_eur;
  if (metric == "rating_overall") return r.rating_overall;
  constexpr std::string_view prefix = "rating_themes.";
  if (metric.rfind(prefix, 0) == 0) {
    std::string theme = metric.substr(prefix.size());
    if (!is_rating_theme(theme))
      throw DomainError("unknown rating theme: " + theme);
    auto it = r.rating_themes.find(theme);
    if (it == r.rating_themes.end()) return std::nullopt;
    return it->second;
  }
  throw DomainError("unknown metric: " + metric);
}

}  // namespace stats_detail

// Share of each territory in its country's located offer. Only located
// records count; territories without records simply do not appear.
inline std::map<std::string, double> concentration_shares(
    const std::vector<AccommodationRecord>& records,
    const std::string& country) {
  std::map<std::string, long> counts;
  long total = 0;
  for (const auto& r : records) {
    if (r.country != country || !r.territory_id) continue;
    ++counts[*r.territory_id];
    ++total;
  }
  std::map<std::string, double> shares;
  if (total == 0) return shares;
  for (const auto& [tid, c] : counts)
    shares[tid] = static_cast<double>(c) / static_cast<double>(total);
  return shares;
}

inline std::map<std::string, double> type_structure(
    const std::vector<AccommodationRecord>& records) {
  std::map<std::string, long> counts;
  for (const auto& r : records) ++counts[std::string(to_string(r.unit_type))];
  std::map<std::string, double> shares;
  if (records.empty()) return shares;
  for (const auto& [type, c] : counts)
    shares[type] = static_cast<double>(c) / static_cast<double>(records.size());
  return shares;
}

struct ClassificationStructure {
  double unclassified_share = 0.0;
  std::map<int, double> star_shares;  // over the classified subset only
  long classified = 0;
  long unclassified = 0;
};

inline ClassificationStructure classification_structure(
    const std::vector<AccommodationRecord>& records) {
  ClassificationStructure out;
  std::map<int, long> star_counts;
  for (const auto& r : records) {
    if (r.star_class) {
      ++out.classified;
      ++star_counts[*r.star_class];
    } else {
      ++out.unclassified;
    }
  }
  long n = out.classified + out.unclassified;
  if (n == 0) return out;
  out.unclassified_share =
      static_cast<double>(out.unclassified) / static_cast<double>(n);
  for (const auto& [star, c] : star_counts)
    out.star_shares[star] =
        static_cast<double>(c) / static_cast<double>(out.classified);
  return out;
}

// Unweighted arithmetic mean over records carrying the metric. Records are
// sorted by accommodation_id before summation so ingest order cannot leak
// into the floating-point result.
inline MeanResult mean_metric(const std::vector<AccommodationRecord>& records,
                              const std::string& metric) {
  std::vector<std::pair<std::string, double>> present;
  for (const auto& r : records)
    if (auto v = stats_detail::metric_value(r, metric))
      present.emplace_back(r.accommodation_id, *v);
  std::sort(present.begin(), present.end());
  MeanResult res;
  res.coverage = static_cast<long>(present.size());
  if (present.empty()) return res;
  double sum = 0.0;
  for (const auto& [id, v] : present) sum += v;
  res.mean = sum / static_cast<double>(present.size());
  return res;
}

struct PairedRatings {
  MeanResult unclassified;
  MeanResult classified;
};

inline PairedRatings classified_vs_unclassified(
    const std::vector<AccommodationRecord>& records) {
  std::vector<AccommodationRecord> cls, uncls;
  for (const auto& r : records) (r.star_class ? cls : uncls).push_back(r);
  return PairedRatings{mean_metric(uncls, "rating_overall"),
                       mean_metric(cls, "rating_overall")};
}

struct GroupingSpec {
  bool by_territory = true;
  bool by_star = false;
};

inline GroupingSpec parse_grouping(const std::string& spec) {
  GroupingSpec g;
  g.by_territory = false;
  std::size_t start = 0;
  bool saw_country = false;
  while (start <= spec.size()) {
    std::size_t comma = spec.find(',', start);
    std::string dim = spec.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    if (dim == "country")
      saw_country = true;
    else if (dim == "territory")
      g.by_territory = true;
    else if (dim == "star")
      g.by_star = true;
    else if (!dim.empty())
      throw ConfigError("unknown grouping dimension: " + dim);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (!saw_country) throw ConfigError("grouping must include 'country'");
  return g;
}

namespace stats_detail {

inline const std::vector<std::string>& mean_metric_order() {
  static const std::vector<std::string> order = [] {
    std::vector<std::string> v = {"price_eur", "tax_eur", "rating_overall"};
    for (auto theme : kRatingThemes)
      v.push_back("rating_themes." + std::string(theme));
    return v;
  }();
  return order;
}

inline AggregateReport make_report(
    const GroupKey& key, const std::vector<AccommodationRecord>& subset,
    const std::map<std::string, double>* areas) {
  AggregateReport rep;
  rep.group = key;
  rep.n = static_cast<long>(subset.size());

  if (!key.star_bucket) {
    auto cls = classification_structure(subset);
    if (rep.n > 0) {
      rep.shares["classification"] = {
          {"unclassified", cls.unclassified_share},
          {"classified", 1.0 - cls.unclassified_share}};
      rep.coverage["share.classification"] = rep.n;
    }
    if (!cls.star_shares.empty()) {
      for (const auto& [star, share] : cls.star_shares)
        rep.shares["star_class"][std::to_string(star)] = share;
      rep.coverage["share.star_class"] = cls.classified;
    }
    auto paired = classified_vs_unclassified(subset);
    rep.coverage["mean.rating_overall.classified"] = paired.classified.coverage;
    if (paired.classified.mean)
      rep.means["rating_overall.classified"] = *paired.classified.mean;
    rep.coverage["mean.rating_overall.unclassified"] =
        paired.unclassified.coverage;
    if (paired.unclassified.mean)
      rep.means["rating_overall.unclassified"] = *paired.unclassified.mean;
  }

  if (rep.n > 0) {
    rep.shares["unit_type"] = type_structure(subset);
    rep.coverage["share.unit_type"] = rep.n;
  }

  for (const auto& metric : mean_metric_order()) {
    auto mr = mean_metric(subset, metric);
    rep.coverage["mean." + metric] = mr.coverage;
    if (mr.mean) rep.means[metric] = *mr.mean;
  }

  long tax_unknown = 0;
  for (const auto& r : subset)
    if (r.tax_unknown) ++tax_unknown;
  rep.counts["tax_unknown_count"] = tax_unknown;

  if (key.territory_id && !key.star_bucket && areas) {
    auto it = areas->find(*key.territory_id);
    if (it != areas->end() && it->second > 0.0)
      rep.density_per_100km2 =
          100.0 * static_cast<double>(rep.n) / it->second;
  }
  return rep;
}

}  // namespace stats_detail

// One report per group, ordered by (country, territory, star bucket); the
// country row carries the territorial concentration distribution.
inline std::vector<AggregateReport> build_report(
    const std::vector<AccommodationRecord>& records, const GroupingSpec& spec,
    const std::map<std::string, double>* areas = nullptr) {
  std::map<GroupKey, std::vector<AccommodationRecord>> groups;
  auto bucket_of = [](const AccommodationRecord& r) {
    return r.star_class ? std::to_string(*r.star_class)
                        : std::string("unclassified");
  };
  for (const auto& r : records) {
    groups[GroupKey{r.country, std::nullopt, std::nullopt}].push_back(r);
    if (spec.by_star)
      groups[GroupKey{r.country, std::nullopt, bucket_of(r)}].push_back(r);
    if (spec.by_territory && r.territory_id) {
      groups[GroupKey{r.country, r.territory_id, std::nullopt}].push_back(r);
      if (spec.by_star)
        groups[GroupKey{r.country, r.territory_id, bucket_of(r)}].push_back(r);
    }
  }

  std::vector<AggregateReport> reports;
  for (const auto& [key, subset] : groups) {
    auto rep = stats_detail::make_report(key, subset, areas);
    if (!key.territory_id && !key.star_bucket) {
      auto conc = concentration_shares(records, key.country);
      if (!conc.empty()) {
        long located = 0;
        for (const auto& r : subset)
          if (r.territory_id) ++located;
        rep.shares["territory_concentration"] = conc;
        rep.coverage["share.territory_concentration"] = located;
      }
    }
    reports.push_back(std::move(rep));
  }
  return reports;  // map iteration is already (country, territory, star) order
}

// --- Rendering ---------------------------------------------------------------

// Fixed row schema: ratios at 4 decimals, means at 2, zero-coverage means as
// the literal "no-data". Metric rows follow a fixed order per group.
inline void render_report_csv(const std::vector<AggregateReport>& reports,
                              std::ostream& out) {
  CsvWriter w(out);
  w.row({"country", "territory_id", "star_bucket", "metric", "value",
         "coverage", "n"});
  for (const auto& rep : reports) {
    std::string country = rep.group.country;
    std::string tid = rep.group.territory_id.value_or("");
    std::string bucket = rep.group.star_bucket.value_or("");
    auto emit = [&](const std::string& metric, const std::string& value,
                    long coverage) {
      w.row({country, tid, bucket, metric, value, std::to_string(coverage),
             std::to_string(rep.n)});
    };

    for (const auto& [family, dist] : rep.shares) {
      long cov = rep.coverage.count("share." + family)
                     ? rep.coverage.at("share." + family)
                     : rep.n;
      for (const auto& [label, ratio] : dist)
        emit("share." + family + "." + label, format_fixed(ratio, 4), cov);
    }

    auto emit_mean = [&](const std::string& name) {
      long cov = rep.coverage.count("mean." + name)
                     ? rep.coverage.at("mean." + name)
                     : 0;
      auto it = rep.means.find(name);
      emit("mean." + name,
           it == rep.means.end() ? "no-data" : format_fixed(it->second, 2),
           cov);
    };
    for (const auto& metric : stats_detail::mean_metric_order())
      emit_mean(metric);
    if (!rep.group.star_bucket) {
      emit_mean("rating_overall.classified");
      emit_mean("rating_overall.unclassified");
    }

    for (const auto& [name, value] : rep.counts)
      emit(name, std::to_string(value), rep.n);

    if (rep.density_per_100km2)
      emit("density_per_100km2", format_fixed(*rep.density_per_100km2, 2),
           rep.n);
  }
}

inline nlohmann::ordered_json report_to_json(
    const std::vector<AggregateReport>& reports) {
  nlohmann::ordered_json j;
  j["metadata"] = {{"weighting", "unweighted-per-accommodation"},
                   {"rounding", "internal full precision; csv rounds"}};
  j["groups"] = nlohmann::ordered_json::array();
  for (const auto& rep : reports) {
    nlohmann::ordered_json g;
    g["country"] = rep.group.country;
    g["territory_id"] = rep.group.territory_id
                            ? nlohmann::ordered_json(*rep.group.territory_id)
                            : nlohmann::ordered_json(nullptr);
    g["star_bucket"] = rep.group.star_bucket
                           ? nlohmann::ordered_json(*rep.group.star_bucket)
                           : nlohmann::ordered_json(nullptr);
    g["n"] = rep.n;
    g["shares"] = rep.shares;
    g["means"] = rep.means;
    g["coverage"] = rep.coverage;
    g["counts"] = rep.counts;
    if (rep.density_per_100km2)
      g["density_per_100km2"] = *rep.density_per_100km2;
    j["groups"].push_back(std::move(g));
  }
  return j;
}

inline std::vector<AggregateReport> report_from_json(const nlohmann::json& j) {
  std::vector<AggregateReport> reports;
  for (const auto& g : j.at("groups")) {
    AggregateReport rep;
    rep.group.country = g.at("country").get<std::string>();
    if (!g.at("territory_id").is_null())
      rep.group.territory_id = g.at("territory_id").get<std::string>();
    if (!g.at("star_bucket").is_null())
      rep.group.star_bucket = g.at("star_bucket").get<std::string>();
    rep.n = g.at("n").get<long>();
    for (const auto& [family, dist] : g.at("shares").items())
      for (const auto& [label, ratio] : dist.items())
        rep.shares[family][label] = ratio.get<double>();
    for (const auto& [metric, mean] : g.at("means").items())
      rep.means[metric] = mean.get<double>();
    for (const auto& [metric, cov] : g.at("coverage").items())
      rep.coverage[metric] = cov.get<long>();
    for (const auto& [name, count] : g.at("counts").items())
      rep.counts[name] = count.get<long>();
    if (g.contains("density_per_100km2"))
      rep.density_per_100km2 = g.at("density_per_100km2").get<double>();
    reports.push_back(std::move(rep));
  }
  return reports;
}

}  // namespace tourmon
