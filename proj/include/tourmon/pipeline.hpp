#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "tourmon/currency.hpp"
#include "tourmon/error.hpp"
#include "tourmon/extract.hpp"
#include "tourmon/geo.hpp"
#include "tourmon/lexicon.hpp"
#include "tourmon/record.hpp"
#include "tourmon/rules.hpp"
#include "tourmon/sentiment.hpp"
#include "tourmon/sha256.hpp"
#include "tourmon/snapshot.hpp"
#include "tourmon/stats.hpp"
#include "tourmon/textproc.hpp"
#include "tourmon/version.hpp"

namespace tourmon {

// --- Minimal TOML reader ------------------------------------------------------
// Supports the subset pipeline configs need: [sections], string / number /
// boolean values, string arrays, and # comments.

using TomlValue =
    std::variant<std::string, double, long, bool, std::vector<std::string>>;
using TomlTable = std::map<std::string, std::map<std::string, TomlValue>>;

namespace toml_detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

inline std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

inline std::string parse_string(const std::string& raw, int lineno) {
  if (raw.size() < 2 || raw.front() != '"' || raw.back() != '"')
    throw ConfigError("config line " + std::to_string(lineno) +
                      ": bad string " + raw);
  std::string out;
  for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
    if (raw[i] == '\\' && i + 2 < raw.size()) {
      ++i;
      out.push_back(raw[i]);
    } else {
      out.push_back(raw[i]);
    }
  }
  return out;
}

inline TomlValue parse_value(const std::string& raw, int lineno) {
  if (raw.empty())
    throw ConfigError("config line " + std::to_string(lineno) +
                      ": missing value");
  if (raw.front() == '"') return parse_string(raw, lineno);
  if (raw == "true") return true;
  if (raw == "false") return false;
  if (raw.front() == '[') {
    if (raw.back() != ']')
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": unclosed array");
    std::vector<std::string> items;
    std::string body = raw.substr(1, raw.size() - 2);
    std::size_t pos = 0;
    while (pos < body.size()) {
      std::size_t q1 = body.find('"', pos);
      if (q1 == std::string::npos) break;
      std::size_t q2 = body.find('"', q1 + 1);
      if (q2 == std::string::npos)
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": bad array string");
      items.push_back(body.substr(q1 + 1, q2 - q1 - 1));
      pos = q2 + 1;
    }
    return items;
  }
  try {
    if (raw.find('.') == std::string::npos &&
        raw.find('e') == std::string::npos) {
      std::size_t used = 0;
      long v = std::stol(raw, &used);
      if (used == raw.size()) return v;
    }
    std::size_t used = 0;
    double v = std::stod(raw, &used);
    if (used == raw.size()) return v;
  } catch (...) {
  }
  throw ConfigError("config line " + std::to_string(lineno) +
                    ": cannot parse value " + raw);
}

}  // namespace toml_detail

inline TomlTable parse_toml_subset(std::istream& in) {
  TomlTable table;
  std::string section;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string t = toml_detail::trim(toml_detail::strip_comment(line));
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": bad section header");
      section = toml_detail::trim(t.substr(1, t.size() - 2));
      if (section.empty())
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": empty section name");
      table[section];
      continue;
    }
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    std::string key = toml_detail::trim(t.substr(0, eq));
    std::string value = toml_detail::trim(t.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": empty key");
    table[section][key] = toml_detail::parse_value(value, lineno);
  }
  return table;
}

// --- Pipeline configuration ---------------------------------------------------

struct PipelineConfig {
  std::string archive_dir;
  std::string rules_file;
  std::string territories_file;
  std::string stay_file;
  std::string fx_file;
  std::string lexicon_file;
  std::vector<std::string> stopword_files;  // first is the base list
  double sample_fraction = 0.10;
  std::uint64_t seed = 42;
  std::size_t top_comments = 10;
  double min_corr = 0.25;
  std::size_t assoc_targets = 10;
  std::string output_dir;
  std::string format = "csv";  // csv | json
};

namespace pipeline_detail {

template <typename T>
inline T get_or(const TomlTable& t, const std::string& section,
                const std::string& key, T fallback) {
  auto s = t.find(section);
  if (s == t.end()) return fallback;
  auto k = s->second.find(key);
  if (k == s->second.end()) return fallback;
  if (auto* v = std::get_if<T>(&k->second)) return *v;
  // allow integer where a double is expected
  if constexpr (std::is_same_v<T, double>) {
    if (auto* v = std::get_if<long>(&k->second))
      return static_cast<double>(*v);
  }
  throw ConfigError("config [" + section + "]." + key + " has the wrong type");
}

inline std::string require_str(const TomlTable& t, const std::string& section,
                               const std::string& key) {
  std::string v = get_or<std::string>(t, section, key, "");
  if (v.empty())
    throw ConfigError("config missing [" + section + "]." + key);
  return v;
}

inline std::string resolve(const std::filesystem::path& base,
                           const std::string& p) {
  std::filesystem::path fp(p);
  if (fp.is_absolute()) return fp.string();
  return (base / fp).lexically_normal().string();
}

inline void require_exists(const std::string& path, const std::string& what) {
  if (!std::filesystem::exists(path))
    throw ConfigError(what + " does not exist: " + path);
}

}  // namespace pipeline_detail

// Relative paths in the file resolve against the config's own directory.
inline PipelineConfig load_pipeline_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  TomlTable t = parse_toml_subset(in);
  std::filesystem::path base = std::filesystem::path(path).parent_path();

  using namespace pipeline_detail;
  PipelineConfig cfg;
  cfg.archive_dir = resolve(base, require_str(t, "inputs", "archive"));
  cfg.rules_file = resolve(base, require_str(t, "inputs", "rules"));
  cfg.territories_file = resolve(base, require_str(t, "inputs", "territories"));
  cfg.stay_file = resolve(base, require_str(t, "inputs", "stay"));
  cfg.fx_file = resolve(base, require_str(t, "inputs", "fx"));
  cfg.lexicon_file = resolve(base, require_str(t, "inputs", "lexicon"));
  auto stops = get_or<std::vector<std::string>>(t, "inputs", "stopwords", {});
  if (stops.empty())
    throw ConfigError("config missing [inputs].stopwords");
  for (const auto& s : stops) cfg.stopword_files.push_back(resolve(base, s));

  cfg.sample_fraction = get_or<double>(t, "run", "sample_fraction", 0.10);
  cfg.seed = static_cast<std::uint64_t>(get_or<long>(t, "run", "seed", 42));
  cfg.top_comments =
      static_cast<std::size_t>(get_or<long>(t, "run", "top_comments", 10));
  cfg.min_corr = get_or<double>(t, "run", "min_corr", 0.25);
  cfg.assoc_targets =
      static_cast<std::size_t>(get_or<long>(t, "run", "assoc_targets", 10));
  cfg.output_dir = resolve(base, require_str(t, "run", "output_dir"));
  cfg.format = get_or<std::string>(t, "run", "format", "csv");

  if (cfg.format != "csv" && cfg.format != "json")
    throw ConfigError("config [run].format must be csv or json");
  if (!(cfg.sample_fraction > 0.0) || cfg.sample_fraction > 1.0)
    throw ConfigError("config [run].sample_fraction must be in (0,1]");
  require_exists(cfg.archive_dir, "archive dir");
  require_exists(cfg.rules_file, "rules file");
  require_exists(cfg.territories_file, "territories file");
  require_exists(cfg.stay_file, "stay file");
  require_exists(cfg.fx_file, "fx file");
  require_exists(cfg.lexicon_file, "lexicon file");
  for (const auto& s : cfg.stopword_files)
    pipeline_detail::require_exists(s, "stopword file");
  return cfg;
}

// --- Stages -------------------------------------------------------------------

struct ParseStageResult {
  std::vector<AccommodationRecord> records;  // deduped, sorted by id
  std::vector<ReviewRecord> reviews;
  long snapshots = 0;
  long parse_failures = 0;
  long duplicates_dropped = 0;
  long reviews_extracted = 0;
  long reviews_dropped = 0;
  long review_duplicates_dropped = 0;
  std::vector<std::string> errors;  // one line per failed snapshot
};

// Parses every snapshot in the archive; a snapshot that fails extraction is
// dropped and counted, never fatal. Within duplicates of one accommodation
// the most recently fetched snapshot wins; duplicate (accommodation,
// review) pairs keep the winning snapshot's copy.
inline ParseStageResult run_parse_stage(const std::string& archive_dir,
                                        const ExtractionRules& rules,
                                        const StayQuery& stay,
                                        const CurrencyTable& fx) {
  ParseStageResult out;
  auto ids = list_snapshot_ids(archive_dir);
  if (ids.empty()) throw Error("no snapshots in archive: " + archive_dir);

  std::map<std::string, Timestamp> fetched_at;
  std::vector<AccommodationRecord> raw_records;
  std::map<std::string, std::vector<ReviewRecord>> reviews_by_snapshot;

  for (const auto& id : ids) {
    ++out.snapshots;
    RawSnapshot snap;
    try {
      snap = load_snapshot(id, archive_dir);
      fetched_at[id] = snap.fetched_at;
      auto rec = extract_accommodation(snap, rules, stay, fx);
      auto revs = extract_reviews(snap, rules, rec.accommodation_id);
      out.reviews_extracted += static_cast<long>(revs.reviews.size());
      out.reviews_dropped += revs.dropped;
      reviews_by_snapshot[id] = std::move(revs.reviews);
      raw_records.push_back(std::move(rec));
    } catch (const Error& e) {
      ++out.parse_failures;
      out.errors.push_back(id + ": " + e.what());
    }
  }

  long before = static_cast<long>(raw_records.size());
  out.records = dedupe_latest(raw_records, fetched_at);
  out.duplicates_dropped = before - static_cast<long>(out.records.size());

  // keep reviews only from each accommodation's winning snapshot, then
  // drop duplicate review ids within it
  std::set<std::string> winning_snapshots;
  for (const auto& r : out.records) winning_snapshots.insert(r.snapshot_id);
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& r : out.records) {
    auto it = reviews_by_snapshot.find(r.snapshot_id);
    if (it == reviews_by_snapshot.end()) continue;
    for (auto& rev : it->second) {
      if (!seen.insert({rev.accommodation_id, rev.review_id}).second) {
        ++out.review_duplicates_dropped;
        continue;
      }
      out.reviews.push_back(rev);
    }
  }
  for (const auto& [snap_id, revs] : reviews_by_snapshot)
    if (!winning_snapshots.count(snap_id))
      out.review_duplicates_dropped += static_cast<long>(revs.size());
  return out;
}

struct ChoroplethRow {
  std::string territory_id;
  std::string metric;
  double value = 0.0;
  long coverage = 0;
};

// One row per territory that actually has data for the metric; joinable
// against the boundary file on territory_id.
inline std::vector<ChoroplethRow> emit_choropleth(
    const std::vector<AggregateReport>& reports, const std::string& metric) {
  std::vector<ChoroplethRow> rows;
  for (const auto& rep : reports) {
    if (!rep.group.territory_id || rep.group.star_bucket) continue;
    ChoroplethRow row;
    row.territory_id = *rep.group.territory_id;
    row.metric = metric;
    if (metric == "density_per_100km2") {
      if (!rep.density_per_100km2) continue;
      row.value = *rep.density_per_100km2;
      row.coverage = rep.n;
    } else if (metric.rfind("mean.", 0) == 0) {
      std::string name = metric.substr(5);
      auto it = rep.means.find(name);
      if (it == rep.means.end()) continue;
      row.value = it->second;
      auto cov = rep.coverage.find("mean." + name);
      row.coverage = cov == rep.coverage.end() ? 0 : cov->second;
      if (row.coverage == 0) continue;
    } else {
      throw DomainError("choropleth metric not supported: " + metric);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace pipeline_detail {

inline void top_n_section(std::ostringstream& os, const std::string& title,
                          std::vector<std::pair<std::string, std::string>> rows,
                          std::size_t n) {
  os << title << "\n";
  if (rows.empty()) {
    os << "  no data\n";
    return;
  }
  for (std::size_t i = 0; i < rows.size() && i < n; ++i)
    os << "  " << (i + 1) << ". " << rows[i].first << "  " << rows[i].second
       << "\n";
}

}  // namespace pipeline_detail

// Fixed-template run digest: top territories by count, price and rating,
// plus the per-group positive-word ratios (read off the sentiment table).
inline std::string emit_summary(const std::vector<AggregateReport>& reports,
                                const std::string& sentiment_csv,
                                std::size_t top_n = 5) {
  std::ostringstream os;
  os << "RUN SUMMARY\n===========\n\n";

  std::vector<const AggregateReport*> territory_reports;
  for (const auto& rep : reports)
    if (rep.group.territory_id && !rep.group.star_bucket)
      territory_reports.push_back(&rep);

  auto ranked = [&](auto value_of, auto render) {
    std::vector<std::pair<std::string, std::string>> rows;
    std::vector<std::pair<double, std::string>> vals;
    for (const auto* rep : territory_reports) {
      auto v = value_of(*rep);
      if (v) vals.emplace_back(*v, *rep->group.territory_id);
    }
    std::sort(vals.begin(), vals.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    for (const auto& [v, tid] : vals) rows.emplace_back(tid, render(v));
    return rows;
  };

  pipeline_detail::top_n_section(
      os, "Accommodations by territory",
      ranked([](const AggregateReport& r) -> std::optional<double> {
               return static_cast<double>(r.n);
             },
             [](double v) { return std::to_string(static_cast<long>(v)); }),
      top_n);
  os << "\n";
  pipeline_detail::top_n_section(
      os, "Mean price (EUR) by territory",
      ranked([](const AggregateReport& r) -> std::optional<double> {
               auto it = r.means.find("price_eur");
               if (it == r.means.end()) return std::nullopt;
               return it->second;
             },
             [](double v) { return format_fixed(v, 2); }),
      top_n);
  os << "\n";
  pipeline_detail::top_n_section(
      os, "Mean overall rating by territory",
      ranked([](const AggregateReport& r) -> std::optional<double> {
               auto it = r.means.find("rating_overall");
               if (it == r.means.end()) return std::nullopt;
               return it->second;
             },
             [](double v) { return format_fixed(v, 2); }),
      top_n);
  os << "\n";

  os << "Positive-word ratio by group\n";
  bool any = false;
  std::istringstream rows(sentiment_csv);
  std::string line;
  std::getline(rows, line);  // header
  while (std::getline(rows, line)) {
    auto fields = split_csv_record(line, ',');
    if (fields.size() == 4 && fields[1] == "positive_ratio") {
      os << "  " << fields[0] << ": " << fields[2] << " (polar words: "
         << fields[3] << ")\n";
      any = true;
    }
  }
  if (!any) os << "  no data\n";
  return os.str();
}

// --- Full run -----------------------------------------------------------------

struct RunResult {
  nlohmann::ordered_json manifest;
  std::string output_dir;
};

namespace pipeline_detail {

inline std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read for digest: " + path);
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return sha256_hex(data);
}

inline void write_text(const std::filesystem::path& path,
                       const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("short write to " + path.string());
}

}  // namespace pipeline_detail

// parse -> geo -> stats -> mine, materialized into output_dir atomically
// (temp dir + rename). The manifest records input digests, stage counts and
// the seed — and deliberately no timestamps, so reruns are byte-identical.
inline RunResult run_pipeline(const PipelineConfig& cfg) {
  namespace fs = std::filesystem;

  auto stage = [](const std::string& name, const std::string& file,
                  auto&& fn) -> decltype(fn()) {
    try {
      return fn();
    } catch (const Error& e) {
      throw Error("stage " + name + " failed (" + file + "): " + e.what());
    } catch (const std::exception& e) {
      throw Error("stage " + name + " failed (" + file + "): " + e.what());
    }
  };

  // inputs
  auto rules = stage("config", cfg.rules_file,
                     [&] { return load_extraction_rules(cfg.rules_file); });
  auto stay = stage("config", cfg.stay_file,
                    [&] { return load_stay_query(cfg.stay_file); });
  auto fx = stage("config", cfg.fx_file,
                  [&] { return CurrencyTable::load_csv(cfg.fx_file); });
  auto territories = stage("config", cfg.territories_file, [&] {
    return load_territories(cfg.territories_file);
  });
  auto lexicon = stage("config", cfg.lexicon_file, [&] {
    return SentimentLexicon::load(cfg.lexicon_file);
  });
  auto stoplist = stage("config", cfg.stopword_files.front(), [&] {
    StopList s;
    for (const auto& f : cfg.stopword_files) s.load_file(f);
    return s;
  });

  // stage 1: parse
  auto parsed = stage("parse", cfg.archive_dir, [&] {
    return run_parse_stage(cfg.archive_dir, rules, stay, fx);
  });

  // stage 2: geo
  auto records = parsed.records;
  auto assign = stage("geo", cfg.territories_file,
                      [&] { return assign_territories(records, territories); });

  // stage 3: stats
  std::map<std::string, double> areas;
  for (const auto& t : territories.territories())
    areas[t.territory_id] = t.area_km2;
  GroupingSpec grouping;  // country + territory
  auto reports = stage("stats", "located records",
                       [&] { return build_report(records, grouping, &areas); });

  // stage 4: mine
  std::vector<AccommodationRecord> located;
  for (const auto& r : records)
    if (r.territory_id) located.push_back(r);
  IdentityTranslator translator;
  MineOptions mopts;
  mopts.fraction = cfg.sample_fraction;
  mopts.seed = cfg.seed;
  mopts.top_comments = cfg.top_comments;
  mopts.min_corr = cfg.min_corr;
  mopts.assoc_targets = cfg.assoc_targets;
  auto mine = stage("mine", "reviews", [&] {
    return run_mining(located, parsed.reviews, lexicon, stoplist, translator,
                      mopts);
  });

  // materialize outputs in a temp dir, rename into place on success
  fs::path final_dir(cfg.output_dir);
  fs::path tmp_dir(cfg.output_dir + ".tmp");
  std::error_code ec;
  fs::remove_all(tmp_dir, ec);
  fs::create_directories(tmp_dir);

  try {
    write_records_ndjson((tmp_dir / "parsed.ndjson").string(), parsed.records,
                         false);
    write_records_ndjson((tmp_dir / "located.ndjson").string(), records, true);
    write_reviews_ndjson((tmp_dir / "reviews.ndjson").string(),
                         parsed.reviews);
    {
      std::ostringstream os;
      render_report_csv(reports, os);
      pipeline_detail::write_text(tmp_dir / "report.csv", os.str());
    }
    pipeline_detail::write_text(tmp_dir / "report.json",
                                report_to_json(reports).dump(2) + "\n");
    pipeline_detail::write_text(tmp_dir / "sentiment.csv", mine.sentiment_csv);
    pipeline_detail::write_text(tmp_dir / "frequencies.csv",
                                mine.frequencies_csv);
    pipeline_detail::write_text(tmp_dir / "associations.csv",
                                mine.associations_csv);
    {
      std::ostringstream os;
      CsvWriter w(os);
      w.row({"territory_id", "metric", "value", "coverage"});
      for (const auto& metric :
           {"mean.price_eur", "mean.rating_overall", "density_per_100km2"}) {
        for (const auto& row : emit_choropleth(reports, metric))
          w.row({row.territory_id, row.metric, format_fixed(row.value, 2),
                 std::to_string(row.coverage)});
      }
      pipeline_detail::write_text(tmp_dir / "choropleth.csv", os.str());
    }
    pipeline_detail::write_text(tmp_dir / "summary.txt",
                                emit_summary(reports, mine.sentiment_csv));

    // manifest
    nlohmann::ordered_json manifest;
    manifest["tool_version"] = kVersion;
    manifest["seed"] = cfg.seed;
    manifest["sample_fraction"] = cfg.sample_fraction;

    nlohmann::ordered_json inputs;
    {
      // archive digest: hash of the sorted snapshot id list (ids are
      // content hashes themselves)
      auto ids = list_snapshot_ids(cfg.archive_dir);
      std::string joined;
      for (const auto& id : ids) joined += id + "\n";
      inputs["archive"] = sha256_hex(joined);
    }
    inputs["rules"] = pipeline_detail::sha256_file(cfg.rules_file);
    inputs["territories"] = pipeline_detail::sha256_file(cfg.territories_file);
    inputs["stay"] = pipeline_detail::sha256_file(cfg.stay_file);
    inputs["fx"] = pipeline_detail::sha256_file(cfg.fx_file);
    inputs["lexicon"] = pipeline_detail::sha256_file(cfg.lexicon_file);
    nlohmann::ordered_json stop_digests = nlohmann::ordered_json::array();
    for (const auto& f : cfg.stopword_files)
      stop_digests.push_back(pipeline_detail::sha256_file(f));
    inputs["stopwords"] = stop_digests;
    manifest["inputs"] = inputs;

    long dropped = parsed.parse_failures + parsed.duplicates_dropped;
    nlohmann::ordered_json counts;
    counts["snapshots"] = parsed.snapshots;
    counts["parsed"] = parsed.snapshots;
    counts["parse_failures"] = parsed.parse_failures;
    counts["duplicates_dropped"] = parsed.duplicates_dropped;
    counts["dropped"] = dropped;
    counts["located"] = assign.located;
    counts["unassigned"] = assign.unassigned;
    counts["ambiguous"] = assign.ambiguous;
    counts["reviews_extracted"] = parsed.reviews_extracted;
    counts["reviews_kept"] = static_cast<long>(parsed.reviews.size());
    counts["reviews_dropped"] = parsed.reviews_dropped;
    counts["review_duplicates_dropped"] = parsed.review_duplicates_dropped;
    counts["documents"] = mine.documents.size();
    manifest["counts"] = counts;

    manifest["parse_errors"] = parsed.errors;
    manifest["mining"] = mine.summary;

    nlohmann::ordered_json outputs;
    for (const auto& name :
         {"parsed.ndjson", "located.ndjson", "reviews.ndjson", "report.csv",
          "report.json", "sentiment.csv", "frequencies.csv",
          "associations.csv", "choropleth.csv", "summary.txt"})
      outputs[name] = pipeline_detail::sha256_file((tmp_dir / name).string());
    manifest["outputs"] = outputs;

    pipeline_detail::write_text(tmp_dir / "run.manifest.json",
                                manifest.dump(2) + "\n");

    fs::remove_all(final_dir, ec);
    fs::rename(tmp_dir, final_dir);

    RunResult res;
    res.manifest = std::move(manifest);
    res.output_dir = final_dir.string();
    return res;
  } catch (...) {
    fs::remove_all(tmp_dir, ec);  // no partial outputs
    throw;
  }
}

}  // namespace tourmon
