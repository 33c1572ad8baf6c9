#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tourmon/csv.hpp"
#include "tourmon/error.hpp"
#include "tourmon/lexicon.hpp"
#include "tourmon/record.hpp"
#include "tourmon/rng.hpp"
#include "tourmon/textproc.hpp"

namespace tourmon {

// A cleaned comment ready for counting. Documents in a language the
// translator cannot handle keep their group attributes (they still count
// in the origin structure) but carry no tokens and are skipped by the
// lexicon stages.
struct SentimentDocument {
  std::string review_id;
  std::string accommodation_id;
  std::optional<std::string> territory_id;
  std::string country;
  std::string reviewer_country = "unknown";
  std::vector<std::string> tokens;
  bool lexicon_eligible = true;
  PolarityCounts polarity;  // filled once tokens are counted
};

// First k of a seeded pseudo-random permutation of the records sorted by
// accommodation_id; k rounds half up with a floor of one. Input order is
// irrelevant by construction.
inline std::vector<AccommodationRecord> sample_accommodations(
    std::vector<AccommodationRecord> records, double fraction,
    std::uint64_t seed) {
  if (!(fraction > 0.0) || fraction > 1.0)
    throw DomainError("sample fraction must be in (0,1], got " +
                      std::to_string(fraction));
  if (records.empty()) return {};
  std::sort(records.begin(), records.end(),
            [](const auto& a, const auto& b) {
              return a.accommodation_id < b.accommodation_id;
            });
  std::size_t n = records.size();
  auto k = static_cast<std::size_t>(
      std::floor(fraction * static_cast<double>(n) + 0.5));
  if (k < 1) k = 1;
  if (k > n) k = n;
  auto perm = permutation(n, seed);
  std::vector<AccommodationRecord> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(records[perm[i]]);
  return out;
}

// Top k by posted_at descending; equal dates break by review_id descending.
inline std::vector<ReviewRecord> latest_comments(
    std::vector<ReviewRecord> reviews, std::size_t k) {
  std::sort(reviews.begin(), reviews.end(),
            [](const ReviewRecord& a, const ReviewRecord& b) {
              if (a.posted_at != b.posted_at) return b.posted_at < a.posted_at;
              return b.review_id < a.review_id;
            });
  if (reviews.size() > k) reviews.resize(k);
  return reviews;
}

// ratio = sum(P) / (sum(P) + sum(N)); no polar words at all -> no value,
// explicitly distinct from 0.
struct RatioResult {
  std::optional<double> ratio;
  long polar = 0;  // sum(P) + sum(N)
};

inline RatioResult positive_ratio(
    const std::vector<const SentimentDocument*>& docs) {
  long p = 0, n = 0;
  for (const auto* d : docs) {
    if (!d->lexicon_eligible) continue;
    p += d->polarity.positive;
    n += d->polarity.negative;
  }
  RatioResult r;
  r.polar = p + n;
  if (r.polar > 0)
    r.ratio = static_cast<double>(p) / static_cast<double>(r.polar);
  return r;
}

struct TermDocumentMatrix {
  std::vector<std::string> vocabulary;          // sorted, unique
  std::vector<std::vector<std::uint8_t>> rows;  // one binary row per document
  std::map<std::string, std::size_t> index;

  std::size_t docs() const { return rows.size(); }
  std::size_t words() const { return vocabulary.size(); }
};

inline TermDocumentMatrix build_tdm(
    const std::vector<SentimentDocument>& docs) {
  TermDocumentMatrix tdm;
  std::set<std::string> vocab;
  for (const auto& d : docs)
    for (const auto& t : d.tokens) vocab.insert(t);
  tdm.vocabulary.assign(vocab.begin(), vocab.end());
  for (std::size_t i = 0; i < tdm.vocabulary.size(); ++i)
    tdm.index[tdm.vocabulary[i]] = i;
  tdm.rows.reserve(docs.size());
  for (const auto& d : docs) {
    std::vector<std::uint8_t> row(tdm.vocabulary.size(), 0);
    for (const auto& t : d.tokens) row[tdm.index.at(t)] = 1;
    tdm.rows.push_back(std::move(row));
  }
  return tdm;
}

namespace sentiment_detail {

inline long column_count(const TermDocumentMatrix& tdm, std::size_t col) {
  long c = 0;
  for (const auto& row : tdm.rows) c += row[col];
  return c;
}

}  // namespace sentiment_detail

// Phi coefficient of two binary presence columns — algebraically the
// Pearson correlation of the 0/1 vectors. nullopt when either column has
// zero variance (all ones or all zeros).
inline std::optional<double> correlation_pair(const TermDocumentMatrix& tdm,
                                              const std::string& a,
                                              const std::string& b) {
  auto ia = tdm.index.find(a);
  auto ib = tdm.index.find(b);
  if (ia == tdm.index.end() || ib == tdm.index.end())
    throw DomainError("word not in vocabulary");
  long d = static_cast<long>(tdm.docs());
  long n1 = sentiment_detail::column_count(tdm, ia->second);
  long c1 = sentiment_detail::column_count(tdm, ib->second);
  if (n1 == 0 || n1 == d || c1 == 0 || c1 == d) return std::nullopt;
  long n11 = 0;
  for (const auto& row : tdm.rows)
    if (row[ia->second] && row[ib->second]) ++n11;
  long n10 = n1 - n11;
  long n01 = c1 - n11;
  long n00 = d - n1 - c1 + n11;
  double num = static_cast<double>(n11) * static_cast<double>(n00) -
               static_cast<double>(n10) * static_cast<double>(n01);
  double denom = std::sqrt(static_cast<double>(n1) * static_cast<double>(d - n1)) *
                 std::sqrt(static_cast<double>(c1) * static_cast<double>(d - c1));
  return num / denom;
}

struct CorrelationResult {
  std::vector<std::pair<std::string, double>> associations;  // r >= min_corr
  std::vector<std::string> skipped_zero_variance;            // sorted
};

// Associations of `word` with every other vocabulary word, filtered by
// min_corr, ordered by r descending then word ascending. A zero-variance
// target is an error; zero-variance partners are skipped but reported.
inline CorrelationResult word_correlation(const TermDocumentMatrix& tdm,
                                          const std::string& word,
                                          double min_corr) {
  auto it = tdm.index.find(word);
  if (it == tdm.index.end())
    throw DomainError("word not in vocabulary: " + word);
  long d = static_cast<long>(tdm.docs());
  long n1 = sentiment_detail::column_count(tdm, it->second);
  if (n1 == 0 || n1 == d)
    throw DomainError("correlation undefined: '" + word +
                      "' has zero variance");
  CorrelationResult res;
  for (const auto& other : tdm.vocabulary) {
    if (other == word) continue;
    auto r = correlation_pair(tdm, word, other);
    if (!r) {
      res.skipped_zero_variance.push_back(other);
      continue;
    }
    if (*r >= min_corr) res.associations.emplace_back(other, *r);
  }
  std::sort(res.associations.begin(), res.associations.end(),
            [](const auto& a, const auto& b) {
              if (a.second != b.second) return a.second > b.second;
              return a.first < b.first;
            });
  return res;
}

// Token multiplicities, ordered by (count desc, word asc).
inline std::vector<std::pair<std::string, long>> frequency_table(
    const std::vector<const SentimentDocument*>& docs) {
  std::map<std::string, long> counts;
  for (const auto* d : docs) {
    if (!d->lexicon_eligible) continue;
    for (const auto& t : d->tokens) ++counts[t];
  }
  std::vector<std::pair<std::string, long>> out(counts.begin(), counts.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return out;
}

// Share of documents per reviewer country; includes documents whose
// language kept them out of the lexicon stages.
inline std::map<std::string, double> origin_structure(
    const std::vector<const SentimentDocument*>& docs) {
  std::map<std::string, long> counts;
  for (const auto* d : docs) {
    std::string cc = d->reviewer_country.empty() ? "unknown"
                                                 : d->reviewer_country;
    ++counts[cc];
  }
  std::map<std::string, double> shares;
  if (docs.empty()) return shares;
  for (const auto& [cc, c] : counts)
    shares[cc] = static_cast<double>(c) / static_cast<double>(docs.size());
  return shares;
}

// --- Mining driver -----------------------------------------------------------

struct MineOptions {
  double fraction = 0.10;
  std::uint64_t seed = 42;
  std::size_t top_comments = 10;
  double min_corr = 0.25;
  std::size_t assoc_targets = 10;  // top-N frequent words seed associations
};

struct MineOutput {
  std::vector<SentimentDocument> documents;  // deterministic order
  TermDocumentMatrix tdm;                    // over lexicon-eligible docs
  long sampled = 0;
  std::map<std::string, long> sampled_by_territory;
  long language_excluded = 0;
  long translator_failures = 0;
  std::vector<std::string> assoc_target_words;
  std::vector<std::string> zero_variance_skipped;  // targets and partners
  std::string sentiment_csv;
  std::string frequencies_csv;
  std::string associations_csv;
  nlohmann::ordered_json summary;
};

namespace sentiment_detail {

inline std::string ratio_cell(const RatioResult& r) {
  return r.ratio ? format_fixed(*r.ratio, 4) : std::string("no-signal");
}

inline void emit_group_rows(CsvWriter& w, const std::string& group,
                            const std::vector<const SentimentDocument*>& docs,
                            bool with_origin) {
  w.row({group, "documents", std::to_string(docs.size()),
         std::to_string(docs.size())});
  auto r = positive_ratio(docs);
  w.row({group, "positive_ratio", ratio_cell(r), std::to_string(r.polar)});
  if (with_origin)
    for (const auto& [cc, share] : origin_structure(docs))
      w.row({group, "share.origin." + cc, format_fixed(share, 4),
             std::to_string(docs.size())});
}

}  // namespace sentiment_detail

// Samples per territory with the one configured seed, takes each sampled
// accommodation's most recent comments, cleans them, counts polarity, and
// renders the group tables. Only located records participate.
inline MineOutput run_mining(const std::vector<AccommodationRecord>& records,
                             const std::vector<ReviewRecord>& reviews,
                             const SentimentLexicon& lexicon,
                             const StopList& stoplist, Translator& translator,
                             const MineOptions& options) {
  if (!(options.fraction > 0.0) || options.fraction > 1.0)
    throw ConfigError("sample fraction must be in (0,1]");
  MineOutput out;

  std::map<std::string, std::vector<AccommodationRecord>> by_territory;
  for (const auto& r : records)
    if (r.territory_id) by_territory[*r.territory_id].push_back(r);

  std::map<std::string, std::vector<ReviewRecord>> reviews_by_acc;
  for (const auto& rev : reviews)
    reviews_by_acc[rev.accommodation_id].push_back(rev);

  for (const auto& [tid, recs] : by_territory) {
    auto sampled = sample_accommodations(recs, options.fraction, options.seed);
    out.sampled_by_territory[tid] = static_cast<long>(sampled.size());
    out.sampled += static_cast<long>(sampled.size());
    std::sort(sampled.begin(), sampled.end(),
              [](const auto& a, const auto& b) {
                return a.accommodation_id < b.accommodation_id;
              });
    for (const auto& acc : sampled) {
      auto it = reviews_by_acc.find(acc.accommodation_id);
      if (it == reviews_by_acc.end()) continue;
      for (const auto& rev :
           latest_comments(it->second, options.top_comments)) {
        SentimentDocument doc;
        doc.review_id = rev.review_id;
        doc.accommodation_id = rev.accommodation_id;
        doc.territory_id = tid;
        doc.country = acc.country;
        doc.reviewer_country =
            rev.reviewer_country.empty() ? "unknown" : rev.reviewer_country;
        std::string lang = rev.language.value_or("");
        if (!translator.supports(lang)) {
          doc.lexicon_eligible = false;
          ++out.language_excluded;
        } else {
          try {
            doc.tokens = clean_tokenize(rev.text, stoplist, translator, lang);
          } catch (const std::exception&) {
            ++out.translator_failures;
            continue;  // dropped entirely, counted
          }
          doc.polarity = polarity_counts(doc.tokens, lexicon);
        }
        out.documents.push_back(std::move(doc));
      }
    }
  }

  std::vector<SentimentDocument> eligible;
  for (const auto& d : out.documents)
    if (d.lexicon_eligible) eligible.push_back(d);
  out.tdm = build_tdm(eligible);

  // group views
  auto all_docs = [&] {
    std::vector<const SentimentDocument*> v;
    for (const auto& d : out.documents) v.push_back(&d);
    return v;
  }();
  std::map<std::string, std::vector<const SentimentDocument*>> per_territory;
  std::map<std::string, std::vector<const SentimentDocument*>> per_origin;
  std::map<std::pair<std::string, std::string>,
           std::vector<const SentimentDocument*>>
      per_territory_origin;
  for (const auto& d : out.documents) {
    std::string tid = d.territory_id.value_or("");
    per_territory[tid].push_back(&d);
    per_origin[d.reviewer_country].push_back(&d);
    per_territory_origin[{tid, d.reviewer_country}].push_back(&d);
  }

  {
    std::ostringstream os;
    CsvWriter w(os);
    w.row({"group", "metric", "value", "coverage"});
    sentiment_detail::emit_group_rows(w, "all", all_docs, true);
    for (const auto& [cc, docs] : per_origin)
      sentiment_detail::emit_group_rows(w, "all|" + cc, docs, false);
    for (const auto& [tid, docs] : per_territory)
      sentiment_detail::emit_group_rows(w, tid, docs, true);
    for (const auto& [key, docs] : per_territory_origin)
      sentiment_detail::emit_group_rows(w, key.first + "|" + key.second, docs,
                                        false);
    out.sentiment_csv = os.str();
  }

  {
    std::ostringstream os;
    CsvWriter w(os);
    w.row({"group", "word", "count"});
    for (const auto& [word, count] : frequency_table(all_docs))
      w.row({"all", word, std::to_string(count)});
    for (const auto& [tid, docs] : per_territory)
      for (const auto& [word, count] : frequency_table(docs))
        w.row({tid, word, std::to_string(count)});
    out.frequencies_csv = os.str();
  }

  {
    std::set<std::string> skipped;
    auto overall = frequency_table(all_docs);
    long d = static_cast<long>(out.tdm.docs());
    for (const auto& [word, count] : overall) {
      if (out.assoc_target_words.size() >= options.assoc_targets) break;
      long col = out.tdm.index.count(word)
                     ? sentiment_detail::column_count(out.tdm,
                                                      out.tdm.index.at(word))
                     : 0;
      if (col == 0 || col == d) {
        skipped.insert(word);  // zero variance target, reported not fatal
        continue;
      }
      out.assoc_target_words.push_back(word);
    }
    std::ostringstream os;
    CsvWriter w(os);
    w.row({"word", "associated_word", "r"});
    for (const auto& target : out.assoc_target_words) {
      auto res = word_correlation(out.tdm, target, options.min_corr);
      for (const auto& [other, r] : res.associations)
        w.row({target, other, format_fixed(r, 4)});
      for (const auto& s : res.skipped_zero_variance) skipped.insert(s);
    }
    out.associations_csv = os.str();
    out.zero_variance_skipped.assign(skipped.begin(), skipped.end());
  }

  out.summary["sampled_accommodations"] = out.sampled;
  out.summary["sampled_by_territory"] = out.sampled_by_territory;
  out.summary["documents"] = out.documents.size();
  out.summary["lexicon_eligible_documents"] = eligible.size();
  out.summary["language_excluded"] = out.language_excluded;
  out.summary["translator_failures"] = out.translator_failures;
  out.summary["assoc_targets"] = out.assoc_target_words;
  out.summary["zero_variance_skipped"] = out.zero_variance_skipped;
  out.summary["seed"] = options.seed;
  out.summary["sample_fraction"] = options.fraction;
  out.summary["top_comments"] = options.top_comments;
  out.summary["min_corr"] = options.min_corr;
  // ratios count word tokens (not types); recorded so readers know
  out.summary["token_counting"] = "tokens";
  return out;
}

}  // namespace tourmon
