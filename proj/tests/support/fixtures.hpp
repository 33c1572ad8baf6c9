#pragma once

// Shared fixture builders: synthetic listing pages, a 60-snapshot archive
// with known counts, random record generators, and pipeline config helpers.

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tourmon/tourmon.hpp"

#ifndef TEST_DATA_DIR
#error "TEST_DATA_DIR must be defined by the build"
#endif

namespace fixtures {

inline std::string data_dir() { return TEST_DATA_DIR; }

inline std::string data_file(const std::string& name) {
  return (std::filesystem::path(data_dir()) / name).string();
}

// Fresh unique directory under the system temp root.
inline std::filesystem::path temp_dir(const std::string& tag) {
  static std::atomic<unsigned> counter{0};
  auto base = std::filesystem::temp_directory_path() /
              ("tourmon-test-" + tag + "-" + std::to_string(::getpid()) + "-" +
               std::to_string(counter++));
  std::filesystem::remove_all(base);
  std::filesystem::create_directories(base);
  return base;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("fixture: cannot open " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// --- Listing page generator ---------------------------------------------------

struct ReviewSpec {
  std::string id;
  std::string date;  // as printed on the page (may be malformed on purpose)
  std::string score; // french-formatted, empty = omit
  std::string country;  // empty = omit the node
  std::string lang;     // empty = omit the node
  std::string text;
};

struct ListingSpec {
  std::string id;
  std::string name;  // raw; '&' must already be entity-encoded by caller
  std::string country = "MA";
  std::string unit_label = "Chambre";  // empty = omit node
  int stars = 0;                       // 0 = unclassified (no node)
  std::string price;                   // french format, empty = omit
  std::string currency = "MAD";
  std::string tax;          // empty = omit
  bool charges_note = false;  // mutually exclusive with tax
  double lat = 31.0;
  double lon = -8.0;
  std::string rating;  // empty = omit
  std::map<std::string, std::string> themes;  // css suffix -> value
  long review_count = -1;  // -1 = omit node
  std::string neighborhood;  // extra pass-through, empty = omit
  std::vector<ReviewSpec> reviews;
};

inline std::string listing_page(const ListingSpec& s) {
  std::ostringstream os;
  os << "<!doctype html>\n<html>\n<head>\n"
     << "  <title>" << s.name << "</title>\n"
     << "  <meta name=\"listing-id\" content=\"" << s.id << "\">\n"
     << "</head>\n<body>\n"
     << "<div class=\"page\">\n"
     << "  <h1 class=\"hotel-name\">  " << s.name << "\n  </h1>\n"
     << "  <span id=\"country-code\">" << s.country << "</span>\n";
  if (!s.unit_label.empty())
    os << "  <div class=\"unit-type\">" << s.unit_label << "</div>\n";
  if (s.stars > 0)
    os << "  <span class=\"stars\" data-stars=\"" << s.stars << "\">stars</span>\n";
  if (!s.price.empty())
    os << "  <div class=\"price\" data-currency=\"" << s.currency << "\">"
       << s.price << "&nbsp;" << s.currency << "</div>\n";
  if (!s.tax.empty())
    os << "  <div class=\"tax\">" << s.tax << " " << s.currency << "</div>\n";
  if (s.charges_note)
    os << "  <div class=\"charges-note\">des frais supplémentaires peuvent "
          "s'appliquer</div>\n";
  os << "  <div id=\"map\" data-lat=\"" << s.lat << "\" data-lon=\"" << s.lon
     << "\"></div>\n";
  if (!s.rating.empty())
    os << "  <span class=\"rating-overall\">" << s.rating << "</span>\n";
  if (!s.themes.empty()) {
    os << "  <ul class=\"themes\">\n";
    for (const auto& [suffix, value] : s.themes)
      os << "    <li class=\"theme-" << suffix << "\">" << value << "</li>\n";
    os << "  </ul>\n";
  }
  if (s.review_count >= 0)
    os << "  <span class=\"review-count\">" << s.review_count << "</span>\n";
  if (!s.neighborhood.empty())
    os << "  <span class=\"neighborhood\">" << s.neighborhood << "</span>\n";
  os << "  <section id=\"reviews\">\n";
  for (const auto& r : s.reviews) {
    os << "    <div class=\"review\">\n"
       << "      <span class=\"rid\">" << r.id << "</span>\n"
       << "      <span class=\"rdate\">" << r.date << "</span>\n";
    if (!r.score.empty())
      os << "      <span class=\"rscore\">" << r.score << "</span>\n";
    if (!r.country.empty())
      os << "      <span class=\"rcountry\">" << r.country << "</span>\n";
    if (!r.lang.empty())
      os << "      <span class=\"rlang\">" << r.lang << "</span>\n";
    os << "      <p class=\"rtext\">" << r.text << "</p>\n"
       << "    </div>\n";
  }
  os << "  </section>\n</div>\n</body>\n</html>\n";
  return os.str();
}

// --- 60-snapshot archive fixture -----------------------------------------------

struct ArchiveExpectations {
  long snapshots = 0;
  long located = 0;
  long unassigned = 0;
  long reviews_valid = 0;    // parseable reviews embedded
  long reviews_malformed = 0;
  std::map<std::string, long> per_territory;
  std::vector<std::string> snapshot_ids;
};

namespace archive_detail {

struct TerritoryPlan {
  std::string tid;
  std::string country;
  double lat, lon;  // center
  int count;
};

inline const std::vector<TerritoryPlan>& plans() {
  static const std::vector<TerritoryPlan> p = {
      {"MA-MS", "MA", 31.0, -8.5, 20}, {"MA-CS", "MA", 33.2, -7.8, 10},
      {"MA-TT", "MA", 35.2, -5.8, 5},  {"TN-TU", "TN", 36.8, 10.0, 10},
      {"TN-SO", "TN", 35.8, 10.4, 8},  {"TN-SF", "TN", 34.4, 10.4, 5},
  };
  return p;
}

inline const std::vector<std::string>& review_texts() {
  static const std::vector<std::string> texts = {
      "Très belle piscine, le personnel était adorable.",
      "Personnel accueillant et quartier calme, séjour parfait.",
      "Appartement spacieux, terrasse magnifique, accueil sympathique.",
      "Cuisine excellente, plage propre, emplacement idéal.",
      "Piscine sale et personnel désagréable, très déçu.",
      "Quartier bruyant, literie vétuste, accueil froid.",
      "Tout était horrible, mauvais rapport qualité-prix.",
      "Belle terrasse mais piscine minuscule.",
      "Médina charmante, riad confortable, jardin superbe.",
      "Emplacement excellent mais quartier bruyant la nuit.",
  };
  return texts;
}

inline const std::vector<std::string>& review_dates() {
  static const std::vector<std::string> dates = {
      "2019-06-02", "2019-07-15", "2019-08-20", "2019-09-05", "2019-10-11",
      "2019-11-23", "2019-12-08", "2020-01-04", "2020-01-15", "2020-01-15",
      "2020-01-22", "2020-01-28", "2019-05-14", "2019-04-30", "2019-03-17",
      "2019-02-09", "2020-02-01", "2019-06-29", "2019-09-30", "2019-12-24",
  };
  return dates;
}

}  // namespace archive_detail

// Deterministic archive: 60 listings, 58 inside the bundled territory
// boxes and 2 outside; no duplicate accommodations; one page embeds a
// malformed review (bad date) on top of its normal ones.
inline ArchiveExpectations build_archive(const std::filesystem::path& dir) {
  using namespace archive_detail;
  ArchiveExpectations exp;
  auto base_time = tourmon::parse_rfc3339("2020-02-03T10:00:00Z");

  const std::vector<std::string> unit_labels = {
      "Chambre", "Appartement", "Suite", "Studio", "Maison de vacances",
      "Riad"};
  const std::vector<std::string> name_stems = {
      "Riad Atlas", "Hôtel Majorelle", "Résidence Yasmine", "Dar Karam",
      "Villa Sidi Bou", "Maison Bleue"};
  const std::vector<std::string> reviewer_countries = {
      "FR", "FR", "GB", "DE", "FR", "IT", "", "GB", "FR", "ES"};

  int global = 0;
  auto add_listing = [&](const std::string& tid, const std::string& country,
                         double lat, double lon, bool located) {
    int i = global++;
    ListingSpec spec;
    std::ostringstream idos;
    idos << (tid.empty() ? country + "-XX" : tid) << "-"
         << (i < 10 ? "0" : "") << i;
    spec.id = idos.str();
    spec.name = name_stems[i % name_stems.size()] + " " + std::to_string(i);
    if (i == 13) spec.name = "Riad Azur &amp; Spa 13";
    spec.country = country;
    spec.unit_label = unit_labels[i % unit_labels.size()];
    spec.stars = (i % 3 == 0) ? 0 : 1 + (i * 2) % 5;
    bool has_price = (i % 7 != 3);
    if (has_price) {
      if (country == "MA") {
        spec.currency = "MAD";
        long whole = 3000 + i * 500;
        spec.price = std::to_string(whole / 1000) + " " +
                     std::to_string(whole % 1000 / 100) +
                     std::to_string(whole % 100 / 10) +
                     std::to_string(whole % 10) + ",00";
      } else {
        spec.currency = "TND";
        spec.price = std::to_string(800 + i * 150) + ",50";
      }
    }
    int tax_mode = i % 5;
    if (tax_mode == 4) {
      spec.charges_note = true;
    } else if (tax_mode <= 2 && has_price) {
      spec.tax = std::to_string(country == "MA" ? 150 + 10 * i : 40 + 5 * i) +
                 ",00";
    }
    spec.lat = lat;
    spec.lon = lon;
    if (i % 9 != 7) {
      int tenths = 60 + (i * 7) % 39;  // 6.0 .. 9.8
      spec.rating = std::to_string(tenths / 10) + "," +
                    std::to_string(tenths % 10);
    }
    const std::vector<std::string> theme_suffixes = {
        "staff", "cleanliness", "comfort", "facilities",
        "breakfast", "wifi", "value", "location"};
    std::size_t n_themes = (i % 2 == 0) ? theme_suffixes.size() : 3 + i % 4;
    for (std::size_t t = 0; t < n_themes; ++t) {
      int tenths = 55 + (i * 5 + static_cast<int>(t) * 9) % 44;
      spec.themes[theme_suffixes[t]] =
          std::to_string(tenths / 10) + "," + std::to_string(tenths % 10);
    }
    if (i == 21) spec.neighborhood = "Médina";

    int nr = 3 + (i % 9);
    for (int j = 0; j < nr; ++j) {
      ReviewSpec r;
      r.id = spec.id + "-r" + std::to_string(j);
      r.date = review_dates()[(i + j * 3) % review_dates().size()];
      int tenths = 40 + (i * 3 + j * 11) % 60;
      r.score = std::to_string(tenths / 10) + "," + std::to_string(tenths % 10);
      r.country = reviewer_countries[(i + j) % reviewer_countries.size()];
      if ((i * 10 + j) % 12 == 5) {
        r.lang = "de";
        r.text = "Sehr schönes Hotel, freundliches Personal.";
      } else if ((i * 10 + j) % 12 == 9) {
        r.lang = "en";
        r.text = "Great location, friendly staff.";
      } else {
        r.lang = "fr";
        r.text = review_texts()[(i + j) % review_texts().size()];
      }
      spec.reviews.push_back(std::move(r));
      ++exp.reviews_valid;
    }
    if (i == 17) {  // one malformed review on top of the normal ones
      ReviewSpec bad;
      bad.id = spec.id + "-rbad";
      bad.date = "15/01/2020";
      bad.lang = "fr";
      bad.text = "Très belle piscine.";
      spec.reviews.push_back(std::move(bad));
      ++exp.reviews_malformed;
    }
    spec.review_count = nr + (i % 3);

    auto snap = tourmon::RawSnapshot::make(
        "http://snapshots.example/listing/" + spec.id,
        tourmon::Timestamp{base_time.seconds + i * 60}, 200,
        listing_page(spec), "text/html");
    exp.snapshot_ids.push_back(tourmon::store_snapshot(snap, dir));
    ++exp.snapshots;
    if (located) {
      ++exp.located;
      ++exp.per_territory[tid];
    } else {
      ++exp.unassigned;
    }
  };

  for (const auto& plan : plans())
    for (int k = 0; k < plan.count; ++k)
      add_listing(plan.tid, plan.country, plan.lat + (k % 5) * 0.05,
                  plan.lon + (k / 5) * 0.05, true);
  add_listing("", "MA", 20.0, 0.0, false);
  add_listing("", "TN", 50.0, 50.0, false);
  return exp;
}

// --- Random record generator (oracle fixtures) ---------------------------------

// n records over 2 countries x 6 territories each, fully deterministic in
// the seed. All values pass record validation.
inline std::vector<tourmon::AccommodationRecord> random_records(
    std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto pick = [&](std::uint64_t k) { return tourmon::uniform_below(rng, k); };
  const std::vector<tourmon::UnitType> types = {
      tourmon::UnitType::room,         tourmon::UnitType::apartment,
      tourmon::UnitType::suite,        tourmon::UnitType::studio,
      tourmon::UnitType::holiday_home, tourmon::UnitType::other};
  std::vector<tourmon::AccommodationRecord> records;
  records.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    tourmon::AccommodationRecord r;
    std::string country = pick(2) == 0 ? "AA" : "BB";
    std::ostringstream id;
    id << country << "-" << i;
    r.accommodation_id = id.str();
    r.name = "Listing " + std::to_string(i);
    r.country = country;
    r.unit_type = types[pick(types.size())];
    if (pick(100) >= 30) r.star_class = static_cast<int>(1 + pick(5));
    if (pick(100) < 85)
      r.price_eur = static_cast<double>(2000 + pick(200000)) / 100.0;
    std::uint64_t tax_roll = pick(100);
    if (tax_roll < 10)
      r.tax_unknown = true;
    else if (tax_roll < 70)
      r.tax_eur = static_cast<double>(100 + pick(15000)) / 100.0;
    r.latitude = static_cast<double>(pick(1200)) / 100.0 - 3.0;
    r.longitude = static_cast<double>(pick(1200)) / 100.0 - 3.0;
    if (pick(100) < 80)
      r.rating_overall = static_cast<double>(10 + pick(91)) / 10.0;
    for (auto theme : tourmon::kRatingThemes)
      if (pick(100) < 70)
        r.rating_themes[std::string(theme)] =
            static_cast<double>(10 + pick(91)) / 10.0;
    r.review_count = static_cast<long>(pick(800));
    r.snapshot_id = "snap-" + std::to_string(i);
    r.territory_id = country + "-T" + std::to_string(1 + pick(6));
    records.push_back(std::move(r));
  }
  return records;
}

// --- Pipeline config ------------------------------------------------------------

inline std::string write_pipeline_config(const std::filesystem::path& dir,
                                         const std::filesystem::path& archive,
                                         const std::filesystem::path& out_dir,
                                         std::uint64_t seed = 42) {
  std::ostringstream os;
  os << "# pipeline fixture\n"
     << "[inputs]\n"
     << "archive = \"" << archive.string() << "\"\n"
     << "rules = \"" << data_file("rules.json") << "\"\n"
     << "territories = \"" << data_file("territories.geojson") << "\"\n"
     << "stay = \"" << data_file("stay.json") << "\"\n"
     << "fx = \"" << data_file("fx.csv") << "\"\n"
     << "lexicon = \"" << data_file("feel_sample.csv") << "\"\n"
     << "stopwords = [\"" << data_file("stopwords_fr.txt") << "\", \""
     << data_file("stopwords_extra.txt") << "\"]\n"
     << "\n[run]\n"
     << "sample_fraction = 0.10\n"
     << "seed = " << seed << "\n"
     << "top_comments = 10\n"
     << "min_corr = 0.25\n"
     << "output_dir = \"" << out_dir.string() << "\"\n"
     << "format = \"csv\"\n";
  auto path = dir / "pipeline.toml";
  std::ofstream f(path, std::ios::binary);
  f << os.str();
  f.close();
  return path.string();
}

}  // namespace fixtures
