// monitor: turn archived accommodation pages into territorial statistics
// and review-sentiment tables.
//
// Exit codes: 0 success, 2 validation/configuration problem, 1 anything else.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tourmon/tourmon.hpp"

namespace fs = std::filesystem;
using namespace tourmon;

namespace {

std::vector<std::string> read_url_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open url list: " + path);
  std::vector<std::string> urls;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t b = line.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    std::size_t e = line.find_last_not_of(" \t");
    std::string url = line.substr(b, e - b + 1);
    if (url.empty() || url[0] == '#') continue;
    urls.push_back(url);
  }
  return urls;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << content;
  if (!out) throw IoError("short write to " + path);
}

struct FetchArgs {
  std::string urls_file;
  std::string archive;
  CrawlPolicy policy;
  bool no_robots = false;
};

int cmd_fetch(const FetchArgs& args) {
  CrawlPolicy policy = args.policy;
  policy.respect_robots = !args.no_robots;
  policy.validate();
  auto urls = read_url_list(args.urls_file);
  auto result = fetch_urls(urls, policy, args.archive);
  for (const auto& err : result.errors) std::cerr << err << "\n";
  for (const auto& id : result.stored_ids) std::cout << id << "\n";
  std::cout << "fetched " << result.fetched << ", refused " << result.refused
            << ", failed " << result.failed << "\n";
  return (result.failed > 0 && result.fetched == 0 && !urls.empty()) ? 1 : 0;
}

struct ParseArgs {
  std::string archive, rules, stay, fx, out, reviews_out;
};

int cmd_parse(const ParseArgs& args) {
  auto rules = load_extraction_rules(args.rules);
  auto stay = load_stay_query(args.stay);
  auto fx = CurrencyTable::load_csv(args.fx);
  auto result = run_parse_stage(args.archive, rules, stay, fx);
  write_records_ndjson(args.out, result.records, false);
  if (!args.reviews_out.empty())
    write_reviews_ndjson(args.reviews_out, result.reviews);
  for (const auto& err : result.errors) std::cerr << err << "\n";
  std::cout << "snapshots " << result.snapshots << ", records "
            << result.records.size() << ", parse failures "
            << result.parse_failures << ", duplicates dropped "
            << result.duplicates_dropped << ", reviews "
            << result.reviews.size() << " (dropped " << result.reviews_dropped
            << ")\n";
  return 0;
}

struct GeoArgs {
  std::string in, territories, out;
};

int cmd_geo_assign(const GeoArgs& args) {
  auto records = read_records_ndjson(args.in);
  auto index = load_territories(args.territories);
  auto stats = assign_territories(records, index);
  write_records_ndjson(args.out, records, true);
  std::cout << "located " << stats.located << ", unassigned "
            << stats.unassigned << ", ambiguous " << stats.ambiguous << "\n";
  return 0;
}

struct StatsArgs {
  std::string in;
  std::string group_by = "country,territory";
  std::string out;
  std::string json_out;
  std::string territories;  // optional, enables density rows
};

int cmd_stats(const StatsArgs& args) {
  auto records = read_records_ndjson(args.in);
  auto grouping = parse_grouping(args.group_by);
  std::map<std::string, double> areas;
  const std::map<std::string, double>* areas_ptr = nullptr;
  if (!args.territories.empty()) {
    auto index = load_territories(args.territories);
    for (const auto& t : index.territories()) areas[t.territory_id] = t.area_km2;
    areas_ptr = &areas;
  }
  auto reports = build_report(records, grouping, areas_ptr);
  {
    std::ostringstream os;
    render_report_csv(reports, os);
    write_file(args.out, os.str());
  }
  if (!args.json_out.empty())
    write_file(args.json_out, report_to_json(reports).dump(2) + "\n");
  std::cout << "groups " << reports.size() << "\n";
  return 0;
}

struct MineArgs {
  std::string records, reviews, lexicon, stopwords;
  std::vector<std::string> extra_stopwords;
  std::string out_dir = ".";
  MineOptions options;
};

int cmd_mine(const MineArgs& args) {
  auto records = read_records_ndjson(args.records);
  auto reviews = read_reviews_ndjson(args.reviews);
  auto lexicon = SentimentLexicon::load(args.lexicon);
  auto stoplist = StopList::load(args.stopwords, args.extra_stopwords);
  IdentityTranslator translator;
  auto result =
      run_mining(records, reviews, lexicon, stoplist, translator, args.options);
  fs::create_directories(args.out_dir);
  fs::path dir(args.out_dir);
  write_file((dir / "sentiment.csv").string(), result.sentiment_csv);
  write_file((dir / "frequencies.csv").string(), result.frequencies_csv);
  write_file((dir / "associations.csv").string(), result.associations_csv);
  write_file((dir / "mining.json").string(), result.summary.dump(2) + "\n");
  std::cout << "sampled " << result.sampled << ", documents "
            << result.documents.size() << ", language excluded "
            << result.language_excluded << "\n";
  return 0;
}

struct ReportArgs {
  std::string report_json, sentiment_csv;
  std::string summary_out, choropleth_out;
  std::vector<std::string> metrics = {"mean.price_eur", "mean.rating_overall",
                                      "density_per_100km2"};
  std::size_t top_n = 5;
};

int cmd_report(const ReportArgs& args) {
  std::ifstream in(args.report_json);
  if (!in) throw IoError("cannot open report: " + args.report_json);
  nlohmann::json j;
  in >> j;
  auto reports = report_from_json(j);
  std::string sentiment;
  if (!args.sentiment_csv.empty()) {
    std::ifstream sin(args.sentiment_csv);
    if (!sin) throw IoError("cannot open sentiment table: " + args.sentiment_csv);
    std::stringstream ss;
    ss << sin.rdbuf();
    sentiment = ss.str();
  }
  std::string summary = emit_summary(reports, sentiment, args.top_n);
  if (args.summary_out.empty())
    std::cout << summary;
  else
    write_file(args.summary_out, summary);
  if (!args.choropleth_out.empty()) {
    std::ostringstream os;
    CsvWriter w(os);
    w.row({"territory_id", "metric", "value", "coverage"});
    for (const auto& metric : args.metrics)
      for (const auto& row : emit_choropleth(reports, metric))
        w.row({row.territory_id, row.metric, format_fixed(row.value, 2),
               std::to_string(row.coverage)});
    write_file(args.choropleth_out, os.str());
  }
  return 0;
}

int cmd_run(const std::string& config_path) {
  auto cfg = load_pipeline_config(config_path);
  auto result = run_pipeline(cfg);
  const auto& counts = result.manifest.at("counts");
  std::cout << "outputs: " << result.output_dir << "\n"
            << "parsed " << counts.at("parsed").get<long>() << ", located "
            << counts.at("located").get<long>() << ", unassigned "
            << counts.at("unassigned").get<long>() << ", dropped "
            << counts.at("dropped").get<long>() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"accommodation-platform monitoring toolkit"};
  app.require_subcommand(1);

  FetchArgs fetch_args;
  auto* fetch = app.add_subcommand("fetch", "fetch URLs into the archive");
  fetch->add_option("--urls", fetch_args.urls_file, "file with one URL per line")
      ->required();
  fetch->add_option("--archive", fetch_args.archive, "archive directory")
      ->required();
  fetch->add_option("--min-interval-ms", fetch_args.policy.min_interval_ms,
                    "per-host spacing in milliseconds");
  fetch->add_option("--max-retries", fetch_args.policy.max_retries,
                    "retries after the first attempt");
  fetch->add_option("--backoff", fetch_args.policy.backoff_factor,
                    "geometric backoff factor");
  fetch->add_option("--user-agent", fetch_args.policy.user_agent, "user agent");
  fetch->add_flag("--no-robots", fetch_args.no_robots,
                  "ignore robots.txt (testing only)");

  ParseArgs parse_args;
  auto* parse = app.add_subcommand("parse", "extract records from snapshots");
  parse->add_option("--archive", parse_args.archive, "archive directory")
      ->required();
  parse->add_option("--rules", parse_args.rules, "extraction rules JSON")
      ->required();
  parse->add_option("--stay", parse_args.stay, "stay query JSON")->required();
  parse->add_option("--fx", parse_args.fx, "currency rates CSV")->required();
  parse->add_option("--out", parse_args.out, "records NDJSON output")
      ->required();
  parse->add_option("--reviews-out", parse_args.reviews_out,
                    "reviews NDJSON output");

  GeoArgs geo_args;
  auto* geo = app.add_subcommand("geo", "geography operations");
  geo->require_subcommand(1);
  auto* assign = geo->add_subcommand("assign", "assign territories to records");
  assign->add_option("--in", geo_args.in, "records NDJSON")->required();
  assign->add_option("--territories", geo_args.territories,
                     "territory GeoJSON")
      ->required();
  assign->add_option("--out", geo_args.out, "located NDJSON output")
      ->required();

  StatsArgs stats_args;
  auto* stats = app.add_subcommand("stats", "territorial aggregates");
  stats->add_option("--in", stats_args.in, "located records NDJSON")
      ->required();
  stats->add_option("--group-by", stats_args.group_by,
                    "dimensions: country[,territory][,star]");
  stats->add_option("--out", stats_args.out, "report CSV output")->required();
  stats->add_option("--json", stats_args.json_out, "JSON mirror output");
  stats->add_option("--territories", stats_args.territories,
                    "territory GeoJSON (enables density rows)");

  MineArgs mine_args;
  auto* mine = app.add_subcommand("mine", "review sentiment mining");
  mine->add_option("--records", mine_args.records, "located records NDJSON")
      ->required();
  mine->add_option("--reviews", mine_args.reviews, "reviews NDJSON")
      ->required();
  mine->add_option("--lexicon", mine_args.lexicon, "polarity lexicon CSV")
      ->required();
  mine->add_option("--stopwords", mine_args.stopwords, "stopword list")
      ->required();
  mine->add_option("--extra-stopwords", mine_args.extra_stopwords,
                   "extra stopword lists");
  mine->add_option("--sample", mine_args.options.fraction,
                   "sample fraction (0,1]");
  mine->add_option("--seed", mine_args.options.seed, "sampling seed");
  mine->add_option("--top-comments", mine_args.options.top_comments,
                   "most recent comments per accommodation");
  mine->add_option("--min-corr", mine_args.options.min_corr,
                   "association threshold");
  mine->add_option("--assoc-targets", mine_args.options.assoc_targets,
                   "how many frequent words seed the association table");
  mine->add_option("--out-dir", mine_args.out_dir, "output directory");

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "summary and choropleth tables");
  report->add_option("--report", report_args.report_json, "report JSON input")
      ->required();
  report->add_option("--sentiment", report_args.sentiment_csv,
                     "sentiment CSV input");
  report->add_option("--summary-out", report_args.summary_out,
                     "summary text output (stdout if omitted)");
  report->add_option("--choropleth-out", report_args.choropleth_out,
                     "choropleth CSV output");
  report->add_option("--metric", report_args.metrics, "choropleth metrics");
  report->add_option("--top", report_args.top_n, "entries per ranking");

  std::string config_path;
  auto* run = app.add_subcommand("run", "full pipeline from a config file");
  run->add_option("--config", config_path, "pipeline TOML config")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (fetch->parsed()) return cmd_fetch(fetch_args);
    if (parse->parsed()) return cmd_parse(parse_args);
    if (geo->parsed()) return cmd_geo_assign(geo_args);
    if (stats->parsed()) return cmd_stats(stats_args);
    if (mine->parsed()) return cmd_mine(mine_args);
    if (report->parsed()) return cmd_report(report_args);
    if (run->parsed()) return cmd_run(config_path);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
