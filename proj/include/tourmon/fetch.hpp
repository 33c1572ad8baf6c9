#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>

#include "tourmon/error.hpp"
#include "tourmon/snapshot.hpp"

namespace tourmon {

struct CrawlPolicy {
  int min_interval_ms = 1000;   // per-host spacing between requests
  int max_retries = 2;          // additional attempts after the first
  double backoff_factor = 2.0;  // geometric, base = min_interval_ms
  bool respect_robots = true;
  std::string user_agent = "tourmon/0.1";

  void validate() const {
    if (min_interval_ms < 0) throw ConfigError("min_interval_ms must be >= 0");
    if (max_retries < 0) throw ConfigError("max_retries must be >= 0");
    if (backoff_factor < 1.0) throw ConfigError("backoff_factor must be >= 1");
  }
};

struct ParsedUrl {
  std::string scheme;
  std::string host;
  int port = 80;
  std::string target;  // path + query, starts with '/'

  std::string host_key() const { return host + ":" + std::to_string(port); }
};

inline ParsedUrl parse_url(const std::string& url) {
  ParsedUrl u;
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw ParseError("malformed url (no scheme): " + url);
  u.scheme = url.substr(0, scheme_end);
  if (u.scheme != "http" && u.scheme != "https")
    throw ParseError("unsupported scheme '" + u.scheme + "': " + url);
  std::size_t rest = scheme_end + 3;
  auto path_start = url.find('/', rest);
  std::string authority = url.substr(
      rest, path_start == std::string::npos ? std::string::npos
                                            : path_start - rest);
  if (authority.empty()) throw ParseError("malformed url (no host): " + url);
  auto colon = authority.rfind(':');
  if (colon != std::string::npos) {
    u.host = authority.substr(0, colon);
    try {
      u.port = std::stoi(authority.substr(colon + 1));
    } catch (...) {
      throw ParseError("malformed url (bad port): " + url);
    }
  } else {
    u.host = authority;
    u.port = (u.scheme == "https") ? 443 : 80;
  }
  if (u.host.empty()) throw ParseError("malformed url (no host): " + url);
  u.target = path_start == std::string::npos ? "/" : url.substr(path_start);
  return u;
}

// Prefix-match robots.txt rules (original REP semantics: longest matching
// rule wins, Allow beats Disallow on a tie; no wildcard extensions).
class RobotsRules {
 public:
  static RobotsRules parse(const std::string& text) {
    RobotsRules r;
    Group cur;
    bool in_group = false;
    bool rules_seen = false;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      auto eol = text.find('\n', pos);
      std::string line = text.substr(
          pos, eol == std::string::npos ? std::string::npos : eol - pos);
      pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
      auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      auto colon = line.find(':');
      if (colon == std::string::npos) continue;
      std::string key = trim(line.substr(0, colon));
      std::string value = trim(line.substr(colon + 1));
      std::transform(key.begin(), key.end(), key.begin(), ::tolower);
      if (key == "user-agent") {
        if (rules_seen) {
          r.groups_.push_back(cur);
          cur = Group{};
          rules_seen = false;
        }
        std::transform(value.begin(), value.end(), value.begin(), ::tolower);
        cur.agents.push_back(value);
        in_group = true;
      } else if (in_group && (key == "disallow" || key == "allow")) {
        cur.rules.push_back({key == "allow", value});
        rules_seen = true;
      }
    }
    if (in_group) r.groups_.push_back(cur);
    return r;
  }

  bool allowed(const std::string& user_agent, const std::string& path) const {
    const Group* g = match_group(user_agent);
    if (!g) return true;
    std::size_t best_len = 0;
    bool best_allow = true;  // no matching rule = allowed
    for (const auto& rule : g->rules) {
      if (rule.prefix.empty()) {
        if (!rule.allow) continue;  // "Disallow:" empty = allow everything
        continue;
      }
      if (path.compare(0, rule.prefix.size(), rule.prefix) == 0) {
        if (rule.prefix.size() > best_len ||
            (rule.prefix.size() == best_len && rule.allow)) {
          best_len = rule.prefix.size();
          best_allow = rule.allow;
        }
      }
    }
    return best_allow;
  }

 private:
  struct Rule {
    bool allow;
    std::string prefix;
  };
  struct Group {
    std::vector<std::string> agents;
    std::vector<Rule> rules;
  };

  static std::string trim(std::string s) {
    auto is_ws = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
    while (!s.empty() && is_ws(s.front())) s.erase(s.begin());
    while (!s.empty() && is_ws(s.back())) s.pop_back();
    return s;
  }

  const Group* match_group(const std::string& user_agent) const {
    std::string ua = user_agent;
    std::transform(ua.begin(), ua.end(), ua.begin(), ::tolower);
    const Group* best = nullptr;
    std::size_t best_len = 0;
    const Group* wildcard = nullptr;
    for (const auto& g : groups_) {
      for (const auto& a : g.agents) {
        if (a == "*") {
          if (!wildcard) wildcard = &g;
        } else if (ua.find(a) != std::string::npos && a.size() > best_len) {
          best = &g;
          best_len = a.size();
        }
      }
    }
    return best ? best : wildcard;
  }

  std::vector<Group> groups_;
};

struct RequestLogEntry {
  std::string host_key;
  std::string target;
  std::int64_t steady_ms;  // monotonic clock at send
};

// Polite fetcher: per-host spacing, bounded retries with geometric backoff,
// robots gating. Safe for concurrent use across threads; requests to one
// host are serialized by the spacing lock.
class Fetcher {
 public:
  explicit Fetcher(CrawlPolicy policy) : policy_(std::move(policy)) {
    policy_.validate();
  }

  // Supplies robots rules for a host without touching the network.
  void preload_robots(const std::string& host_key, const std::string& text) {
    std::lock_guard lock(robots_mu_);
    robots_[host_key] = RobotsRules::parse(text);
  }

  RawSnapshot fetch(const std::string& url) {
    ParsedUrl u = parse_url(url);
    if (u.scheme == "https")
      throw FetchFailedError("https not supported by this build: " + url, 0);

    if (policy_.respect_robots && !robots_allowed(u))
      throw PolicyRefusedError("disallowed by robots.txt: " + url);

    return fetch_with_retries(u, url);
  }

  // Send-time log of every request issued (politeness evidence for tests).
  std::vector<RequestLogEntry> request_log() const {
    std::lock_guard lock(log_mu_);
    return log_;
  }

 private:
  static std::int64_t steady_ms_now() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
  }

  // Blocks until the host slot is free, records the send. extra_gap_ms
  // extends the spacing for backoff waits.
  void acquire_slot(const std::string& host_key, const std::string& target,
                    std::int64_t extra_gap_ms) {
    std::unique_lock lock(hosts_mu_);
    auto& last = last_send_ms_[host_key];
    std::int64_t gap = std::max<std::int64_t>(policy_.min_interval_ms, extra_gap_ms);
    for (;;) {
      std::int64_t now = steady_ms_now();
      if (!last.has_value() || now - *last >= gap) {
        last = now;
        break;
      }
      std::int64_t wait = *last + gap - now;
      lock.unlock();
      std::this_thread::sleep_for(std::chrono::milliseconds(wait));
      lock.lock();
    }
    std::lock_guard log_lock(log_mu_);
    log_.push_back({host_key, target, *last});
  }

  bool robots_allowed(const ParsedUrl& u) {
    {
      std::lock_guard lock(robots_mu_);
      auto it = robots_.find(u.host_key());
      if (it != robots_.end())
        return it->second.allowed(policy_.user_agent, u.target);
    }
    // Lazily fetch /robots.txt; that request is itself spaced and logged.
    RobotsRules rules;
    try {
      ParsedUrl ru = u;
      ru.target = "/robots.txt";
      RawSnapshot snap = fetch_with_retries(ru, robots_url(u));
      if (snap.http_status == 200) rules = RobotsRules::parse(snap.body);
      // non-200 robots: everything allowed
    } catch (const FetchFailedError&) {
      // unreachable robots: treat as allow-all, cache the decision
    }
    std::lock_guard lock(robots_mu_);
    auto [it, _] = robots_.emplace(u.host_key(), std::move(rules));
    return it->second.allowed(policy_.user_agent, u.target);
  }

  static std::string robots_url(const ParsedUrl& u) {
    return u.scheme + "://" + u.host + ":" + std::to_string(u.port) +
           "/robots.txt";
  }

  RawSnapshot fetch_with_retries(const ParsedUrl& u, const std::string& url) {
    int attempts = 0;
    std::optional<RawSnapshot> last_response;
    for (int attempt = 0; attempt <= policy_.max_retries; ++attempt) {
      std::int64_t backoff = 0;
      if (attempt > 0)
        backoff = static_cast<std::int64_t>(
            policy_.min_interval_ms *
            std::pow(policy_.backoff_factor, attempt - 1));
      acquire_slot(u.host_key(), u.target, backoff);
      ++attempts;

      httplib::Client cli(u.host, u.port);
      cli.set_connection_timeout(10);
      cli.set_read_timeout(30);
      httplib::Headers headers{{"User-Agent", policy_.user_agent}};
      auto res = cli.Get(u.target, headers);
      if (!res) continue;  // transport failure: retry

      std::string ctype = res->get_header_value("Content-Type");
      if (ctype.empty()) ctype = "application/octet-stream";
      RawSnapshot snap = RawSnapshot::make(url, Timestamp::now(), res->status,
                                           res->body, ctype);
      if (res->status >= 500) {  // transient server error: retry
        last_response = std::move(snap);
        continue;
      }
      return snap;
    }
    // Exhausted: a 5xx response is still evidence worth archiving; only a
    // total transport failure is an error.
    if (last_response) return *last_response;
    throw FetchFailedError("fetch failed after " + std::to_string(attempts) +
                               " attempts: " + url,
                           attempts);
  }

  CrawlPolicy policy_;
  mutable std::mutex hosts_mu_;
  std::map<std::string, std::optional<std::int64_t>> last_send_ms_;
  mutable std::mutex robots_mu_;
  std::map<std::string, RobotsRules> robots_;
  mutable std::mutex log_mu_;
  std::vector<RequestLogEntry> log_;
};

struct FetchRunResult {
  int fetched = 0;
  int refused = 0;
  int failed = 0;
  std::vector<std::string> stored_ids;
  std::vector<std::string> errors;
};

// CLI driver: fetch each URL and archive the snapshot. Per-URL failures are
// collected, not fatal.
inline FetchRunResult fetch_urls(const std::vector<std::string>& urls,
                                 const CrawlPolicy& policy,
                                 const std::filesystem::path& archive_dir) {
  Fetcher fetcher(policy);
  FetchRunResult result;
  for (const auto& url : urls) {
    try {
      RawSnapshot snap = fetcher.fetch(url);
      result.stored_ids.push_back(store_snapshot(snap, archive_dir));
      ++result.fetched;
    } catch (const PolicyRefusedError& e) {
      ++result.refused;
      result.errors.push_back(e.what());
    } catch (const Error& e) {
      ++result.failed;
      result.errors.push_back(e.what());
    }
  }
  return result;
}

}  // namespace tourmon
