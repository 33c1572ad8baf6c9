#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include <json.hpp>

#include "tourmon/error.hpp"
#include "tourmon/html.hpp"
#include "tourmon/record.hpp"
#include "tourmon/utf8.hpp"

namespace tourmon {

// One extraction rule: a CSS-lite selector or a regex over the page body,
// plus text post-processors. "absent" marks a field the source never
// carries; required core fields may not be absent.
struct FieldRule {
  enum class Kind { selector, regex, absent };
  Kind kind = Kind::absent;
  html::Selector selector;       // kind == selector
  std::string regex_pattern;     // kind == regex
  bool optional = false;         // no match -> field absent (vs parse error)
  std::vector<std::string> post;  // trim | collapse_ws | lower | upper
  std::string number_locale = "c";  // c | en | fr
  std::map<std::string, std::string> enum_map;
  std::optional<std::string> default_value;

  bool is_absent() const { return kind == Kind::absent; }
};

struct ReviewRules {
  html::Selector container;
  std::map<std::string, FieldRule> fields;
};

struct ExtractionRules {
  int version = 1;
  std::map<std::string, FieldRule> accommodation;  // keyed by field name
  std::map<std::string, FieldRule> themes;         // rating theme -> rule
  std::map<std::string, FieldRule> extra;          // pass-through attributes
  std::optional<ReviewRules> reviews;
};

namespace detail {

inline FieldRule parse_field_rule(const nlohmann::json& j,
                                  const std::string& field) {
  if (!j.is_object())
    throw ConfigError("rule for '" + field + "' must be an object");
  FieldRule r;
  if (j.value("absent", false)) {
    r.kind = FieldRule::Kind::absent;
    return r;
  }
  bool has_sel = j.contains("selector");
  bool has_re = j.contains("regex");
  if (has_sel == has_re)
    throw ConfigError("rule for '" + field +
                      "' needs exactly one of selector/regex (or absent)");
  if (has_sel) {
    r.kind = FieldRule::Kind::selector;
    r.selector = html::parse_selector(j.at("selector").get<std::string>());
  } else {
    r.kind = FieldRule::Kind::regex;
    r.regex_pattern = j.at("regex").get<std::string>();
    try {
      std::regex probe(r.regex_pattern);
    } catch (const std::regex_error& e) {
      throw ConfigError("rule for '" + field + "': bad regex: " + e.what());
    }
  }
  r.optional = j.value("optional", false);
  if (j.contains("post"))
    for (const auto& p : j.at("post")) {
      std::string name = p.get<std::string>();
      if (name != "trim" && name != "collapse_ws" && name != "lower" &&
          name != "upper")
        throw ConfigError("rule for '" + field + "': unknown post step '" +
                          name + "'");
      r.post.push_back(name);
    }
  r.number_locale = j.value("number_locale", std::string("c"));
  if (r.number_locale != "c" && r.number_locale != "en" &&
      r.number_locale != "fr")
    throw ConfigError("rule for '" + field + "': unknown number_locale '" +
                      r.number_locale + "'");
  if (j.contains("enum_map"))
    for (const auto& [k, v] : j.at("enum_map").items())
      r.enum_map[k] = v.get<std::string>();
  if (j.contains("default")) r.default_value = j.at("default").get<std::string>();
  return r;
}

}  // namespace detail

// The complete accommodation field list; a rules file must cover each with
// a rule or an explicit absent marker.
inline const std::vector<std::string>& accommodation_rule_fields() {
  static const std::vector<std::string> fields = {
      "accommodation_id", "name",     "country",
      "unit_type",        "star_class", "price",
      "currency",         "tax",      "tax_unknown_marker",
      "latitude",         "longitude", "rating_overall",
      "review_count"};
  return fields;
}

inline ExtractionRules load_extraction_rules(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open rules file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad rules file " + path + ": " + e.what());
  }

  ExtractionRules rules;
  rules.version = j.value("version", 1);
  if (!j.contains("accommodation"))
    throw ConfigError("rules file missing 'accommodation' section");

  const auto& acc = j.at("accommodation");
  for (const auto& field : accommodation_rule_fields()) {
    if (!acc.contains(field))
      throw ConfigError("rules file: field '" + field +
                        "' has no rule; use {\"absent\": true} to mark it");
    rules.accommodation[field] = detail::parse_field_rule(acc.at(field), field);
  }
  for (const auto& required :
       {"accommodation_id", "name", "country", "latitude", "longitude"}) {
    if (rules.accommodation.at(required).is_absent())
      throw ConfigError(std::string("rules file: required field '") + required +
                        "' cannot be absent");
  }

  if (!acc.contains("rating_themes"))
    throw ConfigError("rules file: accommodation needs 'rating_themes'");
  for (auto theme : kRatingThemes) {
    std::string name(theme);
    if (!acc.at("rating_themes").contains(name))
      throw ConfigError("rules file: rating theme '" + name + "' has no rule");
    rules.themes[name] =
        detail::parse_field_rule(acc.at("rating_themes").at(name),
                                 "rating_themes." + name);
  }

  if (j.contains("extra"))
    for (const auto& [k, v] : j.at("extra").items())
      rules.extra[k] = detail::parse_field_rule(v, "extra." + k);

  if (j.contains("reviews")) {
    ReviewRules rr;
    rr.container =
        html::parse_selector(j.at("reviews").at("container").get<std::string>());
    const auto& fj = j.at("reviews").at("fields");
    for (const auto& field : {"review_id", "text", "language",
                              "reviewer_country", "posted_at", "score"}) {
      if (!fj.contains(field))
        throw ConfigError(std::string("rules file: review field '") + field +
                          "' has no rule");
      rr.fields[field] = detail::parse_field_rule(fj.at(field), field);
    }
    for (const auto& required : {"review_id", "text", "posted_at"}) {
      if (rr.fields.at(required).is_absent())
        throw ConfigError(std::string("rules file: review field '") + required +
                          "' cannot be absent");
    }
    rules.reviews = std::move(rr);
  }
  return rules;
}

// --- Rule application --------------------------------------------------------

inline std::string apply_post(const FieldRule& rule, std::string value) {
  for (const auto& step : rule.post) {
    if (step == "trim") {
      std::string collapsed = value;
      std::size_t b = 0, e = collapsed.size();
      auto is_ws = [](char c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r';
      };
      while (b < e && is_ws(collapsed[b])) ++b;
      while (e > b && is_ws(collapsed[e - 1])) --e;
      value = collapsed.substr(b, e - b);
    } else if (step == "collapse_ws") {
      value = utf8::collapse_ws(value);
    } else if (step == "lower") {
      value = utf8::lower(value);
    } else if (step == "upper") {
      std::string out;
      std::size_t i = 0;
      while (i < value.size()) {
        char32_t cp = utf8::decode(value, i);
        if (cp >= 'a' && cp <= 'z') cp -= 0x20;
        utf8::append(out, cp);
      }
      value = out;
    }
  }
  return value;
}

// Extracts the raw string for a rule, scoped to `scope` (document root for
// accommodation fields, the container for review fields). nullopt = absent.
inline std::optional<std::string> apply_rule(const FieldRule& rule,
                                             const html::Document& doc,
                                             int scope,
                                             const std::string& field) {
  if (rule.is_absent()) return std::nullopt;
  std::optional<std::string> raw;
  if (rule.kind == FieldRule::Kind::selector) {
    auto idx = html::query_first(doc, rule.selector, scope);
    if (idx) {
      if (rule.selector.extract_attr)
        raw = doc.node(*idx).attr(*rule.selector.extract_attr);
      else
        raw = doc.inner_text(*idx);
    }
  } else {
    std::regex re(rule.regex_pattern);
    std::string_view hay = doc.inner_html(scope);
    std::cmatch m;
    if (std::regex_search(hay.data(), hay.data() + hay.size(), m, re))
      raw = m.size() > 1 ? m[1].str() : m[0].str();
  }
  if (!raw) {
    if (rule.default_value) return rule.default_value;
    if (rule.optional) return std::nullopt;
    std::string how = rule.kind == FieldRule::Kind::selector
                          ? "selector '" + rule.selector.source + "'"
                          : "regex '" + rule.regex_pattern + "'";
    throw ParseError("required field '" + field + "' not extractable via " +
                     how);
  }
  return apply_post(rule, *raw);
}

// Locale-aware number parsing for extracted strings. Currency symbols and
// letters are stripped first. Locale "fr": '.' and spaces are thousands
// separators, ',' is the decimal mark. "en": ',' thousands, '.' decimal.
// "c": strict decimal point only.
inline double parse_localized_number(const std::string& text,
                                     const std::string& locale,
                                     const std::string& field) {
  std::string cleaned;
  std::size_t i = 0;
  while (i < text.size()) {
    char32_t cp = utf8::decode(text, i);
    if ((cp >= '0' && cp <= '9') || cp == '.' || cp == ',' || cp == '+' ||
        cp == '-')
      cleaned.push_back(static_cast<char>(cp));
    // everything else (currency signs, letters, spaces incl. nbsp) dropped
  }
  if (locale == "fr") {
    std::string tmp;
    for (char c : cleaned)
      if (c != '.') tmp.push_back(c == ',' ? '.' : c);
    cleaned = tmp;
  } else if (locale == "en") {
    std::string tmp;
    for (char c : cleaned)
      if (c != ',') tmp.push_back(c);
    cleaned = tmp;
  }
  if (cleaned.empty())
    throw ParseError("field '" + field + "': no number in '" + text + "'");
  std::size_t consumed = 0;
  double value = 0;
  try {
    value = std::stod(cleaned, &consumed);
  } catch (...) {
    throw ParseError("field '" + field + "': cannot parse number from '" +
                     text + "'");
  }
  if (consumed != cleaned.size())
    throw ParseError("field '" + field + "': trailing junk in number '" +
                     text + "'");
  return value;
}

inline long parse_integer(const std::string& text, const std::string& field) {
  double v = parse_localized_number(text, "c", field);
  long l = static_cast<long>(v);
  if (static_cast<double>(l) != v)
    throw ParseError("field '" + field + "': expected integer, got '" + text +
                     "'");
  return l;
}

}  // namespace tourmon
