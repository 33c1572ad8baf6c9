#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tourmon/error.hpp"
#include "tourmon/utf8.hpp"

namespace tourmon::html {

// Forgiving tag-soup parser + CSS-lite selectors, enough to run extraction
// rules against archived pages. Not a spec-compliant HTML5 parser.

inline std::string decode_entities(std::string_view s) {
  struct Named {
    const char* name;
    const char* value;
  };
  static constexpr Named named[] = {
      {"amp", "&"},      {"lt", "<"},       {"gt", ">"},
      {"quot", "\""},    {"apos", "'"},     {"nbsp", " "},
      {"eacute", "é"},   {"egrave", "è"},   {"ecirc", "ê"},
      {"euml", "ë"},     {"agrave", "à"},   {"acirc", "â"},
      {"ccedil", "ç"},   {"ocirc", "ô"},    {"ouml", "ö"},
      {"ucirc", "û"},    {"ugrave", "ù"},   {"uuml", "ü"},
      {"icirc", "î"},    {"iuml", "ï"},     {"ntilde", "ñ"},
      {"oelig", "œ"},    {"aelig", "æ"},    {"copy", "©"},
      {"reg", "®"},      {"deg", "°"},      {"laquo", "«"},
      {"raquo", "»"},    {"rsquo", "’"},    {"lsquo", "‘"},
      {"ldquo", "“"},    {"rdquo", "”"},    {"hellip", "…"},
      {"euro", "€"},     {"middot", "·"},   {"times", "×"},
      {"Eacute", "É"},   {"Egrave", "È"},   {"Ecirc", "Ê"},
      {"Agrave", "À"},   {"Acirc", "Â"},    {"Ccedil", "Ç"},
      {"Ocirc", "Ô"},    {"Ucirc", "Û"},    {"Icirc", "Î"},
      {"OElig", "Œ"},    {"AElig", "Æ"},
  };
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '&') {
      out.push_back(s[i++]);
      continue;
    }
    auto semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 10) {
      out.push_back(s[i++]);
      continue;
    }
    std::string_view body = s.substr(i + 1, semi - i - 1);
    if (!body.empty() && body[0] == '#') {
      char32_t cp = 0;
      bool ok = body.size() > 1;
      if (body.size() > 2 && (body[1] == 'x' || body[1] == 'X')) {
        for (std::size_t k = 2; k < body.size() && ok; ++k) {
          char c = body[k];
          int d = (c >= '0' && c <= '9')   ? c - '0'
                  : (c >= 'a' && c <= 'f') ? c - 'a' + 10
                  : (c >= 'A' && c <= 'F') ? c - 'A' + 10
                                           : -1;
          if (d < 0)
            ok = false;
          else
            cp = cp * 16 + static_cast<char32_t>(d);
        }
      } else {
        for (std::size_t k = 1; k < body.size() && ok; ++k) {
          if (body[k] < '0' || body[k] > '9')
            ok = false;
          else
            cp = cp * 10 + static_cast<char32_t>(body[k] - '0');
        }
      }
      if (ok && cp > 0 && cp <= 0x10FFFF) {
        utf8::append(out, cp);
        i = semi + 1;
        continue;
      }
    } else {
      bool matched = false;
      for (const auto& e : named) {
        if (body == e.name) {
          out += e.value;
          matched = true;
          break;
        }
      }
      if (matched) {
        i = semi + 1;
        continue;
      }
    }
    out.push_back(s[i++]);
  }
  return out;
}

struct Node {
  bool is_text = false;
  std::string tag;   // lowercase; empty for the synthetic root
  std::string text;  // decoded; text nodes only
  std::vector<std::pair<std::string, std::string>> attrs;
  std::vector<int> children;
  int parent = -1;
  std::size_t inner_begin = 0;  // byte range of inner HTML in the source
  std::size_t inner_end = 0;

  std::optional<std::string> attr(std::string_view name) const {
    for (const auto& [k, v] : attrs)
      if (k == name) return v;
    return std::nullopt;
  }
};

class Document {
 public:
  static Document parse(std::string source) {
    Document doc;
    doc.source_ = std::move(source);
    doc.nodes_.push_back(Node{});  // root
    doc.nodes_[0].inner_end = doc.source_.size();
    doc.run_parse();
    return doc;
  }

  const Node& node(int idx) const { return nodes_[static_cast<std::size_t>(idx)]; }
  int root() const { return 0; }
  int size() const { return static_cast<int>(nodes_.size()); }

  std::string inner_text(int idx) const {
    std::string out;
    collect_text(idx, out);
    return out;
  }

  std::string_view inner_html(int idx) const {
    const Node& n = node(idx);
    return std::string_view(source_).substr(n.inner_begin,
                                            n.inner_end - n.inner_begin);
  }

 private:
  static bool is_void_tag(std::string_view t) {
    static constexpr std::string_view voids[] = {
        "area", "base", "br",   "col",  "embed",  "hr",    "img", "input",
        "link", "meta", "param", "source", "track", "wbr"};
    return std::find(std::begin(voids), std::end(voids), t) != std::end(voids);
  }

  // Block-level openers that implicitly terminate an open <p>.
  static bool ends_open_p(std::string_view t) {
    static constexpr std::string_view blocks[] = {
        "address", "article", "aside",  "blockquote", "div",  "dl",
        "fieldset", "footer", "form",   "h1",         "h2",   "h3",
        "h4",      "h5",      "h6",     "header",     "hr",   "main",
        "nav",     "ol",      "p",      "pre",        "section", "table",
        "ul"};
    return std::find(std::begin(blocks), std::end(blocks), t) !=
           std::end(blocks);
  }

  void collect_text(int idx, std::string& out) const {
    const Node& n = node(idx);
    if (n.is_text) {
      out += n.text;
      return;
    }
    for (int c : n.children) collect_text(c, out);
  }

  void add_text(int parent, std::string_view raw) {
    if (raw.empty()) return;
    Node t;
    t.is_text = true;
    t.text = decode_entities(raw);
    t.parent = parent;
    nodes_.push_back(std::move(t));
    nodes_[static_cast<std::size_t>(parent)].children.push_back(
        static_cast<int>(nodes_.size() - 1));
  }

  void run_parse() {
    std::string_view s = source_;
    std::vector<int> stack{0};
    std::size_t i = 0;
    std::size_t text_start = 0;

    auto flush_text = [&](std::size_t end) {
      if (end > text_start) add_text(stack.back(), s.substr(text_start, end - text_start));
    };

    while (i < s.size()) {
      if (s[i] != '<') {
        ++i;
        continue;
      }
      if (s.compare(i, 4, "<!--") == 0) {
        flush_text(i);
        auto end = s.find("-->", i + 4);
        i = end == std::string_view::npos ? s.size() : end + 3;
        text_start = i;
        continue;
      }
      if (i + 1 < s.size() && (s[i + 1] == '!' || s[i + 1] == '?')) {
        flush_text(i);
        auto end = s.find('>', i);
        i = end == std::string_view::npos ? s.size() : end + 1;
        text_start = i;
        continue;
      }
      if (i + 1 < s.size() && s[i + 1] == '/') {
        flush_text(i);
        auto end = s.find('>', i);
        std::string tag = lower_name(s.substr(i + 2, (end == std::string_view::npos
                                                          ? s.size()
                                                          : end) - i - 2));
        close_tag(stack, tag, i);
        i = end == std::string_view::npos ? s.size() : end + 1;
        text_start = i;
        continue;
      }
      if (i + 1 >= s.size() || !std::isalpha(static_cast<unsigned char>(s[i + 1]))) {
        ++i;  // stray '<'
        continue;
      }

      flush_text(i);
      std::size_t j = i + 1;
      std::size_t name_start = j;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) ||
                              s[j] == '-' || s[j] == ':'))
        ++j;
      Node el;
      el.tag = lower_name(s.substr(name_start, j - name_start));
      bool self_closed = false;
      parse_attrs(s, j, el, self_closed);

      // tag-soup implicit closes: <p>one<p>two, <li>a<li>b, bare table rows
      while (stack.size() > 1) {
        const std::string& open =
            nodes_[static_cast<std::size_t>(stack.back())].tag;
        bool closes = (open == "p" && ends_open_p(el.tag)) ||
                      (open == "li" && el.tag == "li") ||
                      (open == "tr" && el.tag == "tr") ||
                      ((open == "td" || open == "th") &&
                       (el.tag == "td" || el.tag == "th" || el.tag == "tr"));
        if (!closes) break;
        nodes_[static_cast<std::size_t>(stack.back())].inner_end = i;
        stack.pop_back();
      }

      el.parent = stack.back();
      el.inner_begin = el.inner_end = j;
      nodes_.push_back(std::move(el));
      int idx = static_cast<int>(nodes_.size() - 1);
      nodes_[static_cast<std::size_t>(stack.back())].children.push_back(idx);

      const std::string& tag = nodes_[static_cast<std::size_t>(idx)].tag;
      if (tag == "script" || tag == "style") {
        // raw text until the matching close tag
        std::string close = "</" + tag;
        auto end = find_ci(s, close, j);
        nodes_[static_cast<std::size_t>(idx)].inner_begin = j;
        nodes_[static_cast<std::size_t>(idx)].inner_end =
            end == std::string_view::npos ? s.size() : end;
        auto gt = end == std::string_view::npos
                      ? std::string_view::npos
                      : s.find('>', end);
        i = gt == std::string_view::npos ? s.size() : gt + 1;
        text_start = i;
        continue;
      }
      if (!self_closed && !is_void_tag(tag)) {
        stack.push_back(idx);
      }
      i = j;
      text_start = i;
    }
    flush_text(s.size());
    // any unclosed elements extend to end of input
    while (stack.size() > 1) {
      nodes_[static_cast<std::size_t>(stack.back())].inner_end = s.size();
      stack.pop_back();
    }
  }

  void close_tag(std::vector<int>& stack, const std::string& tag,
                 std::size_t at) {
    for (std::size_t k = stack.size(); k-- > 1;) {
      if (nodes_[static_cast<std::size_t>(stack[k])].tag == tag) {
        while (stack.size() > k) {
          nodes_[static_cast<std::size_t>(stack.back())].inner_end = at;
          stack.pop_back();
        }
        return;
      }
    }
    // no matching open tag: ignore
  }

  // Parses attributes starting at s[j] (just past the tag name); leaves j
  // one past the closing '>'.
  void parse_attrs(std::string_view s, std::size_t& j, Node& el,
                   bool& self_closed) {
    while (j < s.size() && s[j] != '>') {
      if (s[j] == '/' && j + 1 < s.size() && s[j + 1] == '>') {
        self_closed = true;
        j += 2;
        return;
      }
      if (std::isspace(static_cast<unsigned char>(s[j]))) {
        ++j;
        continue;
      }
      std::size_t name_start = j;
      while (j < s.size() && s[j] != '=' && s[j] != '>' && s[j] != '/' &&
             !std::isspace(static_cast<unsigned char>(s[j])))
        ++j;
      std::string name = lower_name(s.substr(name_start, j - name_start));
      std::string value;
      while (j < s.size() && std::isspace(static_cast<unsigned char>(s[j]))) ++j;
      if (j < s.size() && s[j] == '=') {
        ++j;
        while (j < s.size() && std::isspace(static_cast<unsigned char>(s[j]))) ++j;
        if (j < s.size() && (s[j] == '"' || s[j] == '\'')) {
          char q = s[j++];
          std::size_t v_start = j;
          while (j < s.size() && s[j] != q) ++j;
          value = decode_entities(s.substr(v_start, j - v_start));
          if (j < s.size()) ++j;
        } else {
          std::size_t v_start = j;
          while (j < s.size() && s[j] != '>' &&
                 !std::isspace(static_cast<unsigned char>(s[j])))
            ++j;
          value = decode_entities(s.substr(v_start, j - v_start));
        }
      }
      if (!name.empty()) el.attrs.emplace_back(std::move(name), std::move(value));
    }
    if (j < s.size()) ++j;  // skip '>'
  }

  static std::string lower_name(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
      return static_cast<char>(std::tolower(c));
    });
    return out;
  }

  static std::size_t find_ci(std::string_view hay, std::string_view needle,
                             std::size_t from) {
    if (needle.empty()) return from;
    for (std::size_t i = from; i + needle.size() <= hay.size(); ++i) {
      bool match = true;
      for (std::size_t k = 0; k < needle.size(); ++k) {
        if (std::tolower(static_cast<unsigned char>(hay[i + k])) !=
            std::tolower(static_cast<unsigned char>(needle[k]))) {
          match = false;
          break;
        }
      }
      if (match) return i;
    }
    return std::string_view::npos;
  }

  std::string source_;
  std::vector<Node> nodes_;
};

// --- Selectors -------------------------------------------------------------
//
// Supported grammar, per extraction-rules schema:
//   chain    := simple ( (' ' | ' > ') simple )* [ '::attr(' name ')' ]
//   simple   := [tag] ('#' id)? ('.' class)* ('[' attr ('=' value)? ']')*
// Descendant and child combinators only.

struct SimpleSelector {
  std::string tag;
  std::string id;
  std::vector<std::string> classes;
  std::vector<std::pair<std::string, std::optional<std::string>>> attr_conds;
};

struct Selector {
  struct Part {
    SimpleSelector simple;
    bool child_of_previous = false;
  };
  std::vector<Part> parts;
  std::optional<std::string> extract_attr;
  std::string source;
};

inline Selector parse_selector(std::string_view text) {
  Selector sel;
  sel.source = std::string(text);

  std::string_view rest = text;
  auto attr_pos = rest.rfind("::attr(");
  if (attr_pos != std::string_view::npos) {
    auto close = rest.find(')', attr_pos);
    if (close == std::string_view::npos)
      throw ConfigError("bad selector (unclosed ::attr): " + sel.source);
    sel.extract_attr = std::string(rest.substr(attr_pos + 7, close - attr_pos - 7));
    rest = rest.substr(0, attr_pos);
  }

  auto parse_simple = [&](std::string_view tok) {
    SimpleSelector s;
    std::size_t i = 0;
    auto name_char = [](char c) {
      return std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
             c == '_';
    };
    while (i < tok.size()) {
      if (tok[i] == '#' || tok[i] == '.') {
        char kind = tok[i++];
        std::size_t start = i;
        while (i < tok.size() && name_char(tok[i])) ++i;
        if (start == i)
          throw ConfigError("bad selector near '" + std::string(tok) + "'");
        std::string name(tok.substr(start, i - start));
        if (kind == '#')
          s.id = std::move(name);
        else
          s.classes.push_back(std::move(name));
      } else if (tok[i] == '[') {
        auto close = tok.find(']', i);
        if (close == std::string_view::npos)
          throw ConfigError("bad selector (unclosed '['): " + sel.source);
        std::string_view body = tok.substr(i + 1, close - i - 1);
        auto eq = body.find('=');
        if (eq == std::string_view::npos) {
          s.attr_conds.emplace_back(std::string(body), std::nullopt);
        } else {
          std::string_view v = body.substr(eq + 1);
          if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') &&
              v.back() == v.front())
            v = v.substr(1, v.size() - 2);
          s.attr_conds.emplace_back(std::string(body.substr(0, eq)),
                                    std::string(v));
        }
        i = close + 1;
      } else if (name_char(tok[i])) {
        std::size_t start = i;
        while (i < tok.size() && name_char(tok[i])) ++i;
        s.tag = std::string(tok.substr(start, i - start));
        std::transform(s.tag.begin(), s.tag.end(), s.tag.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      } else {
        throw ConfigError("bad selector char '" + std::string(1, tok[i]) +
                          "' in: " + sel.source);
      }
    }
    return s;
  };

  bool next_is_child = false;
  std::size_t i = 0;
  while (i < rest.size()) {
    while (i < rest.size() && rest[i] == ' ') ++i;
    if (i >= rest.size()) break;
    if (rest[i] == '>') {
      next_is_child = true;
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < rest.size() && rest[i] != ' ' && rest[i] != '>') ++i;
    Selector::Part part;
    part.simple = parse_simple(rest.substr(start, i - start));
    part.child_of_previous = next_is_child;
    next_is_child = false;
    sel.parts.push_back(std::move(part));
  }
  if (sel.parts.empty())
    throw ConfigError("empty selector: " + sel.source);
  return sel;
}

inline bool matches_simple(const Node& n, const SimpleSelector& s) {
  if (n.is_text) return false;
  if (!s.tag.empty() && n.tag != s.tag) return false;
  if (!s.id.empty()) {
    auto id = n.attr("id");
    if (!id || *id != s.id) return false;
  }
  if (!s.classes.empty()) {
    auto cls = n.attr("class");
    if (!cls) return false;
    for (const auto& want : s.classes) {
      bool found = false;
      std::size_t pos = 0;
      while (pos < cls->size()) {
        while (pos < cls->size() && std::isspace(static_cast<unsigned char>((*cls)[pos]))) ++pos;
        std::size_t start = pos;
        while (pos < cls->size() && !std::isspace(static_cast<unsigned char>((*cls)[pos]))) ++pos;
        if (cls->compare(start, pos - start, want) == 0 &&
            pos - start == want.size()) {
          found = true;
          break;
        }
      }
      if (!found) return false;
    }
  }
  for (const auto& [name, value] : s.attr_conds) {
    auto v = n.attr(name);
    if (!v) return false;
    if (value && *v != *value) return false;
  }
  return true;
}

namespace detail {

inline bool chain_matches(const Document& doc, int idx, const Selector& sel,
                          std::size_t part_idx, int scope) {
  // parts[part_idx] already matched at idx; verify the rest up the tree.
  if (part_idx == 0) return true;
  const auto& prev = sel.parts[part_idx - 1];
  bool direct = sel.parts[part_idx].child_of_previous;
  for (int p = doc.node(idx).parent; p >= 0 && p != scope;
       p = doc.node(p).parent) {
    if (matches_simple(doc.node(p), prev.simple) &&
        chain_matches(doc, p, sel, part_idx - 1, scope))
      return true;
    if (direct) return false;
  }
  return false;
}

inline void collect(const Document& doc, int idx, const Selector& sel,
                    int scope, std::vector<int>& out) {
  const Node& n = doc.node(idx);
  if (!n.is_text && idx != scope) {
    if (matches_simple(n, sel.parts.back().simple) &&
        chain_matches(doc, idx, sel, sel.parts.size() - 1, scope))
      out.push_back(idx);
  }
  for (int c : n.children) collect(doc, c, sel, scope, out);
}

}  // namespace detail

// All elements under `scope` (exclusive) matching the selector, in document
// order. `scope` defaults to the document root.
inline std::vector<int> query_all(const Document& doc, const Selector& sel,
                                  int scope = 0) {
  std::vector<int> out;
  detail::collect(doc, scope, sel, scope, out);
  return out;
}

inline std::optional<int> query_first(const Document& doc, const Selector& sel,
                                      int scope = 0) {
  auto all = query_all(doc, sel, scope);
  if (all.empty()) return std::nullopt;
  return all.front();
}

}  // namespace tourmon::html
