#pragma once

#include <memory>
#include <string>
#include <vector>

#include "tourmon/error.hpp"
#include "tourmon/lexicon.hpp"
#include "tourmon/utf8.hpp"

namespace tourmon {

// Pluggable translation hook. The default implementation passes text
// through untouched and claims only French, so foreign-language documents
// are excluded from lexicon work rather than silently mis-scored.
class Translator {
 public:
  virtual ~Translator() = default;
  // Returns French text for the given source text.
  virtual std::string translate(const std::string& text,
                                const std::string& source_lang) = 0;
  // Whether documents in `lang` can be fed through translate().
  virtual bool supports(const std::string& lang) const = 0;
};

class IdentityTranslator : public Translator {
 public:
  std::string translate(const std::string& text,
                        const std::string& /*source_lang*/) override {
    return text;  // identity, by contract
  }
  // Unknown language metadata is assumed French-market text.
  bool supports(const std::string& lang) const override {
    if (lang.empty()) return true;
    std::string l = utf8::lower(lang);
    return l == "fr" || l.rfind("fr-", 0) == 0;
  }
};

namespace textproc_detail {

inline bool is_joiner(char32_t cp) {
  // hyphen + apostrophes (ASCII and curly) may sit inside a token
  return cp == '-' || cp == '\'' || cp == 0x2019;
}

}  // namespace textproc_detail

// translate -> NFC -> lowercase -> split on non-letters (apostrophes and
// hyphens survive between letters) -> drop stopwords and 1-letter tokens.
// Diacritics are preserved; curly apostrophes fold to '.
inline std::vector<std::string> clean_tokenize(const std::string& text,
                                               const StopList& stoplist,
                                               Translator& translator,
                                               const std::string& lang = "") {
  std::string french = translator.translate(text, lang);
  std::string norm = utf8::lower(utf8::nfc(french));

  std::vector<std::string> tokens;
  std::string current;
  std::size_t current_len = 0;  // codepoints
  std::string pending_joiner;   // joiner held until a letter follows

  auto flush = [&]() {
    pending_joiner.clear();
    if (current_len > 1 && !stoplist.contains(current))
      tokens.push_back(current);
    current.clear();
    current_len = 0;
  };

  std::size_t i = 0;
  while (i < norm.size()) {
    char32_t cp = utf8::decode(norm, i);
    if (utf8::is_letter(cp)) {
      if (!pending_joiner.empty()) {
        current += pending_joiner;
        ++current_len;
        pending_joiner.clear();
      }
      utf8::append(current, cp);
      ++current_len;
    } else if (textproc_detail::is_joiner(cp) && !current.empty() &&
               pending_joiner.empty()) {
      pending_joiner = cp == 0x2019 ? "'" : std::string(1, static_cast<char>(cp));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

struct PolarityCounts {
  long positive = 0;
  long negative = 0;
  long unlabeled = 0;

  long total() const { return positive + negative + unlabeled; }
};

// Token-level exact lookup; every token lands in exactly one bucket.
inline PolarityCounts polarity_counts(const std::vector<std::string>& tokens,
                                      const SentimentLexicon& lexicon) {
  PolarityCounts c;
  for (const auto& t : tokens) {
    const LexiconEntry* e = lexicon.find(t);
    if (!e)
      ++c.unlabeled;
    else if (e->polarity == Polarity::positive)
      ++c.positive;
    else
      ++c.negative;
  }
  return c;
}

}  // namespace tourmon
