#pragma once

#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tourmon/csv.hpp"
#include "tourmon/error.hpp"
#include "tourmon/utf8.hpp"

namespace tourmon {

enum class Polarity { positive, negative };

struct LexiconEntry {
  Polarity polarity;
  std::vector<std::string> emotions;  // pass-through tags
};

// Word -> polarity lookup in the FEEL distribution shape: semicolon-separated
// rows `word;polarity[;emotion…]`, optionally prefixed with a numeric id
// column and optionally led by a header row. Keys are NFC + lowercase; a
// word claiming both polarities is a configuration error.
class SentimentLexicon {
 public:
  static std::string normalize_key(const std::string& word) {
    return utf8::lower(utf8::nfc(word));
  }

  void add(const std::string& word, Polarity polarity,
           std::vector<std::string> emotions = {}) {
    std::string key = normalize_key(word);
    if (key.empty()) throw ConfigError("lexicon entry with empty word");
    auto it = entries_.find(key);
    if (it != entries_.end()) {
      if (it->second.polarity != polarity)
        throw ConfigError("lexicon word '" + key +
                          "' mapped to both polarities");
      return;  // duplicate consistent entry
    }
    entries_.emplace(key, LexiconEntry{polarity, std::move(emotions)});
  }

  const LexiconEntry* find(const std::string& token) const {
    auto it = entries_.find(normalize_key(token));
    return it == entries_.end() ? nullptr : &it->second;
  }

  std::size_t size() const { return entries_.size(); }

  static SentimentLexicon load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open lexicon file: " + path);
    SentimentLexicon lex;
    std::vector<std::string> emotion_names;  // from a header, if any
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      auto fields = split_csv_record(line, ';');
      if (first) {
        first = false;
        bool header = false;
        for (const auto& f : fields)
          if (f == "word" || f == "polarity") header = true;
        if (header) {
          for (std::size_t i = 0; i < fields.size(); ++i)
            if (fields[i] == "polarity" && i + 1 < fields.size())
              emotion_names.assign(fields.begin() + i + 1, fields.end());
          continue;
        }
      }
      // locate the polarity column: first field saying positive/negative
      std::size_t pol_idx = fields.size();
      for (std::size_t i = 1; i < fields.size(); ++i)
        if (fields[i] == "positive" || fields[i] == "negative") {
          pol_idx = i;
          break;
        }
      if (pol_idx == fields.size() || pol_idx == 0)
        throw ConfigError("lexicon row without polarity: " + line);
      Polarity pol = fields[pol_idx] == "positive" ? Polarity::positive
                                                   : Polarity::negative;
      std::vector<std::string> emotions;
      for (std::size_t i = pol_idx + 1; i < fields.size(); ++i) {
        const std::string& f = fields[i];
        if (f.empty() || f == "0") continue;
        std::size_t name_idx = i - (pol_idx + 1);
        if (f == "1" && name_idx < emotion_names.size())
          emotions.push_back(emotion_names[name_idx]);
        else if (f != "1")
          emotions.push_back(f);
      }
      lex.add(fields[pol_idx - 1], pol, std::move(emotions));
    }
    return lex;
  }

 private:
  std::map<std::string, LexiconEntry> entries_;
};

// Stopword set; entries normalized exactly like lexicon keys. Files hold one
// word per line; '#' lines are comments. An augmentation file merges in.
class StopList {
 public:
  void add(const std::string& word) {
    std::string key = SentimentLexicon::normalize_key(word);
    if (!key.empty()) words_.insert(key);
  }

  bool contains(const std::string& token) const {
    return words_.count(SentimentLexicon::normalize_key(token)) > 0;
  }

  std::size_t size() const { return words_.size(); }

  void load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open stopword file: " + path);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      std::size_t b = line.find_first_not_of(" \t");
      if (b == std::string::npos) continue;
      std::size_t e = line.find_last_not_of(" \t");
      std::string word = line.substr(b, e - b + 1);
      if (word.empty() || word[0] == '#') continue;
      add(word);
    }
  }

  static StopList load(const std::string& path,
                       const std::vector<std::string>& extra_paths = {}) {
    StopList s;
    s.load_file(path);
    for (const auto& p : extra_paths) s.load_file(p);
    return s;
  }

 private:
  std::set<std::string> words_;
};

}  // namespace tourmon
