#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "exgraph/text.hpp"

namespace exgraph {

enum class PosTag { adj, noun, adv, verb };

inline std::optional<PosTag> parse_pos_tag(std::string_view s) {
  const std::string t = normalize_label(s);
  if (t == "adj") return PosTag::adj;
  if (t == "noun") return PosTag::noun;
  if (t == "adv") return PosTag::adv;
  if (t == "verb") return PosTag::verb;
  return std::nullopt;
}

class FormatError : public std::runtime_error {
 public:
  FormatError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Synonym candidates keyed by (word, POS). Keys are lowercased.
class Lexicon {
 public:
  struct Entry {
    PosTag pos;
    std::vector<std::string> candidates;
  };

  void add(std::string_view word, PosTag pos, const std::vector<std::string>& synonyms) {
    const std::string key = normalize_label(word);
    auto& entries = by_word_[key];
    auto it = std::find_if(entries.begin(), entries.end(),
                           [pos](const Entry& e) { return e.pos == pos; });
    if (it == entries.end()) {
      entries.push_back(Entry{pos, {}});
      it = std::prev(entries.end());
    }
    for (const auto& s : synonyms) {
      std::string cand = normalize_label(s);
      if (cand.empty() || cand == key) continue;
      if (std::find(it->candidates.begin(), it->candidates.end(), cand) == it->candidates.end())
        it->candidates.push_back(std::move(cand));
    }
  }

  const std::vector<std::string>& candidates(std::string_view word, PosTag pos) const {
    static const std::vector<std::string> none;
    auto it = by_word_.find(normalize_label(word));
    if (it == by_word_.end()) return none;
    for (const Entry& e : it->second)
      if (e.pos == pos) return e.candidates;
    return none;
  }

  /// POS entries for `word`, in the order first seen in the source file.
  const std::vector<Entry>& entries(std::string_view word) const {
    static const std::vector<Entry> none;
    auto it = by_word_.find(normalize_label(word));
    return it == by_word_.end() ? none : it->second;
  }

  std::size_t size() const { return by_word_.size(); }
  bool empty() const { return by_word_.empty(); }

 private:
  std::map<std::string, std::vector<Entry>> by_word_;
};

// word TAB POS TAB comma-separated synonyms
inline Lexicon parse_lexicon(std::istream& in) {
  Lexicon lex;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto cols = split(line, '\t');
    if (cols.size() != 3) throw FormatError(lineno, "expected word<TAB>POS<TAB>synonyms");
    if (trim(cols[0]).empty()) throw FormatError(lineno, "empty word");
    auto pos = parse_pos_tag(cols[1]);
    if (!pos) throw FormatError(lineno, "unknown POS tag '" + cols[1] + "'");
    lex.add(cols[0], *pos, split(cols[2], ','));
  }
  return lex;
}

inline Lexicon load_lexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open lexicon '" + path + "'");
  return parse_lexicon(in);
}

/// Word vectors of one fixed dimension; zero vectors are not stored.
class EmbeddingTable {
 public:
  void add(std::string_view word, std::vector<double> v) {
    if (dim_ == 0) dim_ = v.size();
    if (v.size() != dim_) throw std::invalid_argument("embedding dimension mismatch");
    if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; })) return;
    vectors_[normalize_label(word)] = std::move(v);
  }

  const std::vector<double>* find(std::string_view word) const {
    auto it = vectors_.find(normalize_label(word));
    return it == vectors_.end() ? nullptr : &it->second;
  }

  std::size_t dimension() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }

 private:
  std::size_t dim_ = 0;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

// word v1 v2 ... vd, one per line
inline EmbeddingTable parse_embeddings(std::istream& in) {
  EmbeddingTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string word;
    if (!(ss >> word)) continue;
    std::vector<double> v;
    std::string tok;
    while (ss >> tok) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw FormatError(lineno, "bad float '" + tok + "'");
      }
    }
    if (v.empty()) throw FormatError(lineno, "no vector components");
    if (table.dimension() != 0 && v.size() != table.dimension()) {
      throw FormatError(lineno, "dimension " + std::to_string(v.size()) + ", expected " +
                                    std::to_string(table.dimension()));
    }
    table.add(word, std::move(v));
  }
  return table;
}

inline EmbeddingTable load_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embeddings '" + path + "'");
  return parse_embeddings(in);
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

/// Lexicon candidate with the highest cosine similarity to `word`; ties go to
/// the lexicographically smaller candidate. Empty when `word` or every
/// candidate lacks a vector.
inline std::optional<std::string> best_synonym(std::string_view word, PosTag pos,
                                               const Lexicon& lexicon,
                                               const EmbeddingTable& embeddings) {
  const std::vector<double>* base = embeddings.find(word);
  if (!base) return std::nullopt;
  const std::string key = normalize_label(word);
  std::optional<std::string> best;
  double best_score = 0;
  for (const auto& cand : lexicon.candidates(word, pos)) {
    if (cand == key) continue;
    const std::vector<double>* v = embeddings.find(cand);
    if (!v) continue;
    const double score = cosine(*base, *v);
    if (!best || score > best_score || (score == best_score && cand < *best)) {
      best = cand;
      best_score = score;
    }
  }
  return best;
}

}  // namespace exgraph
