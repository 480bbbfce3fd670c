#include "ltr/text_match.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "ltr/error.hpp"

namespace ltr {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

namespace {

void check_fields(std::size_t expected, std::size_t got) {
  if (expected != got)
    throw DataError("documents in one corpus must share a field count");
}

std::set<std::string, std::less<>> unique_terms(
    const std::vector<std::string>& terms) {
  return {terms.begin(), terms.end()};
}

double length_norm(double b, double len, double avg) {
  return avg > 0.0 ? 1.0 - b + b * len / avg : 1.0;
}

void validate_params(const Bm25fParams& p, std::size_t fields) {
  if (p.k1 <= 0.0) throw ConfigError("bm25f k1 must be > 0");
  if (p.b < 0.0 || p.b > 1.0) throw ConfigError("bm25f b must be in [0,1]");
  if (p.field_weights.size() != fields)
    throw ConfigError("bm25f field weight count does not match fields");
  bool positive = false;
  for (double w : p.field_weights) {
    if (w < 0.0) throw ConfigError("bm25f field weights must be nonnegative");
    if (w > 0.0) positive = true;
  }
  if (!positive) throw ConfigError("bm25f needs at least one positive field weight");
}

}  // namespace

CorpusStats build_corpus_stats(const std::vector<FieldedDocument>& docs) {
  CorpusStats stats;
  stats.doc_count = static_cast<int>(docs.size());
  if (docs.empty()) return stats;
  const std::size_t fields = docs[0].fields.size();
  stats.avg_field_len.assign(fields, 0.0);
  for (const FieldedDocument& d : docs) {
    check_fields(fields, d.fields.size());
    std::set<std::string, std::less<>> seen;
    for (std::size_t f = 0; f < fields; ++f) {
      stats.avg_field_len[f] += static_cast<double>(d.fields[f].size());
      for (const std::string& t : d.fields[f]) seen.insert(t);
    }
    for (const std::string& t : seen) ++stats.doc_freq[t];
  }
  for (double& v : stats.avg_field_len) v /= static_cast<double>(docs.size());
  return stats;
}

double bm25_idf(const CorpusStats& stats, std::string_view term) {
  auto it = stats.doc_freq.find(term);
  double df = it == stats.doc_freq.end() ? 0.0 : static_cast<double>(it->second);
  double n = static_cast<double>(stats.doc_count);
  return std::log((n - df + 0.5) / (df + 0.5) + 1.0);
}

double bm25f_score(const std::vector<std::string>& query_terms,
                   const FieldedDocument& doc, const CorpusStats& stats,
                   const Bm25fParams& params) {
  validate_params(params, doc.fields.size());
  if (stats.avg_field_len.size() != doc.fields.size())
    throw DataError("corpus stats field count does not match document");
  double score = 0.0;
  for (const std::string& term : unique_terms(query_terms)) {
    double x = 0.0;
    for (std::size_t f = 0; f < doc.fields.size(); ++f) {
      if (params.field_weights[f] == 0.0) continue;
      int tf = static_cast<int>(
          std::count(doc.fields[f].begin(), doc.fields[f].end(), term));
      if (tf == 0) continue;
      double norm = length_norm(params.b, static_cast<double>(doc.fields[f].size()),
                                stats.avg_field_len[f]);
      x += params.field_weights[f] * static_cast<double>(tf) / norm;
    }
    if (x > 0.0) score += bm25_idf(stats, term) * x / (params.k1 + x);
  }
  return score;
}

Bm25fIndex::Bm25fIndex(std::vector<FieldedDocument> docs, Bm25fParams params)
    : params_(std::move(params)) {
  stats_ = build_corpus_stats(docs);
  const std::size_t fields = docs.empty() ? params_.field_weights.size()
                                          : docs[0].fields.size();
  validate_params(params_, fields);
  field_len_.resize(docs.size(), std::vector<double>(fields, 0.0));
  std::map<std::string, std::map<std::pair<int, int>, int>> counts;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (std::size_t f = 0; f < fields; ++f) {
      field_len_[d][f] = static_cast<double>(docs[d].fields[f].size());
      for (const std::string& t : docs[d].fields[f])
        ++counts[t][{static_cast<int>(d), static_cast<int>(f)}];
    }
  }
  for (auto& [term, by_pos] : counts) {
    std::vector<Posting>& list = postings_[term];
    list.reserve(by_pos.size());
    for (auto& [pos, c] : by_pos) list.push_back({pos.first, pos.second, c});
  }
}

double Bm25fIndex::fold_term(int, double x) const {
  return x / (params_.k1 + x);
}

double Bm25fIndex::score(int doc, const std::vector<std::string>& query_terms) const {
  double score = 0.0;
  for (const std::string& term : unique_terms(query_terms)) {
    auto it = postings_.find(term);
    if (it == postings_.end()) continue;
    const std::vector<Posting>& list = it->second;
    auto lo = std::lower_bound(list.begin(), list.end(), doc,
                               [](const Posting& p, int d) { return p.doc < d; });
    double x = 0.0;
    for (; lo != list.end() && lo->doc == doc; ++lo) {
      double w = params_.field_weights[static_cast<std::size_t>(lo->field)];
      if (w == 0.0) continue;
      double norm = length_norm(params_.b,
                                field_len_[static_cast<std::size_t>(doc)]
                                          [static_cast<std::size_t>(lo->field)],
                                stats_.avg_field_len[static_cast<std::size_t>(lo->field)]);
      x += w * static_cast<double>(lo->count) / norm;
    }
    if (x > 0.0) score += bm25_idf(stats_, term) * fold_term(doc, x);
  }
  return score;
}

std::vector<std::pair<double, int>> Bm25fIndex::top_k(
    const std::vector<std::string>& query_terms, int k) const {
  std::map<int, double> acc;  // doc -> score, term folded per term below
  for (const std::string& term : unique_terms(query_terms)) {
    auto it = postings_.find(term);
    if (it == postings_.end()) continue;
    double idf = bm25_idf(stats_, term);
    std::map<int, double> x_by_doc;
    for (const Posting& p : it->second) {
      double w = params_.field_weights[static_cast<std::size_t>(p.field)];
      if (w == 0.0) continue;
      double norm = length_norm(params_.b,
                                field_len_[static_cast<std::size_t>(p.doc)]
                                          [static_cast<std::size_t>(p.field)],
                                stats_.avg_field_len[static_cast<std::size_t>(p.field)]);
      x_by_doc[p.doc] += w * static_cast<double>(p.count) / norm;
    }
    for (auto& [doc, x] : x_by_doc)
      if (x > 0.0) acc[doc] += idf * fold_term(doc, x);
  }
  std::vector<std::pair<double, int>> out(acc.size());
  std::size_t i = 0;
  for (auto& [doc, s] : acc) out[i++] = {s, doc};
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.first > b.first;  // stable keeps doc index ascending on ties
  });
  if (k >= 0 && out.size() > static_cast<std::size_t>(k)) out.resize(static_cast<std::size_t>(k));
  return out;
}

}  // namespace ltr
