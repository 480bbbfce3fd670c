#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ltr {

// Lowercases and splits on any non-alphanumeric character.
std::vector<std::string> tokenize(std::string_view text);

struct Bm25fParams {
  double k1 = 1.2;
  double b = 0.75;
  std::vector<double> field_weights;  // one nonnegative weight per field
};

// A document as parallel token lists, one per field. Every document in a
// corpus must carry the same field count.
struct FieldedDocument {
  std::vector<std::vector<std::string>> fields;
};

struct CorpusStats {
  int doc_count = 0;
  std::vector<double> avg_field_len;
  // Number of documents containing the term in any field.
  std::map<std::string, int, std::less<>> doc_freq;
};

CorpusStats build_corpus_stats(const std::vector<FieldedDocument>& docs);

// idf(t) = ln((N - df + 0.5) / (df + 0.5) + 1); nonnegative for any df <= N.
double bm25_idf(const CorpusStats& stats, std::string_view term);

// BM25F over unique query terms:
//   x_t = sum_f weight_f * tf_tf / (1 - b + b * len_f / avg_len_f)
//   score = sum_t idf(t) * x_t / (k1 + x_t)
// Empty-corpus fields normalize with factor 1. Duplicated query terms count
// once. Empty query scores 0.
double bm25f_score(const std::vector<std::string>& query_terms,
                   const FieldedDocument& doc, const CorpusStats& stats,
                   const Bm25fParams& params);

// Inverted index over a fixed corpus for repeated scoring and retrieval.
class Bm25fIndex {
 public:
  Bm25fIndex(std::vector<FieldedDocument> docs, Bm25fParams params);

  double score(int doc, const std::vector<std::string>& query_terms) const;

  // All documents matching at least one query term, by descending score,
  // ties by ascending doc index, truncated to k.
  std::vector<std::pair<double, int>> top_k(
      const std::vector<std::string>& query_terms, int k) const;

  const CorpusStats& stats() const { return stats_; }
  const Bm25fParams& params() const { return params_; }
  int doc_count() const { return stats_.doc_count; }

 private:
  struct Posting {
    int doc;
    int field;
    int count;
  };
  Bm25fParams params_;
  CorpusStats stats_;
  std::vector<std::vector<double>> field_len_;  // [doc][field]
  std::map<std::string, std::vector<Posting>, std::less<>> postings_;

  double fold_term(int doc, double x) const;
};

}  // namespace ltr
