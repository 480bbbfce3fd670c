#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ltr/dataset.hpp"
#include "ltr/synth.hpp"
#include "ltr/text_match.hpp"

namespace ltr {

// One output of the simulated query-attribute predictor.
struct AttributePrediction {
  std::string key;
  std::string value;
  double confidence = 0.0;  // in [0,1]
};

// Simulates an attribute predictor of the given accuracy on one query.
// Each true constraint yields one prediction: correct with probability
// `accuracy`, otherwise a wrong value of the same key or a spurious key
// (50/50). Confidence is accuracy plus uniform jitter shrinking at the
// endpoints, so accuracy 1 gives exact predictions with confidence 1.
// Deterministic per (seed, query_id); broad queries yield no predictions.
std::vector<AttributePrediction> predict_query_attributes(
    const QueryIntent& intent, const DepartmentVocab& vocab, double accuracy,
    std::uint64_t seed);

// Rejects registries whose feature names reference engagement signals
// (clicks, add-to-cart, orders, revenue, impressions). Label inputs must
// never leak into the feature side.
void validate_engagement_exclusion(const FeatureRegistry& registry);

// Fixed layout: query token and constraint counts, four BM25F scores (all
// fields, title, description, brand), sales count, review count, rating,
// price, then per attribute key a key-match and a value-match feature
// (confidence-valued, attribute_key set). Sales, reviews and rating carry
// the popularity flag.
FeatureRegistry build_default_registry(const std::vector<DepartmentVocab>& vocabs);

// Stateless after construction; extraction is safe to parallelize.
class FeatureExtractor {
 public:
  // Corpus statistics are frozen from the full catalog. The registry must
  // contain the default layout's named features; unknown attribute keys in
  // predictions are a schema mismatch at extract time.
  FeatureExtractor(const WorldSpec& spec,
                   const std::vector<SyntheticProduct>& catalog,
                   FeatureRegistry registry);

  const FeatureRegistry& registry() const { return registry_; }

  // Match features combine duplicate-key predictions by maximum, so the
  // key-match value always dominates the value-match value.
  FeatureVector extract(const QueryIntent& query,
                        const std::vector<AttributePrediction>& predictions,
                        const SyntheticProduct& product) const;

 private:
  FeatureRegistry registry_;
  CorpusStats stats_;
  Bm25fParams all_fields_, title_only_, description_only_, brand_only_;
  std::map<std::string, std::pair<int, int>> match_ids_;  // key -> (am, avm)
  int f_query_tokens_, f_query_constraints_, f_bm25_all_, f_bm25_title_,
      f_bm25_description_, f_bm25_brand_, f_sales_, f_reviews_, f_rating_,
      f_price_;
};

// Feature ids to retain when training must not rely on attribute features
// absent from the test set: every non-attribute feature, plus attribute
// features nonzero on at least max(1, ceil(min_support * |test|)) test
// instances. Train and test must share a registry; empty test is an error.
// Idempotent: re-selecting on the projected data keeps everything.
std::vector<int> intersection_feature_selection(const DatasetView& train,
                                                const DatasetView& test,
                                                double min_support = 0.0);

// Ids of every feature not flagged as popularity, for ablation training.
std::vector<int> non_popularity_features(const FeatureRegistry& registry);

}  // namespace ltr
