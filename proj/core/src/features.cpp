#include "ltr/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "ltr/error.hpp"
#include "ltr/rng.hpp"

namespace ltr {

std::vector<AttributePrediction> predict_query_attributes(
    const QueryIntent& intent, const DepartmentVocab& vocab, double accuracy,
    std::uint64_t seed) {
  if (accuracy < 0.0 || accuracy > 1.0)
    throw ConfigError("predictor accuracy must be in [0,1]");
  Rng rng(derive_seed(derive_seed(seed, "attrpred"), intent.query_id));
  double jitter = 0.5 * std::min(accuracy, 1.0 - accuracy);
  std::vector<AttributePrediction> out;
  for (const auto& [key, constraint] : intent.constraints) {
    AttributePrediction p;
    p.confidence = accuracy + rng.uniform(-jitter, jitter);
    p.confidence = std::clamp(p.confidence, 0.0, 1.0);
    if (rng.uniform() < accuracy) {
      p.key = key;
      p.value = constraint.value;
    } else if (rng.uniform() < 0.5 || vocab.keys.size() < 2) {
      // Wrong value of the right key. values_per_key >= 2 guarantees an
      // alternative exists.
      const std::vector<std::string>& vals = vocab.values.at(key);
      std::size_t pick = rng.uniform_int(vals.size() - 1);
      std::size_t true_idx = static_cast<std::size_t>(
          std::find(vals.begin(), vals.end(), constraint.value) - vals.begin());
      if (pick >= true_idx && true_idx < vals.size()) ++pick;
      p.key = key;
      p.value = vals[pick];
    } else {
      // Spurious attribute: some other key of the same department.
      std::size_t ki = static_cast<std::size_t>(
          std::find(vocab.keys.begin(), vocab.keys.end(), key) -
          vocab.keys.begin());
      std::size_t pick = rng.uniform_int(vocab.keys.size() - 1);
      if (pick >= ki && ki < vocab.keys.size()) ++pick;
      p.key = vocab.keys[pick];
      const std::vector<std::string>& vals = vocab.values.at(p.key);
      p.value = vals[rng.uniform_int(vals.size())];
    }
    out.push_back(std::move(p));
  }
  return out;
}

void validate_engagement_exclusion(const FeatureRegistry& registry) {
  static const std::vector<std::string> forbidden = {
      "click",  "clicks",      "impression", "impressions", "ctr", "atc",
      "atcr",   "order",       "orders",     "revenue",     "revr"};
  for (const FeatureEntry& e : registry.entries()) {
    std::string token;
    auto flush = [&token, &e] {
      if (!token.empty() &&
          std::find(forbidden.begin(), forbidden.end(), token) != forbidden.end())
        throw ConfigError("feature '" + e.name + "' references engagement data");
      token.clear();
    };
    for (char c : e.name) {
      if (std::isalnum(static_cast<unsigned char>(c)))
        token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      else
        flush();
    }
    flush();
  }
}

FeatureRegistry build_default_registry(const std::vector<DepartmentVocab>& vocabs) {
  std::vector<FeatureEntry> entries;
  auto add = [&entries](std::string name, FeatureGroup group,
                        std::string attribute_key = "", bool popularity = false) {
    FeatureEntry e;
    e.id = static_cast<int>(entries.size()) + 1;
    e.name = std::move(name);
    e.group = group;
    e.attribute_key = std::move(attribute_key);
    e.popularity = popularity;
    entries.push_back(std::move(e));
  };
  add("query_token_count", FeatureGroup::query);
  add("query_constraint_count", FeatureGroup::query);
  add("bm25f_all", FeatureGroup::query_document);
  add("bm25_title", FeatureGroup::query_document);
  add("bm25_description", FeatureGroup::query_document);
  add("bm25_brand", FeatureGroup::query_document);
  add("sales_count", FeatureGroup::document, "", true);
  add("review_count", FeatureGroup::document, "", true);
  add("rating", FeatureGroup::document, "", true);
  add("price", FeatureGroup::document);
  for (const DepartmentVocab& v : vocabs) {
    for (const std::string& key : v.keys) {
      add("am:" + key, FeatureGroup::query_document, key);
      add("avm:" + key, FeatureGroup::query_document, key);
    }
  }
  FeatureRegistry registry(std::move(entries));
  validate_engagement_exclusion(registry);
  return registry;
}

FeatureExtractor::FeatureExtractor(const WorldSpec& spec,
                                   const std::vector<SyntheticProduct>& catalog,
                                   FeatureRegistry registry)
    : registry_(std::move(registry)) {
  std::vector<FieldedDocument> docs;
  docs.reserve(catalog.size());
  for (const SyntheticProduct& p : catalog) docs.push_back(to_fielded_document(p));
  stats_ = build_corpus_stats(docs);
  all_fields_.field_weights = {spec.title_weight, spec.description_weight,
                               spec.brand_weight};
  title_only_.field_weights = {1.0, 0.0, 0.0};
  description_only_.field_weights = {0.0, 1.0, 0.0};
  brand_only_.field_weights = {0.0, 0.0, 1.0};

  auto need = [this](const char* name) {
    std::optional<int> id = registry_.id_of(name);
    if (!id) throw ConfigError(std::string("registry lacks feature ") + name);
    return *id;
  };
  f_query_tokens_ = need("query_token_count");
  f_query_constraints_ = need("query_constraint_count");
  f_bm25_all_ = need("bm25f_all");
  f_bm25_title_ = need("bm25_title");
  f_bm25_description_ = need("bm25_description");
  f_bm25_brand_ = need("bm25_brand");
  f_sales_ = need("sales_count");
  f_reviews_ = need("review_count");
  f_rating_ = need("rating");
  f_price_ = need("price");

  std::map<std::string, int> key_match, value_match;
  for (const FeatureEntry& e : registry_.entries()) {
    if (e.attribute_key.empty()) continue;
    if (e.name == "am:" + e.attribute_key)
      key_match[e.attribute_key] = e.id;
    else if (e.name == "avm:" + e.attribute_key)
      value_match[e.attribute_key] = e.id;
    else
      throw ConfigError("unrecognized attribute feature " + e.name);
  }
  for (const auto& [key, am] : key_match) {
    auto it = value_match.find(key);
    if (it == value_match.end())
      throw ConfigError("attribute " + key + " lacks a value-match feature");
    match_ids_[key] = {am, it->second};
  }
  if (match_ids_.size() != value_match.size())
    throw ConfigError("attribute key-match and value-match features disagree");
}

FeatureVector FeatureExtractor::extract(
    const QueryIntent& query, const std::vector<AttributePrediction>& predictions,
    const SyntheticProduct& product) const {
  FeatureVector fv(static_cast<std::size_t>(registry_.feature_count()));
  fv.set(f_query_tokens_, static_cast<double>(query.terms.size()));
  fv.set(f_query_constraints_, static_cast<double>(query.constraints.size()));
  FieldedDocument doc = to_fielded_document(product);
  fv.set(f_bm25_all_, bm25f_score(query.terms, doc, stats_, all_fields_));
  fv.set(f_bm25_title_, bm25f_score(query.terms, doc, stats_, title_only_));
  fv.set(f_bm25_description_, bm25f_score(query.terms, doc, stats_, description_only_));
  fv.set(f_bm25_brand_, bm25f_score(query.terms, doc, stats_, brand_only_));
  fv.set(f_sales_, static_cast<double>(product.sales_count));
  fv.set(f_reviews_, static_cast<double>(product.review_count));
  fv.set(f_rating_, product.rating);
  fv.set(f_price_, product.price);
  for (const AttributePrediction& p : predictions) {
    auto it = match_ids_.find(p.key);
    if (it == match_ids_.end())
      throw DataError("prediction for attribute absent from registry: " + p.key);
    auto ait = product.attributes.find(p.key);
    if (ait == product.attributes.end()) continue;
    auto [am, avm] = it->second;
    if (p.confidence > fv.at(am)) fv.set(am, p.confidence);
    if (ait->second == p.value && p.confidence > fv.at(avm))
      fv.set(avm, p.confidence);
  }
  return fv;
}

std::vector<int> intersection_feature_selection(const DatasetView& train,
                                                const DatasetView& test,
                                                double min_support) {
  if (min_support < 0.0 || min_support > 1.0)
    throw ConfigError("min_support must be in [0,1]");
  if (train.registry().fingerprint() != test.registry().fingerprint())
    throw DataError("intersection selection needs a shared registry");
  std::size_t n_test = test.instance_count();
  if (n_test == 0) throw DataError("intersection selection needs a nonempty test set");
  const FeatureRegistry& reg = test.registry();
  int d = reg.feature_count();
  std::vector<long long> nonzero(static_cast<std::size_t>(d), 0);
  for (std::size_t gi = 0; gi < test.group_count(); ++gi)
    for (const RankingInstance& inst : test.group(gi).instances)
      for (int fid = 1; fid <= d; ++fid)
        if (inst.features.at(fid) != 0.0) ++nonzero[static_cast<std::size_t>(fid - 1)];
  long long needed = std::max<long long>(
      1, static_cast<long long>(std::ceil(min_support * static_cast<double>(n_test))));
  std::vector<int> keep;
  for (int fid = 1; fid <= d; ++fid) {
    if (reg.entry(fid).attribute_key.empty() ||
        nonzero[static_cast<std::size_t>(fid - 1)] >= needed)
      keep.push_back(fid);
  }
  return keep;
}

std::vector<int> non_popularity_features(const FeatureRegistry& registry) {
  std::vector<int> keep;
  for (const FeatureEntry& e : registry.entries())
    if (!e.popularity) keep.push_back(e.id);
  return keep;
}

}  // namespace ltr
