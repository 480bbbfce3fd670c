#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ltr/config.hpp"
#include "ltr/dataset.hpp"
#include "ltr/letor_io.hpp"
#include "ltr/text_match.hpp"

namespace ltr {

// Behavioral constants of the simulated shopper population. Funnel
// probabilities are always clamped to [0,1] after noise.
struct UserModel {
  double click_base = 0.35;   // click | impression scale
  double atc_base = 1.1;      // add-to-cart | click scale
  double order_base = 1.1;    // order | add-to-cart scale
  double weight_match = 0.65;
  double weight_quality = 0.05;
  double weight_popularity = 0.30;
  double position_bias_exponent = 0.2;  // view and click attenuation 1/rank^beta
  double noise_sigma = 0.2;             // lognormal noise on funnel probabilities
  // Conversion is superlinear in page utility: weak matches get browsed but
  // rarely bought. Applied as utility^curvature in the atc and order stages.
  double conversion_curvature = 2.0;
  // Price acceptance is a bell over log price centered on the catalog's
  // typical price exp(price_mu): suspiciously cheap items read as low quality
  // and premium items deter, so conversion is not monotone in price. Applied
  // at the cart stage and again at checkout. Smaller width, sharper
  // preference.
  double price_preference_width = 0.35;
};

struct WorldSpec {
  std::uint64_t seed = 42;
  int departments = 26;
  int products_per_department = 1000;
  int query_count = 520;
  // Attribute keys are distributed round-robin over departments, vocabularies
  // pairwise disjoint. 276 keys put the default registry at 562 features.
  int attr_keys_total = 276;
  int values_per_key = 5;
  int nouns_per_department = 30;
  int adjective_count = 20;  // shared across departments
  double broad_query_fraction = 0.25;
  double session_min = 220.0;     // discrete power-law scale
  double session_exponent = 1.5;  // power-law shape
  double session_cap = 10000.0;
  int candidate_pool = 70;         // retrieval depth of the logging ranker
  int impression_threshold = 100;  // downstream label filter the world targets
  double title_weight = 3.0;  // BM25F field weights of the logging ranker
  double description_weight = 1.0;
  double brand_weight = 2.0;
  double price_mu = 3.6;  // lognormal price, clamped to [5, 500]
  double price_sigma = 0.35;
  UserModel user;

  static WorldSpec from_config(const KeyValueConfig& cfg);
  KeyValueConfig to_config() const;
  void validate() const;
};

// Token universe of one department. All token text is formulaic, so vocabs
// rebuild identically from the spec alone.
struct DepartmentVocab {
  std::string name;
  std::vector<std::string> nouns;
  std::vector<std::string> keys;  // keys[0] doubles as the brand attribute
  std::map<std::string, std::vector<std::string>> values;
};

std::vector<DepartmentVocab> build_department_vocabs(const WorldSpec& spec);

struct SyntheticProduct {
  std::string doc_id;
  int department = 0;
  std::vector<std::string> title;
  std::vector<std::string> description;
  std::string brand;  // empty when the brand attribute is absent
  std::map<std::string, std::string> attributes;
  double price = 0.0;
  double quality = 0.0;     // in [0,1], page-level appeal
  double popularity = 0.0;  // in [0,1], demand prior
  long long sales_count = 0;  // accumulated warm-up orders
  double rating = 0.0;        // 1..5 in half steps, noisy view of quality
  long long review_count = 0;
};

struct AttributeConstraint {
  std::string value;
  double criticality = 1.0;  // in (0,1], weight of this requirement
};

struct QueryIntent {
  std::string query_id;
  int department = 0;
  std::vector<std::string> terms;
  std::map<std::string, AttributeConstraint> constraints;
  long long sessions = 0;
};

struct SyntheticWorld {
  WorldSpec spec;
  std::vector<DepartmentVocab> vocabs;
  std::vector<SyntheticProduct> catalog;
  std::vector<QueryIntent> queries;
  // candidates[q] = catalog indices in logging-ranker order (position 1 first)
  std::vector<std::vector<int>> candidates;
  std::vector<EngagementRecord> log;
  std::vector<CrowdJudgment> judgments;
};

std::vector<SyntheticProduct> generate_catalog(
    const WorldSpec& spec, const std::vector<DepartmentVocab>& vocabs);
std::vector<QueryIntent> generate_queries(
    const WorldSpec& spec, const std::vector<DepartmentVocab>& vocabs);

// Criticality-weighted fraction of satisfied constraints, 1 when the query
// has none. Department is not consulted here.
double intent_match(const QueryIntent& query, const SyntheticProduct& product);

// Hard zero across departments, otherwise the normalized weighted blend of
// match, quality, and popularity; equals 1 at (match, quality, pop) = 1.
double true_utility(const UserModel& user, const QueryIntent& query,
                    const SyntheticProduct& product);
// What a shopper can judge from the result list: the quality term is
// omitted because it only reveals itself on the product page.
double title_utility(const UserModel& user, const QueryIntent& query,
                     const SyntheticProduct& product);

// Fields: {title, description, brand}.
FieldedDocument to_fielded_document(const SyntheticProduct& product);
Bm25fIndex build_logging_index(const WorldSpec& spec,
                               const std::vector<SyntheticProduct>& catalog);
std::vector<std::vector<int>> retrieve_candidates(
    const Bm25fIndex& index, const std::vector<QueryIntent>& queries,
    int depth);

// Runs the session funnel over world.candidates (truncated to
// retrieval_depth). Per query and rank p: impressions ~ B(sessions, p^-beta),
// clicks ~ B(impressions, clamp(click_base * title_utility * p^-beta * noise)),
// atc ~ B(clicks, clamp(atc_base * utility^curvature * price_accept * noise)),
// orders ~ B(atc, clamp(order_base * utility^curvature * price_accept * noise)),
// revenue = orders * price. Sessions are floored at
// 2 * impression_threshold_target * retrieval_depth^beta so even the deepest
// retrieved rank clears the downstream impression filter.
// Deterministic per seed; queries use independent derived streams.
std::vector<EngagementRecord> simulate_sessions(const SyntheticWorld& world,
                                                int retrieval_depth,
                                                int impression_threshold_target,
                                                std::uint64_t seed);

// Crowd ratings approximate constraint match (not utility): workers judge
// relevance and cannot see quality or demand. Cross-department pairs are
// irrelevant before noise; worker noise can bump one to at most a low grade.
std::vector<CrowdJudgment> generate_judgments(const SyntheticWorld& world,
                                              std::uint64_t seed);

// Full assembly: vocabs, catalog, queries, retrieval, a warm-up epoch that
// fills sales_count / rating / review_count, the main engagement log, and
// crowd judgments. Deterministic function of the spec (seed included).
SyntheticWorld build_world(const WorldSpec& spec);

// World directory round-trip: world.meta (spec), catalog.csv, queries.csv,
// log.csv, utility.csv (per-pair truth and rank), judgments.csv.
void write_world(const SyntheticWorld& world, const std::filesystem::path& dir);
SyntheticWorld read_world(const std::filesystem::path& dir);

}  // namespace ltr
