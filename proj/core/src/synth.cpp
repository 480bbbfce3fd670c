#include "ltr/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ltr/error.hpp"
#include "ltr/rng.hpp"

namespace ltr {

namespace {

double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

std::string zero_padded(const char* prefix, int width, int n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%0*d", prefix, width, n);
  return buf;
}

// Mean-one lognormal factor so noise perturbs without inflating rates.
double noise_factor(Rng& rng, double sigma) {
  if (sigma <= 0.0) return 1.0;
  return std::exp(sigma * rng.normal() - 0.5 * sigma * sigma);
}

long long draw_sessions(const WorldSpec& spec, Rng& rng) {
  double u = 1.0 - rng.uniform();  // (0,1], keeps the power law finite
  double s = spec.session_min * std::pow(u, -1.0 / spec.session_exponent);
  if (s > spec.session_cap) s = spec.session_cap;
  return static_cast<long long>(std::floor(s));
}

}  // namespace

WorldSpec WorldSpec::from_config(const KeyValueConfig& cfg) {
  WorldSpec s;
  s.seed = static_cast<std::uint64_t>(cfg.get_int("world.seed", static_cast<long long>(s.seed)));
  s.departments = static_cast<int>(cfg.get_int("world.departments", s.departments));
  s.products_per_department = static_cast<int>(
      cfg.get_int("world.products-per-department", s.products_per_department));
  s.query_count = static_cast<int>(cfg.get_int("world.queries", s.query_count));
  s.attr_keys_total = static_cast<int>(cfg.get_int("world.attr-keys", s.attr_keys_total));
  s.values_per_key = static_cast<int>(cfg.get_int("world.values-per-key", s.values_per_key));
  s.nouns_per_department =
      static_cast<int>(cfg.get_int("world.nouns-per-department", s.nouns_per_department));
  s.adjective_count = static_cast<int>(cfg.get_int("world.adjectives", s.adjective_count));
  s.broad_query_fraction = cfg.get_double("world.broad-query-fraction", s.broad_query_fraction);
  s.session_min = cfg.get_double("world.session-min", s.session_min);
  s.session_exponent = cfg.get_double("world.session-exponent", s.session_exponent);
  s.session_cap = cfg.get_double("world.session-cap", s.session_cap);
  s.candidate_pool = static_cast<int>(cfg.get_int("world.candidate-pool", s.candidate_pool));
  s.impression_threshold = static_cast<int>(
      cfg.get_int("world.impression-threshold", s.impression_threshold));
  s.title_weight = cfg.get_double("retrieval.title-weight", s.title_weight);
  s.description_weight = cfg.get_double("retrieval.description-weight", s.description_weight);
  s.brand_weight = cfg.get_double("retrieval.brand-weight", s.brand_weight);
  s.price_mu = cfg.get_double("world.price-mu", s.price_mu);
  s.price_sigma = cfg.get_double("world.price-sigma", s.price_sigma);
  s.user.click_base = cfg.get_double("user.click-base", s.user.click_base);
  s.user.atc_base = cfg.get_double("user.atc-base", s.user.atc_base);
  s.user.order_base = cfg.get_double("user.order-base", s.user.order_base);
  s.user.weight_match = cfg.get_double("user.weight-match", s.user.weight_match);
  s.user.weight_quality = cfg.get_double("user.weight-quality", s.user.weight_quality);
  s.user.weight_popularity = cfg.get_double("user.weight-popularity", s.user.weight_popularity);
  s.user.position_bias_exponent = cfg.get_double("user.position-bias", s.user.position_bias_exponent);
  s.user.noise_sigma = cfg.get_double("user.noise-sigma", s.user.noise_sigma);
  s.user.conversion_curvature =
      cfg.get_double("user.conversion-curvature", s.user.conversion_curvature);
  s.user.price_preference_width = cfg.get_double("user.price-preference-width",
                                                 s.user.price_preference_width);
  s.validate();
  return s;
}

KeyValueConfig WorldSpec::to_config() const {
  KeyValueConfig cfg;
  auto set_int = [&cfg](std::string_view k, long long v) { cfg.set(k, std::to_string(v)); };
  auto set_real = [&cfg](std::string_view k, double v) { cfg.set(k, format_real(v)); };
  set_int("world.seed", static_cast<long long>(seed));
  set_int("world.departments", departments);
  set_int("world.products-per-department", products_per_department);
  set_int("world.queries", query_count);
  set_int("world.attr-keys", attr_keys_total);
  set_int("world.values-per-key", values_per_key);
  set_int("world.nouns-per-department", nouns_per_department);
  set_int("world.adjectives", adjective_count);
  set_real("world.broad-query-fraction", broad_query_fraction);
  set_real("world.session-min", session_min);
  set_real("world.session-exponent", session_exponent);
  set_real("world.session-cap", session_cap);
  set_int("world.candidate-pool", candidate_pool);
  set_int("world.impression-threshold", impression_threshold);
  set_real("retrieval.title-weight", title_weight);
  set_real("retrieval.description-weight", description_weight);
  set_real("retrieval.brand-weight", brand_weight);
  set_real("world.price-mu", price_mu);
  set_real("world.price-sigma", price_sigma);
  set_real("user.click-base", user.click_base);
  set_real("user.atc-base", user.atc_base);
  set_real("user.order-base", user.order_base);
  set_real("user.weight-match", user.weight_match);
  set_real("user.weight-quality", user.weight_quality);
  set_real("user.weight-popularity", user.weight_popularity);
  set_real("user.position-bias", user.position_bias_exponent);
  set_real("user.noise-sigma", user.noise_sigma);
  set_real("user.conversion-curvature", user.conversion_curvature);
  set_real("user.price-preference-width", user.price_preference_width);
  return cfg;
}

void WorldSpec::validate() const {
  if (departments < 1) throw ConfigError("world.departments must be >= 1");
  if (products_per_department < 1)
    throw ConfigError("world.products-per-department must be >= 1");
  if (query_count < 0) throw ConfigError("world.queries must be >= 0");
  if (attr_keys_total < departments)
    throw ConfigError("world.attr-keys must be >= world.departments");
  if (values_per_key < 2) throw ConfigError("world.values-per-key must be >= 2");
  if (nouns_per_department < 5)  // descriptions draw five distinct nouns
    throw ConfigError("world.nouns-per-department must be >= 5");
  if (adjective_count < 1) throw ConfigError("world.adjectives must be >= 1");
  if (broad_query_fraction < 0.0 || broad_query_fraction > 1.0)
    throw ConfigError("world.broad-query-fraction must be in [0,1]");
  if (session_min < 1.0) throw ConfigError("world.session-min must be >= 1");
  if (session_exponent <= 0.0) throw ConfigError("world.session-exponent must be > 0");
  if (session_cap < session_min)
    throw ConfigError("world.session-cap must be >= world.session-min");
  if (candidate_pool < 1) throw ConfigError("world.candidate-pool must be >= 1");
  if (impression_threshold < 1)
    throw ConfigError("world.impression-threshold must be >= 1");
  if (user.click_base <= 0.0 || user.atc_base <= 0.0 || user.order_base <= 0.0)
    throw ConfigError("user funnel bases must be > 0");
  if (user.weight_match < 0.0 || user.weight_quality < 0.0 ||
      user.weight_popularity < 0.0 ||
      user.weight_match + user.weight_quality + user.weight_popularity <= 0.0)
    throw ConfigError("utility weights must be nonnegative with a positive sum");
  if (user.position_bias_exponent < 0.0)
    throw ConfigError("user.position-bias must be >= 0");
  if (user.noise_sigma < 0.0) throw ConfigError("user.noise-sigma must be >= 0");
  if (user.conversion_curvature <= 0.0)
    throw ConfigError("user.conversion-curvature must be > 0");
  if (user.price_preference_width <= 0.0)
    throw ConfigError("user.price-preference-width must be > 0");
}

std::vector<DepartmentVocab> build_department_vocabs(const WorldSpec& spec) {
  std::vector<DepartmentVocab> vocabs(static_cast<std::size_t>(spec.departments));
  int base_keys = spec.attr_keys_total / spec.departments;
  int extra = spec.attr_keys_total % spec.departments;  // first depts get one more
  for (int d = 0; d < spec.departments; ++d) {
    DepartmentVocab& v = vocabs[static_cast<std::size_t>(d)];
    v.name = zero_padded("dept", 2, d);
    std::string stem = zero_padded("d", 2, d);
    for (int i = 0; i < spec.nouns_per_department; ++i)
      v.nouns.push_back(stem + zero_padded("w", 2, i));
    int keys = base_keys + (d < extra ? 1 : 0);
    for (int i = 0; i < keys; ++i) {
      std::string key = stem + zero_padded("k", 2, i);
      std::vector<std::string>& vals = v.values[key];
      for (int j = 0; j < spec.values_per_key; ++j)
        vals.push_back(key + zero_padded("v", 1, j));
      v.keys.push_back(std::move(key));
    }
  }
  return vocabs;
}

namespace {

std::vector<std::string> shared_adjectives(const WorldSpec& spec) {
  std::vector<std::string> adj;
  for (int i = 0; i < spec.adjective_count; ++i)
    adj.push_back(zero_padded("adj", 2, i));
  return adj;
}

// k distinct picks from pool, order of draw preserved.
std::vector<std::string> pick_distinct(Rng& rng,
                                       const std::vector<std::string>& pool,
                                       int k) {
  std::vector<std::uint32_t> ids =
      rng.sample_without_replacement(static_cast<std::uint32_t>(pool.size()),
                                     static_cast<std::uint32_t>(k));
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (std::uint32_t i : ids) out.push_back(pool[i]);
  return out;
}

}  // namespace

std::vector<SyntheticProduct> generate_catalog(
    const WorldSpec& spec, const std::vector<DepartmentVocab>& vocabs) {
  Rng rng(derive_seed(spec.seed, "catalog"));
  std::vector<std::string> adjectives = shared_adjectives(spec);
  std::vector<SyntheticProduct> catalog;
  catalog.reserve(static_cast<std::size_t>(spec.departments) *
                  static_cast<std::size_t>(spec.products_per_department));
  int next_id = 0;
  for (int d = 0; d < spec.departments; ++d) {
    const DepartmentVocab& vocab = vocabs[static_cast<std::size_t>(d)];
    for (int i = 0; i < spec.products_per_department; ++i) {
      SyntheticProduct p;
      p.doc_id = zero_padded("P", 5, next_id++);
      p.department = d;
      for (const std::string& key : vocab.keys) {
        if (rng.uniform() < 0.9) {
          const std::vector<std::string>& vals = vocab.values.at(key);
          p.attributes[key] = vals[rng.uniform_int(vals.size())];
        }
      }
      if (auto it = p.attributes.find(vocab.keys[0]);
          it != p.attributes.end() && rng.uniform() < 0.7)
        p.brand = it->second;
      int noun_count = 2 + static_cast<int>(rng.uniform_int(2));
      p.title = pick_distinct(rng, vocab.nouns, noun_count);
      if (rng.uniform() < 0.5)
        p.title.push_back(adjectives[rng.uniform_int(adjectives.size())]);
      p.description = pick_distinct(rng, vocab.nouns, 5);
      for (int a = 0; a < 2; ++a)
        p.description.push_back(adjectives[rng.uniform_int(adjectives.size())]);
      for (const auto& [key, value] : p.attributes) p.description.push_back(value);
      p.quality = std::pow(rng.uniform(), 0.8);
      p.popularity = std::pow(rng.uniform(), 2.0);
      double price = std::exp(spec.price_mu + spec.price_sigma * rng.normal());
      price = std::min(500.0, std::max(5.0, price));
      p.price = std::round(price * 100.0) / 100.0;
      catalog.push_back(std::move(p));
    }
  }
  return catalog;
}

std::vector<QueryIntent> generate_queries(
    const WorldSpec& spec, const std::vector<DepartmentVocab>& vocabs) {
  Rng rng(derive_seed(spec.seed, "queries"));
  std::vector<std::string> adjectives = shared_adjectives(spec);
  std::vector<QueryIntent> queries;
  queries.reserve(static_cast<std::size_t>(spec.query_count));
  for (int q = 0; q < spec.query_count; ++q) {
    QueryIntent intent;
    // Decimal ids so LETOR serialization (qid:<int>) round-trips losslessly.
    intent.query_id = std::to_string(q + 1);
    intent.department = q % spec.departments;  // round-robin keeps coverage
    const DepartmentVocab& vocab = vocabs[static_cast<std::size_t>(intent.department)];
    int noun_count = 1 + static_cast<int>(rng.uniform_int(2));
    intent.terms = pick_distinct(rng, vocab.nouns, noun_count);
    if (rng.uniform() < 0.2)
      intent.terms.push_back(adjectives[rng.uniform_int(adjectives.size())]);
    if (rng.uniform() >= spec.broad_query_fraction) {
      int n_constraints = 1 + static_cast<int>(rng.uniform_int(3));
      for (const std::string& key : pick_distinct(rng, vocab.keys, n_constraints)) {
        const std::vector<std::string>& vals = vocab.values.at(key);
        AttributeConstraint c;
        c.value = vals[rng.uniform_int(vals.size())];
        c.criticality = rng.uniform(0.5, 1.0);
        intent.terms.push_back(c.value);  // shoppers type the values they want
        intent.constraints[key] = std::move(c);
      }
    }
    intent.sessions = draw_sessions(spec, rng);
    queries.push_back(std::move(intent));
  }
  return queries;
}

double intent_match(const QueryIntent& query, const SyntheticProduct& product) {
  if (query.constraints.empty()) return 1.0;
  double total = 0.0, satisfied = 0.0;
  for (const auto& [key, c] : query.constraints) {
    total += c.criticality;
    auto it = product.attributes.find(key);
    if (it != product.attributes.end() && it->second == c.value)
      satisfied += c.criticality;
  }
  return satisfied / total;
}

double true_utility(const UserModel& user, const QueryIntent& query,
                    const SyntheticProduct& product) {
  if (query.department != product.department) return 0.0;
  double wsum = user.weight_match + user.weight_quality + user.weight_popularity;
  return (user.weight_match * intent_match(query, product) +
          user.weight_quality * product.quality +
          user.weight_popularity * product.popularity) /
         wsum;
}

double title_utility(const UserModel& user, const QueryIntent& query,
                     const SyntheticProduct& product) {
  if (query.department != product.department) return 0.0;
  double wsum = user.weight_match + user.weight_popularity;
  if (wsum <= 0.0) return 0.0;
  return (user.weight_match * intent_match(query, product) +
          user.weight_popularity * product.popularity) /
         wsum;
}

FieldedDocument to_fielded_document(const SyntheticProduct& product) {
  FieldedDocument doc;
  doc.fields.resize(3);
  doc.fields[0] = product.title;
  doc.fields[1] = product.description;
  if (!product.brand.empty()) doc.fields[2].push_back(product.brand);
  return doc;
}

Bm25fIndex build_logging_index(const WorldSpec& spec,
                               const std::vector<SyntheticProduct>& catalog) {
  std::vector<FieldedDocument> docs;
  docs.reserve(catalog.size());
  for (const SyntheticProduct& p : catalog) docs.push_back(to_fielded_document(p));
  Bm25fParams params;
  params.field_weights = {spec.title_weight, spec.description_weight,
                          spec.brand_weight};
  return Bm25fIndex(std::move(docs), std::move(params));
}

std::vector<std::vector<int>> retrieve_candidates(
    const Bm25fIndex& index, const std::vector<QueryIntent>& queries, int depth) {
  std::vector<std::vector<int>> out;
  out.reserve(queries.size());
  for (const QueryIntent& q : queries) {
    std::vector<std::pair<double, int>> hits = index.top_k(q.terms, depth);
    std::vector<int> docs(hits.size());
    for (std::size_t i = 0; i < hits.size(); ++i) docs[i] = hits[i].second;
    out.push_back(std::move(docs));
  }
  return out;
}

std::vector<EngagementRecord> simulate_sessions(const SyntheticWorld& world,
                                                int retrieval_depth,
                                                int impression_threshold_target,
                                                std::uint64_t seed) {
  if (world.candidates.size() != world.queries.size())
    throw DataError("world candidates not populated");
  const UserModel& user = world.spec.user;
  long long session_floor = static_cast<long long>(
      std::ceil(2.0 * impression_threshold_target *
                std::pow(static_cast<double>(std::max(retrieval_depth, 1)),
                         user.position_bias_exponent)));
  std::vector<EngagementRecord> log;
  for (std::size_t qi = 0; qi < world.queries.size(); ++qi) {
    const QueryIntent& query = world.queries[qi];
    Rng rng(derive_seed(seed, query.query_id));
    long long sessions = std::max(query.sessions, session_floor);
    const std::vector<int>& cands = world.candidates[qi];
    std::size_t depth = std::min(cands.size(), static_cast<std::size_t>(retrieval_depth));
    for (std::size_t pos = 0; pos < depth; ++pos) {
      const SyntheticProduct& product =
          world.catalog[static_cast<std::size_t>(cands[pos])];
      double bias = std::pow(static_cast<double>(pos + 1),
                             -user.position_bias_exponent);
      EngagementRecord r;
      r.query_id = query.query_id;
      r.doc_id = product.doc_id;
      r.impressions = rng.binomial(sessions, bias);
      r.impressions_top2 = pos < 2 ? r.impressions : 0;
      double u_title = title_utility(user, query, product);
      double u_page = true_utility(user, query, product);
      double p_click = clamp01(user.click_base * u_title * bias *
                               noise_factor(rng, user.noise_sigma));
      r.clicks = rng.binomial(r.impressions, p_click);
      double u_conv = std::pow(u_page, user.conversion_curvature);
      double rel = std::log(product.price) - world.spec.price_mu;
      double pw = user.price_preference_width;
      double price_accept = std::exp(-0.5 * (rel / pw) * (rel / pw));
      double p_atc = clamp01(user.atc_base * u_conv * price_accept *
                             noise_factor(rng, user.noise_sigma));
      r.atc = rng.binomial(r.clicks, p_atc);
      // the price gets a second look at checkout
      double p_order = clamp01(user.order_base * u_conv * price_accept *
                               noise_factor(rng, user.noise_sigma));
      r.orders = rng.binomial(r.atc, p_order);
      r.revenue = std::round(static_cast<double>(r.orders) * product.price * 100.0) / 100.0;
      log.push_back(std::move(r));
    }
  }
  return log;
}

std::vector<CrowdJudgment> generate_judgments(const SyntheticWorld& world,
                                              std::uint64_t seed) {
  std::vector<CrowdJudgment> out;
  for (std::size_t qi = 0; qi < world.queries.size(); ++qi) {
    const QueryIntent& query = world.queries[qi];
    Rng rng(derive_seed(derive_seed(seed, "judgments"), query.query_id));
    for (int doc : world.candidates[qi]) {
      const SyntheticProduct& product = world.catalog[static_cast<std::size_t>(doc)];
      double relevance = query.department == product.department
                             ? intent_match(query, product)
                             : 0.0;
      double noisy = 4.0 * relevance + 0.35 * rng.normal();
      int rating = static_cast<int>(std::lround(noisy));
      out.push_back({query.query_id, product.doc_id,
                     std::clamp(rating, 0, 4)});
    }
  }
  return out;
}

SyntheticWorld build_world(const WorldSpec& spec) {
  spec.validate();
  SyntheticWorld world;
  world.spec = spec;
  world.vocabs = build_department_vocabs(spec);
  world.catalog = generate_catalog(spec, world.vocabs);
  world.queries = generate_queries(spec, world.vocabs);
  Bm25fIndex index = build_logging_index(spec, world.catalog);
  world.candidates = retrieve_candidates(index, world.queries, spec.candidate_pool);

  // Warm-up epoch: a separate simulated era whose orders become the catalog's
  // sales history. The main log never feeds back into features.
  std::vector<EngagementRecord> warmup = simulate_sessions(
      world, spec.candidate_pool, spec.impression_threshold,
      derive_seed(spec.seed, "warmup"));
  std::map<std::string, long long> orders_by_doc;
  for (const EngagementRecord& r : warmup) orders_by_doc[r.doc_id] += r.orders;
  Rng rng(derive_seed(spec.seed, "derived"));
  for (SyntheticProduct& p : world.catalog) {
    auto it = orders_by_doc.find(p.doc_id);
    p.sales_count = it == orders_by_doc.end() ? 0 : it->second;
    double raw = 1.0 + 4.0 * clamp01(p.quality + 0.12 * rng.normal());
    p.rating = std::clamp(std::round(raw * 2.0) / 2.0, 1.0, 5.0);
    p.review_count = rng.binomial(p.sales_count, 0.4);
  }

  world.log = simulate_sessions(world, spec.candidate_pool,
                                spec.impression_threshold,
                                derive_seed(spec.seed, "log"));
  world.judgments = generate_judgments(world, spec.seed);
  return world;
}

namespace {

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (const std::string& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

std::vector<std::string> split_tokens(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::string join_attributes(const std::map<std::string, std::string>& attrs) {
  std::string out;
  for (const auto& [k, v] : attrs) {
    if (!out.empty()) out.push_back(';');
    out += k;
    out.push_back('=');
    out += v;
  }
  return out;
}

std::string join_constraints(const std::map<std::string, AttributeConstraint>& cs) {
  std::string out;
  for (const auto& [k, c] : cs) {
    if (!out.empty()) out.push_back(';');
    out += k + "=" + c.value + "@" + format_real(c.criticality);
  }
  return out;
}

// CSV field quoting is unnecessary: every value this module writes is free of
// commas and quotes by construction.
void check_csv_safe(const std::string& s) {
  if (s.find(',') != std::string::npos || s.find('"') != std::string::npos ||
      s.find('\n') != std::string::npos)
    throw DataError("value not representable in this CSV dialect: " + s);
}

std::ofstream create_file(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot create " + path.string());
  return out;
}

std::ifstream open_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

int department_index(const std::vector<DepartmentVocab>& vocabs,
                     const std::string& name) {
  for (std::size_t i = 0; i < vocabs.size(); ++i)
    if (vocabs[i].name == name) return static_cast<int>(i);
  throw DataError("unknown department: " + name);
}

double parse_real_strict(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError(std::string("bad ") + what + ": " + s);
  }
}

long long parse_int_strict(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError(std::string("bad ") + what + ": " + s);
  }
}

}  // namespace

void write_world(const SyntheticWorld& world, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out = create_file(dir / "world.meta");
    out << world.spec.to_config().canonical();
  }
  {
    std::ofstream out = create_file(dir / "catalog.csv");
    out << "doc_id,department,title,description,brand,attributes,price,quality,"
           "popularity,sales_count,rating,review_count\n";
    for (const SyntheticProduct& p : world.catalog) {
      std::string attrs = join_attributes(p.attributes);
      check_csv_safe(attrs);
      out << p.doc_id << ',' << world.vocabs[static_cast<std::size_t>(p.department)].name
          << ',' << join_tokens(p.title) << ',' << join_tokens(p.description)
          << ',' << p.brand << ',' << attrs << ',' << format_real(p.price)
          << ',' << format_real(p.quality) << ',' << format_real(p.popularity)
          << ',' << p.sales_count << ',' << format_real(p.rating) << ','
          << p.review_count << '\n';
    }
  }
  {
    std::ofstream out = create_file(dir / "queries.csv");
    out << "query_id,department,terms,constraints,sessions\n";
    for (const QueryIntent& q : world.queries) {
      std::string cs = join_constraints(q.constraints);
      check_csv_safe(cs);
      out << q.query_id << ',' << world.vocabs[static_cast<std::size_t>(q.department)].name
          << ',' << join_tokens(q.terms) << ',' << cs << ',' << q.sessions << '\n';
    }
  }
  {
    std::ofstream out = create_file(dir / "utility.csv");
    out << "query_id,doc_id,position,utility,title_utility\n";
    for (std::size_t qi = 0; qi < world.queries.size(); ++qi) {
      const QueryIntent& q = world.queries[qi];
      for (std::size_t pos = 0; pos < world.candidates[qi].size(); ++pos) {
        const SyntheticProduct& p =
            world.catalog[static_cast<std::size_t>(world.candidates[qi][pos])];
        out << q.query_id << ',' << p.doc_id << ',' << pos + 1 << ','
            << format_real(true_utility(world.spec.user, q, p)) << ','
            << format_real(title_utility(world.spec.user, q, p)) << '\n';
      }
    }
  }
  write_engagement_csv(world.log, dir / "log.csv");
  write_judgments_csv(world.judgments, dir / "judgments.csv");
}

SyntheticWorld read_world(const std::filesystem::path& dir) {
  SyntheticWorld world;
  world.spec = WorldSpec::from_config(KeyValueConfig::parse_file(dir / "world.meta"));
  world.vocabs = build_department_vocabs(world.spec);

  std::map<std::string, int> doc_index;
  {
    std::ifstream in = open_file(dir / "catalog.csv");
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty catalog.csv");
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::vector<std::string> f = split_csv(line);
      if (f.size() != 12) throw DataError("bad catalog.csv row: " + line);
      SyntheticProduct p;
      p.doc_id = f[0];
      p.department = department_index(world.vocabs, f[1]);
      p.title = split_tokens(f[2]);
      p.description = split_tokens(f[3]);
      p.brand = f[4];
      for (const std::string& kv : split_tokens(
               [&f] { std::string s = f[5]; std::replace(s.begin(), s.end(), ';', ' '); return s; }())) {
        std::size_t eq = kv.find('=');
        if (eq == std::string::npos) throw DataError("bad attribute: " + kv);
        p.attributes[kv.substr(0, eq)] = kv.substr(eq + 1);
      }
      p.price = parse_real_strict(f[6], "price");
      p.quality = parse_real_strict(f[7], "quality");
      p.popularity = parse_real_strict(f[8], "popularity");
      p.sales_count = parse_int_strict(f[9], "sales_count");
      p.rating = parse_real_strict(f[10], "rating");
      p.review_count = parse_int_strict(f[11], "review_count");
      doc_index[p.doc_id] = static_cast<int>(world.catalog.size());
      world.catalog.push_back(std::move(p));
    }
  }
  std::map<std::string, std::size_t> query_index;
  {
    std::ifstream in = open_file(dir / "queries.csv");
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty queries.csv");
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::vector<std::string> f = split_csv(line);
      if (f.size() != 5) throw DataError("bad queries.csv row: " + line);
      QueryIntent q;
      q.query_id = f[0];
      q.department = department_index(world.vocabs, f[1]);
      q.terms = split_tokens(f[2]);
      if (!f[3].empty()) {
        std::string s = f[3];
        std::replace(s.begin(), s.end(), ';', ' ');
        for (const std::string& item : split_tokens(s)) {
          std::size_t eq = item.find('=');
          std::size_t at = item.rfind('@');
          if (eq == std::string::npos || at == std::string::npos || at < eq)
            throw DataError("bad constraint: " + item);
          AttributeConstraint c;
          c.value = item.substr(eq + 1, at - eq - 1);
          c.criticality = parse_real_strict(item.substr(at + 1), "criticality");
          q.constraints[item.substr(0, eq)] = std::move(c);
        }
      }
      q.sessions = parse_int_strict(f[4], "sessions");
      query_index[q.query_id] = world.queries.size();
      world.queries.push_back(std::move(q));
    }
  }
  world.candidates.resize(world.queries.size());
  {
    std::ifstream in = open_file(dir / "utility.csv");
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty utility.csv");
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::vector<std::string> f = split_csv(line);
      if (f.size() != 5) throw DataError("bad utility.csv row: " + line);
      auto qit = query_index.find(f[0]);
      auto dit = doc_index.find(f[1]);
      if (qit == query_index.end() || dit == doc_index.end())
        throw DataError("utility.csv references unknown pair " + f[0] + "," + f[1]);
      std::vector<int>& cands = world.candidates[qit->second];
      if (parse_int_strict(f[2], "position") != static_cast<long long>(cands.size()) + 1)
        throw DataError("utility.csv positions out of order for " + f[0]);
      cands.push_back(dit->second);
    }
  }
  world.log = read_engagement_csv(dir / "log.csv");
  world.judgments = read_judgments_csv(dir / "judgments.csv");
  return world;
}

}  // namespace ltr
