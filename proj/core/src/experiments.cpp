#include "ltr/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

#include "ltr/error.hpp"
#include "ltr/features.hpp"
#include "ltr/gbdt.hpp"
#include "ltr/labels.hpp"
#include "ltr/linear.hpp"
#include "ltr/ranknet.hpp"
#include "ltr/rng.hpp"

namespace ltr {

RankingDataset build_benchmark_dataset(const SyntheticWorld& world,
                                       double predictor_accuracy) {
  FeatureRegistry registry = build_default_registry(world.vocabs);
  FeatureExtractor extractor(world.spec, world.catalog, registry);
  FilteredQueryPool pool =
      filter_low_impressions(world.log, world.spec.impression_threshold);

  std::map<std::string, std::size_t> query_index, doc_index;
  for (std::size_t i = 0; i < world.queries.size(); ++i)
    query_index[world.queries[i].query_id] = i;
  for (std::size_t i = 0; i < world.catalog.size(); ++i)
    doc_index[world.catalog[i].doc_id] = i;

  std::map<std::pair<std::string, std::string>, FeatureVector> features;
  for (const FilteredQueryPool::Query& q : pool.queries) {
    const QueryIntent& intent = world.queries.at(query_index.at(q.query_id));
    std::vector<AttributePrediction> preds = predict_query_attributes(
        intent, world.vocabs[static_cast<std::size_t>(intent.department)],
        predictor_accuracy, world.spec.seed);
    for (const EngagementRecord& r : q.records)
      features[{r.query_id, r.doc_id}] = extractor.extract(
          intent, preds, world.catalog[doc_index.at(r.doc_id)]);
  }
  return build_labeled_dataset(pool, features, registry);
}

std::map<std::string, std::string> department_tags(const SyntheticWorld& world) {
  std::map<std::string, std::string> tags;
  for (const QueryIntent& q : world.queries)
    tags[q.query_id] =
        world.vocabs[static_cast<std::size_t>(q.department)].name;
  return tags;
}

namespace {

std::string fmt_real4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string fingerprint_hex(std::uint64_t fp) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fp));
  return buf;
}

void check_cell_text(const std::string& s) {
  if (s.find(',') != std::string::npos || s.find('"') != std::string::npos ||
      s.find('\n') != std::string::npos || s.find('|') != std::string::npos)
    throw DataError("table cell not representable: " + s);
}

std::string render_cell(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) {
    check_cell_text(*s);
    return *s;
  }
  return fmt_real4(std::get<double>(c));
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

ReportTable make_table(std::string title, std::string experiment,
                       std::uint64_t seed, const KeyValueConfig& config) {
  ReportTable t;
  t.title = std::move(title);
  t.experiment = std::move(experiment);
  t.seed = seed;
  t.config_fingerprint = config.fingerprint();
  return t;
}

LambdaMartConfig lambdamart_config(const KeyValueConfig& config,
                                   std::uint64_t seed) {
  LambdaMartConfig lm = LambdaMartConfig::from_config(config);
  lm.seed = derive_seed(seed, "lambdamart");
  return lm;
}

ScoreFn ensemble_scorer(TreeEnsemble e) {
  return [m = std::move(e)](const FeatureVector& fv) { return m.predict(fv); };
}

}  // namespace

FoldAssignment kfold_split(const RankingDataset& dataset, int k,
                           std::uint64_t seed) {
  if (k < 2) throw ConfigError("kfold_split needs k >= 2");
  std::vector<std::string> ids;
  ids.reserve(dataset.groups().size());
  for (const QueryGroup& g : dataset.groups()) ids.push_back(g.query_id);
  if (static_cast<int>(ids.size()) < k)
    throw DataError("fewer queries than folds");
  Rng rng(derive_seed(seed, "kfold"));
  rng.shuffle(ids);
  FoldAssignment out;
  out.k = k;
  for (std::size_t i = 0; i < ids.size(); ++i)
    out.fold_of[ids[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
  return out;
}

std::pair<DatasetView, DatasetView> fold_views(const RankingDataset& dataset,
                                               const FoldAssignment& folds,
                                               int fold) {
  if (fold < 0 || fold >= folds.k) throw ConfigError("fold index out of range");
  DatasetView train, test;
  train.data = &dataset;
  test.data = &dataset;
  for (std::uint32_t gi = 0; gi < dataset.groups().size(); ++gi) {
    auto it = folds.fold_of.find(dataset.groups()[gi].query_id);
    if (it == folds.fold_of.end())
      throw DataError("query missing from fold assignment: " +
                      dataset.groups()[gi].query_id);
    (it->second == fold ? test : train).group_indices.push_back(gi);
  }
  return {std::move(train), std::move(test)};
}

void ReportTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size())
    throw DataError("row width " + std::to_string(row.size()) +
                    " does not match " + std::to_string(columns.size()) +
                    " columns");
  rows.push_back(std::move(row));
}

std::string ReportTable::to_csv() const {
  std::ostringstream out;
  out << "# provenance: experiment=" << experiment << " seed=" << seed
      << " config=" << fingerprint_hex(config_fingerprint) << '\n';
  for (const std::string& n : notes) out << "# note: " << n << '\n';
  for (std::size_t c = 0; c < columns.size(); ++c) {
    check_cell_text(columns[c]);
    out << (c ? "," : "") << columns[c];
  }
  out << '\n';
  for (const std::vector<Cell>& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c)
      out << (c ? "," : "") << render_cell(row[c]);
    out << '\n';
  }
  return out.str();
}

std::string ReportTable::to_markdown() const {
  std::ostringstream out;
  out << "# " << title << "\n\n";
  out << "provenance: experiment=" << experiment << " seed=" << seed
      << " config=" << fingerprint_hex(config_fingerprint) << "\n\n";
  for (const std::string& n : notes) out << "- note: " << n << '\n';
  if (!notes.empty()) out << '\n';
  out << '|';
  for (const std::string& c : columns) out << ' ' << c << " |";
  out << "\n|";
  for (std::size_t c = 0; c < columns.size(); ++c) out << " --- |";
  out << '\n';
  for (const std::vector<Cell>& row : rows) {
    out << '|';
    for (const Cell& c : row) out << ' ' << render_cell(c) << " |";
    out << '\n';
  }
  return out.str();
}

std::vector<AlgorithmSpec> standard_algorithms(const KeyValueConfig& config,
                                               std::uint64_t seed) {
  std::vector<AlgorithmSpec> out;

  LambdaMartConfig lm = LambdaMartConfig::from_config(config);
  lm.seed = derive_seed(seed, "lambdamart");
  out.push_back({"lambdamart", [lm](const DatasetView& v, Objective o) {
                   return ensemble_scorer(train_lambdamart(v, o, lm));
                 }});

  RandomForestConfig rf = RandomForestConfig::from_config(config);
  rf.seed = derive_seed(seed, "rf");
  out.push_back({"rf", [rf](const DatasetView& v, Objective o) {
                   return ensemble_scorer(train_random_forest(v, o, rf));
                 }});

  RankNetConfig rn = RankNetConfig::from_config(config);
  rn.seed = derive_seed(seed, "ranknet");
  out.push_back({"ranknet", [rn](const DatasetView& v, Objective o) {
                   RankNetModel m = train_ranknet(v, o, rn);
                   return ScoreFn(
                       [m = std::move(m)](const FeatureVector& fv) {
                         return m.score(fv);
                       });
                 }});

  for (const char* name :
       {"l1lr", "l2lr", "l1l2svmc", "l2l1svmc", "l2l2svmr", "l2l1svmr"}) {
    LinearConfig lin = LinearConfig::from_config(config);
    lin.variant = linear_variant_from_name(name);
    lin.seed = derive_seed(seed, name);
    out.push_back({name, [lin](const DatasetView& v, Objective o) {
                     LinearModel m = train_linear(v, o, lin);
                     return ScoreFn(
                         [m = std::move(m)](const FeatureVector& fv) {
                           return m.score(fv);
                         });
                   }});
  }
  return out;
}

ReportTable run_algorithm_comparison(const RankingDataset& dataset,
                                     const std::vector<AlgorithmSpec>& algorithms,
                                     std::span<const Objective> objectives,
                                     int k, std::uint64_t seed,
                                     const KeyValueConfig& config) {
  ReportTable table = make_table("Algorithm comparison, mean NDCG@10 over " +
                                     std::to_string(k) + " folds",
                                 "comparison", seed, config);
  table.columns.push_back("algorithm");
  for (Objective o : objectives) {
    table.columns.push_back(std::string(objective_name(o)) + "_train");
    table.columns.push_back(std::string(objective_name(o)) + "_test");
  }
  FoldAssignment folds = kfold_split(dataset, k, seed);
  for (const AlgorithmSpec& algo : algorithms) {
    std::vector<Cell> row;
    row.emplace_back(algo.name);
    for (Objective o : objectives) {
      try {
        std::vector<double> train_means, test_means;
        for (int f = 0; f < k; ++f) {
          auto [train, test] = fold_views(dataset, folds, f);
          ScoreFn scorer = algo.train(train, o);
          train_means.push_back(mean_ndcg(scorer, train, o));
          test_means.push_back(mean_ndcg(scorer, test, o));
        }
        row.emplace_back(mean_of(train_means));
        row.emplace_back(mean_of(test_means));
      } catch (const std::exception& e) {
        row.emplace_back(std::string("failed"));
        row.emplace_back(std::string("failed"));
        table.notes.push_back(algo.name + "/" +
                              std::string(objective_name(o)) +
                              " failed: " + e.what());
      }
    }
    table.add_row(std::move(row));
  }
  return table;
}

ReportTable run_popularity_ablation(const RankingDataset& dataset,
                                    Objective objective, int k,
                                    std::uint64_t seed,
                                    const KeyValueConfig& config) {
  std::vector<int> keep = non_popularity_features(dataset.registry());
  if (keep.size() == static_cast<std::size_t>(dataset.registry().feature_count()))
    throw ConfigError("registry marks no popularity features to ablate");
  RankingDataset reduced = project_features(DatasetView::all(dataset), keep);

  ReportTable table = make_table(
      "Popularity ablation on " + std::string(objective_name(objective)) +
          ", mean NDCG@10 over " + std::to_string(k) + " folds",
      "ablation", seed, config);
  table.columns = {"features", "train_ndcg10", "test_ndcg10"};

  LambdaMartConfig lm = lambdamart_config(config, seed);
  FoldAssignment folds = kfold_split(dataset, k, seed);
  double test_means[2], train_means[2];
  const RankingDataset* arms[2] = {&dataset, &reduced};
  for (int arm = 0; arm < 2; ++arm) {
    std::vector<double> trains, tests;
    for (int f = 0; f < k; ++f) {
      auto [train, test] = fold_views(*arms[arm], folds, f);
      ScoreFn scorer = ensemble_scorer(train_lambdamart(train, objective, lm));
      trains.push_back(mean_ndcg(scorer, train, objective));
      tests.push_back(mean_ndcg(scorer, test, objective));
    }
    train_means[arm] = mean_of(trains);
    test_means[arm] = mean_of(tests);
  }
  table.add_row({std::string("all"), train_means[0], test_means[0]});
  table.add_row({std::string("no-popularity"), train_means[1], test_means[1]});
  table.add_row({std::string("difference"), train_means[0] - train_means[1],
                 test_means[0] - test_means[1]});
  return table;
}

ReportTable run_department_holdout(
    const RankingDataset& dataset,
    const std::map<std::string, std::string>& department_of, int sample_count,
    Objective objective, std::uint64_t seed, const KeyValueConfig& config) {
  ReportTable table = make_table(
      "Department holdout on " + std::string(objective_name(objective)) +
          ": all features vs intersection selection",
      "holdout", seed, config);
  table.columns = {"department", "train_pairs", "test_pairs",
                   "features_kept", "ndcg10_all", "ndcg10_intersection",
                   "pct_increase"};

  std::set<std::string> names;
  for (const auto& [qid, dept] : department_of) names.insert(dept);
  std::vector<std::string> all_depts(names.begin(), names.end());
  if (all_depts.empty()) throw DataError("no departments to hold out");
  int take = std::min<int>(sample_count, static_cast<int>(all_depts.size()));
  Rng rng(derive_seed(seed, "holdout"));
  std::vector<std::uint32_t> pick = rng.sample_without_replacement(
      static_cast<std::uint32_t>(all_depts.size()),
      static_cast<std::uint32_t>(take));

  LambdaMartConfig lm = lambdamart_config(config, seed);
  for (std::uint32_t di : pick) {
    const std::string& dept = all_depts[di];
    DatasetView train, test;
    train.data = &dataset;
    test.data = &dataset;
    for (std::uint32_t gi = 0; gi < dataset.groups().size(); ++gi) {
      auto it = department_of.find(dataset.groups()[gi].query_id);
      if (it == department_of.end())
        throw DataError("query missing department tag: " +
                        dataset.groups()[gi].query_id);
      (it->second == dept ? test : train).group_indices.push_back(gi);
    }
    if (test.group_count() == 0) {
      table.notes.push_back("department " + dept + " has no queries, skipped");
      continue;
    }
    if (train.group_count() == 0) {
      table.notes.push_back("department " + dept +
                            " would leave no training queries, skipped");
      continue;
    }

    ScoreFn full = ensemble_scorer(train_lambdamart(train, objective, lm));
    double ndcg_all = mean_ndcg(full, test, objective);

    std::vector<int> keep = intersection_feature_selection(train, test);
    RankingDataset train_p = project_features(train, keep);
    RankingDataset test_p = project_features(test, keep);
    ScoreFn sel = ensemble_scorer(
        train_lambdamart(DatasetView::all(train_p), objective, lm));
    double ndcg_sel = mean_ndcg(sel, DatasetView::all(test_p), objective);

    std::vector<Cell> row;
    row.emplace_back(dept);
    row.emplace_back(std::to_string(train.instance_count()));
    row.emplace_back(std::to_string(test.instance_count()));
    row.emplace_back(std::to_string(keep.size()));
    row.emplace_back(ndcg_all);
    row.emplace_back(ndcg_sel);
    if (ndcg_all > 0.0)
      row.emplace_back(100.0 * (ndcg_sel - ndcg_all) / ndcg_all);
    else
      row.emplace_back(std::string("n/a"));
    table.add_row(std::move(row));
  }
  return table;
}

CrossObjectiveResult run_cross_objective(const RankingDataset& dataset, int k,
                                         std::uint64_t seed,
                                         const KeyValueConfig& config) {
  CrossObjectiveResult result;
  result.matrix = make_table(
      "Cross-objective matrix: rows train, columns evaluate, test NDCG@10",
      "crossobj", seed, config);
  result.matrix.columns.push_back("train\\test");
  for (Objective o : kAllObjectives)
    result.matrix.columns.push_back(std::string(objective_name(o)));

  LambdaMartConfig lm = lambdamart_config(config, seed);
  FoldAssignment folds = kfold_split(dataset, k, seed);
  for (int f = 0; f < k; ++f) {
    auto [train, test] = fold_views(dataset, folds, f);
    std::array<ScoreFn, 4> scorers;
    for (int to = 0; to < 4; ++to)
      scorers[static_cast<std::size_t>(to)] = ensemble_scorer(
          train_lambdamart(train, kAllObjectives[static_cast<std::size_t>(to)], lm));
    for (int eo = 0; eo < 4; ++eo) {
      Objective eval_obj = kAllObjectives[static_cast<std::size_t>(eo)];
      std::array<std::vector<QueryNdcg>, 4> per;
      for (int to = 0; to < 4; ++to)
        per[static_cast<std::size_t>(to)] = per_query_ndcg(
            scorers[static_cast<std::size_t>(to)], test, eval_obj);
      for (std::size_t qi = 0; qi < per[0].size(); ++qi) {
        // Skipped queries (zero ideal DCG) are label-determined, so the four
        // lists stay aligned.
        if (!per[0][qi].ndcg.has_value()) continue;
        result.query_ids[static_cast<std::size_t>(eo)].push_back(
            per[0][qi].query_id);
        for (int to = 0; to < 4; ++to)
          result.per_query[static_cast<std::size_t>(eo)]
                          [static_cast<std::size_t>(to)]
                              .push_back(*per[static_cast<std::size_t>(to)][qi].ndcg);
      }
    }
  }

  for (int to = 0; to < 4; ++to) {
    std::vector<Cell> row;
    row.emplace_back(std::string(objective_name(
        kAllObjectives[static_cast<std::size_t>(to)])));
    for (int eo = 0; eo < 4; ++eo) {
      const std::vector<double>& vals =
          result.per_query[static_cast<std::size_t>(eo)]
                          [static_cast<std::size_t>(to)];
      if (vals.empty())
        row.emplace_back(std::string("failed"));
      else
        row.emplace_back(mean_of(vals));
    }
    result.matrix.add_row(std::move(row));
  }
  return result;
}

ReportTable run_significance(const CrossObjectiveResult& result, double level) {
  ReportTable table;
  table.title = "Optimal training objectives per test objective (Wilcoxon " +
                fmt_real4(level) + ")";
  table.experiment = "significance";
  table.seed = result.matrix.seed;
  table.config_fingerprint = result.matrix.config_fingerprint;
  table.columns = {"test_objective", "best", "optimal_set", "suboptimal_set"};
  for (Objective o : kAllObjectives)
    table.columns.push_back("p_" + std::string(objective_name(o)));

  for (int eo = 0; eo < 4; ++eo) {
    const auto& column = result.per_query[static_cast<std::size_t>(eo)];
    if (column[0].empty()) throw DataError("empty cross-objective column");
    int best = 0;
    double best_mean = mean_of(column[0]);
    for (int to = 1; to < 4; ++to) {
      double m = mean_of(column[static_cast<std::size_t>(to)]);
      if (m > best_mean) {
        best_mean = m;
        best = to;
      }
    }
    std::array<double, 4> pvals;
    std::array<bool, 4> optimal;
    for (int to = 0; to < 4; ++to) {
      if (to == best) {
        pvals[static_cast<std::size_t>(to)] = 1.0;
        optimal[static_cast<std::size_t>(to)] = true;
        continue;
      }
      std::vector<std::pair<double, double>> paired;
      paired.reserve(column[0].size());
      for (std::size_t i = 0; i < column[0].size(); ++i)
        paired.emplace_back(column[static_cast<std::size_t>(best)][i],
                            column[static_cast<std::size_t>(to)][i]);
      SignificanceResult sr = wilcoxon_signed_rank(paired, level);
      pvals[static_cast<std::size_t>(to)] = sr.p_value;
      // Worse only when the difference is significant and favors the best.
      optimal[static_cast<std::size_t>(to)] =
          !(sr.significant && sr.statistic > 0.0);
    }
    std::string opt, subopt;
    for (int to = 0; to < 4; ++to) {
      std::string name(
          objective_name(kAllObjectives[static_cast<std::size_t>(to)]));
      std::string& target = optimal[static_cast<std::size_t>(to)] ? opt : subopt;
      if (!target.empty()) target += ' ';
      target += name;
    }
    std::vector<Cell> row;
    row.emplace_back(std::string(
        objective_name(kAllObjectives[static_cast<std::size_t>(eo)])));
    row.emplace_back(std::string(
        objective_name(kAllObjectives[static_cast<std::size_t>(best)])));
    row.emplace_back(opt.empty() ? std::string("-") : opt);
    row.emplace_back(subopt.empty() ? std::string("-") : subopt);
    for (int to = 0; to < 4; ++to)
      row.emplace_back(pvals[static_cast<std::size_t>(to)]);
    table.add_row(std::move(row));
  }
  return table;
}

namespace {

struct BinStats {
  std::vector<long long> top2;

  void add(long long v) { top2.push_back(v); }
  bool empty() const { return top2.empty(); }

  double mean() const {
    return std::accumulate(top2.begin(), top2.end(), 0.0) /
           static_cast<double>(top2.size());
  }
  double median() {
    std::sort(top2.begin(), top2.end());
    std::size_t n = top2.size();
    if (n % 2 == 1) return static_cast<double>(top2[n / 2]);
    return (static_cast<double>(top2[n / 2 - 1]) +
            static_cast<double>(top2[n / 2])) /
           2.0;
  }
  long long max() const { return *std::max_element(top2.begin(), top2.end()); }
};

constexpr const char* kBinLabels[3] = {"0", "1-4", ">=5"};

int click_bin(long long clicks) {
  if (clicks == 0) return 0;
  return clicks < 5 ? 1 : 2;
}

}  // namespace

ReportTable run_crowdsourcing_audit(const std::vector<CrowdJudgment>& judgments,
                                    const std::vector<EngagementRecord>& logs,
                                    std::uint64_t seed,
                                    const KeyValueConfig& config) {
  ReportTable table = make_table(
      "Rating-4 pairs binned by clicks: spread of top-2 impressions", "audit",
      seed, config);
  table.columns = {"query_id", "click_bin", "items", "mean_top2_impressions",
                   "median_top2_impressions", "max_top2_impressions"};
  table.notes.push_back("click bin 1-4 is informational");

  std::map<std::pair<std::string, std::string>, const EngagementRecord*> index;
  for (const EngagementRecord& r : logs) index[{r.query_id, r.doc_id}] = &r;

  // query -> 3 click bins of rating-4 pairs; map keeps query order stable.
  std::map<std::string, std::array<BinStats, 3>> per_query;
  std::array<BinStats, 3> pooled;
  long long uncovered = 0, rated4 = 0;
  for (const CrowdJudgment& j : judgments) {
    if (j.rating != 4) continue;
    ++rated4;
    auto it = index.find({j.query_id, j.doc_id});
    if (it == index.end()) {
      ++uncovered;
      continue;
    }
    const EngagementRecord& r = *it->second;
    int bin = click_bin(r.clicks);
    per_query[j.query_id][static_cast<std::size_t>(bin)].add(r.impressions_top2);
    pooled[static_cast<std::size_t>(bin)].add(r.impressions_top2);
  }
  if (rated4 == 0) {
    table.notes.push_back("no rating-4 judgments");
    return table;
  }
  if (uncovered > 0)
    table.notes.push_back(std::to_string(uncovered) +
                          " rating-4 pairs missing from the log, excluded");

  auto emit = [&table](const std::string& qid, std::array<BinStats, 3>& bins) {
    for (int b = 0; b < 3; ++b) {
      BinStats& s = bins[static_cast<std::size_t>(b)];
      if (s.empty()) continue;
      table.add_row({qid, std::string(kBinLabels[b]),
                     std::to_string(s.top2.size()), s.mean(), s.median(),
                     static_cast<double>(s.max())});
    }
  };
  for (auto& [qid, bins] : per_query) emit(qid, bins);
  emit("ALL", pooled);
  return table;
}

ReportTable info_gain_report(const RankingDataset& dataset, Objective objective,
                             std::uint64_t seed, const KeyValueConfig& config,
                             int buckets) {
  if (buckets < 1) throw ConfigError("info_gain_report needs buckets >= 1");
  ReportTable table = make_table(
      "Feature information gain vs " + std::string(objective_name(objective)) +
          " grades, " + std::to_string(buckets) + " equal-width buckets",
      "infogain", seed, config);
  table.columns = {"bucket_lo", "bucket_hi", "features"};

  std::vector<int> grades;
  for (const QueryGroup& g : dataset.groups())
    for (const RankingInstance& inst : g.instances) {
      if (!inst.labels.has(objective))
        throw DataError("instance missing " +
                        std::string(objective_name(objective)) + " label");
      grades.push_back(inst.labels.grade(objective));
    }
  if (grades.empty()) throw DataError("empty dataset");

  const int d = dataset.registry().feature_count();
  std::vector<double> gains(static_cast<std::size_t>(d));
  std::vector<double> column(grades.size());
  for (int fid = 1; fid <= d; ++fid) {
    std::size_t i = 0;
    for (const QueryGroup& g : dataset.groups())
      for (const RankingInstance& inst : g.instances)
        column[i++] = inst.features.at(fid);
    gains[static_cast<std::size_t>(fid - 1)] = info_gain(column, grades);
  }

  double max_gain = *std::max_element(gains.begin(), gains.end());
  std::vector<long long> counts(static_cast<std::size_t>(buckets), 0);
  for (double g : gains) {
    int b = max_gain > 0.0
                ? std::min(buckets - 1,
                           static_cast<int>(std::floor(
                               g / max_gain * static_cast<double>(buckets))))
                : 0;
    ++counts[static_cast<std::size_t>(b)];
  }
  for (int b = 0; b < buckets; ++b) {
    double width = max_gain > 0.0 ? max_gain / buckets : 0.0;
    table.add_row({b * width, (b + 1) * width,
                   std::to_string(counts[static_cast<std::size_t>(b)])});
  }

  std::vector<int> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&gains](int a, int b) {
    return gains[static_cast<std::size_t>(a)] != gains[static_cast<std::size_t>(b)]
               ? gains[static_cast<std::size_t>(a)] >
                     gains[static_cast<std::size_t>(b)]
               : a < b;
  });
  for (int i = 0; i < std::min(5, d); ++i) {
    int fid = order[static_cast<std::size_t>(i)] + 1;
    table.notes.push_back(
        "top " + std::to_string(i + 1) + ": " +
        dataset.registry().entry(fid).name + " = " +
        fmt_real4(gains[static_cast<std::size_t>(fid - 1)]) + " bits");
  }
  return table;
}

ReportTable label_distribution_report(const RankingDataset& dataset,
                                      std::uint64_t seed,
                                      const KeyValueConfig& config) {
  ReportTable table = make_table(
      "Per-query grade frequencies, normalized per query then averaged",
      "labeldist", seed, config);
  table.columns.push_back("grade");
  for (Objective o : kAllObjectives)
    table.columns.push_back(std::string(objective_name(o)));

  if (dataset.groups().empty()) throw DataError("empty dataset");
  std::array<std::array<double, 5>, 4> mean_freq{};
  for (const QueryGroup& g : dataset.groups()) {
    if (g.instances.empty()) continue;
    for (int oi = 0; oi < 4; ++oi) {
      Objective o = kAllObjectives[static_cast<std::size_t>(oi)];
      std::array<double, 5> freq{};
      for (const RankingInstance& inst : g.instances) {
        if (!inst.labels.has(o))
          throw DataError("instance missing " +
                          std::string(objective_name(o)) + " label");
        ++freq[static_cast<std::size_t>(inst.labels.grade(o))];
      }
      for (int gr = 0; gr < 5; ++gr)
        mean_freq[static_cast<std::size_t>(oi)][static_cast<std::size_t>(gr)] +=
            freq[static_cast<std::size_t>(gr)] /
            static_cast<double>(g.instances.size());
    }
  }
  double queries = static_cast<double>(dataset.groups().size());
  for (int gr = 0; gr < 5; ++gr) {
    std::vector<Cell> row;
    row.emplace_back(std::to_string(gr));
    for (int oi = 0; oi < 4; ++oi)
      row.emplace_back(
          mean_freq[static_cast<std::size_t>(oi)][static_cast<std::size_t>(gr)] /
          queries);
    table.add_row(std::move(row));
  }
  return table;
}

}  // namespace ltr
