#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ltr/config.hpp"
#include "ltr/dataset.hpp"
#include "ltr/letor_io.hpp"
#include "ltr/metrics.hpp"
#include "ltr/synth.hpp"

namespace ltr {

// Full pipeline from a generated world to the labeled four-objective
// dataset: default registry over the world's vocabularies, attribute
// predictions at the given accuracy (seeded from the world spec), impression
// filter at the world's threshold, per-query grade discretization. Identical
// to chaining the featurize and labels commands.
RankingDataset build_benchmark_dataset(const SyntheticWorld& world,
                                       double predictor_accuracy);

// query_id -> department name, for every query in the world.
std::map<std::string, std::string> department_tags(const SyntheticWorld& world);

// Queries never split across folds; fold sizes differ by at most one.
struct FoldAssignment {
  int k = 0;
  std::map<std::string, int> fold_of;  // query_id -> fold in [0,k)
};

// Seeded shuffle of the dataset's query ids, then round-robin assignment.
// Throws DataError with fewer queries than folds.
FoldAssignment kfold_split(const RankingDataset& dataset, int k,
                           std::uint64_t seed);

// (train, test) views for one fold; every query lands in exactly one side.
std::pair<DatasetView, DatasetView> fold_views(const RankingDataset& dataset,
                                               const FoldAssignment& folds,
                                               int fold);

using Cell = std::variant<std::string, double>;

// Rectangular typed table; CSV is the canonical rendering (provenance and
// notes as '#' comment lines, reals with 4 decimals), markdown is derived.
// Tables are deterministic functions of (dataset, config, seed).
struct ReportTable {
  std::string title;
  std::string experiment;
  std::uint64_t seed = 0;
  std::uint64_t config_fingerprint = 0;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> notes;

  void add_row(std::vector<Cell> row);  // throws DataError on width mismatch
  std::string to_csv() const;
  std::string to_markdown() const;
};

// A trainable ranker the harness can run uniformly: name plus a closure
// producing a scorer from a training view and an objective.
struct AlgorithmSpec {
  std::string name;
  std::function<ScoreFn(const DatasetView&, Objective)> train;
};

// The nine standard rankers: lambdamart, rf, ranknet, and the six linear
// variants. Hyperparameters come from `config` (defaults when absent); each
// algorithm trains with a seed derived from (seed, name).
std::vector<AlgorithmSpec> standard_algorithms(const KeyValueConfig& config,
                                               std::uint64_t seed);

// Mean train/test NDCG@10 across k folds, one row per algorithm and one
// train/test column pair per objective. A training failure marks that
// algorithm-objective cell pair "failed" instead of aborting the table.
ReportTable run_algorithm_comparison(const RankingDataset& dataset,
                                     const std::vector<AlgorithmSpec>& algorithms,
                                     std::span<const Objective> objectives,
                                     int k, std::uint64_t seed,
                                     const KeyValueConfig& config);

// Two cross-validated LambdaMART runs, full registry vs popularity features
// removed, plus a difference row. Throws ConfigError when the registry has
// no popularity features.
ReportTable run_popularity_ablation(const RankingDataset& dataset,
                                    Objective objective, int k,
                                    std::uint64_t seed,
                                    const KeyValueConfig& config);

// Seeded sample of `sample_count` departments. Per department: test = its
// queries, train = everything else; LambdaMART on all features vs on the
// intersection-selected subset; reports pair counts, both NDCG@10 values and
// the percent increase. Departments without queries are skipped with a note.
ReportTable run_department_holdout(
    const RankingDataset& dataset,
    const std::map<std::string, std::string>& department_of, int sample_count,
    Objective objective, std::uint64_t seed, const KeyValueConfig& config);

// 4x4 cross-objective matrix over one shared fold split: LambdaMART trained
// per row objective, per-query test NDCG@10 pooled over folds per column
// objective. Queries whose column labels are all zero are skipped in every
// row, so the pooled lists stay aligned for pairing.
struct CrossObjectiveResult {
  ReportTable matrix;
  // [test objective][train objective] -> pooled per-query NDCG@10
  std::array<std::array<std::vector<double>, 4>, 4> per_query;
  std::array<std::vector<std::string>, 4> query_ids;  // [test objective]
};

CrossObjectiveResult run_cross_objective(const RankingDataset& dataset, int k,
                                         std::uint64_t seed,
                                         const KeyValueConfig& config);

// Per test objective: the training objectives not significantly worse than
// the column best (two-sided Wilcoxon signed rank on paired per-query NDCG)
// form the optimal set, the rest the sub-optimal set. The best model is
// always in its own optimal set.
ReportTable run_significance(const CrossObjectiveResult& result,
                             double level = 0.05);

// Restricted to rating-4 judgments: per query, pairs binned by click count
// (0, 1-4, >=5) with count/mean/median/max of top-2 impressions per bin,
// plus pooled ALL rows. Pairs absent from the log are counted in a note and
// excluded. The middle bin is informational.
ReportTable run_crowdsourcing_audit(const std::vector<CrowdJudgment>& judgments,
                                    const std::vector<EngagementRecord>& logs,
                                    std::uint64_t seed,
                                    const KeyValueConfig& config);

// Per-feature information gain against the objective's grades, histogrammed
// into `buckets` equal-width bins over [0, max gain]. Top features listed in
// the notes.
ReportTable info_gain_report(const RankingDataset& dataset,
                             Objective objective, std::uint64_t seed,
                             const KeyValueConfig& config, int buckets = 20);

// Grade frequencies normalized to [0,1] per query, then averaged over
// queries; one row per grade, one column per objective.
ReportTable label_distribution_report(const RankingDataset& dataset,
                                      std::uint64_t seed,
                                      const KeyValueConfig& config);

}  // namespace ltr
