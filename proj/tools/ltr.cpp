// Command-line front end: world generation, featurization, label building,
// fold splitting, training, evaluation, and the experiment harness.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ltr/config.hpp"
#include "ltr/error.hpp"
#include "ltr/experiments.hpp"
#include "ltr/features.hpp"
#include "ltr/gbdt.hpp"
#include "ltr/labels.hpp"
#include "ltr/letor_io.hpp"
#include "ltr/linear.hpp"
#include "ltr/metrics.hpp"
#include "ltr/model_io.hpp"
#include "ltr/ranknet.hpp"
#include "ltr/synth.hpp"

namespace fs = std::filesystem;
using namespace ltr;

namespace {

KeyValueConfig load_config(const std::string& path) {
  if (path.empty()) return {};
  return KeyValueConfig::parse_file(path);
}

Objective objective_or_throw(const std::string& name) {
  auto o = objective_from_name(name);
  if (!o) throw ConfigError("unknown objective: " + name);
  return *o;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot create " + path.string());
  out << text;
  if (!out) throw DataError("write failed for " + path.string());
}

void run_gen(const std::string& spec_path, bool seed_set, std::uint64_t seed,
             const std::string& out_dir) {
  WorldSpec spec = spec_path.empty()
                       ? WorldSpec{}
                       : WorldSpec::from_config(load_config(spec_path));
  if (seed_set) spec.seed = seed;
  SyntheticWorld world = build_world(spec);
  write_world(world, out_dir);
  std::cout << "world: " << world.catalog.size() << " products, "
            << world.queries.size() << " queries, " << world.log.size()
            << " log rows, " << world.judgments.size() << " judgments -> "
            << out_dir << "\n";
}

void run_featurize(const std::string& world_dir, double accuracy,
                   const std::string& out_path) {
  SyntheticWorld world = read_world(world_dir);
  FeatureRegistry registry = build_default_registry(world.vocabs);
  FeatureExtractor extractor(world.spec, world.catalog, registry);
  FeatureFileWriter writer(out_path, registry.feature_count());
  std::size_t rows = 0;
  for (std::size_t qi = 0; qi < world.queries.size(); ++qi) {
    const QueryIntent& query = world.queries[qi];
    std::vector<AttributePrediction> preds = predict_query_attributes(
        query, world.vocabs[static_cast<std::size_t>(query.department)],
        accuracy, world.spec.seed);
    for (int doc : world.candidates[qi]) {
      const SyntheticProduct& product =
          world.catalog[static_cast<std::size_t>(doc)];
      writer.write_row(query.query_id, product.doc_id,
                       extractor.extract(query, preds, product));
      ++rows;
    }
  }
  writer.close();
  write_registry_csv(registry, out_path + ".registry.csv");
  std::cout << "features: " << rows << " rows x " << registry.feature_count()
            << " features -> " << out_path << "\n";
}

void run_labels(const std::string& log_path, const std::string& features_path,
                long long threshold, const std::string& out_prefix) {
  int warnings = 0;
  std::vector<EngagementRecord> records =
      read_engagement_csv(log_path, &warnings);
  if (warnings > 0)
    std::cerr << "warning: " << warnings
              << " rows with inconsistent funnel counts\n";
  FilteredQueryPool pool = filter_low_impressions(records, threshold);
  if (pool.queries.empty()) throw DataError("no queries survive the filter");

  std::map<std::pair<std::string, std::string>, FeatureVector> features;
  int feature_count =
      for_each_feature_row(features_path, [&features](FeatureRow& row) {
        features[{std::move(row.query_id), std::move(row.doc_id)}] =
            std::move(row.features);
      });
  RankingDataset dataset = build_labeled_dataset(
      pool, features, anonymous_registry(feature_count));
  for (Objective o : kAllObjectives) {
    fs::path path = out_prefix + "." + std::string(objective_name(o)) + ".letor";
    write_letor(DatasetView::all(dataset), o, path);
    std::cout << "labels: " << dataset.instance_count() << " pairs, "
              << dataset.groups().size() << " queries -> " << path.string()
              << "\n";
  }
}

void run_split(const std::string& data_path, int k, std::uint64_t seed,
               const std::string& out_prefix) {
  LetorHeader header = peek_letor_header(data_path);
  RankingDataset dataset = read_letor(data_path);
  FoldAssignment folds = kfold_split(dataset, k, seed);
  for (int f = 0; f < k; ++f) {
    auto [train, test] = fold_views(dataset, folds, f);
    std::string stem = out_prefix + "fold" + std::to_string(f);
    write_letor(train, header.objective, stem + ".train.letor");
    write_letor(test, header.objective, stem + ".test.letor");
    std::cout << "fold " << f << ": " << train.group_count() << " train / "
              << test.group_count() << " test queries -> " << stem
              << ".{train,test}.letor\n";
  }
}

void run_train(const std::string& algo, const std::string& data_path,
               const std::string& objective_name_arg,
               const std::string& config_path, bool seed_set,
               std::uint64_t seed, const std::string& out_path) {
  Objective objective = objective_or_throw(objective_name_arg);
  LetorHeader header = peek_letor_header(data_path);
  if (header.objective != objective)
    throw ConfigError("data file carries " +
                      std::string(objective_name(header.objective)) +
                      " labels, not " + objective_name_arg);
  RankingDataset dataset = read_letor(data_path);
  KeyValueConfig config = load_config(config_path);
  if (seed_set) config.set("seed", std::to_string(seed));

  SavedModel model;
  model.algo = algo;
  model.objective = objective_name_arg;
  model.registry_fingerprint = dataset.registry().fingerprint();
  model.config = config;
  DatasetView view = DatasetView::all(dataset);
  if (algo == "lambdamart") {
    model.kind = ModelKind::tree_ensemble;
    model.ensemble =
        train_lambdamart(view, objective, LambdaMartConfig::from_config(config));
  } else if (algo == "rf") {
    model.kind = ModelKind::tree_ensemble;
    model.ensemble = train_random_forest(view, objective,
                                         RandomForestConfig::from_config(config));
  } else if (algo == "ranknet") {
    model.kind = ModelKind::ranknet;
    model.ranknet =
        train_ranknet(view, objective, RankNetConfig::from_config(config));
  } else {
    LinearConfig lin = LinearConfig::from_config(config);
    lin.variant = linear_variant_from_name(algo);  // rejects unknown algos
    model.kind = ModelKind::linear;
    model.linear = train_linear(view, objective, lin);
  }
  save_model(model, out_path);
  std::cout << "model: " << algo << " on " << objective_name_arg << ", "
            << dataset.groups().size() << " queries -> " << out_path << "\n";
}

void run_eval(const std::string& model_path, const std::string& data_path,
              int k, const std::string& registry_path) {
  SavedModel model = load_model(model_path);
  LetorHeader header = peek_letor_header(data_path);
  RankingDataset dataset =
      registry_path.empty()
          ? read_letor(data_path)
          : read_letor(data_path, read_registry_csv(registry_path));
  if (!registry_path.empty()) model.verify_registry(dataset.registry());

  std::vector<QueryNdcg> per_query = per_query_ndcg(
      model.scorer(), DatasetView::all(dataset), header.objective, k);
  char buf[64];
  std::cout << "query_id,ndcg" << k << "\n";
  double sum = 0.0;
  int counted = 0;
  for (const QueryNdcg& q : per_query) {
    if (q.ndcg) {
      std::snprintf(buf, sizeof buf, "%.4f", *q.ndcg);
      std::cout << q.query_id << ',' << buf << "\n";
      sum += *q.ndcg;
      ++counted;
    } else {
      std::cout << q.query_id << ",skipped\n";
    }
  }
  if (counted == 0) throw DataError("every query was skipped");
  std::snprintf(buf, sizeof buf, "%.4f", sum / counted);
  std::cout << "mean," << buf << "\n";
}

void write_report(const ReportTable& table, const fs::path& out_dir,
                  const std::string& name) {
  fs::create_directories(out_dir);
  write_text(out_dir / (name + ".csv"), table.to_csv());
  write_text(out_dir / (name + ".md"), table.to_markdown());
  std::cout << "report: " << (out_dir / (name + ".csv")).string() << " ("
            << table.rows.size() << " rows)\n";
}

void run_experiment(const std::string& name, const std::string& config_path,
                    std::uint64_t seed, const std::string& out_dir) {
  KeyValueConfig config = load_config(config_path);
  WorldSpec spec = WorldSpec::from_config(config);
  spec.seed = seed;
  SyntheticWorld world = build_world(spec);

  if (name == "audit") {
    write_report(run_crowdsourcing_audit(world.judgments, world.log, seed, config),
                 out_dir, name);
    return;
  }

  double accuracy = config.get_double("featurize.predictor-accuracy", 0.9);
  RankingDataset dataset = build_benchmark_dataset(world, accuracy);
  int k = static_cast<int>(config.get_int("experiment.folds", 5));
  Objective objective =
      objective_or_throw(config.get_string("experiment.objective", "or"));

  if (name == "comparison") {
    std::vector<AlgorithmSpec> algorithms = standard_algorithms(config, seed);
    write_report(run_algorithm_comparison(dataset, algorithms, kAllObjectives,
                                          k, seed, config),
                 out_dir, name);
  } else if (name == "ablation") {
    write_report(run_popularity_ablation(dataset, objective, k, seed, config),
                 out_dir, name);
  } else if (name == "holdout") {
    int sample =
        static_cast<int>(config.get_int("experiment.holdout-departments", 10));
    write_report(run_department_holdout(dataset, department_tags(world), sample,
                                        objective, seed, config),
                 out_dir, name);
  } else if (name == "crossobj") {
    CrossObjectiveResult result = run_cross_objective(dataset, k, seed, config);
    write_report(result.matrix, out_dir, "crossobj");
    write_report(run_significance(result), out_dir, "significance");
  } else if (name == "infogain") {
    Objective gain_obj = objective_or_throw(
        config.get_string("experiment.infogain-objective", "ctr"));
    write_report(info_gain_report(dataset, gain_obj, seed, config), out_dir,
                 name);
  } else if (name == "labeldist") {
    write_report(label_distribution_report(dataset, seed, config), out_dir,
                 name);
  } else {
    throw ConfigError("unknown experiment: " + name);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"learning-to-rank toolkit for e-commerce search experiments"};
  app.require_subcommand(1);

  std::string spec_path, out_dir;
  std::uint64_t seed = 42;
  auto* gen = app.add_subcommand("gen", "generate a synthetic retail world");
  gen->add_option("--spec", spec_path, "world config file (defaults built in)");
  auto* gen_seed = gen->add_option("--seed", seed, "override the world seed");
  gen->add_option("--out-dir", out_dir, "output directory")->required();

  std::string world_dir, out_path;
  double accuracy = 0.9;
  auto* featurize =
      app.add_subcommand("featurize", "extract feature vectors from a world");
  featurize->add_option("--world", world_dir, "world directory")->required();
  featurize->add_option("--predictor-accuracy", accuracy,
                        "simulated attribute predictor accuracy");
  featurize->add_option("--out", out_path, "feature file (registry lands at <out>.registry.csv)")
      ->required();

  std::string log_path, features_path, prefix;
  long long threshold = 100;
  auto* labels = app.add_subcommand(
      "labels", "grade engagement rates into one LETOR file per objective");
  labels->add_option("--log", log_path, "engagement log CSV")->required();
  labels->add_option("--features", features_path, "feature file")->required();
  labels->add_option("--threshold", threshold, "minimum impressions");
  labels->add_option("--out", prefix, "output prefix")->required();

  std::string data_path;
  int k = 5;
  auto* split = app.add_subcommand("split", "write k-fold train/test LETOR files");
  split->add_option("--data", data_path, "LETOR file")->required();
  split->add_option("--k", k, "fold count");
  split->add_option("--seed", seed, "shuffle seed");
  split->add_option("--out", prefix, "output prefix (fold<i>.{train,test}.letor)")
      ->required();

  std::string algo, objective, config_path, model_path;
  auto* train = app.add_subcommand("train", "train a ranking model");
  train
      ->add_option("--algo", algo,
                   "lambdamart|rf|ranknet|l1lr|l2lr|l1l2svmc|l2l1svmc|l2l2svmr|l2l1svmr")
      ->required();
  train->add_option("--data", data_path, "LETOR training file")->required();
  train->add_option("--objective", objective, "ctr|atcr|or|revr")->required();
  train->add_option("--config", config_path, "hyperparameter config file");
  auto* train_seed = train->add_option("--seed", seed, "override the config seed");
  train->add_option("--out", model_path, "model file")->required();

  std::string registry_path;
  int ndcg_k = 10;
  auto* eval = app.add_subcommand("eval", "per-query and mean NDCG to stdout");
  eval->add_option("--model", model_path, "model file")->required();
  eval->add_option("--data", data_path, "LETOR file with the target labels")
      ->required();
  eval->add_option("--k", ndcg_k, "NDCG truncation");
  eval->add_option("--registry", registry_path,
                   "registry CSV to verify against the model");

  std::string experiment_name;
  auto* experiment = app.add_subcommand(
      "experiment", "build a world in memory and emit one report");
  experiment
      ->add_option("name", experiment_name,
                   "comparison|ablation|holdout|crossobj|audit|infogain|labeldist")
      ->required();
  experiment->add_option("--config", config_path, "experiment + world config");
  experiment->add_option("--seed", seed, "master seed");
  experiment->add_option("--out", out_dir, "report directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed())
      run_gen(spec_path, !gen_seed->empty(), seed, out_dir);
    else if (featurize->parsed())
      run_featurize(world_dir, accuracy, out_path);
    else if (labels->parsed())
      run_labels(log_path, features_path, threshold, prefix);
    else if (split->parsed())
      run_split(data_path, k, seed, prefix);
    else if (train->parsed())
      run_train(algo, data_path, objective, config_path, !train_seed->empty(),
                seed, model_path);
    else if (eval->parsed())
      run_eval(model_path, data_path, ndcg_k, registry_path);
    else if (experiment->parsed())
      run_experiment(experiment_name, config_path, seed, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
