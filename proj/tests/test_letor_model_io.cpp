#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "ltr/error.hpp"
#include "ltr/gbdt.hpp"
#include "ltr/letor_io.hpp"
#include "ltr/linear.hpp"
#include "ltr/model_io.hpp"
#include "ltr/ranknet.hpp"
#include "ltr/rng.hpp"

namespace fs = std::filesystem;
using namespace ltr;

namespace {

fs::path temp_dir() {
  static int counter = 0;
  fs::path p = fs::temp_directory_path() /
               ("ltr_io_test_" + std::to_string(++counter));
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RankingDataset random_dataset(std::uint64_t seed, int queries, int docs,
                              int dim) {
  Rng rng(seed);
  std::vector<QueryGroup> groups(static_cast<std::size_t>(queries));
  for (int q = 0; q < queries; ++q) {
    QueryGroup& g = groups[static_cast<std::size_t>(q)];
    g.query_id = std::to_string(q + 1);
    for (int d = 0; d < docs; ++d) {
      RankingInstance inst;
      inst.query_id = g.query_id;
      inst.doc_id = "p" + std::to_string(d);
      inst.features = FeatureVector(static_cast<std::size_t>(dim));
      for (int j = 1; j <= dim; ++j)
        if (rng.uniform() < 0.7) inst.features.set(j, rng.uniform(-5.0, 5.0));
      for (Objective o : kAllObjectives)
        inst.labels.set(o, static_cast<int>(rng.uniform_int(5)));
      g.instances.push_back(std::move(inst));
    }
  }
  return RankingDataset(anonymous_registry(dim), std::move(groups));
}

}  // namespace

TEST_CASE("parse_letor_line accepts the grammar and rejects violations") {
  RankingInstance inst =
      parse_letor_line("2 qid:7 1:0.5 3:1.0 # docid=p42", 1,
                       Objective::click_rate, 4);
  CHECK(inst.query_id == "7");
  CHECK(inst.doc_id == "p42");
  CHECK(inst.labels.grade(Objective::click_rate) == 2);
  CHECK(inst.features.at(1) == 0.5);
  CHECK(inst.features.at(2) == 0.0);  // omitted fids default to zero
  CHECK(inst.features.at(3) == 1.0);
  CHECK(inst.features.at(4) == 0.0);

  CHECK_THROWS_AS(parse_letor_line("qid:7 1:0.5 # docid=x", 1,
                                   Objective::click_rate, 2),
                  ParseError);
  CHECK_THROWS_AS(parse_letor_line("0 qid:1 2:1.0 2:3.0 # docid=x", 1,
                                   Objective::click_rate, 3),
                  ParseError);
  CHECK_THROWS_AS(parse_letor_line("0 qid:1 3:1.0 2:3.0 # docid=x", 1,
                                   Objective::click_rate, 3),
                  ParseError);
  CHECK_THROWS_AS(parse_letor_line("0 qid:1 1:1.0", 1, Objective::click_rate, 2),
                  ParseError);
  CHECK_THROWS_AS(parse_letor_line("9 qid:1 1:1.0 # docid=x", 1,
                                   Objective::click_rate, 2),
                  ParseError);
}

TEST_CASE("letor header round trip") {
  LetorHeader h = parse_letor_header("# objective=revr features=34");
  CHECK(h.objective == Objective::revenue_rate);
  CHECK(h.features == 34);
  CHECK_THROWS_AS(parse_letor_header("# objective=bogus features=3"), ParseError);
  CHECK_THROWS_AS(parse_letor_header("objective=or features=3"), ParseError);
}

TEST_CASE("letor files re-serialize byte-identically") {
  fs::path dir = temp_dir();
  RankingDataset data = random_dataset(71, 6, 5, 7);
  fs::path first = dir / "a.letor";
  write_letor(DatasetView::all(data), Objective::order_rate, first);

  RankingDataset back = read_letor(first);
  CHECK(back.groups().size() == data.groups().size());
  CHECK(back.instance_count() == data.instance_count());
  fs::path second = dir / "b.letor";
  write_letor(DatasetView::all(back), Objective::order_rate, second);
  CHECK(slurp(first) == slurp(second));

  LetorHeader h = peek_letor_header(first);
  CHECK(h.objective == Objective::order_rate);
  CHECK(h.features == 7);
  fs::remove_all(dir);
}

TEST_CASE("read_letor verifies the supplied registry width") {
  fs::path dir = temp_dir();
  RankingDataset data = random_dataset(73, 2, 3, 4);
  fs::path p = dir / "w.letor";
  write_letor(DatasetView::all(data), Objective::click_rate, p);
  CHECK_THROWS_AS(read_letor(p, anonymous_registry(9)), DataError);
  RankingDataset ok = read_letor(p, anonymous_registry(4));
  CHECK(ok.registry().feature_count() == 4);
  fs::remove_all(dir);
}

TEST_CASE("format_real keeps nine significant digits") {
  Rng rng(5);
  for (int i = 0; i < 2000; ++i) {
    double x = (rng.uniform() - 0.5) * std::pow(10.0, rng.uniform(-6.0, 6.0));
    double y = std::stod(format_real(x));
    CHECK(std::abs(y - x) <= std::abs(x) * 5e-9);
  }
  CHECK(format_real(0.0) == "0");
  CHECK(format_real(1.0) == "1");
}

TEST_CASE("engagement csv round trip and funnel warnings") {
  fs::path dir = temp_dir();
  std::vector<EngagementRecord> rows(2);
  rows[0] = {"1", "a", 100, 20, 10, 3, 2, 19.98};
  rows[1] = {"2", "b", 50, 0, 5, 1, 0, 0.0};
  fs::path p = dir / "log.csv";
  write_engagement_csv(rows, p);
  int warnings = -1;
  auto back = read_engagement_csv(p, &warnings);
  REQUIRE(back.size() == 2);
  CHECK(warnings == 0);
  CHECK(back[0].query_id == "1");
  CHECK(back[0].revenue == doctest::Approx(19.98));
  CHECK(back[1].impressions == 50);

  // clicks above impressions: read back with a warning, not an error
  rows[1].clicks = 500;
  write_engagement_csv(rows, p);
  read_engagement_csv(p, &warnings);
  CHECK(warnings == 1);

  // negative counts are hard errors
  rows[1].clicks = -1;
  write_engagement_csv(rows, p);
  CHECK_THROWS_AS(read_engagement_csv(p, &warnings), DataError);
  fs::remove_all(dir);
}

TEST_CASE("registry csv round trip preserves the fingerprint") {
  fs::path dir = temp_dir();
  std::vector<FeatureEntry> entries;
  entries.push_back({1, "query_token_count", FeatureGroup::query, "", false});
  entries.push_back({2, "bm25_title", FeatureGroup::query_document, "", false});
  entries.push_back({3, "sales_count", FeatureGroup::document, "", true});
  entries.push_back({4, "am:color", FeatureGroup::query_document, "color", false});
  FeatureRegistry reg{std::move(entries)};
  fs::path p = dir / "reg.csv";
  write_registry_csv(reg, p);
  FeatureRegistry back = read_registry_csv(p);
  CHECK(back.feature_count() == 4);
  CHECK(back.fingerprint() == reg.fingerprint());
  CHECK(back.entry(3).popularity);
  CHECK(back.entry(4).attribute_key == "color");
  CHECK(back.entry(1).group == FeatureGroup::query);
  CHECK(back.id_of("bm25_title") == 2);
  fs::remove_all(dir);
}

TEST_CASE("judgments csv round trip and range check") {
  fs::path dir = temp_dir();
  std::vector<CrowdJudgment> js = {{"1", "a", 4}, {"2", "b", 0}};
  fs::path p = dir / "j.csv";
  write_judgments_csv(js, p);
  auto back = read_judgments_csv(p);
  REQUIRE(back.size() == 2);
  CHECK(back[0].rating == 4);
  CHECK(back[1].doc_id == "b");

  std::ofstream out(p);
  out << "query_id,doc_id,rating\n1,a,7\n";
  out.close();
  CHECK_THROWS_AS(read_judgments_csv(p), ParseError);
  fs::remove_all(dir);
}

TEST_CASE("feature file round trip streams sparse rows") {
  fs::path dir = temp_dir();
  fs::path p = dir / "f.txt";
  {
    FeatureFileWriter w(p, 5);
    FeatureVector a(5);
    a.set(2, 1.5);
    a.set(5, -3.25);
    w.write_row("1", "x", a);
    FeatureVector b(5);  // all zero
    w.write_row("1", "y", b);
    w.close();
  }
  std::vector<FeatureRow> rows;
  int count = for_each_feature_row(p, [&rows](FeatureRow& r) {
    rows.push_back(std::move(r));
  });
  CHECK(count == 5);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].query_id == "1");
  CHECK(rows[0].doc_id == "x");
  CHECK(rows[0].features.at(2) == 1.5);
  CHECK(rows[0].features.at(5) == -3.25);
  CHECK(rows[0].features.at(1) == 0.0);
  CHECK(rows[1].features.at(2) == 0.0);
  fs::remove_all(dir);
}

TEST_CASE("anonymous registry names and groups") {
  FeatureRegistry reg = anonymous_registry(3);
  CHECK(reg.feature_count() == 3);
  CHECK(reg.entry(1).name == "f1");
  CHECK(reg.entry(3).name == "f3");
  CHECK(reg.entry(2).group == FeatureGroup::query_document);
  CHECK(reg.entry(2).attribute_key.empty());
  CHECK_FALSE(reg.entry(2).popularity);
}

namespace {

SavedModel make_tree_model(const RankingDataset& data) {
  LambdaMartConfig cfg;
  cfg.num_trees = 12;
  cfg.sub_sampling = 1.0;
  cfg.feature_sampling = 1.0;
  cfg.seed = 3;
  SavedModel m;
  m.kind = ModelKind::tree_ensemble;
  m.algo = "lambdamart";
  m.objective = "or";
  m.registry_fingerprint = data.registry().fingerprint();
  m.config.set("boosting.num-trees", "12");
  m.ensemble =
      train_lambdamart(DatasetView::all(data), Objective::order_rate, cfg);
  return m;
}

}  // namespace

TEST_CASE("model files for all three kinds survive a save/load/save cycle") {
  fs::path dir = temp_dir();
  RankingDataset data = random_dataset(81, 8, 6, 5);

  std::vector<SavedModel> models;
  models.push_back(make_tree_model(data));
  {
    SavedModel m;
    m.kind = ModelKind::linear;
    m.algo = "l2lr";
    m.objective = "ctr";
    m.registry_fingerprint = data.registry().fingerprint();
    LinearConfig cfg;
    cfg.seed = 4;
    m.linear = train_linear(DatasetView::all(data), Objective::click_rate, cfg);
    models.push_back(std::move(m));
  }
  {
    SavedModel m;
    m.kind = ModelKind::ranknet;
    m.algo = "ranknet";
    m.objective = "revr";
    m.registry_fingerprint = data.registry().fingerprint();
    RankNetConfig cfg;
    cfg.epochs = 2;
    cfg.pairs_per_epoch = 300;
    cfg.seed = 5;
    m.ranknet =
        train_ranknet(DatasetView::all(data), Objective::revenue_rate, cfg);
    models.push_back(std::move(m));
  }

  Rng rng(7);
  for (std::size_t i = 0; i < models.size(); ++i) {
    fs::path first = dir / ("m" + std::to_string(i) + ".model");
    save_model(models[i], first);
    SavedModel back = load_model(first);
    CHECK(back.algo == models[i].algo);
    CHECK(back.objective == models[i].objective);
    CHECK(back.registry_fingerprint == models[i].registry_fingerprint);
    CHECK(back.kind == models[i].kind);
    CHECK(back.config.canonical() == models[i].config.canonical());

    fs::path second = dir / ("m" + std::to_string(i) + ".again.model");
    save_model(back, second);
    CHECK(slurp(first) == slurp(second));

    ScoreFn a = models[i].scorer();
    ScoreFn b = back.scorer();
    for (int t = 0; t < 30; ++t) {
      FeatureVector fv(5);
      for (int j = 1; j <= 5; ++j) fv.set(j, rng.uniform(-5.0, 5.0));
      CHECK(a(fv) == doctest::Approx(b(fv)).epsilon(1e-7));
    }
  }
  fs::remove_all(dir);
}

TEST_CASE("verify_registry rejects a mismatched registry") {
  RankingDataset data = random_dataset(91, 3, 3, 4);
  SavedModel m = make_tree_model(data);
  m.verify_registry(data.registry());  // same fingerprint passes
  CHECK_THROWS_AS(m.verify_registry(anonymous_registry(5)), DataError);
}

TEST_CASE("model loader rejects corrupt files") {
  fs::path dir = temp_dir();
  fs::path p = dir / "bad.model";
  std::ofstream(p) << "not-a-model 1\n";
  CHECK_THROWS_AS(load_model(p), ParseError);

  RankingDataset data = random_dataset(95, 2, 3, 3);
  SavedModel m = make_tree_model(data);
  fs::path good = dir / "good.model";
  save_model(m, good);
  std::string text = slurp(good);
  std::ofstream(p) << text.substr(0, text.size() / 2);
  CHECK_THROWS_AS(load_model(p), ParseError);
  fs::remove_all(dir);
}
