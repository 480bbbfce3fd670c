#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "ltr/error.hpp"
#include "ltr/letor_io.hpp"
#include "ltr/metrics.hpp"
#include "ltr/rng.hpp"

using namespace ltr;

namespace {

// Brute-force DCG written independently of the library: explicit loop, gain
// and discount spelled out.
double naive_dcg(const std::vector<int>& grades, int k) {
  double s = 0.0;
  for (std::size_t r = 0; r < grades.size() && static_cast<int>(r) < k; ++r)
    s += (std::pow(2.0, grades[r]) - 1.0) /
         (std::log(static_cast<double>(r) + 2.0) / std::log(2.0));
  return s;
}

// Ideal DCG by trying every permutation, not by sorting.
double naive_best_dcg(std::vector<int> grades, int k) {
  std::sort(grades.begin(), grades.end());
  double best = 0.0;
  do {
    best = std::max(best, naive_dcg(grades, k));
  } while (std::next_permutation(grades.begin(), grades.end()));
  return best;
}

}  // namespace

TEST_CASE("dcg and ndcg frozen hand values") {
  std::vector<int> a = {4, 0, 0};
  CHECK(dcg_at_k(a, 3) == doctest::Approx(15.0).epsilon(1e-12));

  std::vector<int> b = {3, 2};
  // 7/log2(2) + 3/log2(3)
  CHECK(dcg_at_k(b, 2) == doctest::Approx(8.892789260714372).epsilon(1e-12));

  std::vector<int> c = {0, 4};
  auto n = ndcg_at_k(c, 2);
  REQUIRE(n.has_value());
  CHECK(*n == doctest::Approx(0.6309297535714575).epsilon(1e-9));

  std::vector<int> zeros = {0, 0, 0};
  CHECK_FALSE(ndcg_at_k(zeros, 3).has_value());

  std::vector<int> perfect = {4, 3, 2, 1, 0};
  CHECK(*ndcg_at_k(perfect, 5) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("dcg truncation cuts strictly after k") {
  std::vector<int> g = {1, 4, 4};
  CHECK(dcg_at_k(g, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dcg_at_k(g, 2) == doctest::Approx(1.0 + 15.0 / std::log2(3.0)).epsilon(1e-12));
  CHECK(dcg_at_k(g, 50) == dcg_at_k(g, 3));
}

TEST_CASE("ndcg agrees with permutation brute force on random lists") {
  Rng rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<int> grades(1 + rng.uniform_int(6));
    for (auto& g : grades) g = static_cast<int>(rng.uniform_int(5));
    int k = 1 + static_cast<int>(rng.uniform_int(grades.size()));
    double best = naive_best_dcg(grades, k);
    auto n = ndcg_at_k(grades, k);
    if (best == 0.0) {
      CHECK_FALSE(n.has_value());
    } else {
      REQUIRE(n.has_value());
      CHECK(*n == doctest::Approx(naive_dcg(grades, k) / best).epsilon(1e-12));
      CHECK(*n >= 0.0);
      CHECK(*n <= 1.0 + 1e-12);
    }
  }
}

namespace {

RankingDataset two_query_dataset() {
  FeatureRegistry reg = anonymous_registry(1);
  std::vector<QueryGroup> groups(2);
  groups[0].query_id = "1";
  groups[1].query_id = "2";
  auto add = [](QueryGroup& g, const std::string& doc, double f, int grade) {
    RankingInstance inst;
    inst.query_id = g.query_id;
    inst.doc_id = doc;
    inst.features = FeatureVector(1);
    inst.features.set(1, f);
    inst.labels.set(Objective::click_rate, grade);
    g.instances.push_back(std::move(inst));
  };
  add(groups[0], "a", 1.0, 0);
  add(groups[0], "b", 2.0, 4);
  add(groups[1], "a", 5.0, 0);  // all-zero query, skipped by ndcg
  add(groups[1], "b", 1.0, 0);
  return RankingDataset(std::move(reg), std::move(groups));
}

}  // namespace

TEST_CASE("per_query_ndcg ranks by score, ties by doc_id, skips zero-ideal") {
  RankingDataset data = two_query_dataset();
  auto by_feature = [](const FeatureVector& fv) { return fv.at(1); };
  auto rows = per_query_ndcg(by_feature, DatasetView::all(data),
                             Objective::click_rate, 10);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].query_id == "1");
  CHECK(*rows[0].ndcg == doctest::Approx(1.0));
  CHECK_FALSE(rows[1].ndcg.has_value());
  CHECK(mean_ndcg(rows) == doctest::Approx(1.0));

  // Constant scorer: order falls back to ascending doc_id, so "a" (grade 0)
  // leads and query 1 scores the [0,4] value.
  auto constant = [](const FeatureVector&) { return 0.0; };
  auto tied = per_query_ndcg(constant, DatasetView::all(data),
                             Objective::click_rate, 10);
  CHECK(*tied[0].ndcg == doctest::Approx(0.6309297535714575).epsilon(1e-9));

  // atcr labels were never set; asking for them is an error, not a zero
  CHECK_THROWS_AS(per_query_ndcg(by_feature, DatasetView::all(data),
                                 Objective::atc_ratio, 10),
                  DataError);

  // a view whose only scored query is skipped has no mean
  DatasetView only_skipped{&data, {1}};
  CHECK_THROWS_AS(mean_ndcg(by_feature, only_skipped, Objective::click_rate, 10),
                  DataError);
}

TEST_CASE("wilcoxon frozen small-sample values") {
  std::vector<std::pair<double, double>> six;
  for (int i = 1; i <= 6; ++i) six.push_back({i + 10.0, 10.0});
  auto r6 = wilcoxon_signed_rank(six);
  CHECK(r6.n == 6);
  CHECK(r6.statistic == doctest::Approx(21.0));
  CHECK(r6.p_value == doctest::Approx(0.03125).epsilon(1e-12));
  CHECK(r6.significant);

  std::vector<std::pair<double, double>> five(six.begin(), six.end() - 1);
  auto r5 = wilcoxon_signed_rank(five);
  CHECK(r5.p_value == doctest::Approx(0.0625).epsilon(1e-12));
  CHECK_FALSE(r5.significant);

  // diffs {5,-1,2,3,-4}: T+ = 10, T- = 5, exact two-sided p = 20/32
  std::vector<std::pair<double, double>> mixed = {
      {5, 0}, {0, 1}, {2, 0}, {3, 0}, {0, 4}};
  auto rm = wilcoxon_signed_rank(mixed);
  CHECK(rm.statistic == doctest::Approx(5.0));
  CHECK(rm.p_value == doctest::Approx(0.625).epsilon(1e-12));
  CHECK_FALSE(rm.significant);
}

TEST_CASE("wilcoxon drops zero differences and handles empty input") {
  std::vector<std::pair<double, double>> same = {{1, 1}, {2, 2}, {3, 3}};
  auto r = wilcoxon_signed_rank(same);
  CHECK(r.n == 0);
  CHECK(r.statistic == 0.0);
  CHECK(r.p_value == 1.0);
  CHECK_FALSE(r.significant);

  std::vector<std::pair<double, double>> mixed = {{1, 1}, {5, 2}, {7, 2}};
  CHECK(wilcoxon_signed_rank(mixed).n == 2);
}

TEST_CASE("wilcoxon tie handling uses average ranks") {
  // diffs {1,1,-1}: |d| all tied, average rank 2 each. T+ = 4, T- = 2.
  std::vector<std::pair<double, double>> ties = {{1, 0}, {1, 0}, {0, 1}};
  auto r = wilcoxon_signed_rank(ties);
  CHECK(r.statistic == doctest::Approx(2.0));
  // enumeration over 8 sign vectors of T+ in {0,2,4,6}: P(T+>=4)=4/8,
  // P(T+<=4)=6/8, two-sided p = 1.0
  CHECK(r.p_value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("wilcoxon large-sample path stays a sane p-value") {
  Rng rng(4);
  std::vector<std::pair<double, double>> big;
  for (int i = 0; i < 60; ++i) big.push_back({rng.uniform(), rng.uniform()});
  auto r = wilcoxon_signed_rank(big);
  CHECK(r.n == 60);
  CHECK(r.p_value > 0.0);
  CHECK(r.p_value <= 1.0);

  // shift one sample far: p collapses toward 0
  for (auto& p : big) p.first += 10.0;
  auto shifted = wilcoxon_signed_rank(big);
  CHECK(shifted.p_value < 1e-6);
  CHECK(shifted.statistic > 0.0);
  CHECK(shifted.significant);
}

TEST_CASE("entropy and info gain") {
  std::vector<int> half = {0, 0, 1, 1};
  CHECK(entropy_bits(half) == doctest::Approx(1.0).epsilon(1e-12));
  std::vector<int> pure = {2, 2, 2};
  CHECK(entropy_bits(pure) == doctest::Approx(0.0));

  // feature separates the grades perfectly: gain = H(grade) = 1 bit
  std::vector<double> f = {0.0, 0.0, 1.0, 1.0};
  std::vector<int> g = {0, 0, 4, 4};
  CHECK(info_gain(f, g) == doctest::Approx(1.0).epsilon(1e-9));

  // constant feature: one merged bin, zero gain
  std::vector<double> c = {3.0, 3.0, 3.0, 3.0};
  CHECK(info_gain(c, g) == doctest::Approx(0.0));

  std::vector<double> wrong = {1.0};
  CHECK_THROWS_AS(info_gain(wrong, g), DataError);
}

TEST_CASE("info gain bounded by label entropy on random data") {
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n = 20 + rng.uniform_int(80);
    std::vector<double> f(n);
    std::vector<int> g(n);
    for (std::size_t i = 0; i < n; ++i) {
      f[i] = rng.uniform();
      g[i] = static_cast<int>(rng.uniform_int(5));
    }
    double gain = info_gain(f, g);
    CHECK(gain >= -1e-12);
    CHECK(gain <= entropy_bits(g) + 1e-12);
  }
}
