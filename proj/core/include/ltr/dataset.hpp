#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ltr {

// The four engagement objectives a model can be trained against.
enum class Objective : int {
  click_rate = 0,     // ctr
  atc_ratio = 1,      // atcr, add-to-cart per click
  order_rate = 2,     // or
  revenue_rate = 3    // revr
};

inline constexpr std::array<Objective, 4> kAllObjectives = {
    Objective::click_rate, Objective::atc_ratio, Objective::order_rate,
    Objective::revenue_rate};

std::string_view objective_name(Objective o);
std::optional<Objective> objective_from_name(std::string_view name);

// One aggregated (query, product) row of the search log.
struct EngagementRecord {
  std::string query_id;
  std::string doc_id;
  long long impressions = 0;
  long long impressions_top2 = 0;  // impressions received at ranks 1-2
  long long clicks = 0;
  long long atc = 0;  // add-to-cart events
  long long orders = 0;
  double revenue = 0.0;
};

// Throws DataError on any negative count.
void validate_nonnegative(const EngagementRecord& r);
// clicks <= impressions, atc <= clicks, orders <= atc, top2 <= impressions,
// revenue > 0 implies orders > 0. Generator output always satisfies this;
// external logs only get a warning.
bool funnel_consistent(const EngagementRecord& r);

struct FeatureVector {
  std::vector<double> values;  // index 0 holds feature id 1

  FeatureVector() = default;
  explicit FeatureVector(std::size_t n) : values(n, 0.0) {}

  double at(int fid) const { return values[static_cast<std::size_t>(fid - 1)]; }
  void set(int fid, double v) { values[static_cast<std::size_t>(fid - 1)] = v; }
  int size() const { return static_cast<int>(values.size()); }
};

enum class FeatureGroup { query, document, query_document };

std::string_view feature_group_name(FeatureGroup g);
std::optional<FeatureGroup> feature_group_from_name(std::string_view name);

struct FeatureEntry {
  int id = 0;  // 1-based, contiguous
  std::string name;
  FeatureGroup group = FeatureGroup::query_document;
  std::string attribute_key;  // empty when not tied to a product attribute
  bool popularity = false;    // only meaningful for document features
};

class FeatureRegistry {
 public:
  FeatureRegistry() = default;
  explicit FeatureRegistry(std::vector<FeatureEntry> entries);

  int feature_count() const { return static_cast<int>(entries_.size()); }
  const FeatureEntry& entry(int fid) const {
    return entries_[static_cast<std::size_t>(fid - 1)];
  }
  const std::vector<FeatureEntry>& entries() const { return entries_; }
  std::optional<int> id_of(std::string_view name) const;

  // Stable hash of the canonical CSV serialization; stored in model files so
  // a model cannot silently be applied to vectors from another registry.
  std::uint64_t fingerprint() const;

 private:
  std::vector<FeatureEntry> entries_;
  std::map<std::string, int, std::less<>> by_name_;
};

// Grades per objective; -1 means the label is absent.
struct GradeSet {
  std::array<std::int8_t, 4> grades = {-1, -1, -1, -1};

  bool has(Objective o) const { return grades[static_cast<int>(o)] >= 0; }
  int grade(Objective o) const { return grades[static_cast<int>(o)]; }
  void set(Objective o, int g) {
    grades[static_cast<int>(o)] = static_cast<std::int8_t>(g);
  }
};

struct RankingInstance {
  std::string query_id;
  std::string doc_id;
  FeatureVector features;
  GradeSet labels;
};

struct QueryGroup {
  std::string query_id;
  std::vector<RankingInstance> instances;
};

class RankingDataset {
 public:
  RankingDataset() = default;
  // Validates: vector lengths match the registry, all values finite, grades
  // in [0,4] when present, doc ids unique per query, query ids unique.
  RankingDataset(FeatureRegistry registry, std::vector<QueryGroup> groups);

  const FeatureRegistry& registry() const { return registry_; }
  const std::vector<QueryGroup>& groups() const { return groups_; }
  std::size_t instance_count() const;

 private:
  FeatureRegistry registry_;
  std::vector<QueryGroup> groups_;
};

// Non-owning subset of a dataset's query groups. Trainers and metrics operate
// on views so cross-validation does not copy feature vectors.
struct DatasetView {
  const RankingDataset* data = nullptr;
  std::vector<std::uint32_t> group_indices;

  static DatasetView all(const RankingDataset& d);

  const FeatureRegistry& registry() const { return data->registry(); }
  std::size_t group_count() const { return group_indices.size(); }
  const QueryGroup& group(std::size_t i) const {
    return data->groups()[group_indices[i]];
  }
  std::size_t instance_count() const;
};

// Deep copy restricted to `keep_ids` (ascending 1-based feature ids). The new
// registry is re-numbered contiguously, names preserved.
RankingDataset project_features(const DatasetView& view,
                                const std::vector<int>& keep_ids);

}  // namespace ltr
