#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "ltr/dataset.hpp"

namespace ltr {

// Formats a real with 9 significant digits; the round-trip precision every
// text format in this toolkit guarantees.
std::string format_real(double v);

// One data line:  <label> qid:<int> <fid>:<real> ... # docid=<string>
// Feature ids must be strictly increasing; omitted ids read as 0.
RankingInstance parse_letor_line(std::string_view line, int line_no,
                                 Objective objective, int feature_count);

struct LetorHeader {
  Objective objective = Objective::click_rate;
  int features = 0;
};

// Header line: "# objective=<name> features=<count>".
LetorHeader parse_letor_header(std::string_view line);

void write_letor(const DatasetView& view, Objective objective,
                 const std::filesystem::path& path);
void write_letor(const DatasetView& view, Objective objective,
                 std::ostream& out);

// Placeholder registry f1..fN (query-document, no attributes) for data whose
// real registry is not at hand.
FeatureRegistry anonymous_registry(int feature_count);

// Registry must match the file's feature count. Labels land on the file's
// objective; the other three stay absent.
RankingDataset read_letor(const std::filesystem::path& path,
                          const FeatureRegistry& registry);
// Convenience: builds an anonymous registry (f1..fN, query-document) from the
// header when no registry file is at hand.
RankingDataset read_letor(const std::filesystem::path& path);
LetorHeader peek_letor_header(const std::filesystem::path& path);

// Engagement log CSV with header
// query_id,doc_id,impressions,impressions_top2,clicks,atc,orders,revenue
std::vector<EngagementRecord> read_engagement_csv(
    const std::filesystem::path& path, int* funnel_warnings = nullptr);
void write_engagement_csv(const std::vector<EngagementRecord>& records,
                          const std::filesystem::path& path);

// Registry CSV with header id,name,group,attribute_key,popularity_flag
FeatureRegistry read_registry_csv(const std::filesystem::path& path);
void write_registry_csv(const FeatureRegistry& registry,
                        const std::filesystem::path& path);

// Crowd judgments CSV with header query_id,doc_id,rating
struct CrowdJudgment {
  std::string query_id;
  std::string doc_id;
  int rating = 0;  // 0..4
};
std::vector<CrowdJudgment> read_judgments_csv(const std::filesystem::path& path);
void write_judgments_csv(const std::vector<CrowdJudgment>& judgments,
                         const std::filesystem::path& path);

// Feature file: "# features=<count>" then one sparse row per pair:
//   <query_id> <doc_id> <fid>:<real> ...
// Rows stream in file order; the visitor keeps what it needs.
class FeatureFileWriter {
 public:
  FeatureFileWriter(const std::filesystem::path& path, int feature_count);
  ~FeatureFileWriter();
  void write_row(const std::string& query_id, const std::string& doc_id,
                 const FeatureVector& features);
  void close();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct FeatureRow {
  std::string query_id;
  std::string doc_id;
  FeatureVector features;
};

// Calls fn for every row. Returns the declared feature count.
int for_each_feature_row(const std::filesystem::path& path,
                         const std::function<void(FeatureRow&)>& fn);

}  // namespace ltr
