#include "ltr/dataset.hpp"

#include <cmath>
#include <set>

#include "ltr/error.hpp"
#include "ltr/rng.hpp"

namespace ltr {

std::string_view objective_name(Objective o) {
  switch (o) {
    case Objective::click_rate: return "ctr";
    case Objective::atc_ratio: return "atcr";
    case Objective::order_rate: return "or";
    case Objective::revenue_rate: return "revr";
  }
  return "?";
}

std::optional<Objective> objective_from_name(std::string_view name) {
  if (name == "ctr") return Objective::click_rate;
  if (name == "atcr") return Objective::atc_ratio;
  if (name == "or") return Objective::order_rate;
  if (name == "revr") return Objective::revenue_rate;
  return std::nullopt;
}

void validate_nonnegative(const EngagementRecord& r) {
  if (r.impressions < 0 || r.impressions_top2 < 0 || r.clicks < 0 ||
      r.atc < 0 || r.orders < 0 || r.revenue < 0.0)
    throw DataError("negative engagement count for query=" + r.query_id +
                    " doc=" + r.doc_id);
}

bool funnel_consistent(const EngagementRecord& r) {
  if (r.impressions_top2 > r.impressions) return false;
  if (r.clicks > r.impressions) return false;
  if (r.atc > r.clicks) return false;
  if (r.orders > r.atc) return false;
  if (r.revenue > 0.0 && r.orders == 0) return false;
  return true;
}

std::string_view feature_group_name(FeatureGroup g) {
  switch (g) {
    case FeatureGroup::query: return "query";
    case FeatureGroup::document: return "document";
    case FeatureGroup::query_document: return "query-document";
  }
  return "?";
}

std::optional<FeatureGroup> feature_group_from_name(std::string_view name) {
  if (name == "query") return FeatureGroup::query;
  if (name == "document") return FeatureGroup::document;
  if (name == "query-document") return FeatureGroup::query_document;
  return std::nullopt;
}

FeatureRegistry::FeatureRegistry(std::vector<FeatureEntry> entries)
    : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const FeatureEntry& e = entries_[i];
    if (e.id != static_cast<int>(i) + 1)
      throw DataError("registry ids must be contiguous from 1, got id " +
                      std::to_string(e.id) + " at position " +
                      std::to_string(i + 1));
    if (e.name.empty()) throw DataError("registry entry with empty name");
    if (e.popularity && e.group != FeatureGroup::document)
      throw DataError("popularity flag on non-document feature: " + e.name);
    if (!by_name_.emplace(e.name, e.id).second)
      throw DataError("duplicate feature name: " + e.name);
  }
}

std::optional<int> FeatureRegistry::id_of(std::string_view name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t FeatureRegistry::fingerprint() const {
  std::string canon;
  for (const FeatureEntry& e : entries_) {
    canon += std::to_string(e.id);
    canon += ',';
    canon += e.name;
    canon += ',';
    canon += feature_group_name(e.group);
    canon += ',';
    canon += e.attribute_key;
    canon += ',';
    canon += e.popularity ? '1' : '0';
    canon += '\n';
  }
  return fnv1a64(canon);
}

RankingDataset::RankingDataset(FeatureRegistry registry,
                               std::vector<QueryGroup> groups)
    : registry_(std::move(registry)), groups_(std::move(groups)) {
  std::set<std::string> qids;
  const std::size_t want = static_cast<std::size_t>(registry_.feature_count());
  for (const QueryGroup& g : groups_) {
    if (!qids.insert(g.query_id).second)
      throw DataError("duplicate query id: " + g.query_id);
    std::set<std::string> dids;
    for (const RankingInstance& inst : g.instances) {
      if (inst.query_id != g.query_id)
        throw DataError("instance query id mismatch in group " + g.query_id);
      if (!dids.insert(inst.doc_id).second)
        throw DataError("duplicate doc id " + inst.doc_id + " in query " +
                        g.query_id);
      if (inst.features.values.size() != want)
        throw DataError("feature vector length " +
                        std::to_string(inst.features.values.size()) +
                        " does not match registry count " +
                        std::to_string(want) + " (doc " + inst.doc_id + ")");
      for (double v : inst.features.values)
        if (!std::isfinite(v))
          throw DataError("non-finite feature value for doc " + inst.doc_id);
      for (Objective o : kAllObjectives) {
        if (inst.labels.has(o) &&
            (inst.labels.grade(o) < 0 || inst.labels.grade(o) > 4))
          throw DataError("grade out of range for doc " + inst.doc_id);
      }
    }
  }
}

std::size_t RankingDataset::instance_count() const {
  std::size_t n = 0;
  for (const QueryGroup& g : groups_) n += g.instances.size();
  return n;
}

DatasetView DatasetView::all(const RankingDataset& d) {
  DatasetView v;
  v.data = &d;
  v.group_indices.resize(d.groups().size());
  for (std::size_t i = 0; i < v.group_indices.size(); ++i)
    v.group_indices[i] = static_cast<std::uint32_t>(i);
  return v;
}

std::size_t DatasetView::instance_count() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < group_count(); ++i) n += group(i).instances.size();
  return n;
}

RankingDataset project_features(const DatasetView& view,
                                const std::vector<int>& keep_ids) {
  const FeatureRegistry& reg = view.registry();
  std::vector<FeatureEntry> entries;
  entries.reserve(keep_ids.size());
  int next_id = 1;
  for (int fid : keep_ids) {
    if (fid < 1 || fid > reg.feature_count())
      throw DataError("projection id out of range: " + std::to_string(fid));
    FeatureEntry e = reg.entry(fid);
    e.id = next_id++;
    entries.push_back(std::move(e));
  }
  FeatureRegistry projected(std::move(entries));

  std::vector<QueryGroup> groups;
  groups.reserve(view.group_count());
  for (std::size_t gi = 0; gi < view.group_count(); ++gi) {
    const QueryGroup& src = view.group(gi);
    QueryGroup dst;
    dst.query_id = src.query_id;
    dst.instances.reserve(src.instances.size());
    for (const RankingInstance& inst : src.instances) {
      RankingInstance out;
      out.query_id = inst.query_id;
      out.doc_id = inst.doc_id;
      out.labels = inst.labels;
      out.features.values.reserve(keep_ids.size());
      for (int fid : keep_ids) out.features.values.push_back(inst.features.at(fid));
      dst.instances.push_back(std::move(out));
    }
    groups.push_back(std::move(dst));
  }
  return RankingDataset(std::move(projected), std::move(groups));
}

}  // namespace ltr
