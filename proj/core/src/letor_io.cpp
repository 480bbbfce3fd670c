#include "ltr/letor_io.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include "ltr/error.hpp"

namespace ltr {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

double parse_real(std::string_view tok, int line_no, const char* what) {
  std::string tmp(tok);
  char* endp = nullptr;
  double v = std::strtod(tmp.c_str(), &endp);
  if (endp == tmp.c_str() || *endp != '\0')
    throw ParseError(std::string("malformed ") + what + ": '" + tmp + "'",
                     line_no);
  return v;
}

long long parse_int(std::string_view tok, int line_no, const char* what) {
  std::string tmp(tok);
  char* endp = nullptr;
  long long v = std::strtoll(tmp.c_str(), &endp, 10);
  if (endp == tmp.c_str() || *endp != '\0')
    throw ParseError(std::string("malformed ") + what + ": '" + tmp + "'",
                     line_no);
  return v;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  if (!out.empty() && !out.back().empty() && out.back().back() == '\r')
    out.back().pop_back();
  return out;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path.string());
  return in;
}

std::ofstream create_or_throw(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot create file: " + path.string());
  return out;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

RankingInstance parse_letor_line(std::string_view line, int line_no,
                                 Objective objective, int feature_count) {
  std::size_t hash = line.find('#');
  if (hash == std::string_view::npos)
    throw ParseError("missing '# docid=' comment", line_no);
  std::string_view body = line.substr(0, hash);
  std::string_view comment = line.substr(hash + 1);
  while (!comment.empty() && comment.front() == ' ') comment.remove_prefix(1);
  while (!comment.empty() && (comment.back() == ' ' || comment.back() == '\r'))
    comment.remove_suffix(1);
  if (comment.rfind("docid=", 0) != 0)
    throw ParseError("comment must be 'docid=<id>'", line_no);
  std::string doc_id(comment.substr(6));
  if (doc_id.empty()) throw ParseError("empty docid", line_no);

  std::vector<std::string_view> toks = split_ws(body);
  if (toks.size() < 2)
    throw ParseError("expected '<label> qid:<int> ...'", line_no);

  long long label = parse_int(toks[0], line_no, "label");
  if (label < 0 || label > 4)
    throw ParseError("label out of range [0,4]: " + std::to_string(label),
                     line_no);
  if (toks[1].rfind("qid:", 0) != 0)
    throw ParseError("second token must be 'qid:<int>'", line_no);
  long long qid = parse_int(toks[1].substr(4), line_no, "qid");
  if (qid < 0) throw ParseError("negative qid", line_no);

  RankingInstance inst;
  inst.query_id = std::to_string(qid);
  inst.doc_id = std::move(doc_id);
  inst.features = FeatureVector(static_cast<std::size_t>(feature_count));
  inst.labels.set(objective, static_cast<int>(label));

  int prev_fid = 0;
  for (std::size_t i = 2; i < toks.size(); ++i) {
    std::string_view tok = toks[i];
    std::size_t colon = tok.find(':');
    if (colon == std::string_view::npos)
      throw ParseError("malformed feature token: '" + std::string(tok) + "'",
                       line_no);
    long long fid = parse_int(tok.substr(0, colon), line_no, "feature id");
    if (fid <= prev_fid)
      throw ParseError("feature ids must be strictly increasing (saw " +
                           std::to_string(fid) + " after " +
                           std::to_string(prev_fid) + ")",
                       line_no);
    if (fid > feature_count)
      throw ParseError("feature id " + std::to_string(fid) +
                           " exceeds declared count " +
                           std::to_string(feature_count),
                       line_no);
    inst.features.set(
        static_cast<int>(fid),
        parse_real(tok.substr(colon + 1), line_no, "feature value"));
    prev_fid = static_cast<int>(fid);
  }
  return inst;
}

LetorHeader parse_letor_header(std::string_view line) {
  LetorHeader h;
  std::vector<std::string_view> toks = split_ws(line);
  if (toks.size() != 3 || toks[0] != "#" ||
      toks[1].rfind("objective=", 0) != 0 || toks[2].rfind("features=", 0) != 0)
    throw ParseError("bad header, expected '# objective=<name> features=<n>'",
                     1);
  std::string_view obj_name = toks[1].substr(10);
  auto obj = objective_from_name(obj_name);
  if (!obj)
    throw ParseError("unknown objective '" + std::string(obj_name) + "'", 1);
  h.objective = *obj;
  std::string_view count = toks[2].substr(9);
  while (!count.empty() && count.back() == '\r') count.remove_suffix(1);
  long long n = parse_int(count, 1, "feature count");
  if (n < 0) throw ParseError("negative feature count", 1);
  h.features = static_cast<int>(n);
  return h;
}

void write_letor(const DatasetView& view, Objective objective,
                 std::ostream& out) {
  out << "# objective=" << objective_name(objective)
      << " features=" << view.registry().feature_count() << "\n";
  for (std::size_t gi = 0; gi < view.group_count(); ++gi) {
    const QueryGroup& g = view.group(gi);
    if (!all_digits(g.query_id))
      throw DataError("query id '" + g.query_id +
                      "' is not numeric; cannot serialize as qid");
    for (const RankingInstance& inst : g.instances) {
      if (!inst.labels.has(objective))
        throw DataError("missing " + std::string(objective_name(objective)) +
                        " label for doc " + inst.doc_id);
      out << inst.labels.grade(objective) << " qid:" << g.query_id;
      const std::vector<double>& v = inst.features.values;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] != 0.0) out << ' ' << (i + 1) << ':' << format_real(v[i]);
      }
      out << " # docid=" << inst.doc_id << "\n";
    }
  }
}

void write_letor(const DatasetView& view, Objective objective,
                 const std::filesystem::path& path) {
  std::ofstream out = create_or_throw(path);
  write_letor(view, objective, out);
  out.flush();
  if (!out) throw DataError("write failed: " + path.string());
}

LetorHeader peek_letor_header(const std::filesystem::path& path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty file: " + path.string());
  return parse_letor_header(line);
}

namespace {

RankingDataset read_letor_impl(const std::filesystem::path& path,
                               FeatureRegistry registry) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty file: " + path.string());
  LetorHeader header = parse_letor_header(line);
  if (header.features != registry.feature_count())
    throw DataError("registry has " +
                    std::to_string(registry.feature_count()) +
                    " features but file declares " +
                    std::to_string(header.features));

  std::vector<QueryGroup> groups;
  std::map<std::string, std::size_t> group_of;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    RankingInstance inst =
        parse_letor_line(line, line_no, header.objective, header.features);
    auto [it, fresh] = group_of.emplace(inst.query_id, groups.size());
    if (fresh) {
      QueryGroup g;
      g.query_id = inst.query_id;
      groups.push_back(std::move(g));
    }
    groups[it->second].instances.push_back(std::move(inst));
  }
  return RankingDataset(std::move(registry), std::move(groups));
}

}  // namespace

RankingDataset read_letor(const std::filesystem::path& path,
                          const FeatureRegistry& registry) {
  return read_letor_impl(path, registry);
}

FeatureRegistry anonymous_registry(int feature_count) {
  std::vector<FeatureEntry> entries;
  entries.reserve(static_cast<std::size_t>(feature_count));
  for (int i = 1; i <= feature_count; ++i)
    entries.push_back({i, "f" + std::to_string(i),
                       FeatureGroup::query_document, "", false});
  return FeatureRegistry(std::move(entries));
}

RankingDataset read_letor(const std::filesystem::path& path) {
  return read_letor_impl(path, anonymous_registry(peek_letor_header(path).features));
}

std::vector<EngagementRecord> read_engagement_csv(
    const std::filesystem::path& path, int* funnel_warnings) {
  static const char* kHeader =
      "query_id,doc_id,impressions,impressions_top2,clicks,atc,orders,revenue";
  std::ifstream in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty file: " + path.string());
  strip_cr(line);
  if (line != kHeader)
    throw ParseError("bad engagement header, expected '" +
                     std::string(kHeader) + "'", 1);
  std::vector<EngagementRecord> records;
  int warnings = 0;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 8) throw ParseError("expected 8 fields", line_no);
    EngagementRecord r;
    r.query_id = f[0];
    r.doc_id = f[1];
    r.impressions = parse_int(f[2], line_no, "impressions");
    r.impressions_top2 = parse_int(f[3], line_no, "impressions_top2");
    r.clicks = parse_int(f[4], line_no, "clicks");
    r.atc = parse_int(f[5], line_no, "atc");
    r.orders = parse_int(f[6], line_no, "orders");
    r.revenue = parse_real(f[7], line_no, "revenue");
    validate_nonnegative(r);
    if (!funnel_consistent(r)) ++warnings;
    records.push_back(std::move(r));
  }
  if (funnel_warnings) *funnel_warnings = warnings;
  return records;
}

void write_engagement_csv(const std::vector<EngagementRecord>& records,
                          const std::filesystem::path& path) {
  std::ofstream out = create_or_throw(path);
  out << "query_id,doc_id,impressions,impressions_top2,clicks,atc,orders,"
         "revenue\n";
  for (const EngagementRecord& r : records) {
    out << r.query_id << ',' << r.doc_id << ',' << r.impressions << ','
        << r.impressions_top2 << ',' << r.clicks << ',' << r.atc << ','
        << r.orders << ',' << format_real(r.revenue) << "\n";
  }
  out.flush();
  if (!out) throw DataError("write failed: " + path.string());
}

FeatureRegistry read_registry_csv(const std::filesystem::path& path) {
  static const char* kHeader = "id,name,group,attribute_key,popularity_flag";
  std::ifstream in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty file: " + path.string());
  strip_cr(line);
  if (line != kHeader)
    throw ParseError("bad registry header, expected '" + std::string(kHeader) +
                     "'", 1);
  std::vector<FeatureEntry> entries;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 5) throw ParseError("expected 5 fields", line_no);
    FeatureEntry e;
    e.id = static_cast<int>(parse_int(f[0], line_no, "id"));
    e.name = f[1];
    auto g = feature_group_from_name(f[2]);
    if (!g) throw ParseError("unknown feature group '" + f[2] + "'", line_no);
    e.group = *g;
    e.attribute_key = f[3];
    if (f[4] != "0" && f[4] != "1")
      throw ParseError("popularity_flag must be 0 or 1", line_no);
    e.popularity = f[4] == "1";
    entries.push_back(std::move(e));
  }
  return FeatureRegistry(std::move(entries));
}

void write_registry_csv(const FeatureRegistry& registry,
                        const std::filesystem::path& path) {
  std::ofstream out = create_or_throw(path);
  out << "id,name,group,attribute_key,popularity_flag\n";
  for (const FeatureEntry& e : registry.entries()) {
    out << e.id << ',' << e.name << ',' << feature_group_name(e.group) << ','
        << e.attribute_key << ',' << (e.popularity ? 1 : 0) << "\n";
  }
  out.flush();
  if (!out) throw DataError("write failed: " + path.string());
}

std::vector<CrowdJudgment> read_judgments_csv(
    const std::filesystem::path& path) {
  static const char* kHeader = "query_id,doc_id,rating";
  std::ifstream in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty file: " + path.string());
  strip_cr(line);
  if (line != kHeader)
    throw ParseError("bad judgments header, expected '" + std::string(kHeader) +
                     "'", 1);
  std::vector<CrowdJudgment> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 3) throw ParseError("expected 3 fields", line_no);
    CrowdJudgment j;
    j.query_id = f[0];
    j.doc_id = f[1];
    long long r = parse_int(f[2], line_no, "rating");
    if (r < 0 || r > 4)
      throw ParseError("rating out of range [0,4]: " + std::to_string(r),
                       line_no);
    j.rating = static_cast<int>(r);
    out.push_back(std::move(j));
  }
  return out;
}

void write_judgments_csv(const std::vector<CrowdJudgment>& judgments,
                         const std::filesystem::path& path) {
  std::ofstream out = create_or_throw(path);
  out << "query_id,doc_id,rating\n";
  for (const CrowdJudgment& j : judgments)
    out << j.query_id << ',' << j.doc_id << ',' << j.rating << "\n";
  out.flush();
  if (!out) throw DataError("write failed: " + path.string());
}

struct FeatureFileWriter::Impl {
  std::ofstream out;
  int feature_count = 0;
  std::filesystem::path path;
};

FeatureFileWriter::FeatureFileWriter(const std::filesystem::path& path,
                                     int feature_count)
    : impl_(std::make_unique<Impl>()) {
  impl_->out = create_or_throw(path);
  impl_->feature_count = feature_count;
  impl_->path = path;
  impl_->out << "# features=" << feature_count << "\n";
}

FeatureFileWriter::~FeatureFileWriter() = default;

void FeatureFileWriter::write_row(const std::string& query_id,
                                  const std::string& doc_id,
                                  const FeatureVector& features) {
  if (features.size() != impl_->feature_count)
    throw DataError("feature row length mismatch for doc " + doc_id);
  impl_->out << query_id << ' ' << doc_id;
  const std::vector<double>& v = features.values;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] != 0.0) impl_->out << ' ' << (i + 1) << ':' << format_real(v[i]);
  impl_->out << "\n";
}

void FeatureFileWriter::close() {
  impl_->out.flush();
  if (!impl_->out) throw DataError("write failed: " + impl_->path.string());
  impl_->out.close();
}

int for_each_feature_row(const std::filesystem::path& path,
                         const std::function<void(FeatureRow&)>& fn) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty file: " + path.string());
  strip_cr(line);
  if (line.rfind("# features=", 0) != 0)
    throw ParseError("bad feature file header", 1);
  long long count = parse_int(line.substr(11), 1, "feature count");
  if (count < 0) throw ParseError("negative feature count", 1);

  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    std::vector<std::string_view> toks = split_ws(line);
    if (toks.size() < 2)
      throw ParseError("expected '<query_id> <doc_id> ...'", line_no);
    FeatureRow row;
    row.query_id = std::string(toks[0]);
    row.doc_id = std::string(toks[1]);
    row.features = FeatureVector(static_cast<std::size_t>(count));
    int prev_fid = 0;
    for (std::size_t i = 2; i < toks.size(); ++i) {
      std::string_view tok = toks[i];
      std::size_t colon = tok.find(':');
      if (colon == std::string_view::npos)
        throw ParseError("malformed feature token: '" + std::string(tok) + "'",
                         line_no);
      long long fid = parse_int(tok.substr(0, colon), line_no, "feature id");
      if (fid <= prev_fid || fid > count)
        throw ParseError("bad feature id " + std::to_string(fid), line_no);
      row.features.set(
          static_cast<int>(fid),
          parse_real(tok.substr(colon + 1), line_no, "feature value"));
      prev_fid = static_cast<int>(fid);
    }
    fn(row);
  }
  return static_cast<int>(count);
}

}  // namespace ltr
