#include "artdesc/retriever/index.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "artdesc/binary_io.hpp"
#include "artdesc/errors.hpp"
#include "artdesc/retriever/text.hpp"

namespace artdesc::retriever {

namespace {

constexpr char kMagic[] = "ARTDTFIX";
constexpr std::uint32_t kVersion = 1;

double smoothed_idf(std::size_t n, std::uint32_t df) {
  return std::log((1.0 + static_cast<double>(n)) / (1.0 + static_cast<double>(df))) + 1.0;
}

// Term id -> raw count, ordered by id.
std::map<std::uint32_t, double> counts_of(const std::vector<std::uint32_t>& ids) {
  std::map<std::uint32_t, double> tf;
  for (auto id : ids) tf[id] += 1.0;
  return tf;
}

SparseVector weigh(const std::map<std::uint32_t, double>& tf, const std::vector<double>& idf) {
  SparseVector v;
  double sq = 0.0;
  for (const auto& [id, count] : tf) {
    const double w = count * idf[id];
    v.terms.push_back(id);
    v.weights.push_back(w);
    sq += w * w;
  }
  const double norm = std::sqrt(sq);
  if (norm > 0)
    for (auto& w : v.weights) w /= norm;
  return v;
}

}  // namespace

double SparseVector::norm() const {
  double sq = 0.0;
  for (double w : weights) sq += w * w;
  return std::sqrt(sq);
}

double SparseVector::dot(const SparseVector& other) const {
  double s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < terms.size() && j < other.terms.size()) {
    if (terms[i] < other.terms[j]) {
      ++i;
    } else if (terms[i] > other.terms[j]) {
      ++j;
    } else {
      s += weights[i++] * other.weights[j++];
    }
  }
  return s;
}

std::uint32_t TfIdfIndex::intern(const std::string& term) {
  auto [it, inserted] = term_ids_.emplace(term, static_cast<std::uint32_t>(terms_.size()));
  if (inserted) {
    terms_.push_back(term);
    df_.push_back(0);
  }
  return it->second;
}

TfIdfIndex TfIdfIndex::build(std::vector<KnowledgeArticle> articles) {
  std::sort(articles.begin(), articles.end(),
            [](const KnowledgeArticle& a, const KnowledgeArticle& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < articles.size(); ++i)
    if (articles[i].id == articles[i - 1].id) throw DataError("duplicate article id '" + articles[i].id + "'");

  TfIdfIndex index;
  std::vector<std::vector<std::uint32_t>> doc_terms;
  for (const auto& a : articles) {
    const auto terms = ngram_terms(normalize_text(a.body));
    if (terms.empty()) {
      index.dropped_.push_back(a.id);
      continue;
    }
    std::vector<std::uint32_t> ids;
    ids.reserve(terms.size());
    for (const auto& t : terms) ids.push_back(index.intern(t));
    for (auto id : std::set<std::uint32_t>(ids.begin(), ids.end())) ++index.df_[id];
    index.doc_ids_.push_back(a.id);
    index.titles_.push_back(a.title);
    doc_terms.push_back(std::move(ids));
  }
  if (index.doc_ids_.empty()) throw DataError("no usable articles to index");

  index.idf_.resize(index.terms_.size());
  for (std::size_t t = 0; t < index.terms_.size(); ++t) index.idf_[t] = smoothed_idf(index.size(), index.df_[t]);
  for (const auto& ids : doc_terms) {
    const SparseVector v = weigh(counts_of(ids), index.idf_);
    index.cols_.insert(index.cols_.end(), v.terms.begin(), v.terms.end());
    index.vals_.insert(index.vals_.end(), v.weights.begin(), v.weights.end());
    index.row_ptr_.push_back(index.cols_.size());
  }
  index.rebuild_postings();
  return index;
}

std::int64_t TfIdfIndex::term_id(const std::string& term) const {
  auto it = term_ids_.find(term);
  return it == term_ids_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

SparseVector TfIdfIndex::document(std::size_t doc) const {
  if (doc >= size()) throw std::out_of_range("document index out of range");
  SparseVector v;
  v.terms.assign(cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[doc]),
                 cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[doc + 1]));
  v.weights.assign(vals_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[doc]),
                   vals_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[doc + 1]));
  return v;
}

SparseVector TfIdfIndex::vectorize(const std::string& text) const {
  std::vector<std::uint32_t> ids;
  for (const auto& t : ngram_terms(normalize_text(text))) {
    auto it = term_ids_.find(t);
    if (it != term_ids_.end()) ids.push_back(it->second);
  }
  return weigh(counts_of(ids), idf_);
}

std::vector<ScoredArticle> TfIdfIndex::score_all(const SparseVector& query) const {
  // Accumulate in ascending term order so each score equals query.dot(doc).
  std::vector<double> acc(size(), 0.0);
  std::vector<char> touched(size(), 0);
  for (std::size_t q = 0; q < query.terms.size(); ++q) {
    for (const auto& [doc, w] : postings_[query.terms[q]]) {
      acc[doc] += query.weights[q] * w;
      touched[doc] = 1;
    }
  }
  std::vector<ScoredArticle> out;
  for (std::size_t d = 0; d < size(); ++d)
    if (touched[d]) out.push_back({doc_ids_[d], acc[d]});
  return out;
}

void TfIdfIndex::append_document(const KnowledgeArticle& article, const std::vector<std::string>& terms) {
  std::vector<std::uint32_t> ids;
  for (const auto& t : terms) ids.push_back(intern(t));
  doc_ids_.push_back(article.id);
  titles_.push_back(article.title);
  for (auto id : std::set<std::uint32_t>(ids.begin(), ids.end())) ++df_[id];
  while (idf_.size() < terms_.size()) idf_.push_back(smoothed_idf(size(), 1));
  const SparseVector v = weigh(counts_of(ids), idf_);
  cols_.insert(cols_.end(), v.terms.begin(), v.terms.end());
  vals_.insert(vals_.end(), v.weights.begin(), v.weights.end());
  row_ptr_.push_back(cols_.size());
}

bool TfIdfIndex::add_article(const KnowledgeArticle& article) {
  if (std::find(doc_ids_.begin(), doc_ids_.end(), article.id) != doc_ids_.end())
    throw DataError("duplicate article id '" + article.id + "'");
  const auto terms = ngram_terms(normalize_text(article.body));
  if (terms.empty()) return false;
  append_document(article, terms);
  rebuild_postings();
  return true;
}

void TfIdfIndex::rebuild_postings() {
  postings_.assign(terms_.size(), {});
  for (std::size_t d = 0; d < size(); ++d)
    for (auto p = row_ptr_[d]; p < row_ptr_[d + 1]; ++p)
      postings_[cols_[p]].emplace_back(static_cast<std::uint32_t>(d), vals_[p]);
}

void TfIdfIndex::write(std::ostream& out) const {
  io::Writer w(out);
  w.bytes(kMagic, 8);
  w.u32(kVersion);
  w.str(metadata_);
  w.u64(size());
  for (std::size_t d = 0; d < size(); ++d) {
    w.str(doc_ids_[d]);
    w.str(titles_[d]);
  }
  w.u64(terms_.size());
  for (std::size_t t = 0; t < terms_.size(); ++t) {
    w.str(terms_[t]);
    w.u32(df_[t]);
    w.f64(idf_[t]);
  }
  w.u64(dropped_.size());
  for (const auto& id : dropped_) w.str(id);
  for (auto p : row_ptr_) w.u64(p);
  for (std::size_t i = 0; i < cols_.size(); ++i) {
    w.u32(cols_[i]);
    w.f64(vals_[i]);
  }
}

TfIdfIndex TfIdfIndex::read(std::istream& in) {
  io::Reader r(in);
  char magic[8];
  r.bytes(magic, 8, "magic");
  if (std::string(magic, 8) != std::string(kMagic, 8)) throw FormatError("not an index file (bad magic)", 0);
  const auto version = r.u32("version");
  if (version != kVersion) throw FormatError("unsupported index version " + std::to_string(version), 8);

  TfIdfIndex index;
  index.metadata_ = r.str("metadata");
  const auto count_at = r.offset();
  const auto n = r.u64("document count");
  if (n == 0 || n > (1ull << 32)) throw FormatError("implausible document count", count_at);
  for (std::uint64_t d = 0; d < n; ++d) {
    index.doc_ids_.push_back(r.str("document id"));
    index.titles_.push_back(r.str("title"));
  }
  const auto terms = r.u64("term count");
  if (terms > (1ull << 32)) throw FormatError("implausible term count", r.offset() - 8);
  for (std::uint64_t t = 0; t < terms; ++t) {
    const auto offset = r.offset();
    const std::string term = r.str("term");
    const auto df = r.u32("document frequency");
    if (df == 0 || df > n) throw FormatError("document frequency out of range for '" + term + "'", offset);
    index.terms_.push_back(term);
    index.df_.push_back(df);
    index.idf_.push_back(r.f64("idf"));
    if (!index.term_ids_.emplace(term, static_cast<std::uint32_t>(t)).second)
      throw FormatError("duplicate term '" + term + "'", offset);
  }
  const auto dropped = r.u64("dropped count");
  for (std::uint64_t i = 0; i < dropped; ++i) index.dropped_.push_back(r.str("dropped id"));
  index.row_ptr_.clear();
  for (std::uint64_t d = 0; d <= n; ++d) {
    const auto offset = r.offset();
    const auto p = r.u64("row pointer");
    if ((d == 0 && p != 0) || (d > 0 && p < index.row_ptr_.back()) || p > (1ull << 40))
      throw FormatError("row pointers are not monotone", offset);
    index.row_ptr_.push_back(p);
  }
  for (std::uint64_t i = 0; i < index.row_ptr_.back(); ++i) {
    const auto offset = r.offset();
    const auto col = r.u32("term id");
    if (col >= terms) throw FormatError("term id out of range", offset);
    index.cols_.push_back(col);
    index.vals_.push_back(r.f64("weight"));
  }
  if (!r.at_eof()) throw FormatError("trailing bytes after index", r.offset());
  index.rebuild_postings();
  return index;
}

void TfIdfIndex::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write index " + path.string());
  write(out);
}

TfIdfIndex TfIdfIndex::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifactError("index", path.string());
  return read(in);
}

bool TfIdfIndex::operator==(const TfIdfIndex& o) const {
  return metadata_ == o.metadata_ && doc_ids_ == o.doc_ids_ && titles_ == o.titles_ && terms_ == o.terms_ && df_ == o.df_ && idf_ == o.idf_ &&
         dropped_ == o.dropped_ && row_ptr_ == o.row_ptr_ && cols_ == o.cols_ && vals_ == o.vals_;
}

RankResult rank(const std::string& query, const TfIdfIndex& index, int k) {
  if (k < 1) throw std::invalid_argument("rank: k must be at least 1");
  RankResult result;
  const SparseVector q = index.vectorize(query);
  if (q.terms.empty()) {
    result.warnings.push_back(normalize_text(query).empty() ? "query is empty after normalization"
                                                            : "query shares no terms with the index");
    return result;
  }
  auto scored = index.score_all(q);
  std::erase_if(scored, [](const ScoredArticle& s) { return !(s.score > 0.0); });
  const auto keep = std::min<std::size_t>(static_cast<std::size_t>(k), scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(),
                    [](const ScoredArticle& a, const ScoredArticle& b) {
                      return a.score != b.score ? a.score > b.score : a.id < b.id;
                    });
  scored.resize(keep);
  for (auto& s : scored) s.score = std::min(s.score, 1.0);
  result.hits = std::move(scored);
  return result;
}

}  // namespace artdesc::retriever
