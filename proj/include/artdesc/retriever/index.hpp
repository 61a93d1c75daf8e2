#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace artdesc::retriever {

struct KnowledgeArticle {
  std::string id;
  std::string title;
  std::string body;
};

/// Sparse vector: ascending term ids with their weights.
struct SparseVector {
  std::vector<std::uint32_t> terms;
  std::vector<double> weights;

  double norm() const;
  double dot(const SparseVector& other) const;
};

struct ScoredArticle {
  std::string id;
  double score = 0.0;

  bool operator==(const ScoredArticle&) const = default;
};

/// Bigram TF-IDF index with L2-normalized document vectors stored in CSR form.
/// Term weights are tf * idf with idf = ln((1 + N) / (1 + df)) + 1.
class TfIdfIndex {
 public:
  /// Articles are indexed in ascending id order; term ids follow first
  /// occurrence in that order. Articles whose body normalizes to nothing are
  /// skipped and listed in dropped(). Throws DataError on duplicate ids or when
  /// no article is usable.
  static TfIdfIndex build(std::vector<KnowledgeArticle> articles);

  std::size_t size() const { return doc_ids_.size(); }
  std::size_t term_count() const { return terms_.size(); }
  const std::vector<std::string>& doc_ids() const { return doc_ids_; }
  const std::vector<std::string>& titles() const { return titles_; }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<std::uint32_t>& document_frequency() const { return df_; }
  const std::vector<double>& idf() const { return idf_; }
  const std::vector<std::string>& dropped() const { return dropped_; }

  /// -1 when absent.
  std::int64_t term_id(const std::string& term) const;
  SparseVector document(std::size_t doc) const;

  /// Query vector over known terms only (unknown terms carry no idf and are
  /// ignored), L2-normalized; empty when nothing is known.
  SparseVector vectorize(const std::string& text) const;

  /// Cosine similarity with every document that shares a term with the query.
  std::vector<ScoredArticle> score_all(const SparseVector& query) const;

  /// Appends an article without recomputing idf: existing document vectors
  /// and scores are untouched. New terms get the idf of df = 1 at the new
  /// document count. Returns false (index unchanged) when the body is empty
  /// after normalization. Throws DataError on a duplicate id.
  bool add_article(const KnowledgeArticle& article);

  /// Free-form document stored with the index (the pipeline writes JSON with
  /// the config digest and seed).
  const std::string& metadata() const { return metadata_; }
  void set_metadata(std::string metadata) { metadata_ = std::move(metadata); }

  void write(std::ostream& out) const;
  static TfIdfIndex read(std::istream& in);
  void save(const std::filesystem::path& path) const;
  static TfIdfIndex load(const std::filesystem::path& path);

  bool operator==(const TfIdfIndex& other) const;

 private:
  std::string metadata_;
  std::vector<std::string> doc_ids_, titles_, terms_, dropped_;
  std::unordered_map<std::string, std::uint32_t> term_ids_;
  std::vector<std::uint32_t> df_;
  std::vector<double> idf_;
  std::vector<std::uint64_t> row_ptr_{0};
  std::vector<std::uint32_t> cols_;
  std::vector<double> vals_;
  // term -> (doc, weight), rebuilt on load
  std::vector<std::vector<std::pair<std::uint32_t, double>>> postings_;

  std::uint32_t intern(const std::string& term);
  void append_document(const KnowledgeArticle& article, const std::vector<std::string>& terms);
  void rebuild_postings();
};

struct RankResult {
  std::vector<ScoredArticle> hits;
  std::vector<std::string> warnings;
};

/// Top-k articles by cosine similarity, descending score, ties by ascending
/// id. Only articles with a positive score are returned. Throws
/// invalid_argument when k < 1.
RankResult rank(const std::string& query, const TfIdfIndex& index, int k = 5);

}  // namespace artdesc::retriever
