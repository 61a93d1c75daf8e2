#include "retrieval_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "artdesc/retriever/text.hpp"

namespace artdesc::testing {

namespace {

std::vector<std::string> grams(const std::string& text) {
  const auto toks = retriever::normalize_text(text);
  std::vector<std::string> out = toks;
  for (std::size_t i = 1; i < toks.size(); ++i) out.push_back(toks[i - 1] + " " + toks[i]);
  return out;
}

const char* const kSyllables[] = {"ka", "lo", "mi", "re", "tu", "sa", "no", "vi", "pe", "gu", "zo", "da"};

}  // namespace

DenseTfIdf::DenseTfIdf(const std::vector<retriever::KnowledgeArticle>& articles) {
  std::set<std::string> terms;
  std::vector<const retriever::KnowledgeArticle*> kept;
  for (const auto& a : articles) {
    const auto g = grams(a.body);
    if (g.empty()) continue;
    terms.insert(g.begin(), g.end());
    kept.push_back(&a);
  }
  vocab_.assign(terms.begin(), terms.end());
  const auto n = static_cast<Eigen::Index>(kept.size());
  const auto v = static_cast<Eigen::Index>(vocab_.size());
  nc::Matrix tf = nc::Matrix::Zero(n, v);
  for (Eigen::Index d = 0; d < n; ++d) {
    ids_.push_back(kept[static_cast<std::size_t>(d)]->id);
    tf.row(d) = counts(kept[static_cast<std::size_t>(d)]->body).transpose();
  }
  idf_.resize(v);
  for (Eigen::Index t = 0; t < v; ++t) {
    const double df = static_cast<double>((tf.col(t).array() > 0).count());
    idf_(t) = std::log((1.0 + static_cast<double>(n)) / (1.0 + df)) + 1.0;
  }
  docs_ = tf * idf_.asDiagonal();
  docs_.rowwise().normalize();
}

nc::Vector DenseTfIdf::counts(const std::string& text) const {
  nc::Vector c = nc::Vector::Zero(static_cast<Eigen::Index>(vocab_.size()));
  for (const auto& g : grams(text)) {
    auto it = std::lower_bound(vocab_.begin(), vocab_.end(), g);
    if (it != vocab_.end() && *it == g) c(it - vocab_.begin()) += 1.0;
  }
  return c;
}

std::size_t DenseTfIdf::row_of(const std::string& id) const {
  return static_cast<std::size_t>(std::find(ids_.begin(), ids_.end(), id) - ids_.begin());
}

double DenseTfIdf::similarity(const std::string& a, const std::string& b) const {
  return docs_.row(static_cast<Eigen::Index>(row_of(a))).dot(docs_.row(static_cast<Eigen::Index>(row_of(b))));
}

std::vector<retriever::ScoredArticle> DenseTfIdf::rank(const std::string& query) const {
  nc::Vector q = counts(query).cwiseProduct(idf_);
  if (q.norm() == 0) return {};
  q.normalize();
  const nc::Vector scores = docs_ * q;
  std::vector<retriever::ScoredArticle> out;
  for (std::size_t d = 0; d < ids_.size(); ++d)
    if (scores(static_cast<Eigen::Index>(d)) > 0) out.push_back({ids_[d], scores(static_cast<Eigen::Index>(d))});
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.score != b.score ? a.score > b.score : a.id < b.id;
  });
  return out;
}

std::string random_words(nc::Rng& rng, int count, int pool) {
  std::string s;
  for (int i = 0; i < count; ++i) {
    // squared uniform skews towards low ranks
    const double u = rng.uniform();
    auto w = static_cast<int>(u * u * pool);
    std::string word;
    do {
      word += kSyllables[w % 12];
      w /= 12;
    } while (w > 0);
    word += "x";
    s += (i ? " " : "") + word;
  }
  return s;
}

std::vector<retriever::KnowledgeArticle> random_articles(int n, nc::Rng& rng, int pool, int min_len, int max_len) {
  std::vector<retriever::KnowledgeArticle> out;
  for (int i = 0; i < n; ++i) {
    const int len = min_len + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_len - min_len + 1)));
    char id[16];
    std::snprintf(id, sizeof id, "doc%03d", i);
    out.push_back({id, id, random_words(rng, len, pool)});
  }
  return out;
}

}  // namespace artdesc::testing
