#include <cmath>
#include <sstream>
#include <unordered_map>

#include "artdesc/corpus/features.hpp"
#include "artdesc/corpus/masking.hpp"
#include "artdesc/corpus/reader.hpp"
#include "artdesc/corpus/tagger.hpp"
#include "artdesc/corpus/text.hpp"
#include "artdesc/corpus/vocab.hpp"
#include "artdesc/errors.hpp"
#include "artdesc/numcore/random.hpp"
#include "doctest.h"

using namespace artdesc;
using namespace artdesc::corpus;

namespace {

const char* kVasari =
    "An account of Vasari says that Signorelli wanted to represent in the figure of the naked Christ his own son, "
    "who died of plague in 1502.";

GazetteerTagger art_gazetteer() {
  GazetteerTagger g;
  std::istringstream in("Vasari\tperson\nSignorelli\tperson\nChrist\tperson\nLuca Signorelli\tperson\n"
                        "Orvieto\tlocation\n# comment\n\nUffizi\torganization\n");
  g.load(in);
  return g;
}

}  // namespace

TEST_CASE("split_sentences") {
  CHECK(split_sentences("One. Two.") == std::vector<std::string>{"One.", "Two."});
  CHECK(split_sentences("A. B.") == std::vector<std::string>{"A. B."});
  CHECK(split_sentences("").empty());
  CHECK(split_sentences("Painted c. 1500 in Rome. It hangs in St. Peter's!  Really?") ==
        std::vector<std::string>{"Painted c. 1500 in Rome.", "It hangs in St. Peter's!", "Really?"});

  const std::vector<std::string> pool{"The panel was cut down.", "Its colours are bright!",
                                      "Was it painted by Mr. Smith?", "The saint stands on the left.",
                                      "Two donors kneel (c. 1480).", "The sky is gold."};
  artdesc::nc::Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::string> picked;
    const auto n = 1 + rng.below(8);
    for (std::uint64_t i = 0; i < n; ++i) picked.push_back(pool[rng.below(pool.size())]);
    CHECK(split_sentences(join(picked, "  \n ")) == picked);
  }
}

TEST_CASE("tokenize") {
  CHECK(tokenize("Christ's son, [sic] 1502.") ==
        std::vector<std::string>{"Christ", "'", "s", "son", ",", "(", "sic", ")", "1502", "."});
}

TEST_CASE("tag_entities") {
  const GazetteerTagger empty;
  const auto spans = tag_entities("who died of plague in 1502", empty);
  REQUIRE(spans.size() == 1);
  CHECK(spans[0] == EntitySpan{5, 6, EntityType::date});
  CHECK(tag_entities("the saint looks to the left", empty).empty());

  const GazetteerTagger g = art_gazetteer();
  const auto v = tag_entities("An account of Vasari says", g);
  REQUIRE(v.size() == 1);
  CHECK(v[0] == EntitySpan{3, 4, EntityType::person});

  // Longest match wins; patterns for ordinals, numbers and centuries.
  const auto toks = tokenize("Luca Signorelli painted two panels in the 15th century, his third work at Orvieto");
  const auto s = g.tag(toks);
  REQUIRE(s.size() == 5);
  CHECK(s[0] == EntitySpan{0, 2, EntityType::person});
  CHECK(s[1].type == EntityType::number);
  CHECK(s[2] == EntitySpan{7, 9, EntityType::date});
  CHECK(s[3].type == EntityType::ordinal);
  CHECK(s[4].type == EntityType::location);
  for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i - 1].end <= s[i].begin);

  std::istringstream bad("Vasari person\n");
  GazetteerTagger g2;
  CHECK_THROWS_AS(g2.load(bad), FormatError);
}

TEST_CASE("mask_sentence on the Vasari example") {
  const GazetteerTagger g = art_gazetteer();
  const auto spans = tag_entities(kVasari, g);
  const MaskResult m = mask_sentence(kVasari, spans);
  CHECK(m.masked.render() ==
        "an account of [person] says that [person] wanted to represent in the figure of the naked [person] his own "
        "son , who died of plague in [date] .");
  CHECK(m.values == std::vector<std::string>{"Vasari", "Signorelli", "Christ", "1502"});
  CHECK(unmask(m.masked, m.values) == masked_view(tokenize(kVasari), spans));
  m.masked.validate();

  const MaskResult plain = mask_sentence("The Sky.", {});
  CHECK(plain.masked.render() == "the sky .");
  CHECK(plain.values.empty());

  CHECK_THROWS_AS(mask_sentence("a b c d", {{0, 2, EntityType::misc}, {1, 3, EntityType::date}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(mask_sentence("a b", {{1, 3, EntityType::misc}}), std::invalid_argument);
  CHECK_THROWS_AS(unmask(m.masked, {"x"}), std::invalid_argument);
}

TEST_CASE("mask/unmask round trip on generated pairs") {
  artdesc::nc::Rng rng(77);
  const std::vector<std::string> words{"The", "saint", "Mary", "of", "Rome", "1502", ",", "panel", "Van", "Eyck"};
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::string> toks;
    const auto n = 1 + rng.below(15);
    for (std::uint64_t i = 0; i < n; ++i) toks.push_back(words[rng.below(words.size())]);
    std::vector<EntitySpan> spans;
    for (std::size_t i = 0; i < toks.size();) {
      if (rng.uniform() < 0.3) {
        const std::size_t len = 1 + rng.below(std::min<std::size_t>(3, toks.size() - i));
        spans.push_back({i, i + len, kAllEntityTypes[rng.below(kEntityTypeCount)]});
        i += len;
      } else {
        ++i;
      }
    }
    const MaskResult m = mask_tokens(toks, spans);
    CHECK(m.masked.slot_count() == m.values.size());
    CHECK(unmask(m.masked, m.values) == masked_view(toks, spans));
  }
}

TEST_CASE("vocab") {
  MaskedSentence s{{Token::make_word("a"), Token::make_word("a"), Token::make_word("b")}, TopicLabel::form};
  const Vocab v = build_vocab({s}, 2);
  CHECK(v.contains("a"));
  CHECK_FALSE(v.contains("b"));
  CHECK(v.index("b") == Vocab::kUnknown);
  for (EntityType t : kAllEntityTypes) CHECK(v.index(slot_text(t)) == Vocab::slot_index(t));
  CHECK(v.token(Vocab::kEnd) == "<end>");
  CHECK_THROWS_AS(build_vocab({}, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_vocab({s}, 0), std::invalid_argument);

  // Independent counting pass against word_counts; ordering contract.
  artdesc::nc::Rng rng(8);
  std::vector<MaskedSentence> corpus;
  std::unordered_map<std::string, std::size_t> oracle;
  for (int i = 0; i < 60; ++i) {
    MaskedSentence m;
    for (int k = 0; k < 6; ++k) {
      if (rng.uniform() < 0.2) {
        m.tokens.push_back(Token::make_slot(EntityType::date));
      } else {
        std::string w(1, static_cast<char>('a' + rng.below(12)));
        ++oracle[w];
        m.tokens.push_back(Token::make_word(w));
      }
    }
    corpus.push_back(m);
  }
  const auto counts = word_counts(corpus);
  CHECK(counts.size() == oracle.size());
  for (const auto& [w, n] : oracle) CHECK(counts.at(w) == n);
  const Vocab big = build_vocab(corpus, 1);
  for (int i = Vocab::kFirstWord + 1; i < big.size(); ++i) {
    const auto& a = big.token(i - 1);
    const auto& b = big.token(i);
    CHECK((counts.at(a) > counts.at(b) || (counts.at(a) == counts.at(b) && a < b)));
  }
  std::stringstream buf;
  big.write(buf);
  const Vocab back = Vocab::read(buf);
  CHECK(back == big);
  CHECK(back.digest() == big.digest());
  std::stringstream again;
  back.write(again);
  std::stringstream orig;
  big.write(orig);
  CHECK(again.str() == orig.str());
}

TEST_CASE("features and mean_pool") {
  FeatureGrid ones{artdesc::nc::Matrix::Ones(5, 3)};
  CHECK(mean_pool(ones) == artdesc::nc::Vector::Ones(3));

  artdesc::nc::Rng rng(6);
  FeatureGrid g{artdesc::nc::Matrix(4, 8)};
  for (Eigen::Index i = 0; i < g.values.size(); ++i) g.values.data()[i] = rng.uniform(-2, 2);
  const auto pooled = mean_pool(g);
  for (int j = 0; j < 8; ++j) {
    double s = 0;
    for (int i = 0; i < 4; ++i) s += g.values(i, j);
    CHECK(std::abs(pooled(j) - s / 4) < 1e-15);
  }

  FeatureGrid paper{artdesc::nc::Matrix::Constant(196, 2048, 0.25)};
  std::stringstream buf;
  write_features(buf, paper);
  const FeatureGrid back = read_features(buf);
  CHECK(back.locations() == 196);
  CHECK(back.dim() == 2048);
  CHECK(back.values == paper.values);

  std::stringstream small;
  write_features(small, g);
  std::string bytes = small.str();
  std::stringstream trunc(bytes.substr(0, bytes.size() - 2));
  try {
    read_features(trunc);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.offset() == 12 + 31 * 4);
  }
  std::stringstream badmagic("XXXX" + bytes.substr(4));
  CHECK_THROWS_AS(read_features(badmagic), FormatError);
  std::stringstream longer(bytes + "abcd");
  CHECK_THROWS_AS(read_features(longer), FormatError);
}

TEST_CASE("corpus records") {
  const GazetteerTagger g = art_gazetteer();
  LoadOptions opts;
  opts.tagger = &g;
  std::istringstream in(
      R"({"id":"p1","sentences":[{"text":"An account of Vasari says so.","topic":"context"},)"
      R"({"text":"Christ stands in 1502.","topic":"content","entities":[{"value":"Christ","type":"person"},{"value":"1502","type":"date"}]},)"
      R"({"text":"Catalogue numbers: F 526","topic":null,"entities":[]}],)"
      R"("attributes":{"artist":"Signorelli","school":"Italian"},"objects":["man"]})"
      "\n");
  const auto recs = read_corpus(in, opts);
  REQUIRE(recs.size() == 1);
  const PaintingRecord& r = recs[0];
  CHECK(r.attributes.size() == 4);
  CHECK(r.attributes.at("type").empty());
  CHECK(r.sentences[0].masked.render() == "an account of [person] says so .");
  CHECK(r.sentences[1].masked.topic == TopicLabel::content);
  CHECK_FALSE(r.sentences[2].has_topic);
  CHECK(r.slot_total() == r.value_total());
  CHECK(topical_sentences(recs).size() == 2);

  std::stringstream out;
  write_corpus(out, recs);
  const auto again = read_corpus(out);
  REQUIRE(again.size() == 1);
  for (std::size_t i = 0; i < r.sentences.size(); ++i) {
    CHECK(again[0].sentences[i].masked == r.sentences[i].masked);
    CHECK(again[0].sentences[i].values == r.sentences[i].values);
  }

  std::istringstream bad_attr(R"({"id":"x","attributes":{"colour":"red"}})");
  CHECK_THROWS_AS(read_corpus(bad_attr), DataError);
  std::istringstream bad_ent(R"({"id":"x","sentences":[{"text":"a b","entities":[{"value":"zz","type":"person"}]}]})");
  CHECK_THROWS_AS(read_corpus(bad_ent), DataError);

  LoadOptions strict;
  strict.min_sentence_tokens = 4;
  std::istringstream short_line(R"({"id":"x","sentences":[{"text":"F 526","topic":"form"},{"text":"a long enough line","topic":"form"}]})");
  CHECK(read_corpus(short_line, strict)[0].sentences.size() == 1);
}

TEST_CASE("raw description records and schema errors") {
  corpus::GazetteerTagger tagger;
  tagger.add("Vermeer", corpus::EntityType::person);
  corpus::LoadOptions opts;
  opts.tagger = &tagger;
  const auto rec = corpus::parse_record(
      R"({"id":"r1","description":"Vermeer painted it in 1660. A quiet room.","topics":["context","form"]})", opts);
  REQUIRE(rec.sentences.size() == 2);
  CHECK(rec.sentences[0].masked.render() == "[person] painted it in [date] .");
  CHECK(rec.sentences[1].masked.topic == corpus::TopicLabel::form);
  CHECK(rec.reference == "Vermeer painted it in 1660. A quiet room.");
  CHECK_THROWS_AS(corpus::parse_record(R"({"id":"r","description":"One. Two.","topics":["form"]})", opts),
                  DataError);
  CHECK_THROWS_AS(corpus::parse_record(R"({"id":"r","objects":[1,2]})"), DataError);
  CHECK_THROWS_AS(corpus::parse_record(R"({"id":"r","attributes":{"artist":3}})"), DataError);
}
