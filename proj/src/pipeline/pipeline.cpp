#include "artdesc/pipeline/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "artdesc/corpus/text.hpp"
#include "artdesc/decoder/train.hpp"
#include "artdesc/digest.hpp"
#include "artdesc/errors.hpp"
#include "artdesc/filler/candidates.hpp"
#include "artdesc/numcore/checkpoint.hpp"
#include "artdesc/retriever/articles.hpp"

namespace artdesc::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

std::unique_ptr<corpus::GazetteerTagger> make_tagger(const PipelineConfig& cfg) {
  auto tagger = std::make_unique<corpus::GazetteerTagger>();
  if (!cfg.gazetteer.empty()) {
    require_path(cfg.gazetteer, "tagger", "gazetteer");
    tagger->load(cfg.gazetteer);
  }
  return tagger;
}

retriever::Blocklist make_blocklist(const PipelineConfig& cfg) {
  if (cfg.blocklist.empty()) return retriever::default_blocklist();
  require_path(cfg.blocklist, "query", "blocklist");
  return retriever::load_blocklist(cfg.blocklist);
}

nc::Checkpoint stamp(nc::Checkpoint ckpt, const PipelineConfig& cfg) {
  json meta = json::parse(ckpt.metadata);
  meta["config_digest"] = cfg.digest();
  ckpt.metadata = meta.dump();
  return ckpt;
}

std::string recorded_digest(const std::string& metadata) {
  const json meta = json::parse(metadata, nullptr, false);
  if (meta.is_object() && meta.contains("config_digest") && meta["config_digest"].is_string())
    return meta["config_digest"].get<std::string>();
  return {};
}

// ---- preprocess -------------------------------------------------------------

json PreprocessReport::to_json() const {
  return {{"paintings", paintings}, {"sentences", sentences}, {"slots", slots},
          {"untopiced", untopiced}, {"per_topic", per_topic}, {"per_type", per_type}};
}

PreprocessReport summarize(const std::vector<corpus::PaintingRecord>& records) {
  PreprocessReport r;
  r.paintings = records.size();
  for (const auto& rec : records) {
    for (const auto& s : rec.sentences) {
      ++r.sentences;
      if (s.has_topic)
        ++r.per_topic[std::string(corpus::to_string(s.masked.topic))];
      else
        ++r.untopiced;
      for (const auto& tok : s.masked.tokens) {
        if (!tok.is_slot()) continue;
        ++r.slots;
        ++r.per_type[std::string(corpus::to_string(*tok.slot))];
      }
    }
  }
  return r;
}

PreprocessReport preprocess(const PipelineConfig& cfg, const fs::path& raw, const fs::path& out, const Logger& log) {
  require_path(raw, "preprocess", "raw corpus");
  const auto tagger = make_tagger(cfg);
  corpus::LoadOptions opts;
  opts.tagger = tagger.get();
  const auto records = corpus::load_corpus(raw, opts);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  std::ofstream os(out);
  if (!os) throw std::runtime_error("cannot write " + out.string());
  corpus::write_corpus(os, records);
  const auto report = summarize(records);
  log.info("preprocess", {{"input", raw.string()}, {"output", out.string()}, {"report", report.to_json()}});
  return report;
}

// ---- training ---------------------------------------------------------------

std::vector<corpus::PaintingRecord> load_training_corpus(const PipelineConfig& cfg, const std::string& stage,
                                                         bool with_features) {
  require_path(cfg.corpus, stage, "corpus");
  corpus::LoadOptions opts;
  if (with_features) {
    require_path(cfg.features, stage, "feature directory");
    opts.features_dir = cfg.features;
  }
  auto records = corpus::load_corpus(cfg.corpus, opts);
  if (records.empty()) throw DataError("corpus '" + cfg.corpus.string() + "' has no records");
  return records;
}

namespace {

nc::LrSchedule schedule_of(const TrainingConfig& t) { return {t.lr, t.lr_decay, t.lr_every}; }

void save_stamped(const fs::path& path, nc::Checkpoint ckpt, const PipelineConfig& cfg) {
  fs::create_directories(path.parent_path());
  nc::save_checkpoint(path, stamp(std::move(ckpt), cfg));
}

}  // namespace

TrainReport train_decoder_stage(const PipelineConfig& cfg, const Logger& log) {
  const auto records = load_training_corpus(cfg, "train-decoder", true);
  const corpus::Vocab vocab = corpus::build_vocab(corpus::all_sentences(records), cfg.min_freq);

  decoder::DecoderConfig dc = cfg.decoder;
  dc.vocab_size = vocab.size();
  dc.feature_dim = static_cast<int>(records.front().features->dim());
  dc.validate();

  const auto examples = decoder::make_examples(records, vocab, dc.variant);
  if (examples.empty()) throw DataError("no training examples for the " + std::string(to_string(dc.variant)) +
                                        " decoder (are sentences topic-annotated?)");

  nc::Rng rng(cfg.seed);
  decoder::TopicDecoder model(dc, rng);
  decoder::TrainOptions opts;
  opts.epochs = cfg.decoder_training.epochs;
  opts.batch_size = cfg.decoder_training.batch_size;
  opts.schedule = schedule_of(cfg.decoder_training);
  opts.seed = cfg.seed;
  opts.classifier_weight = cfg.decoder_training.classifier_weight;
  opts.on_epoch = [&](const decoder::EpochStats& s) {
    log.info("epoch", {{"stage", "train-decoder"},
                       {"epoch", s.epoch},
                       {"lr", s.lr},
                       {"token_nll", s.token_nll},
                       {"classifier_loss", s.classifier_loss},
                       {"joint_loss", s.joint_loss}});
  };
  log.info("train-decoder", {{"variant", std::string(to_string(dc.variant))},
                             {"examples", examples.size()},
                             {"vocab", vocab.size()},
                             {"config_digest", cfg.digest()}});
  const auto stats = dc.variant == decoder::Variant::conditional ? decoder::train_conditional(model, examples, opts)
                                                                 : decoder::train_decoder(model, examples, opts);

  TrainReport report{cfg.decoder_checkpoint(), examples.size(), vocab.size(), 0.0};
  report.final_loss = stats.empty() ? decoder::evaluate_token_nll(model, examples) : stats.back().token_nll;
  save_stamped(report.checkpoint, decoder::to_checkpoint(model, vocab, cfg.seed), cfg);
  log.info("checkpoint", {{"path", report.checkpoint.string()}});
  return report;
}

TrainReport train_filler_stage(const PipelineConfig& cfg, const Logger& log) {
  const auto records = load_training_corpus(cfg, "train-filler", false);
  const auto examples = filler::make_fill_examples(records, static_cast<std::size_t>(cfg.filler.max_input_len));
  if (examples.empty()) throw DataError("no sentence in the corpus has a slot to fill");
  const corpus::Vocab vocab = filler::build_filler_vocab(examples, cfg.min_freq);

  filler::FillerConfig fc = cfg.filler;
  fc.vocab_size = vocab.size();
  fc.validate();

  nc::Rng rng(cfg.seed);
  filler::SlotFiller model(fc, rng);
  filler::FillTrainOptions opts;
  opts.epochs = cfg.filler_training.epochs;
  opts.batch_size = cfg.filler_training.batch_size;
  opts.schedule = schedule_of(cfg.filler_training);
  opts.seed = cfg.seed;
  opts.on_epoch = [&](const filler::FillEpochStats& s) {
    log.info("epoch", {{"stage", "train-filler"},
                       {"epoch", s.epoch},
                       {"lr", s.lr},
                       {"slot_loss", s.slot_loss},
                       {"scored", s.scored},
                       {"skipped", s.skipped}});
  };
  log.info("train-filler", {{"examples", examples.size()}, {"vocab", vocab.size()}, {"config_digest", cfg.digest()}});
  const auto stats = filler::train_filler(model, vocab, examples, opts);

  TrainReport report{cfg.filler_checkpoint(), examples.size(), vocab.size(), 0.0};
  if (!stats.empty()) report.final_loss = stats.back().slot_loss;
  save_stamped(report.checkpoint, filler::to_checkpoint(model, vocab, cfg.seed), cfg);
  log.info("checkpoint", {{"path", report.checkpoint.string()}});
  return report;
}

// ---- retrieval --------------------------------------------------------------

retriever::TfIdfIndex build_index(const PipelineConfig& cfg, const fs::path& articles, const fs::path& out,
                                  const Logger& log) {
  require_path(articles, "index", "knowledge corpus");
  auto index = retriever::TfIdfIndex::build(retriever::load_articles(articles));
  index.set_metadata(json{{"kind", "index"},
                          {"config_digest", cfg.digest()},
                          {"seed", cfg.seed},
                          {"source", articles.filename().string()}}
                         .dump());
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  index.save(out);
  for (const auto& id : index.dropped()) log.warn("article-dropped", {{"id", id}, {"reason", "empty after normalization"}});
  log.info("index", {{"path", out.string()}, {"documents", index.size()}, {"terms", index.term_count()}});
  return index;
}

PaintingMeta parse_meta(const json& j) {
  if (!j.is_object()) throw DataError("painting metadata must be a JSON object");
  PaintingMeta m;
  if (j.contains("sentences") || j.contains("description")) {
    const auto rec = corpus::parse_record(j.dump());
    return {rec.id, rec.attributes, rec.objects, rec.reference};
  }
  try {
    m.id = j.value("id", std::string());
    m.reference = j.value("reference", std::string());
    for (const char* key : corpus::kAttributeKeys) m.attributes[key] = "";
    if (auto it = j.find("attributes"); it != j.end() && !it->is_null()) {
      for (const auto& [k, v] : it->items()) {
        if (!m.attributes.count(k)) throw DataError("unknown attribute key '" + k + "'");
        m.attributes[k] = v.is_null() ? "" : v.get<std::string>();
      }
    }
    if (auto it = j.find("objects"); it != j.end() && !it->is_null())
      for (const auto& o : *it) m.objects.push_back(o.get<std::string>());
  } catch (const json::exception& e) {
    throw DataError(std::string("painting metadata: ") + e.what());
  }
  return m;
}

PaintingMeta load_meta(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError("metadata", "cannot open '" + path.string() + "'");
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw DataError("metadata file '" + path.string() + "' is not valid JSON");
  return parse_meta(j);
}

retriever::Rankings rank_paintings(const std::vector<corpus::PaintingRecord>& records,
                                   const retriever::TfIdfIndex& index, int k, const retriever::Blocklist& blocklist) {
  retriever::Rankings out;
  for (const auto& rec : records) {
    auto& ids = out[rec.id];
    const auto q = retriever::build_query(rec.attributes, rec.objects, blocklist);
    if (q.empty) continue;
    for (const auto& hit : retriever::rank(q.text, index, k).hits) ids.push_back(hit.id);
  }
  return out;
}

// ---- describe ---------------------------------------------------------------

Models load_models(const PipelineConfig& cfg, const Logger& log) {
  const fs::path dpath = cfg.decoder_checkpoint();
  const fs::path fpath = cfg.filler_checkpoint();
  require_path(dpath, "describe", "decoder checkpoint");
  require_path(fpath, "describe", "filler checkpoint");

  const auto dckpt = nc::load_checkpoint(dpath);
  const auto fckpt = nc::load_checkpoint(fpath);
  Models m{decoder::from_checkpoint(dckpt, cfg.decoder.variant), filler::filler_from_checkpoint(fckpt), {}, {}, {}, {}};
  m.artifacts["decoder"] = {{"path", dpath.filename().string()}, {"config_digest", recorded_digest(dckpt.metadata)}};
  m.artifacts["filler"] = {{"path", fpath.filename().string()}, {"config_digest", recorded_digest(fckpt.metadata)}};

  if (cfg.knowledge_mode == KnowledgeMode::reference_oracle) return m;

  std::vector<retriever::KnowledgeArticle> articles;
  if (!cfg.knowledge.empty() && fs::exists(cfg.knowledge)) articles = retriever::load_articles(cfg.knowledge);
  if (articles.empty()) {
    m.warnings.push_back("knowledge corpus is empty; slots without an attribute candidate get placeholders");
    log.warn("knowledge-empty", {{"path", cfg.knowledge.string()}});
    return m;
  }
  for (auto& a : articles) m.bodies.emplace(a.id, std::move(a.body));

  const fs::path ipath = cfg.index_path();
  require_path(ipath, "describe", "retrieval index");
  m.index = retriever::TfIdfIndex::load(ipath);
  m.artifacts["index"] = {{"path", ipath.filename().string()},
                          {"config_digest", recorded_digest(m.index->metadata())},
                          {"documents", m.index->size()}};
  return m;
}

DescribeOptions describe_options(const PipelineConfig& cfg, const corpus::Tagger& tagger) {
  DescribeOptions o;
  o.beam_size = cfg.beam_size;
  o.max_len = cfg.decoder.max_len;
  o.k = cfg.k;
  o.knowledge_mode = cfg.knowledge_mode;
  o.blocklist = make_blocklist(cfg);
  o.tagger = &tagger;
  return o;
}

json Description::to_json() const {
  json sents = json::array();
  for (std::size_t i = 0; i < masked.size(); ++i) {
    sents.push_back({{"topic", std::string(corpus::to_string(masked[i].topic))},
                     {"masked", masked[i].render()},
                     {"text", i < filled.size() ? corpus::join(filled[i]) : std::string()}});
  }
  json arts = json::array();
  for (const auto& a : articles) arts.push_back({{"id", a.id}, {"score", a.score}});
  return {{"id", id},           {"text", text},       {"sentences", sents},
          {"query", query},     {"articles", arts},   {"slots", slots},
          {"placeholders", placeholders}, {"warnings", warnings}};
}

Description describe(const DescribeInput& input, const Models& models, const DescribeOptions& opts) {
  if (opts.tagger == nullptr) throw std::invalid_argument("describe: a tagger is required");
  Description d;
  d.id = input.meta.id;
  d.warnings = models.warnings;

  const auto& dec = models.decoder;
  decoder::GenerateOptions gen;
  gen.mode = decoder::SearchMode::beam;
  gen.beam_size = opts.beam_size;
  gen.max_len = opts.max_len;

  // 1-2. one sentence per topic, composed in content/form/context order.
  std::vector<corpus::MaskedSentence> generated;
  if (dec.model.config().variant == decoder::Variant::baseline) {
    generated.push_back(
        decoder::generate(dec.model, dec.vocab, input.grid, opts.topic.value_or(corpus::TopicLabel::content), gen));
  } else if (opts.topic) {
    generated.push_back(decoder::generate(dec.model, dec.vocab, input.grid, *opts.topic, gen));
  } else {
    std::map<corpus::TopicLabel, corpus::MaskedSentence> per_topic;
    for (auto t : corpus::kAllTopics) per_topic[t] = decoder::generate(dec.model, dec.vocab, input.grid, t, gen);
    auto composed = decoder::compose_description(per_topic);
    generated = std::move(composed.sentences);
    d.warnings.insert(d.warnings.end(), composed.warnings.begin(), composed.warnings.end());
  }
  for (auto& s : generated) {
    if (s.tokens.empty()) {
      d.warnings.push_back("decoder produced an empty " + std::string(corpus::to_string(s.topic)) + " sentence");
      continue;
    }
    d.masked.push_back(std::move(s));
  }

  // 3-4. knowledge: retrieved articles, or the reference paragraph itself.
  const auto q = retriever::build_query(input.meta.attributes, input.meta.objects, opts.blocklist);
  d.query = q.text;
  std::vector<std::string> texts;
  if (opts.knowledge_mode == KnowledgeMode::reference_oracle) {
    if (input.meta.reference.empty())
      d.warnings.push_back("no reference text for painting '" + d.id + "'");
    else
      texts.push_back(input.meta.reference);
  } else if (models.index) {
    if (q.empty) {
      d.warnings.push_back("query is empty after filtering; no articles retrieved");
    } else {
      auto ranked = retriever::rank(q.text, *models.index, opts.k);
      d.warnings.insert(d.warnings.end(), ranked.warnings.begin(), ranked.warnings.end());
      for (const auto& hit : ranked.hits) {
        auto it = models.bodies.find(hit.id);
        if (it == models.bodies.end()) {
          d.warnings.push_back("article '" + hit.id + "' is in the index but not in the knowledge corpus");
          continue;
        }
        texts.push_back(it->second);
      }
      d.articles = std::move(ranked.hits);
    }
  }

  // 5-6. candidates and slot filling.
  const auto candidates = filler::extract_candidates(texts, input.meta.attributes, *opts.tagger);
  auto fill = filler::fill_slots(models.filler.model, models.filler.vocab, d.masked, candidates);
  d.filled = std::move(fill.sentences);
  d.text = std::move(fill.text);
  d.slots = fill.decisions.size();
  d.placeholders = static_cast<std::size_t>(
      std::count_if(fill.decisions.begin(), fill.decisions.end(), [](const auto& s) { return !s.choice; }));
  d.warnings.insert(d.warnings.end(), fill.warnings.begin(), fill.warnings.end());
  return d;
}

json provenance(const PipelineConfig& cfg, const Models& models) {
  return {{"config_digest", cfg.digest()},
          {"seed", cfg.seed},
          {"variant", std::string(to_string(models.decoder.model.config().variant))},
          {"knowledge_mode", std::string(to_string(cfg.knowledge_mode))},
          {"beam_size", cfg.beam_size},
          {"k", cfg.k},
          {"decoder_vocab_digest", hex_digest(models.decoder.vocab.digest())},
          {"filler_vocab_digest", hex_digest(models.filler.vocab.digest())},
          {"artifacts", models.artifacts}};
}

// ---- evaluation -------------------------------------------------------------

namespace {

template <typename F>
void for_each_json_line(const fs::path& path, const std::string& what, F&& f) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError("evaluate", what + " not found at '" + path.string() + "'");
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw DataError(what + " line " + std::to_string(lineno) + " is not a JSON object");
    try {
      f(j, lineno);
    } catch (const json::exception& e) {
      throw DataError(what + " line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

}  // namespace

std::vector<Prediction> load_predictions(const fs::path& path) {
  std::vector<Prediction> out;
  for_each_json_line(path, "predictions", [&](const json& j, std::size_t lineno) {
    Prediction p;
    p.id = j.at("id").get<std::string>();
    p.text = j.at("text").get<std::string>();
    if (auto it = j.find("sentences"); it != j.end())
      for (const auto& s : *it) p.topics.push_back(s.value("topic", std::string()));
    p.slots = j.value("slots", std::size_t{0});
    p.placeholders = j.value("placeholders", std::size_t{0});
    if (p.placeholders > p.slots)
      throw DataError("predictions line " + std::to_string(lineno) + ": more placeholders than slots");
    out.push_back(std::move(p));
  });
  return out;
}

std::map<std::string, std::string> load_references(const fs::path& path) {
  std::map<std::string, std::string> out;
  for_each_json_line(path, "references", [&](const json& j, std::size_t lineno) {
    std::string id, text;
    if (j.contains("text") && !j.contains("sentences")) {
      id = j.at("id").get<std::string>();
      text = j.at("text").get<std::string>();
    } else {
      const auto rec = corpus::parse_record(j.dump());
      id = rec.id;
      text = rec.reference;
    }
    if (!out.emplace(id, text).second)
      throw DataError("references line " + std::to_string(lineno) + ": duplicate id '" + id + "'");
  });
  return out;
}

json EvaluationReport::to_json() const {
  return {{"paintings", paintings},
          {"bleu4", bleu4},
          {"rouge_l", rouge_l},
          {"placeholder_rate", placeholder_rate},
          {"per_topic", per_topic}};
}

std::string EvaluationReport::to_text() const {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << "paintings        " << paintings << '\n'
     << "BLEU-4           " << bleu4 << '\n'
     << "ROUGE-L          " << rouge_l << '\n'
     << "placeholder rate " << placeholder_rate << '\n';
  if (!per_topic.empty()) os << "sentences\n";
  for (const auto& [topic, n] : per_topic) os << "  " << std::left << std::setw(15) << topic << n << '\n';
  return os.str();
}

EvaluationReport evaluate(const std::vector<Prediction>& predictions,
                          const std::map<std::string, std::string>& references) {
  std::vector<std::string> missing;
  std::set<std::string> seen;
  for (const auto& p : predictions) {
    if (!seen.insert(p.id).second) throw DataError("duplicate prediction for painting '" + p.id + "'");
    if (!references.count(p.id)) missing.push_back(p.id);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& id : missing) list += (list.empty() ? "" : ", ") + id;
    throw DataError("no reference for predicted painting(s): " + list);
  }

  EvaluationReport r;
  r.paintings = predictions.size();
  std::vector<metrics::Tokens> cands;
  std::vector<std::vector<metrics::Tokens>> refs;
  std::size_t slots = 0, placeholders = 0;
  double rouge_sum = 0.0;
  for (const auto& p : predictions) {
    cands.push_back(metrics::metric_tokens(p.text));
    refs.push_back({metrics::metric_tokens(references.at(p.id))});
    rouge_sum += metrics::rouge_l(cands.back(), refs.back().front());
    slots += p.slots;
    placeholders += p.placeholders;
    for (const auto& t : p.topics) ++r.per_topic[t];
  }
  if (!predictions.empty()) {
    r.bleu4 = metrics::corpus_bleu4(cands, refs);
    r.rouge_l = rouge_sum / static_cast<double>(predictions.size());
  }
  r.placeholder_rate = slots == 0 ? 0.0 : static_cast<double>(placeholders) / static_cast<double>(slots);
  return r;
}

// ---- filling without decoding -----------------------------------------------

std::vector<corpus::MaskedSentence> parse_masked_text(const std::string& text) {
  std::vector<corpus::MaskedSentence> out;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    std::istringstream words(line);
    corpus::MaskedSentence s;
    std::string w;
    while (words >> w) {
      if (auto t = corpus::parse_slot_text(w))
        s.tokens.push_back(corpus::Token::make_slot(*t));
      else
        s.tokens.push_back(corpus::Token::make_word(w));
    }
    if (!s.tokens.empty()) out.push_back(std::move(s));
  }
  return out;
}

}  // namespace artdesc::pipeline
