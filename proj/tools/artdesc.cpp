// Command-line front end for the description pipeline.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 bad input data or
// file contents, 3 missing artifact.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "artdesc/corpus/features.hpp"
#include "artdesc/errors.hpp"
#include "artdesc/filler/candidates.hpp"
#include "artdesc/numcore/checkpoint.hpp"
#include "artdesc/pipeline/pipeline.hpp"
#include "artdesc/retriever/articles.hpp"

namespace {

namespace fs = std::filesystem;
namespace ap = artdesc::pipeline;
using nlohmann::json;

enum Exit { kOk = 0, kUsage = 1, kData = 2, kMissing = 3 };

struct Overrides {
  std::string config;
  std::string variant;
  std::string topic;
  std::optional<int> beam_size;
  std::optional<int> max_len;
  std::optional<std::uint64_t> seed;
};

ap::PipelineConfig resolve_config(const Overrides& o) {
  if (o.config.empty()) throw artdesc::ConfigError("--config is required for this command");
  ap::PipelineConfig cfg = ap::load_config(o.config);
  if (!o.variant.empty()) {
    const auto v = artdesc::decoder::parse_variant(o.variant);
    if (!v) throw artdesc::ConfigError("unknown variant '" + o.variant + "'");
    cfg.decoder.variant = *v;
  }
  if (o.beam_size) {
    if (*o.beam_size < 1) throw artdesc::ConfigError("--beam-size must be >= 1");
    cfg.beam_size = *o.beam_size;
  }
  if (o.max_len) {
    if (*o.max_len < 2) throw artdesc::ConfigError("--max-len must be >= 2");
    cfg.decoder.max_len = *o.max_len;
  }
  if (o.seed) cfg.seed = *o.seed;
  return cfg;
}

std::optional<artdesc::corpus::TopicLabel> topic_of(const Overrides& o) {
  if (o.topic.empty()) return std::nullopt;
  const auto t = artdesc::corpus::parse_topic(o.topic);
  if (!t) throw artdesc::ConfigError("unknown topic '" + o.topic + "' (content, form or context)");
  return t;
}

std::string read_file(const fs::path& path, const std::string& stage, const std::string& what) {
  ap::require_path(path, stage, what);
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json recall_json(const artdesc::retriever::RecallReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json rec = json::object();
    for (const auto& [k, v] : row.recall) rec["R@" + std::to_string(k)] = v;
    rows.push_back({{"group", row.group}, {"paintings", row.paintings}, {"recall", rec}});
  }
  return {{"ks", r.ks}, {"rows", rows}, {"unannotated", r.unannotated}, {"no_positive", r.no_positive}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topic-aware painting descriptions: training, retrieval, generation and evaluation."};
  app.require_subcommand(1);
  app.fallthrough();

  Overrides ov;
  app.add_option("--config", ov.config, "Pipeline configuration (JSON)");
  app.add_option("--variant", ov.variant, "Decoder variant: baseline, parallel or conditional");
  app.add_option("--topic", ov.topic, "Generate only this topic: content, form or context");
  app.add_option("--beam-size", ov.beam_size, "Beam width");
  app.add_option("--max-len", ov.max_len, "Maximum tokens per generated sentence");
  app.add_option("--seed", ov.seed, "Random seed");

  auto* pre = app.add_subcommand("preprocess", "Tag and mask a raw corpus");
  std::string pre_in, pre_out;
  pre->add_option("--input", pre_in, "Raw corpus (JSONL)")->required();
  pre->add_option("--out", pre_out, "Masked corpus to write (JSONL)")->required();

  auto* tdec = app.add_subcommand("train-decoder", "Train the configured decoder variant");
  auto* tfil = app.add_subcommand("train-filler", "Train the slot filler");

  auto* index = app.add_subcommand("index", "Knowledge index");
  index->require_subcommand(1);
  auto* ibuild = index->add_subcommand("build", "Build the TF-IDF index");
  std::string ib_corpus, ib_out;
  ibuild->add_option("--corpus", ib_corpus, "Article directory or JSONL (default: config knowledge)");
  ibuild->add_option("--out", ib_out, "Index file (default: config index)");

  auto* retr = app.add_subcommand("retrieve", "Rank articles for one painting");
  std::string r_meta;
  std::optional<int> r_k;
  retr->add_option("--query-from", r_meta, "Painting metadata JSON")->required();
  retr->add_option("--k", r_k, "Number of articles");

  auto* er = app.add_subcommand("eval-recall", "Retrieval recall against annotations");
  std::string er_ann;
  std::vector<int> er_ks{1, 5, 10};
  er->add_option("--annotations", er_ann, "Annotation JSONL")->required();
  er->add_option("--ks", er_ks, "Cutoffs")->delimiter(',');

  auto* desc = app.add_subcommand("describe", "Generate a description");
  std::string d_painting, d_features, d_meta, d_out;
  bool d_all = false;
  desc->add_option("--painting", d_painting, "Painting id from the configured corpus");
  desc->add_option("--features", d_features, "Feature file (with --meta)");
  desc->add_option("--meta", d_meta, "Painting metadata JSON (with --features)");
  desc->add_flag("--all", d_all, "Describe every painting in the corpus, one JSON line each");
  desc->add_option("--out", d_out, "Write output here instead of stdout");

  auto* ev = app.add_subcommand("evaluate", "Score predictions against references");
  std::string e_pred, e_ref;
  bool e_json = false;
  ev->add_option("--predictions", e_pred, "Predictions JSONL (describe output)")->required();
  ev->add_option("--references", e_ref, "References JSONL (corpus or {id, text})")->required();
  ev->add_flag("--json", e_json, "Print JSON only");

  auto* fill = app.add_subcommand("fill", "Fill slots in masked text");
  std::string f_masked, f_articles, f_attrs, f_ckpt, f_gazetteer;
  fill->add_option("--masked", f_masked, "Masked sentences, one per line")->required();
  fill->add_option("--articles", f_articles, "Article directory or JSONL");
  fill->add_option("--attrs", f_attrs, "Attributes JSON object");
  fill->add_option("--ckpt", f_ckpt, "Filler checkpoint (default: from config)");
  fill->add_option("--gazetteer", f_gazetteer, "Gazetteer (default: from config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  const ap::Logger log(&std::cerr);
  try {
    if (*pre) {
      const auto cfg = ov.config.empty() ? ap::PipelineConfig{} : resolve_config(ov);
      const auto report = ap::preprocess(cfg, pre_in, pre_out, log);
      std::cout << report.to_json().dump(2) << '\n';
    } else if (*tdec) {
      const auto report = ap::train_decoder_stage(resolve_config(ov), log);
      std::cout << json{{"checkpoint", report.checkpoint.string()},
                        {"examples", report.examples},
                        {"vocab", report.vocab_size},
                        {"token_nll", report.final_loss}}
                       .dump()
                << '\n';
    } else if (*tfil) {
      const auto report = ap::train_filler_stage(resolve_config(ov), log);
      std::cout << json{{"checkpoint", report.checkpoint.string()},
                        {"examples", report.examples},
                        {"vocab", report.vocab_size},
                        {"slot_loss", report.final_loss}}
                       .dump()
                << '\n';
    } else if (*ibuild) {
      const auto cfg = resolve_config(ov);
      const fs::path src = ib_corpus.empty() ? cfg.knowledge : fs::path(ib_corpus);
      const fs::path out = ib_out.empty() ? cfg.index_path() : fs::path(ib_out);
      const auto idx = ap::build_index(cfg, src, out, log);
      std::cout << json{{"index", out.string()}, {"documents", idx.size()}, {"terms", idx.term_count()}}.dump()
                << '\n';
    } else if (*retr) {
      const auto cfg = resolve_config(ov);
      const auto meta = ap::load_meta(r_meta);
      ap::require_path(cfg.index_path(), "retrieve", "retrieval index");
      const auto idx = artdesc::retriever::TfIdfIndex::load(cfg.index_path());
      const auto q = artdesc::retriever::build_query(meta.attributes, meta.objects, ap::make_blocklist(cfg));
      const auto ranked = artdesc::retriever::rank(q.text, idx, r_k.value_or(cfg.k));
      for (const auto& w : ranked.warnings) log.warn("retrieve", {{"message", w}});
      json hits = json::array();
      for (const auto& h : ranked.hits) hits.push_back({{"id", h.id}, {"score", h.score}});
      std::cout << json{{"id", meta.id}, {"query", q.text}, {"articles", hits}}.dump(2) << '\n';
    } else if (*er) {
      const auto cfg = resolve_config(ov);
      ap::require_path(er_ann, "eval-recall", "annotations");
      ap::require_path(cfg.index_path(), "eval-recall", "retrieval index");
      const auto records = ap::load_training_corpus(cfg, "eval-recall", false);
      const auto idx = artdesc::retriever::TfIdfIndex::load(cfg.index_path());
      int kmax = 1;
      for (int k : er_ks) kmax = std::max(kmax, k);
      const auto rankings = ap::rank_paintings(records, idx, kmax, ap::make_blocklist(cfg));
      const auto report =
          artdesc::retriever::eval_recall(rankings, artdesc::retriever::load_annotations(er_ann), er_ks);
      if (!report.unannotated.empty())
        log.warn("eval-recall", {{"unannotated_paintings", report.unannotated.size()}});
      std::cout << recall_json(report).dump(2) << '\n';
    } else if (*desc) {
      const auto cfg = resolve_config(ov);
      const auto tagger = ap::make_tagger(cfg);
      auto opts = ap::describe_options(cfg, *tagger);
      opts.topic = topic_of(ov);

      std::vector<ap::DescribeInput> inputs;
      if (!d_features.empty() || !d_meta.empty()) {
        if (d_features.empty() || d_meta.empty())
          throw artdesc::ConfigError("--features and --meta must be given together");
        ap::require_path(d_features, "describe", "feature file");
        inputs.push_back({ap::load_meta(d_meta), artdesc::corpus::load_features(d_features)});
      } else {
        if (d_painting.empty() && !d_all)
          throw artdesc::ConfigError("describe needs --painting ID, --all, or --features with --meta");
        const auto records = ap::load_training_corpus(cfg, "describe", true);
        for (const auto& rec : records) {
          if (!d_all && rec.id != d_painting) continue;
          inputs.push_back({{rec.id, rec.attributes, rec.objects, rec.reference}, *rec.features});
        }
        if (inputs.empty()) throw artdesc::DataError("painting '" + d_painting + "' is not in the corpus");
      }

      const auto models = ap::load_models(cfg, log);
      const json prov = ap::provenance(cfg, models);
      std::ostringstream out;
      for (const auto& in : inputs) {
        const auto d = ap::describe(in, models, opts);
        for (const auto& w : d.warnings) log.warn("describe", {{"id", d.id}, {"message", w}});
        json j = d.to_json();
        j["provenance"] = prov;
        out << j.dump() << '\n';
      }
      if (d_out.empty()) {
        std::cout << out.str();
      } else {
        std::ofstream f(d_out);
        if (!f) throw std::runtime_error("cannot write " + d_out);
        f << out.str();
      }
    } else if (*ev) {
      const auto report = ap::evaluate(ap::load_predictions(e_pred), ap::load_references(e_ref));
      std::cout << report.to_json().dump(2) << '\n';
      if (!e_json) std::cout << report.to_text();
    } else if (*fill) {
      std::optional<ap::PipelineConfig> cfg;
      if (!ov.config.empty()) cfg = resolve_config(ov);
      fs::path ckpt = f_ckpt;
      if (ckpt.empty()) {
        if (!cfg) throw artdesc::ConfigError("fill needs --ckpt or --config");
        ckpt = cfg->filler_checkpoint();
      }
      ap::require_path(ckpt, "fill", "filler checkpoint");
      const auto bundle = artdesc::filler::load_filler(ckpt);

      artdesc::corpus::GazetteerTagger tagger;
      if (!f_gazetteer.empty()) {
        ap::require_path(f_gazetteer, "fill", "gazetteer");
        tagger.load(f_gazetteer);
      } else if (cfg && !cfg->gazetteer.empty()) {
        tagger = *ap::make_tagger(*cfg);
      }

      std::vector<std::string> texts;
      if (!f_articles.empty()) {
        ap::require_path(f_articles, "fill", "articles");
        for (const auto& a : artdesc::retriever::load_articles(f_articles)) texts.push_back(a.body);
      }
      std::map<std::string, std::string> attrs;
      if (!f_attrs.empty()) attrs = ap::parse_meta(json::parse(read_file(f_attrs, "fill", "attributes"))).attributes;
      const auto masked = ap::parse_masked_text(read_file(f_masked, "fill", "masked text"));
      const auto cands = artdesc::filler::extract_candidates(texts, attrs, tagger);
      const auto result = artdesc::filler::fill_slots(bundle.model, bundle.vocab, masked, cands);
      for (const auto& w : result.warnings) log.warn("fill", {{"message", w}});
      json decisions = json::array();
      for (const auto& s : result.decisions) {
        decisions.push_back({{"sentence", s.sentence},
                             {"token", s.token},
                             {"type", std::string(artdesc::corpus::to_string(s.type))},
                             {"value", s.choice ? json(s.choice->surface) : json(nullptr)},
                             {"probability", s.probability}});
      }
      std::cout << json{{"text", result.text}, {"decisions", decisions}, {"warnings", result.warnings}}.dump(2)
                << '\n';
    }
  } catch (const artdesc::MissingArtifactError& e) {
    log.error("missing-artifact", {{"stage", e.stage()}, {"message", e.what()}});
    return kMissing;
  } catch (const artdesc::ConfigError& e) {
    log.error("config", {{"message", e.what()}});
    return kUsage;
  } catch (const artdesc::DataError& e) {
    log.error("data", {{"message", e.what()}});
    return kData;
  } catch (const artdesc::FormatError& e) {
    log.error("format", {{"message", e.what()}});
    return kData;
  } catch (const artdesc::ShapeError& e) {
    log.error("shape", {{"message", e.what()}});
    return kData;
  } catch (const nlohmann::json::exception& e) {
    log.error("data", {{"message", e.what()}});
    return kData;
  } catch (const std::exception& e) {
    log.error("failure", {{"message", e.what()}});
    return kData;
  }
  return kOk;
}
