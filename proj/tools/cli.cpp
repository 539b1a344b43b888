#include "cli.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "verity/corpus.hpp"
#include "verity/dataset.hpp"
#include "verity/embedding.hpp"
#include "verity/judge.hpp"
#include "verity/llm.hpp"
#include "verity/mixing.hpp"
#include "verity/pipeline.hpp"
#include "verity/report.hpp"
#include "verity/retrieval.hpp"

namespace verity::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Invalid or missing input detected before any work starts.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutputFormat { Text, Json, Tsv };

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::string llm_mode = "replay";
  std::string llm_cache;
  std::string format = "text";
  std::size_t llm_max_in_flight = 4;
  int verbosity = 0;
};

struct IngestOptions {
  std::string corpus;
  std::string out;
};

struct IndexOptions {
  std::string snapshot;
  std::string out;
  double k1 = Bm25Params{}.k1;
  double b = Bm25Params{}.b;
  std::size_t per_entity = SelectionParams{}.per_entity;
};

// Options shared by verify and evaluate.
struct PipelineOptions {
  std::string snapshot;
  std::string index;
  std::string model;
  std::string encoder_url;
  std::optional<std::size_t> per_entity;
  std::size_t summary_paragraphs = SelectionParams{}.summary_paragraphs;
  std::size_t global_k = RunConfig{}.global_k;
  bool no_ae = false;
  bool no_er = false;
  bool no_ers = false;
  bool no_llm = false;
  bool no_slm = false;
};

struct VerifyOptions {
  std::string claim;
  std::string setting = "open";
};

struct EvaluateOptions {
  std::string dataset;
  std::string dataset_format = "hover";
  std::string setting = "open";
  std::size_t concurrency = 1;
  std::string out;
  std::string emit_training;
};

struct TrainOptions {
  std::string data;
  std::string gold_data;
  std::string mix;
  std::string provider = "hashing";
  std::size_t dimension = HashingProvider::kDefaultDimension;
  std::string encoder_url;
  std::size_t hidden = JudgeModel::kDefaultHidden;
  std::size_t epochs = TrainConfig{}.epochs;
  std::size_t batch_size = TrainConfig{}.batch_size;
  double learning_rate = TrainConfig{}.learning_rate;
  std::string out;
};

OutputFormat output_format(const GlobalOptions& g) {
  if (g.format == "json") return OutputFormat::Json;
  if (g.format == "tsv") return OutputFormat::Tsv;
  return OutputFormat::Text;
}

std::string fixed6(double x) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(6) << x;
  return s.str();
}

void require_file(const std::string& path, const std::string& flag) {
  if (path.empty()) throw UsageError(flag + " is required");
  if (!fs::is_regular_file(path)) throw UsageError(flag + ": no such file: " + path);
}

void require_value(const std::string& value, const std::string& flag) {
  if (value.empty()) throw UsageError(flag + " is required");
}

// Loggers write to stderr so stdout carries results only.
void configure_logging(int verbosity) {
  static const auto logger = [] {
    auto l = spdlog::stderr_color_mt("verity");
    spdlog::set_default_logger(l);
    return l;
  }();
  const auto level = verbosity >= 2   ? spdlog::level::debug
                     : verbosity == 1 ? spdlog::level::info
                                      : spdlog::level::warn;
  logger->set_level(level);
}

std::shared_ptr<LanguageModel> make_llm(const GlobalOptions& g) {
  const auto mode = parse_llm_mode(g.llm_mode);
  if (!mode) throw UsageError("--llm-mode: expected live, replay or record, got '" + g.llm_mode + "'");
  std::shared_ptr<ReplayCache> cache;
  if (*mode != LlmMode::Live) {
    if (*mode == LlmMode::Replay) {
      require_file(g.llm_cache, "--llm-cache");
    } else {
      require_value(g.llm_cache, "--llm-cache");
    }
    cache = std::make_shared<ReplayCache>(g.llm_cache);
  } else if (!g.llm_cache.empty()) {
    spdlog::info("cli: live mode ignores --llm-cache");
  }
  std::shared_ptr<ChatBackend> backend;
  if (*mode != LlmMode::Replay) {
    auto config = HttpChatBackend::config_from_env();
    if (config.url.empty()) throw UsageError("VERITY_LLM_URL must be set for --llm-mode " + g.llm_mode);
    backend = std::make_shared<HttpChatBackend>(std::move(config));
  }
  return std::make_shared<LlmClient>(*mode, std::move(cache), std::move(backend), RetryPolicy{},
                                     static_cast<std::ptrdiff_t>(g.llm_max_in_flight));
}

std::unique_ptr<EmbeddingProvider> make_provider(const std::string& kind, std::size_t dimension,
                                                 const std::string& encoder_url) {
  if (kind == "hashing") return std::make_unique<HashingProvider>(dimension);
  if (kind == "http") {
    require_value(encoder_url, "--encoder-url");
    return std::make_unique<HttpEmbeddingProvider>(HttpEmbeddingProvider::Config{encoder_url});
  }
  throw UsageError("--provider: expected hashing or http, got '" + kind + "'");
}

// Loaded artifacts that back a PipelineDeps.
struct Runtime {
  CorpusStore store;
  std::optional<Bm25Index> index;
  std::shared_ptr<LanguageModel> llm;
  std::optional<JudgeCheckpoint> judge;
  std::unique_ptr<EmbeddingProvider> provider;
  RunConfig config;

  PipelineDeps deps() {
    PipelineDeps d;
    d.store = &store;
    d.index = index ? &*index : nullptr;
    d.llm = llm.get();
    d.judge = judge ? &judge->model : nullptr;
    d.provider = provider.get();
    return d;
  }
};

Setting parse_setting_flag(const std::string& text) {
  const auto s = parse_setting(text);
  if (!s) throw UsageError("--setting: expected gold or open, got '" + text + "'");
  return *s;
}

// Validates flags and files, then loads everything the configuration needs.
std::unique_ptr<Runtime> load_runtime(const GlobalOptions& g, const PipelineOptions& p, Setting setting,
                                      std::size_t concurrency) {
  auto rt = std::make_unique<Runtime>();
  RunConfig& config = rt->config;
  config.setting = setting;
  config.seed = g.seed;
  config.concurrency = concurrency;
  config.global_k = p.global_k;
  config.flags.ambiguity_elimination = !p.no_ae;
  config.flags.entity_retrieval = !p.no_er;
  config.flags.evidence_selection = !p.no_ers;
  config.flags.llm_reasoning = !p.no_llm;
  config.flags.slm_judge = !p.no_slm;
  config.selection.summary_paragraphs = p.no_ers ? 0 : p.summary_paragraphs;
  if (p.no_llm && p.no_slm) throw UsageError("--no-llm and --no-slm cannot be combined");

  const bool open = setting == Setting::Open;
  const bool needs_llm = !p.no_llm || (open && (!p.no_er || !p.no_ae));
  require_file(p.snapshot, "--snapshot");
  if (open) require_file(p.index, "--index");
  if (!p.no_slm) require_file(p.model, "--model");
  if (needs_llm && parse_llm_mode(g.llm_mode) == LlmMode::Replay) require_file(g.llm_cache, "--llm-cache");

  rt->store = CorpusStore::load_snapshot(p.snapshot);
  if (!p.index.empty()) {
    require_file(p.index, "--index");
    rt->index = Bm25Index::load(p.index);
  }
  config.selection.per_entity = p.per_entity.value_or(rt->index ? rt->index->default_per_entity()
                                                                 : SelectionParams{}.per_entity);
  if (config.selection.per_entity < config.selection.summary_paragraphs) {
    throw UsageError("--per-entity must be at least --summary-paragraphs");
  }
  if (needs_llm) rt->llm = make_llm(g);
  if (!p.no_slm) {
    rt->judge = load_checkpoint(p.model);
    rt->provider = make_provider(rt->judge->provider_kind, rt->judge->provider_dimension, p.encoder_url);
    if (rt->provider->dimension() != rt->judge->model.input_dim()) {
      throw UsageError("--model expects " + std::to_string(rt->judge->model.input_dim()) +
                       "-dimensional embeddings but the encoder reports " +
                       std::to_string(rt->provider->dimension()));
    }
  }
  check_dependencies(config, rt->deps());
  return rt;
}

void add_pipeline_options(CLI::App& cmd, PipelineOptions& p) {
  cmd.add_option("--snapshot", p.snapshot, "Corpus snapshot");
  cmd.add_option("--index", p.index, "BM25 index");
  cmd.add_option("--model", p.model, "Judge checkpoint");
  cmd.add_option("--encoder-url", p.encoder_url, "Encoder service base URL (http checkpoints)");
  cmd.add_option("--per-entity", p.per_entity, "Paragraphs per entity (default: stored in the index)");
  cmd.add_option("--summary-paragraphs", p.summary_paragraphs, "Leading paragraphs always kept per entity")
      ->capture_default_str();
  cmd.add_option("--global-k", p.global_k, "Paragraphs retrieved corpus-wide when --no-er is set")
      ->capture_default_str();
  cmd.add_flag("--no-ae", p.no_ae, "Disable ambiguity elimination");
  cmd.add_flag("--no-er", p.no_er, "Disable per-entity retrieval");
  cmd.add_flag("--no-ers", p.no_ers, "Disable summary-paragraph selection");
  cmd.add_flag("--no-llm", p.no_llm, "Disable LLM reasoning");
  cmd.add_flag("--no-slm", p.no_slm, "Disable the judge");
}

int cmd_ingest(const GlobalOptions& g, const IngestOptions& o, std::ostream& out) {
  require_file(o.corpus, "--corpus");
  require_value(o.out, "--out");
  const auto store = CorpusStore::ingest_file(o.corpus);
  store.save_snapshot(o.out);
  const auto& s = store.stats();
  switch (output_format(g)) {
    case OutputFormat::Json:
      out << json{{"pages", s.pages},
                  {"paragraphs", s.paragraphs},
                  {"malformed", s.malformed},
                  {"duplicate_titles", s.duplicate_titles},
                  {"dropped_paragraphs", s.dropped_paragraphs}}
                 .dump()
          << '\n';
      break;
    case OutputFormat::Tsv:
      out << "pages\tparagraphs\tmalformed\tduplicate_titles\tdropped_paragraphs\n"
          << s.pages << '\t' << s.paragraphs << '\t' << s.malformed << '\t' << s.duplicate_titles << '\t'
          << s.dropped_paragraphs << '\n';
      break;
    case OutputFormat::Text:
      out << "pages: " << s.pages << "\nparagraphs: " << s.paragraphs << "\nmalformed: " << s.malformed
          << "\nduplicate_titles: " << s.duplicate_titles << "\ndropped_paragraphs: " << s.dropped_paragraphs
          << '\n';
      break;
  }
  return kExitOk;
}

int cmd_index(const GlobalOptions& g, const IndexOptions& o, std::ostream& out) {
  require_file(o.snapshot, "--snapshot");
  require_value(o.out, "--out");
  if (!(o.k1 >= 0.0)) throw UsageError("--k1 must be non-negative");
  if (!(o.b >= 0.0 && o.b <= 1.0)) throw UsageError("--b must lie in [0, 1]");
  if (o.per_entity == 0) throw UsageError("--per-entity must be positive");
  const auto store = CorpusStore::load_snapshot(o.snapshot);
  auto index = Bm25Index::build(store, Bm25Params{o.k1, o.b});
  index.set_default_per_entity(o.per_entity);
  index.save(o.out);
  switch (output_format(g)) {
    case OutputFormat::Json:
      out << json{{"paragraphs", index.size()},
                  {"vocabulary", index.vocabulary_size()},
                  {"average_length", index.average_length()}}
                 .dump()
          << '\n';
      break;
    case OutputFormat::Tsv:
      out << "paragraphs\tvocabulary\taverage_length\n"
          << index.size() << '\t' << index.vocabulary_size() << '\t' << fixed6(index.average_length()) << '\n';
      break;
    case OutputFormat::Text:
      out << "paragraphs: " << index.size() << "\nvocabulary: " << index.vocabulary_size()
          << "\naverage_length: " << fixed6(index.average_length()) << '\n';
      break;
  }
  return kExitOk;
}

int cmd_verify(const GlobalOptions& g, const PipelineOptions& p, const VerifyOptions& v, std::ostream& out) {
  if (v.claim.empty()) throw UsageError("a claim text is required");
  const Setting setting = parse_setting_flag(v.setting);
  if (setting == Setting::Gold) throw UsageError("--setting gold needs labeled evidence; use evaluate");
  auto rt = load_runtime(g, p, setting, 1);
  const Claim claim{"cli", v.claim};
  const ClaimRecord record = verify_claim(claim, {}, rt->config, rt->deps());
  const Verdict& verdict = record.verdict;
  const double p_true = verdict.p_ver[kTrueLabel];
  const double p_false = verdict.p_ver[kFalseLabel];

  switch (output_format(g)) {
    case OutputFormat::Json: {
      json sources = json::array();
      for (const auto& s : verdict.sources) sources.push_back({{"title", s.title}, {"url", s.url}});
      json evidence = json::array();
      for (const auto& r : record.evidence) evidence.push_back({{"title", r.page_title}, {"paragraph", r.paragraph_index}});
      out << json{{"claim", claim.text},
                  {"label", to_string(verdict.label)},
                  {"p_ver", {{"true", p_true}, {"false", p_false}}},
                  {"explanation", verdict.explanation},
                  {"entities", record.entities},
                  {"evidence", evidence},
                  {"sources", sources}}
                 .dump()
          << '\n';
      break;
    }
    case OutputFormat::Tsv:
      out << "label\tp_true\tp_false\texplanation\tsources\n"
          << to_string(verdict.label) << '\t' << fixed6(p_true) << '\t' << fixed6(p_false) << '\t';
      {
        json e = verdict.explanation;  // escapes tabs and newlines
        out << e.dump() << '\t';
        for (std::size_t i = 0; i < verdict.sources.size(); ++i) {
          out << (i ? " " : "") << verdict.sources[i].url;
        }
      }
      out << '\n';
      break;
    case OutputFormat::Text:
      out << "claim: " << claim.text << '\n'
          << "label: " << to_string(verdict.label) << '\n'
          << "p_ver: true=" << fixed6(p_true) << " false=" << fixed6(p_false) << '\n'
          << "explanation:\n"
          << verdict.explanation << '\n'
          << "sources:\n";
      for (const auto& s : verdict.sources) out << "  " << s.title << " <" << s.url << ">\n";
      break;
  }
  return kExitOk;
}

int cmd_evaluate(const GlobalOptions& g, const PipelineOptions& p, const EvaluateOptions& e, std::ostream& out) {
  require_file(e.dataset, "--dataset");
  const auto format = parse_dataset_format(e.dataset_format);
  if (!format) throw UsageError("--dataset-format: expected hover or feverous, got '" + e.dataset_format + "'");
  if (e.concurrency == 0) throw UsageError("--concurrency must be positive");
  const Setting setting = parse_setting_flag(e.setting);
  auto rt = load_runtime(g, p, setting, e.concurrency);
  const auto data = load_dataset(e.dataset, *format);
  const RunReport report = run_pipeline(data.claims, rt->config, rt->deps());

  const OutputFormat fmt = output_format(g);
  if (!e.out.empty()) {
    std::ofstream file(e.out, std::ios::binary);
    if (!file) throw IoError("cannot write " + e.out);
    if (fmt == OutputFormat::Tsv) {
      write_report_tsv(file, report);
    } else {
      write_report_jsonl(file, report);
    }
    if (!file) throw IoError("failed writing " + e.out);
  }
  if (!e.emit_training.empty()) {
    std::ofstream file(e.emit_training, std::ios::binary);
    if (!file) throw IoError("cannot write " + e.emit_training);
    write_judge_examples(file, judge_examples(report));
    if (!file) throw IoError("failed writing " + e.emit_training);
  }

  const RunSummary& s = report.summary;
  switch (fmt) {
    case OutputFormat::Json:
      if (e.out.empty()) {
        write_report_jsonl(out, report);
      } else {
        out << json{{"setting", to_string(report.setting)},
                    {"claims", s.claims},
                    {"failed", s.failed},
                    {"correct", s.correct},
                    {"accuracy", s.accuracy},
                    {"evidence_ratio", s.evidence.evidence_ratio},
                    {"claim_ratio", s.evidence.claim_ratio}}
                       .dump()
            << '\n';
      }
      break;
    case OutputFormat::Tsv:
      if (e.out.empty()) {
        write_report_tsv(out, report);
      } else {
        out << "setting\tclaims\tfailed\tcorrect\taccuracy\tevidence_ratio\tclaim_ratio\n"
            << to_string(report.setting) << '\t' << s.claims << '\t' << s.failed << '\t' << s.correct << '\t'
            << fixed6(s.accuracy) << '\t' << fixed6(s.evidence.evidence_ratio) << '\t'
            << fixed6(s.evidence.claim_ratio) << '\n';
      }
      break;
    case OutputFormat::Text:
      out << "setting: " << to_string(report.setting) << "\nclaims: " << s.claims << "\nfailed: " << s.failed
          << "\ncorrect: " << s.correct << "\naccuracy: " << fixed6(s.accuracy)
          << "\nevidence_ratio: " << fixed6(s.evidence.evidence_ratio)
          << "\nclaim_ratio: " << fixed6(s.evidence.claim_ratio) << '\n';
      break;
  }
  spdlog::info("evaluate: {} claims in {} ms", s.claims, report.elapsed.count());
  return s.failed == 0 ? kExitOk : kExitFailure;
}

std::vector<JudgeExample> read_examples_file(const std::string& path, const std::string& flag) {
  require_file(path, flag);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  return read_judge_examples(in);
}

int cmd_train(const GlobalOptions& g, const TrainOptions& t, std::ostream& out) {
  require_value(t.out, "--out");
  if (t.epochs == 0) throw UsageError("--epochs must be positive");
  if (t.batch_size == 0) throw UsageError("--batch-size must be positive");
  if (!(t.learning_rate > 0.0)) throw UsageError("--learning-rate must be positive");
  if (t.hidden == 0) throw UsageError("--hidden must be positive");
  if (t.provider == "hashing" && t.dimension == 0) throw UsageError("--dimension must be positive");

  std::vector<JudgeExample> data = read_examples_file(t.data, "--data");
  if (!t.gold_data.empty() || !t.mix.empty()) {
    require_value(t.mix, "--mix");
    const auto ratio = parse_mix_ratio(t.mix);
    if (!ratio) throw UsageError("--mix: expected open:gold such as 80:20, got '" + t.mix + "'");
    const auto gold = read_examples_file(t.gold_data, "--gold-data");
    data = mix_training_data(gold, data, *ratio, g.seed);
  }
  if (data.empty()) throw UsageError("--data: no training examples");

  const auto provider = make_provider(t.provider, t.dimension, t.encoder_url);
  auto model = JudgeModel::initialize(provider->dimension(), t.hidden, g.seed);
  const TrainConfig config{t.epochs, t.batch_size, t.learning_rate, g.seed};
  const TrainResult result = train(model, data, *provider, config);
  model.save(t.out, *provider);

  const double final_loss = result.epoch_loss.empty() ? 0.0 : result.epoch_loss.back();
  switch (output_format(g)) {
    case OutputFormat::Json:
      out << json{{"examples", data.size()}, {"epoch_loss", result.epoch_loss}, {"final_loss", final_loss}}.dump()
          << '\n';
      break;
    case OutputFormat::Tsv:
      out << "epoch\tloss\n";
      for (std::size_t i = 0; i < result.epoch_loss.size(); ++i) {
        out << i + 1 << '\t' << fixed6(result.epoch_loss[i]) << '\n';
      }
      break;
    case OutputFormat::Text:
      out << "examples: " << data.size() << "\nepochs: " << result.epoch_loss.size()
          << "\nfinal_loss: " << fixed6(final_loss) << '\n';
      break;
  }
  return kExitOk;
}

// Global options plus those of the subcommand that ran.
void print_resolved_config(const CLI::App& app, std::ostream& err) {
  std::string active;
  for (const auto* sub : app.get_subcommands()) active = sub->get_name() + ".";
  std::istringstream all(app.config_to_str(true, false));
  err << "# resolved configuration\n";
  for (std::string line; std::getline(all, line);) {
    const auto eq = line.find('=');
    const auto key = line.substr(0, eq);
    if (key.find('.') == std::string::npos || key.rfind(active, 0) == 0) err << line << '\n';
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Claim verification over a Wikipedia-style corpus", "verity"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML or INI file supplying option defaults");

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("--llm-mode", g.llm_mode, "live, replay or record")
      ->check(CLI::IsMember({"live", "replay", "record"}))
      ->capture_default_str();
  app.add_option("--llm-cache", g.llm_cache, "Replay cache (JSON Lines)");
  app.add_option("--llm-max-in-flight", g.llm_max_in_flight, "Concurrent LLM requests")->capture_default_str();
  app.add_option("--format", g.format, "text, json or tsv")
      ->check(CLI::IsMember({"text", "json", "tsv"}))
      ->capture_default_str();
  app.add_flag("-v,--verbose", g.verbosity, "More logging (repeatable)");

  IngestOptions ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Build a corpus snapshot from a page dump");
  ingest_cmd->add_option("--corpus", ingest.corpus, "Page records, one JSON object per line");
  ingest_cmd->add_option("--out", ingest.out, "Snapshot to write");

  IndexOptions index;
  auto* index_cmd = app.add_subcommand("index", "Build a BM25 index over a snapshot");
  index_cmd->add_option("--snapshot", index.snapshot, "Corpus snapshot");
  index_cmd->add_option("--out", index.out, "Index to write");
  index_cmd->add_option("--k1", index.k1, "BM25 term-frequency saturation")->capture_default_str();
  index_cmd->add_option("--b", index.b, "BM25 length normalization")->capture_default_str();
  index_cmd->add_option("--per-entity", index.per_entity, "Paragraphs kept per entity")->capture_default_str();

  PipelineOptions verify_pipeline;
  VerifyOptions verify;
  auto* verify_cmd = app.add_subcommand("verify", "Verify one claim");
  verify_cmd->add_option("claim", verify.claim, "Claim text");
  verify_cmd->add_option("--setting", verify.setting, "Evidence setting")->capture_default_str();
  add_pipeline_options(*verify_cmd, verify_pipeline);

  TrainOptions train;
  auto* train_cmd = app.add_subcommand("train-judge", "Train the judge head");
  train_cmd->add_option("--data", train.data, "Training examples (JSON Lines)");
  train_cmd->add_option("--gold-data", train.gold_data, "Gold-setting examples to mix in");
  train_cmd->add_option("--mix", train.mix, "open:gold example ratio, e.g. 80:20");
  train_cmd->add_option("--provider", train.provider, "hashing or http")
      ->check(CLI::IsMember({"hashing", "http"}))
      ->capture_default_str();
  train_cmd->add_option("--dimension", train.dimension, "Hashing provider dimension")->capture_default_str();
  train_cmd->add_option("--encoder-url", train.encoder_url, "Encoder service base URL");
  train_cmd->add_option("--hidden", train.hidden, "Hidden units")->capture_default_str();
  train_cmd->add_option("--epochs", train.epochs, "Training epochs")->capture_default_str();
  train_cmd->add_option("--batch-size", train.batch_size, "Mini-batch size")->capture_default_str();
  train_cmd->add_option("--learning-rate", train.learning_rate, "SGD step size")->capture_default_str();
  train_cmd->add_option("--out", train.out, "Checkpoint to write");

  PipelineOptions eval_pipeline;
  EvaluateOptions evaluate;
  auto* eval_cmd = app.add_subcommand("evaluate", "Run the pipeline over a labeled dataset");
  eval_cmd->add_option("--dataset", evaluate.dataset, "Dataset file");
  eval_cmd->add_option("--dataset-format", evaluate.dataset_format, "hover or feverous")
      ->check(CLI::IsMember({"hover", "feverous"}))
      ->capture_default_str();
  eval_cmd->add_option("--setting", evaluate.setting, "gold or open")
      ->check(CLI::IsMember({"gold", "open"}))
      ->capture_default_str();
  eval_cmd->add_option("--concurrency", evaluate.concurrency, "Claims in flight")->capture_default_str();
  eval_cmd->add_option("--out", evaluate.out, "Per-claim report to write");
  eval_cmd->add_option("--emit-training", evaluate.emit_training, "Write judge training examples here");
  add_pipeline_options(*eval_cmd, eval_pipeline);

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  configure_logging(g.verbosity);
  print_resolved_config(app, err);

  try {
    if (ingest_cmd->parsed()) return cmd_ingest(g, ingest, out);
    if (index_cmd->parsed()) return cmd_index(g, index, out);
    if (verify_cmd->parsed()) return cmd_verify(g, verify_pipeline, verify, out);
    if (train_cmd->parsed()) return cmd_train(g, train, out);
    if (eval_cmd->parsed()) return cmd_evaluate(g, eval_pipeline, evaluate, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace verity::cli
