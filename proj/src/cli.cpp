#include "ruqkit/cli.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>

#include <CLI11.hpp>

#include "ruqkit/corpus.hpp"
#include "ruqkit/diversity.hpp"
#include "ruqkit/embed_metrics.hpp"
#include "ruqkit/entropy_filter.hpp"
#include "ruqkit/errors.hpp"
#include "ruqkit/ngram_model.hpp"
#include "ruqkit/overlap_metrics.hpp"
#include "ruqkit/parallel.hpp"
#include "ruqkit/plot.hpp"
#include "ruqkit/report.hpp"
#include "ruqkit/ruq.hpp"
#include "ruqkit/scorer.hpp"
#include "ruqkit/simd/kernels.hpp"

namespace ruqkit::cli {

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct Options {
  std::string pairs, multiref, scores, model, embeddings, out;
  std::vector<std::string> generics;
  std::string setting = "target";
  double threshold = kDefaultEntropyThreshold;
  int order = 3;
  std::size_t min_count = 1;
  std::vector<double> lambdas;
  std::size_t beam = 0;  // 0: no decoding unless the subcommand needs it
  std::size_t max_len = 20;
  std::size_t max_position = kDefaultMaxPosition;
  bool lowercase = true;
  std::size_t jobs = 1;
  std::string split = "train";
  int max_n = 3;
  int width = 720, height = 420;
};

// Resolved state shared by the model-driven subcommands.
struct Context {
  const Options& opt;
  std::ostream& out;
  std::ostream& err;
  bool lowercase_given = false;
  bool beam_given = false;
};

void write_json(std::ostream& out, const Json& j) { out << j.dump(2) << '\n'; }

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path);
  return f;
}

void require(bool cond, const std::string& message) {
  if (!cond) throw UsageError(message);
}

NGramModel load_model(const Options& opt) {
  require(!opt.model.empty(), "--model is required");
  return NGramModel::load(opt.model);
}

bool effective_lowercase(const Context& ctx, const NGramModel* model) {
  if (model && !ctx.lowercase_given) return model->lowercase();
  return ctx.opt.lowercase;
}

std::vector<GenericResponse> make_generics(const Options& opt, bool lowercase) {
  if (opt.generics.empty()) return default_generics(lowercase);
  std::vector<GenericResponse> out;
  std::set<std::string> seen;
  for (const auto& text : opt.generics) {
    if (!seen.insert(text).second) throw UsageError("duplicate --generic '" + text + "'");
    out.emplace_back(text, text, lowercase);
  }
  return out;
}

Json model_config(const NGramModel& m) {
  Json j;
  j["order"] = m.order();
  j["min_count"] = m.min_count();
  j["lambdas"] = m.lambdas();
  j["vocab_size"] = m.vocab_size();
  j["lowercase"] = m.lowercase();
  return j;
}

Json base_config(bool lowercase) {
  Json j;
  j["tokenizer"] = {{"lowercase", lowercase}, {"end_marker", std::string(kEndMarker)}};
  j["normalization"] = "mean token logprob (natural log), end marker included";
  return j;
}

BeamConfig beam_config(const Options& opt, std::size_t default_beam) {
  BeamConfig b;
  b.beam = opt.beam ? opt.beam : default_beam;
  b.max_len = opt.max_len;
  require(b.beam >= 1 && b.max_len >= 1, "--beam and --max-len must be >= 1");
  return b;
}

// Scores from either a score file or a model run over a pairs file.
struct ScoreSource {
  std::vector<PairScores> scores;
  Json config;
};

ScoreSource collect_scores(const Context& ctx, bool want_decoded) {
  const Options& opt = ctx.opt;
  ScoreSource src;
  if (!opt.scores.empty()) {
    require(opt.model.empty(), "--scores and --model are mutually exclusive");
    const auto records = read_score_file(opt.scores);
    src.scores = group_scores(records);
    src.config["scores"] = opt.scores;
    src.config["normalization"] = "mean token logprob (natural log), recomputed from the score file";
    return src;
  }
  require(!opt.pairs.empty(), "--pairs (with --model) or --scores is required");
  const NGramModel model = load_model(opt);
  const bool lowercase = effective_lowercase(ctx, &model);
  const auto pairs = load_pairs(opt.pairs);
  const auto generics = make_generics(opt, lowercase);

  ScoringOptions so;
  so.lowercase = lowercase;
  so.jobs = opt.jobs;
  src.config = base_config(lowercase);
  src.config["model"] = model_config(model);
  if (want_decoded) {
    const BeamConfig bc = beam_config(opt, 5);
    so.decoder = [&model, bc](const TokenSeq& prompt) { return beam_decode(model, prompt, bc); };
    src.config["decode"] = {{"beam", bc.beam}, {"max_len", bc.max_len}};
  }
  src.scores = score_pairs(model, pairs, generics, so);
  return src;
}

int cmd_train(const Context& ctx) {
  const Options& opt = ctx.opt;
  require(!opt.pairs.empty(), "--pairs is required");
  require(!opt.out.empty(), "--out is required");
  NGramConfig cfg;
  cfg.order = opt.order;
  cfg.min_count = opt.min_count;
  cfg.lambdas = opt.lambdas;
  cfg.lowercase = opt.lowercase;
  cfg.resolved_lambdas();
  const auto pairs = load_pairs(opt.pairs);
  const auto model = NGramModel::train(pairs, cfg);
  model.save(opt.out);

  Json j;
  j["model"] = opt.out;
  j["n_pairs"] = pairs.size();
  j["config"] = model_config(model);
  write_json(ctx.out, j);
  ctx.err << "trained order-" << model.order() << " model on " << pairs.size() << " pairs, vocabulary "
          << model.vocab_size() << " -> " << opt.out << '\n';
  return 0;
}

int cmd_score(const Context& ctx) {
  const Options& opt = ctx.opt;
  if (!opt.scores.empty() && opt.model.empty()) {
    // Validation of an externally produced score file.
    const auto records = read_score_file(opt.scores);
    const auto grouped = group_scores(records);
    Json j;
    j["scores"] = opt.scores;
    j["n_records"] = records.size();
    j["n_pairs"] = grouped.size();
    j["generics"] = generic_names(grouped);
    j["has_decoded"] = !grouped.empty() && grouped.front().decoded.has_value();
    write_json(ctx.out, j);
    ctx.err << opt.scores << ": " << records.size() << " valid records for " << grouped.size() << " pairs\n";
    return 0;
  }
  const auto src = collect_scores(ctx, ctx.beam_given);
  std::vector<ScoredCandidate> records;
  for (const auto& ps : src.scores) {
    records.push_back(*ps.reference);
    if (ps.decoded) records.push_back(*ps.decoded);
    for (const auto& g : ps.generics) records.push_back(g);
  }
  if (opt.out.empty()) {
    write_scores(ctx.out, records);
  } else {
    write_score_file(opt.out, records);
    ctx.err << "wrote " << records.size() << " score records -> " << opt.out << '\n';
  }
  return 0;
}

int cmd_ruq(const Context& ctx) {
  const Options& opt = ctx.opt;
  const Split split = parse_split(opt.split);
  const auto src = collect_scores(ctx, false);
  const RuqReport report = ruq_report(src.scores, split);
  Json config = src.config;
  config["tie_rule"] = "reference preferred only when strictly greater";
  const Json j = as_json(report, config);
  if (opt.out.empty()) {
    write_json(ctx.out, j);
  } else {
    auto f = open_output(opt.out);
    write_json(f, j);
  }
  for (const auto& g : report.generics)
    ctx.err << "RUQ-" << to_string(split) << " vs \"" << g.name << "\": " << g.ruq_percent << "% (" << g.preferred_count
            << "/" << report.n_pairs << ")\n";
  return 0;
}

int cmd_plot(const Context& ctx) {
  const Options& opt = ctx.opt;
  require(!opt.out.empty(), "--out (output prefix) is required");
  require(opt.max_position >= 1, "--max-position must be >= 1");
  const auto src = collect_scores(ctx, opt.scores.empty() && ctx.beam_given);
  const auto series = plot_series(src.scores, opt.max_position);
  const std::string csv = opt.out + ".csv", svg = opt.out + ".svg";
  emit_plot_csv(series, csv);
  emit_plot_svg(series, svg, SvgSize{opt.width, opt.height});

  Json j;
  j["csv"] = csv;
  j["svg"] = svg;
  j["max_position"] = opt.max_position;
  j["config"] = src.config;
  auto summary = Json::array();
  for (const auto& s : series) summary.push_back({{"series", s.label.str()}, {"points", s.points.size()}});
  j["series"] = std::move(summary);
  write_json(ctx.out, j);
  ctx.err << "wrote " << series.size() << " series -> " << csv << ", " << svg << '\n';
  return 0;
}

int cmd_filter(const Context& ctx) {
  const Options& opt = ctx.opt;
  require(!opt.pairs.empty(), "--pairs is required");
  const FilterSetting setting = parse_filter_setting(opt.setting);
  require(opt.threshold >= 0.0, "--threshold must be >= 0");
  const auto pairs = load_pairs(opt.pairs);
  const auto result = filter_corpus(pairs, setting, opt.threshold);

  std::string prefix = opt.out;
  if (prefix.empty()) {
    std::filesystem::path p(opt.pairs);
    p.replace_extension();
    prefix = p.string() + "." + to_string(setting);
  }
  const std::string kept_path = prefix + ".kept.jsonl", outcomes_path = prefix + ".outcomes.jsonl";
  save_pairs(kept_path, result.kept);
  {
    auto f = open_output(outcomes_path);
    for (const auto& o : result.outcomes) f << as_json(o).dump() << '\n';
    if (!f) throw DataError("write failed: " + outcomes_path);
  }

  Json j;
  j["kept"] = kept_path;
  j["outcomes"] = outcomes_path;
  j["n_pairs"] = pairs.size();
  j["n_kept"] = result.kept.size();
  j["n_dropped"] = pairs.size() - result.kept.size();
  j["config"] = {{"setting", to_string(setting)},
                 {"threshold", opt.threshold},
                 {"entropy_log_base", 2},
                 {"clustering", "identity (lowercased, tokenized)"},
                 {"drop_rule", "entropy > threshold"}};
  write_json(ctx.out, j);
  ctx.err << "kept " << result.kept.size() << " of " << pairs.size() << " pairs (setting " << to_string(setting)
          << ", threshold " << opt.threshold << ")\n";
  return 0;
}

// Candidate responses: the response field of --pairs (joined on id), or the
// model's beam output for each prompt.
std::vector<TokenSeq> candidate_responses(const Context& ctx, const std::vector<MultiRefItem>* items,
                                          const std::vector<DialogPair>* pairs, bool lowercase,
                                          const NGramModel* model, Json& config) {
  const Options& opt = ctx.opt;
  std::vector<std::string> prompts;
  if (items)
    for (const auto& it : *items) prompts.push_back(it.prompt);
  else
    for (const auto& p : *pairs) prompts.push_back(p.prompt);

  if (model) {
    const BeamConfig bc = beam_config(opt, 5);
    config["decode"] = {{"beam", bc.beam}, {"max_len", bc.max_len}};
    return parallel_map(prompts.size(), opt.jobs, [&](std::size_t i) {
      return beam_decode(*model, tokenize(prompts[i], lowercase), bc).without_end_marker();
    });
  }
  std::vector<TokenSeq> out;
  if (!items) {
    for (const auto& p : *pairs) out.push_back(tokenize(p.response, lowercase));
    return out;
  }
  std::map<std::uint64_t, const DialogPair*> by_id;
  for (const auto& p : *pairs) by_id.emplace(p.id, &p);
  for (const auto& it : *items) {
    const auto f = by_id.find(it.id);
    if (f == by_id.end()) throw DataError("no candidate response for multiref id " + std::to_string(it.id));
    out.push_back(tokenize(f->second->response, lowercase));
  }
  return out;
}

Json bleu_json(const BleuScores& s) {
  Json j;
  for (std::size_t k = 0; k < s.size(); ++k) j["BLEU" + std::to_string(k + 1)] = s[k];
  return j;
}

Json overlap_block(std::span<const TokenSeq> cands, std::span<const std::vector<TokenSeq>> refs,
                   const EmbeddingTable* table) {
  Json j;
  j["avg_max_sentence_bleu"] = bleu_json(avg_max_sentence_bleu(cands, refs));
  j["corpus_bleu"] = bleu_json(corpus_bleu(cands, refs));
  double meteor = 0.0, rouge = 0.0;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    meteor += meteor_lite(cands[i], refs[i]);
    rouge += rouge_l(cands[i], refs[i]);
  }
  const double n = cands.empty() ? 1.0 : static_cast<double>(cands.size());
  j["meteor_lite"] = meteor / n;
  j["rouge_l"] = rouge / n;
  if (table) {
    const auto e = embed_corpus_scores(cands, refs, *table);
    j["embedding_average"] = e.embedding_average;
    j["vector_extrema"] = e.vector_extrema;
    j["greedy_matching"] = e.greedy_matching;
    j["embedding_items_scored"] = e.n_scored;
    j["embedding_items_skipped"] = e.n_skipped;
    j["embedding_oov_tokens"] = e.oov_tokens;
  }
  return j;
}

int cmd_metrics(const Context& ctx) {
  const Options& opt = ctx.opt;
  require(!opt.multiref.empty(), "--multiref is required");
  require(!opt.pairs.empty() || !opt.model.empty(), "candidates come from --pairs or --model");
  const auto items = load_multiref(opt.multiref);
  std::optional<NGramModel> model;
  if (!opt.model.empty()) model = NGramModel::load(opt.model);
  std::vector<DialogPair> pairs;
  if (!model) pairs = load_pairs(opt.pairs);
  const bool lowercase = effective_lowercase(ctx, model ? &*model : nullptr);

  Json config = base_config(lowercase);
  config.erase("normalization");
  const auto cands = candidate_responses(ctx, &items, &pairs, lowercase, model ? &*model : nullptr, config);
  std::vector<std::vector<TokenSeq>> multi, single;
  for (const auto& it : items) {
    std::vector<TokenSeq> refs;
    for (const auto& r : it.references) refs.push_back(tokenize(r, lowercase));
    single.push_back({refs.front()});
    multi.push_back(std::move(refs));
  }

  std::optional<LoadedEmbeddings> emb;
  if (!opt.embeddings.empty()) {
    emb = load_embeddings(opt.embeddings);
    for (const auto& w : emb->warnings) ctx.err << "warning: " << w << '\n';
  }
  const EmbeddingTable* table = emb ? &emb->table : nullptr;

  config["bleu"] = {{"max_n", kDefaultBleuOrder}, {"sentence_smoothing", "zero precision of order >= 2 -> 1/(2c)"},
                    {"brevity_reference", "closest length, ties to shorter"}};
  config["rouge_l_beta"] = kRougeBeta;
  config["meteor_lite"] = {{"alpha", 0.9}, {"beta", 3.0}, {"gamma", 0.5}, {"stages", {"exact", "porter_stem"}}};
  if (table) {
    config["embeddings"] = {{"path", opt.embeddings}, {"dimension", table->dimension()}, {"oov", "skip"},
                            {"kernels", std::string(simd::to_string(simd::active().isa))}};
  }
  config["scale"] = "0-100";

  Json j;
  j["n_items"] = items.size();
  j["multi_reference"] = overlap_block(cands, multi, table);
  j["single_reference"] = overlap_block(cands, single, table);
  j["config"] = config;
  write_json(ctx.out, j);
  ctx.err << "scored " << items.size() << " items against " << opt.multiref << '\n';
  return 0;
}

int cmd_diversity(const Context& ctx) {
  const Options& opt = ctx.opt;
  require(!opt.pairs.empty(), "--pairs is required");
  require(opt.max_n >= 1, "--max-n must be >= 1");
  std::optional<NGramModel> model;
  if (!opt.model.empty()) model = NGramModel::load(opt.model);
  const bool lowercase = effective_lowercase(ctx, model ? &*model : nullptr);
  const auto pairs = load_pairs(opt.pairs);
  Json config = base_config(lowercase);
  config.erase("normalization");
  const auto responses = candidate_responses(ctx, nullptr, &pairs, lowercase, model ? &*model : nullptr, config);

  Json j;
  j["n_responses"] = responses.size();
  for (int n = 1; n <= opt.max_n; ++n) j["distinct_" + std::to_string(n)] = distinct_n(responses, n);
  config["ratio"] = "pooled unique n-grams / pooled n-grams, scaled 0-100";
  j["config"] = config;
  write_json(ctx.out, j);
  ctx.err << "distinct-n over " << responses.size() << " responses\n";
  return 0;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Relative utterance quantity diagnostics for dialog models", "ruqkit"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  auto add_jobs = [&](CLI::App* sc) {
    sc->add_option("--jobs", opt.jobs, "Worker threads (outputs do not depend on it)")->check(CLI::PositiveNumber);
  };
  auto add_lowercase = [&](CLI::App* sc) {
    return sc->add_flag("--lowercase,!--no-lowercase", opt.lowercase,
                        "Lowercase tokens (default: on, or the model's setting)");
  };
  auto add_generics = [&](CLI::App* sc) {
    sc->add_option("--generic", opt.generics, "Generic response text (repeatable)")->take_all();
  };
  auto add_decode = [&](CLI::App* sc) {
    sc->add_option("--beam", opt.beam, "Beam width for decoding")->check(CLI::PositiveNumber);
    sc->add_option("--max-len", opt.max_len, "Maximum decoded length")->check(CLI::PositiveNumber);
  };

  auto* train = app.add_subcommand("train", "Train the n-gram conditional scorer");
  train->add_option("--pairs", opt.pairs, "Training pairs (JSONL)");
  train->add_option("--order", opt.order, "n-gram order")->check(CLI::PositiveNumber);
  train->add_option("--min-count", opt.min_count, "Tokens seen fewer times become <unk>");
  train->add_option("--lambdas", opt.lambdas, "Interpolation weights lambda_0..lambda_order")->delimiter(',');
  train->add_option("--out", opt.out, "Model output path");
  CLI::Option* lc_train = add_lowercase(train);

  auto* score = app.add_subcommand("score", "Write token-level score records, or validate a score file");
  score->add_option("--pairs", opt.pairs, "Pairs (JSONL)");
  score->add_option("--model", opt.model, "Trained model");
  score->add_option("--scores", opt.scores, "Score file to validate");
  score->add_option("--out", opt.out, "Score file output (default: stdout)");
  add_generics(score);
  add_decode(score);
  add_jobs(score);
  CLI::Option* lc_score = add_lowercase(score);

  auto* ruq = app.add_subcommand("ruq", "RUQ report: how often the reference beats each generic response");
  ruq->add_option("--pairs", opt.pairs, "Pairs (JSONL)");
  ruq->add_option("--model", opt.model, "Trained model");
  ruq->add_option("--scores", opt.scores, "External score file instead of a model");
  ruq->add_option("--split", opt.split, "Label for the evaluated split: train or test");
  ruq->add_option("--out", opt.out, "Report output (default: stdout)");
  add_generics(ruq);
  add_jobs(ruq);
  CLI::Option* lc_ruq = add_lowercase(ruq);

  auto* plot = app.add_subcommand("plot", "Per-position mean token logprob series (CSV + SVG)");
  plot->add_option("--pairs", opt.pairs, "Pairs (JSONL)");
  plot->add_option("--model", opt.model, "Trained model");
  plot->add_option("--scores", opt.scores, "External score file instead of a model");
  plot->add_option("--max-position", opt.max_position, "Last token position plotted")->check(CLI::PositiveNumber);
  plot->add_option("--out", opt.out, "Output prefix; writes <prefix>.csv and <prefix>.svg");
  plot->add_option("--width", opt.width, "SVG width")->check(CLI::PositiveNumber);
  plot->add_option("--height", opt.height, "SVG height")->check(CLI::PositiveNumber);
  add_generics(plot);
  add_decode(plot);
  add_jobs(plot);
  CLI::Option* lc_plot = add_lowercase(plot);

  auto* filter = app.add_subcommand("filter", "Entropy-based corpus filtering (identity clustering)");
  filter->add_option("--pairs", opt.pairs, "Pairs (JSONL)");
  filter->add_option("--setting", opt.setting, "source, target or both");
  filter->add_option("--threshold", opt.threshold, "Entropy threshold in bits (drop when greater)");
  filter->add_option("--out", opt.out, "Output prefix; writes <prefix>.kept.jsonl and <prefix>.outcomes.jsonl");

  auto* metrics = app.add_subcommand("metrics", "Word-overlap and embedding metrics");
  metrics->add_option("--multiref", opt.multiref, "Multi-reference evaluation set (JSONL)");
  metrics->add_option("--pairs", opt.pairs, "System responses, joined on id");
  metrics->add_option("--model", opt.model, "Decode candidates with this model instead");
  metrics->add_option("--embeddings", opt.embeddings, "Word vectors (text format)");
  add_decode(metrics);
  add_jobs(metrics);
  CLI::Option* lc_metrics = add_lowercase(metrics);

  auto* diversity = app.add_subcommand("diversity", "Distinct-n type/token ratios of responses");
  diversity->add_option("--pairs", opt.pairs, "Responses (JSONL); prompts when --model is given");
  diversity->add_option("--model", opt.model, "Decode responses with this model");
  diversity->add_option("--max-n", opt.max_n, "Largest n reported")->check(CLI::PositiveNumber);
  add_decode(diversity);
  add_jobs(diversity);
  CLI::Option* lc_diversity = add_lowercase(diversity);

  std::vector<const char*> argv{"ruqkit"};
  for (const auto& a : args) argv.push_back(a.c_str());
  if (args.empty()) {
    err << app.help();
    return kExitUsage;
  }
  if (!args.empty() && !args[0].starts_with("-") && !app.get_subcommand_no_throw(args[0])) {
    err << "error: unknown subcommand '" << args[0] << "'\n\n" << app.help();
    return kExitUsage;
  }
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  Context ctx{opt, out, err};
  for (const CLI::Option* o : {lc_train, lc_score, lc_ruq, lc_plot, lc_metrics, lc_diversity})
    if (o->count() > 0) ctx.lowercase_given = true;
  for (const CLI::App* sc : {score, plot, metrics, diversity})
    if (sc->parsed() && sc->get_option("--beam")->count() > 0) ctx.beam_given = true;

  try {
    if (train->parsed()) return cmd_train(ctx);
    if (score->parsed()) return cmd_score(ctx);
    if (ruq->parsed()) return cmd_ruq(ctx);
    if (plot->parsed()) return cmd_plot(ctx);
    if (filter->parsed()) return cmd_filter(ctx);
    if (metrics->parsed()) return cmd_metrics(ctx);
    if (diversity->parsed()) return cmd_diversity(ctx);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  err << app.help();
  return kExitUsage;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace ruqkit::cli
