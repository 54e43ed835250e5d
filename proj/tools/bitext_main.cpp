// bitext: filter noisy parallel corpora and mine parallel sentences in
// comparable corpora by thresholding distances in a shared embedding space.
// One subcommand per pipeline stage; all randomness is seeded, all outputs
// are byte-stable across reruns and thread counts.
#include <omp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "bitext/bpe.hpp"
#include "bitext/corpus_io.hpp"
#include "bitext/embed.hpp"
#include "bitext/error.hpp"
#include "bitext/evalbucc.hpp"
#include "bitext/mine_filter.hpp"
#include "bitext/preprocess.hpp"
#include "bitext/simsearch.hpp"

using namespace bitext;

namespace {

struct PreprocessArgs {
  std::string src, tgt;
  std::string lang, tgt_lang = "und";
  std::string output, tgt_output;
  std::string report_path;
  std::vector<std::string> lid_train;  // tag=path
  PreprocessConfig cfg;
};

struct BpeLearnArgs {
  std::vector<std::string> inputs;
  std::string output;
  int merges = 20000;
  bool lowercase = false;
};

struct BpeApplyArgs {
  std::string model, corpus, output;
  bool lowercase = false;
};

struct EmbedArgs {
  std::string corpus, bpe, output;
  std::string mode = "hashed";
  std::string lang = "und";
  int dim = 1024;
  std::uint64_t seed = 42;
  bool lowercase = false;
};

struct IndexBuildArgs {
  std::string embeddings, output;
  int nlist = 0;  // 0 -> ceil(sqrt(n))
  int kmeans_iters = 10;
  std::uint64_t seed = 42;
};

struct IndexSearchArgs {
  std::string index, queries, output;
  int k = 20;
  int nprobe = 32;
  float threshold = 2.0f;
};

struct FilterArgs {
  std::string src, tgt, src_emb, tgt_emb, output;
  std::string lang = "und", tgt_lang = "und";
  float threshold = 1.0f;
};

struct MineArgs {
  std::string src, tgt, src_emb, tgt_emb, output;
  std::string lang = "und", tgt_lang = "und";
  std::string ivf;
  int k = 20;
  int nprobe = 32;
  float threshold = 0.55f;  // tuned-elsewhere default for untuned pairs
  bool bidirectional = false;
};

struct SweepArgs {
  std::string pairs, output;
  float from = 0.8f, to = 1.2f, step = 0.05f;
};

struct StatsArgs {
  std::string mode, corpus, output;
  std::string lang = "und";
};

struct EvalArgs {
  std::string pairs, gold;
  float threshold = 2.0f;
  bool json = false;
};

struct TuneArgs {
  std::string candidates, gold;
  bool json = false;
};

struct SynthArgs {
  std::string output_dir;
  SyntheticSpec spec{1000, 1000, 500, 1024, 0.1, 42};
};

void report_to(std::FILE* f, const StageReport& r) {
  std::fprintf(f, "input\tafter_commas\tafter_length\tafter_lid\n%zu\t%zu\t%zu\t%zu\n",
               r.input_count, r.after_commas, r.after_length, r.after_lid);
}

LidModel train_lid_from_args(const std::vector<std::string>& specs) {
  std::vector<std::pair<std::string, std::string>> samples;
  for (const auto& spec : specs) {
    std::size_t eq = spec.find('=');
    if (eq == std::string::npos || eq == 0)
      throw UsageError("--lid-train expects tag=path, got '" + spec + "'");
    std::string tag = spec.substr(0, eq);
    for (const auto& line : read_lines(spec.substr(eq + 1))) samples.emplace_back(tag, line);
  }
  return LidModel::train(samples);
}

int run_preprocess(const PreprocessArgs& args) {
  LidModel model;
  const LidModel* lid = nullptr;
  PreprocessConfig cfg = args.cfg;
  cfg.lid_enabled = !args.lid_train.empty();
  if (cfg.lid_enabled) {
    model = train_lid_from_args(args.lid_train);
    lid = &model;
    auto known = [&](const std::string& lang) {
      return std::find(model.languages().begin(), model.languages().end(), lang) !=
             model.languages().end();
    };
    if (!known(args.lang))
      throw ValidationError("corpus language '" + args.lang + "' has no LID seed data");
    if (!args.tgt.empty() && !known(args.tgt_lang))
      throw ValidationError("corpus language '" + args.tgt_lang + "' has no LID seed data");
  }

  StageReport report;
  if (args.tgt.empty()) {
    Corpus corpus = read_bucc_corpus(args.src, args.lang);
    FilteredCorpus out = preprocess_corpus(corpus, cfg, lid);
    write_corpus(out.corpus, args.output);
    report = out.report;
  } else {
    if (args.tgt_output.empty())
      throw UsageError("--tgt-output is required in bitext mode");
    Corpus src = read_bucc_corpus(args.src, args.lang);
    Corpus tgt = read_bucc_corpus(args.tgt, args.tgt_lang);
    FilteredBitext out = preprocess_bitext(src, tgt, cfg, lid);
    write_corpus(out.src, args.output);
    write_corpus(out.tgt, args.tgt_output);
    report = out.report;
  }
  report_to(stderr, report);
  if (!args.report_path.empty()) {
    std::FILE* f = std::fopen(args.report_path.c_str(), "wb");
    if (!f) throw IoError("cannot open for writing: " + args.report_path);
    report_to(f, report);
    std::fclose(f);
  }
  return 0;
}

std::vector<Corpus> read_corpora(const std::vector<std::string>& paths) {
  std::vector<Corpus> corpora;
  corpora.reserve(paths.size());
  for (const auto& p : paths) corpora.push_back(read_bucc_corpus(p, "und"));
  return corpora;
}

int run_bpe_learn(const BpeLearnArgs& args) {
  std::vector<Corpus> corpora = read_corpora(args.inputs);
  BpeModel model = learn_bpe(corpora, args.merges, args.lowercase);
  model.save(args.output);
  std::fprintf(stderr, "bpe-learn\tmerges=%zu\n", model.merges.size());
  return 0;
}

int run_bpe_apply(const BpeApplyArgs& args) {
  BpeModel model = BpeModel::load(args.model);
  BpeApplier applier(model, args.lowercase);
  CorpusReader reader(args.corpus, "und");
  std::ofstream out(args.output, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + args.output);
  SentenceRecord rec;
  std::size_t n = 0;
  while (reader.next(rec)) {
    out << rec.id << '\t';
    std::vector<std::string> tokens = applier.apply(rec.text);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (i > 0) out << ' ';
      out << tokens[i];
    }
    out << '\n';
    ++n;
  }
  if (!out) throw IoError("write failed: " + args.output);
  std::fprintf(stderr, "bpe-apply\tsentences=%zu\n", n);
  return 0;
}

int run_embed(const EmbedArgs& args) {
  if (args.mode != "hashed")
    throw UsageError("unsupported --mode '" + args.mode +
                     "' (precomputed vectors are consumed directly as .bmem files)");
  Corpus corpus = read_bucc_corpus(args.corpus, args.lang);
  BpeModel bpe = BpeModel::load(args.bpe);
  HashedEncoder encoder(args.dim, args.seed);
  EmbeddingMatrix m = embed_corpus(encoder, corpus, bpe, args.lowercase);
  write_embeddings(m, args.output);
  std::fprintf(stderr, "embed\tsentences=%zu\tdim=%d\n", corpus.size(), args.dim);
  return 0;
}

int run_index_build(const IndexBuildArgs& args) {
  EmbeddingMatrix targets = read_embeddings(args.embeddings);
  int nlist = args.nlist > 0 ? args.nlist : default_nlist(targets.size());
  IvfIndex index = build_ivf(targets, nlist, args.seed, args.kmeans_iters);
  save_index(index, args.output);
  std::fprintf(stderr, "index-build\trows=%lld\tnlist=%d\n",
               static_cast<long long>(index.size()), nlist);
  return 0;
}

int run_index_search(const IndexSearchArgs& args) {
  IvfIndex index = load_index(args.index);
  EmbeddingMatrix queries = read_embeddings(args.queries);
  SearchParams params;
  params.k = args.k;
  params.nprobe = std::min(args.nprobe, index.nlist());
  auto neighbors = knn_ivf(index, queries, params);
  std::vector<CandidatePair> pairs;
  for (std::size_t q = 0; q < neighbors.size(); ++q)
    for (const Neighbor& n : neighbors[q])
      if (n.distance <= args.threshold)
        pairs.push_back({queries.ids[q], index.ids[n.target_index], n.distance});
  write_pairs(std::move(pairs), args.output);
  return 0;
}

// corpora define the row order; embeddings are re-aligned by sentence id
std::pair<Corpus, EmbeddingMatrix> load_side(const std::string& corpus_path,
                                             const std::string& lang,
                                             const std::string& emb_path) {
  Corpus corpus = read_bucc_corpus(corpus_path, lang);
  auto provider = EmbeddingProvider::file_backed(read_embeddings(emb_path));
  EmbeddingMatrix aligned = provider.embed(corpus);
  return {std::move(corpus), std::move(aligned)};
}

int run_filter(const FilterArgs& args) {
  auto [src, src_emb] = load_side(args.src, args.lang, args.src_emb);
  auto [tgt, tgt_emb] = load_side(args.tgt, args.tgt_lang, args.tgt_emb);
  auto scored = score_bitext(src, tgt, src_emb, tgt_emb);
  auto kept = filter_by_threshold(scored, Threshold{args.threshold});
  write_pairs(kept, args.output);
  std::fprintf(stderr, "filter\tinput=%zu\tkept=%zu\tthreshold=%.6f\n", scored.size(),
               kept.size(), static_cast<double>(args.threshold));
  return 0;
}

int run_mine(const MineArgs& args) {
  auto [src, src_emb] = load_side(args.src, args.lang, args.src_emb);
  auto [tgt, tgt_emb] = load_side(args.tgt, args.tgt_lang, args.tgt_emb);
  MineOptions options;
  options.search.k = args.k;
  options.search.nprobe = args.nprobe;
  options.threshold = Threshold{args.threshold};
  options.bidirectional = args.bidirectional;

  IvfIndex index;
  const IvfIndex* index_ptr = nullptr;
  if (!args.ivf.empty()) {
    index = load_index(args.ivf);
    if (index.ids != tgt_emb.ids)
      throw ValidationError("index " + args.ivf +
                            " was not built over these target embeddings (id order differs)");
    index_ptr = &index;
  }
  auto pairs = mine(src, src_emb, tgt, tgt_emb, options, index_ptr);
  write_pairs(pairs, args.output);
  std::fprintf(stderr, "mine\tsources=%zu\tpairs=%zu\tthreshold=%.6f\n", src.size(),
               pairs.size(), static_cast<double>(args.threshold));
  return 0;
}

int run_sweep(const SweepArgs& args) {
  if (args.step <= 0.0f) throw UsageError("--step must be positive");
  auto pairs = read_pairs(args.pairs);
  std::vector<float> thresholds;
  for (double t = args.from; t <= static_cast<double>(args.to) + 1e-9; t += args.step)
    thresholds.push_back(static_cast<float>(t));
  SweepCurve curve = sweep(pairs, thresholds);

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!args.output.empty()) {
    file.open(args.output, std::ios::binary);
    if (!file) throw IoError("cannot open for writing: " + args.output);
    out = &file;
  }
  char buf[32];
  for (const auto& [t, count] : curve.points) {
    std::snprintf(buf, sizeof buf, "%.6f", static_cast<double>(t));
    (*out) << buf << '\t' << count << '\n';
  }
  return 0;
}

int run_stats(const StatsArgs& args) {
  if (args.mode != "lengths")
    throw UsageError("unknown stats mode '" + args.mode + "' (expected: lengths)");
  Corpus corpus = read_bucc_corpus(args.corpus, args.lang);
  LengthHistogram h = length_histogram(corpus);

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!args.output.empty()) {
    file.open(args.output, std::ios::binary);
    if (!file) throw IoError("cannot open for writing: " + args.output);
    out = &file;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "#lengths\tsentences=%zu\tmean=%.4f\n", h.total,
                h.mean_length);
  (*out) << buf;
  for (const auto& [len, count] : h.bins) (*out) << len << '\t' << count << '\n';
  return 0;
}

void print_report(const EvalReport& r, bool json) {
  std::printf("threshold\tprecision\trecall\tf1\ttrue_positives\tpredicted\tgold\n");
  std::printf("%.6f\t%.4f\t%.4f\t%.4f\t%zu\t%zu\t%zu\n", static_cast<double>(r.threshold),
              r.precision, r.recall, r.f1, r.true_positives, r.predicted, r.gold);
  if (json) {
    nlohmann::json j{{"threshold", r.threshold}, {"precision", r.precision},
                     {"recall", r.recall},       {"f1", r.f1},
                     {"true_positives", r.true_positives}, {"predicted", r.predicted},
                     {"gold", r.gold}};
    std::printf("%s\n", j.dump().c_str());
  }
}

int run_eval(const EvalArgs& args) {
  auto pairs = read_pairs(args.pairs);
  GoldAlignment gold = read_gold(args.gold);
  if (gold.duplicates_dropped > 0)
    std::fprintf(stderr, "eval\tduplicate gold lines collapsed: %zu\n",
                 gold.duplicates_dropped);
  auto kept = filter_by_threshold(pairs, Threshold{args.threshold});
  EvalReport report = score(to_pair_set(kept), gold);
  report.threshold = args.threshold;
  print_report(report, args.json);
  return 0;
}

int run_tune(const TuneArgs& args) {
  auto candidates = best_per_source(read_pairs(args.candidates));
  GoldAlignment gold = read_gold(args.gold);
  auto [threshold, report] = tune_threshold(candidates, gold);
  print_report(report, args.json);
  std::fprintf(stderr, "tune\tcandidates=%zu\tthreshold=%.6f\tf1=%.4f\n", candidates.size(),
               static_cast<double>(threshold.value), report.f1);
  return 0;
}

int run_synth(const SynthArgs& args) {
  SyntheticData data = generate_synthetic(args.spec);
  std::filesystem::create_directories(args.output_dir);
  auto path = [&](const char* name) {
    return (std::filesystem::path(args.output_dir) / name).string();
  };
  write_corpus(data.src, path("src.tsv"));
  write_corpus(data.tgt, path("tgt.tsv"));
  write_embeddings(data.src_embeddings, path("src.bmem"));
  write_embeddings(data.tgt_embeddings, path("tgt.bmem"));
  write_gold(data.gold, path("gold.tsv"));
  std::fprintf(stderr, "synth\tsrc=%zu\ttgt=%zu\tplanted=%zu\tdim=%d\n", args.spec.n_src,
               args.spec.n_tgt, args.spec.n_planted, args.spec.dim);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bitext: filter and mine parallel corpora in a joint embedding space"};
  app.require_subcommand(1);
  app.set_config("--config");
  app.fallthrough();

  int threads = 0;
  app.add_option("--threads", threads, "worker threads (default: all cores)")
      ->envname("BITEXT_THREADS");

  PreprocessArgs pre;
  auto* cmd_pre = app.add_subcommand("preprocess",
                                     "comma rule, length cap and LID filtering");
  cmd_pre->add_option("src", pre.src, "corpus TSV")->required();
  cmd_pre->add_option("tgt", pre.tgt, "aligned target corpus TSV (bitext mode)");
  cmd_pre->add_option("--lang", pre.lang, "source language tag")->required();
  cmd_pre->add_option("--tgt-lang", pre.tgt_lang, "target language tag");
  cmd_pre->add_option("-o,--output", pre.output, "filtered corpus")->required();
  cmd_pre->add_option("--tgt-output", pre.tgt_output, "filtered target corpus");
  cmd_pre->add_option("--max-commas", pre.cfg.max_commas, "drop sentences with more commas");
  cmd_pre->add_option("--max-words", pre.cfg.max_words,
                      "drop sentences with this many words or more");
  cmd_pre->add_option("--lid-train", pre.lid_train,
                      "tag=path LID seed text, repeatable; enables the LID stage");
  cmd_pre->add_option("--lid-min-conf", pre.cfg.lid_min_confidence,
                      "minimum LID posterior to keep");
  cmd_pre->add_option("--report", pre.report_path, "also write the stage report here");

  BpeLearnArgs bl;
  auto* cmd_bl = app.add_subcommand("bpe-learn", "learn a joint BPE merge table");
  cmd_bl->add_option("inputs", bl.inputs, "corpus TSV files (pooled)")->required();
  cmd_bl->add_option("--merges", bl.merges, "merge operations to learn");
  cmd_bl->add_flag("--lowercase", bl.lowercase, "ascii-lowercase before learning");
  cmd_bl->add_option("-o,--output", bl.output, "model file")->required();

  BpeApplyArgs ba;
  auto* cmd_ba = app.add_subcommand("bpe-apply", "segment a corpus with a BPE model");
  cmd_ba->add_option("model", ba.model, "BPE model")->required();
  cmd_ba->add_option("corpus", ba.corpus, "corpus TSV")->required();
  cmd_ba->add_flag("--lowercase", ba.lowercase, "ascii-lowercase before applying");
  cmd_ba->add_option("-o,--output", ba.output, "id<TAB>tokens output")->required();

  EmbedArgs em;
  auto* cmd_em = app.add_subcommand("embed", "embed a corpus (hashed baseline encoder)");
  cmd_em->add_option("corpus", em.corpus, "corpus TSV")->required();
  cmd_em->add_option("--mode", em.mode, "encoder mode: hashed");
  cmd_em->add_option("--dim", em.dim, "embedding dimension");
  cmd_em->add_option("--seed", em.seed, "hash seed");
  cmd_em->add_option("--bpe", em.bpe, "BPE model")->required();
  cmd_em->add_option("--lang", em.lang, "language tag");
  cmd_em->add_flag("--lowercase", em.lowercase, "ascii-lowercase before tokenizing");
  cmd_em->add_option("-o,--output", em.output, "BMEM output")->required();

  IndexBuildArgs ib;
  auto* cmd_ib = app.add_subcommand("index-build", "build an IVF index over embeddings");
  cmd_ib->add_option("embeddings", ib.embeddings, "BMEM file")->required();
  cmd_ib->add_option("--nlist", ib.nlist, "clusters (default ceil(sqrt(n)))");
  cmd_ib->add_option("--kmeans-iters", ib.kmeans_iters, "Lloyd iterations");
  cmd_ib->add_option("--seed", ib.seed, "k-means seed");
  cmd_ib->add_option("-o,--output", ib.output, "BIVF output")->required();

  IndexSearchArgs is;
  auto* cmd_is = app.add_subcommand("index-search", "k-NN search against an IVF index");
  cmd_is->add_option("index", is.index, "BIVF file")->required();
  cmd_is->add_option("queries", is.queries, "BMEM file")->required();
  cmd_is->add_option("--k", is.k, "neighbors per query");
  cmd_is->add_option("--nprobe", is.nprobe, "lists probed per query");
  cmd_is->add_option("--threshold", is.threshold, "keep neighbors at or below")
      ->check(CLI::Range(0.0f, 2.0f));
  cmd_is->add_option("-o,--output", is.output, "pair TSV output")->required();

  FilterArgs fi;
  auto* cmd_fi = app.add_subcommand("filter", "score and threshold a line-aligned bitext");
  cmd_fi->add_option("src", fi.src, "source corpus TSV")->required();
  cmd_fi->add_option("tgt", fi.tgt, "target corpus TSV")->required();
  cmd_fi->add_option("src_emb", fi.src_emb, "source BMEM")->required();
  cmd_fi->add_option("tgt_emb", fi.tgt_emb, "target BMEM")->required();
  cmd_fi->add_option("--threshold", fi.threshold, "keep pairs at or below")
      ->required()
      ->check(CLI::Range(0.0f, 2.0f));
  cmd_fi->add_option("--lang", fi.lang, "source language tag");
  cmd_fi->add_option("--tgt-lang", fi.tgt_lang, "target language tag");
  cmd_fi->add_option("-o,--output", fi.output, "pair TSV output")->required();

  MineArgs mi;
  auto* cmd_mi = app.add_subcommand("mine", "k-NN mining over two monolingual corpora");
  cmd_mi->add_option("src", mi.src, "source corpus TSV")->required();
  cmd_mi->add_option("tgt", mi.tgt, "target corpus TSV")->required();
  cmd_mi->add_option("src_emb", mi.src_emb, "source BMEM")->required();
  cmd_mi->add_option("tgt_emb", mi.tgt_emb, "target BMEM")->required();
  cmd_mi->add_option("--k", mi.k, "nearest targets per source");
  cmd_mi->add_option("--threshold", mi.threshold, "keep pairs at or below")
      ->check(CLI::Range(0.0f, 2.0f));
  cmd_mi->add_option("--ivf", mi.ivf, "BIVF index built over the target embeddings");
  cmd_mi->add_option("--nprobe", mi.nprobe, "lists probed per query (with --ivf)");
  cmd_mi->add_flag("--bidirectional", mi.bidirectional,
                   "keep only pairs mined in both directions");
  cmd_mi->add_option("--lang", mi.lang, "source language tag");
  cmd_mi->add_option("--tgt-lang", mi.tgt_lang, "target language tag");
  cmd_mi->add_option("-o,--output", mi.output, "pair TSV output")->required();

  SweepArgs sw;
  auto* cmd_sw = app.add_subcommand("sweep", "survivor counts over a threshold range");
  cmd_sw->add_option("pairs", sw.pairs, "scored pair TSV")->required();
  cmd_sw->add_option("--from", sw.from, "first threshold")->check(CLI::Range(0.0f, 2.0f));
  cmd_sw->add_option("--to", sw.to, "last threshold (inclusive)")->check(CLI::Range(0.0f, 2.0f));
  cmd_sw->add_option("--step", sw.step, "threshold increment");
  cmd_sw->add_option("-o,--output", sw.output, "curve TSV (default stdout)");

  StatsArgs st;
  auto* cmd_st = app.add_subcommand("stats", "corpus statistics");
  cmd_st->add_option("mode", st.mode, "statistic: lengths")->required();
  cmd_st->add_option("corpus", st.corpus, "corpus TSV")->required();
  cmd_st->add_option("--lang", st.lang, "language tag");
  cmd_st->add_option("-o,--output", st.output, "output TSV (default stdout)");

  EvalArgs ev;
  auto* cmd_ev = app.add_subcommand("eval", "score predicted pairs against gold");
  cmd_ev->add_option("pairs", ev.pairs, "predicted pair TSV")->required();
  cmd_ev->add_option("gold", ev.gold, "gold alignment TSV")->required();
  cmd_ev->add_option("--threshold", ev.threshold, "filter predictions first")
      ->check(CLI::Range(0.0f, 2.0f));
  cmd_ev->add_flag("--json", ev.json, "also print the report as one JSON line");

  TuneArgs tu;
  auto* cmd_tu = app.add_subcommand("tune", "find the F1-optimal distance threshold");
  cmd_tu->add_option("candidates", tu.candidates, "scored candidate TSV")->required();
  cmd_tu->add_option("gold", tu.gold, "gold alignment TSV")->required();
  cmd_tu->add_flag("--json", tu.json, "also print the report as one JSON line");

  SynthArgs sy;
  auto* cmd_sy = app.add_subcommand("synth",
                                    "generate a synthetic comparable corpus with planted pairs");
  cmd_sy->add_option("--n-src", sy.spec.n_src, "source sentences");
  cmd_sy->add_option("--n-tgt", sy.spec.n_tgt, "target sentences");
  cmd_sy->add_option("--n-planted", sy.spec.n_planted, "planted translation pairs");
  cmd_sy->add_option("--dim", sy.spec.dim, "embedding dimension");
  cmd_sy->add_option("--noise-sigma", sy.spec.noise_sigma, "per-coordinate noise");
  cmd_sy->add_option("--seed", sy.spec.seed, "generator seed");
  cmd_sy->add_option("-o,--output", sy.output_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: usage: %s\n", e.what());
    return 2;
  }

  if (threads > 0) omp_set_num_threads(threads);

  try {
    if (cmd_pre->parsed()) return run_preprocess(pre);
    if (cmd_bl->parsed()) return run_bpe_learn(bl);
    if (cmd_ba->parsed()) return run_bpe_apply(ba);
    if (cmd_em->parsed()) return run_embed(em);
    if (cmd_ib->parsed()) return run_index_build(ib);
    if (cmd_is->parsed()) return run_index_search(is);
    if (cmd_fi->parsed()) return run_filter(fi);
    if (cmd_mi->parsed()) return run_mine(mi);
    if (cmd_sw->parsed()) return run_sweep(sw);
    if (cmd_st->parsed()) return run_stats(st);
    if (cmd_ev->parsed()) return run_eval(ev);
    if (cmd_tu->parsed()) return run_tune(tu);
    if (cmd_sy->parsed()) return run_synth(sy);
    std::fprintf(stderr, "error: usage: no subcommand\n");
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s: %s\n", e.category().c_str(), e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: internal: %s\n", e.what());
    return 1;
  }
}
