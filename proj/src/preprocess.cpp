#include "bitext/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <functional>

#include "bitext/error.hpp"
#include "bitext/unicode.hpp"

namespace bitext {

int count_commas(std::string_view text) {
  int count = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    std::uint32_t cp = utf8_decode(text, i);
    if (cp == 0x2C || cp == 0xFF0C || cp == 0x3001) ++count;
  }
  return count;
}

int count_words(std::string_view text) {
  int count = 0;
  bool in_word = false;
  for (char c : text) {
    bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!space && !in_word) ++count;
    in_word = !space;
  }
  return count;
}

namespace {

// n-grams as concatenated code points, one bucket per order
void add_ngrams(std::string_view text, int order,
                const std::function<void(int, const std::string&)>& sink) {
  std::vector<std::string> cps = utf8_split(text);
  for (int n = 1; n <= order; ++n) {
    if (cps.size() < static_cast<std::size_t>(n)) break;
    for (std::size_t i = 0; i + n <= cps.size(); ++i) {
      std::string gram;
      for (int j = 0; j < n; ++j) gram += cps[i + j];
      sink(n, gram);
    }
  }
}

}  // namespace

LidModel LidModel::train(const std::vector<std::pair<std::string, std::string>>& samples,
                         double smoothing) {
  LidModel model;
  model.smoothing_ = smoothing;
  for (const auto& [lang, _] : samples)
    if (std::find(model.languages_.begin(), model.languages_.end(), lang) ==
        model.languages_.end())
      model.languages_.push_back(lang);
  std::sort(model.languages_.begin(), model.languages_.end());
  if (model.languages_.size() < 2)
    throw ValidationError("LID training needs at least 2 languages, got " +
                          std::to_string(model.languages_.size()));

  model.profiles_.resize(model.languages_.size());
  std::array<std::unordered_map<std::string, bool>, kMaxOrder> vocab;
  for (const auto& [lang, text] : samples) {
    std::size_t li = static_cast<std::size_t>(
        std::lower_bound(model.languages_.begin(), model.languages_.end(), lang) -
        model.languages_.begin());
    Profile& prof = model.profiles_[li];
    add_ngrams(text, kMaxOrder, [&](int n, const std::string& gram) {
      ++prof.counts[n - 1][gram];
      ++prof.totals[n - 1];
      vocab[n - 1].emplace(gram, true);
    });
  }
  for (int n = 0; n < kMaxOrder; ++n) model.vocab_sizes_[n] = vocab[n].size();
  for (const auto& prof : model.profiles_) {
    bool empty = true;
    for (int n = 0; n < kMaxOrder; ++n) empty = empty && prof.totals[n] == 0;
    if (empty) throw ValidationError("LID language with empty profile");
  }
  return model;
}

std::pair<std::string, double> LidModel::classify(std::string_view text) const {
  if (text.empty()) return {"und", 0.0};
  std::vector<double> loglik(languages_.size(), 0.0);
  for (std::size_t li = 0; li < languages_.size(); ++li) {
    const Profile& prof = profiles_[li];
    std::array<double, kMaxOrder> denom;
    for (int n = 0; n < kMaxOrder; ++n)
      denom[n] = static_cast<double>(prof.totals[n]) +
                 smoothing_ * static_cast<double>(vocab_sizes_[n]);
    add_ngrams(text, kMaxOrder, [&](int n, const std::string& gram) {
      auto it = prof.counts[n - 1].find(gram);
      double num = smoothing_ + (it == prof.counts[n - 1].end()
                                     ? 0.0
                                     : static_cast<double>(it->second));
      loglik[li] += std::log(num / denom[n - 1]);
    });
  }
  // uniform prior; normalize via log-sum-exp
  double max_ll = *std::max_element(loglik.begin(), loglik.end());
  double z = 0.0;
  for (double ll : loglik) z += std::exp(ll - max_ll);
  std::size_t best = 0;
  for (std::size_t li = 1; li < loglik.size(); ++li)
    if (loglik[li] > loglik[best]) best = li;
  return {languages_[best], std::exp(loglik[best] - max_ll) / z};
}

namespace {

// ordered so the earliest failing stage is the minimum; keep sorts last
enum class Stage { commas = 0, length = 1, lid = 2, keep = 3 };

Stage first_failing_stage(const SentenceRecord& rec, const std::string& corpus_lang,
                          const PreprocessConfig& cfg, const LidModel* lid) {
  if (count_commas(rec.text) > cfg.max_commas) return Stage::commas;
  if (count_words(rec.text) >= cfg.max_words) return Stage::length;
  if (cfg.lid_enabled) {
    auto [lang, conf] = lid->classify(rec.text);
    if (lang != corpus_lang || conf < cfg.lid_min_confidence) return Stage::lid;
  }
  return Stage::keep;
}

void validate(const PreprocessConfig& cfg, const LidModel* lid) {
  if (cfg.max_commas < 0) throw ValidationError("max_commas must be >= 0");
  if (cfg.max_words < 1) throw ValidationError("max_words must be >= 1");
  if (cfg.lid_enabled && lid == nullptr)
    throw ValidationError("LID enabled but no model given");
}

}  // namespace

FilteredCorpus preprocess_corpus(const Corpus& corpus, const PreprocessConfig& cfg,
                                 const LidModel* lid) {
  validate(cfg, lid);
  FilteredCorpus out;
  out.corpus.lang = corpus.lang;
  out.report.input_count = corpus.size();
  for (const auto& rec : corpus.records) {
    Stage failed = first_failing_stage(rec, corpus.lang, cfg, lid);
    if (failed == Stage::commas) continue;
    ++out.report.after_commas;
    if (failed == Stage::length) continue;
    ++out.report.after_length;
    if (failed == Stage::lid) continue;
    ++out.report.after_lid;
    out.corpus.records.push_back(rec);
  }
  return out;
}

FilteredBitext preprocess_bitext(const Corpus& src, const Corpus& tgt,
                                 const PreprocessConfig& cfg, const LidModel* lid) {
  validate(cfg, lid);
  if (src.size() != tgt.size())
    throw ValidationError("bitext length mismatch: " + std::to_string(src.size()) + " vs " +
                          std::to_string(tgt.size()));
  FilteredBitext out;
  out.src.lang = src.lang;
  out.tgt.lang = tgt.lang;
  out.report.input_count = src.size();
  for (std::size_t i = 0; i < src.size(); ++i) {
    Stage s = first_failing_stage(src.records[i], src.lang, cfg, lid);
    Stage t = first_failing_stage(tgt.records[i], tgt.lang, cfg, lid);
    Stage failed = std::min(s, t);  // earliest stage either side fails
    if (failed == Stage::commas) continue;
    ++out.report.after_commas;
    if (failed == Stage::length) continue;
    ++out.report.after_length;
    if (failed == Stage::lid) continue;
    ++out.report.after_lid;
    out.src.records.push_back(src.records[i]);
    out.tgt.records.push_back(tgt.records[i]);
  }
  return out;
}

}  // namespace bitext
