// Readers and writers for every on-disk format: corpus TSV, gold alignment
// TSV, candidate-pair TSV and the BMEM binary embedding format.
#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "bitext/types.hpp"

namespace bitext {

// Streaming `id<TAB>text` reader; holds one record at a time. Does not
// check id uniqueness (that needs O(n) state; read_bucc_corpus does it).
class CorpusReader {
 public:
  CorpusReader(const std::string& path, std::string lang);

  // Returns false at end of file. Skips empty lines.
  bool next(SentenceRecord& out);

  std::size_t line() const { return line_; }

 private:
  std::string path_;
  std::string lang_;
  std::ifstream in_;
  std::size_t line_ = 0;
};

Corpus read_bucc_corpus(const std::string& path, const std::string& lang);
void write_corpus(const Corpus& corpus, const std::string& path);

GoldAlignment read_gold(const std::string& path);
void write_gold(const GoldAlignment& gold, const std::string& path);

// BMEM: "BMEM" magic, u32 version=1, u32 n, u32 d (little-endian), then
// n*d little-endian float32 row-major. Ids live in <path>.ids, one per line.
// Rows whose L2 norm deviates from 1 by more than 1e-4 are re-normalized on
// load; zero rows are rejected.
EmbeddingMatrix read_embeddings(const std::string& path);
void write_embeddings(const EmbeddingMatrix& m, const std::string& path);

// Pair TSV `distance<TAB>src_id<TAB>tgt_id`, distance printed with 6
// decimals, rows sorted ascending by (distance, src_id, tgt_id).
std::vector<CandidatePair> read_pairs(const std::string& path);
void write_pairs(std::vector<CandidatePair> pairs, const std::string& path);

// Tab, newline, carriage return and backslash are escaped so records
// round-trip through the line-oriented formats.
std::string escape_text(std::string_view text);
std::string unescape_text(std::string_view text);

// Plain text file, one line per entry (LID seed corpora).
std::vector<std::string> read_lines(const std::string& path);

}  // namespace bitext
