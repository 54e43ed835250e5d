#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <cstring>

#include "bitext/corpus_io.hpp"
#include "bitext/error.hpp"
#include "bitext/rng.hpp"
#include "test_util.hpp"

using namespace bitext;

TEST_CASE("read_bucc_corpus parses id<TAB>text lines") {
  testutil::TempDir tmp("corpus");
  testutil::write_file(tmp.path("c.tsv"), "en-000001\tHello world.\n");
  Corpus c = read_bucc_corpus(tmp.path("c.tsv"), "en");
  REQUIRE(c.size() == 1);
  CHECK(c.records[0].id == "en-000001");
  CHECK(c.records[0].text == "Hello world.");
  CHECK(c.records[0].lang == "en");
  CHECK(c.lang == "en");
}

TEST_CASE("read_bucc_corpus empty file") {
  testutil::TempDir tmp("corpus");
  testutil::write_file(tmp.path("e.tsv"), "");
  Corpus c = read_bucc_corpus(tmp.path("e.tsv"), "en");
  CHECK(c.size() == 0);
}

TEST_CASE("read_bucc_corpus skips empty lines, keeps order") {
  testutil::TempDir tmp("corpus");
  testutil::write_file(tmp.path("c.tsv"), "a\tone\n\nb\ttwo\n");
  Corpus c = read_bucc_corpus(tmp.path("c.tsv"), "en");
  REQUIRE(c.size() == 2);
  CHECK(c.records[0].id == "a");
  CHECK(c.records[1].id == "b");
}

TEST_CASE("read_bucc_corpus malformed line reports line number") {
  testutil::TempDir tmp("corpus");
  testutil::write_file(tmp.path("bad.tsv"), "a\tok\nno tab here\n");
  try {
    read_bucc_corpus(tmp.path("bad.tsv"), "en");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }
}

TEST_CASE("read_bucc_corpus rejects duplicate ids") {
  testutil::TempDir tmp("corpus");
  testutil::write_file(tmp.path("dup.tsv"), "a\tone\na\ttwo\n");
  CHECK_THROWS_AS(read_bucc_corpus(tmp.path("dup.tsv"), "en"), ValidationError);
}

TEST_CASE("read_bucc_corpus missing file") {
  CHECK_THROWS_AS(read_bucc_corpus("/nonexistent/x.tsv", "en"), IoError);
}

TEST_CASE("corpus write/read round-trip with escaped text") {
  testutil::TempDir tmp("corpus");
  Corpus c;
  c.lang = "en";
  c.records.push_back({"a", "en", "plain"});
  c.records.push_back({"b", "en", "with\ttab and\nnewline and \\ backslash"});
  write_corpus(c, tmp.path("rt.tsv"));
  Corpus back = read_bucc_corpus(tmp.path("rt.tsv"), "en");
  REQUIRE(back.size() == 2);
  CHECK(back.records[0].text == c.records[0].text);
  CHECK(back.records[1].text == c.records[1].text);
  CHECK(back.records[1].id == "b");
}

TEST_CASE("streaming reader yields the same records as the full loader") {
  testutil::TempDir tmp("corpus");
  testutil::write_file(tmp.path("s.tsv"), "a\tone\nb\ttwo\nc\tthree\n");
  Corpus full = read_bucc_corpus(tmp.path("s.tsv"), "xx");
  CorpusReader reader(tmp.path("s.tsv"), "xx");
  SentenceRecord rec;
  std::size_t i = 0;
  while (reader.next(rec)) {
    REQUIRE(i < full.size());
    CHECK(rec.id == full.records[i].id);
    CHECK(rec.text == full.records[i].text);
    ++i;
  }
  CHECK(i == full.size());
}

TEST_CASE("read_gold basics and duplicate collapsing") {
  testutil::TempDir tmp("gold");
  testutil::write_file(tmp.path("g.tsv"), "a\tb\n");
  GoldAlignment g = read_gold(tmp.path("g.tsv"));
  CHECK(g.size() == 1);
  CHECK(g.pairs.count({"a", "b"}) == 1);
  CHECK(g.duplicates_dropped == 0);

  testutil::write_file(tmp.path("g2.tsv"), "a\tb\na\tb\n");
  GoldAlignment g2 = read_gold(tmp.path("g2.tsv"));
  CHECK(g2.size() == 1);
  CHECK(g2.duplicates_dropped == 1);

  testutil::write_file(tmp.path("bad.tsv"), "only-one-field\n");
  CHECK_THROWS_AS(read_gold(tmp.path("bad.tsv")), ParseError);
}

TEST_CASE("gold write/read round-trip") {
  testutil::TempDir tmp("gold");
  GoldAlignment g;
  g.pairs = {{"a", "b"}, {"c", "d"}};
  write_gold(g, tmp.path("g.tsv"));
  GoldAlignment back = read_gold(tmp.path("g.tsv"));
  CHECK(back.pairs == g.pairs);
}

static EmbeddingMatrix random_unit_matrix(int n, int d, std::uint64_t seed) {
  Rng rng(seed);
  EmbeddingMatrix m;
  m.rows.resize(n, d);
  for (int i = 0; i < n; ++i) {
    double norm2 = 0.0;
    for (int j = 0; j < d; ++j) {
      double v = rng.gaussian();
      m.rows(i, j) = static_cast<float>(v);
      norm2 += v * v;
    }
    m.rows.row(i) /= static_cast<float>(std::sqrt(norm2));
    m.ids.push_back("id-" + std::to_string(i));
  }
  return m;
}

TEST_CASE("embeddings round-trip bit-identical") {
  testutil::TempDir tmp("emb");
  EmbeddingMatrix m = random_unit_matrix(7, 16, 1);
  write_embeddings(m, tmp.path("m.bmem"));
  EmbeddingMatrix back = read_embeddings(tmp.path("m.bmem"));
  REQUIRE(back.size() == m.size());
  REQUIRE(back.dim() == m.dim());
  CHECK(back.ids == m.ids);
  for (Eigen::Index i = 0; i < m.size(); ++i)
    for (Eigen::Index j = 0; j < m.dim(); ++j)
      CHECK(back.rows(i, j) == m.rows(i, j));
}

TEST_CASE("identical input vectors load as identical rows with unit norm") {
  testutil::TempDir tmp("emb");
  EmbeddingMatrix m;
  m.rows.resize(2, 4);
  m.rows << 0.5f, 0.5f, 0.5f, 0.5f, 0.5f, 0.5f, 0.5f, 0.5f;
  m.ids = {"a", "b"};
  write_embeddings(m, tmp.path("m.bmem"));
  EmbeddingMatrix back = read_embeddings(tmp.path("m.bmem"));
  CHECK(back.rows.row(0) == back.rows.row(1));
  CHECK(std::abs(back.rows.row(0).norm() - 1.0f) <= 1e-6f);
}

TEST_CASE("empty matrix writes a 16-byte header and empty id file") {
  testutil::TempDir tmp("emb");
  EmbeddingMatrix m;
  m.rows.resize(0, 1024);
  write_embeddings(m, tmp.path("empty.bmem"));
  CHECK(testutil::read_file(tmp.path("empty.bmem")).size() == 16);
  CHECK(testutil::read_file(tmp.path("empty.bmem") + ".ids").empty());
  EmbeddingMatrix back = read_embeddings(tmp.path("empty.bmem"));
  CHECK(back.size() == 0);
  CHECK(back.dim() == 1024);
}

TEST_CASE("d=0 is rejected") {
  testutil::TempDir tmp("emb");
  EmbeddingMatrix m;
  m.rows.resize(2, 0);
  m.ids = {"a", "b"};
  CHECK_THROWS_AS(write_embeddings(m, tmp.path("z.bmem")), ValidationError);
}

TEST_CASE("truncated embedding file names expected vs actual byte count") {
  testutil::TempDir tmp("emb");
  EmbeddingMatrix m = random_unit_matrix(3, 8, 2);
  write_embeddings(m, tmp.path("t.bmem"));
  std::string bytes = testutil::read_file(tmp.path("t.bmem"));
  testutil::write_file(tmp.path("t.bmem"), bytes.substr(0, bytes.size() - 5));
  try {
    read_embeddings(tmp.path("t.bmem"));
    FAIL("expected IoError");
  } catch (const IoError& e) {
    std::string msg = e.what();
    CHECK(msg.find(std::to_string(16 + 3 * 8 * 4)) != std::string::npos);
    CHECK(msg.find(std::to_string(16 + 3 * 8 * 4 - 5)) != std::string::npos);
  }
}

TEST_CASE("bad magic and id-count mismatch are rejected") {
  testutil::TempDir tmp("emb");
  EmbeddingMatrix m = random_unit_matrix(2, 4, 3);
  write_embeddings(m, tmp.path("m.bmem"));

  std::string bytes = testutil::read_file(tmp.path("m.bmem"));
  bytes[0] = 'X';
  testutil::write_file(tmp.path("bad.bmem"), bytes);
  testutil::write_file(tmp.path("bad.bmem.ids"), "a\nb\n");
  CHECK_THROWS_AS(read_embeddings(tmp.path("bad.bmem")), ParseError);

  testutil::write_file(tmp.path("m.bmem") + ".ids", "a\n");  // 1 id for 2 rows
  CHECK_THROWS_AS(read_embeddings(tmp.path("m.bmem")), ValidationError);
}

TEST_CASE("rows off unit norm are re-normalized on load, zero rows rejected") {
  testutil::TempDir tmp("emb");
  // bypass write-side validation by patching bytes of a valid file
  EmbeddingMatrix m = random_unit_matrix(2, 4, 4);
  write_embeddings(m, tmp.path("m.bmem"));
  std::string bytes = testutil::read_file(tmp.path("m.bmem"));
  float two = 2.0f, zero = 0.0f;
  for (int j = 0; j < 4; ++j) {
    float v;
    std::memcpy(&v, bytes.data() + 16 + 4 * j, 4);
    v *= two;
    std::memcpy(bytes.data() + 16 + 4 * j, &v, 4);
  }
  testutil::write_file(tmp.path("m.bmem"), bytes);
  EmbeddingMatrix back = read_embeddings(tmp.path("m.bmem"));
  CHECK(std::abs(back.rows.row(0).norm() - 1.0f) <= 1e-4f);

  for (int j = 0; j < 4; ++j)
    std::memcpy(bytes.data() + 16 + 4 * j, &zero, 4);
  testutil::write_file(tmp.path("m.bmem"), bytes);
  CHECK_THROWS_AS(read_embeddings(tmp.path("m.bmem")), ValidationError);
}

TEST_CASE("write_pairs prints 6 decimals sorted by distance then ids") {
  testutil::TempDir tmp("pairs");
  write_pairs({{"a", "b", 0.5f}}, tmp.path("one.tsv"));
  CHECK(testutil::read_file(tmp.path("one.tsv")) == "0.500000\ta\tb\n");

  write_pairs({{"c", "d", 0.3f}, {"a", "b", 0.1f}}, tmp.path("two.tsv"));
  CHECK(testutil::read_file(tmp.path("two.tsv")) == "0.100000\ta\tb\n0.300000\tc\td\n");

  write_pairs({}, tmp.path("empty.tsv"));
  CHECK(testutil::read_file(tmp.path("empty.tsv")).empty());
}

TEST_CASE("pair file read/write is idempotent after first serialization") {
  testutil::TempDir tmp("pairs");
  Rng rng(9);
  std::vector<CandidatePair> pairs;
  for (int i = 0; i < 50; ++i)
    pairs.push_back({"s" + std::to_string(i), "t" + std::to_string(static_cast<int>(rng.below(10))),
                     static_cast<float>(rng.uniform(0.0, 2.0))});
  write_pairs(pairs, tmp.path("p.tsv"));
  std::vector<CandidatePair> back = read_pairs(tmp.path("p.tsv"));
  write_pairs(back, tmp.path("p2.tsv"));
  CHECK(testutil::read_file(tmp.path("p.tsv")) == testutil::read_file(tmp.path("p2.tsv")));
  REQUIRE(back.size() == pairs.size());
}
