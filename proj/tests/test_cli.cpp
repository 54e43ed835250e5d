// End-to-end tests through the installed binary (path in $BITEXT_BIN).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <string>
#include <sys/wait.h>

#include "test_util.hpp"

namespace {

std::string cli() {
  const char* bin = std::getenv("BITEXT_BIN");
  REQUIRE_MESSAGE(bin != nullptr, "BITEXT_BIN must point at the bitext binary");
  return bin;
}

struct RunResult {
  int exit_code;
  std::string output;  // stdout + stderr combined
};

RunResult run(const std::string& args) {
  std::string cmd = cli() + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string output;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) output.append(buf, n);
  int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, output};
}

}  // namespace

TEST_CASE("eval prints the worked 50/50/50 example") {
  testutil::TempDir tmp("cli_eval");
  testutil::write_file(tmp.path("pairs.tsv"), "0.100000\ta\tb\n0.200000\tc\td\n");
  testutil::write_file(tmp.path("gold.tsv"), "a\tb\ne\tf\n");
  RunResult r = run("eval " + tmp.path("pairs.tsv") + " " + tmp.path("gold.tsv"));
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("50.0000\t50.0000\t50.0000") != std::string::npos);
}

TEST_CASE("synth/mine/eval with a fixed seed is reproducible") {
  testutil::TempDir tmp("cli_repro");
  std::string synth_flags =
      " --n-src 150 --n-tgt 150 --n-planted 75 --dim 32 --noise-sigma 0.08 --seed 11 -o ";
  for (const char* d : {"a", "b"}) {
    CHECK(run("synth" + synth_flags + tmp.path(d)).exit_code == 0);
    CHECK(run("mine " + tmp.path(d) + "/src.tsv " + tmp.path(d) + "/tgt.tsv " + tmp.path(d) +
              "/src.bmem " + tmp.path(d) + "/tgt.bmem --k 5 --threshold 0.8 -o " +
              tmp.path(d) + "/pairs.tsv")
              .exit_code == 0);
  }
  CHECK(testutil::read_file(tmp.path("a") + "/src.bmem") ==
        testutil::read_file(tmp.path("b") + "/src.bmem"));
  CHECK(testutil::read_file(tmp.path("a") + "/pairs.tsv") ==
        testutil::read_file(tmp.path("b") + "/pairs.tsv"));
  RunResult ra = run("eval " + tmp.path("a") + "/pairs.tsv " + tmp.path("a") + "/gold.tsv");
  RunResult rb = run("eval " + tmp.path("b") + "/pairs.tsv " + tmp.path("b") + "/gold.tsv");
  CHECK(ra.output == rb.output);
}

TEST_CASE("mine defaults to k=20 and threshold 0.55") {
  testutil::TempDir tmp("cli_defaults");
  CHECK(run("synth --n-src 100 --n-tgt 100 --n-planted 50 --dim 32 --seed 5 -o " +
            tmp.path("s"))
            .exit_code == 0);
  std::string inputs = tmp.path("s") + "/src.tsv " + tmp.path("s") + "/tgt.tsv " +
                       tmp.path("s") + "/src.bmem " + tmp.path("s") + "/tgt.bmem";
  CHECK(run("mine " + inputs + " -o " + tmp.path("default.tsv")).exit_code == 0);
  CHECK(run("mine " + inputs + " --k 20 --threshold 0.55 -o " + tmp.path("explicit.tsv"))
            .exit_code == 0);
  CHECK(testutil::read_file(tmp.path("default.tsv")) ==
        testutil::read_file(tmp.path("explicit.tsv")));
}

TEST_CASE("thread count changes runtime only, not output") {
  testutil::TempDir tmp("cli_threads");
  CHECK(run("synth --n-src 200 --n-tgt 200 --n-planted 100 --dim 64 --seed 9 -o " +
            tmp.path("s"))
            .exit_code == 0);
  std::string inputs = tmp.path("s") + "/src.tsv " + tmp.path("s") + "/tgt.tsv " +
                       tmp.path("s") + "/src.bmem " + tmp.path("s") + "/tgt.bmem";
  CHECK(run("--threads 1 mine " + inputs + " --threshold 0.9 -o " + tmp.path("t1.tsv"))
            .exit_code == 0);
  CHECK(run("--threads 8 mine " + inputs + " --threshold 0.9 -o " + tmp.path("t8.tsv"))
            .exit_code == 0);
  CHECK(testutil::read_file(tmp.path("t1.tsv")) == testutil::read_file(tmp.path("t8.tsv")));
}

TEST_CASE("full text pipeline: preprocess, bpe, embed, index, search") {
  testutil::TempDir tmp("cli_text");
  std::string en_seed = std::string(BITEXT_TEST_DATA) + "/lid_seed_en.txt";
  std::string de_seed = std::string(BITEXT_TEST_DATA) + "/lid_seed_de.txt";

  // small corpus: 3 clean English lines, 1 comma spam, 1 German line
  testutil::write_file(tmp.path("c.tsv"),
                       "s1\tThe library will remain open late during the examination period.\n"
                       "s2\tVolunteers cleaned the beach and collected forty bags of litter.\n"
                       "s3\tone, two, three, four, five, six\n"
                       "s4\tDer Zug zur Küste fährt stündlich vom Hauptbahnhof ab.\n"
                       "s5\tThe council plans to plant two hundred trees along the road.\n");
  RunResult pre = run("preprocess " + tmp.path("c.tsv") + " --lang en --lid-train en=" +
                      en_seed + " --lid-train de=" + de_seed + " -o " + tmp.path("clean.tsv") +
                      " --report " + tmp.path("report.tsv"));
  CHECK(pre.exit_code == 0);
  CHECK(testutil::read_file(tmp.path("report.tsv")).find("5\t4\t4\t3") != std::string::npos);
  std::string cleaned = testutil::read_file(tmp.path("clean.tsv"));
  CHECK(cleaned.find("s1\t") != std::string::npos);
  CHECK(cleaned.find("s3\t") == std::string::npos);
  CHECK(cleaned.find("s4\t") == std::string::npos);

  CHECK(run("bpe-learn " + tmp.path("clean.tsv") + " --merges 50 -o " + tmp.path("m.bpe"))
            .exit_code == 0);
  RunResult applied = run("bpe-apply " + tmp.path("m.bpe") + " " + tmp.path("clean.tsv") +
                          " -o " + tmp.path("tok.tsv"));
  CHECK(applied.exit_code == 0);
  CHECK(testutil::read_file(tmp.path("tok.tsv")).find("</w>") != std::string::npos);

  CHECK(run("embed " + tmp.path("clean.tsv") + " --bpe " + tmp.path("m.bpe") +
            " --dim 64 --seed 3 -o " + tmp.path("c.bmem"))
            .exit_code == 0);
  CHECK(run("index-build " + tmp.path("c.bmem") + " --nlist 2 --seed 3 -o " +
            tmp.path("c.bivf"))
            .exit_code == 0);
  RunResult search = run("index-search " + tmp.path("c.bivf") + " " + tmp.path("c.bmem") +
                         " --k 1 --nprobe 2 -o " + tmp.path("hits.tsv"));
  CHECK(search.exit_code == 0);
  // every sentence finds itself at distance 0
  std::string hits = testutil::read_file(tmp.path("hits.tsv"));
  CHECK(hits.find("0.000000\ts1\ts1") != std::string::npos);
}

TEST_CASE("filter and sweep over a scored bitext") {
  testutil::TempDir tmp("cli_filter");
  CHECK(run("synth --n-src 80 --n-tgt 80 --n-planted 80 --dim 32 --noise-sigma 0.3 --seed 13 -o " +
            tmp.path("s"))
            .exit_code == 0);
  // planted pairs are row-aligned only after sorting both sides by id
  RunResult f = run("filter " + tmp.path("s") + "/src.tsv " + tmp.path("s") + "/tgt.tsv " +
                    tmp.path("s") + "/src.bmem " + tmp.path("s") + "/tgt.bmem" +
                    " --threshold 2.0 -o " + tmp.path("scored.tsv"));
  CHECK(f.exit_code == 0);
  RunResult sweep = run("sweep " + tmp.path("scored.tsv") + " --from 0.0 --to 2.0 --step 0.5");
  CHECK(sweep.exit_code == 0);
  CHECK(sweep.output.find("2.000000\t80") != std::string::npos);
}

TEST_CASE("error reporting is single-line and categorized") {
  testutil::TempDir tmp("cli_err");
  RunResult unknown = run("frobnicate");
  CHECK(unknown.exit_code == 2);
  CHECK(unknown.output.find("error: usage:") != std::string::npos);

  testutil::write_file(tmp.path("bad.tsv"), "line without any tab\n");
  RunResult parse = run("stats lengths " + tmp.path("bad.tsv"));
  CHECK(parse.exit_code == 1);
  CHECK(parse.output.find("error: parse:") != std::string::npos);

  RunResult missing = run("eval /nonexistent/p.tsv /nonexistent/g.tsv");
  CHECK(missing.exit_code == 1);
  CHECK(missing.output.find("error: io:") != std::string::npos);
}

TEST_CASE("tune recovers the separating threshold through the CLI") {
  testutil::TempDir tmp("cli_tune");
  CHECK(run("synth --n-src 120 --n-tgt 120 --n-planted 60 --dim 64 --noise-sigma 0.1 --seed 21 -o " +
            tmp.path("s"))
            .exit_code == 0);
  CHECK(run("mine " + tmp.path("s") + "/src.tsv " + tmp.path("s") + "/tgt.tsv " + tmp.path("s") +
            "/src.bmem " + tmp.path("s") + "/tgt.bmem --k 1 --threshold 2.0 -o " +
            tmp.path("cand.tsv"))
            .exit_code == 0);
  RunResult tuned = run("tune " + tmp.path("cand.tsv") + " " + tmp.path("s") + "/gold.tsv");
  CHECK(tuned.exit_code == 0);
  CHECK(tuned.output.find("100.0000\t100.0000\t100.0000") != std::string::npos);
}
