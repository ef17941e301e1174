#include "doctest.h"

#include <sstream>

#include "polexp/cli.hpp"

using namespace polexp;

namespace {

const std::string kCorpus = POLEXP_CORPUS_DIR;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_job(const JobConfig& c) {
  std::ostringstream out, err;
  const int code = run(c, out, err);
  return {code, out.str(), err.str()};
}

bool has(const std::string& text, const std::string& needle) { return text.find(needle) != std::string::npos; }

}  // namespace

TEST_CASE("abelian command") {
  JobConfig c;
  c.command = "abelian";
  c.matrix = "[[1,1],[0,1]]";
  c.vector = "[0,1]";
  const auto r = run_job(c);
  CHECK(r.code == kExitOk);
  CHECK(has(r.out, "(d, λ) = (1, 1)"));
  c.matrix = "[[2,0],[0,1]]";
  CHECK(run_job(c).code == kExitValidation);
}

TEST_CASE("class command") {
  JobConfig c;
  c.command = "class";
  c.aut_path = kCorpus + "/fib.aut";
  c.word = "a";
  c.n_max = 25;
  const auto r = run_job(c);
  CHECK(r.code == kExitOk);
  CHECK(has(r.out, "(0, 1.618)"));
  CHECK(has(r.out, "25,196418"));

  c.format = OutputFormat::Csv;
  const auto csv = run_job(c);
  CHECK(csv.out.rfind("n,length\n0,1\n1,2\n", 0) == 0);
  CHECK_FALSE(has(csv.out, " \n"));
  std::size_t lines = 0;
  for (char ch : csv.out) lines += ch == '\n';
  CHECK(lines == 27);
}

TEST_CASE("sum command") {
  JobConfig c;
  c.command = "sum";
  c.d = 0;
  c.l1 = 1;
  c.l2 = 1;
  CHECK(has(run_job(c).out, "(1, 1)"));
  c.d = 1;
  c.l1 = 2;
  c.l2 = 2;
  c.oracle = true;
  const auto r = run_job(c);
  CHECK(r.code == kExitOk);
  CHECK(has(r.out, "(2, 2)"));
  CHECK(has(r.out, "agrees"));
}

TEST_CASE("exit codes") {
  JobConfig c;
  c.command = "element";
  c.aut_path = kCorpus + "/fib.aut";
  c.word = "a";
  c.n_max = 40;
  c.budget = 1000;
  auto r = run_job(c);
  CHECK(r.code == kExitBudget);
  CHECK(has(r.err, "LengthBudgetExceeded"));

  c.budget = 0;
  c.word = "q";
  CHECK(run_job(c).code == kExitValidation);
  c.word = "a";
  c.n_max = 11;
  CHECK(run_job(c).code == kExitValidation);

  c.n_max = 20;
  c.aut_path = kCorpus + "/missing.aut";
  r = run_job(c);
  CHECK(r.code == kExitValidation);

  c.command = "bogus";
  CHECK(run_job(c).code == kExitValidation);
}

TEST_CASE("json reports") {
  JobConfig c;
  c.command = "ct";
  c.ct_path = kCorpus + "/neg_tower.ct";
  c.oracle = true;
  c.format = OutputFormat::Json;
  const auto r = run_job(c);
  CHECK(r.code == kExitOk);
  CHECK(r.out.rfind("{\n  \"command\": \"ct\"", 0) == 0);
  CHECK(has(r.out, "\"exit_code\": 0"));
  CHECK(run_job(c).out == r.out);

  c.command = "element";
  c.aut_path = kCorpus + "/fib.aut";
  c.word = "a";
  c.n_max = 40;
  c.budget = 1000;
  const auto failed = run_job(c);
  CHECK(has(failed.out, "\"error\""));
  CHECK(has(failed.out, "\"exit_code\": 2"));
}

TEST_CASE("palangre and spectrum commands") {
  JobConfig c;
  c.command = "palangre";
  c.aut_path = kCorpus + "/fat_vertex.aut";
  c.word = "a1";
  c.h = "a2";
  c.k = 2;
  c.n_max = 12;
  CHECK(run_job(c).code == kExitOk);

  c.command = "spectrum";
  c.aut_path = kCorpus + "/bridson_groves.aut";
  c.ct_path = kCorpus + "/bridson_groves.ct";
  c.max_length = 3;
  c.n_max = 20;
  const auto r = run_job(c);
  CHECK(r.code == kExitOk);
  CHECK(has(r.out, "contained: yes"));
}
