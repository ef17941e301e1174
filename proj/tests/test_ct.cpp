#include "doctest.h"

#include <cmath>
#include <random>

#include "polexp/abelian.hpp"
#include "polexp/ct.hpp"
#include "polexp/error.hpp"
#include "polexp/fit.hpp"

using namespace polexp;

namespace {

const double kGolden = (1 + std::sqrt(5.0)) / 2;
const double kGolden2 = (3 + std::sqrt(5.0)) / 2;
const std::string kCorpus = POLEXP_CORPUS_DIR;
const std::vector<std::string> kCorpusNames = {"fib", "neg_tower", "bridson_groves", "fat_vertex", "exceptional",
                                               "zero_stratum"};

CtMap corpus(const std::string& name) { return load_ct(kCorpus + "/" + name + ".ct"); }

bool close(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max(a, b); }

const char* kTwoStrata = R"(
vertex v
edge a : v -> v height 1
edge b : v -> v height 1
edge c : v -> v height 2
edge d : v -> v height 2
edge e : v -> v height 2
image a -> a · b
image b -> a
image c -> d
image d -> e
image e -> c · d · a
circuit c = c
)";

CtMap turn_map(const std::string& matrix, const std::string& head) {
  return parse_ct("vertex w fat g1\nmatrix g1 = " + matrix +
                  "\nedge a : w -> w height 1\nimage a -> " + head + " a\ninp fa = a\n");
}

}  // namespace

TEST_CASE("tightening cancels degenerate turns only") {
  const CtMap ct = corpus("fat_vertex");
  CHECK(tighten(parse_path("e e^-1", ct), ct.graph).empty());
  const GraphPath tight = parse_path("e a [1,2] e", ct);
  CHECK(tighten(tight, ct.graph) == tight);
  const GraphPath turn = parse_path("e [0,1] e^-1", ct);
  CHECK(tighten(turn, ct.graph) == turn);
  CHECK(tighten(tighten(parse_path("a e e^-1 a^-1 e", ct), ct.graph), ct.graph) ==
        tighten(parse_path("a e e^-1 a^-1 e", ct), ct.graph));
  CHECK(tighten(parse_path("a e e^-1 a^-1 e", ct), ct.graph).size() == 1);
  CHECK_THROWS_AS(parse_path("a z", corpus("zero_stratum")), Error);
}

TEST_CASE("path and circuit lengths") {
  const CtMap ct = corpus("fat_vertex");
  CHECK(path_length(parse_path("e", ct)) == 1);
  CHECK(path_length(parse_path("[4,4] e [2,-1] a [5,5]", ct)) == 5);
  CHECK(path_length(parse_path("e [2,-1] a", ct)) == 5);
  CHECK(circuit_length(tighten_circuit(parse_path("e [2,-1] a [1,0]", ct), ct.graph)) == 6);
  // The head element of a closed path moves to the wrap turn.
  CHECK(circuit_length(tighten_circuit(parse_path("[1,0] e [2,-1] a", ct), ct.graph)) == 6);
  CHECK(format_path(parse_path("[1,0] e [2,-1] a^-1", ct), ct.graph) == "[1,0] e [2,-1] a^-1");
}

TEST_CASE("f_sharp on templates") {
  const CtMap tower = corpus("neg_tower");
  const GraphPath a = parse_path("a", tower);
  CHECK(equivalent(f_sharp(tower, a), a));

  const CtMap ct = corpus("exceptional");
  for (int p = -3; p <= 4; ++p) {
    std::string text = "e";
    for (int i = 0; i < std::abs(p); ++i) text += p > 0 ? " a" : " a^-1";
    text += " e2^-1";
    std::string shifted = "e";
    for (int i = 0; i < std::abs(p - 1); ++i) shifted += p - 1 > 0 ? " a" : " a^-1";
    shifted += " e2^-1";
    CHECK(equivalent(f_sharp(ct, parse_path(text, ct)), parse_path(shifted, ct)));
  }
}

TEST_CASE("f_sharp is functorial on random circuits") {
  std::mt19937 rng(7);
  for (const auto& name : {"fib", "fat_vertex", "neg_tower"}) {
    const CtMap ct = corpus(name);
    const CtMap square = ct_power(ct, 2);
    const auto& edges = ct.graph.edges;
    for (int trial = 0; trial < 60; ++trial) {
      GraphPath c{0, ct.graph.unit(0), {}};
      const int len = 1 + static_cast<int>(rng() % 6);
      for (int i = 0; i < len; ++i) {
        const int e = 1 + static_cast<int>(rng() % edges.size());
        IntVector x = ct.graph.unit(0);
        for (auto& v : x) v = static_cast<long>(rng() % 5) - 2;
        c.steps.push_back({rng() % 2 ? e : -e, x});
      }
      c = tighten_circuit(c, ct.graph);
      const GraphPath twice = f_sharp_circuit(ct, f_sharp_circuit(ct, c));
      CHECK(twice == f_sharp_circuit(square, c));
    }
  }
}

TEST_CASE("strata classification") {
  const auto fib = classify_strata(corpus("fib"));
  REQUIRE(fib.size() == 1);
  CHECK(fib[0].type == StratumType::EG);
  CHECK(std::abs(fib[0].rate.lambda - kGolden) < 1e-12);
  REQUIRE(fib[0].rate.poly);
  CHECK(*fib[0].rate.poly == IntPolynomial({Integer(-1), Integer(-1), Integer(1)}));

  const auto bg = classify_strata(corpus("bridson_groves"));
  CHECK(bg[0].type == StratumType::NEG);
  CHECK(bg[0].fixed);
  CHECK(bg[1].type == StratumType::NEG);
  CHECK(bg[1].linear);

  const auto tower = classify_strata(corpus("neg_tower"));
  CHECK(tower[1].linear);
  CHECK_FALSE(tower[2].linear);

  const auto zero = classify_strata(corpus("zero_stratum"));
  CHECK(zero[1].type == StratumType::Zero);

  CHECK_THROWS_AS(classify_strata(parse_ct("vertex v\nedge a : v -> v height 1\nedge b : v -> v height 1\n"
                                           "image a -> b\nimage b -> a\n")),
                  Error);
}

TEST_CASE("vertex stabilisation power") {
  CtMap ct;
  ct.vertex_image = {0, 1, 2};
  CHECK(vertex_stabilization_power(ct) == 1);
  ct.vertex_image = {1, 0, 2};
  CHECK(vertex_stabilization_power(ct) == 2);
  ct.vertex_image = {1, 2, 3, 3};
  CHECK(vertex_stabilization_power(ct) == 3);
  ct.vertex_image = {1, 2, 0, 4, 3};
  CHECK(vertex_stabilization_power(ct) == 6);
}

TEST_CASE("fat turn growth") {
  {
    const CtMap ct = turn_map("[[1,0],[0,1]]", "");
    const TermInstance fa = term_image(ct, find_splitting(ct, parse_path("a", ct), false)->terms[0]).terms[0];
    CHECK(fa.kind == TermKind::Inp);
    const GrowthType g = fat_turn_growth(ct, fa, IntVector{Integer(3), Integer(-2)}, fa, 0);
    CHECK(g.d == 0);
    CHECK(g.lambda == doctest::Approx(1));
  }
  {
    const CtMap ct = turn_map("[[1,0],[0,1]]", "[1,0]");
    const TermInstance fa = find_splitting(ct, parse_path("a", ct), false)->terms[0];
    const GrowthType g = fat_turn_growth(ct, fa, IntVector{Integer(0), Integer(0)}, fa, 0);
    CHECK(g.d == 1);
    CHECK(g.lambda == doctest::Approx(1));
  }
  {
    const CtMap ct = turn_map("[[2,1],[1,1]]", "[1,0]");
    const TermInstance fa = find_splitting(ct, parse_path("a", ct), false)->terms[0];
    const GrowthType g = fat_turn_growth(ct, fa, IntVector{Integer(0), Integer(0)}, fa, 0);
    CHECK(g.d == 0);
    CHECK(std::abs(g.lambda - kGolden2) < 1e-9);
  }
}

TEST_CASE("assigned growth types") {
  const CtMap fib = corpus("fib");
  const auto t = assign_growth_types(fib);
  for (const auto& e : t.edges) {
    REQUIRE(e);
    CHECK(e->d == 0);
    CHECK(std::abs(e->lambda - kGolden) < 1e-9);
  }

  const auto tower = assign_growth_types(corpus("neg_tower"));
  CHECK(tower.edges[0]->d == 0);
  CHECK(tower.edges[1]->d == 1);
  CHECK(tower.edges[2]->d == 2);
  for (const auto& e : tower.edges) CHECK(e->lambda == 1);

  const CtMap two = parse_ct(kTwoStrata);
  const auto strata = classify_strata(two);
  CHECK(strata[1].rate.lambda == doctest::Approx(1.3247179572));
  const auto tt = assign_growth_types(two);
  for (int e : {3, 4, 5}) {
    CHECK(tt.edges[static_cast<std::size_t>(e - 1)]->d == 0);
    CHECK(std::abs(tt.edges[static_cast<std::size_t>(e - 1)]->lambda - kGolden) < 1e-9);
  }
  const auto fit = fit_growth(circuit_length_sequence(two, two.circuits[0].path, 25));
  CHECK(fit.d_hat == 0);
  CHECK(close(fit.lambda_hat, kGolden, 0.01));

  const auto zero = assign_growth_types(corpus("zero_stratum"));
  CHECK_FALSE(zero.edges[1]);
  CHECK(zero.connecting.at(0).d == 0);
  CHECK(zero.edges[2]->d == 1);
}

TEST_CASE("circuit growth examples") {
  const CtMap tower = corpus("neg_tower");
  const auto table = assign_growth_types(tower);
  const GrowthType inp = circuit_growth(tower, table, parse_path("a", tower));
  CHECK(inp.d == 0);
  CHECK(inp.lambda == 1);

  const CtMap fib = corpus("fib");
  const GrowthType loop = circuit_growth(fib, assign_growth_types(fib), parse_path("a a b", fib));
  CHECK(std::abs(loop.lambda - kGolden) < 1e-9);

  const CtMap fat = corpus("fat_vertex");
  const auto ft = assign_growth_types(fat);
  CHECK(ft.edges[0]->d == 1);
  const GrowthType cross = circuit_growth(fat, ft, parse_path("e [1,0]", fat));
  CHECK(cross.d == 0);
  CHECK(std::abs(cross.lambda - kGolden2) < 1e-9);

  // The commutator is periodic under a -> ab, b -> a and never splits.
  CHECK_THROWS_AS(circuit_growth(fib, assign_growth_types(fib), parse_path("a b a^-1 b^-1", fib)), Error);
}

TEST_CASE("corpus predictions match the iteration oracle") {
  for (const auto& name : kCorpusNames) {
    const CtMap ct = corpus(name);
    const auto table = assign_growth_types(ct);
    REQUIRE_FALSE(ct.circuits.empty());
    for (const auto& c : ct.circuits) {
      CAPTURE(name);
      CAPTURE(c.name);
      const GrowthType predicted = circuit_growth(ct, table, c.path, c.splitting);
      const auto fit = fit_growth(circuit_length_sequence(ct, c.path, 25));
      CHECK(fit.d_hat == predicted.d);
      CHECK(close(fit.lambda_hat, predicted.lambda, 0.02));
    }
  }
}

TEST_CASE("derived endomorphism matches the corpus automorphisms") {
  for (const auto& name : kCorpusNames) {
    CAPTURE(name);
    const CtMap ct = corpus(name);
    const Automorphism phi = load_automorphism(kCorpus + "/" + name + ".aut");
    CHECK(ct.group_spec() == phi.spec());
    const GroupMap derived = derived_endomorphism(ct);
    if (std::string(name) != "bridson_groves") {
      CHECK(derived == phi.forward());
      CHECK_NOTHROW(Automorphism(ct.group_spec(), derived, phi.backward()));
    }
    for (const auto& c : ct.circuits) {
      CAPTURE(c.name);
      const NormalWord g = path_word(ct, c.path);
      const auto graph_fit = fit_growth(circuit_length_sequence(ct, c.path, 20));
      const auto group_fit = fit_growth(length_sequence(phi, g, 20, true));
      CHECK(graph_fit.d_hat == group_fit.d_hat);
      CHECK(close(graph_fit.lambda_hat, group_fit.lambda_hat, 0.02));
    }
  }
}

TEST_CASE("INPs are fixed and exceptional paths drift linearly") {
  const CtMap tower = corpus("neg_tower");
  for (const auto& inp : tower.inps) {
    GraphPath p = inp.path;
    const Integer len = path_length(p);
    for (int n = 1; n <= 12; ++n) {
      p = f_sharp(tower, p);
      CHECK(path_length(p) == len);
    }
  }
  const CtMap ct = corpus("exceptional");
  const auto& x = ct.exceptionals[0];
  const long slope = std::abs(x.d - x.d2) * static_cast<long>(path_length(x.w).get_si());
  GraphPath p = parse_path("e a a a a a a a a a a a a a a e2^-1", ct);
  const Integer start = path_length(p);
  for (int n = 1; n <= 12; ++n) {
    p = f_sharp(ct, p);
    CHECK(path_length(p) == start - slope * n);
  }
}

TEST_CASE("polexp_sum") {
  GrowthType g = polexp_sum(0, 1.0, 1.0);
  CHECK(g.d == 1);
  CHECK(g.lambda == 1);
  g = polexp_sum(3, 2.0, 1.0);
  CHECK(g.d == 0);
  CHECK(g.lambda == 2);
  g = polexp_sum(2, 1.5, 2.0);
  CHECK(g.d == 2);
  CHECK(g.lambda == 2);
}

TEST_CASE("combination bound of the corpus") {
  const CtMap fib = corpus("fib");
  const Spectrum s = ct_combination_bound(fib, assign_growth_types(fib));
  CHECK(s.size() == 3);
  CHECK(s.contains({1, 1.0, std::nullopt}));
  CHECK(s.contains({0, kGolden, std::nullopt}));
  CHECK_FALSE(s.contains({1, kGolden, std::nullopt}));

  const CtMap fat = corpus("fat_vertex");
  const Spectrum f = ct_combination_bound(fat, assign_growth_types(fat));
  CHECK(f.contains({0, kGolden2, std::nullopt}));
  CHECK(f.contains({2, 1.0, std::nullopt}));
}

TEST_CASE("parse errors carry positions") {
  try {
    parse_ct("vertex v\nedge a : v -> v height 1\nimage a -> a b\n", "x.ct");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ParseError);
    CHECK(std::string(e.what()).find("x.ct:3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_ct("vertex w fat g1\nmatrix g1 = [[2,1],[1,1]]\nvertex v\nedge a : w -> v height 1\n"
                           "edge b : v -> w height 1\nimage a -> b\nimage b -> a\n"),
                  Error);
  CHECK_THROWS_AS(parse_ct("vertex v\nedge a : v -> v height 1\nimage a -> a · a^-1 · a\n"), Error);
}
