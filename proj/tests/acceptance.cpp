// One line per acceptance criterion; the exit code is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "generators.hpp"
#include "polexp/abelian.hpp"
#include "polexp/cli.hpp"
#include "polexp/ct.hpp"
#include "polexp/error.hpp"
#include "polexp/fit.hpp"
#include "polexp/spectrum.hpp"

using namespace polexp;
using polexp::testing::random_automorphism;
using polexp::testing::random_unimodular;
using polexp::testing::random_word;

namespace {

const std::string kCorpus = POLEXP_CORPUS_DIR;
const std::vector<std::string> kCorpusNames = {"fib", "neg_tower", "bridson_groves", "fat_vertex", "exceptional",
                                               "zero_stratum"};
const GroupSpec kMixed{{2}, 2};

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool within(double value, double target, double rel) { return std::abs(value - target) <= rel * target; }

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

Automorphism corpus_aut(const std::string& name) { return load_automorphism(kCorpus + "/" + name + ".aut"); }
CtMap corpus_ct(const std::string& name) { return load_ct(kCorpus + "/" + name + ".ct"); }

Outcome abelian_exactness() {
  const auto t0 = Clock::now();
  std::mt19937 rng(1);
  int agree = 0;
  std::string first_failure;
  for (int t = 0; t < 200; ++t) {
    const std::size_t k = 1 + rng() % 5;
    const IntMatrix a = random_unimodular(rng, k, 1 + static_cast<int>(rng() % 12));
    IntVector v(k);
    do {
      for (auto& x : v) x = static_cast<long>(rng() % 11) - 5;
    } while (is_zero(v));
    const GrowthType exact = orbit_growth(a, v);
    const FittedGrowth fit = fit_growth(orbit_oracle(a, v, 30));
    if (fit.d_hat == exact.d && within(fit.lambda_hat, exact.lambda, 0.01)) {
      ++agree;
    } else if (first_failure.empty()) {
      first_failure = ", first mismatch A=" + to_string(a) + " v=" + to_string(v) + " exact " + to_string(exact) +
                      " fit " + to_string(fit.growth_type());
    }
  }
  const double secs = seconds_since(t0);
  return {agree == 200 && secs < 60,
          std::to_string(agree) + "/200 agree in " + fmt("%.2f", secs) + " s" + first_failure};
}

Outcome palangre_bump() {
  int checked = 0, good = 0;
  std::mt19937 rng(2);
  for (std::size_t size = 2; size <= 4; ++size) {
    IntMatrix a = IntMatrix::identity(size);
    for (std::size_t i = 0; i + 1 < size; ++i) a(i, i + 1) = 1;
    for (int t = 0; t < 10; ++t) {
      IntVector v(size);
      if (t == 0) {
        v.back() = 1;
      } else {
        do {
          for (auto& x : v) x = static_cast<long>(rng() % 11) - 5;
        } while (is_zero(v));
      }
      const GrowthType orbit = orbit_growth(a, v);
      const GrowthType pal = palangre_growth(a, v);
      const FittedGrowth fit = fit_growth(palangre_oracle(a, v, 30));
      ++checked;
      good += pal.d == orbit.d + 1 && fit.d_hat == pal.d && pal.lambda == 1;
    }
  }
  return {good == checked, std::to_string(good) + "/" + std::to_string(checked) +
                               " vectors on blocks of size 2..4 bump the degree by one, summation oracle agrees"};
}

Outcome golden() {
  const double root = (1 + std::sqrt(5.0)) / 2;
  const CtMap ct = corpus_ct("fib");
  const TermGrowthTable t = assign_growth_types(ct);
  bool ok = true;
  double worst = 0;
  for (const auto& e : t.edges) {
    ok = ok && e && e->d == 0;
    if (e) worst = std::max(worst, std::abs(e->lambda - root));
  }
  ok = ok && worst < 1e-9;
  const Automorphism phi = corpus_aut("fib");
  const FittedGrowth fit = fit_growth(length_sequence(phi, parse_word("a", phi.spec()), 30, false));
  ok = ok && fit.d_hat == 0 && within(fit.lambda_hat, root, 0.01);
  return {ok, "table (0, " + fmt("%.12f", t.edges[0]->lambda) + "), |root - lambda| = " + fmt("%.1e", worst) +
                  ", fit of |phi^n(a)| = " + to_string(fit.growth_type(), 8)};
}

Outcome bridson_groves() {
  const auto t0 = Clock::now();
  const Automorphism phi = corpus_aut("bridson_groves");
  const FittedGrowth b = fit_growth(length_sequence(phi, parse_word("b", phi.spec()), 30, false));
  bool ok = b.d_hat == 2 && b.lambda_hat == 1.0;
  int worst_d = 0, classes = 0;
  bool bounded_rate = true;
  for (const auto& g : conjugacy_class_representatives(phi.spec(), 4)) {
    const FittedGrowth f = fit_growth(length_sequence(phi, g, 30, true));
    ++classes;
    worst_d = std::max(worst_d, f.d_hat);
    bounded_rate = bounded_rate && f.lambda_hat == 1.0;
  }
  const double secs = seconds_since(t0);
  ok = ok && worst_d <= 1 && bounded_rate && secs < 30;
  return {ok, "|phi^n(b)| fits " + to_string(b.growth_type(), 4) + ", " + std::to_string(classes) +
                  " classes of length <= 4 reach at most (" + std::to_string(worst_d) + ", 1), " + fmt("%.2f", secs) +
                  " s"};
}

Outcome neg_tower() {
  const CtMap ct = corpus_ct("neg_tower");
  const TermGrowthTable t = assign_growth_types(ct);
  const Automorphism phi = corpus_aut("neg_tower");
  bool ok = true;
  std::string detail;
  const int expected[] = {0, 1, 2};
  for (std::size_t e = 0; e < 3; ++e) {
    GraphPath p = parse_path(ct.graph.edges[e].name, ct);
    std::vector<Integer> seq;
    for (int n = 0; n <= 30; ++n) {
      seq.push_back(path_length(p));
      p = f_sharp(ct, p);
    }
    const FittedGrowth graph_fit = fit_growth(seq);
    const FittedGrowth group_fit =
        fit_growth(length_sequence(phi, NormalWord::letter(static_cast<int>(e + 1)), 30, false));
    const GrowthType predicted = *t.edges[e];
    ok = ok && predicted.d == expected[e] && predicted.lambda == 1 && graph_fit.d_hat == predicted.d &&
         group_fit.d_hat == predicted.d;
    detail += (detail.empty() ? "" : ", ") + ct.graph.edges[e].name + " " + to_string(predicted) + " fit " +
              to_string(graph_fit.growth_type(), 4);
  }
  return {ok, detail};
}

/// Automorphisms of Z^2 * F_2 whose iterates stay within budget at desk
/// scale: the corpus map plus random products screened on phi^30 of every
/// generator.
std::vector<Automorphism> mixed_pool(std::mt19937& rng) {
  std::vector<Automorphism> pool = {corpus_aut("fat_vertex")};
  while (pool.size() < 8) {
    Automorphism phi = random_automorphism(rng, kMixed, 6);
    try {
      for (int i = 1; i <= 2; ++i) iterate(phi, NormalWord::letter(i), 30, 2000);
      pool.push_back(std::move(phi));
    } catch (const Error&) {
    }
  }
  return pool;
}

Outcome palangre_identity() {
  std::mt19937 rng(6);
  const auto pool = mixed_pool(rng);
  int equal = 0;
  for (int t = 0; t < 500; ++t) {
    const Automorphism& phi = pool[rng() % pool.size()];
    const NormalWord g = random_word(rng, kMixed, 5);
    const NormalWord h = random_word(rng, kMixed, 5);
    const long k = 1 + static_cast<long>(rng() % 3);
    const long n = static_cast<long>(rng() % 11);
    const Automorphism psi = power(phi, static_cast<unsigned>(k));
    const NormalWord torus = torus_palangre({g, k}, {invert(h), k}, phi, n);
    equal += torus == concat(palangre_left(psi, g, n), palangre_right(psi, h, n));
  }
  return {equal == 500, std::to_string(equal) + "/500 exact word equalities"};
}

Outcome remark_identity() {
  std::mt19937 rng(7);
  const auto pool = mixed_pool(rng);
  int equal = 0;
  for (int t = 0; t < 500; ++t) {
    const Automorphism& phi = pool[rng() % pool.size()];
    const NormalWord g = random_word(rng, kMixed, 5);
    const NormalWord h = random_word(rng, kMixed, 5);
    const long n = static_cast<long>(rng() % 13);
    const NormalWord lhs = concat(iterate(phi, g, n), palangre_right(phi, h, n));
    const NormalWord twisted = concat(apply(phi, g), concat(h, invert(g)));
    const NormalWord rhs = concat(palangre_right(phi, twisted, n), g);
    equal += lhs == rhs;
  }
  return {equal == 500, std::to_string(equal) + "/500 exact word equalities"};
}

Outcome power_lemma() {
  // The generator carrying the top growth of each corpus map.
  const std::vector<std::pair<std::string, std::string>> jobs = {
      {"fib", "a"}, {"neg_tower", "c"}, {"bridson_groves", "b"}, {"fat_vertex", "a1"}, {"exceptional", "c"},
      {"zero_stratum", "b"}};
  int passed = 0, total = 0;
  std::string failures;
  for (const auto& [name, word] : jobs) {
    const Automorphism phi = corpus_aut(name);
    const NormalWord g = parse_word(word, phi.spec());
    for (bool conjugacy : {false, true}) {
      const auto base = length_sequence(phi, g, 30, conjugacy);
      for (unsigned k : {2u, 3u}) {
        const Automorphism psi = power(phi, k);
        const auto seq = length_sequence(psi, g, 11, conjugacy);
        ++total;
        if (check_power_consistency(base, seq, k)) {
          ++passed;
        } else {
          failures += " " + name + (conjugacy ? "/class" : "/element") + "/k=" + std::to_string(k);
        }
      }
    }
  }
  return {passed == total, std::to_string(passed) + "/" + std::to_string(total) + " consistent" +
                               (failures.empty() ? "" : ", failing:" + failures)};
}

Outcome sum_lemma() {
  const std::vector<std::pair<long, long>> rates = {{1, 1}, {3, 2}, {2, 1}};  // numerator, denominator
  int passed = 0, total = 0;
  std::string failures;
  const Integer scale = Integer(1) << 60;
  for (int d = 0; d <= 3; ++d) {
    for (const auto& r1 : rates) {
      for (const auto& r2 : rates) {
        std::vector<Integer> seq;
        for (int n = 0; n <= 60; ++n) {
          Rational s = 0;
          for (int k = 1; k <= n; ++k) {
            Rational term = 1;
            for (int i = 0; i < d; ++i) term *= n - k;
            for (int i = 0; i < k; ++i) term *= Rational(r1.first, r1.second);
            for (int i = 0; i < n - k; ++i) term *= Rational(r2.first, r2.second);
            s += term;
          }
          const Rational scaled = s * scale;
          seq.push_back(Integer(scaled.get_num() / scaled.get_den()));
        }
        const double l1 = static_cast<double>(r1.first) / static_cast<double>(r1.second);
        const double l2 = static_cast<double>(r2.first) / static_cast<double>(r2.second);
        const GrowthType predicted = polexp_sum(d, l1, l2);
        const FittedGrowth fit = fit_growth(seq);
        ++total;
        if (fit.d_hat == predicted.d && within(fit.lambda_hat, predicted.lambda, 0.01)) {
          ++passed;
        } else {
          failures += " (d=" + std::to_string(d) + "," + fmt("%g", l1) + "," + fmt("%g", l2) + ": predicted " +
                      to_string(predicted, 4) + " fit " + to_string(fit.growth_type(), 4) + ")";
        }
      }
    }
  }
  return {passed == total, std::to_string(passed) + "/" + std::to_string(total) + " sums agree" + failures};
}

Outcome containment() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::string detail;
  for (const auto& name : kCorpusNames) {
    const CtMap ct = corpus_ct(name);
    const Spectrum bound = ct_combination_bound(ct, assign_growth_types(ct));
    EnumerationOptions options;
    options.max_word_length = 5;
    options.n_max = 25;
    const EmpiricalSpectrum es = enumerate_spectrum(corpus_aut(name), options);
    std::size_t truncated = 0;
    for (const auto& c : es.classes) truncated += c.truncated || !c.skipped.empty();
    const bool inside = is_subset(es.spectrum, bound, 0.02);
    ok = ok && inside && truncated == 0;
    detail += (detail.empty() ? "" : "; ") + name + " " + std::to_string(es.classes.size()) + " classes " +
              to_string(es.spectrum, 4) + (inside ? " inside " : " ESCAPES ") + to_string(bound, 4);
    if (truncated) detail += " (" + std::to_string(truncated) + " incomplete)";
  }
  return {ok, detail + ", " + fmt("%.1f", seconds_since(t0)) + " s"};
}

std::string corpus_report() {
  std::ostringstream out, err;
  for (const auto& name : kCorpusNames) {
    JobConfig c;
    c.format = OutputFormat::Json;
    c.oracle = true;
    c.command = "ct";
    c.ct_path = kCorpus + "/" + name + ".ct";
    run(c, out, err);
    c.command = "spectrum";
    c.aut_path = kCorpus + "/" + name + ".aut";
    c.max_length = 3;
    c.n_max = 20;
    run(c, out, err);
    c.command = "class";
    c.word = name == "fat_vertex" ? "a1" : "b";
    c.n_max = 20;
    run(c, out, err);
  }
  return out.str() + err.str();
}

Outcome determinism() {
  const std::string first = corpus_report();
  const std::string second = corpus_report();
  return {first == second && !first.empty(),
          std::to_string(first.size()) + " bytes of JSON, " + (first == second ? "identical" : "DIFFERENT")};
}

}  // namespace

// With an argument N only criterion N runs.
int main(int argc, char** argv) {
  const std::size_t only = argc > 1 ? std::stoul(argv[1]) : 0;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"abelian exactness", abelian_exactness},
      {"palangre degree bump", palangre_bump},
      {"golden ratio", golden},
      {"Bridson-Groves", bridson_groves},
      {"NEG tower", neg_tower},
      {"palangre identity", palangre_identity},
      {"conjugated palangre identity", remark_identity},
      {"power lemma", power_lemma},
      {"polexp sums", sum_lemma},
      {"spectrum containment", containment},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only && only != i + 1) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
