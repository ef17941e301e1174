#include "doctest.h"

#include <cmath>

#include "polexp/abelian.hpp"
#include "polexp/spectrum.hpp"

using namespace polexp;

namespace {

const double kGolden = (1 + std::sqrt(5.0)) / 2;

GrowthType rate(int d, double lambda) { return {d, lambda, std::nullopt}; }

Automorphism fibonacci() {
  return parse_automorphism(R"(
    group free 2
    map a -> ab
    map b -> a
    inverse {
      map a -> b
      map b -> B a
    }
  )");
}

}  // namespace

TEST_CASE("spectrum always holds (0,1) and deduplicates") {
  Spectrum s;
  CHECK(s.size() == 1);
  CHECK(s.contains(GrowthType::bounded()));
  s.insert(rate(0, 2.0));
  s.insert(rate(0, 2.0 * (1 + 1e-12)));
  s.insert(rate(1, 1.0));
  CHECK(s.size() == 3);
  CHECK(s.entries().front().d == 0);
  CHECK(s.entries().back().lambda == 2.0);
  CHECK(s.contains(rate(0, 2.01), 0.02));
  CHECK_FALSE(s.contains(rate(0, 2.01)));
}

TEST_CASE("plus closure") {
  const Spectrum one;
  const auto c = plus_closure(one);
  CHECK(c.size() == 2);
  CHECK(c.contains(GrowthType::polynomial(1)));

  const auto two = plus_closure(Spectrum({rate(0, 2.0)}));
  CHECK(two.size() == 3);
  CHECK(two.contains(rate(0, 2.0)));
  CHECK(two.contains(GrowthType::polynomial(1)));

  // One more degree per application along the lambda = 1 chain.
  const auto twice = plus_closure(c);
  CHECK(twice.size() == 3);
  CHECK(twice.contains(GrowthType::polynomial(2)));
  CHECK(plus_closure(Spectrum({rate(0, 3.0), rate(2, 3.0)})).size() == 4);
}

TEST_CASE("power and root rescaling") {
  const Spectrum s({rate(0, kGolden), GrowthType::polynomial(2)});
  CHECK(to_string(power_rescale(s, 1)) == to_string(s));
  const auto sq = power_rescale(s, 2);
  CHECK(sq.contains(rate(0, kGolden + 1)));
  CHECK(sq.contains(GrowthType::polynomial(2)));
  CHECK(is_subset(root_rescale(sq, 2), s, 1e-12));
  CHECK(is_subset(s, root_rescale(sq, 2), 1e-12));
  for (unsigned k = 1; k <= 5; ++k) CHECK(power_rescale(Spectrum(), k).size() == 1);
}

TEST_CASE("combination bound") {
  // No components, one EG stratum.
  const auto eg = combination_bound({}, {rate(0, kGolden)});
  CHECK(to_string(eg) == to_string(plus_closure(Spectrum({rate(0, kGolden)}))));

  // One abelian component, no strata: its palangre spectrum closed under +.
  const auto a = IntMatrix::from_rows({{2, 1}, {1, 1}});
  const Spectrum spectrum(abelian_spectrum(a));
  CHECK(spectrum.size() == 2);
  const Spectrum palangre({GrowthType::polynomial(1), rate(0, kGolden + 1)});
  const auto bound = combination_bound({{spectrum, palangre}}, {});
  CHECK(to_string(bound) == to_string(plus_closure(palangre)));

  // Three NEG strata over nothing: degrees up to 3 plus one from closure.
  const auto neg = combination_bound({}, {GrowthType::bounded(), GrowthType::bounded(), GrowthType::bounded()});
  CHECK(neg.contains(GrowthType::polynomial(3)));
  CHECK(neg.contains(GrowthType::polynomial(4)));
  CHECK_FALSE(neg.contains(GrowthType::polynomial(5)));

  // Two EG strata with the same rate allow one polynomial factor.
  const auto stacked = combination_bound({}, {rate(0, 2.0), rate(0, 2.0)});
  CHECK(stacked.contains(rate(1, 2.0)));
  CHECK_FALSE(stacked.contains(rate(2, 2.0)));
}

TEST_CASE("class representatives") {
  // Counts from a brute-force rotation oracle over all words.
  const GroupSpec f2{{}, 2};
  const int f2_counts[] = {4, 12, 24, 50, 102};
  for (int l = 1; l <= 5; ++l) CHECK(conjugacy_class_representatives(f2, l).size() == f2_counts[l - 1]);
  const GroupSpec f3{{}, 3};
  CHECK(conjugacy_class_representatives(f3, 4).size() == 238);
  const GroupSpec mixed{{2}, 1};
  const int mixed_counts[] = {6, 24, 62, 164};
  for (int l = 1; l <= 4; ++l) CHECK(conjugacy_class_representatives(mixed, l).size() == mixed_counts[l - 1]);

  for (const auto& g : conjugacy_class_representatives(mixed, 4)) {
    CHECK(cyclic_reduce(g).core == g);
    CHECK(conj_length(g) == word_length(g));
    CHECK(word_length(g) <= 4);
  }
}

TEST_CASE("enumerated spectra") {
  EnumerationOptions options;
  options.max_word_length = 3;
  options.n_max = 20;
  const auto id = enumerate_spectrum(Automorphism::identity(GroupSpec{{2}, 2}), options);
  CHECK(id.spectrum.size() == 1);
  CHECK(id.witnesses.size() == 1);

  options.max_word_length = 4;
  options.threads = 3;
  const auto fib = enumerate_spectrum(fibonacci(), options);
  REQUIRE(fib.spectrum.size() == 2);
  CHECK(fib.spectrum.entries()[1].lambda == doctest::Approx(kGolden).epsilon(0.01));
  // Besides the trivial class, the commutator class and its inverse are
  // periodic: every automorphism of F2 maps [a,b] to a conjugate of
  // [a,b] or its inverse.
  REQUIRE(fib.witnesses[0].size() == 3);
  CHECK(format_word(fib.witnesses[0][0]) == "1");
  for (std::size_t i = 1; i < 3; ++i) {
    const auto& w = fib.witnesses[0][i];
    CHECK(word_length(w) == 4);
    CHECK(conj_length(apply(fibonacci(), w)) == 4);
  }
  CHECK(fib.witnesses[1].size() == 48);
  for (const auto& r : fib.classes) CHECK(r.fit);

  options.threads = 1;
  const auto serial = enumerate_spectrum(fibonacci(), options);
  CHECK(to_string(serial.spectrum) == to_string(fib.spectrum));
}

TEST_CASE("budget exhaustion is reported per class") {
  EnumerationOptions options;
  options.max_word_length = 2;
  options.n_max = 25;
  options.budget = 2000;
  const auto r = enumerate_spectrum(fibonacci(), options);
  bool truncated = false;
  for (const auto& c : r.classes) {
    if (!c.truncated) continue;
    truncated = true;
    CHECK(c.terms < 26);
    CHECK(c.fit.has_value() == (c.terms >= 12));
  }
  CHECK(truncated);
}
