#include "polexp/spectrum.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "polexp/error.hpp"

namespace polexp {

Spectrum::Spectrum() { entries_.push_back(GrowthType::bounded()); }

Spectrum::Spectrum(const std::vector<GrowthType>& entries, double rel_tol) : Spectrum() {
  for (const auto& g : entries) insert(g, rel_tol);
}

std::size_t Spectrum::insert(const GrowthType& g, double rel_tol) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].d == g.d && lambda_equal(entries_[i], g, rel_tol)) {
      if (!entries_[i].poly && g.poly) entries_[i] = g;
      return i;
    }
  }
  auto it = std::upper_bound(entries_.begin(), entries_.end(), g,
                             [](const GrowthType& a, const GrowthType& b) {
                               if (a.lambda != b.lambda) return a.lambda < b.lambda;
                               return a.d < b.d;
                             });
  const auto pos = static_cast<std::size_t>(it - entries_.begin());
  entries_.insert(it, g);
  return pos;
}

bool Spectrum::contains(const GrowthType& g, double rel_tol) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const GrowthType& e) { return e.d == g.d && lambda_equal(e, g, rel_tol); });
}

std::string to_string(const Spectrum& s, int digits) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.entries().size(); ++i) {
    if (i) out += ", ";
    out += to_string(s.entries()[i], digits);
  }
  return out + "}";
}

Spectrum plus_closure(const Spectrum& s) {
  Spectrum out = s;
  for (const auto& g : s.entries()) {
    if (lambda_equal(g.lambda, 1.0)) out.insert(GrowthType::polynomial(g.d + 1));
  }
  return out;
}

Spectrum power_rescale(const Spectrum& s, unsigned k) {
  Spectrum out;
  for (const auto& g : s.entries()) out.insert(power_rescale(g, k));
  return out;
}

Spectrum root_rescale(const Spectrum& s, unsigned k) {
  Spectrum out;
  for (const auto& g : s.entries()) out.insert(root_rescale(g, k));
  return out;
}

bool is_subset(const Spectrum& a, const Spectrum& b, double rel_tol) {
  return std::all_of(a.entries().begin(), a.entries().end(),
                     [&](const GrowthType& g) { return b.contains(g, rel_tol); });
}

Spectrum combination_bound(const std::vector<std::pair<Spectrum, Spectrum>>& components,
                           const std::vector<GrowthType>& stratum_rates) {
  struct Rate {
    GrowthType rate;
    int component_degree = -1;
    int strata = 0;
  };
  std::vector<Rate> rates;
  auto slot = [&](const GrowthType& g) -> Rate& {
    for (auto& r : rates) {
      if (lambda_equal(r.rate, g)) return r;
    }
    rates.push_back({GrowthType{0, g.lambda, g.poly}, -1, 0});
    return rates.back();
  };
  slot(GrowthType::bounded()).component_degree = 0;
  for (const auto& [spectrum, palangre] : components) {
    for (const Spectrum* s : {&spectrum, &palangre}) {
      for (const auto& g : s->entries()) {
        Rate& r = slot(g);
        r.component_degree = std::max(r.component_degree, g.d);
      }
    }
  }
  for (const auto& g : stratum_rates) ++slot(g).strata;

  Spectrum out;
  for (const auto& r : rates) {
    const int cap = r.component_degree >= 0 ? r.component_degree + r.strata : r.strata - 1;
    for (int d = 0; d <= cap; ++d) out.insert(GrowthType{d, r.rate.lambda, r.rate.poly});
  }
  return plus_closure(out);
}

namespace {

/// Every nonzero vector of Z^rank with l1 norm exactly `norm`.
void vectors_of_norm(int rank, int norm, IntVector& cur, std::vector<IntVector>& out) {
  const auto i = cur.size();
  if (static_cast<int>(i) == rank - 1) {
    for (int s : {1, -1}) {
      cur.push_back(Integer(s * norm));
      out.push_back(cur);
      cur.pop_back();
      if (norm == 0) break;
    }
    return;
  }
  for (int a = -norm; a <= norm; ++a) {
    cur.push_back(Integer(a));
    vectors_of_norm(rank, norm - std::abs(a), cur, out);
    cur.pop_back();
  }
}

/// Sort key of a syllable sequence: codes interleaved with vector entries.
std::vector<long> key_of(const std::vector<Syllable>& s) {
  std::vector<long> key;
  for (const auto& x : s) {
    if (x.is_free()) {
      key.push_back(2L * x.index + (x.sign > 0 ? 0 : 1));
    } else {
      key.push_back(1000000L + x.index);
      for (const auto& c : x.vector) key.push_back(c.get_si());
    }
  }
  return key;
}

bool adjacent_ok(const Syllable& a, const Syllable& b) {
  if (a.is_free() != b.is_free()) return true;
  if (a.is_free()) return !(a.index == b.index && a.sign == -b.sign);
  return a.index != b.index;
}

}  // namespace

std::vector<NormalWord> conjugacy_class_representatives(const GroupSpec& spec, int max_length) {
  spec.validate();
  // Syllables grouped by their length.
  std::vector<std::vector<Syllable>> by_length(static_cast<std::size_t>(std::max(max_length, 0) + 1));
  if (max_length >= 1) {
    for (int i = 1; i <= spec.free_rank; ++i) {
      by_length[1].push_back(Syllable::free(i, 1));
      by_length[1].push_back(Syllable::free(i, -1));
    }
  }
  for (int j = 1; j <= spec.factor_count(); ++j) {
    for (int norm = 1; norm <= max_length; ++norm) {
      std::vector<IntVector> vs;
      IntVector cur;
      vectors_of_norm(spec.rank(j), norm, cur, vs);
      for (auto& v : vs) by_length[static_cast<std::size_t>(norm)].push_back(Syllable::abelian(j, std::move(v)));
    }
  }

  // Canonical representative: the rotation with the smallest key.
  std::map<std::pair<int, std::vector<long>>, std::vector<Syllable>> classes;
  std::vector<Syllable> word;
  auto visit = [&](auto&& self, int length) -> void {
    if (!word.empty()) {
      const bool cyclic = word.size() == 1 || adjacent_ok(word.back(), word.front());
      if (cyclic) {
        std::vector<long> best;
        for (std::size_t r = 0; r < word.size(); ++r) {
          std::vector<Syllable> rot(word.begin() + static_cast<long>(r), word.end());
          rot.insert(rot.end(), word.begin(), word.begin() + static_cast<long>(r));
          auto k = key_of(rot);
          if (r == 0 || k < best) best = std::move(k);
        }
        if (best == key_of(word)) classes.emplace(std::make_pair(length, best), word);
      }
    }
    for (int l = 1; length + l <= max_length; ++l) {
      for (const auto& s : by_length[static_cast<std::size_t>(l)]) {
        if (!word.empty() && !adjacent_ok(word.back(), s)) continue;
        word.push_back(s);
        self(self, length + l);
        word.pop_back();
      }
    }
  };
  visit(visit, 0);

  std::vector<NormalWord> out;
  out.reserve(classes.size());
  for (const auto& [key, syllables] : classes) out.push_back(normalize(syllables, spec));
  return out;
}

namespace {

ClassReport analyze_class(const Automorphism& phi, const NormalWord& g, const EnumerationOptions& options) {
  ClassReport report;
  report.word = g;
  std::vector<Integer> seq;
  NormalWord cur = g;
  try {
    for (int n = 0; n <= options.n_max; ++n) {
      seq.push_back(conj_length(cur));
      if (n < options.n_max) cur = apply(phi, cyclic_reduce(cur).core, options.budget);
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::LengthBudgetExceeded) throw;
    report.truncated = true;
    report.skipped = e.what();
  }
  report.terms = static_cast<int>(seq.size());
  if (seq.size() < 12) return report;
  try {
    report.fit = fit_growth(seq, options.fit);
    if (report.truncated) report.skipped.clear();
  } catch (const Error& e) {
    report.skipped = e.what();
  }
  return report;
}

}  // namespace

EmpiricalSpectrum enumerate_spectrum(const Automorphism& phi, const EnumerationOptions& options) {
  const auto reps = conjugacy_class_representatives(phi.spec(), options.max_word_length);
  std::vector<ClassReport> reports(reps.size());

  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(reps.size(), 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_lock;
  auto worker = [&] {
    for (std::size_t i = next++; i < reps.size(); i = next++) {
      try {
        reports[i] = analyze_class(phi, reps[i], options);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_lock);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  // Merge in class order so that the clustering does not depend on timing.
  EmpiricalSpectrum out;
  // The trivial class witnesses the mandatory (0, 1).
  std::vector<std::vector<NormalWord>> witnesses(1, std::vector<NormalWord>(1));
  for (const auto& r : reports) {
    if (!r.fit) continue;
    const GrowthType g = r.fit->growth_type();
    const std::size_t before = out.spectrum.size();
    const std::size_t at = out.spectrum.insert(g, options.cluster_tolerance);
    if (out.spectrum.size() != before) witnesses.insert(witnesses.begin() + static_cast<long>(at), std::vector<NormalWord>());
    witnesses[at].push_back(r.word);
  }
  out.witnesses = std::move(witnesses);
  out.classes = std::move(reports);
  return out;
}

}  // namespace polexp
