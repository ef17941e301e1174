#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "polexp/automorphism.hpp"
#include "polexp/fit.hpp"
#include "polexp/growth_type.hpp"

namespace polexp {

/// Finite set of growth types, deduplicated under lambda equality, always
/// containing (0, 1). Entries are kept sorted.
class Spectrum {
 public:
  Spectrum();
  explicit Spectrum(const std::vector<GrowthType>& entries, double rel_tol = kLambdaTolerance);

  /// Returns the index of the (possibly pre-existing) entry.
  std::size_t insert(const GrowthType& g, double rel_tol = kLambdaTolerance);
  /// Same d and lambda within rel_tol.
  bool contains(const GrowthType& g, double rel_tol = kLambdaTolerance) const;

  const std::vector<GrowthType>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<GrowthType> entries_;
};

std::string to_string(const Spectrum& s, int digits = 12);

/// S u {(d+1, 1) : (d, 1) in S}
Spectrum plus_closure(const Spectrum& s);
/// {(d, lambda^k)}
Spectrum power_rescale(const Spectrum& s, unsigned k);
/// {(d, lambda^(1/k))}
Spectrum root_rescale(const Spectrum& s, unsigned k);

bool is_subset(const Spectrum& a, const Spectrum& b, double rel_tol = kLambdaTolerance);

/// Superset bound for the spectrum of an automorphism built from a CT:
/// every stratum contributes its PF eigenvalue (1 for NEG strata), every
/// component its spectrum and palangre spectrum. At each rate lambda the
/// degree may reach (largest component degree at lambda) + (number of strata
/// at lambda), or (number of strata at lambda) - 1 when no component
/// reaches lambda; the result is closed under plus_closure.
Spectrum combination_bound(const std::vector<std::pair<Spectrum, Spectrum>>& components,
                           const std::vector<GrowthType>& stratum_rates);

struct EnumerationOptions {
  int max_word_length = 4;
  int n_max = 25;
  std::size_t budget = kDefaultBudget;
  /// Fitted rates within this relative distance are merged.
  double cluster_tolerance = 0.02;
  FitOptions fit;
  /// 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
};

struct ClassReport {
  NormalWord word;
  std::optional<FittedGrowth> fit;
  /// Number of terms that entered the fit (n_max + 1 unless truncated).
  int terms = 0;
  /// The budget ran out, the fit used the prefix that was computed.
  bool truncated = false;
  /// Set when the class could not be fitted at all.
  std::string skipped;
};

/// Empirical lower bound for the spectrum: one fitted growth type per
/// conjugacy class of cyclically reduced words up to the given length.
struct EmpiricalSpectrum {
  Spectrum spectrum;
  /// witnesses[i] lists the classes whose fit landed on spectrum.entries()[i].
  std::vector<std::vector<NormalWord>> witnesses;
  std::vector<ClassReport> classes;
};

/// One cyclically reduced representative per conjugacy class of nontrivial
/// elements with conjugacy length at most max_length, in a fixed order.
std::vector<NormalWord> conjugacy_class_representatives(const GroupSpec& spec, int max_length);

EmpiricalSpectrum enumerate_spectrum(const Automorphism& phi, const EnumerationOptions& options = {});

}  // namespace polexp
