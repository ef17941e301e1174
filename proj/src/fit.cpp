#include "polexp/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "polexp/error.hpp"

namespace polexp {

namespace {

constexpr int kMaxStep = 12;  // largest finite order in GL(5, Z)
constexpr int kMinConfirmations = 4;
constexpr double kDegreeMargin = 1.25;
constexpr double kDegreeSlack = 0.01;
constexpr std::size_t kMinPairs = 5;

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double rms = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y,
                      const std::vector<double>* w = nullptr) {
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double wi = w ? (*w)[i] : 1.0;
    n += wi;
    sx += wi * x[i];
    sy += wi * y[i];
    sxx += wi * x[i] * x[i];
    sxy += wi * x[i] * y[i];
  }
  LineFit f;
  const double den = n * sxx - sx * sx;
  f.slope = den != 0.0 ? (n * sxy - sx * sy) / den : 0.0;
  f.intercept = (sy - f.slope * sx) / n;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    ss += (w ? (*w)[i] : 1.0) * r * r;
  }
  f.rms = std::sqrt(ss / n);
  return f;
}

/// Smallest d such that the (d+1)-fold difference with step m vanishes on
/// the last kMinConfirmations or more positions, for some m; -1 if none.
/// Lengths of polynomial vectors only become polynomial once every
/// coordinate has settled its sign, so the run is measured from the end.
int quasi_polynomial_degree(const std::vector<Integer>& a, int max_degree) {
  const int end = static_cast<int>(a.size());
  for (int d = 0; d <= max_degree; ++d) {
    std::vector<Integer> binom(static_cast<std::size_t>(d + 2));
    binom[0] = 1;
    for (int i = 1; i <= d + 1; ++i) {
      binom[static_cast<std::size_t>(i)] = binom[static_cast<std::size_t>(i - 1)] * (d + 2 - i) / i;
    }
    for (int m = 1; m <= kMaxStep; ++m) {
      const int span = m * (d + 1);
      int run = 0;
      for (int n = end - 1; n >= span; --n) {
        Integer s = 0;
        for (int i = 0; i <= d + 1; ++i) {
          const Integer term = binom[static_cast<std::size_t>(i)] * a[static_cast<std::size_t>(n - i * m)];
          if (i % 2) {
            s -= term;
          } else {
            s += term;
          }
        }
        if (s != 0) break;
        ++run;
      }
      if (run >= kMinConfirmations) return d;
    }
  }
  return -1;
}

/// Slope of ln a_n - d ln n from log differences at a fixed shift m. For
/// a_n ~ n^d lambda^n f(n) with f oscillating, the differences at shift m are
/// nearly constant when f(n + m) ~ f(n); the shift with the smallest standard
/// error wins.
struct PhaseFit {
  double slope = 0.0;
  double spread = std::numeric_limits<double>::infinity();
};

PhaseFit phase_matched_slope(const std::vector<double>& log_a, const std::vector<double>& log_n, int d) {
  const std::size_t size = log_a.size();
  PhaseFit best;
  for (std::size_t m = 1; m + kMinPairs <= size; ++m) {
    std::vector<double> r;
    for (std::size_t i = 0; i + m < size; ++i) r.push_back(log_a[i + m] - log_a[i] - d * (log_n[i + m] - log_n[i]));
    double mean = 0;
    for (double x : r) mean += x;
    mean /= static_cast<double>(r.size());
    double ss = 0;
    for (double x : r) ss += (x - mean) * (x - mean);
    const double err = std::sqrt(ss / static_cast<double>(r.size())) / static_cast<double>(m);
    if (err < best.spread) best = {mean / static_cast<double>(m), err};
  }
  return best;
}

struct ModelFit {
  int d = 0;
  double log_lambda = 0.0;
};

/// Least squares of ln a_n - d ln n = c + n l for every candidate d on
/// [from, end). A decreasing exponential part is not admissible and is
/// clamped to l = 0. Over a short window n^d and lambda^n are nearly
/// collinear, so the smallest degree within a margin of the best fit wins.
/// Residuals are weighted by position so that decaying transients at the
/// start of the window do not pass for a polynomial factor.
ModelFit fit_model(const std::vector<Integer>& a, int from, int tail, const FitOptions& options) {
  std::vector<double> xs, log_a, log_n;
  for (int n = from; n < static_cast<int>(a.size()); ++n) {
    xs.push_back(n);
    log_a.push_back(log_of(a[static_cast<std::size_t>(n)]));
    log_n.push_back(std::log(static_cast<double>(n)));
  }
  std::vector<double> weight;
  for (std::size_t i = 0; i < xs.size(); ++i) weight.push_back(static_cast<double>(i + 1));
  std::vector<LineFit> fits;
  for (int d = 0; d <= options.max_degree; ++d) {
    std::vector<double> y(log_a.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = log_a[i] - d * log_n[i];
    LineFit f = least_squares(xs, y, &weight);
    if (f.slope < 0.0) {
      f.slope = 0.0;
      double mean = 0, total = 0;
      for (std::size_t i = 0; i < y.size(); ++i) {
        mean += weight[i] * y[i];
        total += weight[i];
      }
      mean /= total;
      double ss = 0;
      for (std::size_t i = 0; i < y.size(); ++i) ss += weight[i] * (y[i] - mean) * (y[i] - mean);
      f.rms = std::sqrt(ss / total);
      f.intercept = mean;
    }
    fits.push_back(f);
  }
  double best = fits.front().rms;
  for (const auto& f : fits) best = std::min(best, f.rms);
  ModelFit out;
  while (fits[static_cast<std::size_t>(out.d)].rms > kDegreeMargin * best + kDegreeSlack) ++out.d;

  // Two estimates of ln(lambda): a regression on the tail, where transients
  // have died out, and log differences over the wide window at the shift
  // where an oscillating factor repeats best. Each comes with a spread
  // (residual scale over the span it measures); the tighter one wins.
  const auto skip = static_cast<std::size_t>(tail - from);
  const PhaseFit phase = phase_matched_slope(log_a, log_n, out.d);
  xs.erase(xs.begin(), xs.begin() + static_cast<long>(skip));
  log_a.erase(log_a.begin(), log_a.begin() + static_cast<long>(skip));
  log_n.erase(log_n.begin(), log_n.begin() + static_cast<long>(skip));
  std::vector<double> y(log_a.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = log_a[i] - out.d * log_n[i];
  const LineFit tail_fit = least_squares(xs, y);
  const double tail_spread = tail_fit.rms / (xs.back() - xs.front());
  const double l = std::max(0.0, tail_spread <= phase.spread ? tail_fit.slope : phase.slope);
  out.log_lambda = l;
  return out;
}

struct Band {
  double residual = 0.0;
  double ratio = 1.0;
};

/// Deviation from C n^d lambda^n on the window, with C chosen to minimise
/// the largest relative error: if the normalised terms span [lo, hi] then
/// C = (lo + hi) / 2 and the residual is (hi - lo) / (hi + lo).
Band measure(const std::vector<double>& log_a, int begin, int d, double log_lambda) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < log_a.size(); ++i) {
    const double n = static_cast<double>(begin) + static_cast<double>(i);
    const double x = log_a[i] - d * std::log(n) - n * log_lambda;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  const double r = std::exp(lo - hi);
  return {(1.0 - r) / (1.0 + r), 1.0 / r};
}

}  // namespace

std::string to_string(GrowthClass c) {
  switch (c) {
    case GrowthClass::Bounded:
      return "Bounded";
    case GrowthClass::Polynomial:
      return "Polynomial";
    case GrowthClass::Exponential:
      return "Exponential";
  }
  return "?";
}

FittedGrowth fit_growth(const std::vector<Integer>& a, const FitOptions& options) {
  if (a.size() < 12) {
    throw Error(ErrorKind::TooShort, "need at least 12 terms, got " + std::to_string(a.size()));
  }
  const int n_max = static_cast<int>(a.size()) - 1;
  const int begin = (2 * n_max + 2) / 3;
  FittedGrowth fit;
  fit.window_begin = begin;
  fit.window_end = n_max;

  int zeros = 0;
  for (int n = begin; n <= n_max; ++n) {
    if (a[static_cast<std::size_t>(n)] < 0) throw Error(ErrorKind::NonPositiveTail, "negative length in tail");
    zeros += (a[static_cast<std::size_t>(n)] == 0);
  }
  if (zeros == n_max - begin + 1) {
    fit.degenerate = true;
    return fit;
  }
  if (zeros > 0) {
    throw Error(ErrorKind::NonPositiveTail,
                std::to_string(zeros) + " zero terms in the tail window [" + std::to_string(begin) + ", " +
                    std::to_string(n_max) + "]");
  }

  std::vector<double> log_a, xs, log_n;
  for (int n = begin; n <= n_max; ++n) {
    log_a.push_back(log_of(a[static_cast<std::size_t>(n)]));
    xs.push_back(n);
    log_n.push_back(std::log(static_cast<double>(n)));
  }

  const int exact_degree = quasi_polynomial_degree(a, options.max_degree);
  if (exact_degree >= 0) {
    fit.d_hat = exact_degree;
    fit.lambda_hat = 1.0;
  } else {
    const ModelFit m = fit_model(a, (2 * n_max + 3) / 5, begin, options);
    if (m.log_lambda < std::log1p(options.epsilon_lambda)) {
      fit.lambda_hat = 1.0;
      const LineFit loglog = least_squares(log_n, log_a);
      fit.d_hat = std::max(0, static_cast<int>(std::lround(loglog.slope)));
    } else {
      fit.lambda_hat = std::exp(m.log_lambda);
      fit.d_hat = m.d;
    }
  }

  const Band band = measure(log_a, begin, fit.d_hat, std::log(fit.lambda_hat));
  fit.residual = band.residual;
  fit.band = band.ratio;
  fit.low_confidence = fit.residual > options.confidence_residual;
  if (fit.lambda_hat > 1.0) {
    fit.classification = GrowthClass::Exponential;
    for (int n = begin + 1; n <= n_max; ++n) {
      if (a[static_cast<std::size_t>(n)] < a[static_cast<std::size_t>(n - 1)]) fit.non_monotone = true;
    }
  } else {
    fit.classification = fit.d_hat == 0 ? GrowthClass::Bounded : GrowthClass::Polynomial;
  }
  return fit;
}

bool check_power_consistency(const std::vector<Integer>& sequence_phi, const std::vector<Integer>& sequence_phik,
                             unsigned k, const FitOptions& options) {
  const FittedGrowth f1 = fit_growth(sequence_phi, options);
  const FittedGrowth fk = fit_growth(sequence_phik, options);
  if (f1.d_hat != fk.d_hat) return false;
  const double expected = std::pow(f1.lambda_hat, static_cast<double>(k));
  return std::abs(fk.lambda_hat - expected) <= 0.03 * expected;
}

std::string write_length_csv(const std::vector<Integer>& sequence) {
  std::string out = "n,length\n";
  for (std::size_t n = 0; n < sequence.size(); ++n) out += std::to_string(n) + "," + sequence[n].get_str() + "\n";
  return out;
}

std::vector<Integer> read_length_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<Integer> out;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line == "n,length") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": expected 'n,length'");
    }
    const std::string n_text = line.substr(0, comma);
    const std::string value = line.substr(comma + 1);
    Integer n, v;
    if (n.set_str(n_text, 10) != 0 || v.set_str(value, 10) != 0) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": not an integer pair");
    }
    if (n != static_cast<long>(out.size())) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": expected n = " + std::to_string(out.size()));
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace polexp
