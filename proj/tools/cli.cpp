#include "polexp/cli.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "polexp/abelian.hpp"
#include "polexp/ct.hpp"
#include "polexp/error.hpp"
#include "polexp/fit.hpp"
#include "polexp/spectrum.hpp"

namespace polexp {

namespace {

using Json = nlohmann::ordered_json;

constexpr int kSumTerms = 60;
constexpr long kTorusCheckTerms = 12;

double rounded(double x) {
  if (!std::isfinite(x)) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::stod(buf);
}

Json integer_json(const Integer& x) {
  if (x.fits_slong_p()) return Json(x.get_si());
  return Json(x.get_str());
}

Json growth_json(const GrowthType& g) {
  Json j;
  j["d"] = g.d;
  j["lambda"] = rounded(g.lambda);
  if (g.poly) j["polynomial"] = to_string(*g.poly);
  return j;
}

Json fit_json(const FittedGrowth& f) {
  Json j;
  j["d"] = f.d_hat;
  j["lambda"] = rounded(f.lambda_hat);
  j["class"] = to_string(f.classification);
  j["residual"] = rounded(f.residual);
  j["window"] = {f.window_begin, f.window_end};
  j["low_confidence"] = f.low_confidence;
  return j;
}

Json sequence_json(const std::vector<Integer>& seq) {
  Json a = Json::array();
  for (const auto& x : seq) a.push_back(integer_json(x));
  return a;
}

/// Fitted values are estimates; four significant digits in text output.
std::string fitted_string(const FittedGrowth& f) { return to_string(f.growth_type(), 4); }

bool matches(const GrowthType& predicted, const FittedGrowth& f, double tol) {
  return f.d_hat == predicted.d && std::abs(f.lambda_hat - predicted.lambda) <= tol * predicted.lambda;
}

void need(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::ParseError, what);
}

struct Report {
  Json json;
  std::ostringstream text;
  std::string csv;
};

void sequence_job(const JobConfig& c, Report& r, bool conjugacy) {
  need(!c.aut_path.empty() && !c.word.empty(), "--aut and --word are required");
  need(c.n_max >= 12, "--n must be at least 12 for a fit");
  const Automorphism phi = load_automorphism(c.aut_path);
  const NormalWord g = parse_word(c.word, phi.spec());
  const auto seq = length_sequence(phi, g, c.n_max, conjugacy, c.budget);
  const FittedGrowth f = fit_growth(seq);
  r.csv = write_length_csv(seq);
  r.text << r.csv << fitted_string(f) << "\n";
  r.json["word"] = format_word(g);
  r.json["n_max"] = c.n_max;
  r.json["lengths"] = sequence_json(seq);
  r.json["fit"] = fit_json(f);
}

void palangre_job(const JobConfig& c, Report& r) {
  need(!c.aut_path.empty() && !c.word.empty() && !c.h.empty(), "--aut, --word and --hword are required");
  need(c.n_max >= 12, "--n must be at least 12 for a fit");
  need(c.k >= 1, "--k must be positive");
  const Automorphism phi = load_automorphism(c.aut_path);
  const NormalWord g = parse_word(c.word, phi.spec());
  const NormalWord h = parse_word(c.h, phi.spec());
  const Automorphism psi = power(phi, c.k);
  std::vector<Integer> seq;
  NormalWord left, right, gk = g, hk = h;
  for (int n = 0; n <= c.n_max; ++n) {
    seq.push_back(word_length(concat(left, right)));
    if (n == c.n_max) break;
    left = concat(left, gk);
    right = concat(hk, right);
    if (left.size() + right.size() > c.budget) {
      throw Error(ErrorKind::LengthBudgetExceeded, "palangre exceeds " + std::to_string(c.budget) + " syllables");
    }
    gk = apply(psi, gk, c.budget);
    hk = apply(psi, hk, c.budget);
  }
  const long checks = std::min<long>(c.n_max, kTorusCheckTerms);
  const TorusElement alpha{g, static_cast<long>(c.k)};
  const TorusElement beta{invert(h), static_cast<long>(c.k)};
  for (long n = 1; n <= checks; ++n) {
    const NormalWord torus = torus_palangre(alpha, beta, phi, n, c.budget);
    const NormalWord direct = concat(palangre_left(psi, g, n, c.budget), palangre_right(psi, h, n, c.budget));
    if (torus != direct) {
      throw Error(ErrorKind::SpecMismatch, "torus cross-check failed at n = " + std::to_string(n));
    }
  }
  const FittedGrowth f = fit_growth(seq);
  r.csv = write_length_csv(seq);
  r.text << r.csv << fitted_string(f) << "\n"
         << "torus cross-check: ok for n <= " << checks << "\n";
  r.json["g"] = format_word(g);
  r.json["h"] = format_word(h);
  r.json["k"] = c.k;
  r.json["n_max"] = c.n_max;
  r.json["lengths"] = sequence_json(seq);
  r.json["fit"] = fit_json(f);
  r.json["torus_check"] = checks;
}

void abelian_job(const JobConfig& c, Report& r) {
  need(!c.matrix.empty() && !c.vector.empty(), "--matrix and --vector are required");
  const IntMatrix a = parse_matrix(c.matrix);
  const IntVector v = parse_vector(c.vector);
  const GrowthType orbit = orbit_growth(a, v);
  const GrowthType pal = palangre_growth(a, v);
  const VectorMinimalPoly mp = minimal_poly_of_vector(a, v);
  r.text << "(d, λ) = " << to_string(orbit) << "\n";
  r.text << "minimal polynomial of v: " << to_string(mp.poly) << "\n";
  if (orbit.poly) r.text << "λ is a root of " << to_string(*orbit.poly) << "\n";
  r.text << "palangre (d, λ) = " << to_string(pal) << "\n";
  r.json["orbit"] = growth_json(orbit);
  r.json["palangre"] = growth_json(pal);
  r.json["minimal_polynomial"] = to_string(mp.poly);
  if (c.oracle) {
    const auto seq = orbit_oracle(a, v, c.n_max);
    const FittedGrowth f = fit_growth(seq);
    const bool ok = matches(orbit, f, c.tol_lambda);
    r.csv = write_length_csv(seq);
    r.text << "oracle " << fitted_string(f) << (ok ? " agrees" : " DISAGREES") << "\n";
    r.json["oracle"] = fit_json(f);
    r.json["oracle_agrees"] = ok;
    if (!ok) throw Error(ErrorKind::SpecMismatch, "orbit oracle disagrees with the exact growth type");
  } else {
    r.csv = write_length_csv(orbit_oracle(a, v, c.n_max));
  }
}

std::string pad(std::string s, std::size_t width) {
  // Column widths count code points, not bytes.
  std::size_t chars = 0;
  for (unsigned char ch : s) chars += (ch & 0xC0) != 0x80;
  if (chars < width) s.append(width - chars, ' ');
  return s;
}

void ct_job(const JobConfig& c, Report& r) {
  need(!c.ct_path.empty(), "--ct is required");
  const CtMap ct = load_ct(c.ct_path);
  const TermGrowthTable t = assign_growth_types(ct);
  const auto& g = ct.graph;
  std::ostringstream& os = r.text;

  os << "vertex stabilisation power: " << t.power << "\n\nstrata\n";
  Json strata = Json::array();
  for (const auto& s : t.strata) {
    std::string edges;
    for (int e : s.edges) edges += (edges.empty() ? "" : " ") + g.edge(e).name;
    std::string kind = to_string(s.type);
    if (s.type == StratumType::NEG) kind += s.fixed ? " fixed" : s.linear ? " linear" : "";
    os << "  " << pad(std::to_string(s.height), 4) << pad(kind, 12) << pad(to_string(s.rate), 20) << edges << "\n";
    Json j;
    j["height"] = s.height;
    j["type"] = to_string(s.type);
    j["rate"] = growth_json(s.rate);
    j["linear"] = s.linear;
    j["fixed"] = s.fixed;
    j["edges"] = Json::array();
    for (int e : s.edges) j["edges"].push_back(g.edge(e).name);
    strata.push_back(j);
  }
  os << "\nterms\n";
  Json terms = Json::array();
  const auto term_row = [&](const std::string& kind, const std::string& name, const GrowthType& v) {
    os << "  " << pad(kind, 13) << pad(name, 12) << to_string(v) << "\n";
    Json j;
    j["kind"] = kind;
    j["name"] = name;
    j["growth"] = growth_json(v);
    terms.push_back(j);
  };
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (t.edges[e]) term_row("edge", g.edges[e].name, *t.edges[e]);
  }
  for (std::size_t i = 0; i < ct.inps.size(); ++i) term_row("inp", ct.inps[i].name, t.inps[i]);
  for (std::size_t i = 0; i < ct.exceptionals.size(); ++i) {
    term_row("exceptional", ct.exceptionals[i].name, t.exceptionals[i]);
  }
  for (std::size_t i = 0; i < ct.connecting.size(); ++i) term_row("connecting", ct.connecting[i].name, t.connecting[i]);

  Json turns = Json::array();
  if (!t.turns.empty()) os << "\nfat turns\n";
  for (const auto& tg : t.turns) {
    os << "  " << pad(to_string(tg.growth), 20) << tg.description << "\n";
    Json j;
    j["turn"] = tg.description;
    j["growth"] = growth_json(tg.growth);
    turns.push_back(j);
  }

  Json circuits = Json::array();
  bool all_agree = true;
  if (!ct.circuits.empty()) os << "\ncircuits\n";
  for (const auto& cd : ct.circuits) {
    const GrowthType predicted = circuit_growth(ct, t, cd.path, cd.splitting);
    Json j;
    j["name"] = cd.name;
    j["path"] = format_path(cd.path, g);
    j["predicted"] = growth_json(predicted);
    os << "  " << pad(cd.name, 10) << pad(to_string(predicted), 20);
    if (c.oracle) {
      need(c.n_max >= 12, "--n must be at least 12 for a fit");
      const FittedGrowth f = fit_growth(circuit_length_sequence(ct, cd.path, c.n_max, c.budget));
      const bool ok = matches(predicted, f, c.tol_lambda);
      all_agree = all_agree && ok;
      os << "oracle " << pad(fitted_string(f), 12) << (ok ? "agrees" : "DISAGREES") << "  ";
      j["oracle"] = fit_json(f);
      j["oracle_agrees"] = ok;
    }
    os << format_path(cd.path, g) << "\n";
    circuits.push_back(j);
  }
  const Spectrum bound = ct_combination_bound(ct, t);
  os << "\ncombination bound: " << to_string(bound) << "\n";

  r.json["ct"] = c.ct_path;
  r.json["power"] = t.power;
  r.json["strata"] = strata;
  r.json["terms"] = terms;
  r.json["turns"] = turns;
  r.json["circuits"] = circuits;
  r.json["combination_bound"] = Json::array();
  for (const auto& e : bound.entries()) r.json["combination_bound"].push_back(growth_json(e));
  if (!all_agree) throw Error(ErrorKind::SpecMismatch, "a circuit prediction disagrees with its oracle fit");
}

void spectrum_job(const JobConfig& c, Report& r) {
  need(!c.aut_path.empty(), "--aut is required");
  need(c.n_max >= 12, "--n must be at least 12 for a fit");
  const Automorphism phi = load_automorphism(c.aut_path);
  EnumerationOptions options;
  options.max_word_length = c.max_length;
  options.n_max = c.n_max;
  options.budget = c.budget;
  options.cluster_tolerance = c.tol_lambda;
  options.threads = c.threads;
  const EmpiricalSpectrum es = enumerate_spectrum(phi, options);

  r.text << "classes: " << es.classes.size() << "\n";
  Json entries = Json::array();
  const auto& list = es.spectrum.entries();
  for (std::size_t i = 0; i < list.size(); ++i) {
    r.text << "  " << pad(to_string(list[i], 4), 16) << es.witnesses[i].size() << " classes, e.g. "
           << format_word(es.witnesses[i].front()) << "\n";
    Json j;
    j["d"] = list[i].d;
    j["lambda"] = rounded(list[i].lambda);
    j["witnesses"] = Json::array();
    for (const auto& w : es.witnesses[i]) j["witnesses"].push_back(format_word(w));
    entries.push_back(j);
  }
  std::size_t truncated = 0;
  Json skipped = Json::array();
  for (const auto& cr : es.classes) {
    truncated += cr.truncated;
    if (!cr.skipped.empty()) skipped.push_back({{"word", format_word(cr.word)}, {"reason", cr.skipped}});
  }
  if (truncated) r.text << "budget-truncated classes: " << truncated << "\n";
  if (!skipped.empty()) r.text << "skipped classes: " << skipped.size() << "\n";
  r.json["max_length"] = c.max_length;
  r.json["n_max"] = c.n_max;
  r.json["classes"] = es.classes.size();
  r.json["spectrum"] = entries;
  r.json["truncated"] = truncated;
  r.json["skipped"] = skipped;

  if (!c.ct_path.empty()) {
    const CtMap ct = load_ct(c.ct_path);
    const Spectrum bound = ct_combination_bound(ct, assign_growth_types(ct));
    const bool inside = is_subset(es.spectrum, bound, c.tol_lambda);
    r.text << "combination bound: " << to_string(bound) << "\n"
           << "contained: " << (inside ? "yes" : "NO") << "\n";
    r.json["combination_bound"] = Json::array();
    for (const auto& e : bound.entries()) r.json["combination_bound"].push_back(growth_json(e));
    r.json["contained"] = inside;
    if (!inside) throw Error(ErrorKind::SpecMismatch, "enumerated spectrum escapes the combination bound");
  }
}

void sum_job(const JobConfig& c, Report& r) {
  need(c.d >= 0 && c.l1 >= 1 && c.l2 >= 1, "need --d >= 0 and --l1, --l2 >= 1");
  const GrowthType g = polexp_sum(c.d, c.l1, c.l2);
  r.text << to_string(g) << "\n";
  r.json["d"] = c.d;
  r.json["lambda1"] = rounded(c.l1);
  r.json["lambda2"] = rounded(c.l2);
  r.json["growth"] = growth_json(g);
  if (c.oracle) {
    std::vector<Integer> seq;
    for (int n = 0; n <= kSumTerms; ++n) {
      // Exact sums would need rational rates; doubles keep 15 digits, ample for a fit.
      long double s = 0;
      for (int k = 1; k <= n; ++k) {
        s += std::pow(static_cast<long double>(n - k), c.d) * std::pow(static_cast<long double>(c.l1), k) *
             std::pow(static_cast<long double>(c.l2), n - k);
      }
      mpz_class z;
      mpz_set_d(z.get_mpz_t(), static_cast<double>(std::round(s * 1e6L)));
      seq.push_back(z);
    }
    const FittedGrowth f = fit_growth(seq);
    const bool ok = matches(g, f, c.tol_lambda);
    r.text << "oracle " << fitted_string(f) << (ok ? " agrees" : " DISAGREES") << "\n";
    r.json["oracle"] = fit_json(f);
    r.json["oracle_agrees"] = ok;
    if (!ok) throw Error(ErrorKind::SpecMismatch, "summation oracle disagrees");
  }
}

}  // namespace

int run(const JobConfig& config, std::ostream& out, std::ostream& err) {
  Report r;
  r.json["command"] = config.command;
  int code = kExitOk;
  try {
    if (config.command == "element") {
      sequence_job(config, r, false);
    } else if (config.command == "class") {
      sequence_job(config, r, true);
    } else if (config.command == "palangre") {
      palangre_job(config, r);
    } else if (config.command == "abelian") {
      abelian_job(config, r);
    } else if (config.command == "ct") {
      ct_job(config, r);
    } else if (config.command == "spectrum") {
      spectrum_job(config, r);
    } else if (config.command == "sum") {
      sum_job(config, r);
    } else {
      throw Error(ErrorKind::ParseError, "unknown command '" + config.command + "'");
    }
  } catch (const Error& e) {
    err << "polexp: " << e.what() << "\n";
    code = e.kind() == ErrorKind::LengthBudgetExceeded ? kExitBudget : kExitValidation;
    r.json["error"] = {{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}};
  }
  r.json["exit_code"] = code;
  switch (config.format) {
    case OutputFormat::Text: out << r.text.str(); break;
    case OutputFormat::Csv: out << r.csv; break;
    case OutputFormat::Json: out << r.json.dump(2) << "\n"; break;
  }
  return code;
}

}  // namespace polexp
