#include "polexp/automorphism.hpp"

#include <fstream>
#include <optional>
#include <regex>
#include <sstream>

#include "polexp/error.hpp"

namespace polexp {

namespace {

void check_budget(std::size_t size, std::size_t budget) {
  if (size > budget) {
    throw Error(ErrorKind::LengthBudgetExceeded, "word exceeds " + std::to_string(budget) + " syllables");
  }
}

NormalWord generator_word(const GroupSpec& spec, int factor, int coordinate) {
  IntVector e(static_cast<std::size_t>(spec.rank(factor)));
  e[static_cast<std::size_t>(coordinate)] = 1;
  return NormalWord::abelian(factor, std::move(e));
}

/// Every generator, free letters first, then the basis of each factor.
std::vector<NormalWord> generators(const GroupSpec& spec) {
  std::vector<NormalWord> out;
  for (int i = 1; i <= spec.free_rank; ++i) out.push_back(NormalWord::letter(i));
  for (int j = 1; j <= spec.factor_count(); ++j) {
    for (int c = 0; c < spec.rank(j); ++c) out.push_back(generator_word(spec, j, c));
  }
  return out;
}

}  // namespace

GroupMap GroupMap::identity(const GroupSpec& spec) {
  GroupMap m;
  for (int i = 1; i <= spec.free_rank; ++i) m.free_images.push_back(NormalWord::letter(i));
  for (int j = 1; j <= spec.factor_count(); ++j) {
    m.factor_matrices.push_back(IntMatrix::identity(static_cast<std::size_t>(spec.rank(j))));
    m.factor_conjugators.emplace_back();
  }
  return m;
}

void GroupMap::validate(const GroupSpec& spec) const {
  if (static_cast<int>(free_images.size()) != spec.free_rank) {
    throw Error(ErrorKind::SpecMismatch, "expected " + std::to_string(spec.free_rank) + " free images");
  }
  if (static_cast<int>(factor_matrices.size()) != spec.factor_count() ||
      static_cast<int>(factor_conjugators.size()) != spec.factor_count()) {
    throw Error(ErrorKind::SpecMismatch, "expected data for " + std::to_string(spec.factor_count()) + " factors");
  }
  for (const auto& w : free_images) check_in_spec(w, spec);
  for (const auto& w : factor_conjugators) check_in_spec(w, spec);
  for (int j = 1; j <= spec.factor_count(); ++j) {
    const auto& a = factor_matrices[static_cast<std::size_t>(j - 1)];
    const auto k = static_cast<std::size_t>(spec.rank(j));
    if (a.rows() != k || a.cols() != k) {
      throw Error(ErrorKind::DimensionMismatch, "matrix for g" + std::to_string(j) + " must be " + std::to_string(k) +
                                                    "x" + std::to_string(k));
    }
    if (!a.is_unimodular()) {
      throw Error(ErrorKind::InvalidAutomorphism, "matrix for g" + std::to_string(j) + " has determinant " +
                                                      a.determinant().get_str());
    }
  }
}

Automorphism::Automorphism(GroupSpec spec, GroupMap forward, GroupMap inverse)
    : spec_(std::move(spec)), forward_(std::move(forward)), inverse_(std::move(inverse)) {
  spec_.validate();
  forward_.validate(spec_);
  inverse_.validate(spec_);
  for (const auto& x : generators(spec_)) {
    if (apply(inverse_, apply(forward_, x)) != x || apply(forward_, apply(inverse_, x)) != x) {
      throw Error(ErrorKind::InvalidAutomorphism, "declared inverse fails on generator " + format_word(x));
    }
  }
}

Automorphism Automorphism::identity(const GroupSpec& spec) {
  return Automorphism(spec, GroupMap::identity(spec), GroupMap::identity(spec));
}

Automorphism Automorphism::inverse() const { return Automorphism(spec_, inverse_, forward_); }

NormalWord apply(const GroupMap& map, const NormalWord& u, std::size_t budget) {
  WordBuilder b;
  std::size_t vi = 0;
  for (const auto c : u.codes()) {
    if (NormalWord::is_abelian_code(c)) {
      const auto j = static_cast<std::size_t>(NormalWord::factor_of(c) - 1);
      if (j >= map.factor_matrices.size()) throw Error(ErrorKind::SpecMismatch, "word uses an unknown factor");
      const auto& conj = map.factor_conjugators[j];
      b.append(conj);
      b.push_abelian(static_cast<int>(j + 1), map.factor_matrices[j] * u.vectors()[vi++]);
      b.append_inverse(conj);
    } else {
      const auto i = static_cast<std::size_t>((c > 0 ? c : -c) - 1);
      if (i >= map.free_images.size()) throw Error(ErrorKind::SpecMismatch, "word uses an unknown generator");
      if (c > 0) {
        b.append(map.free_images[i]);
      } else {
        b.append_inverse(map.free_images[i]);
      }
    }
    check_budget(b.size(), budget);
  }
  return std::move(b).finish();
}

NormalWord apply(const Automorphism& phi, const NormalWord& u, std::size_t budget) {
  return apply(phi.forward(), u, budget);
}

NormalWord iterate(const GroupMap& map, const NormalWord& u, long n, std::size_t budget) {
  if (n < 0) throw std::invalid_argument("negative iteration of a forward map");
  NormalWord cur = u;
  for (long i = 0; i < n; ++i) cur = apply(map, cur, budget);
  return cur;
}

NormalWord iterate(const Automorphism& phi, const NormalWord& u, long n, std::size_t budget) {
  return n >= 0 ? iterate(phi.forward(), u, n, budget) : iterate(phi.backward(), u, -n, budget);
}

std::vector<Integer> length_sequence(const Automorphism& phi, const NormalWord& u, int n_max, bool conjugacy,
                                     std::size_t budget) {
  std::vector<Integer> out;
  NormalWord cur = u;
  for (int n = 0; n <= n_max; ++n) {
    out.push_back(conjugacy ? conj_length(cur) : word_length(cur));
    if (n < n_max) {
      // Conjugacy length only depends on the class, so the orbit of the
      // cyclic core carries the same information at a fraction of the size.
      if (conjugacy) cur = cyclic_reduce(cur).core;
      cur = apply(phi, cur, budget);
    }
  }
  return out;
}

NormalWord palangre_left(const Automorphism& phi, const NormalWord& g, long n, std::size_t budget) {
  WordBuilder acc;
  NormalWord cur = g;
  for (long i = 0; i < n; ++i) {
    acc.append(cur);
    check_budget(acc.size(), budget);
    if (i + 1 < n) cur = apply(phi, cur, budget);
  }
  return std::move(acc).finish();
}

NormalWord palangre_right(const Automorphism& phi, const NormalWord& h, long n, std::size_t budget) {
  NormalWord acc;
  NormalWord cur = h;
  for (long i = 0; i < n; ++i) {
    acc = concat(cur, acc);
    check_budget(acc.size(), budget);
    if (i + 1 < n) cur = apply(phi, cur, budget);
  }
  return acc;
}

Automorphism compose(const Automorphism& phi, const Automorphism& psi) {
  if (!(phi.spec() == psi.spec())) throw Error(ErrorKind::SpecMismatch, "composing maps of different groups");
  // (phi o psi)|G_j : x -> phi(w_psi) w_phi (A_phi A_psi x) w_phi^-1 phi(w_psi)^-1
  auto combine = [](const GroupMap& outer, const GroupMap& inner) {
    GroupMap m;
    for (const auto& w : inner.free_images) m.free_images.push_back(apply(outer, w));
    for (std::size_t j = 0; j < inner.factor_matrices.size(); ++j) {
      m.factor_matrices.push_back(outer.factor_matrices[j] * inner.factor_matrices[j]);
      m.factor_conjugators.push_back(concat(apply(outer, inner.factor_conjugators[j]), outer.factor_conjugators[j]));
    }
    return m;
  };
  return Automorphism(phi.spec(), combine(phi.forward(), psi.forward()), combine(psi.backward(), phi.backward()));
}

Automorphism power(const Automorphism& phi, unsigned k) {
  Automorphism out = Automorphism::identity(phi.spec());
  for (unsigned i = 0; i < k; ++i) out = compose(phi, out);
  return out;
}

Automorphism twist_by_element(const Automorphism& phi, const NormalWord& a) {
  check_in_spec(a, phi.spec());
  auto twisted = [](const GroupMap& base, const NormalWord& c) {
    GroupMap m;
    for (const auto& w : base.free_images) m.free_images.push_back(concat(c, concat(w, invert(c))));
    m.factor_matrices = base.factor_matrices;
    for (const auto& w : base.factor_conjugators) m.factor_conjugators.push_back(concat(c, w));
    return m;
  };
  // (ad_a o phi)^-1 = ad_{phi^-1(a)^-1} o phi^-1
  const NormalWord back = invert(apply(phi.backward(), a));
  return Automorphism(phi.spec(), twisted(phi.forward(), a), twisted(phi.backward(), back));
}

TorusElement torus_mul(const TorusElement& alpha, const TorusElement& beta, const Automorphism& phi,
                       std::size_t budget) {
  NormalWord moved = iterate(phi, beta.g, alpha.k, budget);
  NormalWord g = concat(alpha.g, moved);
  check_budget(g.size(), budget);
  return {std::move(g), alpha.k + beta.k};
}

TorusElement torus_inverse(const TorusElement& alpha, const Automorphism& phi, std::size_t budget) {
  return {iterate(phi, invert(alpha.g), -alpha.k, budget), -alpha.k};
}

TorusElement torus_power(const TorusElement& alpha, long n, const Automorphism& phi, std::size_t budget) {
  const TorusElement base = n >= 0 ? alpha : torus_inverse(alpha, phi, budget);
  TorusElement acc{NormalWord{}, 0};
  for (long i = 0; i < (n >= 0 ? n : -n); ++i) acc = torus_mul(acc, base, phi, budget);
  return acc;
}

NormalWord torus_palangre(const TorusElement& alpha, const TorusElement& beta, const Automorphism& phi, long n,
                          std::size_t budget) {
  if (alpha.k != beta.k) {
    throw Error(ErrorKind::ExponentMismatch,
                "t-exponents " + std::to_string(alpha.k) + " and " + std::to_string(beta.k) + " differ");
  }
  if (alpha.k < 1) throw Error(ErrorKind::ExponentMismatch, "t-exponent must be positive");
  const TorusElement prod = torus_mul(torus_power(alpha, n, phi, budget), torus_power(beta, -n, phi, budget), phi, budget);
  if (prod.k != 0) throw std::logic_error("alpha^n beta^-n left the fibre");
  return prod.g;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

struct LineError {
  const std::string& source;
  int line;
  [[noreturn]] void operator()(const std::string& msg) const {
    throw Error(ErrorKind::ParseError, source + ":" + std::to_string(line) + ": " + msg);
  }
};

std::string trim(std::string s) {
  const auto hash = s.find('#');
  if (hash != std::string::npos) s.erase(hash);
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

GroupSpec parse_group_line(const std::string& line, const LineError& fail) {
  static const std::regex re(R"(group\s+free\s+(\d+)(?:\s+abelian\s+(\[[^\]]*\]))?)");
  std::smatch m;
  if (!std::regex_match(line, m, re)) fail("expected 'group free N abelian [k1,...]'");
  GroupSpec spec;
  spec.free_rank = std::stoi(m[1]);
  if (m[2].matched) {
    for (const auto& k : parse_vector(m[2].str())) {
      if (k < 1 || k > 64) fail("abelian ranks must lie in 1..64");
      spec.abelian_ranks.push_back(static_cast<int>(k.get_si()));
    }
  }
  try {
    spec.validate();
  } catch (const Error& e) {
    fail(e.what());
  }
  return spec;
}

int parse_factor(const std::string& token, const GroupSpec& spec, const LineError& fail) {
  static const std::regex re(R"(g(\d+))");
  std::smatch m;
  if (!std::regex_match(token, m, re)) fail("expected g<j>, got '" + token + "'");
  const int j = std::stoi(m[1]);
  if (j < 1 || j > spec.factor_count()) fail("factor " + token + " out of range");
  return j;
}

void parse_map_line(const std::string& line, const GroupSpec& spec, GroupMap& map, const LineError& fail) {
  static const std::regex map_re(R"(map\s+(\S+)\s*->\s*(.*))");
  static const std::regex matrix_re(R"(matrix\s+(\S+)\s*=\s*(.*))");
  static const std::regex conj_re(R"(conj\s+(\S+)\s*=\s*(.*))");
  std::smatch m;
  try {
    if (std::regex_match(line, m, map_re)) {
      const NormalWord lhs = parse_word(m[1].str(), spec);
      if (lhs.size() != 1 || lhs.codes()[0] <= 0 || NormalWord::is_abelian_code(lhs.codes()[0])) {
        fail("left side of map must be a free generator");
      }
      map.free_images[static_cast<std::size_t>(lhs.codes()[0] - 1)] = parse_word(m[2].str(), spec);
    } else if (std::regex_match(line, m, matrix_re)) {
      const int j = parse_factor(m[1].str(), spec, fail);
      map.factor_matrices[static_cast<std::size_t>(j - 1)] = parse_matrix(m[2].str());
    } else if (std::regex_match(line, m, conj_re)) {
      const int j = parse_factor(m[1].str(), spec, fail);
      map.factor_conjugators[static_cast<std::size_t>(j - 1)] = parse_word(m[2].str(), spec);
    } else {
      fail("unrecognised line '" + line + "'");
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ParseError && std::string(e.what()).find(fail.source + ":") == 0) throw;
    fail(e.what());
  }
}

}  // namespace

Automorphism parse_automorphism(std::string_view text, const std::string& source) {
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  std::optional<GroupSpec> spec;
  GroupMap forward, backward;
  GroupMap* target = nullptr;
  bool saw_inverse = false;
  bool in_inverse = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const LineError fail{source, line_no};
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (!spec) {
      spec = parse_group_line(line, fail);
      forward = GroupMap::identity(*spec);
      backward = GroupMap::identity(*spec);
      target = &forward;
      continue;
    }
    if (line.rfind("inverse", 0) == 0) {
      if (saw_inverse) fail("duplicate inverse block");
      if (trim(line.substr(7)) != "{") fail("expected 'inverse {'");
      saw_inverse = in_inverse = true;
      target = &backward;
      continue;
    }
    if (line == "}") {
      if (!in_inverse) fail("unmatched '}'");
      in_inverse = false;
      target = &forward;
      continue;
    }
    parse_map_line(line, *spec, *target, fail);
  }
  const LineError fail{source, line_no};
  if (!spec) fail("missing group line");
  if (in_inverse) fail("unterminated inverse block");
  if (!saw_inverse) fail("an inverse block is required");
  try {
    return Automorphism(*spec, std::move(forward), std::move(backward));
  } catch (const Error& e) {
    throw Error(e.kind(), source + ": " + e.what());
  }
}

Automorphism load_automorphism(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_automorphism(ss.str(), path);
}

std::string format_automorphism(const Automorphism& phi) {
  std::ostringstream os;
  const auto& spec = phi.spec();
  os << "group free " << spec.free_rank;
  if (spec.factor_count() > 0) {
    os << " abelian [";
    for (int j = 1; j <= spec.factor_count(); ++j) os << (j > 1 ? "," : "") << spec.rank(j);
    os << "]";
  }
  os << "\n";
  auto block = [&](const GroupMap& m, const char* indent) {
    for (std::size_t i = 0; i < m.free_images.size(); ++i) {
      os << indent << "map a" << i + 1 << " -> " << format_word(m.free_images[i]) << "\n";
    }
    for (std::size_t j = 0; j < m.factor_matrices.size(); ++j) {
      os << indent << "matrix g" << j + 1 << " = " << to_string(m.factor_matrices[j]) << "\n";
      if (!m.factor_conjugators[j].empty()) {
        os << indent << "conj g" << j + 1 << " = " << format_word(m.factor_conjugators[j]) << "\n";
      }
    }
  };
  block(phi.forward(), "");
  os << "inverse {\n";
  block(phi.backward(), "  ");
  os << "}\n";
  return os.str();
}

}  // namespace polexp
