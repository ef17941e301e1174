#include "polexp/ct.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <sstream>
#include <tuple>
#include <numeric>

#include "polexp/abelian.hpp"
#include "polexp/error.hpp"

namespace polexp {

int CtGraph::origin(int oriented) const { return oriented > 0 ? edge(oriented).origin : edge(oriented).terminus; }

int CtGraph::terminus(int oriented) const { return oriented > 0 ? edge(oriented).terminus : edge(oriented).origin; }

const CtEdge& CtGraph::edge(int oriented) const {
  const int i = oriented > 0 ? oriented : -oriented;
  if (i < 1 || i > static_cast<int>(edges.size())) {
    throw Error(ErrorKind::IndexOutOfRange, "edge " + std::to_string(oriented) + " out of range");
  }
  return edges[static_cast<std::size_t>(i - 1)];
}

int CtGraph::vertex_of_factor(int factor) const {
  for (std::size_t v = 0; v < vertices.size(); ++v) {
    if (vertices[v].factor == factor) return static_cast<int>(v);
  }
  throw Error(ErrorKind::IndexOutOfRange, "no vertex carries factor g" + std::to_string(factor));
}

GroupSpec CtMap::group_spec() const {
  GroupSpec spec;
  int factors = 0;
  for (const auto& v : graph.vertices) factors = std::max(factors, v.factor);
  spec.abelian_ranks.assign(static_cast<std::size_t>(factors), 0);
  for (const auto& v : graph.vertices) {
    if (v.factor) spec.abelian_ranks[static_cast<std::size_t>(v.factor - 1)] = v.rank;
  }
  spec.free_rank = static_cast<int>(graph.edges.size()) - static_cast<int>(graph.vertices.size()) + 1;
  return spec;
}

// ---------------------------------------------------------------------------
// Paths

namespace {

void add_into(IntVector& acc, const IntVector& v) {
  if (acc.empty()) {
    acc = v;
    return;
  }
  if (v.empty()) return;
  acc += v;
}

IntVector negated(const IntVector& v) { return -v; }

/// Accumulates a path while keeping it tight.
class PathBuilder {
 public:
  PathBuilder(const CtGraph& g, int start, IntVector head) : graph_(g) {
    path_.start = start;
    path_.head = std::move(head);
  }

  void push(int edge, IntVector element) {
    if (!path_.steps.empty() && path_.steps.back().edge == -edge && is_zero(path_.steps.back().element)) {
      path_.steps.pop_back();
      add_into(last_element(), element);
      return;
    }
    if (path_.end_vertex(graph_) != graph_.origin(edge)) {
      throw Error(ErrorKind::InconsistentPath, "edge " + graph_.edge(edge).name + " does not start at vertex " +
                                                   graph_.vertices[static_cast<std::size_t>(path_.end_vertex(graph_))].name);
    }
    path_.steps.push_back({edge, std::move(element)});
  }

  void append(const GraphPath& p) {
    if (p.start != path_.end_vertex(graph_)) {
      throw Error(ErrorKind::InconsistentPath, "paths do not join");
    }
    add_into(last_element(), p.head);
    for (const auto& s : p.steps) push(s.edge, s.element);
  }

  IntVector& last_element() { return path_.steps.empty() ? path_.head : path_.steps.back().element; }
  std::size_t size() const { return path_.steps.size(); }
  GraphPath finish() && { return std::move(path_); }

 private:
  const CtGraph& graph_;
  GraphPath path_;
};

}  // namespace

GraphPath reverse(const GraphPath& p, const CtGraph& g) {
  GraphPath r;
  r.start = p.end_vertex(g);
  r.head = negated(p.steps.empty() ? p.head : p.steps.back().element);
  for (std::size_t i = p.steps.size(); i-- > 0;) {
    const IntVector& before = i == 0 ? p.head : p.steps[i - 1].element;
    r.steps.push_back({-p.steps[i].edge, negated(before)});
  }
  return r;
}

GraphPath join(const GraphPath& p, const GraphPath& q, const CtGraph& g) {
  if (p.end_vertex(g) != q.start) throw Error(ErrorKind::InconsistentPath, "paths do not join");
  GraphPath r = p;
  add_into(r.steps.empty() ? r.head : r.steps.back().element, q.head);
  r.steps.insert(r.steps.end(), q.steps.begin(), q.steps.end());
  return r;
}

bool equivalent(const GraphPath& p, const GraphPath& q) {
  if (p.start != q.start || p.steps.size() != q.steps.size()) return false;
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    if (p.steps[i].edge != q.steps[i].edge) return false;
    if (i + 1 < p.steps.size() && p.steps[i].element != q.steps[i].element) return false;
  }
  return true;
}

GraphPath tighten(const GraphPath& p, const CtGraph& g) {
  PathBuilder b(g, p.start, p.head);
  for (const auto& s : p.steps) b.push(s.edge, s.element);
  return std::move(b).finish();
}

GraphPath tighten_circuit(const GraphPath& c, const CtGraph& g) {
  if (!c.empty() && c.end_vertex(g) != c.start) throw Error(ErrorKind::InconsistentPath, "circuit is not closed");
  GraphPath open = c;
  if (!open.empty()) {
    add_into(open.steps.back().element, open.head);
    open.head = g.unit(open.start);
  }
  GraphPath t = tighten(open, g);
  if (!t.empty()) {
    add_into(t.steps.back().element, t.head);
    t.head = g.unit(t.start);
  }
  // Degenerate wrap turn: e_p 1 e_1 with e_1 = e_p^-1.
  while (t.steps.size() >= 2 && t.steps.front().edge == -t.steps.back().edge && is_zero(t.steps.back().element)) {
    const std::size_t p = t.steps.size();
    if (p == 2) {
      GraphPath point;
      point.start = g.terminus(t.steps.front().edge);
      point.head = t.steps.front().element;
      return point;
    }
    IntVector wrap = t.steps[p - 2].element;
    add_into(wrap, t.steps.front().element);
    std::vector<PathStep> inner(t.steps.begin() + 1, t.steps.end() - 1);
    inner.back().element = std::move(wrap);
    t.start = g.origin(inner.front().edge);
    t.steps = std::move(inner);
    t.head = g.unit(t.start);
  }
  return t;
}

Integer path_length(const GraphPath& p) {
  Integer len = static_cast<long>(p.steps.size());
  for (std::size_t i = 0; i + 1 < p.steps.size(); ++i) len += l1_norm(p.steps[i].element);
  return len;
}

Integer circuit_length(const GraphPath& c) {
  Integer len = static_cast<long>(c.steps.size());
  len += l1_norm(c.head);
  for (const auto& s : c.steps) len += l1_norm(s.element);
  return len;
}

std::string to_string(TermKind k) {
  switch (k) {
    case TermKind::Edge: return "edge";
    case TermKind::Inp: return "inp";
    case TermKind::Exceptional: return "exceptional";
    case TermKind::Connecting: return "connecting";
  }
  return "?";
}

std::string to_string(StratumType t) {
  switch (t) {
    case StratumType::EG: return "EG";
    case StratumType::NEG: return "NEG";
    case StratumType::Zero: return "zero";
  }
  return "?";
}

GraphPath flatten(const SplitPath& s, const CtGraph& g) {
  GraphPath out;
  if (s.terms.empty()) return out;
  out.start = s.terms.front().path.start;
  out.head = s.circuit ? g.unit(out.start) : s.head;
  for (std::size_t i = 0; i < s.terms.size(); ++i) {
    const auto& steps = s.terms[i].path.steps;
    out.steps.insert(out.steps.end(), steps.begin(), steps.end());
    out.steps.back().element = s.junctions[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Images

namespace {

IntVector act(const CtMap& ct, int vertex, const IntVector& x) {
  const auto& v = ct.graph.vertices[static_cast<std::size_t>(vertex)];
  if (!v.factor) return x;
  return ct.factor_matrices[static_cast<std::size_t>(v.factor - 1)] * x;
}

int image_vertex(const CtMap& ct, int v) { return ct.vertex_image[static_cast<std::size_t>(v)]; }

/// Element sitting at f(v) obtained from x at v plus contributions already
/// living at f(v).
IntVector moved(const CtMap& ct, int v, const IntVector& x) {
  const int w = image_vertex(ct, v);
  IntVector out = ct.graph.unit(w);
  if (!x.empty()) add_into(out, act(ct, v, x));
  return out;
}

void check_size(std::size_t size, std::size_t budget) {
  if (size > budget) {
    throw Error(ErrorKind::LengthBudgetExceeded, "path exceeds " + std::to_string(budget) + " edges");
  }
}

GraphPath edge_image_path(const CtMap& ct, int edge) {
  const GraphPath p = flatten(ct.edge_images[static_cast<std::size_t>(std::abs(edge) - 1)], ct.graph);
  return edge > 0 ? p : reverse(p, ct.graph);
}

/// Untightened image as a builder result; tightening happens on the fly.
GraphPath raw_image(const CtMap& ct, const GraphPath& p, std::size_t budget) {
  PathBuilder b(ct.graph, image_vertex(ct, p.start), moved(ct, p.start, p.head));
  for (const auto& s : p.steps) {
    b.append(edge_image_path(ct, s.edge));
    add_into(b.last_element(), act(ct, ct.graph.terminus(s.edge), s.element));
    check_size(b.size(), budget);
  }
  return std::move(b).finish();
}

}  // namespace

GraphPath f_sharp(const CtMap& ct, const GraphPath& p, std::size_t budget) { return raw_image(ct, p, budget); }

GraphPath f_sharp_circuit(const CtMap& ct, const GraphPath& c, std::size_t budget) {
  if (c.empty()) {
    GraphPath point;
    point.start = image_vertex(ct, c.start);
    point.head = moved(ct, c.start, c.head);
    return point;
  }
  GraphPath open = c;
  add_into(open.steps.back().element, open.head);
  open.head = ct.graph.unit(open.start);
  return tighten_circuit(raw_image(ct, open, budget), ct.graph);
}

std::vector<Integer> circuit_length_sequence(const CtMap& ct, const GraphPath& c, int n_max, std::size_t budget) {
  std::vector<Integer> out;
  GraphPath cur = tighten_circuit(c, ct.graph);
  for (int n = 0; n <= n_max; ++n) {
    out.push_back(circuit_length(cur));
    if (n < n_max) cur = f_sharp_circuit(ct, cur, budget);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Terms

namespace {

GraphPath with_trivial_ends(GraphPath p, const CtGraph& g) {
  p.head = g.unit(p.start);
  if (!p.steps.empty()) p.steps.back().element = g.unit(p.end_vertex(g));
  return p;
}

GraphPath exceptional_path(const CtMap& ct, const ExceptionalDecl& x, long p) {
  const auto& g = ct.graph;
  GraphPath out;
  out.start = g.origin(x.e);
  out.head = g.unit(out.start);
  out.steps.push_back({x.e, g.unit(g.terminus(x.e))});
  GraphPath body = with_trivial_ends(x.w, g);
  IntVector closing = x.w.steps.back().element;
  if (p < 0) {
    body = with_trivial_ends(reverse(body, g), g);
    closing = negated(closing);
  }
  for (long c = 0; c < std::abs(p); ++c) {
    if (c > 0) add_into(out.steps.back().element, closing);
    out.steps.insert(out.steps.end(), body.steps.begin(), body.steps.end());
  }
  out.steps.push_back({-x.e2, g.unit(g.origin(x.e2))});
  return out;
}

TermInstance make_term(const CtMap& ct, TermKind kind, int id, bool reversed, long exponent = 0) {
  const auto& g = ct.graph;
  TermInstance t{kind, id, reversed, exponent, {}};
  GraphPath forward;
  switch (kind) {
    case TermKind::Edge:
      forward.start = g.origin(id);
      forward.head = g.unit(forward.start);
      forward.steps.push_back({id, g.unit(g.terminus(id))});
      break;
    case TermKind::Inp: forward = ct.inps.at(static_cast<std::size_t>(id)).path; break;
    case TermKind::Connecting: forward = ct.connecting.at(static_cast<std::size_t>(id)).path; break;
    case TermKind::Exceptional:
      forward = exceptional_path(ct, ct.exceptionals.at(static_cast<std::size_t>(id)), exponent);
      break;
  }
  forward = with_trivial_ends(std::move(forward), g);
  t.path = reversed ? with_trivial_ends(reverse(forward, g), g) : std::move(forward);
  return t;
}

int path_height(const GraphPath& p, const CtGraph& g) {
  int h = 0;
  for (const auto& s : p.steps) h = std::max(h, g.edge(s.edge).height);
  return h;
}

std::string term_name(const CtMap& ct, const TermInstance& t) {
  std::string name;
  switch (t.kind) {
    case TermKind::Edge: name = ct.graph.edge(t.id).name; break;
    case TermKind::Inp: name = ct.inps[static_cast<std::size_t>(t.id)].name; break;
    case TermKind::Connecting: name = ct.connecting[static_cast<std::size_t>(t.id)].name; break;
    case TermKind::Exceptional:
      name = ct.exceptionals[static_cast<std::size_t>(t.id)].name + "(" + std::to_string(t.exponent) + ")";
      break;
  }
  return t.reversed ? name + "^-1" : name;
}

/// Edges of zero strata: every edge of that height maps strictly lower.
std::vector<bool> zero_edges(const CtMap& ct) {
  const auto& g = ct.graph;
  std::map<int, bool> lower;
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const int h = g.edges[i].height;
    const bool down = path_height(flatten(ct.edge_images[i], g), g) < h;
    auto [it, fresh] = lower.emplace(h, down);
    if (!fresh) it->second = it->second && down;
  }
  std::vector<bool> out(g.edges.size());
  for (std::size_t i = 0; i < g.edges.size(); ++i) out[i] = lower[g.edges[i].height];
  return out;
}

bool matches_at(const GraphPath& term, const std::vector<PathStep>& steps, std::size_t at) {
  if (term.steps.size() > steps.size() - at) return false;
  for (std::size_t k = 0; k < term.steps.size(); ++k) {
    if (term.steps[k].edge != steps[at + k].edge) return false;
    if (k + 1 < term.steps.size() && term.steps[k].element != steps[at + k].element) return false;
  }
  return true;
}

/// Terms that can start at position `at`, most specific first.
std::vector<TermInstance> candidates(const CtMap& ct, const std::vector<bool>& zero, const std::vector<PathStep>& steps,
                                     std::size_t at) {
  std::vector<TermInstance> out;
  const std::size_t remaining = steps.size() - at;
  const int first = steps[at].edge;
  for (std::size_t x = 0; x < ct.exceptionals.size(); ++x) {
    const auto& decl = ct.exceptionals[x];
    const long copies = static_cast<long>(remaining >= 2 ? (remaining - 2) / std::max<std::size_t>(decl.w.size(), 1) : 0);
    for (bool rev : {false, true}) {
      if (first != (rev ? decl.e2 : decl.e)) continue;
      for (long p = copies; p >= -copies; --p) {
        auto t = make_term(ct, TermKind::Exceptional, static_cast<int>(x), rev, p);
        if (matches_at(t.path, steps, at)) out.push_back(std::move(t));
      }
    }
  }
  for (auto kind : {TermKind::Connecting, TermKind::Inp}) {
    const std::size_t n = kind == TermKind::Inp ? ct.inps.size() : ct.connecting.size();
    for (std::size_t i = 0; i < n; ++i) {
      for (bool rev : {false, true}) {
        auto t = make_term(ct, kind, static_cast<int>(i), rev);
        if (matches_at(t.path, steps, at)) out.push_back(std::move(t));
      }
    }
  }
  if (!zero[static_cast<std::size_t>(std::abs(first) - 1)]) {
    out.push_back(make_term(ct, TermKind::Edge, std::abs(first), first < 0));
  }
  return out;
}

bool survives_iteration(const CtMap& ct, const SplitPath& s) {
  try {
    SplitPath cur = s;
    for (int k = 0; k < kCheckIterations; ++k) cur = image(ct, cur);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NotCompletelySplit) return false;
    throw;
  }
  return true;
}

/// Depth-first search over decompositions of `steps` (a path, or a circuit
/// cut open at a turn) into terms ending at allowed positions.
struct SplitSearch {
  const CtMap& ct;
  std::vector<bool> zero;
  const std::vector<PathStep>& steps;
  IntVector head;
  bool circuit;
  bool verify;
  std::vector<bool> allowed_end;
  int complete_budget = 256;

  std::vector<TermInstance> chosen;
  std::optional<SplitPath> found;

  SplitPath assemble() const {
    SplitPath s;
    s.circuit = circuit;
    s.head = head;
    std::size_t pos = 0;
    for (const auto& t : chosen) {
      pos += t.path.steps.size();
      s.terms.push_back(t);
      s.junctions.push_back(steps[pos - 1].element);
    }
    return s;
  }

  bool run(std::size_t at) {
    if (at == steps.size()) {
      if (complete_budget-- <= 0) return true;
      SplitPath s = assemble();
      if (!verify || survives_iteration(ct, s)) {
        found = std::move(s);
        return true;
      }
      return false;
    }
    for (auto& t : candidates(ct, zero, steps, at)) {
      const std::size_t end = at + t.path.steps.size();
      if (!allowed_end[end]) continue;
      chosen.push_back(std::move(t));
      if (run(end)) return true;
      chosen.pop_back();
    }
    return false;
  }
};

std::optional<SplitPath> search(const CtMap& ct, const std::vector<PathStep>& steps, const IntVector& head, bool circuit,
                                bool verify, const std::vector<std::size_t>& cuts) {
  if (steps.empty()) return std::nullopt;
  SplitSearch s{ct, zero_edges(ct), steps, head, circuit, verify, {}, 256, {}, std::nullopt};
  s.allowed_end.assign(steps.size() + 1, cuts.empty());
  for (std::size_t c : cuts) {
    if (c <= steps.size()) s.allowed_end[c] = true;
  }
  s.allowed_end[steps.size()] = true;
  s.run(0);
  return s.found;
}

std::vector<PathStep> rotated(const std::vector<PathStep>& steps, std::size_t r) {
  std::vector<PathStep> out(steps.begin() + static_cast<long>(r), steps.end());
  out.insert(out.end(), steps.begin(), steps.begin() + static_cast<long>(r));
  return out;
}

GraphPath closed_form(const GraphPath& c, const CtGraph& g) {
  GraphPath t = tighten_circuit(c, g);
  return t;
}

}  // namespace

std::optional<SplitPath> find_splitting(const CtMap& ct, const GraphPath& p, bool circuit) {
  if (!circuit) return search(ct, p.steps, p.head, false, true, {});
  const GraphPath c = closed_form(p, ct.graph);
  for (std::size_t r = 0; r < c.steps.size(); ++r) {
    auto s = search(ct, rotated(c.steps, r), {}, true, true, {});
    if (s) return s;
  }
  return std::nullopt;
}

std::optional<SplitPath> split_at(const CtMap& ct, const GraphPath& c, const std::vector<std::size_t>& cuts) {
  if (cuts.empty() || c.empty()) return std::nullopt;
  const std::size_t r = cuts.front() % c.steps.size();
  std::vector<std::size_t> shifted;
  for (std::size_t x : cuts) shifted.push_back((x + c.steps.size() - r) % c.steps.size());
  GraphPath open = c;
  add_into(open.steps.back().element, open.head);
  return search(ct, rotated(open.steps, r), {}, true, true, shifted);
}

SplitPath reverse(const SplitPath& s, const CtGraph& g) {
  SplitPath r;
  r.circuit = s.circuit;
  const std::size_t q = s.terms.size();
  if (!s.circuit) r.head = negated(s.junctions.back());
  for (std::size_t k = 0; k < q; ++k) {
    const std::size_t i = q - 1 - k;
    TermInstance t = s.terms[i];
    t.reversed = !t.reversed;
    t.path = with_trivial_ends(reverse(t.path, g), g);
    r.terms.push_back(std::move(t));
    const IntVector& before = i > 0 ? s.junctions[i - 1] : (s.circuit ? s.junctions.back() : s.head);
    r.junctions.push_back(negated(before));
  }
  return r;
}

SplitPath term_image(const CtMap& ct, const TermInstance& t) {
  const auto& g = ct.graph;
  switch (t.kind) {
    case TermKind::Edge: {
      const auto& s = ct.edge_images[static_cast<std::size_t>(t.id - 1)];
      return t.reversed ? reverse(s, g) : s;
    }
    case TermKind::Connecting: {
      const auto& s = ct.connecting_images.at(static_cast<std::size_t>(t.id));
      return t.reversed ? reverse(s, g) : s;
    }
    case TermKind::Inp:
    case TermKind::Exceptional: {
      const GraphPath img = f_sharp(ct, t.path);
      TermInstance next = t;
      if (t.kind == TermKind::Exceptional) {
        const auto& x = ct.exceptionals[static_cast<std::size_t>(t.id)];
        next = make_term(ct, TermKind::Exceptional, t.id, t.reversed, t.exponent + x.d - x.d2);
      }
      if (!equivalent(img, next.path)) {
        throw Error(ErrorKind::StrataInvalid, "declared " + to_string(t.kind) + " " + term_name(ct, t) +
                                                  " does not map to " + format_path(next.path, g) + " but to " +
                                                  format_path(img, g));
      }
      SplitPath s;
      s.head = img.head;
      s.terms.push_back(std::move(next));
      s.junctions.push_back(img.steps.back().element);
      return s;
    }
  }
  throw std::logic_error("unknown term kind");
}

SplitPath image(const CtMap& ct, const SplitPath& s) {
  const auto& g = ct.graph;
  SplitPath out;
  out.circuit = s.circuit;
  const std::size_t q = s.terms.size();
  std::vector<SplitPath> imgs;
  imgs.reserve(q);
  for (const auto& t : s.terms) imgs.push_back(term_image(ct, t));
  if (!s.circuit) {
    const int v = s.terms.front().path.start;
    out.head = moved(ct, v, s.head);
    add_into(out.head, imgs.front().head);
  }
  for (std::size_t i = 0; i < q; ++i) {
    const auto& img = imgs[i];
    for (std::size_t k = 0; k < img.terms.size(); ++k) {
      out.terms.push_back(img.terms[k]);
      if (k + 1 < img.terms.size()) out.junctions.push_back(img.junctions[k]);
    }
    const int v = s.terms[i].path.end_vertex(g);
    IntVector j = moved(ct, v, s.junctions[i]);
    add_into(j, img.junctions.back());
    const bool turn = i + 1 < q || s.circuit;
    if (turn) {
      const auto& next = imgs[(i + 1) % q];
      add_into(j, next.head);
      const int last_edge = img.terms.back().path.steps.back().edge;
      const int first_edge = next.terms.front().path.steps.front().edge;
      if (first_edge == -last_edge && is_zero(j)) {
        throw Error(ErrorKind::NotCompletelySplit, "images of " + term_name(ct, s.terms[i]) + " and " +
                                                       term_name(ct, s.terms[(i + 1) % q]) + " cancel");
      }
    }
    out.junctions.push_back(std::move(j));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Strata

namespace {

bool strongly_connected(const std::vector<std::vector<long>>& m) {
  const std::size_t n = m.size();
  for (bool transpose : {false, true}) {
    std::vector<bool> seen(n);
    std::vector<std::size_t> stack = {0};
    seen[0] = true;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      for (std::size_t j = 0; j < n; ++j) {
        const long w = transpose ? m[j][i] : m[i][j];
        if (w > 0 && !seen[j]) {
          seen[j] = true;
          stack.push_back(j);
        }
      }
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) return false;
  }
  return true;
}

/// Perron root by power iteration on I + M (primitive when M is irreducible).
double power_iteration(const std::vector<std::vector<long>>& m) {
  const std::size_t n = m.size();
  std::vector<long double> x(n, 1.0L);
  long double lambda = 0;
  for (int iter = 0; iter < 100000; ++iter) {
    std::vector<long double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = x[i];
      for (std::size_t j = 0; j < n; ++j) y[i] += static_cast<long double>(m[i][j]) * x[j];
    }
    long double norm = 0;
    for (auto v : y) norm = std::max(norm, v);
    long double ratio = 0;
    for (std::size_t i = 0; i < n; ++i) ratio = std::max(ratio, y[i] / x[i]);
    for (auto& v : y) v /= norm;
    const bool done = iter > 10 && std::abs(ratio - 1 - lambda) <= 1e-15L * ratio;
    lambda = ratio - 1;
    x = std::move(y);
    if (done) break;
  }
  // Collatz-Wielandt bounds pinch the root; take the midpoint.
  long double lo = 1e300L, hi = 0;
  for (std::size_t i = 0; i < n; ++i) {
    long double y = 0;
    for (std::size_t j = 0; j < n; ++j) y += static_cast<long double>(m[i][j]) * x[j];
    lo = std::min(lo, y / x[i]);
    hi = std::max(hi, y / x[i]);
  }
  return static_cast<double>((lo + hi) / 2);
}

GrowthType perron_root(const std::vector<std::vector<long>>& m, int height) {
  const double approx = power_iteration(m);
  std::vector<std::vector<Integer>> rows;
  for (const auto& r : m) {
    std::vector<Integer> row;
    for (long v : r) row.emplace_back(v);
    rows.push_back(std::move(row));
  }
  const IntPolynomial chi = characteristic_polynomial(IntMatrix::from_rows(rows));
  std::optional<PolynomialRoot> best;
  for (const auto& r : roots(chi)) {
    if (std::abs(r.value.imag()) > 1e-9 * std::max(1.0, std::abs(r.value))) continue;
    if (!best || r.value.real() > best->value.real()) best = r;
  }
  if (!best || !lambda_equal(best->value.real(), approx, 1e-9)) {
    throw std::logic_error("Perron root of stratum " + std::to_string(height) +
                           " disagrees with the characteristic polynomial");
  }
  return {0, best->value.real(), best->factor};
}

}  // namespace

std::vector<StratumInfo> classify_strata(const CtMap& ct) {
  const auto& g = ct.graph;
  std::map<int, std::vector<int>> by_height;
  for (std::size_t i = 0; i < g.edges.size(); ++i) by_height[g.edges[i].height].push_back(static_cast<int>(i + 1));

  std::vector<StratumInfo> out;
  for (const auto& [h, edges] : by_height) {
    StratumInfo s;
    s.height = h;
    s.edges = edges;
    bool lower = true;
    for (int e : edges) {
      const int ih = path_height(flatten(ct.edge_images[static_cast<std::size_t>(e - 1)], g), g);
      if (ih > h) {
        throw Error(ErrorKind::StrataInvalid, "image of edge " + g.edge(e).name + " reaches height " +
                                                  std::to_string(ih) + " above its own height " + std::to_string(h));
      }
      lower = lower && ih < h;
    }
    if (lower) {
      for (int e : edges) {
        for (int v : {g.edge(e).origin, g.edge(e).terminus}) {
          if (g.vertices[static_cast<std::size_t>(v)].factor) {
            throw Error(ErrorKind::StrataInvalid, "zero stratum " + std::to_string(h) + " contains the fat vertex " +
                                                      g.vertices[static_cast<std::size_t>(v)].name);
          }
        }
      }
      s.type = StratumType::Zero;
      out.push_back(std::move(s));
      continue;
    }

    const std::size_t n = edges.size();
    s.transition.assign(n, std::vector<long>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
      for (const auto& step : flatten(ct.edge_images[static_cast<std::size_t>(edges[i] - 1)], g).steps) {
        const auto it = std::find(edges.begin(), edges.end(), std::abs(step.edge));
        if (it != edges.end()) ++s.transition[i][static_cast<std::size_t>(it - edges.begin())];
      }
    }

    if (n == 1 && s.transition[0][0] == 1) {
      const int e = edges[0];
      const auto& img = ct.edge_images[static_cast<std::size_t>(e - 1)];
      // A fixed edge may also have been matched by a declared INP equal to it.
      const auto is_e = [&](const TermInstance& t) {
        if (t.kind == TermKind::Edge) return t.id == e && !t.reversed;
        return t.kind == TermKind::Inp && t.path.steps.size() == 1 && t.path.steps[0].edge == e;
      };
      std::vector<TermInstance> rest;
      if (is_e(img.terms.front())) {
        rest.assign(img.terms.begin() + 1, img.terms.end());
      } else if (is_e(img.terms.back())) {
        s.reversed = true;
        rest.assign(img.terms.begin(), img.terms.end() - 1);
      } else {
        throw Error(ErrorKind::StrataInvalid, "NEG edge " + g.edge(e).name + " must map to g e . u or u . e g");
      }
      for (const auto& t : rest) {
        if (path_height(t.path, g) >= h) {
          throw Error(ErrorKind::StrataInvalid, "NEG edge " + g.edge(e).name + ": suffix term " + term_name(ct, t) +
                                                    " is not of lower height");
        }
      }
      s.type = StratumType::NEG;
      s.fixed = rest.empty();
      if (!s.fixed) {
        SplitPath u;
        const std::size_t first = s.reversed ? 0 : 1;
        u.head = g.unit(rest.front().path.start);
        u.terms = rest;
        u.junctions.assign(img.junctions.begin() + static_cast<long>(first),
                           img.junctions.begin() + static_cast<long>(first + rest.size()));
        const GraphPath up = flatten(u, g);
        s.linear = equivalent(f_sharp(ct, up), up);
      }
      out.push_back(std::move(s));
      continue;
    }

    if (!strongly_connected(s.transition)) {
      throw Error(ErrorKind::StrataInvalid, "transition matrix of stratum " + std::to_string(h) + " is reducible");
    }
    s.type = StratumType::EG;
    s.rate = perron_root(s.transition, h);
    if (!(s.rate.lambda > 1 + 1e-9)) {
      throw Error(ErrorKind::StrataInvalid, "stratum " + std::to_string(h) + " has Perron-Frobenius eigenvalue 1");
    }
    out.push_back(std::move(s));
  }
  return out;
}

int vertex_stabilization_power(const CtMap& ct) {
  const std::size_t n = ct.vertex_image.size();
  long cycle_lcm = 1;
  int tail = 0;
  for (std::size_t v = 0; v < n; ++v) {
    // Walk until a repeat: the first repeated vertex closes the cycle.
    std::vector<int> seen(n, -1);
    int cur = static_cast<int>(v);
    int step = 0;
    while (seen[static_cast<std::size_t>(cur)] < 0) {
      seen[static_cast<std::size_t>(cur)] = step++;
      cur = ct.vertex_image[static_cast<std::size_t>(cur)];
    }
    tail = std::max(tail, seen[static_cast<std::size_t>(cur)]);
    cycle_lcm = std::lcm(cycle_lcm, static_cast<long>(step - seen[static_cast<std::size_t>(cur)]));
  }
  long p = cycle_lcm;
  while (p < tail) p += cycle_lcm;
  return static_cast<int>(p);
}

CtMap ct_power(const CtMap& ct, int p) {
  if (p <= 1) return ct;
  CtMap out = ct;
  for (std::size_t v = 0; v < ct.vertex_image.size(); ++v) {
    int w = static_cast<int>(v);
    for (int k = 0; k < p; ++k) w = ct.vertex_image[static_cast<std::size_t>(w)];
    out.vertex_image[v] = w;
  }
  for (auto& m : out.factor_matrices) m = m.pow(static_cast<unsigned long>(p));
  for (auto& x : out.exceptionals) {
    x.d *= p;
    x.d2 *= p;
  }
  auto iterate_split = [&](SplitPath s) {
    for (int k = 1; k < p; ++k) s = image(ct, s);
    return s;
  };
  for (std::size_t i = 0; i < ct.edge_images.size(); ++i) out.edge_images[i] = iterate_split(ct.edge_images[i]);
  for (std::size_t i = 0; i < ct.connecting_images.size(); ++i) {
    out.connecting_images[i] = iterate_split(ct.connecting_images[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Growth types

namespace {

std::tuple<TermKind, int, bool> term_key(const TermInstance& t) { return {t.kind, t.id, t.reversed}; }

/// Orbit of a term under "last term of the image" (or first term), with the
/// tail (or head) element picked up at each step.
struct TermOrbit {
  std::vector<TermInstance> terms;
  std::vector<IntVector> elements;
  std::size_t preperiod = 0;
  std::size_t period = 0;
};

TermOrbit term_orbit(const CtMap& ct, const TermInstance& start, bool last, std::size_t limit) {
  TermOrbit o;
  std::map<std::tuple<TermKind, int, bool>, std::size_t> seen;
  TermInstance cur = start;
  for (std::size_t k = 0; k <= limit; ++k) {
    const auto [it, fresh] = seen.emplace(term_key(cur), k);
    if (!fresh) {
      o.preperiod = it->second;
      o.period = k - it->second;
      return o;
    }
    const SplitPath img = term_image(ct, cur);
    o.terms.push_back(cur);
    o.elements.push_back(last ? img.junctions.back() : img.head);
    cur = last ? img.terms.back() : img.terms.front();
  }
  throw Error(ErrorKind::PeriodNotFound, "term " + term_name(ct, start) + " has no period within " +
                                             std::to_string(limit) + " iterations");
}

/// Extends an orbit in place until it has n entries.
void extend_orbit(const CtMap& ct, TermOrbit& o, bool last, std::size_t n) {
  while (o.terms.size() < n) {
    const SplitPath prev = term_image(ct, o.terms.back());
    const TermInstance cur = last ? prev.terms.back() : prev.terms.front();
    const SplitPath img = term_image(ct, cur);
    o.terms.push_back(cur);
    o.elements.push_back(last ? img.junctions.back() : img.head);
  }
}

void raise(std::optional<GrowthType>& acc, const GrowthType& g) {
  if (!acc || compare(*acc, g) < 0) acc = g;
}

}  // namespace

GrowthType fat_turn_growth(const CtMap& ct, const TermInstance& theta, const IntVector& g, const TermInstance& theta2,
                           int vertex) {
  const auto& v = ct.graph.vertices.at(static_cast<std::size_t>(vertex));
  if (!v.factor) throw Error(ErrorKind::IndexOutOfRange, "vertex " + v.name + " is not fat");
  const IntMatrix& a = ct.factor_matrices[static_cast<std::size_t>(v.factor - 1)];
  const std::size_t limit =
      2 * (2 * ct.graph.edges.size() + ct.inps.size() + ct.exceptionals.size() + ct.connecting.size());

  TermOrbit left = term_orbit(ct, theta, true, limit);
  TermOrbit right = term_orbit(ct, theta2, false, limit);
  const std::size_t k0 = std::max(left.preperiod, right.preperiod);
  const std::size_t period = std::lcm(left.period, right.period);
  extend_orbit(ct, left, true, k0 + 2 * period);
  extend_orbit(ct, right, false, k0 + 2 * period);

  const auto c = [&](std::size_t k) {
    IntVector x = ct.graph.unit(vertex);
    add_into(x, left.elements[k]);
    add_into(x, right.elements[k]);
    return x;
  };
  for (std::size_t i = 0; i < period; ++i) {
    if (c(k0 + i) != c(k0 + period + i)) {
      throw Error(ErrorKind::PeriodNotFound, "turn elements at " + v.name + " are not periodic with period " +
                                                 std::to_string(period));
    }
  }

  IntVector x = ct.graph.unit(vertex);
  add_into(x, g);
  for (std::size_t k = 0; k < k0; ++k) x = a * x + c(k);
  IntVector t = ct.graph.unit(vertex);
  for (std::size_t i = 0; i < period; ++i) t = a * t + c(k0 + i);
  const GrowthType sub = affine_orbit_growth(a.pow(period), t, x);
  return root_rescale(sub, static_cast<unsigned>(period));
}

namespace {

/// Bottom-up evaluation of growth types on the stabilised power f^p; turn
/// growths are brought back to the scale of f.
class GrowthAnalyzer {
 public:
  GrowthAnalyzer(const CtMap& ct, TermGrowthTable& table)
      : ct_(ct), table_(table), power_(ct_power(ct, table.power)), connecting_(ct.connecting.size()) {}

  const CtMap& power_map() const { return power_; }

  GrowthType term(const TermInstance& t) {
    switch (t.kind) {
      case TermKind::Edge: {
        const auto& g = table_.edges.at(static_cast<std::size_t>(t.id - 1));
        if (!g) throw std::logic_error("edge " + ct_.graph.edge(t.id).name + " used before its stratum");
        return *g;
      }
      case TermKind::Inp: return GrowthType::bounded();
      case TermKind::Exceptional: return GrowthType::polynomial(1);
      case TermKind::Connecting: return connecting(t.id);
    }
    throw std::logic_error("unknown term kind");
  }

  GrowthType connecting(int id) {
    auto& slot = connecting_[static_cast<std::size_t>(id)];
    if (!slot) {
      const auto& s = power_.connecting_images[static_cast<std::size_t>(id)];
      slot = split(s, "image of " + ct_.connecting[static_cast<std::size_t>(id)].name, 0);
    }
    return *slot;
  }

  /// Growth of the fat turns of s (and the component spectra met at its
  /// junctions).
  void turns(const SplitPath& s, const std::string& context, std::optional<GrowthType>& acc) {
    const std::size_t q = s.terms.size();
    const std::size_t count = s.circuit ? q : q - 1;
    for (std::size_t i = 0; i < count; ++i) {
      const auto& left = s.terms[i];
      const auto& right = s.terms[(i + 1) % q];
      const int v = left.path.end_vertex(ct_.graph);
      for (const auto& comp : ct_.components) {
        if (comp.vertex == v) raise(acc, comp.spectrum.entries().back());
      }
      if (!ct_.graph.vertices[static_cast<std::size_t>(v)].factor || ct_.graph.rank_at(v) == 0) continue;
      const GrowthType g =
          root_rescale(fat_turn_growth(power_, left, s.junctions[i], right, v), static_cast<unsigned>(table_.power));
      record(term_name(ct_, left) + " " + to_string(s.junctions[i]) + " " + term_name(ct_, right) + " at " +
                 ct_.graph.vertices[static_cast<std::size_t>(v)].name + " in " + context,
             g);
      raise(acc, g);
    }
  }

  /// Terms below `below` (all terms when 0), fat turns of s and of its image.
  std::optional<GrowthType> collect(const SplitPath& s, const std::string& context, int below) {
    std::optional<GrowthType> acc;
    for (const auto& t : s.terms) {
      if (below == 0 || path_height(t.path, ct_.graph) < below) raise(acc, term(t));
    }
    turns(s, context, acc);
    turns(image(power_, s), "image of " + context, acc);
    return acc;
  }

  GrowthType split(const SplitPath& s, const std::string& context, int below) {
    auto acc = collect(s, context, below);
    return acc ? *acc : GrowthType::bounded();
  }

 private:
  void record(const std::string& description, const GrowthType& g) {
    for (const auto& t : table_.turns) {
      if (t.description == description) return;
    }
    table_.turns.push_back({description, g});
  }

  const CtMap& ct_;
  TermGrowthTable& table_;
  CtMap power_;
  std::vector<std::optional<GrowthType>> connecting_;
};

}  // namespace

TermGrowthTable assign_growth_types(const CtMap& ct) {
  TermGrowthTable table;
  table.power = vertex_stabilization_power(ct);
  table.strata = classify_strata(ct);
  table.edges.assign(ct.graph.edges.size(), std::nullopt);
  GrowthAnalyzer analyzer(ct, table);
  const CtMap& fp = analyzer.power_map();

  for (const auto& s : table.strata) {
    if (s.type == StratumType::Zero) continue;
    GrowthType value = s.rate;
    if (!(s.type == StratumType::NEG && s.fixed)) {
      std::optional<GrowthType> c;
      for (int e : s.edges) {
        const auto& img = fp.edge_images[static_cast<std::size_t>(e - 1)];
        const auto part = analyzer.collect(img, "image of " + ct.graph.edge(e).name, s.height);
        if (part) raise(c, *part);
      }
      if (c) {
        if (lambda_equal(s.rate, *c)) {
          value = {c->d + 1, c->lambda, c->poly ? c->poly : s.rate.poly};
        } else {
          value = max_of(s.rate, *c);
        }
      }
    }
    for (int e : s.edges) table.edges[static_cast<std::size_t>(e - 1)] = value;
  }
  table.inps.assign(ct.inps.size(), GrowthType::bounded());
  table.exceptionals.assign(ct.exceptionals.size(), GrowthType::polynomial(1));
  for (std::size_t i = 0; i < ct.connecting.size(); ++i) {
    table.connecting.push_back(analyzer.connecting(static_cast<int>(i)));
  }
  return table;
}

GrowthType circuit_growth(const CtMap& ct, const TermGrowthTable& table, const GraphPath& circuit,
                          const std::vector<std::size_t>& cuts) {
  GraphPath c = tighten_circuit(circuit, ct.graph);
  if (c.empty()) {
    const auto& v = ct.graph.vertices[static_cast<std::size_t>(c.start)];
    if (!v.factor || c.head.empty()) return GrowthType::bounded();
    return orbit_growth(ct.factor_matrices[static_cast<std::size_t>(v.factor - 1)], c.head);
  }
  std::optional<SplitPath> s = cuts.empty() ? find_splitting(ct, c, true) : split_at(ct, c, cuts);
  for (int k = 0; !s && k < kSplitAttempts; ++k) {
    c = f_sharp_circuit(ct, c);
    if (c.empty()) return circuit_growth(ct, table, c);
    s = find_splitting(ct, c, true);
  }
  if (!s) {
    throw Error(ErrorKind::NotCompletelySplit, "circuit " + format_path(circuit, ct.graph) +
                                                   " has no complete splitting after " +
                                                   std::to_string(kSplitAttempts) + " iterations");
  }
  TermGrowthTable scratch = table;
  GrowthAnalyzer analyzer(ct, scratch);
  return analyzer.split(*s, "circuit " + format_path(flatten(*s, ct.graph), ct.graph), 0);
}

GrowthType polexp_sum(int d, double lambda1, double lambda2) {
  return polexp_sum(d, GrowthType{0, lambda1, std::nullopt}, GrowthType{0, lambda2, std::nullopt});
}

GrowthType polexp_sum(int d, const GrowthType& lambda1, const GrowthType& lambda2) {
  if (d < 0) throw Error(ErrorKind::IndexOutOfRange, "degree must be non-negative");
  if (lambda_equal(lambda1, lambda2)) return {d + 1, lambda2.lambda, lambda2.poly ? lambda2.poly : lambda1.poly};
  if (lambda1.lambda > lambda2.lambda) return {0, lambda1.lambda, lambda1.poly};
  return {d, lambda2.lambda, lambda2.poly};
}

Spectrum ct_combination_bound(const CtMap& ct, const TermGrowthTable& table) {
  constexpr unsigned kPalangrePowers = 12;
  std::vector<std::pair<Spectrum, Spectrum>> components;
  for (const auto& a : ct.factor_matrices) {
    Spectrum orbit(abelian_spectrum(a));
    Spectrum pal;
    for (unsigned k = 1; k <= kPalangrePowers; ++k) {
      for (const auto& g : abelian_palangre_spectrum(a, k)) pal.insert(g);
    }
    components.emplace_back(std::move(orbit), std::move(pal));
  }
  for (const auto& c : ct.components) components.emplace_back(c.spectrum, c.spectrum);
  std::vector<GrowthType> rates;
  for (const auto& s : table.strata) {
    if (s.type != StratumType::Zero) rates.push_back(s.rate);
  }
  return combination_bound(components, rates);
}

// ---------------------------------------------------------------------------
// Fundamental group

namespace {

struct SpanningTree {
  /// Free generator index (1-based) of every edge, 0 for tree edges.
  std::vector<int> generator;
  /// Tree path from vertex 0 to every vertex.
  std::vector<GraphPath> paths;
};

SpanningTree spanning_tree(const CtGraph& g) {
  SpanningTree t;
  t.generator.assign(g.edges.size(), -1);
  t.paths.resize(g.vertices.size());
  std::vector<bool> reached(g.vertices.size());
  std::vector<int> queue = {0};
  reached[0] = true;
  t.paths[0] = GraphPath{0, g.unit(0), {}};
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const int v = queue[qi];
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
      const int e = static_cast<int>(i + 1);
      for (int oriented : {e, -e}) {
        if (t.generator[i] == 0 || g.origin(oriented) != v) continue;
        const int w = g.terminus(oriented);
        if (reached[static_cast<std::size_t>(w)]) continue;
        reached[static_cast<std::size_t>(w)] = true;
        t.generator[i] = 0;
        GraphPath p = t.paths[static_cast<std::size_t>(v)];
        p.steps.push_back({oriented, g.unit(w)});
        t.paths[static_cast<std::size_t>(w)] = std::move(p);
        queue.push_back(w);
      }
    }
  }
  if (std::find(reached.begin(), reached.end(), false) != reached.end()) {
    throw Error(ErrorKind::InconsistentPath, "graph is not connected");
  }
  int next = 0;
  for (auto& x : t.generator) {
    if (x != 0) x = ++next;
  }
  return t;
}

NormalWord tree_word(const CtMap& ct, const SpanningTree& t, const GraphPath& p) {
  WordBuilder b;
  const auto element = [&](int vertex, const IntVector& x) {
    const int j = ct.graph.vertices[static_cast<std::size_t>(vertex)].factor;
    if (j && !x.empty() && !is_zero(x)) b.push_abelian(j, x);
  };
  element(p.start, p.head);
  for (const auto& s : p.steps) {
    const int gen = t.generator[static_cast<std::size_t>(std::abs(s.edge) - 1)];
    if (gen) b.push_letter(gen, s.edge > 0 ? 1 : -1);
    element(ct.graph.terminus(s.edge), s.element);
  }
  return std::move(b).finish();
}

}  // namespace

NormalWord path_word(const CtMap& ct, const GraphPath& p) { return tree_word(ct, spanning_tree(ct.graph), p); }

GroupMap derived_endomorphism(const CtMap& ct) {
  const SpanningTree tree = spanning_tree(ct.graph);
  const auto image_word = [&](const GraphPath& p) { return tree_word(ct, tree, f_sharp(ct, p)); };
  GroupMap map;
  for (std::size_t i = 0; i < ct.graph.edges.size(); ++i) {
    if (!tree.generator[i]) continue;
    const auto& e = ct.graph.edges[i];
    const NormalWord to = image_word(tree.paths[static_cast<std::size_t>(e.origin)]);
    const NormalWord from = image_word(tree.paths[static_cast<std::size_t>(e.terminus)]);
    GraphPath edge{e.origin, ct.graph.unit(e.origin), {{static_cast<int>(i + 1), ct.graph.unit(e.terminus)}}};
    WordBuilder b(to);
    b.append(tree_word(ct, tree, raw_image(ct, edge, kDefaultBudget)));
    b.append_inverse(from);
    map.free_images.push_back(std::move(b).finish());
  }
  for (std::size_t j = 0; j < ct.factor_matrices.size(); ++j) {
    const int v = ct.graph.vertex_of_factor(static_cast<int>(j + 1));
    map.factor_matrices.push_back(ct.factor_matrices[j]);
    map.factor_conjugators.push_back(image_word(tree.paths[static_cast<std::size_t>(v)]));
  }
  return map;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

const std::string kDot = "\xC2\xB7";

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

std::vector<std::string> split_top_level(const std::string& s) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char ch : s) {
    if (ch == '[' || ch == '(' || ch == '{') ++depth;
    if (ch == ']' || ch == ')' || ch == '}') --depth;
    if (ch == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(trim(cur));
  return out;
}

int find_edge(const CtGraph& g, const std::string& name) {
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    if (g.edges[i].name == name) return static_cast<int>(i + 1);
  }
  throw Error(ErrorKind::ParseError, "unknown edge '" + name + "'");
}

int find_vertex(const CtGraph& g, const std::string& name) {
  for (std::size_t i = 0; i < g.vertices.size(); ++i) {
    if (g.vertices[i].name == name) return static_cast<int>(i);
  }
  throw Error(ErrorKind::ParseError, "unknown vertex '" + name + "'");
}

struct MarkedPath {
  GraphPath path;
  /// Edge offsets of the splitting markers.
  std::vector<std::size_t> cuts;
};

MarkedPath parse_marked_path(std::string_view text, const CtGraph& g) {
  MarkedPath out;
  std::vector<IntVector> pending;
  bool started = false;
  auto& p = out.path;
  const auto place = [&](const IntVector& x) {
    if (!started) {
      pending.push_back(x);
      return;
    }
    const int v = p.end_vertex(g);
    if (static_cast<int>(x.size()) != g.rank_at(v)) {
      throw Error(ErrorKind::ParseError, "element " + to_string(x) + " does not fit vertex " +
                                             g.vertices[static_cast<std::size_t>(v)].name);
    }
    add_into(p.steps.empty() ? p.head : p.steps.back().element, x);
  };
  std::size_t i = 0;
  const std::string s(text);
  while (i < s.size()) {
    const char ch = s[i];
    if (std::isspace(static_cast<unsigned char>(ch))) {
      ++i;
    } else if (ch == '|' || s.compare(i, kDot.size(), kDot) == 0) {
      out.cuts.push_back(p.steps.size());
      i += ch == '|' ? 1 : kDot.size();
    } else if (ch == '[') {
      const auto close = s.find(']', i);
      if (close == std::string::npos) throw Error(ErrorKind::ParseError, "unterminated element in '" + s + "'");
      place(parse_vector(s.substr(i, close - i + 1)));
      i = close + 1;
    } else if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      const int e = find_edge(g, s.substr(i, j - i));
      long power = 1;
      if (j < s.size() && s[j] == '^') {
        std::size_t k = j + 1;
        if (k < s.size() && (s[k] == '-' || s[k] == '+')) ++k;
        while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
        try {
          power = std::stol(s.substr(j + 1, k - j - 1));
        } catch (const std::exception&) {
          throw Error(ErrorKind::ParseError, "bad exponent in '" + s + "'");
        }
        j = k;
      }
      const int oriented = power < 0 ? -e : e;
      for (long c = 0; c < std::abs(power); ++c) {
        if (!started) {
          started = true;
          p.start = g.origin(oriented);
          p.head = g.unit(p.start);
          for (const auto& x : pending) {
            if (static_cast<int>(x.size()) != g.rank_at(p.start)) {
              throw Error(ErrorKind::ParseError, "element " + to_string(x) + " does not fit vertex " +
                                                     g.vertices[static_cast<std::size_t>(p.start)].name);
            }
            add_into(p.head, x);
          }
        } else if (p.end_vertex(g) != g.origin(oriented)) {
          throw Error(ErrorKind::InconsistentPath, "edge " + g.edge(oriented).name + " does not continue '" + s + "'");
        }
        p.steps.push_back({oriented, g.unit(g.terminus(oriented))});
      }
      i = j;
    } else {
      throw Error(ErrorKind::ParseError, "unexpected '" + std::string(1, ch) + "' in path '" + s + "'");
    }
  }
  if (!started) throw Error(ErrorKind::ParseError, "path '" + s + "' has no edges");
  return out;
}

Spectrum parse_spectrum(const std::string& text) {
  std::string body = trim(text);
  if (body.size() < 2 || body.front() != '{' || body.back() != '}') {
    throw Error(ErrorKind::ParseError, "expected {(d, lambda), ...}");
  }
  std::vector<GrowthType> entries;
  body = body.substr(1, body.size() - 2);
  if (trim(body).empty()) return Spectrum();
  for (const auto& item : split_top_level(body)) {
    if (item.size() < 2 || item.front() != '(' || item.back() != ')') {
      throw Error(ErrorKind::ParseError, "expected (d, lambda), got '" + item + "'");
    }
    const auto parts = split_top_level(item.substr(1, item.size() - 2));
    if (parts.size() != 2) throw Error(ErrorKind::ParseError, "expected (d, lambda), got '" + item + "'");
    try {
      const int d = std::stoi(parts[0]);
      const double lambda = std::stod(parts[1]);
      if (d < 0 || !(lambda >= 1)) throw Error(ErrorKind::ParseError, "growth type out of range: '" + item + "'");
      entries.push_back({d, lambda, lambda == 1 ? std::optional(IntPolynomial::linear(Integer(1))) : std::nullopt});
    } catch (const std::invalid_argument&) {
      throw Error(ErrorKind::ParseError, "bad number in '" + item + "'");
    }
  }
  return Spectrum(entries);
}

/// Turns a closed path into circuit form: the head element moves to the wrap.
GraphPath as_circuit(GraphPath p, const CtGraph& g) {
  if (p.end_vertex(g) != p.start) throw Error(ErrorKind::InconsistentPath, "circuit is not closed");
  add_into(p.steps.back().element, p.head);
  p.head = g.unit(p.start);
  return p;
}

SplitPath single_edge_split(const CtMap& ct, const GraphPath& p) {
  SplitPath s;
  s.head = p.head;
  for (const auto& step : p.steps) {
    s.terms.push_back(make_term(ct, TermKind::Edge, std::abs(step.edge), step.edge < 0));
    s.junctions.push_back(step.element);
  }
  return s;
}

}  // namespace

GraphPath parse_path(std::string_view text, const CtMap& ct) { return parse_marked_path(text, ct.graph).path; }

std::string format_path(const GraphPath& p, const CtGraph& g) {
  std::string out;
  const auto element = [&](const IntVector& x) {
    if (!x.empty() && !is_zero(x)) {
      if (!out.empty()) out += ' ';
      out += to_string(x);
    }
  };
  element(p.head);
  for (const auto& s : p.steps) {
    if (!out.empty()) out += ' ';
    out += g.edge(s.edge).name;
    if (s.edge < 0) out += "^-1";
    element(s.element);
  }
  return out.empty() ? "1" : out;
}

CtMap parse_ct(std::string_view text, const std::string& source) {
  struct Line {
    int number;
    std::string keyword;
    std::string rest;
  };
  std::vector<Line> lines;
  {
    std::istringstream in{std::string(text)};
    std::string raw;
    int n = 0;
    while (std::getline(in, raw)) {
      ++n;
      const std::string line = trim(raw);
      if (line.empty()) continue;
      const auto sp = line.find_first_of(" \t(");
      std::string keyword = line.substr(0, sp);
      std::string rest = sp == std::string::npos ? "" : trim(line.substr(sp));
      lines.push_back({n, std::move(keyword), std::move(rest)});
    }
  }
  const auto guarded = [&](const Line& l, auto&& body) {
    const LineError fail{source, l.number};
    try {
      body(fail);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::ParseError && std::string(e.what()).find(source + ":") != std::string::npos) throw;
      fail(e.what());
    }
  };

  CtMap ct;
  auto& g = ct.graph;
  std::map<int, IntMatrix> matrices;
  std::vector<std::pair<const Line*, int>> vertex_factors;

  // Pass 1: graph and matrices.
  for (const auto& l : lines) {
    guarded(l, [&](const LineError& fail) {
      std::smatch m;
      if (l.keyword == "vertex") {
        static const std::regex re(R"((\w+)(?:\s+fat\s+g(\d+))?)");
        if (!std::regex_match(l.rest, m, re)) fail("expected 'vertex NAME [fat g<j>]'");
        for (const auto& v : g.vertices) {
          if (v.name == m[1].str()) fail("duplicate vertex " + v.name);
        }
        g.vertices.push_back({m[1].str(), m[2].matched ? std::stoi(m[2].str()) : 0, 0});
        if (m[2].matched) vertex_factors.emplace_back(&l, static_cast<int>(g.vertices.size() - 1));
      } else if (l.keyword == "edge") {
        static const std::regex re(R"((\w+)\s*:\s*(\w+)\s*->\s*(\w+)\s+height\s+(\d+))");
        if (!std::regex_match(l.rest, m, re)) fail("expected 'edge NAME : V1 -> V2 height H'");
        for (const auto& e : g.edges) {
          if (e.name == m[1].str()) fail("duplicate edge " + e.name);
        }
        g.edges.push_back({m[1].str(), find_vertex(g, m[2].str()), find_vertex(g, m[3].str()), std::stoi(m[4].str())});
      } else if (l.keyword == "matrix") {
        static const std::regex re(R"(g(\d+)\s*=\s*(.*))");
        if (!std::regex_match(l.rest, m, re)) fail("expected 'matrix g<j> = [[...]]'");
        const IntMatrix a = parse_matrix(m[2].str());
        if (!a.square() || !a.is_unimodular()) fail("factor matrix must be square with determinant +-1");
        if (!matrices.emplace(std::stoi(m[1].str()), a).second) fail("duplicate matrix for g" + m[1].str());
      }
    });
  }
  if (g.vertices.empty()) throw Error(ErrorKind::ParseError, source + ": no vertices");
  if (g.edges.empty()) throw Error(ErrorKind::ParseError, source + ": no edges");
  for (const auto& [l, v] : vertex_factors) {
    guarded(*l, [&](const LineError& fail) {
      auto& vert = g.vertices[static_cast<std::size_t>(v)];
      const auto it = matrices.find(vert.factor);
      if (it == matrices.end()) fail("no matrix for g" + std::to_string(vert.factor));
      for (const auto& other : g.vertices) {
        if (&other != &vert && other.factor == vert.factor) fail("factor g" + std::to_string(vert.factor) + " used twice");
      }
      vert.rank = static_cast<int>(it->second.rows());
    });
  }
  for (std::size_t j = 1; j <= matrices.size(); ++j) {
    const auto it = matrices.find(static_cast<int>(j));
    if (it == matrices.end()) throw Error(ErrorKind::ParseError, source + ": factors must be numbered g1..gq");
    g.vertex_of_factor(static_cast<int>(j));
    ct.factor_matrices.push_back(it->second);
  }

  // Pass 2: images, templates, components, circuits.
  std::vector<std::optional<MarkedPath>> images(g.edges.size());
  std::vector<const Line*> image_lines(g.edges.size());
  std::vector<int> declared_vertex_map(g.vertices.size(), -1);
  for (const auto& l : lines) {
    guarded(l, [&](const LineError& fail) {
      std::smatch m;
      static const std::regex arrow(R"((\w+)\s*->\s*(.*))");
      static const std::regex named(R"((\w+)\s*=\s*(.*))");
      if (l.keyword == "image") {
        if (!std::regex_match(l.rest, m, arrow)) fail("expected 'image NAME -> PATH'");
        const int e = find_edge(g, m[1].str());
        if (images[static_cast<std::size_t>(e - 1)]) fail("duplicate image for " + m[1].str());
        images[static_cast<std::size_t>(e - 1)] = parse_marked_path(m[2].str(), g);
        image_lines[static_cast<std::size_t>(e - 1)] = &l;
      } else if (l.keyword == "vertex_map") {
        if (!std::regex_match(l.rest, m, arrow)) fail("expected 'vertex_map V -> W'");
        declared_vertex_map[static_cast<std::size_t>(find_vertex(g, m[1].str()))] = find_vertex(g, trim(m[2].str()));
      } else if (l.keyword == "inp" || l.keyword == "connecting") {
        if (!std::regex_match(l.rest, m, named)) fail("expected '" + l.keyword + " NAME = PATH'");
        TemplateDecl t{m[1].str(), with_trivial_ends(parse_marked_path(m[2].str(), g).path, g)};
        (l.keyword == "inp" ? ct.inps : ct.connecting).push_back(std::move(t));
      } else if (l.keyword == "exceptional") {
        static const std::regex re(R"((\w+)\s*=\s*(?:exceptional\s*)?\((.*)\))");
        if (!std::regex_match(l.rest, m, re)) fail("expected 'exceptional NAME = (e, e2, w, d, d2)'");
        const auto parts = split_top_level(m[2].str());
        if (parts.size() != 5) fail("exceptional path needs five fields");
        ExceptionalDecl x;
        x.name = m[1].str();
        x.e = find_edge(g, parts[0]);
        x.e2 = find_edge(g, parts[1]);
        x.w = parse_marked_path(parts[2], g).path;
        try {
          x.d = std::stol(parts[3]);
          x.d2 = std::stol(parts[4]);
        } catch (const std::exception&) {
          fail("exponents must be integers");
        }
        if (x.d == x.d2) fail("exceptional path needs d != d2");
        if (x.w.start != g.terminus(x.e) || x.w.end_vertex(g) != x.w.start || g.terminus(x.e2) != x.w.start) {
          fail("w must be a closed path at the terminal vertex of both edges");
        }
        ct.exceptionals.push_back(std::move(x));
      } else if (l.keyword == "component_spectrum") {
        if (!std::regex_match(l.rest, m, named)) fail("expected 'component_spectrum TARGET = {...}'");
        const std::string target = m[1].str();
        static const std::regex factor_re(R"(g(\d+))");
        std::smatch fm;
        int v = 0;
        const bool is_vertex = std::any_of(g.vertices.begin(), g.vertices.end(), [&](const CtVertex& x) { return x.name == target; });
        if (is_vertex) {
          v = find_vertex(g, target);
        } else if (std::regex_match(target, fm, factor_re)) {
          v = g.vertex_of_factor(std::stoi(fm[1].str()));
        } else {
          fail("unknown component target '" + target + "'");
        }
        ct.components.push_back({target, v, parse_spectrum(m[2].str())});
      } else if (l.keyword == "circuit") {
        if (!std::regex_match(l.rest, m, named)) fail("expected 'circuit NAME = PATH'");
        MarkedPath mp = parse_marked_path(m[2].str(), g);
        CircuitDecl c{m[1].str(), as_circuit(std::move(mp.path), g), {}};
        // The wrap turn is always a junction once split points are written.
        if (!mp.cuts.empty()) c.splitting.push_back(0);
        for (std::size_t cut : mp.cuts) c.splitting.push_back(cut % c.path.steps.size());
        std::sort(c.splitting.begin(), c.splitting.end());
        c.splitting.erase(std::unique(c.splitting.begin(), c.splitting.end()), c.splitting.end());
        ct.circuits.push_back(std::move(c));
      } else if (l.keyword != "vertex" && l.keyword != "edge" && l.keyword != "matrix") {
        fail("unrecognised statement '" + l.keyword + "'");
      }
    });
  }

  // Vertex map: declared, or read off the edge images.
  ct.vertex_image = declared_vertex_map;
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    if (!images[i]) throw Error(ErrorKind::ParseError, source + ": edge " + g.edges[i].name + " has no image");
    const auto& p = images[i]->path;
    guarded(*image_lines[i], [&](const LineError& fail) {
      for (const auto& [v, w] : {std::pair{g.edges[i].origin, p.start}, std::pair{g.edges[i].terminus, p.end_vertex(g)}}) {
        int& slot = ct.vertex_image[static_cast<std::size_t>(v)];
        if (slot >= 0 && slot != w) {
          fail("image of " + g.edges[i].name + " sends vertex " + g.vertices[static_cast<std::size_t>(v)].name +
               " to " + g.vertices[static_cast<std::size_t>(w)].name + ", inconsistent with " +
               g.vertices[static_cast<std::size_t>(slot)].name);
        }
        slot = w;
      }
    });
  }
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    if (ct.vertex_image[v] < 0) ct.vertex_image[v] = static_cast<int>(v);
    if (g.vertices[v].factor && ct.vertex_image[v] != static_cast<int>(v)) {
      throw Error(ErrorKind::StrataInvalid, source + ": fat vertex " + g.vertices[v].name + " is not fixed");
    }
  }

  // Splittings of the edge images, first as plain edge sequences so that
  // zero strata can be recognised.
  for (std::size_t i = 0; i < g.edges.size(); ++i) ct.edge_images.push_back(single_edge_split(ct, images[i]->path));
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    guarded(*image_lines[i], [&](const LineError& fail) {
      const auto& mp = *images[i];
      auto s = search(ct, mp.path.steps, mp.path.head, false, false, mp.cuts);
      if (!s) fail("image of " + g.edges[i].name + " does not split into declared terms at the marked points");
      ct.edge_images[i] = std::move(*s);
    });
  }

  std::vector<std::size_t> order(ct.connecting.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return path_height(ct.connecting[a].path, g) < path_height(ct.connecting[b].path, g);
  });
  ct.connecting_images.resize(ct.connecting.size());
  for (std::size_t i : order) {
    const GraphPath img = f_sharp(ct, ct.connecting[i].path);
    auto s = img.empty() ? std::nullopt : find_splitting(ct, img, false);
    if (!s) {
      throw Error(ErrorKind::NotCompletelySplit, source + ": image of connecting path " + ct.connecting[i].name +
                                                     " is not completely split");
    }
    ct.connecting_images[i] = std::move(*s);
  }

  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    if (!survives_iteration(ct, ct.edge_images[i])) {
      throw Error(ErrorKind::NotCompletelySplit, source + ": iterated image of edge " + g.edges[i].name +
                                                     " is not completely split");
    }
  }
  try {
    for (std::size_t i = 0; i < ct.inps.size(); ++i) term_image(ct, make_term(ct, TermKind::Inp, static_cast<int>(i), false));
    for (std::size_t i = 0; i < ct.exceptionals.size(); ++i) {
      for (long p : {1L, 2L}) term_image(ct, make_term(ct, TermKind::Exceptional, static_cast<int>(i), false, p));
    }
  } catch (const Error& e) {
    throw Error(e.kind(), source + ": " + e.what());
  }
  return ct;
}

CtMap load_ct(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_ct(ss.str(), path);
}

}  // namespace polexp
