#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "polexp/automorphism.hpp"
#include "polexp/growth_type.hpp"
#include "polexp/matrix.hpp"
#include "polexp/spectrum.hpp"

namespace polexp {

/// Graph of groups with trivial edge groups. Oriented edges are signed
/// 1-based indices: +i is edge i, -i its reverse.
struct CtVertex {
  std::string name;
  /// Abelian factor carried by the vertex (1-based), 0 for a plain vertex.
  int factor = 0;
  int rank = 0;
};

struct CtEdge {
  std::string name;
  int origin = 0;
  int terminus = 0;
  int height = 0;
};

struct CtGraph {
  std::vector<CtVertex> vertices;
  std::vector<CtEdge> edges;

  int origin(int oriented) const;
  int terminus(int oriented) const;
  const CtEdge& edge(int oriented) const;
  int rank_at(int vertex) const { return vertices.at(static_cast<std::size_t>(vertex)).rank; }
  /// Trivial element of the vertex group (empty at plain vertices).
  IntVector unit(int vertex) const { return IntVector(static_cast<std::size_t>(rank_at(vertex))); }
  int vertex_of_factor(int factor) const;
};

struct PathStep {
  int edge = 0;
  /// Element at the terminus of the edge.
  IntVector element;
  bool operator==(const PathStep&) const = default;
};

/// g0 e1 g1 ... ep gp. A circuit is a closed path whose head is unused and
/// whose last element sits at the wrap turn.
struct GraphPath {
  int start = 0;
  IntVector head;
  std::vector<PathStep> steps;

  std::size_t size() const { return steps.size(); }
  bool empty() const { return steps.empty(); }
  int end_vertex(const CtGraph& g) const { return steps.empty() ? start : g.terminus(steps.back().edge); }
  bool operator==(const GraphPath&) const = default;
};

GraphPath reverse(const GraphPath& p, const CtGraph& g);
/// p followed by q; the elements at the join multiply.
GraphPath join(const GraphPath& p, const GraphPath& q, const CtGraph& g);
/// Same edges and interior elements, boundary elements ignored.
bool equivalent(const GraphPath& p, const GraphPath& q);

GraphPath tighten(const GraphPath& p, const CtGraph& g);
GraphPath tighten_circuit(const GraphPath& c, const CtGraph& g);

/// p + sum of |g_i| over interior elements.
Integer path_length(const GraphPath& p);
/// p + sum of |g_i| over all elements (the wrap included).
Integer circuit_length(const GraphPath& c);

enum class TermKind { Edge, Inp, Exceptional, Connecting };

std::string to_string(TermKind k);

/// One term of a complete splitting. Boundary elements of `path` are
/// trivial; the elements at the turns live in SplitPath::junctions.
struct TermInstance {
  TermKind kind = TermKind::Edge;
  /// Edge index (1-based) or template index (0-based).
  int id = 0;
  bool reversed = false;
  /// Exponent p of an exceptional path e w^p e'^-1.
  long exponent = 0;
  GraphPath path;
};

/// A path (or circuit) written as a concatenation of terms.
struct SplitPath {
  bool circuit = false;
  IntVector head;
  std::vector<TermInstance> terms;
  /// Element at the turn after terms[i]; for a circuit the last one is the
  /// wrap turn, for a path it is the tail element.
  std::vector<IntVector> junctions;
};

GraphPath flatten(const SplitPath& s, const CtGraph& g);
SplitPath reverse(const SplitPath& s, const CtGraph& g);

struct ExceptionalDecl {
  std::string name;
  int e = 0;
  int e2 = 0;
  /// Closed Nielsen path; its last element joins consecutive copies.
  GraphPath w;
  long d = 0;
  long d2 = 0;
};

struct TemplateDecl {
  std::string name;
  GraphPath path;
};

struct ComponentDecl {
  std::string name;
  int vertex = 0;
  Spectrum spectrum;
};

struct CircuitDecl {
  std::string name;
  GraphPath path;
  /// Declared split points (edge offsets), empty when none were written.
  std::vector<std::size_t> splitting;
};

struct CtMap {
  CtGraph graph;
  std::vector<int> vertex_image;
  /// Matrices of the abelian factors, indexed by factor - 1.
  std::vector<IntMatrix> factor_matrices;
  /// Declared image of every edge with its complete splitting.
  std::vector<SplitPath> edge_images;
  std::vector<TemplateDecl> inps;
  std::vector<ExceptionalDecl> exceptionals;
  std::vector<TemplateDecl> connecting;
  /// f_sharp of each connecting path with a complete splitting.
  std::vector<SplitPath> connecting_images;
  std::vector<ComponentDecl> components;
  std::vector<CircuitDecl> circuits;

  /// Fundamental group: the abelian factors and a free part of rank E - V + 1.
  GroupSpec group_spec() const;
};

inline constexpr int kSplitAttempts = 8;
inline constexpr int kCheckIterations = 6;

/// Tightened image of a path or circuit.
GraphPath f_sharp(const CtMap& ct, const GraphPath& p, std::size_t budget = kDefaultBudget);
GraphPath f_sharp_circuit(const CtMap& ct, const GraphPath& c, std::size_t budget = kDefaultBudget);

/// circuit_length(f_sharp^n(c)) for n = 0..n_max.
std::vector<Integer> circuit_length_sequence(const CtMap& ct, const GraphPath& c, int n_max,
                                             std::size_t budget = kDefaultBudget);

/// A complete splitting of p into declared terms whose images do not cancel
/// under f_sharp^k for k <= kCheckIterations, if one exists.
std::optional<SplitPath> find_splitting(const CtMap& ct, const GraphPath& p, bool circuit);
/// Checks the declared split points of a circuit.
std::optional<SplitPath> split_at(const CtMap& ct, const GraphPath& c, const std::vector<std::size_t>& cuts);

/// f_sharp of a split path with the induced refined splitting. Throws
/// NotCompletelySplit if the images of two consecutive terms cancel.
SplitPath image(const CtMap& ct, const SplitPath& s);
SplitPath term_image(const CtMap& ct, const TermInstance& t);

enum class StratumType { EG, NEG, Zero };

std::string to_string(StratumType t);

struct StratumInfo {
  int height = 0;
  StratumType type = StratumType::Zero;
  std::vector<int> edges;
  /// Perron-Frobenius eigenvalue for EG strata, 1 otherwise.
  GrowthType rate = GrowthType::bounded();
  /// NEG: f(e) = g e u with u a Nielsen path.
  bool linear = false;
  /// NEG: u trivial.
  bool fixed = false;
  /// NEG: the image has the form u e g instead of g e u.
  bool reversed = false;
  std::vector<std::vector<long>> transition;
};

std::vector<StratumInfo> classify_strata(const CtMap& ct);

/// Least p with f^p(f^p(v)) = f^p(v) for every vertex v.
int vertex_stabilization_power(const CtMap& ct);

/// f^p with edge images f_sharp^p(e), factor matrices A^p and exceptional
/// slopes scaled by p.
CtMap ct_power(const CtMap& ct, int p);

/// Growth type of the element at the turn (theta, g, theta') under f_sharp,
/// g_{k+1} = m_k A g_k m'_k, at the fat vertex `vertex`.
GrowthType fat_turn_growth(const CtMap& ct, const TermInstance& theta, const IntVector& g,
                           const TermInstance& theta2, int vertex);

struct TurnGrowth {
  std::string description;
  GrowthType growth;
};

struct TermGrowthTable {
  /// Vertex stabilisation power the analysis ran on.
  int power = 1;
  std::vector<StratumInfo> strata;
  /// Indexed by edge - 1; zero stratum edges have no entry.
  std::vector<std::optional<GrowthType>> edges;
  std::vector<GrowthType> inps;
  std::vector<GrowthType> exceptionals;
  std::vector<GrowthType> connecting;
  std::vector<TurnGrowth> turns;
};

TermGrowthTable assign_growth_types(const CtMap& ct);

/// Growth type of |f_sharp^n(c)|; uses the declared split points if given,
/// otherwise searches for a splitting (of c or of f_sharp^k(c), k <= 8).
GrowthType circuit_growth(const CtMap& ct, const TermGrowthTable& table, const GraphPath& circuit,
                          const std::vector<std::size_t>& cuts = {});

/// Growth of sum_{k=1}^n (n-k)^d lambda1^k lambda2^(n-k).
GrowthType polexp_sum(int d, double lambda1, double lambda2);
GrowthType polexp_sum(int d, const GrowthType& lambda1, const GrowthType& lambda2);

/// Spectra of the abelian factors and declared components plus the stratum
/// rates, fed to combination_bound.
Spectrum ct_combination_bound(const CtMap& ct, const TermGrowthTable& table);

/// Endomorphism of the fundamental group induced by f, read off a BFS
/// spanning tree: non-tree edges become the free generators in declaration
/// order, fat vertices carry their factors.
GroupMap derived_endomorphism(const CtMap& ct);
NormalWord path_word(const CtMap& ct, const GraphPath& p);

GraphPath parse_path(std::string_view text, const CtMap& ct);
std::string format_path(const GraphPath& p, const CtGraph& g);

CtMap parse_ct(std::string_view text, const std::string& source = "<ct>");
CtMap load_ct(const std::string& path);

}  // namespace polexp
