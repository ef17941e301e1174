#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "polexp/matrix.hpp"
#include "polexp/words.hpp"

namespace polexp {

inline constexpr std::size_t kDefaultBudget = 10'000'000;

/// Forward data of an endomorphism of G: images of the free generators and,
/// per abelian factor, x -> w_j (A_j x) w_j^-1.
struct GroupMap {
  std::vector<NormalWord> free_images;
  std::vector<IntMatrix> factor_matrices;
  std::vector<NormalWord> factor_conjugators;

  static GroupMap identity(const GroupSpec& spec);
  /// Shape checks against spec (counts, matrix sizes, words inside spec).
  void validate(const GroupSpec& spec) const;
  bool operator==(const GroupMap&) const = default;
};

/// An automorphism together with a claimed inverse, verified on generators
/// at construction.
class Automorphism {
 public:
  Automorphism(GroupSpec spec, GroupMap forward, GroupMap inverse);

  static Automorphism identity(const GroupSpec& spec);

  const GroupSpec& spec() const { return spec_; }
  const GroupMap& forward() const { return forward_; }
  const GroupMap& backward() const { return inverse_; }
  Automorphism inverse() const;

 private:
  GroupSpec spec_;
  GroupMap forward_;
  GroupMap inverse_;
};

/// Image of u in normal form. Throws LengthBudgetExceeded when the image
/// would exceed `budget` syllables.
NormalWord apply(const GroupMap& map, const NormalWord& u, std::size_t budget = kDefaultBudget);
NormalWord apply(const Automorphism& phi, const NormalWord& u, std::size_t budget = kDefaultBudget);

/// phi^n(u) by n successive applications; negative n uses the inverse.
NormalWord iterate(const Automorphism& phi, const NormalWord& u, long n, std::size_t budget = kDefaultBudget);
NormalWord iterate(const GroupMap& map, const NormalWord& u, long n, std::size_t budget = kDefaultBudget);

/// Orbit lengths |phi^n(u)| (or ||phi^n(u)|| when `conjugacy`) for n = 0..n_max.
std::vector<Integer> length_sequence(const Automorphism& phi, const NormalWord& u, int n_max, bool conjugacy,
                                     std::size_t budget = kDefaultBudget);

/// L_n = g phi(g) ... phi^{n-1}(g)
NormalWord palangre_left(const Automorphism& phi, const NormalWord& g, long n, std::size_t budget = kDefaultBudget);
/// R_n = phi^{n-1}(h) ... phi(h) h
NormalWord palangre_right(const Automorphism& phi, const NormalWord& h, long n, std::size_t budget = kDefaultBudget);

/// phi o psi
Automorphism compose(const Automorphism& phi, const Automorphism& psi);
Automorphism power(const Automorphism& phi, unsigned k);
/// x -> a phi(x) a^-1
Automorphism twist_by_element(const Automorphism& phi, const NormalWord& a);

/// g t^k in the mapping torus G x|_phi Z.
struct TorusElement {
  NormalWord g;
  long k = 0;
  bool operator==(const TorusElement&) const = default;
};

TorusElement torus_mul(const TorusElement& alpha, const TorusElement& beta, const Automorphism& phi,
                       std::size_t budget = kDefaultBudget);
TorusElement torus_inverse(const TorusElement& alpha, const Automorphism& phi, std::size_t budget = kDefaultBudget);
TorusElement torus_power(const TorusElement& alpha, long n, const Automorphism& phi,
                         std::size_t budget = kDefaultBudget);

/// G-component of alpha^n beta^-n; alpha and beta must have the same
/// positive t-exponent.
NormalWord torus_palangre(const TorusElement& alpha, const TorusElement& beta, const Automorphism& phi, long n,
                          std::size_t budget = kDefaultBudget);

/// Declarative text format:
///
///   group free 2 abelian [2]
///   map a1 -> a1 a2
///   matrix g1 = [[2,1],[1,1]]
///   conj g1 = a1
///   inverse {
///     map a1 -> ...
///   }
///
/// Missing map lines default to the identity. '#' starts a comment.
Automorphism parse_automorphism(std::string_view text, const std::string& source = "<input>");
Automorphism load_automorphism(const std::string& path);

std::string format_automorphism(const Automorphism& phi);

}  // namespace polexp
