#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "polexp/integer.hpp"

namespace polexp {

/// G = Z^{k_1} * ... * Z^{k_q} * F_N.
struct GroupSpec {
  std::vector<int> abelian_ranks;
  int free_rank = 0;

  int factor_count() const { return static_cast<int>(abelian_ranks.size()); }
  /// Rank of factor j (1-based).
  int rank(int factor) const { return abelian_ranks.at(static_cast<std::size_t>(factor - 1)); }
  void validate() const;

  bool operator==(const GroupSpec&) const = default;
};

std::string to_string(const GroupSpec& spec);

struct Syllable {
  enum class Kind { Free, Abelian };

  Kind kind = Kind::Free;
  int index = 0;  // free generator (1..N) or abelian factor (1..q)
  int sign = 1;   // free letters only
  IntVector vector;  // abelian syllables only

  static Syllable free(int index, int sign = 1) { return {Kind::Free, index, sign, {}}; }
  static Syllable abelian(int factor, IntVector v) {
    return {Kind::Abelian, factor, 1, std::move(v)};
  }

  bool is_free() const { return kind == Kind::Free; }
  bool operator==(const Syllable&) const = default;
};

/// Reduced word: alternating abelian syllables and freely reduced letters.
///
/// Storage is one 32-bit code per syllable plus a side list holding the
/// vectors of the abelian syllables in order of occurrence; iterated images
/// of free letters reach millions of syllables, so a letter costs 4 bytes.
class NormalWord {
 public:
  using Code = std::int32_t;
  static constexpr Code kAbelianTag = Code{1} << 30;

  NormalWord() = default;

  static NormalWord letter(int index, int sign = 1);
  static NormalWord abelian(int factor, IntVector v);

  std::size_t size() const { return codes_.size(); }
  bool empty() const { return codes_.empty(); }
  std::vector<Syllable> syllables() const;

  const std::vector<Code>& codes() const { return codes_; }
  const std::vector<IntVector>& vectors() const { return vectors_; }

  static bool is_abelian_code(Code c) { return c > kAbelianTag; }
  static int factor_of(Code c) { return static_cast<int>(c - kAbelianTag); }
  static Code abelian_code(int factor) { return kAbelianTag + factor; }

  bool operator==(const NormalWord&) const = default;

 private:
  friend class WordBuilder;
  std::vector<Code> codes_;
  std::vector<IntVector> vectors_;
};

/// Accumulates syllables while keeping the result in normal form (stack
/// reduction), so the product of normal words never needs a second pass.
class WordBuilder {
 public:
  WordBuilder() = default;
  explicit WordBuilder(NormalWord start) : word_(std::move(start)) {}

  void push_letter(int index, int sign);
  void push_abelian(int factor, IntVector v);
  void push(const Syllable& s);
  void append(const NormalWord& w);
  void append_inverse(const NormalWord& w);

  std::size_t size() const { return word_.codes_.size(); }
  NormalWord finish() && { return std::move(word_); }
  const NormalWord& peek() const { return word_; }

 private:
  enum class Push { Appended, Merged, Cancelled };
  Push push_code(NormalWord::Code code, const IntVector* v, bool negate);

  NormalWord word_;
};

NormalWord normalize(const std::vector<Syllable>& raw, const GroupSpec& spec);
NormalWord concat(const NormalWord& u, const NormalWord& v);
NormalWord invert(const NormalWord& u);
/// Integer power u^k, k may be negative.
NormalWord power(const NormalWord& u, long k);

/// Word length for the standard generators: letters count 1, an abelian
/// syllable counts its l1 norm.
Integer word_length(const NormalWord& u);

struct CyclicReduction {
  NormalWord core;
  NormalWord conjugator;  // u = conjugator * core * conjugator^-1
};

CyclicReduction cyclic_reduce(const NormalWord& u);
/// Minimal word length over the conjugacy class of u.
Integer conj_length(const NormalWord& u);

/// Throws IndexOutOfRange when u uses a factor or generator outside spec.
void check_in_spec(const NormalWord& u, const GroupSpec& spec);

/// Text syntax: a1..aN / A1..AN (or a1^-1), single-letter aliases a,b,c,...
/// (g excluded) for a1,a2,a3,..., abelian syllables g<j>[c1,...,ck], and
/// optional integer exponents `^k`. "1" denotes the identity.
NormalWord parse_word(std::string_view text, const GroupSpec& spec);
std::string format_word(const NormalWord& u);

}  // namespace polexp
