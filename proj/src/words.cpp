#include "polexp/words.hpp"

#include <cctype>
#include <limits>

#include "polexp/error.hpp"

namespace polexp {

void GroupSpec::validate() const {
  if (free_rank < 0) throw Error(ErrorKind::SpecMismatch, "negative free rank");
  for (int k : abelian_ranks) {
    if (k <= 0) throw Error(ErrorKind::SpecMismatch, "abelian factor rank must be positive");
  }
  if (abelian_ranks.empty() && free_rank == 0) {
    throw Error(ErrorKind::SpecMismatch, "group has no factors");
  }
}

std::string to_string(const GroupSpec& spec) {
  std::string s = "free " + std::to_string(spec.free_rank) + " abelian [";
  for (std::size_t i = 0; i < spec.abelian_ranks.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(spec.abelian_ranks[i]);
  }
  return s + "]";
}

NormalWord NormalWord::letter(int index, int sign) {
  WordBuilder b;
  b.push_letter(index, sign);
  return std::move(b).finish();
}

NormalWord NormalWord::abelian(int factor, IntVector v) {
  WordBuilder b;
  b.push_abelian(factor, std::move(v));
  return std::move(b).finish();
}

std::vector<Syllable> NormalWord::syllables() const {
  std::vector<Syllable> out;
  out.reserve(codes_.size());
  std::size_t vi = 0;
  for (Code c : codes_) {
    if (is_abelian_code(c)) {
      out.push_back(Syllable::abelian(factor_of(c), vectors_[vi++]));
    } else {
      out.push_back(Syllable::free(c > 0 ? c : -c, c > 0 ? 1 : -1));
    }
  }
  return out;
}

WordBuilder::Push WordBuilder::push_code(NormalWord::Code code, const IntVector* v, bool negate) {
  auto& codes = word_.codes_;
  auto& vecs = word_.vectors_;
  if (NormalWord::is_abelian_code(code)) {
    if (!codes.empty() && codes.back() == code) {
      auto& top = vecs.back();
      if (top.size() != v->size()) throw Error(ErrorKind::SpecMismatch, "abelian rank mismatch");
      for (std::size_t i = 0; i < top.size(); ++i) {
        if (negate) top[i] -= (*v)[i];
        else top[i] += (*v)[i];
      }
      if (is_zero(top)) {
        codes.pop_back();
        vecs.pop_back();
        return Push::Cancelled;
      }
      return Push::Merged;
    }
    if (is_zero(*v)) return Push::Cancelled;
    codes.push_back(code);
    vecs.push_back(negate ? -*v : *v);
    return Push::Appended;
  }
  if (!codes.empty() && codes.back() == -code) {
    codes.pop_back();
    return Push::Cancelled;
  }
  codes.push_back(code);
  return Push::Appended;
}

void WordBuilder::push_letter(int index, int sign) {
  if (index <= 0 || index >= NormalWord::kAbelianTag) {
    throw Error(ErrorKind::IndexOutOfRange, "free generator index " + std::to_string(index));
  }
  push_code(sign > 0 ? index : -index, nullptr, false);
}

void WordBuilder::push_abelian(int factor, IntVector v) {
  if (factor <= 0) throw Error(ErrorKind::IndexOutOfRange, "abelian factor " + std::to_string(factor));
  push_code(NormalWord::abelian_code(factor), &v, false);
}

void WordBuilder::push(const Syllable& s) {
  if (s.is_free()) push_letter(s.index, s.sign);
  else push_abelian(s.index, s.vector);
}

void WordBuilder::append(const NormalWord& w) {
  const auto& codes = w.codes_;
  const auto& vecs = w.vectors_;
  std::size_t i = 0;
  std::size_t vi = 0;
  while (i < codes.size()) {
    const auto c = codes[i];
    const IntVector* v = NormalWord::is_abelian_code(c) ? &vecs[vi++] : nullptr;
    ++i;
    if (push_code(c, v, false) != Push::Cancelled) break;
  }
  // The remainder of a normal word cannot interact with what is now on top.
  word_.codes_.insert(word_.codes_.end(), codes.begin() + static_cast<std::ptrdiff_t>(i), codes.end());
  word_.vectors_.insert(word_.vectors_.end(), vecs.begin() + static_cast<std::ptrdiff_t>(vi), vecs.end());
}

void WordBuilder::append_inverse(const NormalWord& w) {
  const auto& codes = w.codes_;
  const auto& vecs = w.vectors_;
  std::size_t i = codes.size();
  std::size_t vi = vecs.size();
  while (i > 0) {
    const auto c = codes[i - 1];
    --i;
    if (NormalWord::is_abelian_code(c)) {
      if (push_code(c, &vecs[--vi], true) != Push::Cancelled) break;
    } else if (push_code(-c, nullptr, false) != Push::Cancelled) {
      break;
    }
  }
  auto& out_codes = word_.codes_;
  auto& out_vecs = word_.vectors_;
  out_codes.reserve(out_codes.size() + i);
  while (i > 0) {
    const auto c = codes[--i];
    if (NormalWord::is_abelian_code(c)) {
      out_codes.push_back(c);
      out_vecs.push_back(-vecs[--vi]);
    } else {
      out_codes.push_back(-c);
    }
  }
}

void check_in_spec(const NormalWord& u, const GroupSpec& spec) {
  std::size_t vi = 0;
  for (auto c : u.codes()) {
    if (NormalWord::is_abelian_code(c)) {
      const int j = NormalWord::factor_of(c);
      if (j < 1 || j > spec.factor_count()) {
        throw Error(ErrorKind::IndexOutOfRange, "abelian factor g" + std::to_string(j) + " not in " + to_string(spec));
      }
      if (static_cast<int>(u.vectors()[vi].size()) != spec.rank(j)) {
        throw Error(ErrorKind::IndexOutOfRange, "vector of wrong length for factor g" + std::to_string(j));
      }
      ++vi;
    } else {
      const int i = c > 0 ? c : -c;
      if (i > spec.free_rank) {
        throw Error(ErrorKind::IndexOutOfRange, "free generator a" + std::to_string(i) + " not in " + to_string(spec));
      }
    }
  }
}

NormalWord normalize(const std::vector<Syllable>& raw, const GroupSpec& spec) {
  WordBuilder b;
  for (const auto& s : raw) {
    if (s.is_free()) {
      if (s.index < 1 || s.index > spec.free_rank) {
        throw Error(ErrorKind::IndexOutOfRange, "free generator a" + std::to_string(s.index));
      }
    } else {
      if (s.index < 1 || s.index > spec.factor_count()) {
        throw Error(ErrorKind::IndexOutOfRange, "abelian factor g" + std::to_string(s.index));
      }
      if (static_cast<int>(s.vector.size()) != spec.rank(s.index)) {
        throw Error(ErrorKind::IndexOutOfRange, "vector of wrong length for factor g" + std::to_string(s.index));
      }
    }
    b.push(s);
  }
  return std::move(b).finish();
}

NormalWord concat(const NormalWord& u, const NormalWord& v) {
  WordBuilder b(u);
  b.append(v);
  return std::move(b).finish();
}

NormalWord invert(const NormalWord& u) {
  WordBuilder b;
  b.append_inverse(u);
  return std::move(b).finish();
}

NormalWord power(const NormalWord& u, long k) {
  WordBuilder b;
  for (long i = 0; i < (k < 0 ? -k : k); ++i) {
    if (k > 0) b.append(u);
    else b.append_inverse(u);
  }
  return std::move(b).finish();
}

Integer word_length(const NormalWord& u) {
  Integer total = 0;
  unsigned long letters = 0;
  for (auto c : u.codes()) {
    if (!NormalWord::is_abelian_code(c)) ++letters;
  }
  total += letters;
  for (const auto& v : u.vectors()) total += l1_norm(v);
  return total;
}

CyclicReduction cyclic_reduce(const NormalWord& u) {
  WordBuilder conj;
  NormalWord current = u;
  while (true) {
    const auto& codes = current.codes();
    const auto& vecs = current.vectors();
    std::size_t l = 0;
    std::size_t r = codes.size();
    while (r - l >= 2 && !NormalWord::is_abelian_code(codes[l]) && codes[l] == -codes[r - 1]) {
      conj.push_letter(codes[l] > 0 ? codes[l] : -codes[l], codes[l] > 0 ? 1 : -1);
      ++l;
      --r;
    }
    const bool wrap_merge = r - l >= 2 && NormalWord::is_abelian_code(codes[l]) && codes[l] == codes[r - 1];
    if (!wrap_merge) {
      WordBuilder core;
      std::size_t vi = 0;
      for (std::size_t i = 0; i < r; ++i) {
        const bool ab = NormalWord::is_abelian_code(codes[i]);
        if (i >= l) {
          if (ab) core.push_abelian(NormalWord::factor_of(codes[i]), vecs[vi]);
          else core.push_letter(codes[i] > 0 ? codes[i] : -codes[i], codes[i] > 0 ? 1 : -1);
        }
        if (ab) ++vi;
      }
      return {std::move(core).finish(), std::move(conj).finish()};
    }
    // current[l..r) = x * m * y with x, y in the same factor: conjugate by x
    // to get m * (y + x).
    std::size_t vi_first = 0;
    for (std::size_t i = 0; i < l; ++i) {
      if (NormalWord::is_abelian_code(codes[i])) ++vi_first;
    }
    std::size_t vi_last = vi_first;
    for (std::size_t i = l; i + 1 < r; ++i) {
      if (NormalWord::is_abelian_code(codes[i])) ++vi_last;
    }
    const int factor = NormalWord::factor_of(codes[l]);
    const IntVector& x = vecs[vi_first];
    conj.push_abelian(factor, x);
    WordBuilder next;
    std::size_t vi = vi_first + 1;
    for (std::size_t i = l + 1; i + 1 < r; ++i) {
      if (NormalWord::is_abelian_code(codes[i])) next.push_abelian(NormalWord::factor_of(codes[i]), vecs[vi++]);
      else next.push_letter(codes[i] > 0 ? codes[i] : -codes[i], codes[i] > 0 ? 1 : -1);
    }
    next.push_abelian(factor, vecs[vi_last] + x);
    current = std::move(next).finish();
  }
}

Integer conj_length(const NormalWord& u) { return word_length(cyclic_reduce(u).core); }

namespace {

class WordScanner {
 public:
  WordScanner(std::string_view text, const GroupSpec& spec) : text_(text), spec_(spec) {}

  NormalWord run() {
    WordBuilder b;
    skip_separators();
    if (pos_ < text_.size() && text_[pos_] == '1' && is_identity_token()) {
      ++pos_;
      skip_separators();
    }
    while (pos_ < text_.size()) {
      read_syllable(b);
      skip_separators();
    }
    return std::move(b).finish();
  }

 private:
  bool is_identity_token() const {
    const std::size_t next = pos_ + 1;
    return next >= text_.size() || is_separator(text_[next]);
  }

  static bool is_separator(char c) {
    return std::isspace(static_cast<unsigned char>(c)) || c == '*' || c == '.';
  }

  void skip_separators() {
    while (pos_ < text_.size()) {
      if (is_separator(text_[pos_])) {
        ++pos_;
      } else if (text_.substr(pos_, 2) == "\xC2\xB7") {  // middle dot
        pos_ += 2;
      } else {
        break;
      }
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::ParseError, "column " + std::to_string(pos_ + 1) + ": " + msg + " in '" + std::string(text_) + "'");
  }

  long read_int() {
    const std::size_t start = pos_;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
    const std::size_t digits = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == digits) fail("expected integer");
    return std::stol(std::string(text_.substr(start, pos_ - start)));
  }

  Integer read_big_int() {
    while (pos_ < text_.size() && text_[pos_] == ' ') ++pos_;
    const std::size_t start = pos_;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
    const std::size_t digits = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == digits) fail("expected integer");
    std::string s(text_.substr(start, pos_ - start));
    if (s[0] == '+') s.erase(0, 1);
    while (pos_ < text_.size() && text_[pos_] == ' ') ++pos_;
    return Integer(s);
  }

  long read_exponent() {
    if (pos_ < text_.size() && text_[pos_] == '^') {
      ++pos_;
      return read_int();
    }
    return 1;
  }

  void read_syllable(WordBuilder& b) {
    const char c = text_[pos_];
    if (c == 'g' && pos_ + 1 < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
      ++pos_;
      const long factor = read_int();
      if (factor < 1 || factor > spec_.factor_count()) fail("abelian factor g" + std::to_string(factor) + " out of range");
      if (pos_ >= text_.size() || text_[pos_] != '[') fail("expected '[' after g" + std::to_string(factor));
      ++pos_;
      IntVector v;
      while (true) {
        v.push_back(read_big_int());
        if (pos_ >= text_.size()) fail("unterminated vector");
        if (text_[pos_] == ',') {
          ++pos_;
          continue;
        }
        if (text_[pos_] == ']') {
          ++pos_;
          break;
        }
        fail("expected ',' or ']'");
      }
      if (static_cast<int>(v.size()) != spec_.rank(static_cast<int>(factor))) {
        fail("factor g" + std::to_string(factor) + " has rank " + std::to_string(spec_.rank(static_cast<int>(factor))));
      }
      const long e = read_exponent();
      for (auto& x : v) x *= e;
      b.push_abelian(static_cast<int>(factor), std::move(v));
      return;
    }
    if (!std::isalpha(static_cast<unsigned char>(c))) fail(std::string("unexpected character '") + c + "'");
    const bool upper = std::isupper(static_cast<unsigned char>(c));
    ++pos_;
    long index = 0;
    if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])) && (c == 'a' || c == 'A')) {
      index = read_int();
    } else {
      if (c == 'g' || c == 'G') fail("'g' is reserved for abelian syllables");
      index = std::tolower(static_cast<unsigned char>(c)) - 'a' + 1;
    }
    if (index < 1 || index > spec_.free_rank) fail("free generator " + std::to_string(index) + " out of range");
    long e = read_exponent();
    if (upper) e = -e;
    for (long i = 0; i < (e < 0 ? -e : e); ++i) b.push_letter(static_cast<int>(index), e > 0 ? 1 : -1);
  }

  std::string_view text_;
  const GroupSpec& spec_;
  std::size_t pos_ = 0;
};

}  // namespace

NormalWord parse_word(std::string_view text, const GroupSpec& spec) {
  return WordScanner(text, spec).run();
}

std::string format_word(const NormalWord& u) {
  if (u.empty()) return "1";
  std::string s;
  std::size_t vi = 0;
  for (auto c : u.codes()) {
    if (!s.empty()) s += ' ';
    if (NormalWord::is_abelian_code(c)) {
      s += "g" + std::to_string(NormalWord::factor_of(c)) + to_string(u.vectors()[vi++]);
    } else {
      s += (c > 0 ? "a" : "A") + std::to_string(c > 0 ? c : -c);
    }
  }
  return s;
}

}  // namespace polexp
