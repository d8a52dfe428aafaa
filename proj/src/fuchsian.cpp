#include "stretchlab/fuchsian.h"

#include "stretchlab/parallel.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

namespace stretchlab {

Word::Word(std::vector<Letter> letters) : letters_(std::move(letters)) { reduce(); }

void Word::reduce() {
  std::vector<Letter> out;
  out.reserve(letters_.size());
  for (const Letter& l : letters_) {
    if (l.gen < 0 || l.gen > 3 || (l.exp != 1 && l.exp != -1)) {
      throw std::invalid_argument("Word: invalid letter");
    }
    if (!out.empty() && out.back().cancels(l)) {
      out.pop_back();
    } else {
      out.push_back(l);
    }
  }
  letters_ = std::move(out);
}

Word Word::generator(int gen, int exp) { return Word({Letter{gen, exp}}); }

Word Word::relator() { return parse("a1 b1 A1 B1 a2 b2 A2 B2"); }

Word Word::parse(const std::string& text) {
  std::vector<Letter> letters;
  std::size_t i = 0;
  const std::size_t n = text.size();
  auto fail = [&](const std::string& why) {
    throw std::invalid_argument("cannot parse word '" + text + "': " + why);
  };
  while (i < n) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c)) || c == '*' || c == '.') {
      ++i;
      continue;
    }
    if ((c == 'e' || c == '1') && n == 1) break;
    const char lc = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lc != 'a' && lc != 'b') fail("unexpected character");
    if (i + 1 >= n || (text[i + 1] != '1' && text[i + 1] != '2')) fail("missing index");
    const int handle = text[i + 1] - '1';
    int exp = std::isupper(static_cast<unsigned char>(c)) ? -1 : 1;
    i += 2;
    if (i < n && text[i] == '^') {
      if (text.compare(i, 3, "^-1") == 0) {
        exp = -exp;
        i += 3;
      } else if (text.compare(i, 2, "^1") == 0) {
        i += 2;
      } else {
        fail("only exponents +-1 are supported");
      }
    }
    letters.push_back({2 * handle + (lc == 'b' ? 1 : 0), exp});
  }
  return Word(std::move(letters));
}

Word Word::inverse() const {
  std::vector<Letter> out(letters_.rbegin(), letters_.rend());
  for (auto& l : out) l.exp = -l.exp;
  return Word(std::move(out));
}

Word Word::cyclically_reduced() const {
  std::size_t lo = 0, hi = letters_.size();
  while (hi - lo >= 2 && letters_[lo].cancels(letters_[hi - 1])) {
    ++lo;
    --hi;
  }
  return Word(std::vector<Letter>(letters_.begin() + lo, letters_.begin() + hi));
}

Word Word::prefix(std::size_t n) const {
  n = std::min(n, letters_.size());
  return Word(std::vector<Letter>(letters_.begin(), letters_.begin() + n));
}

Word Word::suffix(std::size_t n) const {
  n = std::min(n, letters_.size());
  return Word(std::vector<Letter>(letters_.begin() + n, letters_.end()));
}

std::string gen_name(int gen) {
  static const char* names[] = {"a1", "b1", "a2", "b2"};
  return names[gen];
}

std::string Word::str() const {
  if (letters_.empty()) return "e";
  std::string s;
  for (std::size_t i = 0; i < letters_.size(); ++i) {
    if (i) s += ' ';
    std::string name = gen_name(letters_[i].gen);
    if (letters_[i].exp < 0) name[0] = static_cast<char>(std::toupper(name[0]));
    s += name;
  }
  return s;
}

Word operator*(const Word& a, const Word& b) {
  std::vector<Letter> l = a.letters_;
  l.insert(l.end(), b.letters_.begin(), b.letters_.end());
  return Word(std::move(l));
}

bool freely_conjugate(const Word& a, const Word& b) {
  const Word ca = a.cyclically_reduced(), cb = b.cyclically_reduced();
  const auto& x = ca.letters();
  const auto& y = cb.letters();
  if (x.size() != y.size()) return false;
  if (x.empty()) return true;
  const std::size_t n = x.size();
  for (std::size_t r = 0; r < n; ++r) {
    bool eq = true;
    for (std::size_t i = 0; i < n && eq; ++i) eq = x[i] == y[(i + r) % n];
    if (eq) return true;
  }
  return false;
}

namespace {

using Mat3L = Eigen::Matrix<long double, 3, 3>;

Mat3L sharp_l(const Mat3L& m) {
  Mat3L e = Mat3L::Identity();
  e(2, 2) = -1;
  return e * m.transpose() * e;
}

Mat3L evaluate_l(const Word& w, const SurfaceGroupRep& rep) {
  Mat3L acc = Mat3L::Identity();
  for (const Letter& l : w.letters()) {
    const Mat3L g = rep[l.gen].m.cast<long double>();
    acc = acc * (l.exp > 0 ? g : sharp_l(g));
  }
  return acc;
}

}  // namespace

std::pair<Word, Word> balanced_relator_halves(const SurfaceGroupRep& rep) {
  const Word r = Word::relator();
  const auto& ls = r.letters();
  std::pair<Word, Word> best;
  long double best_norm = std::numeric_limits<long double>::infinity();
  for (int k = 0; k < 8; ++k) {
    std::vector<Letter> head, tail_inv;
    for (int i = 0; i < 4; ++i) head.push_back(ls[(k + i) % 8]);
    for (int i = 7; i >= 4; --i) tail_inv.push_back(Letter{ls[(k + i) % 8].gen, -ls[(k + i) % 8].exp});
    Word h(head), t(tail_inv);
    // conditioning score: sum of the norms of all partial products
    long double n = 0;
    for (std::size_t j = 1; j <= 4; ++j) {
      n += evaluate_l(h.prefix(j), rep).norm() + evaluate_l(t.prefix(j), rep).norm();
    }
    if (n < best_norm) {
      best_norm = n;
      best = {h, t};
    }
  }
  return best;
}

// The full product of eight generators has partial products of norm ~3e3 for
// the octagon, so rounding in the last bit of a generator already moves the
// plain product by ~1e-8. Comparing two halves of a cyclic rotation of the
// relator (a conjugate, so it vanishes iff the relator holds) keeps the
// amplification at the size of the best-conditioned partial products.
double SurfaceGroupRep::relator_residual() const {
  const auto [head, tail_inv] = balanced_relator_halves(*this);
  return static_cast<double>((evaluate_l(head, *this) - evaluate_l(tail_inv, *this)).norm());
}

double SurfaceGroupRep::plain_relator_residual() const {
  GroupElem g;
  const Word r = Word::relator();
  for (const Letter& l : r.letters()) g *= letter(l);
  return (g.m - Mat3::Identity()).norm();
}

void SurfaceGroupRep::validate(double tolerance) const {
  for (int i = 0; i < 4; ++i) {
    if (!gens[i].m.allFinite() || !is_group_element(gens[i].m, 1e-9)) {
      throw GeometryError("representation: generator " + gen_name(i) +
                          " is not in SO+(2,1)");
    }
    if (gens[i].trace() - 3.0 <= tol::kHyperbolic) {
      throw GeometryError("representation: generator " + gen_name(i) +
                          " is not hyperbolic");
    }
  }
  const double r = relator_residual();
  if (!(r <= tolerance)) {
    throw GeometryError("representation: relator residual " + std::to_string(r) +
                        " exceeds tolerance");
  }
}

bool same_rep(const SurfaceGroupRep& a, const SurfaceGroupRep& b, double tolerance) {
  for (int i = 0; i < 4; ++i) {
    if ((a.gens[i].m - b.gens[i].m).norm() >
        tolerance * std::max(1.0, a.gens[i].m.norm())) {
      return false;
    }
  }
  return true;
}

double octagon_length() {
  // cosh(l/2) = cot(pi/8) = 1 + sqrt 2
  return 2.0 * std::acosh(1.0 + std::sqrt(2.0));
}

const std::array<Word, 4>& octagon_side_words() {
  static const std::array<Word, 4> words = {
      Word::parse("a1"),
      Word::parse("B1"),
      Word::parse("B1 A1 b2"),
      Word::parse("B1 A1 b2 a2"),
  };
  return words;
}

namespace {

// Side pairings in extended precision; entries are algebraic in sqrt 2:
// cosh l = 5 + 4 sqrt 2, rotations by multiples of pi/4.
std::array<Mat3L, 4> side_pairings_l() {
  const long double r2 = std::sqrt(2.0L);
  const long double ch = 5.0L + 4.0L * r2, sh = std::sqrt(ch * ch - 1.0L);
  Mat3L t;
  t << ch, 0, sh, 0, 1, 0, sh, 0, ch;
  const long double c[4] = {1.0L, r2 / 2, 0.0L, -r2 / 2};
  const long double s[4] = {0.0L, r2 / 2, 1.0L, r2 / 2};
  std::array<Mat3L, 4> x;
  for (int k = 0; k < 4; ++k) {
    Mat3L r = Mat3L::Identity();
    r(0, 0) = c[k];
    r(0, 1) = -s[k];
    r(1, 0) = s[k];
    r(1, 1) = c[k];
    x[k] = r * t * r.transpose();
  }
  return x;
}

}  // namespace

std::array<GroupElem, 4> octagon_side_pairings() {
  const auto xl = side_pairings_l();
  std::array<GroupElem, 4> x;
  for (int k = 0; k < 4; ++k) x[k] = GroupElem(xl[k].cast<double>());
  return x;
}

SurfaceGroupRep octagon_representation() {
  const auto x = side_pairings_l();
  SurfaceGroupRep rep;
  rep.label = "sigma";
  rep.gens[kA1] = GroupElem(x[0].cast<double>());
  rep.gens[kB1] = GroupElem(sharp_l(x[1]).cast<double>());
  rep.gens[kA2] = GroupElem((sharp_l(x[2]) * x[3]).cast<double>());
  rep.gens[kB2] = GroupElem((x[0] * sharp_l(x[1]) * x[2]).cast<double>());
  rep.validate();
  return rep;
}

// Long products of octagon generators reach norms ~1e4, so the product is
// accumulated in extended precision and rounded once.
GroupElem evaluate(const Word& w, const SurfaceGroupRep& rep) {
  if (w.size() <= 1) return w.empty() ? GroupElem() : rep.letter(w.letters()[0]);
  return GroupElem(evaluate_l(w, rep).cast<double>());
}

double translation_length(const GroupElem& g) {
  const double excess = g.trace() - 3.0;
  if (!(excess > tol::kHyperbolic)) {
    throw GeometryError("translation_length: element is " +
                        to_string(classify(g)) + ", not hyperbolic");
  }
  return std::acosh(0.5 * (g.trace() - 1.0));
}

LieAlg axis_generator(const GroupElem& g) {
  const double l = translation_length(g);
  return project_lie((g.m - sharp(g.m)) / (2.0 * std::sinh(l)));
}

MinkVec axis_point(const LieAlg& b) {
  // B^2 is the (,)-orthogonal projector onto the timelike plane of the axis.
  return normalize_hyperboloid(b.m * (b.m * apex()));
}

double stretch_ratio(const Word& w, const SurfaceGroupRep& sigma,
                     const SurfaceGroupRep& rho) {
  return translation_length(evaluate(w, rho)) / translation_length(evaluate(w, sigma));
}

namespace {

struct TracePair {
  double s, r;
  bool operator<(const TracePair& o) const {
    constexpr double eps = 1e-9;
    if (std::abs(s - o.s) > eps * std::max(1.0, std::abs(s))) return s < o.s;
    if (std::abs(r - o.r) > eps * std::max(1.0, std::abs(r))) return r < o.r;
    return false;
  }
};

struct Accum {
  KBound kb;
  bool any = false;
  std::set<TracePair> buckets;

  void add(const Word& w, const GroupElem& gs, const GroupElem& gr) {
    ++kb.evaluated;
    const double ts = gs.trace(), tr = gr.trace();
    if (ts - 3.0 <= tol::kHyperbolic || tr - 3.0 <= tol::kHyperbolic) {
      ++kb.skipped;
      return;
    }
    buckets.insert({ts, tr});
    const double ratio = std::acosh(0.5 * (tr - 1.0)) / std::acosh(0.5 * (ts - 1.0));
    if (!any || ratio > kb.value) {
      kb.value = ratio;
      kb.best = w;
      any = true;
    }
  }
};

}  // namespace

KBound k_lower_bound(const std::vector<Word>& words, const SurfaceGroupRep& sigma,
                     const SurfaceGroupRep& rho) {
  Accum acc;
  for (const Word& w : words) {
    if (w.empty()) continue;
    acc.add(w, evaluate(w, sigma), evaluate(w, rho));
  }
  if (!acc.any) acc.kb.value = 1.0;
  acc.kb.classes = acc.buckets.size();
  return acc.kb;
}

namespace {

void dfs(std::vector<Letter>& stack, int max_length, const GroupElem& gs,
         const GroupElem& gr, const SurfaceGroupRep& sigma,
         const SurfaceGroupRep& rho, Accum& acc) {
  if (!stack.empty() && !stack.front().cancels(stack.back())) {
    acc.add(Word(stack), gs, gr);
  }
  if (static_cast<int>(stack.size()) == max_length) return;
  for (int gen = 0; gen < 4; ++gen) {
    for (int exp : {1, -1}) {
      const Letter l{gen, exp};
      if (!stack.empty() && stack.back().cancels(l)) continue;
      stack.push_back(l);
      dfs(stack, max_length, gs * sigma.letter(l), gr * rho.letter(l), sigma, rho, acc);
      stack.pop_back();
    }
  }
}

}  // namespace

KBound k_lower_bound(int max_length, const SurfaceGroupRep& sigma,
                     const SurfaceGroupRep& rho) {
  if (max_length < 1) throw std::invalid_argument("k_lower_bound: max_length < 1");
  // Shard by first letter; each shard owns its accumulator.
  std::vector<Accum> shards(8);
  parallel_for(8, [&](std::size_t s) {
    std::vector<Letter> stack{Letter{static_cast<int>(s / 2), s % 2 ? -1 : 1}};
    const Letter& l = stack.front();
    dfs(stack, max_length, sigma.letter(l), rho.letter(l), sigma, rho, shards[s]);
  });
  Accum total;
  for (auto& s : shards) {
    total.kb.evaluated += s.kb.evaluated;
    total.kb.skipped += s.kb.skipped;
    total.buckets.insert(s.buckets.begin(), s.buckets.end());
    if (s.any && (!total.any || s.kb.value > total.kb.value)) {
      total.kb.value = s.kb.value;
      total.kb.best = s.kb.best;
      total.any = true;
    }
  }
  if (!total.any) total.kb.value = 1.0;
  total.kb.classes = total.buckets.size();
  return total.kb;
}

std::vector<Word> enumerate_words(int max_length) {
  std::vector<Word> out;
  std::vector<Letter> stack;
  auto rec = [&](auto&& self) -> void {
    if (!stack.empty() && !stack.front().cancels(stack.back())) out.emplace_back(stack);
    if (static_cast<int>(stack.size()) == max_length) return;
    for (int gen = 0; gen < 4; ++gen) {
      for (int exp : {1, -1}) {
        const Letter l{gen, exp};
        if (!stack.empty() && stack.back().cancels(l)) continue;
        stack.push_back(l);
        self(self);
        stack.pop_back();
      }
    }
  };
  rec(rec);
  return out;
}

}  // namespace stretchlab
