#pragma once

// Genus-2 surface group: words in a1, b1, a2, b2, representations into
// SO+(2,1), translation lengths and the stretch constant K.

#include "stretchlab/lorentz.h"

#include <array>
#include <string>
#include <vector>

namespace stretchlab {

enum Gen : int { kA1 = 0, kB1 = 1, kA2 = 2, kB2 = 3 };

struct Letter {
  int gen = 0;  // 0..3
  int exp = 1;  // +1 or -1

  bool operator==(const Letter& o) const { return gen == o.gen && exp == o.exp; }
  bool cancels(const Letter& o) const { return gen == o.gen && exp == -o.exp; }
};

/// Freely reduced word in the standard generators.
class Word {
 public:
  Word() = default;
  explicit Word(std::vector<Letter> letters);

  /// Parses "a1 b1 A1 B1" (upper case = inverse), "a1^-1", or "a1b1".
  /// The empty string, "e" and "1" denote the identity.
  static Word parse(const std::string& text);
  static Word generator(int gen, int exp = 1);
  /// [a1,b1][a2,b2] = a1 b1 a1^-1 b1^-1 a2 b2 a2^-1 b2^-1.
  static Word relator();

  const std::vector<Letter>& letters() const { return letters_; }
  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }

  Word inverse() const;
  Word cyclically_reduced() const;
  /// Prefix of length n and the remaining suffix.
  Word prefix(std::size_t n) const;
  Word suffix(std::size_t n) const;

  std::string str() const;

  friend Word operator*(const Word& a, const Word& b);
  bool operator==(const Word& o) const { return letters_ == o.letters_; }
  bool operator!=(const Word& o) const { return !(*this == o); }

 private:
  void reduce();
  std::vector<Letter> letters_;
};

std::string gen_name(int gen);

/// Conjugacy in the free group (cyclic rotations of cyclic reductions).
bool freely_conjugate(const Word& a, const Word& b);

struct SurfaceGroupRep {
  std::array<GroupElem, 4> gens;
  std::string label = "sigma";

  const GroupElem& operator[](int i) const { return gens[i]; }
  GroupElem letter(const Letter& l) const {
    return l.exp > 0 ? gens[l.gen] : gens[l.gen].inverse();
  }
  /// ||rep(h) - rep(t)||_F for the halves of balanced_relator_halves; zero
  /// iff the relator holds.
  double relator_residual() const;
  /// ||rep(relator) - I||_F in plain double arithmetic (diagnostic only).
  double plain_relator_residual() const;
  /// Throws GeometryError unless the relator and hyperbolicity invariants hold.
  void validate(double tolerance = 1e-9) const;
};

/// Split of a cyclic rotation of the relator as head * tail = relator',
/// returned as (head, tail^-1), choosing the rotation whose partial products
/// have the smallest total image norm. The relator holds iff rep(head) = rep(tail^-1).
std::pair<Word, Word> balanced_relator_halves(const SurfaceGroupRep& rep);

bool same_rep(const SurfaceGroupRep& a, const SurfaceGroupRep& b,
              double tolerance = 1e-12);

/// Side length / translation length of the regular octagon with angles pi/4.
double octagon_length();

/// The octagon side pairings x_k = R(k pi/4) T R(-k pi/4), k = 0..3, written
/// as words in the standard generators; x_k maps side k+4 onto side k.
const std::array<Word, 4>& octagon_side_words();

/// Discrete faithful representation uniformizing the regular octagon
/// (the Bolza surface); every generator has translation length
/// octagon_length().
SurfaceGroupRep octagon_representation();
/// The raw side pairing isometries x_0..x_3.
std::array<GroupElem, 4> octagon_side_pairings();

GroupElem evaluate(const Word& w, const SurfaceGroupRep& rep);

/// Tr g = 1 + 2 cosh l. Throws for elliptic or parabolic g.
double translation_length(const GroupElem& g);
/// Unit generator B, (B,B) = 2, with exp(l B) = g.
LieAlg axis_generator(const GroupElem& g);
/// Nearest point of the axis of B to the apex.
MinkVec axis_point(const LieAlg& b);

double stretch_ratio(const Word& w, const SurfaceGroupRep& sigma,
                     const SurfaceGroupRep& rho);

struct KBound {
  double value = 1.0;
  Word best;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;   // non-hyperbolic in either structure
  std::size_t classes = 0;   // distinct (trace sigma, trace rho) buckets
};

/// max over the list of stretch ratios; words that are not hyperbolic in
/// either representation are skipped and counted.
KBound k_lower_bound(const std::vector<Word>& words, const SurfaceGroupRep& sigma,
                     const SurfaceGroupRep& rho);
/// Same over every cyclically reduced word of length <= max_length,
/// enumerated with shared prefix products.
KBound k_lower_bound(int max_length, const SurfaceGroupRep& sigma,
                     const SurfaceGroupRep& rho);

/// Freely and cyclically reduced words of length 1..max_length, one per
/// cyclic rotation class is NOT enforced (rotations are conjugate and give
/// equal lengths).
std::vector<Word> enumerate_words(int max_length);

}  // namespace stretchlab
