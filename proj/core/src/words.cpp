#include "trappedset/words.hpp"

#include <algorithm>

namespace trappedset {

bool is_reduced(const Word& w) {
  for (std::size_t i = 1; i < w.size(); ++i)
    if (w[i] == inverse_letter(w[i - 1])) return false;
  return true;
}

bool is_cyclically_reduced(const Word& w) {
  if (w.empty()) return false;
  if (!is_reduced(w)) return false;
  return w.size() == 1 || w.back() != inverse_letter(w.front());
}

Word inverse_word(const Word& w) {
  Word out(w.rbegin(), w.rend());
  for (auto& x : out) x = inverse_letter(x);
  return out;
}

Word reversed(const Word& w) { return Word(w.rbegin(), w.rend()); }

Word least_rotation(const Word& w) {
  const std::size_t n = w.size();
  Word best = w;
  Word cand(n);
  for (std::size_t s = 1; s < n; ++s) {
    for (std::size_t i = 0; i < n; ++i) cand[i] = w[(s + i) % n];
    if (cand < best) best = cand;
  }
  return best;
}

Word canonical_word(const Word& w) { return std::min(least_rotation(w), least_rotation(inverse_word(w))); }

int power_exponent(const Word& w) {
  const std::size_t n = w.size();
  for (std::size_t p = 1; p <= n / 2; ++p) {
    if (n % p != 0) continue;
    bool periodic = true;
    for (std::size_t i = p; i < n && periodic; ++i) periodic = w[i] == w[i - p];
    if (periodic) return int(n / p);
  }
  return 1;
}

namespace {

void extend(Word& w, std::size_t max_letters, bool oriented, bool primitive_only, std::vector<Word>& out) {
  if (is_cyclically_reduced(w)) {
    const Word canon = oriented ? least_rotation(w) : canonical_word(w);
    if (canon == w && (!primitive_only || power_exponent(w) == 1)) out.push_back(w);
  }
  if (w.size() == max_letters) return;
  // a canonical word starts with its smallest letter
  for (std::uint8_t x = w.front(); x < 4; ++x) {
    if (x == inverse_letter(w.back())) continue;
    w.push_back(x);
    extend(w, max_letters, oriented, primitive_only, out);
    w.pop_back();
  }
}

}  // namespace

std::vector<Word> conjugacy_class_representatives(std::size_t max_letters, bool oriented, bool primitive_only) {
  std::vector<Word> out;
  for (std::uint8_t first = 0; first < 4 && max_letters > 0; ++first) {
    Word w{first};
    extend(w, max_letters, oriented, primitive_only, out);
  }
  std::sort(out.begin(), out.end(), [](const Word& a, const Word& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return out;
}

}  // namespace trappedset
