#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace trappedset {

/// Word in the free group on A, B with letters A=0, A^-1=1, B=2, B^-1=3.
/// The numeric order is the canonical letter order A < A^-1 < B < B^-1.
using Word = std::vector<std::uint8_t>;

constexpr std::uint8_t inverse_letter(std::uint8_t x) noexcept { return x ^ 1u; }

bool is_reduced(const Word& w);
bool is_cyclically_reduced(const Word& w);
Word inverse_word(const Word& w);
Word reversed(const Word& w);

/// Lexicographically least cyclic rotation.
Word least_rotation(const Word& w);

/// Least element among the rotations of w and of its inverse word: one
/// representative per unoriented conjugacy class.
Word canonical_word(const Word& w);

/// Largest k such that w = u^k.
int power_exponent(const Word& w);

/// Canonical cyclically reduced words with 1..max_letters letters.
/// oriented: one per conjugacy class; otherwise one per {class, inverse class}.
std::vector<Word> conjugacy_class_representatives(std::size_t max_letters, bool oriented, bool primitive_only);

}  // namespace trappedset
