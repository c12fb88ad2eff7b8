#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "qmee/types.hpp"

namespace qmee {

/// Code words with occupancy counts produced by the online quantizer.
/// Invariants enforced at construction: words nonempty, finite and pairwise
/// distinct; counts positive and aligned with words; epsilon >= 0 (infinity
/// allowed, meaning everything collapses onto the seed word).
class Codebook {
 public:
  Codebook(std::vector<double> words, std::vector<std::int64_t> counts,
           double epsilon);

  /// Degenerate one-word codebook; used to pin the correntropy special case.
  static Codebook single_word(double word, std::int64_t count);

  std::span<const double> words() const noexcept { return words_; }
  std::span<const std::int64_t> counts() const noexcept { return counts_; }
  double epsilon() const noexcept { return epsilon_; }
  std::size_t size() const noexcept { return words_.size(); }
  std::int64_t total_count() const noexcept { return total_count_; }

 private:
  std::vector<double> words_;
  std::vector<std::int64_t> counts_;
  double epsilon_;
  std::int64_t total_count_;
};

struct QuantizationResult {
  Codebook codebook;
  /// Word index per input sample; |e_j - words[assignments[j]]| <= epsilon,
  /// with distance exactly 0 for the sample that created its word.
  std::vector<std::int32_t> assignments;
};

/// Online quantization of an error stream. The first sample seeds the
/// codebook; each later sample maps to the nearest existing word when within
/// epsilon (ties and the boundary distance == epsilon count as within) and
/// otherwise appends itself as a new word. O(M N) time, deterministic.
QuantizationResult quantize_stream(const ErrorVector& errors, double epsilon);

/// Index of the nearest word and its absolute distance; ties break toward the
/// lowest (earliest-inserted) index.
std::pair<std::size_t, double> nearest_word(double x, const Codebook& codebook);

}  // namespace qmee
