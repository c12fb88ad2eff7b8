#include "qmee/quantizer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qmee {
namespace {

std::pair<std::size_t, double> nearest_in(std::span<const double> words,
                                          double x) {
  std::size_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < words.size(); ++j) {
    const double dist = std::fabs(x - words[j]);
    if (dist < best_dist) {  // strict: earliest index wins ties
      best_dist = dist;
      best = j;
    }
  }
  return {best, best_dist};
}

}  // namespace

Codebook::Codebook(std::vector<double> words, std::vector<std::int64_t> counts,
                   double epsilon)
    : words_(std::move(words)), counts_(std::move(counts)), epsilon_(epsilon) {
  if (words_.empty()) {
    throw std::invalid_argument("Codebook: words must be nonempty");
  }
  if (words_.size() != counts_.size()) {
    throw std::invalid_argument("Codebook: words/counts size mismatch");
  }
  if (std::isnan(epsilon_) || epsilon_ < 0.0) {
    throw std::invalid_argument("Codebook: epsilon must be >= 0");
  }
  total_count_ = 0;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!std::isfinite(words_[i])) {
      throw std::invalid_argument("Codebook: words must be finite");
    }
    if (counts_[i] < 1) {
      throw std::invalid_argument("Codebook: counts must be positive");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (words_[i] == words_[j]) {
        throw std::invalid_argument("Codebook: words must be distinct");
      }
    }
    total_count_ += counts_[i];
  }
}

Codebook Codebook::single_word(double word, std::int64_t count) {
  return Codebook({word}, {count}, 0.0);
}

QuantizationResult quantize_stream(const ErrorVector& errors, double epsilon) {
  if (std::isnan(epsilon) || epsilon < 0.0) {
    throw std::invalid_argument("quantize_stream: epsilon must be >= 0");
  }
  const auto xs = errors.values();
  std::vector<double> words;
  std::vector<std::int64_t> counts;
  std::vector<std::int32_t> assignments(xs.size());
  words.reserve(64);
  counts.reserve(64);

  words.push_back(xs[0]);
  counts.push_back(1);
  assignments[0] = 0;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const auto [j, dist] = nearest_in(words, xs[i]);
    if (dist <= epsilon) {
      ++counts[j];
      assignments[i] = static_cast<std::int32_t>(j);
    } else {
      words.push_back(xs[i]);
      counts.push_back(1);
      assignments[i] = static_cast<std::int32_t>(words.size() - 1);
    }
  }
  return {Codebook(std::move(words), std::move(counts), epsilon),
          std::move(assignments)};
}

std::pair<std::size_t, double> nearest_word(double x, const Codebook& codebook) {
  return nearest_in(codebook.words(), x);
}

}  // namespace qmee
