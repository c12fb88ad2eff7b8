#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "qmee/quantizer.hpp"
#include "qmee/rng.hpp"

using namespace qmee;

namespace {

ErrorVector random_errors(std::size_t n, std::uint64_t stream,
                          double scale = 1.0) {
  Philox4x64 rng(17, stream);
  std::vector<double> v(n);
  for (auto& x : v) x = scale * rng.normal();
  return ErrorVector(v);
}

}  // namespace

TEST_CASE("duplicate collapse at zero threshold") {
  const auto result = quantize_stream(ErrorVector({1.0, 1.0, 2.0}), 0.0);
  REQUIRE(result.codebook.size() == 2);
  CHECK(result.codebook.words()[0] == 1.0);
  CHECK(result.codebook.words()[1] == 2.0);
  CHECK(result.codebook.counts()[0] == 2);
  CHECK(result.codebook.counts()[1] == 1);
  CHECK(result.assignments == std::vector<std::int32_t>{0, 0, 1});
}

TEST_CASE("hand-traced stream") {
  // 0.0 seeds; 0.2 joins it (dist 0.2 <= 0.3); 0.5 opens a word
  // (dist 0.3 from 0.2's word is measured against 0.0: 0.5 > 0.3);
  // 0.55 joins 0.5.
  const auto result =
      quantize_stream(ErrorVector({0.0, 0.2, 0.5, 0.55}), 0.3);
  REQUIRE(result.codebook.size() == 2);
  CHECK(result.codebook.words()[0] == 0.0);
  CHECK(result.codebook.words()[1] == 0.5);
  CHECK(result.codebook.counts()[0] == 2);
  CHECK(result.codebook.counts()[1] == 2);
  CHECK(result.assignments == std::vector<std::int32_t>{0, 0, 1, 1});
}

TEST_CASE("boundary distance counts as within") {
  const auto result = quantize_stream(ErrorVector({0.0, 0.3}), 0.3);
  CHECK(result.codebook.size() == 1);
  CHECK(result.codebook.counts()[0] == 2);
}

TEST_CASE("infinite threshold keeps only the seed word") {
  const auto errors = random_errors(64, 0, 10.0);
  const auto result =
      quantize_stream(errors, std::numeric_limits<double>::infinity());
  REQUIRE(result.codebook.size() == 1);
  CHECK(result.codebook.words()[0] == errors[0]);
  CHECK(result.codebook.counts()[0] == 64);
}

TEST_CASE("count conservation and threshold guarantee") {
  for (const double epsilon : {0.0, 0.05, 0.2, 1.0, 5.0}) {
    for (std::uint64_t stream = 0; stream < 20; ++stream) {
      const auto errors = random_errors(100 + 7 * stream, stream);
      const auto result = quantize_stream(errors, epsilon);
      const auto counts = result.codebook.counts();
      CHECK(std::accumulate(counts.begin(), counts.end(), std::int64_t{0}) ==
            static_cast<std::int64_t>(errors.size()));
      CHECK(result.codebook.size() <= errors.size());
      const auto words = result.codebook.words();
      for (std::size_t j = 0; j < errors.size(); ++j) {
        const double dist =
            std::fabs(errors[j] -
                      words[static_cast<std::size_t>(result.assignments[j])]);
        CHECK(dist <= epsilon);
      }
    }
  }
}

TEST_CASE("zero threshold on distinct inputs keeps every sample") {
  const auto errors = random_errors(128, 3);  // continuous draws: distinct
  const auto result = quantize_stream(errors, 0.0);
  CHECK(result.codebook.size() == errors.size());
}

TEST_CASE("determinism") {
  const auto errors = random_errors(256, 4);
  const auto a = quantize_stream(errors, 0.17);
  const auto b = quantize_stream(errors, 0.17);
  CHECK(a.assignments == b.assignments);
  REQUIRE(a.codebook.size() == b.codebook.size());
  for (std::size_t m = 0; m < a.codebook.size(); ++m) {
    CHECK(a.codebook.words()[m] == b.codebook.words()[m]);
    CHECK(a.codebook.counts()[m] == b.codebook.counts()[m]);
  }
}

TEST_CASE("nearest word tie-break and oracle") {
  const Codebook book({0.0, 1.0, 2.5}, {1, 1, 1}, 0.0);
  SUBCASE("exact hit") {
    const auto [index, dist] = nearest_word(1.0, book);
    CHECK(index == 1);
    CHECK(dist == 0.0);
  }
  SUBCASE("midpoint goes to the lower index") {
    const auto [index, dist] = nearest_word(0.5, book);
    CHECK(index == 0);
    CHECK(dist == 0.5);
  }
  SUBCASE("random queries agree with an exhaustive scan") {
    Philox4x64 rng(23, 0);
    std::vector<double> words(10);
    for (auto& w : words) w = rng.uniform(-5.0, 5.0);
    const Codebook wide(words, std::vector<std::int64_t>(10, 1), 0.0);
    for (int i = 0; i < 200; ++i) {
      const double x = rng.uniform(-6.0, 6.0);
      const auto [index, dist] = nearest_word(x, wide);
      for (std::size_t m = 0; m < words.size(); ++m) {
        CHECK(dist <= std::fabs(x - words[m]));
      }
      CHECK(dist == std::fabs(x - words[index]));
    }
  }
}

TEST_CASE("codebook validation") {
  CHECK_THROWS_AS(Codebook({}, {}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(Codebook({1.0, 1.0}, {1, 1}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(Codebook({1.0}, {0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(Codebook({1.0}, {1}, -0.5), std::invalid_argument);
  CHECK_THROWS_AS(Codebook({1.0}, {1, 2}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(quantize_stream(ErrorVector({1.0}), -1.0),
                  std::invalid_argument);
}

TEST_CASE("error vector validation") {
  CHECK_THROWS_AS(ErrorVector({}), std::invalid_argument);
  CHECK_THROWS_AS(ErrorVector({1.0, std::nan("")}), std::invalid_argument);
  CHECK_THROWS_AS(ErrorVector({std::numeric_limits<double>::infinity()}),
                  std::invalid_argument);
}
