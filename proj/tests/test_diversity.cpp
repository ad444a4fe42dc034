#include <cmath>
#include <unordered_map>
#include <vector>

#include "doctest.h"
#include "exrec/diversity.hpp"
#include "exrec/embedding.hpp"
#include "exrec/errors.hpp"
#include "exrec/text.hpp"
#include "property_checks.hpp"
#include "test_support.hpp"

using exrec::cosine;
using exrec::dedupe;
using exrec::distinct_2;
using exrec::embed_tokens;
using exrec::EmbeddingTable;
using exrec::Errc;
using exrec::fnv1a64;
using testsup::thrown_code;

namespace {

exrec::CandidateList make_list(std::vector<uint32_t> ids) {
  exrec::CandidateList list;
  uint64_t score = ids.size();
  for (uint32_t id : ids) list.entries.push_back({id, score--});
  return list;
}

}  // namespace

TEST_CASE("embed_tokens: one token gives its indicator vector") {
  std::vector<std::string> tokens{"solve"};
  auto vector = embed_tokens(tokens, 16);
  const size_t index = fnv1a64("solve") % 16;
  for (size_t i = 0; i < vector.size(); ++i) {
    CHECK(vector[i] == doctest::Approx(i == index ? 1.0 : 0.0));
  }
}

TEST_CASE("embed_tokens: colliding tokens collapse to one direction") {
  // t5 and t10 hash to the same slot mod 16.
  REQUIRE(fnv1a64("t5") % 16 == fnv1a64("t10") % 16);
  std::vector<std::string> pair{"t5", "t10"};
  std::vector<std::string> single{"t5"};
  CHECK(embed_tokens(pair, 16) == embed_tokens(single, 16));
}

TEST_CASE("embed_tokens: two distinct slots weigh 1/sqrt(2) each") {
  REQUIRE(fnv1a64("x0") % 16 != fnv1a64("y1") % 16);
  std::vector<std::string> tokens{"x0", "y1"};
  auto vector = embed_tokens(tokens, 16);
  const double expected = 1.0 / std::sqrt(2.0);
  CHECK(vector[fnv1a64("x0") % 16] == doctest::Approx(expected).epsilon(1e-12));
  CHECK(vector[fnv1a64("y1") % 16] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("embed_tokens rejects an empty token list") {
  CHECK(thrown_code([] { embed_tokens({}, 16); }) == Errc::empty_token_list);
}

TEST_CASE("cosine basics") {
  std::vector<double> e1{1.0, 0.0};
  std::vector<double> e2{0.0, 1.0};
  std::vector<double> diag{1.0, 1.0};
  CHECK(cosine(e1, e1) == doctest::Approx(1.0));
  CHECK(cosine(e1, e2) == doctest::Approx(0.0));
  CHECK(std::abs(cosine(diag, e1) - 0.70710678) < 1e-8);
  CHECK(cosine(diag, e1) == cosine(e1, diag));

  std::vector<double> scaled{3.0, 3.0};
  CHECK(cosine(diag, scaled) == doctest::Approx(1.0));

  std::vector<double> three{1.0, 0.0, 0.0};
  CHECK(thrown_code([&] { cosine(e1, three); }) == Errc::dimension_mismatch);
  std::vector<double> zero{0.0, 0.0};
  CHECK(thrown_code([&] { cosine(e1, zero); }) == Errc::zero_vector);
}

TEST_CASE("dedupe drops the lower-ranked member of a near-duplicate pair") {
  std::unordered_map<uint32_t, std::vector<double>> rows;
  rows[0] = {1.0, 0.0};
  rows[1] = {1.0, 0.0};
  rows[2] = {0.0, 1.0};
  auto table = EmbeddingTable::from_rows(2, std::move(rows));
  auto input = make_list({0, 1, 2});

  auto result = dedupe(input, table, 0.9);
  REQUIRE(result.list.entries.size() == 2);
  CHECK(result.list.entries[0].exercise == 0);
  CHECK(result.list.entries[1].exercise == 2);
  CHECK(result.list.stage == exrec::Stage::AfterDp);
  CHECK(result.missing_embeddings == 0);

  // strict comparison: tau = 1.0 keeps exact duplicates
  auto identity = dedupe(input, table, 1.0);
  CHECK(identity.list.entries == input.entries);
}

TEST_CASE("dedupe retains candidates without embeddings, with a tally") {
  std::unordered_map<uint32_t, std::vector<double>> rows;
  rows[0] = {1.0, 0.0};
  rows[2] = {1.0, 0.0};
  auto table = EmbeddingTable::from_rows(2, std::move(rows));
  auto input = make_list({0, 1, 2});

  auto result = dedupe(input, table, 0.9);
  REQUIRE(result.list.entries.size() == 2);
  CHECK(result.list.entries[0].exercise == 0);
  CHECK(result.list.entries[1].exercise == 1);  // kept, no embedding
  CHECK(result.missing_embeddings == 1);
}

TEST_CASE("dedupe treats zero vectors as missing") {
  std::unordered_map<uint32_t, std::vector<double>> rows;
  rows[0] = {1.0, 0.0};
  rows[1] = {0.0, 0.0};
  auto table = EmbeddingTable::from_rows(2, std::move(rows));
  CHECK(table.zero_rows() == 1);
  auto result = dedupe(make_list({0, 1}), table, 0.5);
  CHECK(result.list.entries.size() == 2);
  CHECK(result.missing_embeddings == 1);
}

TEST_CASE("distinct_2 counts distinct bigrams over occurrences") {
  std::vector<std::vector<std::string>> texts{{"a", "b", "c"}, {"a", "b"}};
  CHECK(std::abs(distinct_2(texts) - 2.0 / 3.0) < 1e-9);

  std::vector<std::vector<std::string>> single{{"x", "y"}};
  CHECK(distinct_2(single) == doctest::Approx(1.0));

  std::vector<std::vector<std::string>> short_texts{{"a"}, {"b"}};
  CHECK(thrown_code([&] { distinct_2(short_texts); }) == Errc::no_bigrams);
}

TEST_CASE("distinct_2 never spans texts and is permutation invariant") {
  std::vector<std::vector<std::string>> texts{{"a", "b"}, {"b", "a"}};
  CHECK(distinct_2(texts) == doctest::Approx(1.0));  // (a,b) and (b,a) differ

  exrec::Rng rng(55);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<std::string>> corpus;
    const size_t n_texts = 1 + rng.bounded(6);
    for (size_t t = 0; t < n_texts; ++t) {
      std::vector<std::string> tokens;
      const size_t length = 2 + rng.bounded(6);
      for (size_t i = 0; i < length; ++i) {
        tokens.push_back("w" + std::to_string(rng.bounded(5)));
      }
      corpus.push_back(std::move(tokens));
    }
    const double value = distinct_2(corpus);
    CHECK(value > 0.0);
    CHECK(value <= 1.0);
    std::vector<std::vector<std::string>> shuffled = corpus;
    for (size_t i = shuffled.size(); i > 1; --i) {
      std::swap(shuffled[i - 1], shuffled[rng.bounded(i)]);
    }
    CHECK(distinct_2(shuffled) == doctest::Approx(value));
  }
}

TEST_CASE("dedupe filter invariants hold on random embeddings") {
  properties::check_dedupe_properties(/*seed=*/2025, /*cases=*/300);
}
