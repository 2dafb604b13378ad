#include "doctest.h"

#include <cmath>

#include "glmr/eval.hpp"

using namespace glmr;
using namespace glmr::eval;

namespace {

QueryResult q(const std::string& id, std::vector<std::string> ranking, std::string truth) {
  QueryResult r;
  r.identifier = id;
  r.ranking = std::move(ranking);
  r.truth = std::move(truth);
  return r;
}

}  // namespace

TEST_CASE("rank assignment") {
  std::vector<QueryResult> rs = {
      q("a", {"CCO", "CCC"}, "CCO"),
      q("b", {"CCO", "CCC"}, "CCC"),
      q("c", {"CCO", "CCC"}, "CCN"),  // not retrieved
  };
  assign_ranks(rs);
  REQUIRE(rs[0].rank_of_truth.has_value());
  CHECK(*rs[0].rank_of_truth == 1);
  CHECK(*rs[1].rank_of_truth == 2);
  CHECK(!rs[2].rank_of_truth.has_value());
}

TEST_CASE("recall and mrr closed-form values") {
  // ranks {1, 3, 7}: R@5 = 2/3 = 66.67%, R@1 = 1/3, R@20 = 100%
  std::vector<QueryResult> rs(3);
  rs[0].rank_of_truth = 1;
  rs[1].rank_of_truth = 3;
  rs[2].rank_of_truth = 7;
  CHECK(recall_at_k(rs, 1) == doctest::Approx(100.0 / 3.0).epsilon(1e-12));
  CHECK(recall_at_k(rs, 5) == doctest::Approx(200.0 / 3.0).epsilon(1e-12));
  CHECK(recall_at_k(rs, 20) == doctest::Approx(100.0).epsilon(1e-12));

  // ranks {1, 2, 4}: MRR = (1 + 1/2 + 1/4) / 3 = 58.33%
  rs[1].rank_of_truth = 2;
  rs[2].rank_of_truth = 4;
  CHECK(mrr(rs) == doctest::Approx(100.0 * (1.0 + 0.5 + 0.25) / 3.0).epsilon(1e-12));

  // an unretrieved truth contributes zero to both
  rs[2].rank_of_truth.reset();
  CHECK(recall_at_k(rs, 20) == doctest::Approx(200.0 / 3.0).epsilon(1e-12));
  CHECK(mrr(rs) == doctest::Approx(100.0 * 1.5 / 3.0).epsilon(1e-12));

  // monotone in k
  rs[2].rank_of_truth = 7;
  CHECK(recall_at_k(rs, 1) <= recall_at_k(rs, 5));
  CHECK(recall_at_k(rs, 5) <= recall_at_k(rs, 20));

  CHECK(recall_at_k({}, 1) == 0.0);
  CHECK(mrr({}) == 0.0);
}

TEST_CASE("mean top-1 graph distance with parse failures excluded") {
  std::vector<QueryResult> rs = {
      q("a", {"CCO"}, "CCO"),    // identical: distance 0
      q("b", {"CCC"}, "C1CC1"),  // path vs triangle: distance 1
      q("c", {"not_smiles"}, "CCO"),
      q("d", {}, "CCO"),  // empty ranking also counts as unscorable
  };
  McesAt1 m = mces_at_1(rs);
  CHECK(m.scored == 2);
  CHECK(m.parse_failures == 2);
  CHECK(m.mean == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("modality gap is one minus cosine") {
  CHECK(modality_gap({1, 0}, {1, 0}) == doctest::Approx(0.0));
  CHECK(modality_gap({1, 0}, {0, 1}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(modality_gap({1, 0}, {-1, 0}) == doctest::Approx(2.0).epsilon(1e-12));
  // scale invariant
  CHECK(modality_gap({2, 1}, {4, 2}) == doctest::Approx(0.0));
  CHECK(modality_gap({1, 2}, {30, -10}) ==
        doctest::Approx(modality_gap({10, 20}, {3, -1})).epsilon(1e-12));
}

TEST_CASE("tanimoto over bit vectors") {
  CHECK(tanimoto(std::vector<std::uint8_t>{1, 1, 0, 0},
                 std::vector<std::uint8_t>{1, 0, 1, 0}) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(tanimoto(std::vector<std::uint8_t>{1, 1}, std::vector<std::uint8_t>{1, 1}) ==
        doctest::Approx(1.0));
  CHECK(tanimoto(std::vector<std::uint8_t>{0, 0}, std::vector<std::uint8_t>{0, 0}) ==
        doctest::Approx(1.0));  // both empty defined as identical
  CHECK(tanimoto(std::vector<std::uint8_t>{1, 0}, std::vector<std::uint8_t>{0, 1}) ==
        doctest::Approx(0.0));
  CHECK_THROWS_AS(tanimoto(std::vector<std::uint8_t>{1}, std::vector<std::uint8_t>{1, 0}),
                  WidthMismatch);

  // molecule fingerprints: identical molecules score 1
  auto fa = smiles::morgan_fingerprint(smiles::parse("CCO"));
  auto fb = smiles::morgan_fingerprint(smiles::parse("OCC"));
  auto fc = smiles::morgan_fingerprint(smiles::parse("c1ccccc1"));
  CHECK(tanimoto(fa, fb) == doctest::Approx(1.0));
  CHECK(tanimoto(fa, fc) < 1.0);
  CHECK(tanimoto(fa, fc) >= 0.0);
}

TEST_CASE("gap histogram covers [0,2] with 100 bins") {
  Histogram h = gap_histogram({0.0, 0.01, 1.0, 1.999, 2.0, 2.5, -0.1});
  REQUIRE(h.bins.size() == 100);
  std::uint64_t total = 0;
  for (std::uint64_t b : h.bins) total += b;
  CHECK(total == 7);  // out-of-range values clamp into the edge bins
  CHECK(h.bins[0] == 3);   // 0.0, 0.01, and -0.1 (clamped)
  CHECK(h.bins[99] == 3);  // 1.999, 2.0, 2.5 (clamped)
  CHECK(h.bins[50] == 1);  // 1.0 lands at the midpoint bin
  CHECK(h.values.size() == 7);
  CHECK(h.values[5] == 2.5);  // raw values preserved
}

TEST_CASE("evaluate produces a full report and serializations") {
  std::vector<QueryResult> rs = {
      q("a", {"CCO", "CCC"}, "CCO"),
      q("b", {"CCC", "CCO"}, "CCO"),
  };
  EvalReport r = evaluate(rs, true);
  CHECK(r.query_count == 2);
  CHECK(r.recall_at.at(1) == doctest::Approx(50.0));
  CHECK(r.recall_at.at(5) == doctest::Approx(100.0));
  CHECK(r.recall_at.at(20) == doctest::Approx(100.0));
  CHECK(r.mrr == doctest::Approx(75.0));
  CHECK(r.mces_scored == 2);
  // top-1 distances: 0 (exact) and d(CCC, CCO) = 2 + 2 - 2*1 = 2 -> mean 1
  CHECK(r.mces_at_1 == doctest::Approx(1.0));

  std::string json = report_to_json(r);
  CHECK(json.find("\"mrr\"") != std::string::npos);
  CHECK(json.find("\"recall_at\"") != std::string::npos);
  std::string jsonl = queries_to_jsonl(r.queries);
  CHECK(std::count(jsonl.begin(), jsonl.end(), '\n') == 2);
  std::string table = report_to_table(r);
  CHECK(table.find("recall@1") != std::string::npos);
  CHECK(table.find("mrr") != std::string::npos);

  // disabling the graph metric skips it
  EvalReport r2 = evaluate(rs, false);
  CHECK(r2.mces_scored == 0);
}
