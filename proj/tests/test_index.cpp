#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "glmr/index.hpp"

using namespace glmr;
using namespace glmr::index;

namespace {

// Library with fabricated records/embeddings, bypassing the encoder.
RetrievalLibrary stub_library(const std::vector<std::string>& smiles_list,
                              const std::vector<std::vector<double>>& embeddings) {
  RetrievalLibrary lib;
  for (const auto& s : smiles_list) lib.records.push_back(spectra::make_record(s));
  lib.embeddings = embeddings;
  lib.d = embeddings.empty() ? 0 : embeddings[0].size();
  lib.build_indexes();
  return lib;
}

}  // namespace

TEST_CASE("cosine examples") {
  CHECK(cosine({1, 0}, {1, 0}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cosine({1, 0}, {0, 1}) == doctest::Approx(0.0));
  CHECK(cosine({1, 0}, {-1, 0}) == doctest::Approx(-1.0).epsilon(1e-12));
  // oracle: (1*2 + 2*3 + 3*4) / (sqrt(14) * sqrt(29))
  CHECK(cosine({1, 2, 3}, {2, 3, 4}) ==
        doctest::Approx(20.0 / (std::sqrt(14.0) * std::sqrt(29.0))).epsilon(1e-12));
  CHECK(cosine({5, 0}, {0.1, 0}) == doctest::Approx(1.0).epsilon(1e-12));  // scale invariant
  CHECK_THROWS_AS(cosine({0, 0}, {1, 0}), ZeroVector);
  CHECK_THROWS_AS(cosine({1, 0}, {0, 0}), ZeroVector);
  CHECK_THROWS_AS(cosine({1, 0}, {1, 0, 0}), IndexError);
}

TEST_CASE("weight filter matches a linear scan") {
  Rng rng(42);
  RetrievalLibrary lib;
  for (int i = 0; i < 1000; ++i) {
    spectra::MoleculeRecord r;
    r.canonical_smiles = "stub" + std::to_string(i);
    r.parent_mass = rng.uniform(50.0, 500.0);
    lib.records.push_back(r);
  }
  lib.build_indexes();
  for (int trial = 0; trial < 50; ++trial) {
    double q = rng.uniform(40.0, 510.0);
    double tol = rng.uniform(0.01, 5.0);
    std::vector<std::size_t> expected;
    for (std::size_t i = 0; i < lib.records.size(); ++i)
      if (lib.records[i].parent_mass >= q - tol && lib.records[i].parent_mass <= q + tol)
        expected.push_back(i);
    CHECK(filter_by_weight(lib, q, tol) == expected);
  }
  CHECK(filter_by_weight(lib, 10000.0, 0.5).empty());
}

TEST_CASE("formula filter groups isomers") {
  RetrievalLibrary lib = stub_library({"CCO", "COC", "CCC", "O"},
                                      {{1, 0}, {0, 1}, {1, 1}, {2, 1}});
  // ethanol and dimethyl ether share C2H6O
  auto ids = filter_by_formula(lib, smiles::molecular_formula(smiles::parse("CCO")));
  std::sort(ids.begin(), ids.end());
  CHECK(ids == std::vector<std::size_t>{0, 1});
  CHECK(filter_by_formula(lib, smiles::molecular_formula(smiles::parse("N"))).empty());
}

TEST_CASE("pre_retrieve matches a full-sort oracle") {
  Rng rng(7);
  std::size_t n = 500, d = 8;
  RetrievalLibrary lib;
  for (std::size_t i = 0; i < n; ++i) {
    spectra::MoleculeRecord r;
    char buf[16];
    std::snprintf(buf, sizeof buf, "id%04zu", i);
    r.canonical_smiles = buf;
    lib.records.push_back(r);
    std::vector<double> e(d);
    for (double& x : e) x = rng.normal(0.0, 1.0);
    lib.embeddings.push_back(e);
  }
  lib.d = d;
  lib.build_indexes();
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;

  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> q(d);
    for (double& x : q) x = rng.normal(0.0, 1.0);
    RankedList top = pre_retrieve(q, lib, all, 40);
    REQUIRE(top.size() == 40);
    // oracle: score every candidate, full sort, take 40
    std::vector<std::pair<double, std::size_t>> scored;
    for (std::size_t i = 0; i < n; ++i) scored.push_back({-cosine(q, lib.embeddings[i]), i});
    std::sort(scored.begin(), scored.end());
    for (std::size_t r = 0; r < 40; ++r) {
      CHECK(top[r].record_id == scored[r].second);
      CHECK(top[r].score == doctest::Approx(-scored[r].first).epsilon(1e-12));
      if (r > 0) CHECK(top[r].score <= top[r - 1].score);
    }
  }
  // k larger than the pool returns everything
  CHECK(pre_retrieve(std::vector<double>(d, 1.0), lib, {3, 5}, 40).size() == 2);
  CHECK_THROWS_AS(pre_retrieve(std::vector<double>(d, 1.0), lib, {}, 40), EmptyCandidateSet);
}

TEST_CASE("equal scores break ties by canonical smiles") {
  RetrievalLibrary lib = stub_library({"CCC", "CCO", "CC"},
                                      {{1, 0}, {2, 0}, {0.5, 0}});  // all cosine 1 vs (1,0)
  RankedList r = rank_by_cosine({1, 0}, lib, {0, 1, 2});
  REQUIRE(r.size() == 3);
  std::vector<std::string> got, expected;
  for (const auto& e : r) got.push_back(lib.records[e.record_id].canonical_smiles);
  expected = got;
  std::sort(expected.begin(), expected.end());
  CHECK(got == expected);  // scores tie, order is lexicographic
  for (const auto& e : r) CHECK(e.score == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("library save/load round-trip preserves checksum and embeddings") {
  RetrievalLibrary lib = stub_library({"CCO", "CCC"}, {{0.1, -0.2, 0.3}, {1.5, 2.5, -3.5}});
  lib.gamma_checksum = 0xDEADBEEFCAFEF00DULL;
  auto dir = std::filesystem::temp_directory_path() / "glmr_index_test";
  std::filesystem::create_directories(dir);
  std::string prefix = (dir / "library").string();
  save_library(prefix, lib);
  RetrievalLibrary got = load_library(prefix);

  CHECK(got.gamma_checksum == lib.gamma_checksum);
  CHECK(got.d == 3);
  REQUIRE(got.records.size() == 2);
  CHECK(got.records[0].canonical_smiles == lib.records[0].canonical_smiles);
  CHECK(got.records[1].parent_mass == doctest::Approx(lib.records[1].parent_mass));
  REQUIRE(got.embeddings.size() == 2);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(got.embeddings[i][j] == lib.embeddings[i][j]);  // bitwise via raw blob
  CHECK(!got.mass_index.empty());
  std::filesystem::remove_all(dir);

  CHECK_THROWS_AS(load_library(prefix), IndexError);
}
