#include "doctest.h"

#include <algorithm>
#include <set>

#include "glmr/smiles.hpp"
#include "glmr/tensor.hpp"

using namespace glmr;
using namespace glmr::smiles;

namespace {

// grammatical corpus used for round-trip and canonicalization properties
const std::vector<std::string> kCorpus = {
    "C", "O", "N", "S", "P", "B", "F", "Cl", "Br", "I",
    "CC", "CCO", "OCC", "CCC", "C=C", "C#N", "C=O", "CO", "CN", "CS",
    "CC(C)C", "CC(=O)N", "CC(=O)O", "C(=O)O", "CC(C)(C)C", "CCN(CC)CC",
    "C1CC1", "C1CCC1", "C1CCCC1", "C1CCCCC1", "C1CC1C", "CC1CC1",
    "c1ccccc1", "c1ccncc1", "c1ccoc1", "c1ccsc1", "c1cc[nH]c1",
    "Cc1ccccc1", "Oc1ccccc1", "Nc1ccccc1", "c1ccc(Cl)cc1", "c1ccc(Br)cc1",
    "[CH4]", "[NH4+]", "[OH-]", "[O-]C", "[N+](C)(C)C", "C[N+](C)(C)C",
    "[nH]1cccc1",
    "ClCCl", "BrCBr", "FC(F)F", "ICI",
    "OC(=O)c1ccccc1", "CC(=O)Oc1ccccc1C(=O)O",
    "CSC", "CS(=O)C", "CP(C)C", "OP(=O)(O)O", "OS(=O)(=O)O",
    "C=CC=C", "C#CC#C", "CC=CC", "C=C(C)C",
    "COC", "COCC", "CCOC(=O)C", "NCCO", "OCCO", "OCC(O)CO",
    "C.C", "CCO.CC", "[NH4+].[OH-]",
    "C1CC2CCC1CC2", "C1CC12CC2", "B(O)(O)O",
};

std::string permute_and_canonicalize(const MolGraph& g, Rng& rng) {
  std::vector<std::size_t> perm(g.atoms.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  for (std::size_t i = perm.size(); i > 1; --i)
    std::swap(perm[i - 1], perm[rng.integer(i)]);
  MolGraph h;
  std::vector<std::size_t> inv(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = i;
  h.atoms.resize(g.atoms.size());
  for (std::size_t i = 0; i < g.atoms.size(); ++i) h.atoms[inv[i]] = g.atoms[i];
  for (const Bond& b : g.bonds) h.bonds.push_back({inv[b.a], inv[b.b], b.order});
  return canonicalize(h);
}

}  // namespace

TEST_CASE("tokenize examples") {
  auto t1 = tokenize("CCO");
  REQUIRE(t1.size() == 3);
  CHECK(t1[0].text == "C");
  CHECK(t1[2].text == "O");

  auto t2 = tokenize("CCl");
  REQUIRE(t2.size() == 2);
  CHECK(t2[1].text == "Cl");

  auto t3 = tokenize("C(=O)O");
  REQUIRE(t3.size() == 6);
  CHECK(t3[1].text == "(");
  CHECK(t3[2].text == "=");
  CHECK(t3[4].text == ")");

  CHECK_THROWS_AS(tokenize("C@C"), UnknownCharacter);
  try {
    tokenize("CC$");
  } catch (const UnknownCharacter& e) {
    CHECK(e.position == 2);
  }
}

TEST_CASE("tokenize/detokenize round-trip on the corpus") {
  for (const std::string& s : kCorpus) {
    CAPTURE(s);
    CHECK(detokenize(tokenize(s)) == s);
  }
}

TEST_CASE("parse examples") {
  MolGraph tri = parse("C1CC1");
  CHECK(tri.atoms.size() == 3);
  CHECK(tri.bonds.size() == 3);
  for (const Bond& b : tri.bonds) CHECK(b.order == BondOrder::Single);

  MolGraph o = parse("O");
  CHECK(o.atoms.size() == 1);
  CHECK(o.bonds.empty());
  CHECK(o.atoms[0].h_count == 2);

  MolGraph amide = parse("CC(=O)N");
  CHECK(amide.atoms.size() == 4);
  REQUIRE(amide.bonds.size() == 3);
  int doubles = 0;
  for (const Bond& b : amide.bonds) doubles += b.order == BondOrder::Double;
  CHECK(doubles == 1);
}

TEST_CASE("parse rejects malformed strings") {
  const std::vector<std::string> negatives = {
      "",          "C1CC",     "C(C",      "CC)",      "C@",       "C/C",
      "[C",        "[]",       "C%12C",    "Cx",       "c1ccc1q",  "[C+4]",
      "[C-4]",     "[CH7]",    "CC(",      "1CC1",     "C=",       "C#",
      "C==C",      "[Zn]",     "C((C))C",  "C..C",     "C(=)O",    "C$$C",
  };
  CHECK(negatives.size() >= 20);
  for (const std::string& s : negatives) {
    CAPTURE(s);
    CHECK_THROWS_AS(parse(s), SmilesError);
  }
}

TEST_CASE("valence overflow detection") {
  CHECK_THROWS_AS(parse("C(C)(C)(C)(C)C"), ValenceOverflow);  // 5-bond carbon
  CHECK_THROWS_AS(parse("O(C)(C)C"), ValenceOverflow);        // 3-bond oxygen
  CHECK_THROWS_AS(parse("F(C)C"), ValenceOverflow);           // divalent fluorine
  CHECK_NOTHROW(parse("[N+](C)(C)(C)C"));                     // charged N gets 4
  CHECK_NOTHROW(parse("S(=O)(=O)(O)O"));                      // hypervalent S
}

TEST_CASE("canonicalization identity, idempotence, permutation invariance") {
  CHECK(canonical_smiles("OCC") == canonical_smiles("CCO"));
  CHECK(canonical_smiles("C") == "C");

  Rng rng(31337);
  for (const std::string& s : kCorpus) {
    CAPTURE(s);
    MolGraph g = parse(s);
    std::string canon = canonicalize(g);
    CHECK(canonical_smiles(canon) == canon);  // idempotent
    for (int trial = 0; trial < 5; ++trial)
      CHECK(permute_and_canonicalize(g, rng) == canon);
  }

  // 100 permutations of one 10-atom graph -> one canonical string
  MolGraph g = parse("CC(C)C(=O)NCC1CC1");
  std::set<std::string> seen;
  for (int trial = 0; trial < 100; ++trial) seen.insert(permute_and_canonicalize(g, rng));
  CHECK(seen.size() == 1);
}

TEST_CASE("formula and mass") {
  auto methane = molecular_formula(parse("C"));
  CHECK(methane.at("C") == 1);
  CHECK(methane.at("H") == 4);

  auto water = molecular_formula(parse("O"));
  CHECK(water.at("O") == 1);
  CHECK(water.at("H") == 2);

  auto bracket = molecular_formula(parse("[CH4]"));
  CHECK(bracket.at("H") == 4);

  CHECK(monoisotopic_mass(parse("O")) == doctest::Approx(18.010565).epsilon(1e-9));
  CHECK(monoisotopic_mass(parse("C")) == doctest::Approx(16.031300).epsilon(1e-9));
  CHECK(monoisotopic_mass(MolGraph{}) == doctest::Approx(0.0));

  CHECK(formula_string(molecular_formula(parse("CCO"))) == "C2H6O");
  CHECK(formula_string(molecular_formula(parse("OS(=O)(=O)O"))) == "H2O4S");
}

TEST_CASE("fingerprints") {
  Rng rng(9);
  MolGraph g = parse("CC(=O)Oc1ccccc1C(=O)O");
  auto fp = morgan_fingerprint(g);
  CHECK(fp.width == 2048);
  CHECK(fp.popcount() > 0);

  // permutation invariance
  for (int trial = 0; trial < 10; ++trial) {
    std::string permuted = permute_and_canonicalize(g, rng);
    auto fp2 = morgan_fingerprint(parse(permuted));
    CHECK(fp2.to_hex() == fp.to_hex());
  }

  // radius 0 depends only on the atom multiset
  auto a = morgan_fingerprint(parse("CO"), 0);
  auto b = morgan_fingerprint(parse("OC"), 0);
  CHECK(a.to_hex() == b.to_hex());
}

TEST_CASE("vocabulary encode/decode") {
  Vocabulary v = Vocabulary::standard();
  CHECK(v.size() > 4);
  for (const std::string& s : kCorpus) {
    CAPTURE(s);
    std::vector<int> ids = encode_string(s, v);
    for (int id : ids) CHECK(id < static_cast<int>(v.size()));
    CHECK(decode_ids(ids, v) == s);
  }
  std::vector<int> with_specials = {Vocabulary::kBos, v.id("C"), v.id("C"),
                                    v.id("O"), Vocabulary::kEos};
  CHECK(decode_ids(with_specials, v) == "CCO");
}
