#include "doctest.h"

#include "glmr/mces.hpp"
#include "glmr/tensor.hpp"
#include "glmr/smiles.hpp"

using namespace glmr;
using namespace glmr::mces;

namespace {

smiles::MolGraph g(const std::string& s) { return smiles::parse(s); }

// Random tree-shaped molecule over C/N/O with occasional double bonds,
// capped at `max_atoms` heavy atoms. Mirrors chemically valid structures only.
std::string random_tree_smiles(Rng& rng, int max_atoms) {
  int n = 2 + static_cast<int>(rng.integer(static_cast<std::uint64_t>(max_atoms - 1)));
  const char* elems = "CCNO";
  std::string out;
  // simple chain with occasional branch and occasional double bond between carbons
  for (int i = 0; i < n; ++i) {
    char e = elems[rng.integer(4)];
    if (i > 0 && e == 'C' && out.back() == 'C' && rng.integer(5) == 0) out += '=';
    out += e;
  }
  return out;
}

}  // namespace

TEST_CASE("edge compatibility rules") {
  smiles::MolGraph ethane = g("CC");
  smiles::MolGraph ethene = g("C=C");
  smiles::MolGraph ethanol = g("CCO");
  smiles::MolGraph benzene = g("c1ccccc1");

  CHECK(edges_compatible(ethane, ethane.bonds[0], ethane, ethane.bonds[0]));
  // bond order must match
  CHECK(!edges_compatible(ethane, ethane.bonds[0], ethene, ethene.bonds[0]));
  // endpoint element labels must match (C-C vs C-O)
  CHECK(!edges_compatible(ethane, ethane.bonds[0], ethanol, ethanol.bonds[1]));
  // aromatic carbons are distinct from aliphatic carbons
  CHECK(!edges_compatible(ethane, ethane.bonds[0], benzene, benzene.bonds[0]));
  // charge is ignored: C-[O-] matches C-O
  smiles::MolGraph anion = g("C[O-]");
  CHECK(edges_compatible(ethanol, ethanol.bonds[1], anion, anion.bonds[0]));
}

TEST_CASE("small closed-form distances") {
  // identity: triangle vs triangle
  MCESResult r = mces_exact(g("C1CC1"), g("C1CC1"));
  CHECK(r.common_edge_count == 3);
  CHECK(r.distance == 0);
  CHECK(r.optimal);
  CHECK(r.upper_bound == 3);
  CHECK(r.mapping.size() == 3);

  // path of 3 carbons vs triangle:2 common edges, d = 2 + 3 - 4 = 1
  r = mces_exact(g("CCC"), g("C1CC1"));
  CHECK(r.common_edge_count == 2);
  CHECK(r.distance == 1);

  // disjoint element sets: nothing in common
  r = mces_exact(g("CC"), g("OO"));
  CHECK(r.common_edge_count == 0);
  CHECK(r.distance == 2);
  CHECK(r.mapping.empty());

  // ethanol vs propanol: share C-C and C-O, d = 2 + 3 - 4 = 1
  r = mces_exact(g("CCO"), g("CCCO"));
  CHECK(r.common_edge_count == 2);
  CHECK(r.distance == 1);

  // single atoms have no edges
  r = mces_exact(g("C"), g("O"));
  CHECK(r.common_edge_count == 0);
  CHECK(r.distance == 0);
}

TEST_CASE("hydrogens never contribute edges") {
  // explicit-H bracket atoms still map to the same heavy skeleton
  MCESResult a = mces_exact(g("C"), g("[CH4]"));
  CHECK(a.distance == 0);
  MCESResult b = mces_exact(g("CO"), g("[CH3][OH]"));
  CHECK(b.common_edge_count == 1);
  CHECK(b.distance == 0);
}

TEST_CASE("branch-and-bound agrees with brute force on random pairs") {
  Rng rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    smiles::MolGraph g1 = g(random_tree_smiles(rng, 6));
    smiles::MolGraph g2 = g(random_tree_smiles(rng, 6));
    MCESResult brute = mces_bruteforce(g1, g2);
    MCESResult fast = mces_exact(g1, g2);
    CHECK(fast.optimal);
    CHECK(fast.common_edge_count == brute.common_edge_count);
    CHECK(fast.distance == brute.distance);
    // symmetry of the distance
    MCESResult rev = mces_exact(g2, g1);
    CHECK(rev.distance == fast.distance);
    CHECK(rev.common_edge_count == fast.common_edge_count);
    // sanity: reported mapping edges are pairwise compatible
    for (const EdgePair& ep : fast.mapping)
      CHECK(edges_compatible(g1, g1.bonds[ep.edge1], g2, g2.bonds[ep.edge2]));
  }
}

TEST_CASE("metric behaviour on a small molecule set") {
  std::vector<std::string> mols = {"CCO", "CCC", "CCN", "C=CC", "CC(C)O", "c1ccccc1"};
  for (const auto& a : mols) {
    CHECK(mces_exact(g(a), g(a)).distance == 0);  // identity
    for (const auto& b : mols) {
      MCESResult ab = mces_exact(g(a), g(b));
      CHECK(ab.distance >= 0);
      CHECK(ab.distance == mces_exact(g(b), g(a)).distance);  // symmetry
    }
  }
  // triangle inequality over all ordered triples
  for (const auto& a : mols)
    for (const auto& b : mols)
      for (const auto& c : mols) {
        int ab = mces_exact(g(a), g(b)).distance;
        int bc = mces_exact(g(b), g(c)).distance;
        int ac = mces_exact(g(a), g(c)).distance;
        CHECK(ac <= ab + bc);
      }
}

TEST_CASE("budget exhaustion degrades gracefully") {
  smiles::MolGraph big1 = g("CC(C)CC(N)C(=O)OCCOC(=O)CCN");
  smiles::MolGraph big2 = g("CCC(C)C(N)C(=O)OCCNC(=O)CCO");
  MCESResult r = mces_exact(big1, big2, 50);  // tiny budget
  CHECK(!r.optimal);
  CHECK(r.upper_bound >= r.common_edge_count);
  CHECK(r.common_edge_count >= 0);
  CHECK(r.nodes_expanded > 0);

  MCESResult full = mces_exact(big1, big2);
  if (full.optimal) {
    CHECK(full.common_edge_count >= r.common_edge_count);
    CHECK(full.common_edge_count <= r.upper_bound);
  }
}
