#pragma once
// Exact maximum-common-edge-subgraph distance between molecular graphs.
// d = |E1| + |E2| - 2 * |MCES|. Hydrogens are implicit and excluded.

#include <cstdint>
#include <string>
#include <vector>

#include "glmr/smiles.hpp"

namespace glmr::mces {

struct McesError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TooLarge : McesError {
  using McesError::McesError;
};

struct EdgePair {
  std::size_t edge1, edge2;  // bond indices into g1 / g2
};

struct MCESResult {
  int common_edge_count = 0;
  int distance = 0;
  std::vector<EdgePair> mapping;
  bool optimal = true;
  int upper_bound = 0;  // admissible bound on common edges; equals the count when optimal
  std::uint64_t nodes_expanded = 0;
};

// Unordered endpoint labels (element, aromatic) plus bond order must agree
// for two edges to be mapped onto each other. Formal charge is ignored.
bool edges_compatible(const smiles::MolGraph& g1, const smiles::Bond& b1,
                      const smiles::MolGraph& g2, const smiles::Bond& b2);

// Exhaustive search over consistent edge mappings; requires
// min(|E1|,|E2|) <= 8.
MCESResult mces_bruteforce(const smiles::MolGraph& g1, const smiles::MolGraph& g2);

// Depth-first branch-and-bound over node assignments with a per-label
// matching upper bound. Optimal when the search finishes within the budget;
// otherwise best-found with optimal=false.
MCESResult mces_exact(const smiles::MolGraph& g1, const smiles::MolGraph& g2,
                      std::uint64_t node_budget = 1000000);

}  // namespace glmr::mces
