#include "glmr/synth.hpp"

#include <set>

namespace glmr::synth {

namespace {

int capacity(char element) {
  switch (element) {
    case 'C': return 4;
    case 'N': return 3;
    case 'O': return 2;
    case 'S': return 2;
  }
  return 0;
}

constexpr const char kElements[] = {'C', 'C', 'C', 'N', 'O', 'S'};  // C-biased

}  // namespace

std::string random_molecule(Rng& rng, std::size_t min_atoms, std::size_t max_atoms) {
  std::size_t n = min_atoms + rng.integer(max_atoms - min_atoms + 1);
  std::vector<char> elem;
  std::vector<int> used;                       // bonded valence per atom
  std::vector<std::vector<std::size_t>> kids;  // tree children
  std::vector<std::vector<int>> kid_order;     // bond order per child
  elem.push_back(kElements[rng.integer(std::size(kElements))]);
  used.push_back(0);
  kids.emplace_back();
  kid_order.emplace_back();

  while (elem.size() < n) {
    char e = kElements[rng.integer(std::size(kElements))];
    // collect attachment points with spare valence
    std::vector<std::size_t> open;
    for (std::size_t i = 0; i < elem.size(); ++i)
      if (used[i] < capacity(elem[i])) open.push_back(i);
    if (open.empty()) break;
    std::size_t parent = open[rng.integer(open.size())];
    int order = 1;
    if (capacity(elem[parent]) - used[parent] >= 2 && capacity(e) >= 2 &&
        rng.integer(5) == 0)
      order = 2;
    used[parent] += order;
    elem.push_back(e);
    used.push_back(order);
    kids.emplace_back();
    kid_order.emplace_back();
    kids[parent].push_back(elem.size() - 1);
    kid_order[parent].push_back(order);
  }

  std::string out;
  // iterative DFS emit; tree structure so no ring digits needed
  struct Frame {
    std::size_t atom;
    std::size_t next_kid = 0;
  };
  std::vector<Frame> stack{{0, 0}};
  out += elem[0];
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next_kid == kids[f.atom].size()) {
      stack.pop_back();
      if (!stack.empty()) out += ')';
      continue;
    }
    std::size_t child = kids[f.atom][f.next_kid];
    int order = kid_order[f.atom][f.next_kid];
    ++f.next_kid;
    out += '(';
    if (order == 2) out += '=';
    out += elem[child];
    stack.push_back({child, 0});
  }
  return smiles::canonical_smiles(out);
}

std::vector<std::string> unique_molecules(std::size_t n, Rng& rng,
                                          std::size_t min_atoms, std::size_t max_atoms) {
  std::set<std::string> seen;
  std::vector<std::string> out;
  while (out.size() < n) {
    std::string s = random_molecule(rng, min_atoms, max_atoms);
    if (seen.insert(s).second) out.push_back(s);
  }
  return out;
}

std::vector<SynthPair> make_dataset(std::size_t n, std::uint64_t seed,
                                    std::size_t min_atoms, std::size_t max_atoms) {
  Rng rng(seed);
  std::vector<SynthPair> out;
  for (const std::string& s : unique_molecules(n, rng, min_atoms, max_atoms)) {
    SynthPair p;
    p.record = spectra::make_record(s);
    p.spectrum = spectra::synth_fragment_spectrum(p.record);
    p.spectrum.metadata.smiles = p.record.canonical_smiles;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace glmr::synth
