#pragma once
// Deterministic synthetic molecule/spectrum corpus for end-to-end runs:
// random acyclic molecules over C/N/O/S with valence-safe bonds, paired with
// pseudo-fragmentation spectra.

#include <string>
#include <vector>

#include "glmr/spectra.hpp"
#include "glmr/tensor.hpp"

namespace glmr::synth {

// One random tree-shaped molecule; returns its canonical SMILES.
std::string random_molecule(Rng& rng, std::size_t min_atoms = 3,
                            std::size_t max_atoms = 8);

// n distinct canonical SMILES, deterministic in the rng state.
std::vector<std::string> unique_molecules(std::size_t n, Rng& rng,
                                          std::size_t min_atoms = 3,
                                          std::size_t max_atoms = 8);

struct SynthPair {
  spectra::MoleculeRecord record;
  spectra::Spectrum spectrum;
};

// Records + fragmentation spectra for n distinct molecules.
std::vector<SynthPair> make_dataset(std::size_t n, std::uint64_t seed,
                                    std::size_t min_atoms = 3,
                                    std::size_t max_atoms = 8);

}  // namespace glmr::synth
