#pragma once
// SMILES handling for the supported subset: organic-subset atoms, bracket
// atoms with charge and H count, branches, ring closures 0-9, bond orders
// -, =, #, and aromatic atoms/bonds as labels. No stereo, no isotopes.

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace glmr::smiles {

struct SmilesError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnknownCharacter : SmilesError {
  std::size_t position;
  UnknownCharacter(std::size_t pos, const std::string& what)
      : SmilesError(what), position(pos) {}
};
struct UnclosedRing : SmilesError {
  using SmilesError::SmilesError;
};
struct UnclosedBranch : SmilesError {
  using SmilesError::SmilesError;
};
struct ValenceOverflow : SmilesError {
  std::size_t atom_index;
  ValenceOverflow(std::size_t idx, const std::string& what)
      : SmilesError(what), atom_index(idx) {}
};

enum class BondOrder : std::uint8_t { Single, Double, Triple, Aromatic };

struct Atom {
  std::string element;      // one of B,C,N,O,P,S,F,Cl,Br,I,H
  int formal_charge = 0;    // |charge| <= 3
  int h_count = 0;          // implicit fill or explicit bracket count
  bool aromatic = false;
  bool explicit_h = false;  // true when the H count came from a bracket
};

struct Bond {
  std::size_t a, b;  // atom indices, a != b
  BondOrder order = BondOrder::Single;
};

struct MolGraph {
  std::vector<Atom> atoms;
  std::vector<Bond> bonds;

  std::vector<std::vector<std::size_t>> adjacency() const;  // bond indices per atom
};

// ---- tokenization ----

enum class TokenKind : std::uint8_t {
  Atom,         // C, Cl, c, ...
  BracketAtom,  // whole [ ... ] chunk
  Bond,         // - = # :
  RingDigit,    // 0-9
  OpenParen,
  CloseParen,
  Special,      // BOS/EOS/PAD/CLS, never produced by tokenize()
};

struct Token {
  TokenKind kind;
  std::string text;  // surface form
};

// Special vocabulary ids are fixed; surface tokens follow.
struct Vocabulary {
  static constexpr int kPad = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;
  static constexpr int kCls = 3;

  std::vector<std::string> id_to_token;        // index = id
  std::map<std::string, int> token_to_id;

  static Vocabulary standard();                // fixed grammar vocabulary
  int id(const std::string& token) const;      // throws on unknown
  std::size_t size() const { return id_to_token.size(); }
};

std::vector<Token> tokenize(const std::string& smiles);
std::string detokenize(const std::vector<Token>& tokens);

// Encode surface tokens to ids (no BOS/EOS added here).
std::vector<int> encode_tokens(const std::vector<Token>& tokens, const Vocabulary& vocab);
std::vector<int> encode_string(const std::string& smiles, const Vocabulary& vocab);
// Ids (skipping specials) back to text.
std::string decode_ids(const std::vector<int>& ids, const Vocabulary& vocab);

// ---- parsing & canonical form ----

MolGraph parse(const std::string& smiles);
std::string canonicalize(const MolGraph& g);
inline std::string canonical_smiles(const std::string& s) { return canonicalize(parse(s)); }

// Explicit atoms plus implicit hydrogens, keyed by element symbol.
std::map<std::string, int> molecular_formula(const MolGraph& g);
std::string formula_string(const std::map<std::string, int>& formula);  // Hill order

double monoisotopic_mass(const MolGraph& g);
double element_mass(const std::string& element);  // most abundant isotope

// ---- fingerprints ----

struct Fingerprint {
  std::vector<std::uint64_t> bits;  // packed, width/64 words
  std::size_t width = 0;

  void set(std::size_t i) { bits[i / 64] |= (1ull << (i % 64)); }
  bool test(std::size_t i) const { return bits[i / 64] >> (i % 64) & 1; }
  std::size_t popcount() const;
  std::string to_hex() const;
};

Fingerprint morgan_fingerprint(const MolGraph& g, int radius = 2, std::size_t bits = 2048);

}  // namespace glmr::smiles
