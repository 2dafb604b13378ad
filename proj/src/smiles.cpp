#include "glmr/smiles.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace glmr::smiles {

namespace {

const std::array<const char*, 11> kElements = {"B", "C",  "N",  "O", "P", "S",
                                               "F", "Cl", "Br", "I", "H"};
const std::array<const char*, 6> kAromaticElements = {"b", "c", "n", "o", "p", "s"};

bool is_supported_element(const std::string& e) {
  return std::find(kElements.begin(), kElements.end(), e) != kElements.end();
}

std::string upper_element(const std::string& aromatic) {
  std::string e = aromatic;
  e[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(e[0])));
  return e;
}

bool is_aromatic_symbol(char c) {
  return c == 'b' || c == 'c' || c == 'n' || c == 'o' || c == 'p' || c == 's';
}

// Maximum allowed valence (explicit bonds + hydrogens).
int max_valence(const std::string& element, int charge) {
  if (element == "C") return 4;
  if (element == "N") return charge > 0 ? 4 : 3;
  if (element == "O") return 2;
  if (element == "S") return 6;
  if (element == "P") return 5;
  if (element == "B") return 3;
  if (element == "H") return 1;
  return 1;  // halogens
}

// Fill valence for implicit hydrogens; smallest standard valence that covers
// the bond sum for S/P, fixed otherwise. Charge shifts by its sign.
int fill_valence(const std::string& element, int charge, int bond_sum) {
  int base;
  if (element == "C") base = 4;
  else if (element == "N") base = 3;
  else if (element == "O") base = 2;
  else if (element == "B") base = 3;
  else if (element == "H") base = 1;
  else if (element == "S") base = bond_sum <= 2 ? 2 : (bond_sum <= 4 ? 4 : 6);
  else if (element == "P") base = bond_sum <= 3 ? 3 : 5;
  else base = 1;  // halogens
  base += (charge > 0) - (charge < 0);
  return std::max(base, 0);
}

double bond_weight(BondOrder o) {
  switch (o) {
    case BondOrder::Single: return 1.0;
    case BondOrder::Double: return 2.0;
    case BondOrder::Triple: return 3.0;
    case BondOrder::Aromatic: return 1.5;
  }
  return 1.0;
}

int bond_sum_of(const MolGraph& g, std::size_t atom) {
  // Aromatic O/S contribute a lone pair to the ring, not a double bond, so
  // their aromatic bonds count as single for valence purposes (furan,
  // thiophene); for C/N the 1.5-weight ceil charges them one ring pi bond.
  const Atom& a = g.atoms[atom];
  bool lone_pair_donor =
      a.aromatic && (a.element == "O" || a.element == "S" ||
                     (a.element == "N" && a.explicit_h && a.h_count > 0));
  double s = 0.0;
  for (const Bond& b : g.bonds) {
    if (b.a != atom && b.b != atom) continue;
    double w = bond_weight(b.order);
    if (lone_pair_donor && b.order == BondOrder::Aromatic) w = 1.0;
    s += w;
  }
  return static_cast<int>(std::ceil(s - 1e-9));
}

}  // namespace

std::vector<std::vector<std::size_t>> MolGraph::adjacency() const {
  std::vector<std::vector<std::size_t>> adj(atoms.size());
  for (std::size_t i = 0; i < bonds.size(); ++i) {
    adj[bonds[i].a].push_back(i);
    adj[bonds[i].b].push_back(i);
  }
  return adj;
}

// ---- tokenizer ----

std::vector<Token> tokenize(const std::string& smiles) {
  if (smiles.empty()) throw SmilesError("empty SMILES");
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < smiles.size()) {
    char c = smiles[i];
    if (c == '[') {
      std::size_t close = smiles.find(']', i);
      if (close == std::string::npos)
        throw UnknownCharacter(i, "unterminated bracket atom");
      out.push_back({TokenKind::BracketAtom, smiles.substr(i, close - i + 1)});
      i = close + 1;
    } else if (c == 'C' || c == 'B') {
      // Cl and Br are single tokens.
      if (i + 1 < smiles.size() && ((c == 'C' && smiles[i + 1] == 'l') ||
                                    (c == 'B' && smiles[i + 1] == 'r'))) {
        out.push_back({TokenKind::Atom, smiles.substr(i, 2)});
        i += 2;
      } else {
        out.push_back({TokenKind::Atom, std::string(1, c)});
        ++i;
      }
    } else if (c == 'N' || c == 'O' || c == 'P' || c == 'S' || c == 'F' || c == 'I') {
      out.push_back({TokenKind::Atom, std::string(1, c)});
      ++i;
    } else if (is_aromatic_symbol(c)) {
      out.push_back({TokenKind::Atom, std::string(1, c)});
      ++i;
    } else if (c == '-' || c == '=' || c == '#' || c == ':' || c == '.') {
      out.push_back({TokenKind::Bond, std::string(1, c)});
      ++i;
    } else if (c >= '0' && c <= '9') {
      out.push_back({TokenKind::RingDigit, std::string(1, c)});
      ++i;
    } else if (c == '(') {
      out.push_back({TokenKind::OpenParen, "("});
      ++i;
    } else if (c == ')') {
      out.push_back({TokenKind::CloseParen, ")"});
      ++i;
    } else {
      throw UnknownCharacter(i, std::string("unknown character '") + c + "' at position " +
                                    std::to_string(i));
    }
  }
  return out;
}

std::string detokenize(const std::vector<Token>& tokens) {
  std::string s;
  for (const Token& t : tokens)
    if (t.kind != TokenKind::Special) s += t.text;
  return s;
}

Vocabulary Vocabulary::standard() {
  Vocabulary v;
  v.id_to_token = {"<pad>", "<bos>", "<eos>", "<cls>"};
  auto push = [&v](const std::string& t) { v.id_to_token.push_back(t); };
  for (const char* e : kElements) push(e);
  for (const char* e : kAromaticElements) push(e);
  for (const char* b : {"-", "=", "#", ":", "."}) push(b);
  for (char d = '0'; d <= '9'; ++d) push(std::string(1, d));
  push("(");
  push(")");
  // Bracket-atom tokens over a fixed charge/H grid.
  std::vector<std::string> cores;
  for (const char* e : kElements) cores.push_back(e);
  for (const char* e : kAromaticElements) cores.push_back(e);
  for (const std::string& core : cores) {
    for (int h = 0; h <= 4; ++h) {
      for (int q = -2; q <= 2; ++q) {
        std::string t = "[" + core;
        if (h == 1) t += "H";
        else if (h > 1) t += "H" + std::to_string(h);
        if (q == 1) t += "+";
        else if (q == -1) t += "-";
        else if (q > 1) t += "+" + std::to_string(q);
        else if (q < -1) t += "-" + std::to_string(-q);
        t += "]";
        push(t);
      }
    }
  }
  for (std::size_t i = 0; i < v.id_to_token.size(); ++i)
    v.token_to_id[v.id_to_token[i]] = static_cast<int>(i);
  return v;
}

int Vocabulary::id(const std::string& token) const {
  auto it = token_to_id.find(token);
  if (it == token_to_id.end()) throw SmilesError("token not in vocabulary: " + token);
  return it->second;
}

std::vector<int> encode_tokens(const std::vector<Token>& tokens, const Vocabulary& vocab) {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const Token& t : tokens) ids.push_back(vocab.id(t.text));
  return ids;
}

std::vector<int> encode_string(const std::string& smiles, const Vocabulary& vocab) {
  return encode_tokens(tokenize(smiles), vocab);
}

std::string decode_ids(const std::vector<int>& ids, const Vocabulary& vocab) {
  std::string s;
  for (int id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= vocab.size())
      throw SmilesError("id out of vocabulary range");
    if (id == Vocabulary::kPad || id == Vocabulary::kBos || id == Vocabulary::kEos ||
        id == Vocabulary::kCls)
      continue;
    s += vocab.id_to_token[id];
  }
  return s;
}

// ---- parser ----

namespace {

Atom parse_bracket(const std::string& text, std::size_t pos_for_errors) {
  // text = "[...]"
  Atom atom;
  std::size_t i = 1;
  std::size_t end = text.size() - 1;
  if (i >= end) throw UnknownCharacter(pos_for_errors, "empty bracket atom");
  char c = text[i];
  if (is_aromatic_symbol(c)) {
    atom.element = upper_element(std::string(1, c));
    atom.aromatic = true;
    ++i;
  } else if (std::isupper(static_cast<unsigned char>(c))) {
    std::string e(1, c);
    if (i + 1 < end && std::islower(static_cast<unsigned char>(text[i + 1])) &&
        text[i + 1] != 'h') {
      e += text[i + 1];
    }
    if (!is_supported_element(e)) {
      e = std::string(1, c);
      if (!is_supported_element(e))
        throw UnknownCharacter(pos_for_errors, "unsupported element in bracket: " + text);
    }
    atom.element = e;
    i += e.size();
  } else {
    throw UnknownCharacter(pos_for_errors, "bad bracket atom: " + text);
  }
  if (i < end && text[i] == 'H') {
    ++i;
    int h = 1;
    if (i < end && std::isdigit(static_cast<unsigned char>(text[i]))) {
      h = text[i] - '0';
      ++i;
    }
    atom.h_count = h;
  }
  atom.explicit_h = true;  // bracket atoms never receive implicit fill
  if (i < end && (text[i] == '+' || text[i] == '-')) {
    int sign = text[i] == '+' ? 1 : -1;
    ++i;
    int mag = 1;
    if (i < end && std::isdigit(static_cast<unsigned char>(text[i]))) {
      mag = text[i] - '0';
      ++i;
    } else {
      while (i < end && text[i] == (sign > 0 ? '+' : '-')) {
        ++mag;
        ++i;
      }
    }
    atom.formal_charge = sign * mag;
  }
  if (i != end) throw UnknownCharacter(pos_for_errors, "trailing junk in bracket: " + text);
  if (std::abs(atom.formal_charge) > 3)
    throw SmilesError("formal charge out of range in " + text);
  if (atom.h_count > 6) throw SmilesError("H count out of range in " + text);
  return atom;
}

}  // namespace

MolGraph parse(const std::string& smiles) {
  std::vector<Token> tokens = tokenize(smiles);
  MolGraph g;
  std::vector<std::size_t> stack;            // open branch anchors
  std::size_t prev = SIZE_MAX;               // previous atom index
  bool pending_bond = false;
  BondOrder pending_order = BondOrder::Single;
  bool dot_break = false;
  bool branch_open = false;  // '(' not yet followed by an atom
  struct RingOpen {
    std::size_t atom;
    bool has_order;
    BondOrder order;
  };
  std::map<char, RingOpen> open_rings;
  std::set<std::pair<std::size_t, std::size_t>> seen_bonds;

  auto add_bond = [&](std::size_t a, std::size_t b, BondOrder order) {
    if (a == b) throw SmilesError("self-loop bond");
    auto key = std::minmax(a, b);
    if (!seen_bonds.insert({key.first, key.second}).second)
      throw SmilesError("duplicate bond between atoms " + std::to_string(a) + " and " +
                        std::to_string(b));
    g.bonds.push_back(Bond{a, b, order});
  };

  for (const Token& t : tokens) {
    switch (t.kind) {
      case TokenKind::Atom:
      case TokenKind::BracketAtom: {
        Atom atom;
        if (t.kind == TokenKind::BracketAtom) {
          atom = parse_bracket(t.text, 0);
        } else if (is_aromatic_symbol(t.text[0])) {
          atom.element = upper_element(t.text);
          atom.aromatic = true;
        } else {
          atom.element = t.text;
        }
        g.atoms.push_back(atom);
        std::size_t idx = g.atoms.size() - 1;
        if (prev != SIZE_MAX && !dot_break) {
          BondOrder order = pending_bond ? pending_order
                            : (g.atoms[prev].aromatic && atom.aromatic)
                                ? BondOrder::Aromatic
                                : BondOrder::Single;
          add_bond(prev, idx, order);
        }
        prev = idx;
        pending_bond = false;
        dot_break = false;
        branch_open = false;
        break;
      }
      case TokenKind::Bond: {
        if (pending_bond) throw SmilesError("consecutive bond symbols");
        if (prev == SIZE_MAX || dot_break)
          throw SmilesError("bond symbol with no preceding atom");
        if (t.text == ".") {
          dot_break = true;
          pending_bond = false;
        } else {
          pending_bond = true;
          pending_order = t.text == "=" ? BondOrder::Double
                          : t.text == "#" ? BondOrder::Triple
                          : t.text == ":" ? BondOrder::Aromatic
                                          : BondOrder::Single;
        }
        break;
      }
      case TokenKind::RingDigit: {
        if (prev == SIZE_MAX) throw SmilesError("ring digit before any atom");
        if (branch_open || dot_break) throw SmilesError("misplaced ring digit");
        char d = t.text[0];
        auto it = open_rings.find(d);
        if (it == open_rings.end()) {
          open_rings[d] = RingOpen{prev, pending_bond, pending_order};
        } else {
          RingOpen open = it->second;
          open_rings.erase(it);
          BondOrder order;
          if (pending_bond) order = pending_order;
          else if (open.has_order) order = open.order;
          else
            order = (g.atoms[open.atom].aromatic && g.atoms[prev].aromatic)
                        ? BondOrder::Aromatic
                        : BondOrder::Single;
          add_bond(open.atom, prev, order);
        }
        pending_bond = false;
        break;
      }
      case TokenKind::OpenParen:
        if (prev == SIZE_MAX) throw SmilesError("branch before any atom");
        if (branch_open) throw SmilesError("nested '(' without an atom between");
        if (pending_bond || dot_break) throw SmilesError("branch after a bond symbol");
        stack.push_back(prev);
        branch_open = true;
        break;
      case TokenKind::CloseParen:
        if (stack.empty()) throw UnclosedBranch("unmatched ')'");
        if (branch_open) throw SmilesError("empty branch");
        if (pending_bond || dot_break) throw SmilesError("dangling bond before ')'");
        prev = stack.back();
        stack.pop_back();
        break;
      case TokenKind::Special:
        break;
    }
  }
  if (pending_bond || dot_break) throw SmilesError("dangling bond at end of input");
  if (!stack.empty()) throw UnclosedBranch("unclosed branch");
  if (!open_rings.empty())
    throw UnclosedRing(std::string("unclosed ring digit ") +
                       std::string(1, open_rings.begin()->first));

  // Valence check and implicit hydrogen fill.
  for (std::size_t i = 0; i < g.atoms.size(); ++i) {
    Atom& a = g.atoms[i];
    int bsum = bond_sum_of(g, i);
    int mv = max_valence(a.element, a.formal_charge);
    if (bsum + (a.explicit_h ? a.h_count : 0) > mv)
      throw ValenceOverflow(i, "valence overflow on atom " + std::to_string(i) + " (" +
                                   a.element + ")");
    if (!a.explicit_h) a.h_count = std::max(0, fill_valence(a.element, a.formal_charge, bsum) - bsum);
  }
  return g;
}

// ---- canonicalization ----

namespace {

// Refine atom ranks by iterated neighborhood signatures.
std::vector<int> refine_ranks(const MolGraph& g, std::vector<long long> seed) {
  std::size_t n = g.atoms.size();
  auto adj = g.adjacency();
  // initial key: seed (individualization), element, charge, aromatic, degree, h
  std::vector<std::vector<long long>> keys(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Atom& a = g.atoms[i];
    long long el = 0;
    for (char c : a.element) el = el * 131 + c;
    keys[i] = {seed[i], el, a.formal_charge, a.aromatic ? 1 : 0,
               static_cast<long long>(adj[i].size()), a.h_count};
  }
  auto ranks_from_keys = [&]() {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t x, std::size_t y) { return keys[x] < keys[y]; });
    std::vector<int> rank(n, 0);
    int r = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0 && keys[idx[i]] != keys[idx[i - 1]]) ++r;
      rank[idx[i]] = r;
    }
    return rank;
  };
  std::vector<int> rank = ranks_from_keys();
  for (std::size_t iter = 0; iter < n + 2; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<long long> nb;
      for (std::size_t bi : adj[i]) {
        const Bond& b = g.bonds[bi];
        std::size_t other = b.a == i ? b.b : b.a;
        nb.push_back(static_cast<long long>(b.order) * 100000 + rank[other]);
      }
      std::sort(nb.begin(), nb.end());
      keys[i] = {rank[i]};
      keys[i].insert(keys[i].end(), nb.begin(), nb.end());
    }
    std::vector<int> next = ranks_from_keys();
    if (next == rank) break;
    rank = next;
  }
  return rank;
}

bool is_discrete(const std::vector<int>& rank) {
  std::set<int> s(rank.begin(), rank.end());
  return s.size() == rank.size();
}

std::string atom_text(const MolGraph& g, std::size_t i, int bond_sum) {
  (void)bond_sum;
  const Atom& a = g.atoms[i];
  bool organic = a.element != "H";
  // Bracket whenever a bare symbol would lead a reader to infer a different
  // hydrogen count. The reader treats only aromatic O/S as lone-pair donors
  // for a bare symbol (aromatic N counts as such only when written [nH]), so
  // the fill is computed from the reader's view, not this atom's flags.
  double s = 0.0;
  for (const Bond& b : g.bonds) {
    if (b.a != i && b.b != i) continue;
    double w = bond_weight(b.order);
    if (a.aromatic && (a.element == "O" || a.element == "S") &&
        b.order == BondOrder::Aromatic)
      w = 1.0;
    s += w;
  }
  int bare_sum = static_cast<int>(std::ceil(s - 1e-9));
  int fill =
      std::max(0, fill_valence(a.element, a.formal_charge, bare_sum) - bare_sum);
  bool needs_bracket = !organic || a.formal_charge != 0 || a.h_count != fill;
  std::string sym = a.element;
  if (a.aromatic)
    sym[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(sym[0])));
  if (!needs_bracket) return sym;
  std::string t = "[" + sym;
  if (a.h_count == 1) t += "H";
  else if (a.h_count > 1) t += "H" + std::to_string(a.h_count);
  int q = a.formal_charge;
  if (q == 1) t += "+";
  else if (q == -1) t += "-";
  else if (q > 1) t += "+" + std::to_string(q);
  else if (q < -1) t += "-" + std::to_string(-q);
  return t + "]";
}

std::string bond_text(const MolGraph& g, const Bond& b) {
  switch (b.order) {
    case BondOrder::Double: return "=";
    case BondOrder::Triple: return "#";
    case BondOrder::Aromatic:
      return (g.atoms[b.a].aromatic && g.atoms[b.b].aromatic) ? "" : ":";
    case BondOrder::Single:
      return (g.atoms[b.a].aromatic && g.atoms[b.b].aromatic) ? "-" : "";
  }
  return "";
}

struct Emitter {
  const MolGraph& g;
  const std::vector<int>& rank;
  std::vector<std::vector<std::size_t>> adj;
  std::vector<bool> atom_visited;
  std::vector<bool> bond_used;
  // ring digit bookkeeping
  std::vector<std::vector<std::pair<char, std::string>>> ring_marks;  // per atom
  std::vector<bool> digit_in_use = std::vector<bool>(10, false);
  std::map<std::size_t, char> open_digit_by_bond;

  explicit Emitter(const MolGraph& graph, const std::vector<int>& r)
      : g(graph), rank(r), adj(graph.adjacency()),
        atom_visited(graph.atoms.size(), false),
        bond_used(graph.bonds.size(), false),
        ring_marks(graph.atoms.size()) {}

  char take_digit() {
    for (char d = 0; d < 10; ++d)
      if (!digit_in_use[d]) {
        digit_in_use[d] = true;
        return static_cast<char>('0' + d);
      }
    throw SmilesError("more than 10 simultaneously open rings");
  }

  // Pre-pass: mark ring-closure bonds in DFS order so digits land on both ends.
  void plan(std::size_t root) {
    struct Frame {
      std::size_t atom;
      std::vector<std::size_t> nbrs;  // bond indices, rank-ordered
      std::size_t next = 0;
    };
    // iterative DFS matching emit order
    std::vector<Frame> stack;
    auto make_frame = [&](std::size_t u) {
      Frame f;
      f.atom = u;
      f.nbrs = adj[u];
      std::sort(f.nbrs.begin(), f.nbrs.end(), [&](std::size_t x, std::size_t y) {
        std::size_t ox = g.bonds[x].a == u ? g.bonds[x].b : g.bonds[x].a;
        std::size_t oy = g.bonds[y].a == u ? g.bonds[y].b : g.bonds[y].a;
        return rank[ox] < rank[oy];
      });
      return f;
    };
    atom_visited[root] = true;
    stack.push_back(make_frame(root));
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.next >= f.nbrs.size()) {
        stack.pop_back();
        // free digits for rings closed at this atom happens in emit; here just pop
        continue;
      }
      std::size_t bi = f.nbrs[f.next++];
      if (bond_used[bi]) continue;
      const Bond& b = g.bonds[bi];
      std::size_t other = b.a == f.atom ? b.b : b.a;
      if (atom_visited[other]) {
        // ring closure: digit on both endpoints
        bond_used[bi] = true;
        char d = take_digit();
        std::string bt = bond_text(g, b);
        ring_marks[f.atom].push_back({d, bt});
        ring_marks[other].push_back({d, bt});
        open_digit_by_bond[bi] = d;
      } else {
        bond_used[bi] = true;
        atom_visited[other] = true;
        stack.push_back(make_frame(other));
      }
    }
    // NOTE: digits are never reused within one molecule in this scheme; the
    // 10-digit budget bounds rings per emitted string.
  }

  std::string emit(std::size_t root) {
    plan(root);
    std::fill(atom_visited.begin(), atom_visited.end(), false);
    std::fill(bond_used.begin(), bond_used.end(), false);
    // ring bonds stay "used" so the tree walk skips them
    for (auto& [bi, d] : open_digit_by_bond) bond_used[bi] = true;
    return emit_atom(root, SIZE_MAX);
  }

  std::string emit_atom(std::size_t u, std::size_t parent_bond) {
    atom_visited[u] = true;
    std::string s;
    if (parent_bond != SIZE_MAX) s += bond_text(g, g.bonds[parent_bond]);
    s += atom_text(g, u, bond_sum_of(g, u));
    // ring digits at this atom, sorted for determinism
    auto marks = ring_marks[u];
    std::sort(marks.begin(), marks.end());
    for (auto& [d, bt] : marks) s += bt + std::string(1, d);
    // tree children in rank order
    std::vector<std::size_t> children;
    for (std::size_t bi : adj[u]) {
      if (bi == parent_bond || bond_used[bi]) continue;
      children.push_back(bi);
    }
    std::sort(children.begin(), children.end(), [&](std::size_t x, std::size_t y) {
      std::size_t ox = g.bonds[x].a == u ? g.bonds[x].b : g.bonds[x].a;
      std::size_t oy = g.bonds[y].a == u ? g.bonds[y].b : g.bonds[y].a;
      return rank[ox] < rank[oy];
    });
    for (std::size_t ci = 0; ci < children.size(); ++ci) {
      std::size_t bi = children[ci];
      bond_used[bi] = true;
      std::size_t other = g.bonds[bi].a == u ? g.bonds[bi].b : g.bonds[bi].a;
      std::string sub = emit_atom(other, bi);
      if (ci + 1 < children.size()) s += "(" + sub + ")";
      else s += sub;
    }
    return s;
  }
};

std::string emit_component(const MolGraph& g, const std::vector<int>& rank,
                           const std::vector<std::size_t>& component) {
  // root = lowest-ranked atom of the component
  std::size_t root = component[0];
  for (std::size_t a : component)
    if (rank[a] < rank[root]) root = a;
  Emitter em(g, rank);
  return em.emit(root);
}

std::string canon_search(const MolGraph& g, std::vector<long long>& seed, int depth);

std::string emit_with_ranks(const MolGraph& g, const std::vector<int>& rank) {
  // split into connected components, emit each, join sorted by text
  std::size_t n = g.atoms.size();
  auto adj = g.adjacency();
  std::vector<int> comp(n, -1);
  std::vector<std::string> parts;
  for (std::size_t i = 0; i < n; ++i) {
    if (comp[i] != -1) continue;
    std::vector<std::size_t> members;
    std::vector<std::size_t> todo{i};
    comp[i] = 1;
    while (!todo.empty()) {
      std::size_t u = todo.back();
      todo.pop_back();
      members.push_back(u);
      for (std::size_t bi : adj[u]) {
        std::size_t v = g.bonds[bi].a == u ? g.bonds[bi].b : g.bonds[bi].a;
        if (comp[v] == -1) {
          comp[v] = 1;
          todo.push_back(v);
        }
      }
    }
    parts.push_back(emit_component(g, rank, members));
  }
  std::sort(parts.begin(), parts.end());
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ".";
    out += parts[i];
  }
  return out;
}

// Canonical string = lexicographically smallest emission over tie-break
// choices. Branch on the first non-singleton rank cell only.
std::string canon_search(const MolGraph& g, std::vector<long long>& seed, int depth) {
  std::vector<int> rank = refine_ranks(g, seed);
  if (is_discrete(rank) || depth > 12) return emit_with_ranks(g, rank);
  // find the lowest-rank cell with >1 member
  int target = -1;
  std::vector<std::size_t> cell;
  for (int r = 0;; ++r) {
    cell.clear();
    for (std::size_t i = 0; i < rank.size(); ++i)
      if (rank[i] == r) cell.push_back(i);
    if (cell.empty()) break;
    if (cell.size() > 1) {
      target = r;
      break;
    }
  }
  if (target < 0) return emit_with_ranks(g, rank);
  std::string best;
  for (std::size_t a : cell) {
    seed[a] = -1;  // individualize: strictly smaller than the default 0
    std::string s = canon_search(g, seed, depth + 1);
    seed[a] = 0;
    if (best.empty() || s < best) best = s;
  }
  return best;
}

}  // namespace

std::string canonicalize(const MolGraph& g) {
  if (g.atoms.empty()) throw SmilesError("empty graph");
  std::vector<long long> seed(g.atoms.size(), 0);
  return canon_search(g, seed, 0);
}

std::map<std::string, int> molecular_formula(const MolGraph& g) {
  std::map<std::string, int> f;
  for (const Atom& a : g.atoms) {
    f[a.element] += 1;
    if (a.h_count > 0) f["H"] += a.h_count;
  }
  return f;
}

std::string formula_string(const std::map<std::string, int>& formula) {
  // Hill order: C, H, then alphabetical.
  std::ostringstream os;
  auto emit = [&os, &formula](const std::string& e) {
    auto it = formula.find(e);
    if (it == formula.end()) return;
    os << e;
    if (it->second > 1) os << it->second;
  };
  emit("C");
  emit("H");
  for (const auto& [e, n] : formula) {
    (void)n;
    if (e != "C" && e != "H") emit(e);
  }
  return os.str();
}

double element_mass(const std::string& element) {
  if (element == "H") return 1.007825;
  if (element == "B") return 11.009305;
  if (element == "C") return 12.000000;
  if (element == "N") return 14.003074;
  if (element == "O") return 15.994915;
  if (element == "F") return 18.998403;
  if (element == "P") return 30.973762;
  if (element == "S") return 31.972071;
  if (element == "Cl") return 34.968853;
  if (element == "Br") return 78.918338;
  if (element == "I") return 126.904473;
  throw SmilesError("no isotope mass for element " + element);
}

double monoisotopic_mass(const MolGraph& g) {
  double m = 0.0;
  for (const auto& [e, n] : molecular_formula(g)) m += element_mass(e) * n;
  return m;
}

std::size_t Fingerprint::popcount() const {
  std::size_t n = 0;
  for (std::uint64_t w : bits) n += static_cast<std::size_t>(__builtin_popcountll(w));
  return n;
}

std::string Fingerprint::to_hex() const {
  static const char* hex = "0123456789abcdef";
  std::string s;
  s.reserve(width / 4);
  for (std::size_t i = 0; i < width; i += 4) {
    int nib = 0;
    for (int b = 0; b < 4; ++b)
      if (i + b < width && test(i + b)) nib |= 1 << b;
    s += hex[nib];
  }
  return s;
}

Fingerprint morgan_fingerprint(const MolGraph& g, int radius, std::size_t bits) {
  if ((bits & (bits - 1)) != 0 || bits == 0)
    throw SmilesError("fingerprint width must be a power of two");
  Fingerprint fp;
  fp.width = bits;
  fp.bits.assign(bits / 64 + (bits % 64 ? 1 : 0), 0);
  auto adj = g.adjacency();
  auto mix = [](std::uint64_t h, std::uint64_t x) {
    h ^= x + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
  };
  std::vector<std::uint64_t> hash(g.atoms.size());
  for (std::size_t i = 0; i < g.atoms.size(); ++i) {
    const Atom& a = g.atoms[i];
    std::uint64_t h = 1469598103934665603ull;
    for (char c : a.element) h = mix(h, static_cast<std::uint64_t>(c));
    h = mix(h, static_cast<std::uint64_t>(a.formal_charge + 8));
    h = mix(h, static_cast<std::uint64_t>(a.h_count));
    h = mix(h, a.aromatic ? 2 : 1);
    h = mix(h, adj[i].size());
    hash[i] = h;
  }
  for (int r = 0; r <= radius; ++r) {
    for (std::size_t i = 0; i < g.atoms.size(); ++i)
      fp.set(static_cast<std::size_t>(hash[i] % bits));
    if (r == radius) break;
    std::vector<std::uint64_t> next(hash.size());
    for (std::size_t i = 0; i < g.atoms.size(); ++i) {
      std::vector<std::uint64_t> nb;
      for (std::size_t bi : adj[i]) {
        const Bond& b = g.bonds[bi];
        std::size_t other = b.a == i ? b.b : b.a;
        nb.push_back(mix(static_cast<std::uint64_t>(b.order) + 1, hash[other]));
      }
      std::sort(nb.begin(), nb.end());
      std::uint64_t h = mix(0x51ed2701a3b2cull, hash[i]);
      for (std::uint64_t x : nb) h = mix(h, x);
      next[i] = h;
    }
    hash = next;
  }
  return fp;
}

}  // namespace glmr::smiles
