#include "glmr/mces.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace glmr::mces {

namespace {

using smiles::Bond;
using smiles::BondOrder;
using smiles::MolGraph;

// Hydrogens are carried as counts, not graph nodes; explicit [H] atoms are
// stripped here so both solver entry points agree on the graph.
MolGraph strip_hydrogens(const MolGraph& g) {
  MolGraph out;
  std::vector<std::size_t> remap(g.atoms.size(), SIZE_MAX);
  for (std::size_t i = 0; i < g.atoms.size(); ++i) {
    if (g.atoms[i].element == "H") continue;
    remap[i] = out.atoms.size();
    out.atoms.push_back(g.atoms[i]);
  }
  for (const Bond& b : g.bonds) {
    if (remap[b.a] == SIZE_MAX || remap[b.b] == SIZE_MAX) continue;
    out.bonds.push_back(Bond{remap[b.a], remap[b.b], b.order});
  }
  return out;
}

struct NodeLabel {
  std::string element;
  bool aromatic;
  bool operator==(const NodeLabel& o) const {
    return element == o.element && aromatic == o.aromatic;
  }
  bool operator<(const NodeLabel& o) const {
    return std::tie(element, aromatic) < std::tie(o.element, o.aromatic);
  }
};

NodeLabel label_of(const MolGraph& g, std::size_t i) {
  return {g.atoms[i].element, g.atoms[i].aromatic};
}

// class id of an edge: unordered endpoint labels + bond order
using EdgeClass = std::tuple<NodeLabel, NodeLabel, BondOrder>;

EdgeClass class_of(const MolGraph& g, const Bond& b) {
  NodeLabel la = label_of(g, b.a), lb = label_of(g, b.b);
  if (lb < la) std::swap(la, lb);
  return {la, lb, b.order};
}

}  // namespace

bool edges_compatible(const MolGraph& g1, const Bond& b1, const MolGraph& g2,
                      const Bond& b2) {
  return class_of(g1, b1) == class_of(g2, b2);
}

// ---- brute force over edge mappings ----

namespace {

struct BruteState {
  const MolGraph *gs, *gl;       // small / large (by edge count)
  std::vector<std::size_t> node_map;    // gs node -> gl node or SIZE_MAX
  std::vector<bool> gl_node_used;
  std::vector<bool> gl_edge_used;
  std::vector<int> edge_map;     // gs edge -> gl edge or -1
  int best = 0;
  std::vector<int> best_edge_map;

  bool try_bind(std::size_t ns, std::size_t nl, std::vector<std::size_t>& undo_nodes) {
    if (node_map[ns] != SIZE_MAX) return node_map[ns] == nl;
    if (gl_node_used[nl]) return false;
    if (!(label_of(*gs, ns) == label_of(*gl, nl))) return false;
    node_map[ns] = nl;
    gl_node_used[nl] = true;
    undo_nodes.push_back(ns);
    return true;
  }

  void unbind(const std::vector<std::size_t>& undo_nodes) {
    for (std::size_t ns : undo_nodes) {
      gl_node_used[node_map[ns]] = false;
      node_map[ns] = SIZE_MAX;
    }
  }

  void search(std::size_t ei, int matched) {
    if (ei == gs->bonds.size()) {
      if (matched > best) {
        best = matched;
        best_edge_map = edge_map;
      }
      return;
    }
    if (matched + static_cast<int>(gs->bonds.size() - ei) <= best) return;  // prune
    const Bond& e = gs->bonds[ei];
    for (std::size_t ej = 0; ej < gl->bonds.size(); ++ej) {
      if (gl_edge_used[ej]) continue;
      const Bond& f = gl->bonds[ej];
      if (f.order != e.order) continue;
      for (int orient = 0; orient < 2; ++orient) {
        std::size_t x = orient ? f.b : f.a;
        std::size_t y = orient ? f.a : f.b;
        std::vector<std::size_t> undo;
        if (try_bind(e.a, x, undo) && try_bind(e.b, y, undo)) {
          gl_edge_used[ej] = true;
          edge_map[ei] = static_cast<int>(ej);
          search(ei + 1, matched + 1);
          edge_map[ei] = -1;
          gl_edge_used[ej] = false;
        }
        unbind(undo);
        if (f.a == f.b) break;
      }
    }
    search(ei + 1, matched);  // leave this edge unmatched
  }
};

}  // namespace

MCESResult mces_bruteforce(const MolGraph& raw1, const MolGraph& raw2) {
  MolGraph g1 = strip_hydrogens(raw1);
  MolGraph g2 = strip_hydrogens(raw2);
  if (std::min(g1.bonds.size(), g2.bonds.size()) > 8)
    throw TooLarge("brute force requires min(|E1|,|E2|) <= 8");
  bool swapped = g1.bonds.size() > g2.bonds.size();
  const MolGraph& gs = swapped ? g2 : g1;
  const MolGraph& gl = swapped ? g1 : g2;

  BruteState st;
  st.gs = &gs;
  st.gl = &gl;
  st.node_map.assign(gs.atoms.size(), SIZE_MAX);
  st.gl_node_used.assign(gl.atoms.size(), false);
  st.gl_edge_used.assign(gl.bonds.size(), false);
  st.edge_map.assign(gs.bonds.size(), -1);
  st.best_edge_map = st.edge_map;
  st.search(0, 0);

  MCESResult r;
  r.common_edge_count = st.best;
  r.distance = static_cast<int>(g1.bonds.size() + g2.bonds.size()) - 2 * st.best;
  r.optimal = true;
  r.upper_bound = st.best;
  for (std::size_t i = 0; i < st.best_edge_map.size(); ++i) {
    if (st.best_edge_map[i] < 0) continue;
    std::size_t e1 = swapped ? static_cast<std::size_t>(st.best_edge_map[i]) : i;
    std::size_t e2 = swapped ? i : static_cast<std::size_t>(st.best_edge_map[i]);
    r.mapping.push_back({e1, e2});
  }
  return r;
}

// ---- branch and bound over node assignments ----

namespace {

struct BnBState {
  const MolGraph *g1, *g2;
  std::vector<std::size_t> order;      // g1 nodes, high degree first
  std::vector<std::size_t> node_map;   // g1 node -> g2 node or SIZE_MAX (skip = SIZE_MAX-1)
  std::vector<bool> g2_used;
  std::vector<std::vector<std::pair<std::size_t, const Bond*>>> adj1;  // neighbor, bond
  std::vector<std::vector<int>> g2_edge_at;  // g2 adjacency matrix: bond index or -1
  std::vector<int> edge_class1, edge_class2;  // class ids per edge
  int n_classes = 0;
  std::vector<bool> g2_edge_matched;
  // per-class counts of g2 edges still available
  std::vector<int> avail2;
  int best = 0;
  std::vector<std::size_t> best_node_map;
  std::uint64_t nodes_expanded = 0;
  std::uint64_t budget = 0;
  bool exhausted = false;
  int root_bound = 0;

  static constexpr std::size_t kSkip = SIZE_MAX - 1;

  // Admissible bound on additional matches: per class,
  // min(#g1 edges still undecided, #g2 edges unused).
  int remaining_bound(std::size_t level) const {
    // position of each g1 node in `order`
    // precomputed in pos[]
    std::vector<int> cnt1(n_classes, 0);
    for (std::size_t e = 0; e < g1->bonds.size(); ++e) {
      const Bond& b = g1->bonds[e];
      bool a_decided = pos[b.a] < level, b_decided = pos[b.b] < level;
      bool a_skipped = a_decided && node_map[b.a] == kSkip;
      bool b_skipped = b_decided && node_map[b.b] == kSkip;
      if (a_skipped || b_skipped) continue;
      if (a_decided && b_decided) continue;  // already counted or missed
      cnt1[edge_class1[e]] += 1;
    }
    int bound = 0;
    for (int c = 0; c < n_classes; ++c) bound += std::min(cnt1[c], avail2[c]);
    return bound;
  }

  std::vector<std::size_t> pos;  // g1 node -> level in order

  void search(std::size_t level, int matched) {
    if (nodes_expanded >= budget) {
      exhausted = true;
      return;
    }
    ++nodes_expanded;
    if (level == order.size()) {
      if (matched > best) {
        best = matched;
        best_node_map = node_map;
      }
      return;
    }
    int bound = matched + remaining_bound(level);
    if (level == 0) root_bound = bound;
    if (bound <= best) return;
    std::size_t u = order[level];
    NodeLabel lu = label_of(*g1, u);
    for (std::size_t w = 0; w < g2->atoms.size(); ++w) {
      if (g2_used[w]) continue;
      if (!(label_of(*g2, w) == lu)) continue;
      // gain = edges to already-mapped neighbors that exist in g2 with equal order
      int gain = 0;
      std::vector<int> used_edges;
      for (const auto& [v, bond] : adj1[u]) {
        if (pos[v] >= level || node_map[v] == kSkip || node_map[v] == SIZE_MAX) continue;
        int e2 = g2_edge_at[w][node_map[v]];
        if (e2 >= 0 && g2->bonds[e2].order == bond->order) {
          ++gain;
          used_edges.push_back(e2);
        }
      }
      node_map[u] = w;
      g2_used[w] = true;
      for (int e2 : used_edges) {
        g2_edge_matched[e2] = true;
        avail2[edge_class2[e2]] -= 1;
      }
      search(level + 1, matched + gain);
      for (int e2 : used_edges) {
        g2_edge_matched[e2] = false;
        avail2[edge_class2[e2]] += 1;
      }
      g2_used[w] = false;
      node_map[u] = SIZE_MAX;
      if (exhausted) return;
    }
    node_map[u] = kSkip;
    search(level + 1, matched);
    node_map[u] = SIZE_MAX;
  }
};

}  // namespace

MCESResult mces_exact(const MolGraph& raw1, const MolGraph& raw2,
                      std::uint64_t node_budget) {
  MolGraph g1 = strip_hydrogens(raw1);
  MolGraph g2 = strip_hydrogens(raw2);

  MCESResult r;
  if (g1.bonds.empty() || g2.bonds.empty()) {
    r.common_edge_count = 0;
    r.distance = static_cast<int>(g1.bonds.size() + g2.bonds.size());
    r.optimal = true;
    r.upper_bound = 0;
    return r;
  }

  BnBState st;
  st.g1 = &g1;
  st.g2 = &g2;
  st.budget = node_budget;
  std::size_t n1 = g1.atoms.size(), n2 = g2.atoms.size();
  st.node_map.assign(n1, SIZE_MAX);
  st.g2_used.assign(n2, false);
  st.adj1.resize(n1);
  for (const Bond& b : g1.bonds) {
    st.adj1[b.a].push_back({b.b, &b});
    st.adj1[b.b].push_back({b.a, &b});
  }
  st.g2_edge_at.assign(n2, std::vector<int>(n2, -1));
  for (std::size_t e = 0; e < g2.bonds.size(); ++e) {
    st.g2_edge_at[g2.bonds[e].a][g2.bonds[e].b] = static_cast<int>(e);
    st.g2_edge_at[g2.bonds[e].b][g2.bonds[e].a] = static_cast<int>(e);
  }
  // class ids shared across both edge sets
  std::map<EdgeClass, int> class_ids;
  auto cid = [&class_ids](const EdgeClass& c) {
    auto [it, inserted] = class_ids.emplace(c, static_cast<int>(class_ids.size()));
    return it->second;
  };
  for (const Bond& b : g1.bonds) st.edge_class1.push_back(cid(class_of(g1, b)));
  for (const Bond& b : g2.bonds) st.edge_class2.push_back(cid(class_of(g2, b)));
  st.n_classes = static_cast<int>(class_ids.size());
  st.avail2.assign(st.n_classes, 0);
  for (int c : st.edge_class2) st.avail2[c] += 1;
  st.g2_edge_matched.assign(g2.bonds.size(), false);

  // order: BFS from the highest-degree node keeps mapped neighbors adjacent,
  // which makes the incremental gain computation effective
  st.order.resize(n1);
  std::iota(st.order.begin(), st.order.end(), 0);
  std::sort(st.order.begin(), st.order.end(), [&st](std::size_t a, std::size_t b) {
    return st.adj1[a].size() > st.adj1[b].size();
  });
  {
    std::vector<std::size_t> bfs;
    std::vector<bool> seen(n1, false);
    for (std::size_t seed : st.order) {
      if (seen[seed]) continue;
      std::vector<std::size_t> queue{seed};
      seen[seed] = true;
      std::size_t qi = 0;
      while (qi < queue.size()) {
        std::size_t u = queue[qi++];
        bfs.push_back(u);
        std::vector<std::size_t> nbrs;
        for (const auto& [v, bond] : st.adj1[u])
          if (!seen[v]) nbrs.push_back(v);
        std::sort(nbrs.begin(), nbrs.end(), [&st](std::size_t a, std::size_t b) {
          return st.adj1[a].size() > st.adj1[b].size();
        });
        for (std::size_t v : nbrs) {
          seen[v] = true;
          queue.push_back(v);
        }
      }
    }
    st.order = bfs;
  }
  st.pos.assign(n1, 0);
  for (std::size_t i = 0; i < st.order.size(); ++i) st.pos[st.order[i]] = i;
  st.root_bound = static_cast<int>(std::min(g1.bonds.size(), g2.bonds.size()));

  st.search(0, 0);

  r.common_edge_count = st.best;
  r.distance = static_cast<int>(g1.bonds.size() + g2.bonds.size()) - 2 * st.best;
  if (!st.best_node_map.empty()) {
    for (std::size_t e = 0; e < g1.bonds.size(); ++e) {
      const Bond& b = g1.bonds[e];
      std::size_t ma = st.best_node_map[b.a], mb = st.best_node_map[b.b];
      if (ma >= n2 || mb >= n2) continue;  // unmapped or skipped endpoint
      int e2 = st.g2_edge_at[ma][mb];
      if (e2 >= 0 && g2.bonds[e2].order == b.order) r.mapping.push_back({e, static_cast<std::size_t>(e2)});
    }
  }
  r.optimal = !st.exhausted;
  r.upper_bound = st.exhausted ? std::min<int>(st.root_bound,
                                               static_cast<int>(std::min(
                                                   g1.bonds.size(), g2.bonds.size())))
                               : st.best;
  r.nodes_expanded = st.nodes_expanded;
  return r;
}

}  // namespace glmr::mces
