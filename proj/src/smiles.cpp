#include "chemdyn/smiles.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>

namespace chemdyn {

namespace {

constexpr std::string_view kBareOrganic[] = {"B", "C", "N", "O", "P",
                                             "S",  "F", "Cl", "Br", "I"};
constexpr std::string_view kAromaticBare = "bcnops";

bool is_organic_subset(int z) {
  switch (z) {
    case 5: case 6: case 7: case 8: case 9:
    case 15: case 16: case 17: case 35: case 53:
      return true;
    default:
      return false;
  }
}

bool aromatic_symbol_allowed(int z) {
  // b, c, n, o, p, s
  return z == 5 || z == 6 || z == 7 || z == 8 || z == 15 || z == 16;
}

const std::vector<int>& allowed_valences(int z) {
  static const std::vector<int> none;
  static const std::map<int, std::vector<int>> table = {
      {1, {1}},        // H
      {5, {3}},        // B
      {6, {4}},        // C
      {7, {3}},        // N
      {8, {2}},        // O
      {9, {1}},        // F
      {15, {3, 5}},    // P
      {16, {2, 4, 6}}, // S
      {17, {1}},       // Cl
      {35, {1}},       // Br
      {53, {1}},       // I
  };
  auto it = table.find(z);
  return it == table.end() ? none : it->second;
}

int rounded_bond_sum(const MoleculeGraph& g, int atom) {
  double sum = 0.0;
  for (const auto& [nbr, bidx] : g.adjacency[atom]) {
    (void)nbr;
    sum += bond_order_value(g.bonds[bidx].order);
  }
  return static_cast<int>(std::floor(sum + 0.5));  // half-up
}

// Hydrogens a bare organic-subset atom would carry: fill up to the lowest
// allowed valence at or above the bond-order sum.
int implicit_hydrogens(int z, int bond_sum) {
  for (int v : allowed_valences(z)) {
    if (v >= bond_sum) return v - bond_sum;
  }
  return 0;
}

void rebuild_adjacency(MoleculeGraph& g) {
  g.adjacency.assign(g.atoms.size(), {});
  for (std::size_t i = 0; i < g.bonds.size(); ++i) {
    g.adjacency[g.bonds[i].a].emplace_back(g.bonds[i].b, static_cast<int>(i));
    g.adjacency[g.bonds[i].b].emplace_back(g.bonds[i].a, static_cast<int>(i));
  }
}

// Ring membership = incident to at least one non-bridge edge. Bridges via an
// iterative lowpoint DFS.
void compute_ring_membership(MoleculeGraph& g) {
  const int n = g.atom_count();
  g.ring_membership.assign(n, false);
  std::vector<int> disc(n, -1), low(n, 0);
  std::vector<bool> bridge(g.bonds.size(), false);
  int timer = 0;

  struct StackItem {
    int atom;
    int parent_edge;
    std::size_t next_nbr;
  };
  for (int root = 0; root < n; ++root) {
    if (disc[root] != -1) continue;
    std::vector<StackItem> stack{{root, -1, 0}};
    disc[root] = low[root] = timer++;
    while (!stack.empty()) {
      auto& top = stack.back();
      if (top.next_nbr < g.adjacency[top.atom].size()) {
        const auto [nbr, bidx] = g.adjacency[top.atom][top.next_nbr++];
        if (bidx == top.parent_edge) continue;
        if (disc[nbr] == -1) {
          disc[nbr] = low[nbr] = timer++;
          stack.push_back({nbr, bidx, 0});
        } else {
          low[top.atom] = std::min(low[top.atom], disc[nbr]);
        }
      } else {
        const int atom = top.atom;
        const int pedge = top.parent_edge;
        stack.pop_back();
        if (!stack.empty()) {
          const int parent = stack.back().atom;
          low[parent] = std::min(low[parent], low[atom]);
          if (low[atom] > disc[parent]) bridge[pedge] = true;
        }
      }
    }
  }
  for (std::size_t i = 0; i < g.bonds.size(); ++i) {
    if (!bridge[i]) {
      g.ring_membership[g.bonds[i].a] = true;
      g.ring_membership[g.bonds[i].b] = true;
    }
  }
}

// --------------------------------------------------------------------------
// Parser

struct PendingAtom {
  Element element;
  int formal_charge = 0;
  int explicit_h = 0;
  bool aromatic = false;
  bool bracket = false;
};

struct Parser {
  std::string_view s;
  std::size_t pos = 0;
  std::vector<std::string>* diags;

  MoleculeGraph graph;
  std::vector<bool> bracket_atom;
  std::set<std::pair<int, int>> bonded_pairs;

  [[noreturn]] void fail(std::size_t at, const std::string& msg) const {
    throw SmilesError(at, msg);
  }

  void note(const std::string& msg) {
    if (diags) diags->push_back(msg);
  }

  char peek() const { return pos < s.size() ? s[pos] : '\0'; }
  char take() { return s[pos++]; }
  bool done() const { return pos >= s.size(); }

  void add_bond(int a, int b, BondOrder order, std::size_t at) {
    if (a == b) fail(at, "bond endpoints must be distinct atoms");
    const auto key = std::minmax(a, b);
    if (!bonded_pairs.insert({key.first, key.second}).second) {
      fail(at, "duplicate bond between the same atom pair");
    }
    graph.bonds.push_back({a, b, order});
  }

  int add_atom(const PendingAtom& p) {
    graph.atoms.push_back(
        {p.element, p.formal_charge, p.explicit_h, p.aromatic});
    bracket_atom.push_back(p.bracket);
    return static_cast<int>(graph.atoms.size()) - 1;
  }

  std::optional<PendingAtom> try_bare_atom() {
    const std::size_t at = pos;
    // Two-letter organic symbols first.
    if (s.substr(pos, 2) == "Cl" || s.substr(pos, 2) == "Br") {
      PendingAtom p;
      p.element = *element_from_symbol(s.substr(pos, 2));
      pos += 2;
      return p;
    }
    const char c = peek();
    for (std::string_view sym : kBareOrganic) {
      if (sym.size() == 1 && sym[0] == c) {
        PendingAtom p;
        p.element = *element_from_symbol(sym);
        ++pos;
        return p;
      }
    }
    if (kAromaticBare.find(c) != std::string_view::npos) {
      PendingAtom p;
      char upper = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      p.element = *element_from_symbol(std::string_view(&upper, 1));
      p.aromatic = true;
      ++pos;
      return p;
    }
    (void)at;
    return std::nullopt;
  }

  PendingAtom parse_bracket_atom() {
    const std::size_t open = pos;
    ++pos;  // consume '['
    PendingAtom p;
    p.bracket = true;

    // Isotope: parsed, ignored.
    bool isotope = false;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      isotope = true;
      ++pos;
    }
    if (isotope) note("isotope label ignored");

    // Element symbol; lowercase single letters are aromatic.
    if (done()) fail(open, "unclosed bracket atom");
    if (std::islower(static_cast<unsigned char>(peek())) &&
        kAromaticBare.find(peek()) != std::string_view::npos) {
      char upper = static_cast<char>(std::toupper(static_cast<unsigned char>(take())));
      p.element = *element_from_symbol(std::string_view(&upper, 1));
      p.aromatic = true;
    } else if (std::isupper(static_cast<unsigned char>(peek()))) {
      std::string sym(1, take());
      if (!done() && std::islower(static_cast<unsigned char>(peek()))) {
        const std::string two = sym + peek();
        if (element_from_symbol(two)) {
          sym = two;
          ++pos;
        }
      }
      const auto elem = element_from_symbol(sym);
      if (!elem) fail(pos - sym.size(), "unknown element symbol '" + sym + "'");
      p.element = *elem;
    } else {
      fail(pos, std::string("unknown symbol '") + peek() + "' in bracket atom");
    }

    // Chirality: parsed, discarded.
    if (peek() == '@') {
      ++pos;
      if (peek() == '@') ++pos;
      note("chirality marker ignored");
    }

    // Hydrogen count.
    if (peek() == 'H') {
      ++pos;
      int count = 1;
      if (std::isdigit(static_cast<unsigned char>(peek()))) {
        count = 0;
        while (std::isdigit(static_cast<unsigned char>(peek()))) {
          count = count * 10 + (take() - '0');
        }
      }
      p.explicit_h = count;
    }

    // Charge.
    if (peek() == '+' || peek() == '-') {
      const int sign = take() == '+' ? 1 : -1;
      int magnitude = 1;
      if (std::isdigit(static_cast<unsigned char>(peek()))) {
        magnitude = 0;
        while (std::isdigit(static_cast<unsigned char>(peek()))) {
          magnitude = magnitude * 10 + (take() - '0');
        }
      } else {
        while (peek() == (sign > 0 ? '+' : '-')) {
          ++magnitude;
          ++pos;
        }
      }
      p.formal_charge = sign * magnitude;
    }

    // Atom class: parsed, ignored.
    if (peek() == ':') {
      ++pos;
      if (!std::isdigit(static_cast<unsigned char>(peek()))) {
        fail(pos, "atom class needs digits");
      }
      while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos;
      note("atom class ignored");
    }

    if (peek() != ']') fail(open, "unclosed bracket atom");
    ++pos;
    return p;
  }

  MoleculeGraph run() {
    struct RingOpen {
      int atom;
      std::optional<BondOrder> order;
      std::size_t offset;
    };
    std::map<int, RingOpen> open_rings;
    std::vector<int> branch_stack;
    int prev = -1;
    std::optional<BondOrder> pending;
    std::size_t pending_at = 0;

    auto resolve_order = [&](std::optional<BondOrder> a,
                             std::optional<BondOrder> b, int atom_a, int atom_b,
                             std::size_t at) -> BondOrder {
      if (a && b) {
        if (*a != *b) fail(at, "bond order conflict on ring closure");
        return *a;
      }
      if (a) return *a;
      if (b) return *b;
      const bool both_aromatic =
          graph.atoms[atom_a].aromatic && graph.atoms[atom_b].aromatic;
      return both_aromatic ? BondOrder::aromatic : BondOrder::single;
    };

    auto close_ring = [&](int digit, std::size_t at) {
      if (prev < 0) fail(at, "ring closure digit before any atom");
      auto it = open_rings.find(digit);
      if (it == open_rings.end()) {
        open_rings.emplace(digit, RingOpen{prev, pending, at});
      } else {
        const RingOpen o = it->second;
        open_rings.erase(it);
        if (o.atom == prev) fail(at, "ring closure to the same atom");
        const BondOrder order = resolve_order(o.order, pending, o.atom, prev, at);
        add_bond(o.atom, prev, order, at);
      }
      pending.reset();
    };

    while (!done()) {
      const char c = peek();
      const std::size_t at = pos;
      if (c == '(') {
        if (prev < 0) fail(at, "branch before any atom");
        if (pending) fail(at, "bond symbol before '('");
        branch_stack.push_back(prev);
        ++pos;
      } else if (c == ')') {
        if (pending) fail(pending_at, "dangling bond before ')'");
        if (branch_stack.empty()) fail(at, "unmatched ')'");
        prev = branch_stack.back();
        branch_stack.pop_back();
        ++pos;
      } else if (c == '-' || c == '=' || c == '#' || c == ':' || c == '/' ||
                 c == '\\') {
        if (pending) fail(at, "two bond symbols in a row");
        if (c == '/' || c == '\\') {
          note("stereo bond marker treated as a single bond");
          pending = BondOrder::single;
        } else if (c == '-') {
          pending = BondOrder::single;
        } else if (c == '=') {
          pending = BondOrder::double_bond;
        } else if (c == '#') {
          pending = BondOrder::triple;
        } else {
          pending = BondOrder::aromatic;
        }
        pending_at = at;
        ++pos;
      } else if (c == '.') {
        if (pending) fail(pending_at, "bond symbol before '.'");
        if (prev < 0) fail(at, "'.' before any atom");
        prev = -1;
        ++pos;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        ++pos;
        close_ring(c - '0', at);
      } else if (c == '%') {
        ++pos;
        if (!(std::isdigit(static_cast<unsigned char>(peek())))) {
          fail(at, "'%' needs two digits");
        }
        const int d1 = take() - '0';
        if (!(std::isdigit(static_cast<unsigned char>(peek())))) {
          fail(at, "'%' needs two digits");
        }
        const int d2 = take() - '0';
        close_ring(d1 * 10 + d2, at);
      } else {
        PendingAtom atom;
        if (c == '[') {
          atom = parse_bracket_atom();
        } else {
          const auto bare = try_bare_atom();
          if (!bare) {
            fail(at, std::string("unknown symbol '") + c + "'");
          }
          atom = *bare;
        }
        const int idx = add_atom(atom);
        if (prev >= 0) {
          const BondOrder order =
              resolve_order(pending, std::nullopt, prev, idx, at);
          add_bond(prev, idx, order, at);
        } else if (pending) {
          fail(pending_at, "bond symbol without a preceding atom");
        }
        pending.reset();
        prev = idx;
      }
    }

    if (pending) fail(pending_at, "dangling bond at end of input");
    if (!branch_stack.empty()) fail(s.size(), "unclosed branch");
    if (!open_rings.empty()) {
      const auto& o = open_rings.begin()->second;
      fail(o.offset, "unpaired ring closure digit " +
                         std::to_string(open_rings.begin()->first));
    }
    if (graph.atoms.empty()) fail(0, "empty SMILES");

    rebuild_adjacency(graph);
    compute_ring_membership(graph);

    // Resolve implicit hydrogens for bare atoms.
    for (int i = 0; i < graph.atom_count(); ++i) {
      if (!bracket_atom[i]) {
        graph.atoms[i].hydrogens = implicit_hydrogens(
            graph.atoms[i].element.atomic_number, rounded_bond_sum(graph, i));
      }
    }
    return std::move(graph);
  }
};

}  // namespace

double bond_order_value(BondOrder order) {
  switch (order) {
    case BondOrder::single: return 1.0;
    case BondOrder::double_bond: return 2.0;
    case BondOrder::triple: return 3.0;
    case BondOrder::aromatic: return 1.5;
  }
  return 1.0;
}

MoleculeGraph parse_smiles(std::string_view s,
                           std::vector<std::string>* diagnostics) {
  Parser p{s, 0, diagnostics, {}, {}, {}};
  return p.run();
}

std::vector<std::string> check_valence(const MoleculeGraph& g) {
  std::vector<std::string> out;
  for (int i = 0; i < g.atom_count(); ++i) {
    const SmilesAtom& a = g.atoms[i];
    const auto& allowed = allowed_valences(a.element.atomic_number);
    if (allowed.empty()) continue;  // no constraint recorded for this element
    const int total = rounded_bond_sum(g, i) + a.hydrogens;
    const int z = a.element.atomic_number;
    const int shift = (z == 7 || z == 8) && a.formal_charge != 0
                          ? (a.formal_charge > 0 ? 1 : -1)
                          : 0;
    bool ok = false;
    for (int v : allowed) {
      if (total == v + shift) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      std::ostringstream os;
      os << "atom " << i << " (" << a.element.symbol() << "): valence " << total
         << " not allowed";
      out.push_back(os.str());
    }
  }
  return out;
}

// --------------------------------------------------------------------------
// Canonicalization

namespace {

int bond_code(BondOrder order) {
  switch (order) {
    case BondOrder::single: return 1;
    case BondOrder::double_bond: return 2;
    case BondOrder::triple: return 3;
    case BondOrder::aromatic: return 4;
  }
  return 0;
}

// Dense re-ranking of arbitrary sortable keys; returns the class count.
template <typename Key>
int densify(const std::vector<Key>& keys, std::vector<int>* ranks) {
  const int n = static_cast<int>(keys.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return keys[a] < keys[b]; });
  ranks->assign(n, 0);
  int rank = 0;
  for (int k = 0; k < n; ++k) {
    if (k > 0 && keys[order[k - 1]] < keys[order[k]]) ++rank;
    (*ranks)[order[k]] = rank;
  }
  return rank + 1;
}

int refine_ranks(const MoleculeGraph& g, std::vector<int>* ranks) {
  const int n = g.atom_count();
  int classes = 0;
  {
    std::vector<int> tmp(ranks->begin(), ranks->end());
    std::vector<long long> keys(tmp.begin(), tmp.end());
    classes = densify(keys, ranks);
  }
  while (true) {
    std::vector<std::pair<int, std::vector<std::pair<int, int>>>> keys(n);
    for (int i = 0; i < n; ++i) {
      keys[i].first = (*ranks)[i];
      auto& nbrs = keys[i].second;
      nbrs.reserve(g.adjacency[i].size());
      for (const auto& [nbr, bidx] : g.adjacency[i]) {
        nbrs.emplace_back(bond_code(g.bonds[bidx].order), (*ranks)[nbr]);
      }
      std::sort(nbrs.begin(), nbrs.end());
    }
    std::vector<int> next;
    const int next_classes = densify(keys, &next);
    if (next_classes == classes) return classes;
    classes = next_classes;
    *ranks = std::move(next);
  }
}

std::vector<int> canonical_ranks(const MoleculeGraph& g) {
  const int n = g.atom_count();
  std::vector<std::array<int, 6>> init(n);
  for (int i = 0; i < n; ++i) {
    const SmilesAtom& a = g.atoms[i];
    init[i] = {a.element.atomic_number, g.degree(i),      a.formal_charge,
               a.hydrogens,             a.aromatic ? 1 : 0,
               g.ring_membership[i] ? 1 : 0};
  }
  std::vector<int> ranks;
  densify(init, &ranks);
  int classes = refine_ranks(g, &ranks);
  while (classes < n) {
    // Tie-break: double every rank, promote the smallest-index atom of the
    // lowest still-tied class, refine again.
    std::vector<int> count(classes, 0);
    for (int r : ranks) ++count[r];
    int target_rank = -1;
    for (int r = 0; r < classes; ++r) {
      if (count[r] > 1) {
        target_rank = r;
        break;
      }
    }
    int chosen = -1;
    for (int i = 0; i < n; ++i) {
      if (ranks[i] == target_rank) {
        chosen = i;
        break;
      }
    }
    for (int& r : ranks) r *= 2;
    ranks[chosen] -= 1;
    classes = refine_ranks(g, &ranks);
  }
  return ranks;
}

std::string atom_token(const MoleculeGraph& g, int i) {
  const SmilesAtom& a = g.atoms[i];
  std::string sym = a.element.symbol();
  if (a.aromatic) {
    for (char& c : sym) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  const bool organic = is_organic_subset(a.element.atomic_number);
  const bool aromatic_ok =
      !a.aromatic || aromatic_symbol_allowed(a.element.atomic_number);
  const int default_h = implicit_hydrogens(a.element.atomic_number,
                                           rounded_bond_sum(g, i));
  if (organic && aromatic_ok && a.formal_charge == 0 &&
      a.hydrogens == default_h) {
    return sym;
  }
  std::string out = "[" + sym;
  if (a.hydrogens == 1) {
    out += "H";
  } else if (a.hydrogens > 1) {
    out += "H" + std::to_string(a.hydrogens);
  }
  if (a.formal_charge != 0) {
    out += a.formal_charge > 0 ? '+' : '-';
    const int mag = std::abs(a.formal_charge);
    if (mag > 1) out += std::to_string(mag);
  }
  out += ']';
  return out;
}

std::string bond_token(const MoleculeGraph& g, const SmilesBond& bond) {
  const bool both_aromatic =
      g.atoms[bond.a].aromatic && g.atoms[bond.b].aromatic;
  switch (bond.order) {
    case BondOrder::single:
      return both_aromatic ? "-" : "";
    case BondOrder::double_bond:
      return "=";
    case BondOrder::triple:
      return "#";
    case BondOrder::aromatic:
      return both_aromatic ? "" : ":";
  }
  return "";
}

// Renders one connected component rooted at `root`, branches in rank order.
std::string render_component(const MoleculeGraph& g,
                             const std::vector<int>& ranks, int root) {
  const int n = g.atom_count();
  std::vector<bool> visited(n, false);
  std::vector<std::vector<std::pair<int, int>>> children(n);  // (atom, bond)
  std::vector<std::vector<int>> closure_ids_at(n);
  struct Closure {
    int open_atom;
    int close_atom;
    int bond;
  };
  std::vector<Closure> closures;
  std::vector<int> visit_order;

  // Pass 1: depth-first spanning tree, neighbors expanded in rank order so
  // tree children and closure bonds come out deterministic.
  {
    struct Item {
      int atom;
      int parent_bond;
      std::size_t next = 0;
      std::vector<std::pair<int, int>> nbrs;
    };
    auto sorted_neighbors = [&](int atom) {
      auto nbrs = g.adjacency[atom];
      std::sort(nbrs.begin(), nbrs.end(), [&](const auto& x, const auto& y) {
        if (ranks[x.first] != ranks[y.first]) return ranks[x.first] < ranks[y.first];
        return x.second < y.second;
      });
      return nbrs;
    };
    std::set<int> closure_bonds;
    std::vector<Item> stack;
    visited[root] = true;
    visit_order.push_back(root);
    stack.push_back({root, -1, 0, sorted_neighbors(root)});
    while (!stack.empty()) {
      Item& top = stack.back();
      if (top.next >= top.nbrs.size()) {
        stack.pop_back();
        continue;
      }
      const auto [nbr, bidx] = top.nbrs[top.next++];
      if (bidx == top.parent_bond || closure_bonds.count(bidx)) continue;
      if (visited[nbr]) {
        closure_bonds.insert(bidx);
        closures.push_back({nbr, top.atom, bidx});
      } else {
        visited[nbr] = true;
        visit_order.push_back(nbr);
        children[top.atom].emplace_back(nbr, bidx);
        stack.push_back({nbr, bidx, 0, sorted_neighbors(nbr)});
      }
    }
  }

  // Assign ring-closure digits in output order of the opening atom.
  std::vector<int> output_pos(n, -1);
  for (std::size_t k = 0; k < visit_order.size(); ++k) {
    output_pos[visit_order[k]] = static_cast<int>(k);
  }
  std::sort(closures.begin(), closures.end(), [&](const Closure& a, const Closure& b) {
    const int ao = std::min(output_pos[a.open_atom], output_pos[a.close_atom]);
    const int bo = std::min(output_pos[b.open_atom], output_pos[b.close_atom]);
    if (ao != bo) return ao < bo;
    return std::max(output_pos[a.open_atom], output_pos[a.close_atom]) <
           std::max(output_pos[b.open_atom], output_pos[b.close_atom]);
  });

  struct DigitUse {
    int digit;
    int bond;
    bool closing;  // emit bond token at the closing side
  };
  std::vector<std::vector<DigitUse>> digit_uses(n);
  {
    std::set<int> in_use;
    std::map<int, int> close_digit;  // bond -> digit
    // A digit becomes free again once its closing atom has been emitted;
    // process closures in output order and release eagerly.
    std::vector<std::pair<int, int>> release_at;  // (output pos, digit)
    for (const Closure& c : closures) {
      const int open_first = std::min(output_pos[c.open_atom], output_pos[c.close_atom]);
      const int close_last = std::max(output_pos[c.open_atom], output_pos[c.close_atom]);
      // Free digits whose closure finished before this opening.
      for (auto it = release_at.begin(); it != release_at.end();) {
        if (it->first < open_first) {
          in_use.erase(it->second);
          it = release_at.erase(it);
        } else {
          ++it;
        }
      }
      int digit = 1;
      while (in_use.count(digit)) ++digit;
      if (digit > 99) throw std::runtime_error("ring closure digits exhausted");
      in_use.insert(digit);
      release_at.emplace_back(close_last, digit);
      const int open_atom = output_pos[c.open_atom] <= output_pos[c.close_atom]
                                ? c.open_atom
                                : c.close_atom;
      const int close_atom = open_atom == c.open_atom ? c.close_atom : c.open_atom;
      digit_uses[open_atom].push_back({digit, c.bond, false});
      digit_uses[close_atom].push_back({digit, c.bond, true});
      close_digit[c.bond] = digit;
    }
  }

  auto digit_text = [](int d) {
    return d < 10 ? std::to_string(d) : "%" + std::to_string(d);
  };

  // Pass 2: emit with an explicit stack of text fragments.
  std::string out;
  struct EmitItem {
    int atom;
    int bond_from_parent;  // -1 for root
    bool close_paren;
  };
  std::vector<EmitItem> stack{{root, -1, false}};
  while (!stack.empty()) {
    const EmitItem item = stack.back();
    stack.pop_back();
    if (item.atom < 0) {
      out += ')';
      continue;
    }
    if (item.bond_from_parent >= 0) {
      if (item.close_paren) out += '(';
      out += bond_token(g, g.bonds[item.bond_from_parent]);
    }
    out += atom_token(g, item.atom);
    for (const DigitUse& use : digit_uses[item.atom]) {
      if (use.closing) out += bond_token(g, g.bonds[use.bond]);
      out += digit_text(use.digit);
    }
    const auto& ch = children[item.atom];
    // Push children in reverse so the first child is emitted next; all but
    // the last child are parenthesized.
    for (std::size_t k = ch.size(); k-- > 0;) {
      const bool parenthesize = k + 1 < ch.size();
      if (parenthesize) stack.push_back({-1, -1, false});  // ')' marker
      stack.push_back({ch[k].first, ch[k].second, parenthesize});
    }
  }
  return out;
}

}  // namespace

std::string canonicalize(const MoleculeGraph& g) {
  const std::vector<int> ranks = canonical_ranks(g);
  const int n = g.atom_count();

  // Component id per atom.
  std::vector<int> comp(n, -1);
  int n_comp = 0;
  for (int i = 0; i < n; ++i) {
    if (comp[i] != -1) continue;
    std::vector<int> stack{i};
    comp[i] = n_comp;
    while (!stack.empty()) {
      const int a = stack.back();
      stack.pop_back();
      for (const auto& [nbr, bidx] : g.adjacency[a]) {
        (void)bidx;
        if (comp[nbr] == -1) {
          comp[nbr] = n_comp;
          stack.push_back(nbr);
        }
      }
    }
    ++n_comp;
  }

  std::vector<int> root(n_comp, -1);
  for (int i = 0; i < n; ++i) {
    int& r = root[comp[i]];
    if (r == -1 || ranks[i] < ranks[r]) r = i;
  }
  std::vector<std::string> parts;
  parts.reserve(n_comp);
  for (int c = 0; c < n_comp; ++c) {
    parts.push_back(render_component(g, ranks, root[c]));
  }
  std::sort(parts.begin(), parts.end());
  std::string out;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (k) out += '.';
    out += parts[k];
  }
  return out;
}

std::string canonical_smiles(std::string_view s) {
  return canonicalize(parse_smiles(s));
}

Scaffold extract_scaffold(const MoleculeGraph& g) {
  const int n = g.atom_count();
  std::vector<bool> alive(n, true);
  std::vector<int> degree(n);
  for (int i = 0; i < n; ++i) degree[i] = g.degree(i);

  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < n; ++i) {
      if (alive[i] && !g.ring_membership[i] && degree[i] <= 1) {
        alive[i] = false;
        changed = true;
        for (const auto& [nbr, bidx] : g.adjacency[i]) {
          (void)bidx;
          if (alive[nbr]) --degree[nbr];
        }
      }
    }
  }

  std::vector<int> new_index(n, -1);
  MoleculeGraph sub;
  for (int i = 0; i < n; ++i) {
    if (!alive[i]) continue;
    new_index[i] = sub.atom_count();
    SmilesAtom a = g.atoms[i];
    // Re-saturate bonds lost to pruning.
    a.hydrogens += g.degree(i) - degree[i];
    sub.atoms.push_back(a);
  }
  if (sub.atoms.empty()) return Scaffold{true, ""};
  for (const SmilesBond& b : g.bonds) {
    if (alive[b.a] && alive[b.b]) {
      sub.bonds.push_back({new_index[b.a], new_index[b.b], b.order});
    }
  }
  rebuild_adjacency(sub);
  compute_ring_membership(sub);
  return Scaffold{false, canonicalize(sub)};
}

std::vector<MoleculeGraph> connected_components(const MoleculeGraph& g) {
  const int n = g.atom_count();
  std::vector<int> comp(n, -1);
  int n_comp = 0;
  for (int i = 0; i < n; ++i) {
    if (comp[i] != -1) continue;
    std::vector<int> stack{i};
    comp[i] = n_comp;
    while (!stack.empty()) {
      const int a = stack.back();
      stack.pop_back();
      for (const auto& [nbr, bidx] : g.adjacency[a]) {
        (void)bidx;
        if (comp[nbr] == -1) {
          comp[nbr] = n_comp;
          stack.push_back(nbr);
        }
      }
    }
    ++n_comp;
  }
  std::vector<MoleculeGraph> out(n_comp);
  std::vector<int> new_index(n, -1);
  for (int i = 0; i < n; ++i) {
    new_index[i] = out[comp[i]].atom_count();
    out[comp[i]].atoms.push_back(g.atoms[i]);
  }
  for (const SmilesBond& b : g.bonds) {
    out[comp[b.a]].bonds.push_back(
        {new_index[b.a], new_index[b.b], b.order});
  }
  for (auto& sub : out) {
    rebuild_adjacency(sub);
    compute_ring_membership(sub);
  }
  return out;
}

}  // namespace chemdyn
