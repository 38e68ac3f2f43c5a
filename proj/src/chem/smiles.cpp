#include "ddikit/chem/smiles.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>

namespace ddikit::chem {

namespace {

bool is_vocab_element(const std::string& sym) {
  return std::find_if(kElementVocab.begin(), kElementVocab.end(),
                      [&](const char* e) { return sym == e; }) != kElementVocab.end();
}

bool is_aromatic_symbol(char c) {
  return c == 'b' || c == 'c' || c == 'n' || c == 'o' || c == 'p' || c == 's';
}

struct PendingBond {
  BondOrder order = BondOrder::Single;
  bool explicit_symbol = false;
};

struct RingOpening {
  int atom = -1;
  std::optional<BondOrder> bond;
  std::size_t position = 0;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  MolecularGraph run() {
    if (text_.empty()) throw SmilesError("empty SMILES", 0);
    while (pos_ < text_.size()) step();
    finish();
    return std::move(graph_);
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw SmilesError(msg, pos_); }

  char peek() const { return text_[pos_]; }

  void step() {
    const char c = peek();
    if (c == '.') fail("multi-fragment input (dot) is not supported");
    if (c == '(') {
      if (prev_atom_ < 0) fail("branch opened before any atom");
      if (pending_) fail("bond symbol before a branch opening");
      branch_stack_.push_back(prev_atom_);
      ++pos_;
      return;
    }
    if (c == ')') {
      if (branch_stack_.empty()) fail("unbalanced parentheses: ')' without '('");
      if (pending_) fail("dangling bond symbol before ')'");
      prev_atom_ = branch_stack_.back();
      branch_stack_.pop_back();
      ++pos_;
      return;
    }
    if (c == '-' || c == '=' || c == '#' || c == ':' || c == '/' || c == '\\') {
      if (pending_) fail("two bond symbols in a row");
      PendingBond p;
      p.explicit_symbol = true;
      switch (c) {
        case '=':
          p.order = BondOrder::Double;
          break;
        case '#':
          p.order = BondOrder::Triple;
          break;
        case ':':
          p.order = BondOrder::Aromatic;
          break;
        default:
          p.order = BondOrder::Single;  // '-', '/' and '\' (stereo ignored)
          break;
      }
      pending_ = p;
      ++pos_;
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      ring_event(c - '0');
      ++pos_;
      return;
    }
    if (c == '%') {
      if (pos_ + 2 >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])) ||
          !std::isdigit(static_cast<unsigned char>(text_[pos_ + 2]))) {
        fail("'%' ring closure needs two digits");
      }
      ring_event((text_[pos_ + 1] - '0') * 10 + (text_[pos_ + 2] - '0'));
      pos_ += 3;
      return;
    }
    if (c == '[') {
      bracket_atom();
      return;
    }
    if (std::isupper(static_cast<unsigned char>(c)) || is_aromatic_symbol(c)) {
      plain_atom();
      return;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  void plain_atom() {
    const std::size_t start = pos_;
    const char c = peek();
    std::string sym(1, c);
    bool aromatic = false;
    if (is_aromatic_symbol(c)) {
      aromatic = true;
      sym[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      ++pos_;
    } else {
      // Two-letter symbols first (Cl, Br).
      if (pos_ + 1 < text_.size() && std::islower(static_cast<unsigned char>(text_[pos_ + 1]))) {
        const std::string two = text_.substr(pos_, 2);
        if (is_vocab_element(two)) {
          sym = two;
          pos_ += 2;
        } else {
          ++pos_;
        }
      } else {
        ++pos_;
      }
    }
    if (!is_vocab_element(sym)) {
      pos_ = start;
      fail("unknown atom symbol '" + sym + "'");
    }
    add_atom(sym, aromatic, 0, false, start);
  }

  void bracket_atom() {
    const std::size_t start = pos_;
    ++pos_;  // '['
    if (pos_ >= text_.size()) fail("unterminated bracket atom");
    if (std::isdigit(static_cast<unsigned char>(peek()))) fail("isotopes are not supported");

    std::string sym;
    bool aromatic = false;
    const char c = peek();
    if (is_aromatic_symbol(c)) {
      aromatic = true;
      sym = std::string(1, static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
      ++pos_;
    } else if (std::isupper(static_cast<unsigned char>(c))) {
      sym = std::string(1, c);
      ++pos_;
      if (pos_ < text_.size() && std::islower(static_cast<unsigned char>(peek())) &&
          is_vocab_element(sym + peek())) {
        sym += peek();
        ++pos_;
      }
    } else {
      fail("expected an element symbol in bracket atom");
    }
    if (!is_vocab_element(sym)) fail("unknown atom symbol '" + sym + "'");

    // Chirality tags are accepted and ignored.
    while (pos_ < text_.size() && peek() == '@') ++pos_;

    // Explicit hydrogen count, ignored (hydrogens stay implicit).
    if (pos_ < text_.size() && peek() == 'H') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    }

    int charge = 0;
    if (pos_ < text_.size() && (peek() == '+' || peek() == '-')) {
      const int sign = peek() == '+' ? 1 : -1;
      ++pos_;
      int magnitude = 1;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(peek()))) {
        magnitude = peek() - '0';
        ++pos_;
      } else {
        while (pos_ < text_.size() && peek() == (sign > 0 ? '+' : '-')) {
          ++magnitude;
          ++pos_;
        }
      }
      charge = sign * magnitude;
    }

    if (pos_ >= text_.size() || peek() != ']') fail("expected ']' to close bracket atom");
    ++pos_;
    add_atom(sym, aromatic, charge, true, start);
  }

  void add_atom(const std::string& sym, bool aromatic, int charge, bool bracket,
                std::size_t position) {
    AtomRecord atom;
    atom.element = sym;
    atom.aromatic = aromatic;
    atom.formal_charge = charge;
    atom.from_bracket = bracket;
    graph_.atoms.push_back(atom);
    atom_positions_.push_back(position);
    const int idx = graph_.atom_count() - 1;
    if (prev_atom_ >= 0) {
      add_bond(prev_atom_, idx, take_pending(prev_atom_, idx), position);
    } else if (pending_) {
      fail("bond symbol before any atom");
    }
    prev_atom_ = idx;
  }

  BondOrder take_pending(int u, int v) {
    BondOrder order;
    if (pending_ && pending_->explicit_symbol) {
      order = pending_->order;
    } else {
      order = (graph_.atoms[u].aromatic && graph_.atoms[v].aromatic) ? BondOrder::Aromatic
                                                                     : BondOrder::Single;
    }
    pending_.reset();
    return order;
  }

  void ring_event(int digit) {
    if (prev_atom_ < 0) fail("ring-closure digit before any atom");
    auto it = open_rings_.find(digit);
    if (it == open_rings_.end()) {
      RingOpening opening;
      opening.atom = prev_atom_;
      opening.position = pos_;
      if (pending_) {
        opening.bond = pending_->explicit_symbol ? std::optional<BondOrder>(pending_->order)
                                                 : std::nullopt;
        pending_.reset();
      }
      open_rings_.emplace(digit, opening);
      return;
    }
    const RingOpening opening = it->second;
    open_rings_.erase(it);
    if (opening.atom == prev_atom_) fail("ring closure bonds an atom to itself");

    std::optional<BondOrder> close_bond;
    if (pending_) {
      if (pending_->explicit_symbol) close_bond = pending_->order;
      pending_.reset();
    }
    if (opening.bond && close_bond && *opening.bond != *close_bond) {
      fail("ring-closure bond symbols disagree");
    }
    BondOrder order;
    if (opening.bond) {
      order = *opening.bond;
    } else if (close_bond) {
      order = *close_bond;
    } else {
      order = (graph_.atoms[opening.atom].aromatic && graph_.atoms[prev_atom_].aromatic)
                  ? BondOrder::Aromatic
                  : BondOrder::Single;
    }
    add_bond(opening.atom, prev_atom_, order, pos_);
  }

  void add_bond(int u, int v, BondOrder order, std::size_t position) {
    for (const Bond& b : graph_.bonds) {
      if ((b.u == u && b.v == v) || (b.u == v && b.v == u)) {
        throw SmilesError("duplicate bond between atoms " + std::to_string(u) + " and " +
                              std::to_string(v),
                          position);
      }
    }
    Bond bond;
    bond.u = u;
    bond.v = v;
    bond.record.order = order;
    graph_.bonds.push_back(bond);
  }

  void finish() {
    if (!branch_stack_.empty()) {
      throw SmilesError("unbalanced parentheses: unclosed '('", text_.size());
    }
    if (!open_rings_.empty()) {
      const auto& [digit, opening] = *open_rings_.begin();
      throw SmilesError("unmatched ring-closure digit " + std::to_string(digit),
                        opening.position);
    }
    if (pending_) throw SmilesError("dangling bond symbol at end of input", text_.size());
    if (graph_.atoms.empty()) throw SmilesError("no atoms in input", 0);

    for (const Bond& b : graph_.bonds) {
      ++graph_.atoms[b.u].degree;
      ++graph_.atoms[b.v].degree;
    }
    mark_rings();
    validate_aromaticity();
    assign_hybridization();
  }

  // A bond lies on a cycle iff it is not a bridge.
  void mark_rings() {
    const int n = graph_.atom_count();
    std::vector<std::vector<std::pair<int, int>>> adj(n);  // (neighbour, bond id)
    for (int i = 0; i < graph_.bond_count(); ++i) {
      adj[graph_.bonds[i].u].emplace_back(graph_.bonds[i].v, i);
      adj[graph_.bonds[i].v].emplace_back(graph_.bonds[i].u, i);
    }
    std::vector<int> disc(n, -1), low(n, 0);
    int timer = 0;
    // Iterative Tarjan bridge finding.
    struct Frame {
      int node;
      int parent_edge;
      std::size_t next = 0;
    };
    for (int root = 0; root < n; ++root) {
      if (disc[root] != -1) continue;
      std::vector<Frame> stack{{root, -1}};
      disc[root] = low[root] = timer++;
      while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.next < adj[f.node].size()) {
          const auto [to, edge] = adj[f.node][f.next++];
          if (edge == f.parent_edge) continue;
          if (disc[to] == -1) {
            disc[to] = low[to] = timer++;
            stack.push_back({to, edge});
          } else {
            // Non-tree edge: closes a cycle through the tree path.
            graph_.bonds[edge].record.in_ring = true;
            low[f.node] = std::min(low[f.node], disc[to]);
          }
        } else {
          if (f.parent_edge >= 0) {
            const Bond& b = graph_.bonds[f.parent_edge];
            const int parent = f.node == b.u ? b.v : b.u;
            low[parent] = std::min(low[parent], low[f.node]);
            graph_.bonds[f.parent_edge].record.in_ring = low[f.node] < disc[f.node];
          }
          stack.pop_back();
        }
      }
    }
  }

  void validate_aromaticity() {
    for (std::size_t i = 0; i < graph_.bonds.size(); ++i) {
      const Bond& b = graph_.bonds[i];
      if (b.record.order == BondOrder::Aromatic &&
          !(graph_.atoms[b.u].aromatic && graph_.atoms[b.v].aromatic)) {
        throw SmilesError("aromatic bond between non-aromatic atoms",
                          atom_positions_[static_cast<std::size_t>(b.v)]);
      }
    }
    for (int a = 0; a < graph_.atom_count(); ++a) {
      if (!graph_.atoms[a].aromatic) continue;
      bool in_ring = false;
      for (const Bond& b : graph_.bonds) {
        if ((b.u == a || b.v == a) && b.record.in_ring) {
          in_ring = true;
          break;
        }
      }
      if (!in_ring) {
        throw SmilesError("aromatic atom outside any ring",
                          atom_positions_[static_cast<std::size_t>(a)]);
      }
    }
  }

  // Heuristic classes; charged bracket atoms are classed as Other.
  void assign_hybridization() {
    for (int a = 0; a < graph_.atom_count(); ++a) {
      AtomRecord& atom = graph_.atoms[a];
      bool has_double = false, has_triple = false;
      for (const Bond& b : graph_.bonds) {
        if (b.u != a && b.v != a) continue;
        has_double = has_double || b.record.order == BondOrder::Double;
        has_triple = has_triple || b.record.order == BondOrder::Triple;
      }
      if (atom.from_bracket && atom.formal_charge != 0) {
        atom.hybridization = Hybridization::Other;
      } else if (has_triple) {
        atom.hybridization = Hybridization::Sp;
      } else if (atom.aromatic || has_double) {
        atom.hybridization = Hybridization::Sp2;
      } else {
        atom.hybridization = Hybridization::Sp3;
      }
    }
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  MolecularGraph graph_;
  std::vector<std::size_t> atom_positions_;
  int prev_atom_ = -1;
  std::vector<int> branch_stack_;
  std::optional<PendingBond> pending_;
  std::map<int, RingOpening> open_rings_;
};

}  // namespace

MolecularGraph parse_smiles(const std::string& text) { return Parser(text).run(); }

std::vector<std::vector<int>> MolecularGraph::adjacency() const {
  std::vector<std::vector<int>> adj(atoms.size());
  for (const Bond& b : bonds) {
    adj[b.u].push_back(b.v);
    adj[b.v].push_back(b.u);
  }
  return adj;
}

}  // namespace ddikit::chem
