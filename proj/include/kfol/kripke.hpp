// Finite Kripke models, direct modal evaluation, and lasso-word LTL evaluation.
// These evaluators work straight from the truth conditions and serve as the
// reference semantics for everything built on the first-order translation.
#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "kfol/modal.hpp"

namespace kfol {

using World = int;

struct KripkeModel {
  int worlds = 1;
  World real_world = 0;
  // Accessibility per agent label ("" = default modality).
  std::map<std::string, std::set<std::pair<World, World>>> relations;
  std::map<std::string, std::set<World>> valuation;
  std::optional<std::vector<World>> successor;

  bool accessible(const std::string& index, World from, World to) const {
    auto it = relations.find(index);
    return it != relations.end() && it->second.count({from, to}) > 0;
  }
  bool holds(const std::string& atom, World w) const {
    auto it = valuation.find(atom);
    return it != valuation.end() && it->second.count(w) > 0;
  }

  // Throws if any component refers to a world outside {0..worlds-1}.
  void validate() const {
    auto in = [this](World w) { return w >= 0 && w < worlds; };
    if (worlds < 1) throw Error("Kripke model needs at least one world");
    if (!in(real_world)) throw Error("real world out of range");
    for (const auto& [idx, rel] : relations)
      for (auto [a, b] : rel)
        if (!in(a) || !in(b)) throw Error("relation pair out of range");
    for (const auto& [p, ws] : valuation)
      for (World w : ws)
        if (!in(w)) throw Error("valuation of '" + p + "' out of range");
    if (successor) {
      if (static_cast<int>(successor->size()) != worlds) throw Error("successor table not total");
      for (World w : *successor)
        if (!in(w)) throw Error("successor out of range");
    }
  }

  friend bool operator==(const KripkeModel&, const KripkeModel&) = default;
};

// Kripke satisfaction of `f` at world `w`. Formulas must not contain Next.
inline bool eval_modal(const Modal& f, const KripkeModel& m, World w) {
  switch (f.op()) {
    case ModalOp::Atom:
      return m.holds(f.name(), w);
    case ModalOp::True:
      return true;
    case ModalOp::False:
      return false;
    case ModalOp::Not:
      return !eval_modal(f.child(), m, w);
    case ModalOp::And:
      return eval_modal(f.lhs(), m, w) && eval_modal(f.rhs(), m, w);
    case ModalOp::Or:
      return eval_modal(f.lhs(), m, w) || eval_modal(f.rhs(), m, w);
    case ModalOp::Imp:
      return !eval_modal(f.lhs(), m, w) || eval_modal(f.rhs(), m, w);
    case ModalOp::Iff:
      return eval_modal(f.lhs(), m, w) == eval_modal(f.rhs(), m, w);
    case ModalOp::Box:
    case ModalOp::Dia: {
      auto it = m.relations.find(f.index());
      if (it == m.relations.end())
        throw Error("no accessibility relation for modality '" + f.index() + "'");
      bool box = f.op() == ModalOp::Box;
      for (World v = 0; v < m.worlds; ++v) {
        if (!it->second.count({w, v})) continue;
        bool sub = eval_modal(f.child(), m, v);
        if (box && !sub) return false;
        if (!box && sub) return true;
      }
      return box;
    }
    case ModalOp::Next:
      throw Error("next-time operator in a modal (non-temporal) evaluation");
  }
  return false;
}

// ---------------------------------------------------------------------------
// Frame property testers over a single relation.

using Relation = std::set<std::pair<World, World>>;

inline bool is_reflexive(const Relation& r, int n) {
  for (World x = 0; x < n; ++x)
    if (!r.count({x, x})) return false;
  return true;
}
inline bool is_serial(const Relation& r, int n) {
  for (World x = 0; x < n; ++x) {
    bool any = false;
    for (World y = 0; y < n && !any; ++y) any = r.count({x, y}) > 0;
    if (!any) return false;
  }
  return true;
}
inline bool is_symmetric(const Relation& r, int /*n*/) {
  for (auto [x, y] : r)
    if (!r.count({y, x})) return false;
  return true;
}
inline bool is_transitive(const Relation& r, int /*n*/) {
  for (auto [x, y] : r)
    for (auto [y2, z] : r)
      if (y == y2 && !r.count({x, z})) return false;
  return true;
}
inline bool is_euclidean(const Relation& r, int /*n*/) {
  for (auto [x, y] : r)
    for (auto [x2, z] : r)
      if (x == x2 && !r.count({y, z})) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Lasso words: prefix followed by a loop repeated forever.

using Letter = std::set<std::string>;

struct LassoWord {
  std::vector<Letter> prefix;
  std::vector<Letter> loop;
  friend bool operator==(const LassoWord&, const LassoWord&) = default;
};

namespace detail {

// Truth table of `f` over positions 0..L-1 of the folded lasso.
inline std::vector<char> eval_lasso_positions(const Modal& f, const LassoWord& word) {
  const int P = static_cast<int>(word.prefix.size());
  const int L = P + static_cast<int>(word.loop.size());
  auto letter = [&](int i) -> const Letter& { return i < P ? word.prefix[i] : word.loop[i - P]; };
  auto next = [&](int i) { return i + 1 < L ? i + 1 : P; };
  std::vector<char> out(L);
  switch (f.op()) {
    case ModalOp::Atom:
      for (int i = 0; i < L; ++i) out[i] = letter(i).count(f.name()) > 0;
      return out;
    case ModalOp::True:
    case ModalOp::False:
      std::fill(out.begin(), out.end(), f.op() == ModalOp::True);
      return out;
    case ModalOp::Box:
    case ModalOp::Dia:
      if (!f.index().empty()) throw Error("indexed modality in a temporal formula");
      [[fallthrough]];
    case ModalOp::Not:
    case ModalOp::Next: {
      auto sub = eval_lasso_positions(f.child(), word);
      if (f.op() == ModalOp::Not) {
        for (int i = 0; i < L; ++i) out[i] = !sub[i];
      } else if (f.op() == ModalOp::Next) {
        for (int i = 0; i < L; ++i) out[i] = sub[next(i)];
      } else {
        // Positions reachable from i are i..L-1, plus the whole loop.
        bool box = f.op() == ModalOp::Box;
        bool loop_acc = box;
        for (int i = P; i < L; ++i) loop_acc = box ? (loop_acc && sub[i]) : (loop_acc || sub[i]);
        for (int i = P; i < L; ++i) out[i] = loop_acc;
        bool acc = loop_acc;
        for (int i = P - 1; i >= 0; --i) {
          acc = box ? (acc && sub[i]) : (acc || sub[i]);
          out[i] = acc;
        }
      }
      return out;
    }
    default: {
      auto a = eval_lasso_positions(f.lhs(), word);
      auto b = eval_lasso_positions(f.rhs(), word);
      for (int i = 0; i < L; ++i) {
        switch (f.op()) {
          case ModalOp::And:
            out[i] = a[i] && b[i];
            break;
          case ModalOp::Or:
            out[i] = a[i] || b[i];
            break;
          case ModalOp::Imp:
            out[i] = !a[i] || b[i];
            break;
          default:
            out[i] = a[i] == b[i];
            break;
        }
      }
      return out;
    }
  }
}

}  // namespace detail

// Truth of `f` at position 0 of the ultimately periodic word, reading box/dia
// as "all/some positions from now on" and X as "next position".
inline bool eval_ltl_lasso(const Modal& f, const LassoWord& word) {
  if (word.loop.empty()) throw Error("lasso word has an empty loop");
  return detail::eval_lasso_positions(f, word)[0] != 0;
}

// Word obtained by dropping the first position.
inline LassoWord shift(const LassoWord& w) {
  if (!w.prefix.empty()) return {std::vector<Letter>(w.prefix.begin() + 1, w.prefix.end()), w.loop};
  std::vector<Letter> loop(w.loop.begin() + 1, w.loop.end());
  loop.push_back(w.loop.front());
  return {{}, loop};
}

// ---------------------------------------------------------------------------
// Text format:
//   worlds N real W
//   R i j | R_a i j
//   V p i
//   S i j

inline std::string print_kripke(const KripkeModel& m) {
  std::ostringstream os;
  os << "worlds " << m.worlds << " real " << m.real_world << '\n';
  for (const auto& [idx, rel] : m.relations)
    for (auto [a, b] : rel) os << (idx.empty() ? "R" : "R_" + idx) << ' ' << a << ' ' << b << '\n';
  for (const auto& [p, ws] : m.valuation)
    for (World w : ws) os << "V " << p << ' ' << w << '\n';
  if (m.successor)
    for (World w = 0; w < m.worlds; ++w) os << "S " << w << ' ' << (*m.successor)[w] << '\n';
  return os.str();
}

inline KripkeModel parse_kripke(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  KripkeModel m;
  bool header = false;
  int lineno = 0;
  std::vector<World> succ;
  std::vector<char> succ_set;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    auto bad = [&](const std::string& why) -> Error {
      return Error("model line " + std::to_string(lineno) + ": " + why);
    };
    if (!header) {
      std::string real_kw;
      if (tag != "worlds" || !(ls >> m.worlds >> real_kw >> m.real_world) || real_kw != "real")
        throw bad("expected header 'worlds N real W'");
      header = true;
      m.relations[""];
      succ.assign(m.worlds, -1);
      succ_set.assign(m.worlds, 0);
      continue;
    }
    if (tag == "R" || tag.rfind("R_", 0) == 0) {
      World a, b;
      if (!(ls >> a >> b)) throw bad("expected 'R i j'");
      m.relations[tag == "R" ? "" : tag.substr(2)].insert({a, b});
    } else if (tag == "V") {
      std::string p;
      World w;
      if (!(ls >> p >> w)) throw bad("expected 'V p i'");
      m.valuation[p].insert(w);
    } else if (tag == "S") {
      World a, b;
      if (!(ls >> a >> b) || a < 0 || a >= m.worlds) throw bad("expected 'S i j'");
      succ[a] = b;
      succ_set[a] = 1;
    } else {
      throw bad("unknown line tag '" + tag + "'");
    }
  }
  if (!header) throw Error("empty model text");
  if (std::any_of(succ_set.begin(), succ_set.end(), [](char c) { return c != 0; })) {
    if (std::count(succ_set.begin(), succ_set.end(), 0) > 0) throw Error("successor table not total");
    m.successor = succ;
  }
  m.validate();
  return m;
}

}  // namespace kfol
