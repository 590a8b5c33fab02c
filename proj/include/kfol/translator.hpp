// Relational translation of modal and next-time formulas into first-order
// logic, frame axioms for the normal systems built from D, T, B, 4 and 5, and
// assembly of validity / countermodel problems.
#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "kfol/fol.hpp"
#include "kfol/kripke.hpp"
#include "kfol/modal.hpp"

namespace kfol {

enum class Schema : unsigned { D = 1, T = 2, B = 4, Four = 8, Five = 16 };

class SchemaSet {
 public:
  constexpr SchemaSet() = default;
  constexpr SchemaSet(std::initializer_list<Schema> xs) {
    for (Schema s : xs) bits_ |= static_cast<unsigned>(s);
  }
  static constexpr SchemaSet from_bits(unsigned b) {
    SchemaSet s;
    s.bits_ = b & 31u;
    return s;
  }

  // Accepts strings such as "D45", "KT4", "TB" (a leading K is ignored).
  static SchemaSet parse(const std::string& text) {
    SchemaSet s;
    std::size_t i = 0;
    if (!text.empty() && (text[0] == 'K' || text[0] == 'k')) i = 1;
    for (; i < text.size(); ++i) {
      switch (std::toupper(static_cast<unsigned char>(text[i]))) {
        case 'D':
          s.add(Schema::D);
          break;
        case 'T':
          s.add(Schema::T);
          break;
        case 'B':
          s.add(Schema::B);
          break;
        case '4':
          s.add(Schema::Four);
          break;
        case '5':
          s.add(Schema::Five);
          break;
        default:
          throw Error("unknown axiom schema '" + std::string(1, text[i]) + "' in '" + text + "'");
      }
    }
    return s;
  }

  constexpr bool has(Schema s) const noexcept { return (bits_ & static_cast<unsigned>(s)) != 0; }
  constexpr void add(Schema s) noexcept { bits_ |= static_cast<unsigned>(s); }
  constexpr unsigned bits() const noexcept { return bits_; }
  constexpr bool empty() const noexcept { return bits_ == 0; }

  // Schema letters in D T B 4 5 order.
  std::string letters() const {
    std::string s;
    if (has(Schema::D)) s += 'D';
    if (has(Schema::T)) s += 'T';
    if (has(Schema::B)) s += 'B';
    if (has(Schema::Four)) s += '4';
    if (has(Schema::Five)) s += '5';
    return s;
  }

  // Closure under the standard inclusions between the schemas over Kripke
  // frames, so that equivalent axiomatizations get the same representative.
  SchemaSet closure() const {
    SchemaSet s = *this;
    for (bool changed = true; changed;) {
      unsigned before = s.bits_;
      if (s.has(Schema::T)) s.add(Schema::D);
      if (s.has(Schema::B) && s.has(Schema::Four)) s.add(Schema::Five);
      if (s.has(Schema::B) && s.has(Schema::Five)) s.add(Schema::Four);
      if (s.has(Schema::T) && s.has(Schema::Five)) {
        s.add(Schema::B);
        s.add(Schema::Four);
      }
      if (s.has(Schema::D) && s.has(Schema::B) && s.has(Schema::Four)) s.add(Schema::T);
      changed = s.bits_ != before;
    }
    return s;
  }

  friend constexpr bool operator==(SchemaSet, SchemaSet) = default;

 private:
  unsigned bits_ = 0;
};

// The fifteen distinct normal systems, as (canonical name, closed schema set).
inline const std::vector<std::pair<std::string, SchemaSet>>& canonical_systems() {
  static const std::vector<std::pair<std::string, SchemaSet>> systems = [] {
    const std::vector<std::string> names = {"K",   "KD",  "KT",   "KB",  "K4",  "K5",  "KD4", "KD5",
                                            "K45", "KD45", "KDB", "KTB", "KT4", "KB4", "KT5"};
    std::vector<std::pair<std::string, SchemaSet>> out;
    for (const auto& n : names) out.emplace_back(n, SchemaSet::parse(n).closure());
    return out;
  }();
  return systems;
}

inline std::string canonical_name(SchemaSet s) {
  auto closed = s.closure();
  for (const auto& [name, set] : canonical_systems())
    if (set == closed) return name;
  return "K" + s.letters();
}

struct ModalSystem {
  std::string name = "K";
  SchemaSet schemas;
  // Per-agent schema overrides; agents without an entry use `schemas`.
  std::map<std::string, SchemaSet> overrides;

  SchemaSet schemas_for(const std::string& index) const {
    auto it = overrides.find(index);
    return it == overrides.end() ? schemas : it->second;
  }

  static ModalSystem from_schemas(SchemaSet s) { return {canonical_name(s), s, {}}; }

  // Canonical names (K, KD45, KT4, ...) and the aliases S4, S5 and B.
  static ModalSystem named(const std::string& name) {
    std::string upper;
    for (char c : name) upper += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (upper == "S4") return {"S4", SchemaSet{Schema::T, Schema::Four}, {}};
    if (upper == "S5") return {"S5", SchemaSet{Schema::T, Schema::Five}, {}};
    if (upper == "B") return {"KTB", SchemaSet{Schema::T, Schema::B}, {}};
    if (upper.empty() || upper[0] != 'K') throw Error("unknown modal system '" + name + "'");
    SchemaSet s = SchemaSet::parse(upper);
    return {upper, s, {}};
  }
};

// ---------------------------------------------------------------------------
// Translation

inline std::string relation_symbol(const std::string& index) {
  return index.empty() ? "R" : "R_" + index;
}

inline constexpr const char* kSuccessorSymbol = "S";
inline constexpr const char* kRealWorld = "w0";

// The first-order reading of a Kripke model: one element per world, R / R_i
// for the relations, a unary predicate per atom, w0 for the real world and S
// for the successor table when present.
inline FiniteStructure kripke_structure(const KripkeModel& k, const std::set<std::string>& atoms,
                                        const std::set<std::string>& indices) {
  FiniteStructure m;
  m.size = k.worlds;
  for (const auto& idx : indices) {
    m.add_predicate(relation_symbol(idx), 2);
    for (int a = 0; a < k.worlds; ++a)
      for (int b = 0; b < k.worlds; ++b)
        if (k.accessible(idx, a, b)) m.set_pred(relation_symbol(idx), {a, b}, true);
  }
  for (const auto& p : atoms) {
    m.add_predicate(p, 1);
    for (int w = 0; w < k.worlds; ++w)
      if (k.holds(p, w)) m.set_pred(p, {w}, true);
  }
  m.add_function(kRealWorld, 0);
  m.set_func(kRealWorld, {}, k.real_world);
  if (k.successor) {
    m.add_function(kSuccessorSymbol, 1);
    for (int w = 0; w < k.worlds; ++w) m.set_func(kSuccessorSymbol, {w}, (*k.successor)[w]);
  }
  return m;
}

// Stateful so that every modality introduces a world variable fresh for the
// whole translation.
class Translator {
 public:
  // Allows the next-time operator, translated as Tr(X f, w) = Tr(f, S(w)).
  bool temporal = false;

  Fol translate(const Modal& f, const Term& w) {
    switch (f.op()) {
      case ModalOp::Atom:
        return Fol::pred(f.name(), {w});
      case ModalOp::True:
        return Fol::top();
      case ModalOp::False:
        return Fol::bottom();
      case ModalOp::Not:
        return Fol::neg(translate(f.child(), w));
      case ModalOp::And:
        return Fol::conj(translate(f.lhs(), w), translate(f.rhs(), w));
      case ModalOp::Or:
        return Fol::disj(translate(f.lhs(), w), translate(f.rhs(), w));
      case ModalOp::Imp:
        return Fol::imp(translate(f.lhs(), w), translate(f.rhs(), w));
      case ModalOp::Iff:
        return Fol::iff(translate(f.lhs(), w), translate(f.rhs(), w));
      case ModalOp::Box: {
        std::string v = fresh();
        Fol acc = Fol::pred(relation_symbol(f.index()), {w, Term::var(v)});
        return Fol::forall(v, Fol::imp(acc, translate(f.child(), Term::var(v))));
      }
      case ModalOp::Dia: {
        std::string v = fresh();
        Fol acc = Fol::pred(relation_symbol(f.index()), {w, Term::var(v)});
        return Fol::exists(v, Fol::conj(acc, translate(f.child(), Term::var(v))));
      }
      case ModalOp::Next:
        if (!temporal) throw Error("next-time operator in a modal-system translation");
        return translate(f.child(), Term::fn(kSuccessorSymbol, {w}));
    }
    return Fol::top();
  }

  std::string fresh() { return "v" + std::to_string(++counter_); }

 private:
  int counter_ = 0;
};

inline Fol translate(const Modal& f, const Term& w) {
  Translator tr;
  return tr.translate(f, w);
}

// First-order frame conditions for one relation symbol.
inline std::vector<Fol> frame_axioms_for(const std::string& rel, SchemaSet s) {
  auto R = [&rel](const char* a, const char* b) { return Fol::pred(rel, {Term::var(a), Term::var(b)}); };
  std::vector<Fol> out;
  if (s.has(Schema::D)) out.push_back(Fol::forall("x", Fol::exists("y", R("x", "y"))));
  if (s.has(Schema::T)) out.push_back(Fol::forall("x", R("x", "x")));
  if (s.has(Schema::B))
    out.push_back(Fol::forall("x", Fol::forall("y", Fol::imp(R("x", "y"), R("y", "x")))));
  if (s.has(Schema::Four))
    out.push_back(Fol::forall(
        "x", Fol::forall("y", Fol::forall("z", Fol::imp(Fol::conj(R("x", "y"), R("y", "z")), R("x", "z"))))));
  if (s.has(Schema::Five))
    out.push_back(Fol::forall(
        "x", Fol::forall("y", Fol::forall("z", Fol::imp(Fol::conj(R("x", "y"), R("x", "z")), R("y", "z"))))));
  return out;
}

// Ax(S) over the given agent labels ("" = default modality).
inline std::vector<Fol> frame_axioms(const ModalSystem& sys, const std::set<std::string>& indices = {""}) {
  std::vector<Fol> out;
  for (const auto& idx : indices) {
    auto ax = frame_axioms_for(relation_symbol(idx), sys.schemas_for(idx));
    out.insert(out.end(), ax.begin(), ax.end());
  }
  return out;
}

struct TranslationProblem {
  Modal goal;
  ModalSystem system;
  bool temporal = false;
  std::set<std::string> indices;
  std::set<std::string> atoms;
  std::vector<Fol> axioms;
  // Ax(S) -> forall w Tr(goal, w). For temporal problems the goal is
  // negated: the formula is valid iff the goal is unsatisfiable.
  Fol validity_formula;
  // Ax(S) & Tr(~goal, w0) for modal problems, Ax & Tr(goal, w0) for
  // temporal ones: the sentence whose models are countermodels / witnesses.
  Fol countermodel_formula;
  ClauseSet refutation_clauses;
  ClauseSet countermodel_clauses;
};

inline void check_reserved_atoms(const std::set<std::string>& atoms) {
  for (const auto& a : atoms) {
    if (a == "R" || a.rfind("R_", 0) == 0 || a.rfind(kGraphPrefix, 0) == 0 || a.rfind(kSkolemPrefix, 0) == 0)
      throw Error("atom '" + a + "' clashes with a reserved symbol");
  }
}

inline TranslationProblem assemble(const Modal& goal, const ModalSystem& sys, const ClausifyOptions& opts = {}) {
  auto sig = signature(goal);
  if (sig.has_next) throw Error("next-time operator in a modal-system problem");
  check_reserved_atoms(sig.atoms);
  TranslationProblem p;
  p.goal = goal;
  p.system = sys;
  p.indices = sig.indices.empty() ? std::set<std::string>{""} : sig.indices;
  p.atoms = sig.atoms;
  p.axioms = frame_axioms(sys, p.indices);

  Translator tr;
  Fol body = Fol::forall("w", tr.translate(goal, Term::var("w")));
  p.validity_formula = p.axioms.empty() ? body : Fol::imp(Fol::conj_all(p.axioms), body);

  Translator tr2;
  Fol refute = tr2.translate(Modal::neg(goal), Term::constant(kRealWorld));
  std::vector<Fol> parts = p.axioms;
  parts.push_back(refute);
  p.countermodel_formula = Fol::conj_all(parts);

  SymbolGen g1, g2;
  p.refutation_clauses = clausify(Fol::neg(p.validity_formula), g1, opts);
  p.countermodel_clauses = clausify(p.countermodel_formula, g2, opts);
  return p;
}

// A top-level biconditional becomes its two implications.
inline std::vector<Modal> split_goal(const Modal& goal) {
  if (goal.op() == ModalOp::Iff)
    return {Modal::imp(goal.lhs(), goal.rhs()), Modal::imp(goal.rhs(), goal.lhs())};
  return {goal};
}

// f is S5-valid iff dia box f is S4-valid. The dual for satisfiability is
// box dia f, not dia box f: ~(p <-> box p) is S5-satisfiable while
// dia box ~(p <-> box p) is not S4-satisfiable.
inline Modal s5_to_s4(const Modal& f) {
  auto sig = signature(f);
  if (std::any_of(sig.indices.begin(), sig.indices.end(), [](const std::string& i) { return !i.empty(); }))
    throw Error("S5-to-S4 reduction needs a single default modality");
  return Modal::dia(Modal::box(f));
}

// Axioms for next-time problems: R reflexive and transitive, R(x, S(x)).
inline std::vector<Fol> temporal_axioms() {
  auto ax = frame_axioms_for("R", SchemaSet{Schema::T, Schema::Four});
  ax.push_back(
      Fol::forall("x", Fol::pred("R", {Term::var("x"), Term::fn(kSuccessorSymbol, {Term::var("x")})})));
  return ax;
}

inline TranslationProblem ltl_assemble(const Modal& goal, const ClausifyOptions& opts = {}) {
  auto sig = signature(goal);
  if (std::any_of(sig.indices.begin(), sig.indices.end(), [](const std::string& i) { return !i.empty(); }))
    throw Error("indexed modality in a temporal formula");
  check_reserved_atoms(sig.atoms);
  TranslationProblem p;
  p.goal = goal;
  p.system = {"LTL-X", SchemaSet{Schema::T, Schema::Four}, {}};
  p.temporal = true;
  p.indices = {""};
  p.atoms = sig.atoms;
  p.axioms = temporal_axioms();

  Translator tr;
  tr.temporal = true;
  Fol body = Fol::forall("w", Fol::neg(tr.translate(goal, Term::var("w"))));
  p.validity_formula = Fol::imp(Fol::conj_all(p.axioms), body);

  Translator tr2;
  tr2.temporal = true;
  std::vector<Fol> parts = p.axioms;
  parts.push_back(tr2.translate(goal, Term::constant(kRealWorld)));
  p.countermodel_formula = Fol::conj_all(parts);

  SymbolGen g1, g2;
  p.refutation_clauses = clausify(Fol::neg(p.validity_formula), g1, opts);
  p.countermodel_clauses = clausify(p.countermodel_formula, g2, opts);
  return p;
}

// TPTP FOF problem: one axiom line per frame axiom and the translated goal as
// the conjecture.
inline std::string problem_to_tptp(const TranslationProblem& p) {
  std::string out;
  for (std::size_t i = 0; i < p.axioms.size(); ++i)
    out += to_tptp("frame_" + std::to_string(i), "axiom", p.axioms[i]) + "\n";
  Fol conjecture = p.axioms.empty() ? p.validity_formula : p.validity_formula.rhs();
  out += to_tptp("goal", "conjecture", conjecture) + "\n";
  return out;
}

}  // namespace kfol
