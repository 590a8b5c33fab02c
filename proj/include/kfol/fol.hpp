// First-order syntax without equality, the clausal normal-form pipeline
// (NNF, Skolemization, CNF, flattening), finite structures and a brute-force
// Tarskian evaluator.
#pragma once

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "kfol/modal.hpp"

namespace kfol {

// Fresh symbols introduced by the pipeline carry these prefixes.
inline constexpr const char* kSkolemPrefix = "sk";
inline constexpr const char* kDefinitionPrefix = "skd";
inline constexpr const char* kGraphPrefix = "Is_";

// ---------------------------------------------------------------------------
// Terms

struct Term {
  enum class Kind { Variable, Constant, Function };
  Kind kind = Kind::Constant;
  std::string name;
  std::vector<Term> args;

  static Term var(std::string n) { return {Kind::Variable, std::move(n), {}}; }
  static Term constant(std::string n) { return {Kind::Constant, std::move(n), {}}; }
  static Term fn(std::string n, std::vector<Term> a) {
    if (a.empty()) return constant(std::move(n));
    return {Kind::Function, std::move(n), std::move(a)};
  }

  bool is_var() const noexcept { return kind == Kind::Variable; }
  std::size_t depth() const {
    std::size_t d = 0;
    for (const auto& a : args) d = std::max(d, a.depth() + 1);
    return d;
  }

  friend bool operator==(const Term&, const Term&) = default;
  friend auto operator<=>(const Term& a, const Term& b) {
    if (auto c = a.kind <=> b.kind; c != 0) return c;
    if (auto c = a.name <=> b.name; c != 0) return c;
    return std::lexicographical_compare_three_way(a.args.begin(), a.args.end(), b.args.begin(),
                                                  b.args.end());
  }
};

inline void print_term(const Term& t, std::string& out) {
  out += t.name;
  if (t.args.empty()) return;
  out += '(';
  for (std::size_t i = 0; i < t.args.size(); ++i) {
    if (i) out += ',';
    print_term(t.args[i], out);
  }
  out += ')';
}

inline std::string to_string(const Term& t) {
  std::string s;
  print_term(t, s);
  return s;
}

inline void collect_vars(const Term& t, std::set<std::string>& out) {
  if (t.is_var()) out.insert(t.name);
  for (const auto& a : t.args) collect_vars(a, out);
}

inline bool occurs(const std::string& var, const Term& t) {
  if (t.is_var()) return t.name == var;
  return std::any_of(t.args.begin(), t.args.end(), [&](const Term& a) { return occurs(var, a); });
}

using TermSubst = std::map<std::string, Term>;

inline Term apply_subst(const TermSubst& s, const Term& t) {
  if (t.is_var()) {
    auto it = s.find(t.name);
    return it == s.end() ? t : it->second;
  }
  Term r = t;
  for (auto& a : r.args) a = apply_subst(s, a);
  return r;
}

// ---------------------------------------------------------------------------
// Formulas

enum class FolOp { True, False, Pred, Not, And, Or, Imp, Iff, Forall, Exists };

class Fol {
 public:
  Fol() : Fol(FolOp::True) {}

  static Fol top() { return Fol(FolOp::True); }
  static Fol bottom() { return Fol(FolOp::False); }
  static Fol pred(std::string name, std::vector<Term> args) {
    return Fol(FolOp::Pred, std::move(name), std::move(args));
  }
  static Fol neg(Fol a) { return Fol(FolOp::Not, {}, {}, {std::move(a)}); }
  static Fol conj(Fol a, Fol b) { return Fol(FolOp::And, {}, {}, {std::move(a), std::move(b)}); }
  static Fol disj(Fol a, Fol b) { return Fol(FolOp::Or, {}, {}, {std::move(a), std::move(b)}); }
  static Fol imp(Fol a, Fol b) { return Fol(FolOp::Imp, {}, {}, {std::move(a), std::move(b)}); }
  static Fol iff(Fol a, Fol b) { return Fol(FolOp::Iff, {}, {}, {std::move(a), std::move(b)}); }
  static Fol forall(std::string v, Fol body) {
    return Fol(FolOp::Forall, std::move(v), {}, {std::move(body)});
  }
  static Fol exists(std::string v, Fol body) {
    return Fol(FolOp::Exists, std::move(v), {}, {std::move(body)});
  }
  static Fol binary(FolOp op, Fol a, Fol b) { return Fol(op, {}, {}, {std::move(a), std::move(b)}); }
  static Fol quant(FolOp op, std::string v, Fol body) {
    return Fol(op, std::move(v), {}, {std::move(body)});
  }
  // Conjunction of a list; empty list is True.
  static Fol conj_all(const std::vector<Fol>& fs) {
    if (fs.empty()) return top();
    Fol r = fs.back();
    for (std::size_t i = fs.size() - 1; i-- > 0;) r = conj(fs[i], r);
    return r;
  }

  FolOp op() const noexcept { return node_->op; }
  // Predicate name for Pred, bound variable for quantifiers.
  const std::string& name() const noexcept { return node_->name; }
  const std::string& var() const noexcept { return node_->name; }
  const std::vector<Term>& args() const noexcept { return node_->args; }
  const Fol& child(std::size_t i = 0) const { return node_->kids.at(i); }
  const Fol& lhs() const { return child(0); }
  const Fol& rhs() const { return child(1); }
  bool is_binary() const noexcept {
    auto o = op();
    return o == FolOp::And || o == FolOp::Or || o == FolOp::Imp || o == FolOp::Iff;
  }
  bool is_quant() const noexcept { return op() == FolOp::Forall || op() == FolOp::Exists; }

  friend bool operator==(const Fol& a, const Fol& b) {
    if (a.node_ == b.node_) return true;
    if (a.op() != b.op() || a.name() != b.name() || a.args() != b.args()) return false;
    for (std::size_t i = 0; i < a.node_->kids.size(); ++i)
      if (!(a.node_->kids[i] == b.node_->kids[i])) return false;
    return true;
  }

 private:
  struct Node {
    FolOp op;
    std::string name;
    std::vector<Term> args;
    std::vector<Fol> kids;
  };
  explicit Fol(FolOp op, std::string name = {}, std::vector<Term> args = {}, std::vector<Fol> kids = {})
      : node_(std::make_shared<const Node>(Node{op, std::move(name), std::move(args), std::move(kids)})) {}

  std::shared_ptr<const Node> node_;
};

inline void free_vars(const Fol& f, std::set<std::string>& bound, std::set<std::string>& out) {
  switch (f.op()) {
    case FolOp::True:
    case FolOp::False:
      return;
    case FolOp::Pred: {
      std::set<std::string> vs;
      for (const auto& t : f.args()) collect_vars(t, vs);
      for (const auto& v : vs)
        if (!bound.count(v)) out.insert(v);
      return;
    }
    case FolOp::Forall:
    case FolOp::Exists: {
      bool fresh = bound.insert(f.var()).second;
      free_vars(f.child(), bound, out);
      if (fresh) bound.erase(f.var());
      return;
    }
    case FolOp::Not:
      free_vars(f.child(), bound, out);
      return;
    default:
      free_vars(f.lhs(), bound, out);
      free_vars(f.rhs(), bound, out);
      return;
  }
}

inline std::set<std::string> free_vars(const Fol& f) {
  std::set<std::string> bound, out;
  free_vars(f, bound, out);
  return out;
}

// Substitution of terms for free variables. Callers must ensure the range
// terms' variables are not captured (the pipeline renames bound variables
// apart before substituting).
inline Fol apply_subst(const TermSubst& s, const Fol& f) {
  switch (f.op()) {
    case FolOp::True:
    case FolOp::False:
      return f;
    case FolOp::Pred: {
      std::vector<Term> args;
      args.reserve(f.args().size());
      for (const auto& t : f.args()) args.push_back(apply_subst(s, t));
      return Fol::pred(f.name(), std::move(args));
    }
    case FolOp::Forall:
    case FolOp::Exists: {
      if (!s.count(f.var())) return Fol::quant(f.op(), f.var(), apply_subst(s, f.child()));
      TermSubst inner = s;
      inner.erase(f.var());
      return Fol::quant(f.op(), f.var(), apply_subst(inner, f.child()));
    }
    case FolOp::Not:
      return Fol::neg(apply_subst(s, f.child()));
    default:
      return Fol::binary(f.op(), apply_subst(s, f.lhs()), apply_subst(s, f.rhs()));
  }
}

// Alpha-equivalence: equal up to consistent renaming of bound variables.
inline bool alpha_equivalent(const Fol& a, const Fol& b) {
  std::function<bool(const Term&, const Term&, const std::map<std::string, std::string>&,
                     const std::map<std::string, std::string>&)>
      term_eq = [&](const Term& x, const Term& y, const std::map<std::string, std::string>& ma,
                    const std::map<std::string, std::string>& mb) -> bool {
    if (x.kind != y.kind || x.args.size() != y.args.size()) return false;
    if (x.is_var()) {
      auto ia = ma.find(x.name);
      auto ib = mb.find(y.name);
      if (ia == ma.end() || ib == mb.end()) return ia == ma.end() && ib == mb.end() && x.name == y.name;
      return ia->second == ib->second;
    }
    if (x.name != y.name) return false;
    for (std::size_t i = 0; i < x.args.size(); ++i)
      if (!term_eq(x.args[i], y.args[i], ma, mb)) return false;
    return true;
  };
  int counter = 0;
  std::function<bool(const Fol&, const Fol&, std::map<std::string, std::string>,
                     std::map<std::string, std::string>)>
      go = [&](const Fol& x, const Fol& y, std::map<std::string, std::string> ma,
               std::map<std::string, std::string> mb) -> bool {
    if (x.op() != y.op()) return false;
    switch (x.op()) {
      case FolOp::True:
      case FolOp::False:
        return true;
      case FolOp::Pred:
        if (x.name() != y.name() || x.args().size() != y.args().size()) return false;
        for (std::size_t i = 0; i < x.args().size(); ++i)
          if (!term_eq(x.args()[i], y.args()[i], ma, mb)) return false;
        return true;
      case FolOp::Forall:
      case FolOp::Exists: {
        std::string tag = "#" + std::to_string(counter++);
        ma[x.var()] = tag;
        mb[y.var()] = tag;
        return go(x.child(), y.child(), ma, mb);
      }
      case FolOp::Not:
        return go(x.child(), y.child(), ma, mb);
      default:
        return go(x.lhs(), y.lhs(), ma, mb) && go(x.rhs(), y.rhs(), ma, mb);
    }
  };
  return go(a, b, {}, {});
}

// ---------------------------------------------------------------------------
// Printing

namespace detail {

inline void print_fol(const Fol& f, std::string& out) {
  switch (f.op()) {
    case FolOp::True:
      out += "true";
      return;
    case FolOp::False:
      out += "false";
      return;
    case FolOp::Pred:
      out += f.name();
      if (!f.args().empty()) {
        out += '(';
        for (std::size_t i = 0; i < f.args().size(); ++i) {
          if (i) out += ',';
          print_term(f.args()[i], out);
        }
        out += ')';
      }
      return;
    case FolOp::Not:
      out += '~';
      print_fol(f.child(), out);
      return;
    case FolOp::Forall:
    case FolOp::Exists:
      out += f.op() == FolOp::Forall ? "forall " : "exists ";
      out += f.var();
      out += ' ';
      if (f.child().is_binary()) {
        out += '(';
        print_fol(f.child(), out);
        out += ')';
      } else {
        print_fol(f.child(), out);
      }
      return;
    default: {
      auto side = [&out](const Fol& g) {
        if (g.is_binary()) {
          out += '(';
          print_fol(g, out);
          out += ')';
        } else {
          print_fol(g, out);
        }
      };
      side(f.lhs());
      switch (f.op()) {
        case FolOp::And:
          out += " & ";
          break;
        case FolOp::Or:
          out += " | ";
          break;
        case FolOp::Imp:
          out += " -> ";
          break;
        default:
          out += " <-> ";
          break;
      }
      side(f.rhs());
    }
  }
}

inline bool tptp_lower_word(const std::string& s) {
  if (s.empty() || !std::islower(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

inline std::string tptp_functor(const std::string& s) {
  if (tptp_lower_word(s)) return s;
  std::string q = "'";
  for (char c : s) {
    if (c == '\'' || c == '\\') q += '\\';
    q += c;
  }
  return q + "'";
}

inline std::string tptp_variable(const std::string& s) {
  std::string v;
  for (char c : s) v += (std::isalnum(static_cast<unsigned char>(c)) || c == '_') ? c : '_';
  if (v.empty() || !std::isupper(static_cast<unsigned char>(v[0]))) {
    if (!v.empty() && std::islower(static_cast<unsigned char>(v[0])))
      v[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(v[0])));
    else
      v = "V" + v;
  }
  return v;
}

inline void tptp_term(const Term& t, std::string& out) {
  if (t.is_var()) {
    out += tptp_variable(t.name);
    return;
  }
  out += tptp_functor(t.name);
  if (t.args.empty()) return;
  out += '(';
  for (std::size_t i = 0; i < t.args.size(); ++i) {
    if (i) out += ',';
    tptp_term(t.args[i], out);
  }
  out += ')';
}

inline void tptp_formula(const Fol& f, std::string& out) {
  switch (f.op()) {
    case FolOp::True:
      out += "$true";
      return;
    case FolOp::False:
      out += "$false";
      return;
    case FolOp::Pred:
      out += tptp_functor(f.name());
      if (!f.args().empty()) {
        out += '(';
        for (std::size_t i = 0; i < f.args().size(); ++i) {
          if (i) out += ',';
          tptp_term(f.args()[i], out);
        }
        out += ')';
      }
      return;
    case FolOp::Not:
      out += "~ ";
      tptp_formula(f.child(), out);
      return;
    case FolOp::Forall:
    case FolOp::Exists:
      out += f.op() == FolOp::Forall ? "! [" : "? [";
      out += tptp_variable(f.var());
      out += "] : ";
      tptp_formula(f.child(), out);
      return;
    default:
      out += '(';
      tptp_formula(f.lhs(), out);
      switch (f.op()) {
        case FolOp::And:
          out += " & ";
          break;
        case FolOp::Or:
          out += " | ";
          break;
        case FolOp::Imp:
          out += " => ";
          break;
        default:
          out += " <=> ";
          break;
      }
      tptp_formula(f.rhs(), out);
      out += ')';
  }
}

}  // namespace detail

inline std::string to_string(const Fol& f) {
  std::string s;
  detail::print_fol(f, s);
  return s;
}

// One TPTP FOF annotated formula line: fof(name, role, formula).
inline std::string to_tptp(const std::string& name, const std::string& role, const Fol& f) {
  std::string s = "fof(" + detail::tptp_functor(name) + ", " + role + ", ";
  detail::tptp_formula(f, s);
  return s + ").";
}

// ---------------------------------------------------------------------------
// Clauses

struct Literal {
  bool positive = true;
  std::string pred;
  std::vector<Term> args;

  Literal negated() const { return {!positive, pred, args}; }
  bool complementary(const Literal& o) const {
    return positive != o.positive && pred == o.pred && args == o.args;
  }
  friend bool operator==(const Literal&, const Literal&) = default;
  friend auto operator<=>(const Literal& a, const Literal& b) {
    if (auto c = a.pred <=> b.pred; c != 0) return c;
    if (auto c = a.args <=> b.args; c != 0) return c;
    return a.positive <=> b.positive;
  }
};

inline std::string to_string(const Literal& l) {
  std::string s = l.positive ? "" : "~";
  s += l.pred;
  if (!l.args.empty()) {
    s += '(';
    for (std::size_t i = 0; i < l.args.size(); ++i) {
      if (i) s += ',';
      print_term(l.args[i], s);
    }
    s += ')';
  }
  return s;
}

inline Literal apply_subst(const TermSubst& s, const Literal& l) {
  Literal r = l;
  for (auto& a : r.args) a = apply_subst(s, a);
  return r;
}

struct Clause {
  std::vector<Literal> literals;

  bool empty() const noexcept { return literals.empty(); }
  std::size_t size() const noexcept { return literals.size(); }

  // Sorts and removes duplicate literals.
  void normalize() {
    std::sort(literals.begin(), literals.end());
    literals.erase(std::unique(literals.begin(), literals.end()), literals.end());
  }
  bool is_tautology() const {
    for (std::size_t i = 0; i < literals.size(); ++i)
      for (std::size_t j = i + 1; j < literals.size(); ++j)
        if (literals[i].complementary(literals[j])) return true;
    return false;
  }
  std::set<std::string> vars() const {
    std::set<std::string> out;
    for (const auto& l : literals)
      for (const auto& t : l.args) collect_vars(t, out);
    return out;
  }
  friend bool operator==(const Clause&, const Clause&) = default;
};

using ClauseSet = std::vector<Clause>;

inline std::string to_string(const Clause& c) {
  std::string s = "{";
  for (std::size_t i = 0; i < c.literals.size(); ++i) {
    if (i) s += ", ";
    s += to_string(c.literals[i]);
  }
  return s + "}";
}

inline Clause apply_subst(const TermSubst& s, const Clause& c) {
  Clause r;
  r.literals.reserve(c.literals.size());
  for (const auto& l : c.literals) r.literals.push_back(apply_subst(s, l));
  return r;
}

// Universal closure of a clause as a formula.
inline Fol clause_formula(const Clause& c) {
  Fol body = Fol::bottom();
  for (std::size_t i = c.literals.size(); i-- > 0;) {
    const auto& l = c.literals[i];
    Fol atom = Fol::pred(l.pred, l.args);
    Fol lit = l.positive ? atom : Fol::neg(atom);
    body = (i + 1 == c.literals.size()) ? lit : Fol::disj(lit, body);
  }
  auto vs = c.vars();
  for (auto it = vs.rbegin(); it != vs.rend(); ++it) body = Fol::forall(*it, body);
  return body;
}

// ---------------------------------------------------------------------------
// Normal forms

// Per-pipeline generator for fresh Skolem symbols, definition predicates and
// variables.
class SymbolGen {
 public:
  std::string skolem() { return kSkolemPrefix + std::to_string(skolems_++); }
  std::string definition() { return kDefinitionPrefix + std::to_string(defs_++); }
  std::string variable() { return "X" + std::to_string(vars_++); }
  int skolem_count() const noexcept { return skolems_; }

 private:
  int skolems_ = 0;
  int defs_ = 0;
  int vars_ = 0;
};

namespace detail {

inline Fol nnf(const Fol& f, bool negate) {
  switch (f.op()) {
    case FolOp::True:
      return negate ? Fol::bottom() : f;
    case FolOp::False:
      return negate ? Fol::top() : f;
    case FolOp::Pred:
      return negate ? Fol::neg(f) : f;
    case FolOp::Not:
      return nnf(f.child(), !negate);
    case FolOp::And:
    case FolOp::Or: {
      bool is_and = (f.op() == FolOp::And) != negate;
      Fol a = nnf(f.lhs(), negate), b = nnf(f.rhs(), negate);
      return is_and ? Fol::conj(a, b) : Fol::disj(a, b);
    }
    case FolOp::Imp:
      // A -> B == ~A | B
      if (!negate) return Fol::disj(nnf(f.lhs(), true), nnf(f.rhs(), false));
      return Fol::conj(nnf(f.lhs(), false), nnf(f.rhs(), true));
    case FolOp::Iff:
      if (!negate)
        return Fol::conj(Fol::disj(nnf(f.lhs(), true), nnf(f.rhs(), false)),
                         Fol::disj(nnf(f.rhs(), true), nnf(f.lhs(), false)));
      return Fol::disj(Fol::conj(nnf(f.lhs(), false), nnf(f.rhs(), true)),
                       Fol::conj(nnf(f.lhs(), true), nnf(f.rhs(), false)));
    case FolOp::Forall:
    case FolOp::Exists: {
      bool is_all = (f.op() == FolOp::Forall) != negate;
      return Fol::quant(is_all ? FolOp::Forall : FolOp::Exists, f.var(), nnf(f.child(), negate));
    }
  }
  return f;
}

// Renames every bound variable to a fresh name.
inline Fol rename_bound(const Fol& f, SymbolGen& gen, const TermSubst& scope) {
  switch (f.op()) {
    case FolOp::Forall:
    case FolOp::Exists: {
      TermSubst inner = scope;
      std::string v = gen.variable();
      inner[f.var()] = Term::var(v);
      return Fol::quant(f.op(), v, rename_bound(f.child(), gen, inner));
    }
    case FolOp::Pred:
      return apply_subst(scope, f);
    case FolOp::True:
    case FolOp::False:
      return f;
    case FolOp::Not:
      return Fol::neg(rename_bound(f.child(), gen, scope));
    default:
      return Fol::binary(f.op(), rename_bound(f.lhs(), gen, scope), rename_bound(f.rhs(), gen, scope));
  }
}

inline Fol skolemize(const Fol& f, SymbolGen& gen, std::vector<std::string>& universals) {
  switch (f.op()) {
    case FolOp::Forall: {
      universals.push_back(f.var());
      Fol body = skolemize(f.child(), gen, universals);
      universals.pop_back();
      return Fol::forall(f.var(), body);
    }
    case FolOp::Exists: {
      // Skolem function of the enclosing universals the witness can depend on.
      auto fv = free_vars(f);
      std::vector<Term> args;
      for (const auto& u : universals)
        if (fv.count(u)) args.push_back(Term::var(u));
      Term witness = Term::fn(gen.skolem(), std::move(args));
      return skolemize(apply_subst(TermSubst{{f.var(), witness}}, f.child()), gen, universals);
    }
    case FolOp::And:
    case FolOp::Or:
      return Fol::binary(f.op(), skolemize(f.lhs(), gen, universals), skolemize(f.rhs(), gen, universals));
    default:
      return f;
  }
}

}  // namespace detail

// Negation normal form: Imp/Iff eliminated, negations only on atoms.
inline Fol to_nnf(const Fol& f) { return detail::nnf(f, false); }

// Replaces each existential of an NNF formula by a Skolem term over the
// enclosing universals. Bound variables are renamed apart first.
inline Fol skolemize(const Fol& nnf_formula, SymbolGen& gen) {
  std::vector<std::string> universals;
  Fol renamed = detail::rename_bound(nnf_formula, gen, {});
  return detail::skolemize(renamed, gen, universals);
}

inline Fol skolemize(const Fol& nnf_formula) {
  SymbolGen gen;
  return skolemize(nnf_formula, gen);
}

struct ClausifyOptions {
  // Name disjunctive subformulas instead of distributing when distribution
  // would multiply clause counts.
  bool definitional = false;
};

namespace detail {

using RawClauses = std::vector<std::vector<Literal>>;

struct Cnf {
  SymbolGen& gen;
  const ClausifyOptions& opts;
  RawClauses definitions;

  RawClauses run(const Fol& f) {
    switch (f.op()) {
      case FolOp::True:
        return {};
      case FolOp::False:
        return {{}};
      case FolOp::Pred:
        return {{Literal{true, f.name(), f.args()}}};
      case FolOp::Not:
        return {{Literal{false, f.child().name(), f.child().args()}}};
      case FolOp::Forall:
        return run(f.child());
      case FolOp::And: {
        RawClauses a = run(f.lhs()), b = run(f.rhs());
        a.insert(a.end(), b.begin(), b.end());
        return a;
      }
      case FolOp::Or: {
        RawClauses a = run(f.lhs()), b = run(f.rhs());
        if (opts.definitional && a.size() > 1 && b.size() > 1) {
          std::set<std::string> fv_set = free_vars(f.rhs());
          std::vector<Term> args;
          for (const auto& v : fv_set) args.push_back(Term::var(v));
          Literal def{true, gen.definition(), args};
          for (auto c : b) {
            c.insert(c.begin(), def.negated());
            definitions.push_back(std::move(c));
          }
          b = {{def}};
        }
        RawClauses out;
        out.reserve(a.size() * b.size());
        for (const auto& ca : a)
          for (const auto& cb : b) {
            auto c = ca;
            c.insert(c.end(), cb.begin(), cb.end());
            out.push_back(std::move(c));
          }
        return out;
      }
      default:
        throw Error("clausification expects a Skolemized NNF formula");
    }
  }
};

}  // namespace detail

// Renames the variables of each clause apart from every other clause.
inline void standardize_apart(ClauseSet& clauses, SymbolGen& gen) {
  for (auto& c : clauses) {
    TermSubst ren;
    for (const auto& v : c.vars()) ren[v] = Term::var(gen.variable());
    c = apply_subst(ren, c);
    c.normalize();
  }
}

// Full pipeline: NNF, Skolemization, CNF. Tautologies are dropped and
// literals deduplicated; each clause has its own variables.
inline ClauseSet clausify(const Fol& f, SymbolGen& gen, const ClausifyOptions& opts = {}) {
  Fol sk = skolemize(to_nnf(f), gen);
  detail::Cnf cnf{gen, opts, {}};
  auto raw = cnf.run(sk);
  raw.insert(raw.end(), cnf.definitions.begin(), cnf.definitions.end());
  ClauseSet out;
  for (auto& lits : raw) {
    Clause c{std::move(lits)};
    c.normalize();
    if (c.is_tautology()) continue;
    if (std::find(out.begin(), out.end(), c) != out.end()) continue;
    out.push_back(std::move(c));
  }
  standardize_apart(out, gen);
  return out;
}

inline ClauseSet clausify(const Fol& f, const ClausifyOptions& opts = {}) {
  SymbolGen gen;
  return clausify(f, gen, opts);
}

// Rewrites every literal so that all predicate arguments are variables. Each
// non-variable subterm f(t1..tk) is replaced by a fresh variable y and the
// negative graph literal ~Is_f(y1..yk, y) is added.
inline ClauseSet flatten(const ClauseSet& clauses) {
  ClauseSet out;
  for (const auto& c : clauses) {
    std::map<Term, std::string> named;
    std::vector<Literal> graph;
    int fresh = 0;
    std::set<std::string> used = c.vars();
    auto new_var = [&]() {
      std::string v;
      do v = "Y" + std::to_string(fresh++);
      while (used.count(v));
      used.insert(v);
      return v;
    };
    std::function<Term(const Term&)> name_of = [&](const Term& t) -> Term {
      if (t.is_var()) return t;
      auto it = named.find(t);
      if (it != named.end()) return Term::var(it->second);
      std::vector<Term> flat_args;
      for (const auto& a : t.args) flat_args.push_back(name_of(a));
      std::string y = new_var();
      named.emplace(t, y);
      flat_args.push_back(Term::var(y));
      graph.push_back(Literal{false, kGraphPrefix + t.name, std::move(flat_args)});
      return Term::var(y);
    };
    Clause fc;
    for (const auto& l : c.literals) {
      Literal fl{l.positive, l.pred, {}};
      for (const auto& a : l.args) fl.args.push_back(name_of(a));
      fc.literals.push_back(std::move(fl));
    }
    fc.literals.insert(fc.literals.end(), graph.begin(), graph.end());
    fc.normalize();
    out.push_back(std::move(fc));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Finite structures

struct FiniteStructure {
  struct PredTable {
    int arity = 0;
    std::vector<char> holds;
  };
  struct FuncTable {
    int arity = 0;
    std::vector<int> values;
  };

  int size = 1;
  std::map<std::string, PredTable> predicates;
  std::map<std::string, FuncTable> functions;

  static std::size_t cells(int n, int arity) {
    std::size_t c = 1;
    for (int i = 0; i < arity; ++i) c *= static_cast<std::size_t>(n);
    return c;
  }
  std::size_t index(const std::vector<int>& tuple) const {
    std::size_t idx = 0;
    for (int e : tuple) idx = idx * static_cast<std::size_t>(size) + static_cast<std::size_t>(e);
    return idx;
  }
  void add_predicate(const std::string& name, int arity) {
    predicates[name] = PredTable{arity, std::vector<char>(cells(size, arity), 0)};
  }
  void add_function(const std::string& name, int arity) {
    functions[name] = FuncTable{arity, std::vector<int>(cells(size, arity), 0)};
  }
  bool pred(const std::string& name, const std::vector<int>& tuple) const {
    auto it = predicates.find(name);
    if (it == predicates.end()) throw Error("uninterpreted predicate '" + name + "'");
    if (static_cast<int>(tuple.size()) != it->second.arity) throw Error("arity mismatch for '" + name + "'");
    return it->second.holds[index(tuple)] != 0;
  }
  void set_pred(const std::string& name, const std::vector<int>& tuple, bool v) {
    predicates.at(name).holds[index(tuple)] = v;
  }
  int func(const std::string& name, const std::vector<int>& tuple) const {
    auto it = functions.find(name);
    if (it == functions.end()) throw Error("uninterpreted function '" + name + "'");
    if (static_cast<int>(tuple.size()) != it->second.arity) throw Error("arity mismatch for '" + name + "'");
    return it->second.values[index(tuple)];
  }
  void set_func(const std::string& name, const std::vector<int>& tuple, int v) {
    functions.at(name).values[index(tuple)] = v;
  }

  // Adds Is_f predicates holding exactly on the graphs of the functions.
  FiniteStructure with_graph_predicates() const {
    FiniteStructure s = *this;
    for (const auto& [name, fn] : functions) {
      PredTable g{fn.arity + 1, std::vector<char>(cells(size, fn.arity + 1), 0)};
      for (std::size_t i = 0; i < fn.values.size(); ++i)
        g.holds[i * static_cast<std::size_t>(size) + static_cast<std::size_t>(fn.values[i])] = 1;
      s.predicates[kGraphPrefix + name] = std::move(g);
    }
    return s;
  }
};

using Assignment = std::map<std::string, int>;

inline int eval_term(const Term& t, const FiniteStructure& m, const Assignment& a) {
  if (t.is_var()) {
    auto it = a.find(t.name);
    if (it == a.end()) throw Error("unassigned variable '" + t.name + "'");
    return it->second;
  }
  std::vector<int> args;
  args.reserve(t.args.size());
  for (const auto& x : t.args) args.push_back(eval_term(x, m, a));
  return m.func(t.name, args);
}

// Tarskian truth; quantifiers range over {0..size-1}.
inline bool eval_fol(const Fol& f, const FiniteStructure& m, Assignment& a) {
  switch (f.op()) {
    case FolOp::True:
      return true;
    case FolOp::False:
      return false;
    case FolOp::Pred: {
      std::vector<int> args;
      args.reserve(f.args().size());
      for (const auto& t : f.args()) args.push_back(eval_term(t, m, a));
      return m.pred(f.name(), args);
    }
    case FolOp::Not:
      return !eval_fol(f.child(), m, a);
    case FolOp::And:
      return eval_fol(f.lhs(), m, a) && eval_fol(f.rhs(), m, a);
    case FolOp::Or:
      return eval_fol(f.lhs(), m, a) || eval_fol(f.rhs(), m, a);
    case FolOp::Imp:
      return !eval_fol(f.lhs(), m, a) || eval_fol(f.rhs(), m, a);
    case FolOp::Iff:
      return eval_fol(f.lhs(), m, a) == eval_fol(f.rhs(), m, a);
    case FolOp::Forall:
    case FolOp::Exists: {
      bool all = f.op() == FolOp::Forall;
      auto saved = a.find(f.var()) != a.end() ? std::optional<int>(a[f.var()]) : std::nullopt;
      bool result = all;
      for (int e = 0; e < m.size; ++e) {
        a[f.var()] = e;
        bool v = eval_fol(f.child(), m, a);
        if (all && !v) {
          result = false;
          break;
        }
        if (!all && v) {
          result = true;
          break;
        }
      }
      if (saved)
        a[f.var()] = *saved;
      else
        a.erase(f.var());
      return result;
    }
  }
  return false;
}

inline bool eval_fol(const Fol& f, const FiniteStructure& m) {
  Assignment a;
  return eval_fol(f, m, a);
}

inline bool eval_literal(const Literal& l, const FiniteStructure& m, const Assignment& a) {
  std::vector<int> args;
  args.reserve(l.args.size());
  for (const auto& t : l.args) args.push_back(eval_term(t, m, a));
  return m.pred(l.pred, args) == l.positive;
}

// Universal closure of the clause holds in `m`.
inline bool eval_clause(const Clause& c, const FiniteStructure& m) {
  const auto all = c.vars();
  std::vector<std::string> vs(all.begin(), all.end());
  Assignment a;
  for (const auto& v : vs) a[v] = 0;
  for (;;) {
    bool sat = std::any_of(c.literals.begin(), c.literals.end(),
                           [&](const Literal& l) { return eval_literal(l, m, a); });
    if (!sat) return false;
    std::size_t i = 0;
    for (; i < vs.size(); ++i) {
      if (++a[vs[i]] < m.size) break;
      a[vs[i]] = 0;
    }
    if (i == vs.size()) return true;
  }
}

inline bool eval_clauses(const ClauseSet& cs, const FiniteStructure& m) {
  return std::all_of(cs.begin(), cs.end(), [&](const Clause& c) { return eval_clause(c, m); });
}

// ---------------------------------------------------------------------------
// Signatures

struct FolSignature {
  std::map<std::string, int> predicates;
  std::map<std::string, int> functions;  // constants have arity 0

  void add_term(const Term& t) {
    if (t.is_var()) return;
    note(functions, t.name, static_cast<int>(t.args.size()));
    for (const auto& a : t.args) add_term(a);
  }
  void add_pred(const std::string& p, const std::vector<Term>& args) {
    note(predicates, p, static_cast<int>(args.size()));
    for (const auto& a : args) add_term(a);
  }
  void add(const Fol& f) {
    if (f.op() == FolOp::Pred) {
      add_pred(f.name(), f.args());
      return;
    }
    if (f.op() == FolOp::True || f.op() == FolOp::False) return;
    add(f.child(0));
    if (f.is_binary()) add(f.child(1));
  }
  void add(const ClauseSet& cs) {
    for (const auto& c : cs)
      for (const auto& l : c.literals) add_pred(l.pred, l.args);
  }

 private:
  static void note(std::map<std::string, int>& m, const std::string& name, int arity) {
    auto [it, fresh] = m.emplace(name, arity);
    if (!fresh && it->second != arity) throw Error("inconsistent arity for symbol '" + name + "'");
  }
};

// Structure over `sig` with every table false / zero.
inline FiniteStructure empty_structure(const FolSignature& sig, int n) {
  FiniteStructure s;
  s.size = n;
  for (const auto& [p, ar] : sig.predicates) s.add_predicate(p, ar);
  for (const auto& [f, ar] : sig.functions) s.add_function(f, ar);
  return s;
}

}  // namespace kfol
