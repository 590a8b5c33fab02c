// Saturation-based refutation prover: unification, binary resolution,
// factoring, subsumption, and a given-clause loop with proof extraction.
#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "kfol/fol.hpp"

namespace kfol {

// ---------------------------------------------------------------------------
// Unification over named terms

namespace detail {

inline Term resolve_binding(const Term& t, const TermSubst& s) {
  if (t.is_var()) {
    auto it = s.find(t.name);
    return it == s.end() ? t : resolve_binding(it->second, s);
  }
  Term r = t;
  for (auto& a : r.args) a = resolve_binding(a, s);
  return r;
}

inline bool unify_terms(const Term& a, const Term& b, TermSubst& s) {
  Term x = a.is_var() && s.count(a.name) ? resolve_binding(a, s) : a;
  Term y = b.is_var() && s.count(b.name) ? resolve_binding(b, s) : b;
  if (x.is_var() && y.is_var() && x.name == y.name) return true;
  if (x.is_var() || y.is_var()) {
    const Term& v = x.is_var() ? x : y;
    const Term& t = x.is_var() ? y : x;
    if (occurs(v.name, resolve_binding(t, s))) return false;
    s[v.name] = t;
    return true;
  }
  if (x.name != y.name || x.kind != y.kind || x.args.size() != y.args.size()) return false;
  for (std::size_t i = 0; i < x.args.size(); ++i)
    if (!unify_terms(x.args[i], y.args[i], s)) return false;
  return true;
}

}  // namespace detail

// Most general unifier of two atoms (signs are ignored), idempotent, with
// occurs check. Both atoms share one variable namespace.
inline std::optional<TermSubst> unify(const Literal& a, const Literal& b) {
  if (a.pred != b.pred || a.args.size() != b.args.size()) return std::nullopt;
  TermSubst s;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!detail::unify_terms(a.args[i], b.args[i], s)) return std::nullopt;
  TermSubst out;
  for (const auto& [v, t] : s) out[v] = detail::resolve_binding(t, s);
  return out;
}

inline std::optional<TermSubst> unify(const Term& a, const Term& b) {
  TermSubst s;
  if (!detail::unify_terms(a, b, s)) return std::nullopt;
  TermSubst out;
  for (const auto& [v, t] : s) out[v] = detail::resolve_binding(t, s);
  return out;
}

// Clauses equal up to a bijective renaming of variables.
bool is_variant(const Clause& a, const Clause& b);

// ---------------------------------------------------------------------------
// Internal representation: hash-consed terms and literal-encoded clauses.

namespace prover {

using TermId = std::int32_t;
using Lit = std::int32_t;  // atom * 2 + (negative ? 1 : 0)

inline TermId atom_of(Lit l) { return l >> 1; }
inline bool is_neg(Lit l) { return (l & 1) != 0; }
inline Lit make_lit(TermId atom, bool negative) { return atom * 2 + (negative ? 1 : 0); }

class TermBank {
 public:
  struct Node {
    std::int32_t sym;  // >= 0: symbol id; < 0: variable -(v+1)
    std::uint32_t first;
    std::uint32_t arity;
    std::uint32_t weight;
    std::int32_t max_var;  // largest variable index occurring, -1 if ground
  };

  TermBank() { table_.assign(1024, -1); }

  int symbol(const std::string& name, int arity, bool predicate) {
    std::string key = (predicate ? "p:" : "f:") + name;
    auto it = sym_index_.find(key);
    if (it != sym_index_.end()) {
      if (sym_arity_[it->second] != arity) throw Error("inconsistent arity for '" + name + "'");
      return it->second;
    }
    int id = static_cast<int>(sym_name_.size());
    sym_index_.emplace(key, id);
    sym_name_.push_back(name);
    sym_arity_.push_back(arity);
    sym_pred_.push_back(predicate);
    return id;
  }
  const std::string& symbol_name(int s) const { return sym_name_[s]; }
  bool symbol_is_predicate(int s) const { return sym_pred_[s]; }

  TermId var(int v) { return make(-(v + 1), nullptr, 0); }
  TermId make(std::int32_t sym, const TermId* args, std::uint32_t n) {
    std::size_t h = hash(sym, args, n);
    std::size_t mask = table_.size() - 1;
    for (std::size_t i = h & mask;; i = (i + 1) & mask) {
      TermId t = table_[i];
      if (t < 0) break;
      const Node& nd = nodes_[t];
      if (nd.sym == sym && nd.arity == n && std::equal(args, args + n, args_.begin() + nd.first)) return t;
    }
    Node nd{sym, static_cast<std::uint32_t>(args_.size()), n, 1, sym < 0 ? -sym - 1 : -1};
    for (std::uint32_t i = 0; i < n; ++i) {
      args_.push_back(args[i]);
      nd.weight += nodes_[args[i]].weight;
      nd.max_var = std::max(nd.max_var, nodes_[args[i]].max_var);
    }
    TermId id = static_cast<TermId>(nodes_.size());
    nodes_.push_back(nd);
    if (nodes_.size() * 2 > table_.size()) rehash();
    insert(id, h);
    return id;
  }

  const Node& node(TermId t) const { return nodes_[t]; }
  bool is_var(TermId t) const { return nodes_[t].sym < 0; }
  int var_index(TermId t) const { return -nodes_[t].sym - 1; }
  TermId arg(TermId t, std::uint32_t i) const { return args_[nodes_[t].first + i]; }
  std::uint32_t weight(TermId t) const { return nodes_[t].weight; }
  bool ground(TermId t) const { return nodes_[t].max_var < 0; }

  // Conversion from / to named terms. `vars` maps variable names to indices.
  TermId from_term(const Term& t, std::map<std::string, int>& vars) {
    if (t.is_var()) {
      auto [it, fresh] = vars.emplace(t.name, static_cast<int>(vars.size()));
      return var(it->second);
    }
    std::vector<TermId> a;
    for (const auto& x : t.args) a.push_back(from_term(x, vars));
    return make(symbol(t.name, static_cast<int>(a.size()), false), a.data(), static_cast<std::uint32_t>(a.size()));
  }
  TermId from_atom(const std::string& pred, const std::vector<Term>& args, std::map<std::string, int>& vars) {
    std::vector<TermId> a;
    for (const auto& x : args) a.push_back(from_term(x, vars));
    return make(symbol(pred, static_cast<int>(a.size()), true), a.data(), static_cast<std::uint32_t>(a.size()));
  }
  Term to_term(TermId t, const std::string& var_prefix = "X") const {
    const Node& nd = nodes_[t];
    if (nd.sym < 0) return Term::var(var_prefix + std::to_string(-nd.sym - 1));
    std::vector<Term> a;
    for (std::uint32_t i = 0; i < nd.arity; ++i) a.push_back(to_term(arg(t, i), var_prefix));
    return Term::fn(sym_name_[nd.sym], std::move(a));
  }
  Literal to_literal(Lit l, const std::string& var_prefix = "X") const {
    TermId a = atom_of(l);
    const Node& nd = nodes_[a];
    Literal out{!is_neg(l), sym_name_[nd.sym], {}};
    for (std::uint32_t i = 0; i < nd.arity; ++i) out.args.push_back(to_term(arg(a, i), var_prefix));
    return out;
  }

 private:
  static std::size_t hash(std::int32_t sym, const TermId* args, std::uint32_t n) {
    std::uint64_t h = 1469598103934665603ull ^ static_cast<std::uint32_t>(sym);
    h *= 1099511628211ull;
    for (std::uint32_t i = 0; i < n; ++i) {
      h ^= static_cast<std::uint32_t>(args[i]);
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
  void insert(TermId id, std::size_t h) {
    std::size_t mask = table_.size() - 1;
    std::size_t i = h & mask;
    while (table_[i] >= 0) i = (i + 1) & mask;
    table_[i] = id;
  }
  void rehash() {
    table_.assign(table_.size() * 2, -1);
    for (TermId t = 0; t < static_cast<TermId>(nodes_.size()); ++t) {
      const Node& nd = nodes_[t];
      insert(t, hash(nd.sym, args_.data() + nd.first, nd.arity));
    }
  }

  std::vector<Node> nodes_;
  std::vector<TermId> args_;
  std::vector<TermId> table_;
  std::unordered_map<std::string, int> sym_index_;
  std::vector<std::string> sym_name_;
  std::vector<int> sym_arity_;
  std::vector<bool> sym_pred_;
};

// Two-context unifier: variables of the two premises live in separate
// binding arrays so premises need no explicit renaming.
class Unifier {
 public:
  struct Ref {
    TermId term;
    int ctx;
  };

  explicit Unifier(const TermBank& bank) : bank_(bank) {}

  void reset(int vars0, int vars1) {
    for (int c = 0; c < 2; ++c) {
      int n = c == 0 ? vars0 : vars1;
      if (static_cast<int>(bind_[c].size()) < n) bind_[c].resize(n, Ref{-1, 0});
    }
    undo_all();
  }

  bool unify(TermId a, int ca, TermId b, int cb) {
    Ref x = deref({a, ca}), y = deref({b, cb});
    if (x.term == y.term && (x.ctx == y.ctx || bank_.ground(x.term))) return true;
    bool xv = bank_.is_var(x.term), yv = bank_.is_var(y.term);
    if (xv || yv) {
      if (!xv) std::swap(x, y);
      if (occurs(bank_.var_index(x.term), x.ctx, y)) return false;
      bind(bank_.var_index(x.term), x.ctx, y);
      return true;
    }
    const auto& nx = bank_.node(x.term);
    const auto& ny = bank_.node(y.term);
    if (nx.sym != ny.sym || nx.arity != ny.arity) return false;
    for (std::uint32_t i = 0; i < nx.arity; ++i)
      if (!unify(bank_.arg(x.term, i), x.ctx, bank_.arg(y.term, i), y.ctx)) return false;
    return true;
  }

  Ref deref(Ref r) const {
    while (bank_.is_var(r.term)) {
      const Ref& b = bind_[r.ctx][bank_.var_index(r.term)];
      if (b.term < 0) break;
      r = b;
    }
    return r;
  }

  void undo_all() {
    for (auto [c, v] : trail_) bind_[c][v] = Ref{-1, 0};
    trail_.clear();
  }
  std::size_t mark() const { return trail_.size(); }
  void undo_to(std::size_t m) {
    while (trail_.size() > m) {
      auto [c, v] = trail_.back();
      bind_[c][v] = Ref{-1, 0};
      trail_.pop_back();
    }
  }
  bool bound(int ctx, int v) const { return bind_[ctx][v].term >= 0; }
  Ref binding(int ctx, int v) const { return bind_[ctx][v]; }

 private:
  bool occurs(int v, int ctx, Ref r) const {
    r = deref(r);
    if (bank_.ground(r.term)) return false;
    if (bank_.is_var(r.term)) return r.ctx == ctx && bank_.var_index(r.term) == v;
    const auto& nd = bank_.node(r.term);
    for (std::uint32_t i = 0; i < nd.arity; ++i)
      if (occurs(v, ctx, {bank_.arg(r.term, i), r.ctx})) return true;
    return false;
  }
  void bind(int v, int ctx, Ref r) {
    bind_[ctx][v] = r;
    trail_.emplace_back(ctx, v);
  }

  const TermBank& bank_;
  std::vector<Ref> bind_[2];
  std::vector<std::pair<int, int>> trail_;
};

// Builds instantiated terms under a unifier, numbering the variables of the
// result in order of first appearance.
class Instantiator {
 public:
  Instantiator(TermBank& bank, const Unifier& u) : bank_(bank), u_(u) {}

  TermId build(TermId t, int ctx) {
    Unifier::Ref r = u_.deref({t, ctx});
    if (bank_.ground(r.term)) return r.term;
    if (bank_.is_var(r.term)) {
      auto key = std::make_pair(r.ctx, bank_.var_index(r.term));
      auto it = rename_.find(key);
      if (it != rename_.end()) return bank_.var(it->second);
      int nv = static_cast<int>(rename_.size());
      rename_.emplace(key, nv);
      return bank_.var(nv);
    }
    const auto nd = bank_.node(r.term);  // copy: build() may grow the bank
    std::vector<TermId> a(nd.arity);
    for (std::uint32_t i = 0; i < nd.arity; ++i) a[i] = build(bank_.arg(r.term, i), r.ctx);
    return bank_.make(nd.sym, a.data(), nd.arity);
  }
  int var_count() const { return static_cast<int>(rename_.size()); }

 private:
  TermBank& bank_;
  const Unifier& u_;
  std::map<std::pair<int, int>, int> rename_;
};

// One-way matching (pattern variables only) for subsumption.
class Matcher {
 public:
  explicit Matcher(const TermBank& bank) : bank_(bank) {}
  void reset(int vars) {
    undo_to(0);
    if (static_cast<int>(bind_.size()) < vars) bind_.resize(vars, -1);
  }
  bool match(TermId pat, TermId target) {
    if (pat == target && bank_.ground(pat)) return true;
    if (bank_.is_var(pat)) {
      int v = bank_.var_index(pat);
      if (bind_[v] >= 0) return bind_[v] == target;
      bind_[v] = target;
      trail_.push_back(v);
      return true;
    }
    const auto& np = bank_.node(pat);
    const auto& nt = bank_.node(target);
    if (np.sym != nt.sym || np.arity != nt.arity) return false;
    if (np.weight > nt.weight) return false;
    for (std::uint32_t i = 0; i < np.arity; ++i)
      if (!match(bank_.arg(pat, i), bank_.arg(target, i))) return false;
    return true;
  }
  std::size_t mark() const { return trail_.size(); }
  void undo_to(std::size_t m) {
    while (trail_.size() > m) {
      bind_[trail_.back()] = -1;
      trail_.pop_back();
    }
  }

 private:
  const TermBank& bank_;
  std::vector<TermId> bind_;
  std::vector<int> trail_;
};

struct PClause {
  std::vector<Lit> lits;
  int nvars = 0;
  std::uint32_t weight = 0;
  std::uint64_t features = 0;
};

inline std::uint64_t feature_bits(const TermBank& bank, const std::vector<Lit>& lits) {
  std::uint64_t f = 0;
  for (Lit l : lits) {
    TermId a = atom_of(l);
    const auto& nd = bank.node(a);
    std::uint64_t base = static_cast<std::uint64_t>(nd.sym) * 2 + (is_neg(l) ? 1 : 0);
    f |= 1ull << (base * 0x9E3779B1u % 64);
    for (std::uint32_t i = 0; i < nd.arity; ++i) {
      TermId t = bank.arg(a, i);
      if (bank.is_var(t)) continue;
      std::uint64_t k = (base * 31 + i) * 131 + static_cast<std::uint64_t>(bank.node(t).sym);
      f |= 1ull << ((k * 0x9E3779B97F4A7C15ull) >> 58);
    }
  }
  return f;
}

// Renumbers variables by first occurrence, sorts and deduplicates.
inline PClause normalize(TermBank& bank, const std::vector<Lit>& lits) {
  Unifier u(bank);
  int maxv = -1;
  for (Lit l : lits) maxv = std::max(maxv, bank.node(atom_of(l)).max_var);
  u.reset(maxv + 1, 0);
  Instantiator inst(bank, u);
  PClause c;
  for (Lit l : lits) c.lits.push_back(make_lit(inst.build(atom_of(l), 0), is_neg(l)));
  std::sort(c.lits.begin(), c.lits.end());
  c.lits.erase(std::unique(c.lits.begin(), c.lits.end()), c.lits.end());
  c.nvars = inst.var_count();
  for (Lit l : c.lits) c.weight += bank.weight(atom_of(l));
  c.features = feature_bits(bank, c.lits);
  return c;
}

inline bool is_tautology(const PClause& c) {
  for (std::size_t i = 0; i + 1 < c.lits.size(); ++i)
    if (atom_of(c.lits[i]) == atom_of(c.lits[i + 1])) return true;  // sorted: l, l^1 adjacent
  return false;
}

// Injective theta-subsumption: some substitution maps every literal of `a`
// onto a distinct literal of `b`.
namespace detail {

inline bool subsumes_from(const TermBank& bank, Matcher& m, const PClause& a, const PClause& b, std::size_t i,
                          std::uint64_t used) {
  if (i == a.lits.size()) return true;
  Lit la = a.lits[i];
  for (std::size_t j = 0; j < b.lits.size(); ++j) {
    if ((used >> j & 1u) || is_neg(la) != is_neg(b.lits[j])) continue;
    auto mk = m.mark();
    if (m.match(atom_of(la), atom_of(b.lits[j])) && subsumes_from(bank, m, a, b, i + 1, used | (1ull << j)))
      return true;
    m.undo_to(mk);
  }
  return false;
}

}  // namespace detail

// Clauses longer than 64 literals are never reported as subsumed; that only
// costs redundancy, not soundness.
inline bool subsumes(const TermBank& bank, Matcher& m, const PClause& a, const PClause& b) {
  if (a.lits.size() > b.lits.size() || b.lits.size() > 64) return false;
  if ((a.features & ~b.features) != 0) return false;
  m.reset(a.nvars);
  return detail::subsumes_from(bank, m, a, b, 0, 0);
}

struct Converted {
  PClause clause;
  std::map<std::string, int> vars;
};

inline Converted convert(TermBank& bank, const Clause& c) {
  Converted out;
  std::vector<Lit> lits;
  for (const auto& l : c.literals) lits.push_back(make_lit(bank.from_atom(l.pred, l.args, out.vars), !l.positive));
  out.clause.lits = lits;
  out.clause.nvars = static_cast<int>(out.vars.size());
  for (Lit l : lits) out.clause.weight += bank.weight(atom_of(l));
  out.clause.features = feature_bits(bank, lits);
  return out;
}

inline Clause to_clause(const TermBank& bank, const PClause& c, const std::string& prefix = "X") {
  Clause out;
  for (Lit l : c.lits) out.literals.push_back(bank.to_literal(l, prefix));
  return out;
}

// Resolvent of a (ctx 0) on literal i with b (ctx 1) on literal j, if the
// atoms unify and the signs differ.
inline std::optional<PClause> resolvent(TermBank& bank, Unifier& u, const PClause& a, std::size_t i,
                                        const PClause& b, std::size_t j) {
  Lit la = a.lits[i], lb = b.lits[j];
  if (is_neg(la) == is_neg(lb)) return std::nullopt;
  u.reset(a.nvars, b.nvars);
  if (!u.unify(atom_of(la), 0, atom_of(lb), 1)) return std::nullopt;
  Instantiator inst(bank, u);
  std::vector<Lit> lits;
  for (std::size_t k = 0; k < a.lits.size(); ++k)
    if (k != i) lits.push_back(make_lit(inst.build(atom_of(a.lits[k]), 0), is_neg(a.lits[k])));
  for (std::size_t k = 0; k < b.lits.size(); ++k)
    if (k != j) lits.push_back(make_lit(inst.build(atom_of(b.lits[k]), 1), is_neg(b.lits[k])));
  u.undo_all();
  return normalize(bank, lits);
}

inline std::optional<PClause> factor_of(TermBank& bank, Unifier& u, const PClause& c, std::size_t i, std::size_t j) {
  if (is_neg(c.lits[i]) != is_neg(c.lits[j])) return std::nullopt;
  u.reset(c.nvars, 0);
  if (!u.unify(atom_of(c.lits[i]), 0, atom_of(c.lits[j]), 0)) return std::nullopt;
  Instantiator inst(bank, u);
  std::vector<Lit> lits;
  for (std::size_t k = 0; k < c.lits.size(); ++k)
    if (k != j) lits.push_back(make_lit(inst.build(atom_of(c.lits[k]), 0), is_neg(c.lits[k])));
  u.undo_all();
  return normalize(bank, lits);
}

// Unifier of the last resolve/factor call expressed over named variables:
// context 0 variables are X<i>, context 1 variables are Y<i>.
inline TermSubst named_unifier(const TermBank& bank, const Unifier& u, int vars0, int vars1) {
  std::function<Term(Unifier::Ref)> build = [&](Unifier::Ref r) -> Term {
    r = u.deref(r);
    if (bank.is_var(r.term))
      return Term::var((r.ctx == 0 ? "X" : "Y") + std::to_string(bank.var_index(r.term)));
    const auto& nd = bank.node(r.term);
    std::vector<Term> a;
    for (std::uint32_t i = 0; i < nd.arity; ++i) a.push_back(build({bank.arg(r.term, i), r.ctx}));
    return Term::fn(bank.symbol_name(nd.sym), std::move(a));
  };
  TermSubst s;
  for (int c = 0; c < 2; ++c) {
    int n = c == 0 ? vars0 : vars1;
    for (int v = 0; v < n; ++v) {
      if (!u.bound(c, v)) continue;
      Term t = build(u.binding(c, v));
      std::string name = (c == 0 ? "X" : "Y") + std::to_string(v);
      if (!(t.is_var() && t.name == name)) s[name] = t;
    }
  }
  return s;
}

}  // namespace prover

// ---------------------------------------------------------------------------
// Public single-step inferences over named clauses.

// All binary resolvents. Premises are renamed apart internally.
inline ClauseSet resolve(const Clause& c1, const Clause& c2) {
  prover::TermBank bank;
  prover::Unifier u(bank);
  auto a = prover::convert(bank, c1).clause;
  auto b = prover::convert(bank, c2).clause;
  ClauseSet out;
  for (std::size_t i = 0; i < a.lits.size(); ++i)
    for (std::size_t j = 0; j < b.lits.size(); ++j)
      if (auto r = prover::resolvent(bank, u, a, i, b, j)) {
        Clause c = prover::to_clause(bank, *r);
        if (std::none_of(out.begin(), out.end(), [&](const Clause& d) { return is_variant(c, d); }))
          out.push_back(std::move(c));
      }
  return out;
}

// All factors obtained by unifying two same-sign literals.
inline ClauseSet factor(const Clause& c) {
  prover::TermBank bank;
  prover::Unifier u(bank);
  auto a = prover::convert(bank, c).clause;
  ClauseSet out;
  for (std::size_t i = 0; i < a.lits.size(); ++i)
    for (std::size_t j = i + 1; j < a.lits.size(); ++j)
      if (auto r = prover::factor_of(bank, u, a, i, j)) {
        Clause f = prover::to_clause(bank, *r);
        if (std::none_of(out.begin(), out.end(), [&](const Clause& d) { return is_variant(f, d); }))
          out.push_back(std::move(f));
      }
  return out;
}

// Injective theta-subsumption.
inline bool subsumes(const Clause& c1, const Clause& c2) {
  prover::TermBank bank;
  // Variables of c2 must act as constants: convert it in its own namespace.
  auto a = prover::convert(bank, c1).clause;
  Clause rigid = c2;
  TermSubst freeze;
  for (const auto& v : c2.vars()) freeze[v] = Term::constant("$" + v);
  rigid = apply_subst(freeze, rigid);
  auto b = prover::convert(bank, rigid).clause;
  prover::Matcher m(bank);
  return prover::subsumes(bank, m, a, b);
}

inline bool is_variant(const Clause& a, const Clause& b) {
  Clause x = a, y = b;
  x.normalize();
  y.normalize();
  return x.size() == y.size() && subsumes(x, y) && subsumes(y, x);
}

// ---------------------------------------------------------------------------
// Proof objects

struct ProofStep {
  enum class Rule { Input, Resolve, Factor };
  int id = 0;
  Rule rule = Rule::Input;
  std::vector<int> premises;   // step ids
  std::vector<int> positions;  // resolve: (lit in p1, lit in p2); factor: (i, j)
  Clause clause;               // variables X0, X1, ...
  TermSubst unifier;           // over X* (premise 1) and Y* (premise 2)
};

struct ProofObject {
  std::vector<ProofStep> steps;  // topologically ordered, last derives {}
};

inline const char* rule_name(ProofStep::Rule r) {
  switch (r) {
    case ProofStep::Rule::Input:
      return "input";
    case ProofStep::Rule::Resolve:
      return "resolve";
    default:
      return "factor";
  }
}

// Line-oriented trace: "id rule premises positions | clause | unifier".
inline std::string proof_trace(const ProofObject& p) {
  std::ostringstream os;
  for (const auto& s : p.steps) {
    os << s.id << ' ' << rule_name(s.rule) << " [";
    for (std::size_t i = 0; i < s.premises.size(); ++i) os << (i ? "," : "") << s.premises[i];
    os << "] [";
    for (std::size_t i = 0; i < s.positions.size(); ++i) os << (i ? "," : "") << s.positions[i];
    os << "] | " << to_string(s.clause) << " | {";
    bool first = true;
    for (const auto& [v, t] : s.unifier) {
      os << (first ? "" : ", ") << v << "->" << to_string(t);
      first = false;
    }
    os << "}\n";
  }
  return os.str();
}

// Re-derives every step from its premises with the recorded rule and unifier.
// Returns an empty string on success, else a description of the first bad step.
inline std::string replay(const ProofObject& proof, const ClauseSet& input) {
  std::map<int, const ProofStep*> seen;
  auto rename = [](const Clause& c, const std::string& from, const std::string& to) {
    TermSubst s;
    for (const auto& v : c.vars())
      if (v.rfind(from, 0) == 0) s[v] = Term::var(to + v.substr(from.size()));
    return apply_subst(s, c);
  };
  for (const auto& step : proof.steps) {
    std::string where = "step " + std::to_string(step.id) + ": ";
    for (int p : step.premises)
      if (!seen.count(p)) return where + "premise " + std::to_string(p) + " not derived earlier";
    Clause derived;
    switch (step.rule) {
      case ProofStep::Rule::Input: {
        bool found = std::any_of(input.begin(), input.end(), [&](const Clause& c) { return is_variant(c, step.clause); });
        if (!found) return where + "input clause not in the problem";
        seen[step.id] = &step;
        continue;
      }
      case ProofStep::Rule::Resolve: {
        if (step.premises.size() != 2 || step.positions.size() != 2) return where + "malformed resolve";
        const Clause& c1 = seen[step.premises[0]]->clause;
        Clause c2 = rename(seen[step.premises[1]]->clause, "X", "Y");
        auto i = static_cast<std::size_t>(step.positions[0]);
        auto j = static_cast<std::size_t>(step.positions[1]);
        if (i >= c1.size() || j >= c2.size()) return where + "literal position out of range";
        Literal l1 = apply_subst(step.unifier, c1.literals[i]);
        Literal l2 = apply_subst(step.unifier, c2.literals[j]);
        if (!l1.complementary(l2)) return where + "unifier does not make the literals complementary";
        for (std::size_t k = 0; k < c1.size(); ++k)
          if (k != i) derived.literals.push_back(apply_subst(step.unifier, c1.literals[k]));
        for (std::size_t k = 0; k < c2.size(); ++k)
          if (k != j) derived.literals.push_back(apply_subst(step.unifier, c2.literals[k]));
        break;
      }
      case ProofStep::Rule::Factor: {
        if (step.premises.size() != 1 || step.positions.size() != 2) return where + "malformed factor";
        const Clause& c = seen[step.premises[0]]->clause;
        auto i = static_cast<std::size_t>(step.positions[0]);
        auto j = static_cast<std::size_t>(step.positions[1]);
        if (i >= c.size() || j >= c.size() || i == j) return where + "literal position out of range";
        if (apply_subst(step.unifier, c.literals[i]) != apply_subst(step.unifier, c.literals[j]))
          return where + "unifier does not merge the literals";
        for (std::size_t k = 0; k < c.size(); ++k)
          if (k != j) derived.literals.push_back(apply_subst(step.unifier, c.literals[k]));
        break;
      }
    }
    derived.normalize();
    if (!is_variant(derived, step.clause)) return where + "derived " + to_string(derived) + " but recorded " + to_string(step.clause);
    seen[step.id] = &step;
  }
  if (proof.steps.empty() || !proof.steps.back().clause.empty()) return "proof does not end in the empty clause";
  return {};
}

// ---------------------------------------------------------------------------
// Saturation

struct SaturationLimits {
  std::size_t max_clauses = 2'000'000;
  double max_seconds = 60.0;
  std::uint32_t max_weight = 200;
};

enum class Strategy {
  // Unrestricted binary resolution and factoring.
  Plain,
  // A negative literal is selected in every clause that has one; only the
  // selected literal takes part in inferences. All-positive clauses use all
  // their literals.
  NegativeSelection,
};

struct SaturationOptions {
  Strategy strategy = Strategy::NegativeSelection;
  // Every (age_ratio + 1)-th given clause is the oldest unprocessed one
  // instead of the lightest; 0 selects by weight only.
  int age_ratio = 0;
  bool forward_subsumption = true;
  bool backward_subsumption = true;
};

struct ResourceReport {
  std::size_t given = 0;
  std::size_t generated = 0;
  std::size_t kept = 0;
  std::size_t discarded_overweight = 0;
  double seconds = 0.0;
  std::string reason;
};

struct Refutation {
  ProofObject proof;
  ResourceReport report;
};
struct Saturated {
  ResourceReport report;
};
struct ResourceOut {
  ResourceReport report;
};

using SaturationResult = std::variant<Refutation, Saturated, ResourceOut>;

// Given-clause saturation that can be driven one iteration at a time.
class Saturation {
 public:
  enum class Status { Running, Refuted, Saturated, ResourceOut };

  Saturation(const ClauseSet& input, SaturationLimits limits = {}, SaturationOptions opts = {})
      : limits_(limits), opts_(opts), unifier_(bank_), matcher_(bank_), start_(Clock::now()) {
    for (const auto& c : input) {
      auto conv = prover::convert(bank_, c);
      auto pc = prover::normalize(bank_, conv.clause.lits);
      int id = add_record(std::move(pc), ProofStep::Rule::Input, {}, {});
      process_new(id);
      if (status_ != Status::Running) return;
    }
  }

  Status status() const noexcept { return status_; }

  // One given-clause iteration.
  Status step() {
    if (status_ != Status::Running) return status_;
    if (++iterations_ % kClockStride == 0 && elapsed() > limits_.max_seconds) {
      finish(Status::ResourceOut, "time limit");
      return status_;
    }
    int given = pick_given();
    if (given < 0) {
      if (report_.discarded_overweight > 0)
        finish(Status::ResourceOut, "saturated after discarding overweight clauses");
      else
        finish(Status::Saturated, "saturated");
      return status_;
    }
    ++report_.given;
    activate(given);
    generate(given);
    if (status_ == Status::Running && records_.size() > limits_.max_clauses) finish(Status::ResourceOut, "clause limit");
    return status_;
  }

  // Runs until a final status or until `cancel` becomes true.
  Status run(const std::atomic<bool>* cancel = nullptr) {
    while (status_ == Status::Running) {
      if (cancel && cancel->load(std::memory_order_relaxed)) {
        finish(Status::ResourceOut, "cancelled");
        break;
      }
      step();
    }
    return status_;
  }

  void cancel(const std::string& why = "cancelled") {
    if (status_ == Status::Running) finish(Status::ResourceOut, why);
  }

  SaturationResult result() const {
    ResourceReport r = report();
    if (status_ == Status::Refuted) return Refutation{extract_proof(), r};
    if (status_ == Status::Saturated) return Saturated{r};
    return ResourceOut{r};
  }

  ResourceReport report() const {
    ResourceReport r = report_;
    r.kept = records_.size();
    return r;
  }

 private:
  using Clock = std::chrono::steady_clock;
  static constexpr std::size_t kClockStride = 4;

  struct Record {
    prover::PClause clause;
    ProofStep::Rule rule;
    std::vector<int> premises;
    std::vector<int> positions;
    bool alive = true;
    bool active = false;
    std::vector<std::size_t> eligible;
  };

  // Subsumption index entry; size and features inline for a cheap prefilter.
  struct Entry {
    int id;
    std::uint32_t size;
    std::uint32_t weight;
    std::uint64_t features;
  };

  struct LitsHash {
    std::size_t operator()(const std::vector<prover::Lit>& v) const noexcept {
      std::size_t h = v.size();
      for (prover::Lit l : v) h = (h ^ static_cast<std::size_t>(l)) * 0x100000001B3ull;
      return h;
    }
  };

  double elapsed() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

  void finish(Status s, std::string why) {
    status_ = s;
    report_.reason = std::move(why);
    report_.seconds = elapsed();
  }

  int add_record(prover::PClause c, ProofStep::Rule rule, std::vector<int> premises, std::vector<int> positions) {
    records_.push_back(Record{std::move(c), rule, std::move(premises), std::move(positions), true, false, {}});
    return static_cast<int>(records_.size()) - 1;
  }

  void process_new(int id) {
    Record& r = records_[id];
    if (r.clause.lits.empty()) {
      empty_clause_ = id;
      finish(Status::Refuted, "empty clause");
      return;
    }
    if (prover::is_tautology(r.clause) || r.clause.weight > limits_.max_weight) {
      if (r.clause.weight > limits_.max_weight && !prover::is_tautology(r.clause)) ++report_.discarded_overweight;
      r.alive = false;
      return;
    }
    // Exact repeats are dropped whether or not subsumption is on.
    if (kept_.count(r.clause.lits)) {
      r.alive = false;
      return;
    }
    std::vector<std::uint64_t> keys;
    for (prover::Lit l : r.clause.lits) keys.push_back(key(bank_, l));
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    if (opts_.forward_subsumption) {
      // A subsumer's first literal shares its key with some literal here.
      for (auto k : keys) {
        auto it = first_key_.find(k);
        if (it == first_key_.end()) continue;
        for (const Entry& e : it->second) {
          if (e.size > r.clause.lits.size() || e.weight > r.clause.weight || (e.features & ~r.clause.features) != 0)
            continue;
          if (!records_[e.id].alive) continue;
          if (prover::subsumes(bank_, matcher_, records_[e.id].clause, r.clause)) {
            r.alive = false;
            return;
          }
        }
      }
    }
    if (opts_.backward_subsumption) {
      // Subsumed clauses contain every key of this one; scan the rarest.
      const std::vector<Entry>* bucket = nullptr;
      for (auto k : keys) {
        auto it = any_key_.find(k);
        if (it == any_key_.end()) {
          bucket = nullptr;
          break;
        }
        if (!bucket || it->second.size() < bucket->size()) bucket = &it->second;
      }
      if (bucket)
        for (const Entry& e : *bucket) {
          if (e.size < r.clause.lits.size() || e.weight < r.clause.weight || (r.clause.features & ~e.features) != 0)
            continue;
          Record& o = records_[e.id];
          if (!o.alive) continue;
          if (prover::subsumes(bank_, matcher_, r.clause, o.clause)) o.alive = false;
        }
    }
    kept_.insert(r.clause.lits);
    Entry entry{id, static_cast<std::uint32_t>(r.clause.lits.size()), r.clause.weight, r.clause.features};
    first_key_[key(bank_, r.clause.lits[0])].push_back(entry);
    for (auto k : keys) any_key_[k].push_back(entry);
    if (++since_compact_ > 4096) compact();
    alive_.push_back(id);
    sos_.push({r.clause.weight, id});
    if (opts_.age_ratio > 0) fifo_.push_back(id);
  }

  void compact() {
    since_compact_ = 0;
    auto dead = [this](int id) { return !records_[id].alive; };
    std::erase_if(alive_, dead);
    auto dead_entry = [this](const Entry& e) { return !records_[e.id].alive; };
    for (auto& [k, list] : first_key_) std::erase_if(list, dead_entry);
    for (auto& [k, list] : any_key_) std::erase_if(list, dead_entry);
    for (auto& [key, list] : index_)
      std::erase_if(list, [this](const std::pair<int, std::size_t>& e) { return !records_[e.first].alive; });
  }

  int pick_given() {
    if (opts_.age_ratio > 0 && ++picks_ % static_cast<std::size_t>(opts_.age_ratio + 1) == 0) {
      while (!fifo_.empty()) {
        int id = fifo_.front();
        fifo_.pop_front();
        if (records_[id].alive && !records_[id].active) return id;
      }
    }
    while (!sos_.empty()) {
      int id = sos_.top().second;
      sos_.pop();
      if (records_[id].alive && !records_[id].active) return id;
    }
    return -1;
  }

  std::vector<std::size_t> eligible_literals(const prover::PClause& c) const {
    std::vector<std::size_t> out;
    if (opts_.strategy == Strategy::NegativeSelection) {
      std::size_t best = c.lits.size();
      for (std::size_t i = 0; i < c.lits.size(); ++i) {
        if (!prover::is_neg(c.lits[i])) continue;
        if (best == c.lits.size() ||
            bank_.weight(prover::atom_of(c.lits[i])) > bank_.weight(prover::atom_of(c.lits[best])))
          best = i;
      }
      if (best != c.lits.size()) return {best};
    }
    for (std::size_t i = 0; i < c.lits.size(); ++i) out.push_back(i);
    return out;
  }

  static std::uint64_t key(const prover::TermBank& bank, prover::Lit l) {
    return static_cast<std::uint64_t>(bank.node(prover::atom_of(l)).sym) * 2 + (prover::is_neg(l) ? 1 : 0);
  }

  void activate(int id) {
    Record& r = records_[id];
    r.active = true;
    r.eligible = eligible_literals(r.clause);
    for (std::size_t i : r.eligible) index_[key(bank_, r.clause.lits[i])].emplace_back(id, i);
  }

  void emit(prover::PClause c, ProofStep::Rule rule, std::vector<int> premises, std::vector<int> positions) {
    ++report_.generated;
    int id = add_record(std::move(c), rule, std::move(premises), std::move(positions));
    process_new(id);
  }

  void generate(int given) {
    // Factors.
    {
      const auto c = records_[given].clause;  // copy: emit() grows records_
      bool allowed = opts_.strategy == Strategy::Plain ||
                     std::none_of(c.lits.begin(), c.lits.end(), [](prover::Lit l) { return prover::is_neg(l); });
      if (allowed) {
        for (std::size_t i = 0; i < c.lits.size() && status_ == Status::Running; ++i)
          for (std::size_t j = i + 1; j < c.lits.size() && status_ == Status::Running; ++j)
            if (auto f = prover::factor_of(bank_, unifier_, c, i, j))
              emit(std::move(*f), ProofStep::Rule::Factor, {given}, {static_cast<int>(i), static_cast<int>(j)});
      }
    }
    // Resolvents with every active clause (the given one included).
    std::vector<std::size_t> elig = records_[given].eligible;
    for (std::size_t i : elig) {
      if (status_ != Status::Running || !records_[given].alive) return;
      prover::Lit lit = records_[given].clause.lits[i];
      auto it = index_.find(key(bank_, lit) ^ 1u);
      if (it == index_.end()) continue;
      auto partners = it->second;  // copy: emit() may grow the index
      for (auto [other, j] : partners) {
        if (status_ != Status::Running) return;
        if (!records_[other].alive || !records_[given].alive) continue;
        auto r = prover::resolvent(bank_, unifier_, records_[given].clause, i, records_[other].clause, j);
        if (r) emit(std::move(*r), ProofStep::Rule::Resolve, {given, other}, {static_cast<int>(i), static_cast<int>(j)});
      }
    }
  }

  ProofObject extract_proof() const {
    ProofObject p;
    if (empty_clause_ < 0) return p;
    std::vector<int> order;
    std::vector<char> mark(records_.size(), 0);
    std::function<void(int)> visit = [&](int id) {
      if (mark[id]) return;
      mark[id] = 1;
      for (int q : records_[id].premises) visit(q);
      order.push_back(id);
    };
    visit(empty_clause_);
    prover::TermBank& bank = const_cast<prover::TermBank&>(bank_);
    prover::Unifier u(bank);
    for (int id : order) {
      const Record& r = records_[id];
      ProofStep s;
      s.id = id;
      s.rule = r.rule;
      s.premises = r.premises;
      s.positions = r.positions;
      s.clause = prover::to_clause(bank_, r.clause);
      if (r.rule == ProofStep::Rule::Resolve) {
        const auto& a = records_[r.premises[0]].clause;
        const auto& b = records_[r.premises[1]].clause;
        u.reset(a.nvars, b.nvars);
        u.unify(prover::atom_of(a.lits[r.positions[0]]), 0, prover::atom_of(b.lits[r.positions[1]]), 1);
        s.unifier = prover::named_unifier(bank_, u, a.nvars, b.nvars);
        u.undo_all();
      } else if (r.rule == ProofStep::Rule::Factor) {
        const auto& a = records_[r.premises[0]].clause;
        u.reset(a.nvars, 0);
        u.unify(prover::atom_of(a.lits[r.positions[0]]), 0, prover::atom_of(a.lits[r.positions[1]]), 0);
        s.unifier = prover::named_unifier(bank_, u, a.nvars, 0);
        u.undo_all();
      }
      p.steps.push_back(std::move(s));
    }
    return p;
  }

  SaturationLimits limits_;
  SaturationOptions opts_;
  prover::TermBank bank_;
  prover::Unifier unifier_;
  prover::Matcher matcher_;
  Clock::time_point start_;
  std::vector<Record> records_;
  std::vector<int> alive_;
  std::priority_queue<std::pair<std::uint32_t, int>, std::vector<std::pair<std::uint32_t, int>>, std::greater<>> sos_;
  std::deque<int> fifo_;
  std::size_t picks_ = 0;
  std::unordered_map<std::uint64_t, std::vector<std::pair<int, std::size_t>>> index_;
  std::unordered_map<std::uint64_t, std::vector<Entry>> first_key_;  // by first-literal key
  std::unordered_map<std::uint64_t, std::vector<Entry>> any_key_;    // by every literal key
  std::unordered_set<std::vector<prover::Lit>, LitsHash> kept_;
  Status status_ = Status::Running;
  ResourceReport report_;
  std::size_t iterations_ = 0;
  std::size_t since_compact_ = 0;
  int empty_clause_ = -1;
};

inline SaturationResult saturate(const ClauseSet& clauses, SaturationLimits limits = {}, SaturationOptions opts = {}) {
  Saturation s(clauses, limits, opts);
  s.run();
  return s.result();
}

}  // namespace kfol
