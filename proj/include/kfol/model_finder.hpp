// Finite model search: ground flattened clauses over {0..n-1} into
// propositional CNF, decide it with DPLL, decode models, and iterate n.
#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "kfol/fol.hpp"

namespace kfol {

struct Cell {
  enum class Kind { Predicate, Function };
  Kind kind = Kind::Predicate;
  std::string symbol;
  std::vector<int> args;
  int value = 0;  // function cells: the output this variable asserts
};

struct PropCnf {
  int num_vars = 0;
  std::vector<std::vector<int>> clauses;  // DIMACS-style signed literals
  std::vector<Cell> decode;               // decode[v - 1] describes variable v
  int domain_size = 1;
  std::map<std::string, int> predicates;  // name -> arity
  std::map<std::string, int> functions;
};

inline std::string to_dimacs(const PropCnf& cnf) {
  std::ostringstream os;
  os << "c domain size " << cnf.domain_size << '\n';
  for (int v = 1; v <= cnf.num_vars; ++v) {
    const Cell& c = cnf.decode[v - 1];
    os << "c " << v << ' ' << c.symbol << '(';
    for (std::size_t i = 0; i < c.args.size(); ++i) os << (i ? "," : "") << c.args[i];
    os << ')';
    if (c.kind == Cell::Kind::Function) os << '=' << c.value;
    os << '\n';
  }
  os << "p cnf " << cnf.num_vars << ' ' << cnf.clauses.size() << '\n';
  for (const auto& cl : cnf.clauses) {
    for (int l : cl) os << l << ' ';
    os << "0\n";
  }
  return os.str();
}

// Incremental grounder so that large instances can be interleaved with other
// work. `step` grounds up to `budget` clause instances.
class Grounder {
 public:
  Grounder(const ClauseSet& flat, int n) : flat_(flat) {
    if (n < 1) throw Error("domain size must be at least 1");
    cnf_.domain_size = n;
    for (const auto& c : flat) {
      for (const auto& l : c.literals) {
        for (const auto& t : l.args)
          if (!t.is_var()) throw Error("grounding expects flattened clauses");
        if (l.pred.rfind(kGraphPrefix, 0) == 0)
          note(cnf_.functions, l.pred.substr(std::string(kGraphPrefix).size()), static_cast<int>(l.args.size()) - 1);
        else
          note(cnf_.predicates, l.pred, static_cast<int>(l.args.size()));
      }
    }
    for (const auto& [p, ar] : cnf_.predicates) {
      pred_base_[p] = cnf_.num_vars + 1;
      std::size_t cells = FiniteStructure::cells(n, ar);
      for (std::size_t i = 0; i < cells; ++i) cnf_.decode.push_back({Cell::Kind::Predicate, p, tuple(i, ar), 0});
      cnf_.num_vars += static_cast<int>(cells);
    }
    for (const auto& [f, ar] : cnf_.functions) {
      func_base_[f] = cnf_.num_vars + 1;
      std::size_t cells = FiniteStructure::cells(n, ar);
      for (std::size_t i = 0; i < cells; ++i) {
        std::vector<int> clause;
        for (int v = 0; v < n; ++v) {
          cnf_.decode.push_back({Cell::Kind::Function, f, tuple(i, ar), v});
          clause.push_back(++cnf_.num_vars);
        }
        cnf_.clauses.push_back(clause);
        for (std::size_t a = 0; a < clause.size(); ++a)
          for (std::size_t b = a + 1; b < clause.size(); ++b) cnf_.clauses.push_back({-clause[a], -clause[b]});
      }
    }
    start_clause();
  }

  bool done() const noexcept { return clause_ >= flat_.size(); }

  // Returns true when grounding is complete.
  bool step(std::size_t budget) {
    const int n = cnf_.domain_size;
    while (!done() && budget-- > 0) {
      emit_instance();
      std::size_t i = 0;
      for (; i < assign_.size(); ++i) {
        if (++assign_[i] < n) break;
        assign_[i] = 0;
      }
      if (i == assign_.size()) {
        ++clause_;
        start_clause();
      }
    }
    return done();
  }

  PropCnf take() {
    while (!step(1u << 20)) {
    }
    return std::move(cnf_);
  }

  int predicate_var(const std::string& p, const std::vector<int>& args) const {
    return pred_base_.at(p) + static_cast<int>(index(args));
  }
  int function_var(const std::string& f, const std::vector<int>& args, int value) const {
    return func_base_.at(f) + static_cast<int>(index(args)) * cnf_.domain_size + value;
  }

 private:
  static void note(std::map<std::string, int>& m, const std::string& name, int arity) {
    auto [it, fresh] = m.emplace(name, arity);
    if (!fresh && it->second != arity) throw Error("inconsistent arity for '" + name + "'");
  }
  std::vector<int> tuple(std::size_t idx, int arity) const {
    std::vector<int> t(arity);
    for (int k = arity - 1; k >= 0; --k) {
      t[k] = static_cast<int>(idx % static_cast<std::size_t>(cnf_.domain_size));
      idx /= static_cast<std::size_t>(cnf_.domain_size);
    }
    return t;
  }
  std::size_t index(const std::vector<int>& args) const {
    std::size_t idx = 0;
    for (int a : args) idx = idx * static_cast<std::size_t>(cnf_.domain_size) + static_cast<std::size_t>(a);
    return idx;
  }
  void start_clause() {
    if (done()) return;
    vars_.clear();
    auto vs = flat_[clause_].vars();
    vars_.assign(vs.begin(), vs.end());
    assign_.assign(vars_.size(), 0);
  }
  void emit_instance() {
    const Clause& c = flat_[clause_];
    std::vector<int> lits;
    std::vector<int> args;
    for (const auto& l : c.literals) {
      args.clear();
      for (const auto& t : l.args) {
        auto pos = std::lower_bound(vars_.begin(), vars_.end(), t.name) - vars_.begin();
        args.push_back(assign_[pos]);
      }
      int v;
      if (l.pred.rfind(kGraphPrefix, 0) == 0) {
        int value = args.back();
        args.pop_back();
        v = function_var(l.pred.substr(std::string(kGraphPrefix).size()), args, value);
      } else {
        v = predicate_var(l.pred, args);
      }
      lits.push_back(l.positive ? v : -v);
    }
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    for (std::size_t i = 0; i + 1 < lits.size(); ++i)
      for (std::size_t j = i + 1; j < lits.size(); ++j)
        if (lits[i] == -lits[j]) return;  // tautology
    cnf_.clauses.push_back(std::move(lits));
  }

  ClauseSet flat_;
  PropCnf cnf_;
  std::map<std::string, int> pred_base_;
  std::map<std::string, int> func_base_;
  std::size_t clause_ = 0;
  std::vector<std::string> vars_;
  std::vector<int> assign_;
};

inline PropCnf ground(const ClauseSet& flat, int n) { return Grounder(flat, n).take(); }

// ---------------------------------------------------------------------------
// DPLL with unit propagation, pure-literal elimination and first-unassigned
// branching (false first). Counter-based clause bookkeeping, resumable.

class Dpll {
 public:
  enum class Status { Running, Sat, Unsat };

  explicit Dpll(const PropCnf& cnf) : Dpll(cnf.num_vars, cnf.clauses) {}

  Dpll(int num_vars, const std::vector<std::vector<int>>& clauses)
      : n_(num_vars), clauses_(clauses), value_(num_vars + 1, -1), occ_(2 * (num_vars + 1)),
        active_(2 * (num_vars + 1), 0), sat_count_(clauses.size(), 0), false_count_(clauses.size(), 0) {
    for (std::size_t c = 0; c < clauses_.size(); ++c) {
      auto& cl = clauses_[c];
      std::sort(cl.begin(), cl.end());
      cl.erase(std::unique(cl.begin(), cl.end()), cl.end());
      if (cl.empty()) {
        status_ = Status::Unsat;
        return;
      }
      for (int l : cl) {
        occ_[slot(l)].push_back(static_cast<int>(c));
        ++active_[slot(l)];
      }
    }
    for (std::size_t c = 0; c < clauses_.size(); ++c)
      if (clauses_[c].size() == 1) pending_.push_back(clauses_[c][0]);
  }

  Status status() const noexcept { return status_; }
  std::size_t decisions() const noexcept { return decisions_; }

  // Performs up to `budget` assignments (propagations and decisions).
  Status step(std::size_t budget) {
    while (status_ == Status::Running && budget > 0) {
      if (!pending_.empty()) {
        int l = pending_.back();
        pending_.pop_back();
        int v = std::abs(l);
        if (value_[v] >= 0) {
          if ((value_[v] == 1) != (l > 0)) conflict();
          continue;
        }
        --budget;
        if (!assign(l)) conflict();
        continue;
      }
      if (satisfied_ == clauses_.size()) {
        for (int v = 1; v <= n_; ++v)
          if (value_[v] < 0) value_[v] = 0;
        status_ = Status::Sat;
        break;
      }
      if (int p = pure_literal(); p != 0) {
        pending_.push_back(p);
        continue;
      }
      while (next_var_ <= n_ && value_[next_var_] >= 0) ++next_var_;
      if (next_var_ > n_) {
        conflict();
        continue;
      }
      ++decisions_;
      decisions_stack_.push_back({static_cast<int>(trail_.size()), -next_var_, false});
      pending_.push_back(-next_var_);
    }
    return status_;
  }

  Status solve() {
    while (step(1u << 20) == Status::Running) {
    }
    return status_;
  }

  // assignment()[v] for v in 1..num_vars (index 0 unused).
  std::vector<bool> assignment() const {
    std::vector<bool> a(n_ + 1, false);
    for (int v = 1; v <= n_; ++v) a[v] = value_[v] == 1;
    return a;
  }

 private:
  struct Decision {
    int trail_size;
    int lit;
    bool flipped;
  };

  static std::size_t slot(int l) { return 2 * static_cast<std::size_t>(std::abs(l)) + (l < 0 ? 1 : 0); }

  // Makes `l` true. Returns false on a falsified clause.
  bool assign(int l) {
    int v = std::abs(l);
    value_[v] = l > 0 ? 1 : 0;
    trail_.push_back(l);
    bool ok = true;
    for (int c : occ_[slot(l)]) {
      if (sat_count_[c]++ == 0) {
        ++satisfied_;
        for (int x : clauses_[c]) --active_[slot(x)];
      }
    }
    for (int c : occ_[slot(-l)]) {
      ++false_count_[c];
      if (sat_count_[c] > 0) continue;
      std::size_t size = clauses_[c].size();
      if (static_cast<std::size_t>(false_count_[c]) == size) {
        ok = false;
      } else if (static_cast<std::size_t>(false_count_[c]) + 1 == size) {
        for (int x : clauses_[c])
          if (value_[std::abs(x)] < 0) {
            pending_.push_back(x);
            break;
          }
      }
    }
    return ok;
  }

  void unassign(int l) {
    int v = std::abs(l);
    for (int c : occ_[slot(l)]) {
      if (--sat_count_[c] == 0) {
        --satisfied_;
        for (int x : clauses_[c]) ++active_[slot(x)];
      }
    }
    for (int c : occ_[slot(-l)]) --false_count_[c];
    value_[v] = -1;
    if (v < next_var_) next_var_ = v;
  }

  int pure_literal() const {
    for (int v = 1; v <= n_; ++v) {
      if (value_[v] >= 0) continue;
      int pos = active_[slot(v)], neg = active_[slot(-v)];
      if (pos > 0 && neg == 0) return v;
      if (neg > 0 && pos == 0) return -v;
    }
    return 0;
  }

  void conflict() {
    pending_.clear();
    while (!decisions_stack_.empty()) {
      Decision d = decisions_stack_.back();
      while (static_cast<int>(trail_.size()) > d.trail_size) {
        unassign(trail_.back());
        trail_.pop_back();
      }
      decisions_stack_.pop_back();
      if (!d.flipped) {
        decisions_stack_.push_back({d.trail_size, -d.lit, true});
        pending_.push_back(-d.lit);
        return;
      }
    }
    status_ = Status::Unsat;
  }

  int n_;
  std::vector<std::vector<int>> clauses_;
  std::vector<int> value_;
  std::vector<std::vector<int>> occ_;
  std::vector<int> active_;
  std::vector<int> sat_count_;
  std::vector<int> false_count_;
  std::size_t satisfied_ = 0;
  std::vector<int> trail_;
  std::vector<int> pending_;
  std::vector<Decision> decisions_stack_;
  int next_var_ = 1;
  std::size_t decisions_ = 0;
  Status status_ = Status::Running;
};

struct DpllSat {
  std::vector<bool> assignment;
};
struct DpllUnsat {};

inline std::variant<DpllSat, DpllUnsat> dpll(const PropCnf& cnf) {
  Dpll solver(cnf);
  if (solver.solve() == Dpll::Status::Sat) return DpllSat{solver.assignment()};
  return DpllUnsat{};
}

// Reads a finite structure off a total assignment.
inline FiniteStructure decode(const std::vector<bool>& assignment, const PropCnf& cnf) {
  FiniteStructure s;
  s.size = cnf.domain_size;
  for (const auto& [p, ar] : cnf.predicates) s.add_predicate(p, ar);
  for (const auto& [f, ar] : cnf.functions) s.add_function(f, ar);
  std::map<std::pair<std::string, std::vector<int>>, int> seen;
  for (int v = 1; v <= cnf.num_vars; ++v) {
    const Cell& c = cnf.decode[v - 1];
    bool val = v < static_cast<int>(assignment.size()) && assignment[v];
    if (c.kind == Cell::Kind::Predicate) {
      s.set_pred(c.symbol, c.args, val);
    } else if (val) {
      auto key = std::make_pair(c.symbol, c.args);
      if (seen.count(key)) throw Error("non-functional cell for '" + c.symbol + "' in decoded model");
      seen[key] = c.value;
      s.set_func(c.symbol, c.args, c.value);
    }
  }
  for (const auto& [f, ar] : cnf.functions) {
    std::size_t cells = FiniteStructure::cells(cnf.domain_size, ar);
    std::size_t count = 0;
    for (const auto& [key, val] : seen)
      if (key.first == f) ++count;
    if (count != cells) throw Error("function '" + f + "' is not total in decoded model");
  }
  return s;
}

// Propositional encoding of a structure under `cnf`'s variable numbering.
inline std::vector<bool> encode(const FiniteStructure& s, const PropCnf& cnf) {
  std::vector<bool> a(cnf.num_vars + 1, false);
  for (int v = 1; v <= cnf.num_vars; ++v) {
    const Cell& c = cnf.decode[v - 1];
    if (c.kind == Cell::Kind::Predicate)
      a[v] = s.pred(c.symbol, c.args);
    else
      a[v] = s.func(c.symbol, c.args) == c.value;
  }
  return a;
}

inline bool satisfies(const PropCnf& cnf, const std::vector<bool>& a) {
  return std::all_of(cnf.clauses.begin(), cnf.clauses.end(), [&](const std::vector<int>& cl) {
    return std::any_of(cl.begin(), cl.end(), [&](int l) { return a[std::abs(l)] == (l > 0); });
  });
}

// ---------------------------------------------------------------------------
// Smallest-model search

struct FoundModel {
  FiniteStructure structure;
  int size = 0;
};
struct NoModelUpTo {
  int n_max = 0;
};
struct SearchCancelled {
  int at = 0;
};

using ModelSearchResult = std::variant<FoundModel, NoModelUpTo, SearchCancelled>;

// Iterates n = 1, 2, ... up to n_max; resumable in bounded work units.
class ModelSearch {
 public:
  enum class Status { Running, Found, Exhausted, Cancelled };

  // Accepts or rejects a verified model; rejected models are excluded by a
  // blocking clause over the cells of `block_symbols` and search resumes.
  struct Filter {
    std::function<bool(const FiniteStructure&)> accept;
    std::set<std::string> block_symbols;
  };

  ModelSearch(ClauseSet clauses, int n_max, std::optional<Filter> filter = std::nullopt)
      : original_(std::move(clauses)), flat_(flatten(original_)), n_max_(n_max), filter_(std::move(filter)) {
    if (n_max_ < 1) throw Error("n_max must be at least 1");
  }

  Status status() const noexcept { return status_; }
  int current_size() const noexcept { return n_; }
  std::size_t rejected() const noexcept { return rejected_; }

  Status step(std::size_t budget) {
    if (status_ != Status::Running) return status_;
    if (!grounder_ && !solver_) {
      if (++n_ > n_max_) {
        --n_;
        status_ = Status::Exhausted;
        return status_;
      }
      grounder_.emplace(flat_, n_);
    }
    if (grounder_) {
      if (grounder_->step(budget)) {
        cnf_ = grounder_->take();
        grounder_.reset();
        solver_.emplace(cnf_);
      }
      return status_;
    }
    auto st = solver_->step(budget);
    if (st == Dpll::Status::Unsat) {
      solver_.reset();
    } else if (st == Dpll::Status::Sat) {
      auto assignment = solver_->assignment();
      FiniteStructure m = decode(assignment, cnf_);
      if (!eval_clauses(original_, m)) throw Error("decoded structure violates the input clauses");
      if (filter_ && !filter_->accept(m)) {
        ++rejected_;
        std::vector<int> block;
        for (int v = 1; v <= cnf_.num_vars; ++v) {
          const Cell& c = cnf_.decode[v - 1];
          if (!filter_->block_symbols.count(c.symbol)) continue;
          if (c.kind == Cell::Kind::Function && !assignment[v]) continue;
          block.push_back(assignment[v] ? -v : v);
        }
        if (block.empty()) {
          solver_.reset();  // nothing to block on: no acceptable model at this size
        } else {
          cnf_.clauses.push_back(block);
          solver_.emplace(cnf_);
        }
      } else {
        model_ = std::move(m);
        solver_.reset();
        status_ = Status::Found;
      }
    }
    return status_;
  }

  Status run(const std::atomic<bool>* cancel = nullptr) {
    while (status_ == Status::Running) {
      if (cancel && cancel->load(std::memory_order_relaxed)) {
        status_ = Status::Cancelled;
        break;
      }
      step(1u << 14);
    }
    return status_;
  }

  void cancel() {
    if (status_ == Status::Running) status_ = Status::Cancelled;
  }

  ModelSearchResult result() const {
    switch (status_) {
      case Status::Found:
        return FoundModel{*model_, n_};
      case Status::Exhausted:
        return NoModelUpTo{n_max_};
      default:
        return SearchCancelled{n_};
    }
  }

  const ClauseSet& flattened() const noexcept { return flat_; }

 private:
  ClauseSet original_;
  ClauseSet flat_;
  int n_max_;
  std::optional<Filter> filter_;
  int n_ = 0;
  std::optional<Grounder> grounder_;
  std::optional<Dpll> solver_;
  PropCnf cnf_;
  std::optional<FiniteStructure> model_;
  std::size_t rejected_ = 0;
  Status status_ = Status::Running;
};

inline ModelSearchResult find_smallest_model(const ClauseSet& clauses, int n_max,
                                             const std::atomic<bool>* cancel = nullptr) {
  ModelSearch search(clauses, n_max);
  search.run(cancel);
  return search.result();
}

}  // namespace kfol
