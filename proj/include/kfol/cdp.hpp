// The concurrent decision procedure: a refutation prover and a finite model
// finder race on the two sides of a translated problem; the first definitive
// answer wins and the other process is cancelled.
#pragma once

#include <atomic>
#include <chrono>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "kfol/fol.hpp"
#include "kfol/kripke.hpp"
#include "kfol/model_finder.hpp"
#include "kfol/modal.hpp"
#include "kfol/prover.hpp"
#include "kfol/translator.hpp"

namespace kfol {

struct Budget {
  double seconds = 60.0;  // per direction
  int n_max = 6;
  SaturationLimits prover_limits{};
  SaturationOptions prover_options{.age_ratio = 2};
  ClausifyOptions clausify{.definitional = true};
  // Model-finder work per round-robin slice (clause instances or DPLL
  // assignments); the prover gets one given-clause iteration per slice.
  std::size_t finder_quantum = 64;
  // Run the two processes on separate threads instead of time slicing.
  bool threaded = false;
};

enum class Outcome { Valid, Invalid, Unknown };

inline const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Valid:
      return "Valid";
    case Outcome::Invalid:
      return "Invalid";
    default:
      return "Unknown";
  }
}

// Result of racing the two processes on one (possibly split) goal.
struct DirectionResult {
  Modal goal;
  Outcome outcome = Outcome::Unknown;
  std::optional<ProofObject> proof;
  ClauseSet refutation_clauses;  // the prover's input, for replay
  std::optional<FiniteStructure> structure;
  std::optional<KripkeModel> model;
  int model_size = 0;
  int largest_size_tried = 0;
  bool prover_saturated = false;
  double prover_seconds = 0.0;
  double finder_seconds = 0.0;
  double seconds = 0.0;
  std::string note;
};

struct Verdict {
  Outcome outcome = Outcome::Unknown;
  Modal goal;
  ModalSystem system;
  std::vector<DirectionResult> directions;
  int falsified_direction = -1;  // index into directions when Invalid

  const DirectionResult* countermodel_direction() const {
    return falsified_direction >= 0 ? &directions[falsified_direction] : nullptr;
  }
  double seconds() const {
    double s = 0;
    for (const auto& d : directions) s += d.seconds;
    return s;
  }
};

// ---------------------------------------------------------------------------
// Reading first-order models as Kripke models

inline KripkeModel to_kripke(const FiniteStructure& m, const TranslationProblem& p) {
  KripkeModel k;
  k.worlds = m.size;
  for (const auto& idx : p.indices) {
    auto& rel = k.relations[idx];
    auto it = m.predicates.find(relation_symbol(idx));
    if (it == m.predicates.end()) continue;
    for (int a = 0; a < m.size; ++a)
      for (int b = 0; b < m.size; ++b)
        if (m.pred(relation_symbol(idx), {a, b})) rel.insert({a, b});
  }
  for (const auto& atom : p.atoms) {
    auto& val = k.valuation[atom];
    if (!m.predicates.count(atom)) continue;
    for (int w = 0; w < m.size; ++w)
      if (m.pred(atom, {w})) val.insert(w);
  }
  k.real_world = m.functions.count(kRealWorld) ? m.func(kRealWorld, {}) : 0;
  if (p.temporal && m.functions.count(kSuccessorSymbol)) {
    std::vector<World> succ(m.size);
    for (int w = 0; w < m.size; ++w) succ[w] = m.func(kSuccessorSymbol, {w});
    k.successor = succ;
  }
  return k;
}

// True iff every relation of `k` has the frame properties of `sys`.
inline bool satisfies_frame(const KripkeModel& k, const ModalSystem& sys) {
  for (const auto& [idx, rel] : k.relations) {
    SchemaSet s = sys.schemas_for(idx);
    if (s.has(Schema::D) && !is_serial(rel, k.worlds)) return false;
    if (s.has(Schema::T) && !is_reflexive(rel, k.worlds)) return false;
    if (s.has(Schema::B) && !is_symmetric(rel, k.worlds)) return false;
    if (s.has(Schema::Four) && !is_transitive(rel, k.worlds)) return false;
    if (s.has(Schema::Five) && !is_euclidean(rel, k.worlds)) return false;
  }
  return true;
}

struct Lasso {
  LassoWord word;
  std::vector<int> prefix_states;
  std::vector<int> loop_states;
};

// Follows the successor function from `start` until an element repeats.
inline Lasso extract_lasso(const FiniteStructure& m, int start, const std::set<std::string>& atoms) {
  std::vector<int> path;
  std::vector<int> first_seen(m.size, -1);
  int cur = start;
  while (first_seen[cur] < 0) {
    first_seen[cur] = static_cast<int>(path.size());
    path.push_back(cur);
    cur = m.func(kSuccessorSymbol, {cur});
  }
  Lasso l;
  int cut = first_seen[cur];
  auto letter = [&](int s) {
    Letter out;
    for (const auto& a : atoms)
      if (m.predicates.count(a) && m.pred(a, {s})) out.insert(a);
    return out;
  };
  for (int i = 0; i < static_cast<int>(path.size()); ++i) {
    if (i < cut) {
      l.prefix_states.push_back(path[i]);
      l.word.prefix.push_back(letter(path[i]));
    } else {
      l.loop_states.push_back(path[i]);
      l.word.loop.push_back(letter(path[i]));
    }
  }
  return l;
}

// ---------------------------------------------------------------------------
// The race

namespace detail {

using Clock = std::chrono::steady_clock;

inline double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct RaceOutcome {
  Saturation::Status prover = Saturation::Status::Running;
  ModelSearch::Status finder = ModelSearch::Status::Running;
  bool prover_won = false;
  bool finder_won = false;
  double prover_seconds = 0;
  double finder_seconds = 0;
};

// Runs `sat` and `search` fairly until one is definitive (refutation or
// accepted model) or the budget runs out; the loser is cancelled.
inline RaceOutcome race(Saturation& sat, ModelSearch& search, const Budget& budget) {
  RaceOutcome r;
  auto start = Clock::now();
  if (budget.threaded) {
    std::atomic<bool> stop{false};
    std::thread prover([&] {
      auto t0 = Clock::now();
      while (sat.status() == Saturation::Status::Running && !stop.load()) {
        sat.step();
        if (since(start) > budget.seconds) break;
      }
      if (sat.status() == Saturation::Status::Refuted) stop = true;
      r.prover_seconds = since(t0);
    });
    auto t0 = Clock::now();
    while (search.status() == ModelSearch::Status::Running && !stop.load()) {
      search.step(budget.finder_quantum);
      if (since(start) > budget.seconds) break;
    }
    if (search.status() == ModelSearch::Status::Found) stop = true;
    r.finder_seconds = since(t0);
    // With no winner yet, the prover keeps the remaining budget.
    prover.join();
  } else {
    while (since(start) <= budget.seconds) {
      bool p_run = sat.status() == Saturation::Status::Running;
      bool f_run = search.status() == ModelSearch::Status::Running;
      if (!p_run && !f_run) break;
      if (p_run) {
        auto t0 = Clock::now();
        if (sat.step() == Saturation::Status::Refuted) {
          r.prover_seconds += since(t0);
          break;
        }
        r.prover_seconds += since(t0);
      }
      if (f_run) {
        auto t0 = Clock::now();
        if (search.step(budget.finder_quantum) == ModelSearch::Status::Found) {
          r.finder_seconds += since(t0);
          break;
        }
        r.finder_seconds += since(t0);
      }
      // A saturated clause set has a model; only the finder can still help.
      if (sat.status() == Saturation::Status::Saturated && search.status() != ModelSearch::Status::Running) break;
    }
  }
  r.prover_won = sat.status() == Saturation::Status::Refuted;
  r.finder_won = !r.prover_won && search.status() == ModelSearch::Status::Found;
  if (r.prover_won) search.cancel();
  if (r.finder_won) sat.cancel("model found");
  if (!r.prover_won && !r.finder_won) {
    sat.cancel("budget exhausted");
    search.cancel();
  }
  r.prover = sat.status();
  r.finder = search.status();
  return r;
}

inline SaturationLimits direction_limits(const Budget& b) {
  SaturationLimits l = b.prover_limits;
  l.max_seconds = std::min(l.max_seconds, b.seconds);
  return l;
}

}  // namespace detail

inline DirectionResult decide_direction(const Modal& goal, const ModalSystem& sys, const Budget& budget) {
  auto t0 = detail::Clock::now();
  TranslationProblem p = assemble(goal, sys, budget.clausify);
  DirectionResult d;
  d.goal = goal;
  d.refutation_clauses = p.refutation_clauses;
  Saturation sat(p.refutation_clauses, detail::direction_limits(budget), budget.prover_options);
  ModelSearch search(p.countermodel_clauses, budget.n_max);
  auto r = detail::race(sat, search, budget);
  d.prover_seconds = r.prover_seconds;
  d.finder_seconds = r.finder_seconds;
  d.largest_size_tried = search.current_size();
  d.prover_saturated = r.prover == Saturation::Status::Saturated;
  if (r.prover_won) {
    d.outcome = Outcome::Valid;
    d.proof = std::get<Refutation>(sat.result()).proof;
  } else if (r.finder_won) {
    auto found = std::get<FoundModel>(search.result());
    KripkeModel k = to_kripke(found.structure, p);
    if (eval_modal(goal, k, k.real_world)) throw Error("extracted countermodel does not falsify the goal");
    if (!satisfies_frame(k, sys)) throw Error("extracted countermodel violates the frame conditions");
    d.outcome = Outcome::Invalid;
    d.structure = std::move(found.structure);
    d.model = std::move(k);
    d.model_size = found.size;
  } else {
    d.outcome = Outcome::Unknown;
    std::ostringstream note;
    note << "prover: " << sat.report().reason << " after " << sat.report().given << " given clauses; finder: ";
    note << (r.finder == ModelSearch::Status::Exhausted ? "no model up to " + std::to_string(budget.n_max)
                                                        : "stopped at size " + std::to_string(search.current_size()));
    if (d.prover_saturated) note << " (clause set saturated: goal is not valid)";
    d.note = note.str();
  }
  d.seconds = detail::since(t0);
  return d;
}

// Decides validity of `goal` in `sys`. A top-level biconditional is split
// into its two implications, decided in order.
inline Verdict decide(const Modal& goal, const ModalSystem& sys, const Budget& budget = {}) {
  if (signature(goal).has_next) throw Error("decide: next-time operator in a modal formula");
  Verdict v;
  v.goal = goal;
  v.system = sys;
  bool all_valid = true;
  for (const auto& part : split_goal(goal)) {
    v.directions.push_back(decide_direction(part, sys, budget));
    const auto& d = v.directions.back();
    if (d.outcome == Outcome::Invalid) {
      v.outcome = Outcome::Invalid;
      v.falsified_direction = static_cast<int>(v.directions.size()) - 1;
      return v;
    }
    if (d.outcome != Outcome::Valid) all_valid = false;
  }
  v.outcome = all_valid ? Outcome::Valid : Outcome::Unknown;
  return v;
}

enum class Satisfiability { Satisfiable, Unsatisfiable, Unknown };

// Satisfiability in `sys` via validity of the negation.
inline Satisfiability satisfiable(const Modal& f, const ModalSystem& sys, const Budget& budget = {}) {
  Verdict v = decide(Modal::neg(f), sys, budget);
  if (v.outcome == Outcome::Invalid) return Satisfiability::Satisfiable;
  if (v.outcome == Outcome::Valid) return Satisfiability::Unsatisfiable;
  return Satisfiability::Unknown;
}

// ---------------------------------------------------------------------------
// Next-time temporal satisfiability

struct LtlVerdict {
  enum class Kind { Satisfiable, Unsatisfiable, Unknown };
  Kind kind = Kind::Unknown;
  Modal goal;
  std::optional<Lasso> lasso;
  std::optional<FiniteStructure> structure;
  std::optional<KripkeModel> model;
  std::optional<ProofObject> proof;
  ClauseSet refutation_clauses;
  int model_size = 0;
  std::size_t rejected_models = 0;
  double seconds = 0.0;
  std::string note;
};

inline const char* kind_name(LtlVerdict::Kind k) {
  switch (k) {
    case LtlVerdict::Kind::Satisfiable:
      return "Satisfiable";
    case LtlVerdict::Kind::Unsatisfiable:
      return "Unsatisfiable";
    default:
      return "Unknown";
  }
}

inline LtlVerdict ltl_decide(const Modal& goal, const Budget& budget = {}) {
  auto t0 = detail::Clock::now();
  TranslationProblem p = ltl_assemble(goal, budget.clausify);
  LtlVerdict v;
  v.goal = goal;
  v.refutation_clauses = p.refutation_clauses;

  ModelSearch::Filter filter;
  filter.accept = [&](const FiniteStructure& m) {
    int start = m.functions.count(kRealWorld) ? m.func(kRealWorld, {}) : 0;
    return eval_ltl_lasso(goal, extract_lasso(m, start, p.atoms).word);
  };
  filter.block_symbols = p.atoms;
  filter.block_symbols.insert(kSuccessorSymbol);
  filter.block_symbols.insert(kRealWorld);

  Saturation sat(p.refutation_clauses, detail::direction_limits(budget), budget.prover_options);
  ModelSearch search(p.countermodel_clauses, budget.n_max, filter);
  auto r = detail::race(sat, search, budget);
  v.rejected_models = search.rejected();
  if (r.prover_won) {
    v.kind = LtlVerdict::Kind::Unsatisfiable;
    v.proof = std::get<Refutation>(sat.result()).proof;
  } else if (r.finder_won) {
    auto found = std::get<FoundModel>(search.result());
    int start = found.structure.functions.count(kRealWorld) ? found.structure.func(kRealWorld, {}) : 0;
    v.kind = LtlVerdict::Kind::Satisfiable;
    v.lasso = extract_lasso(found.structure, start, p.atoms);
    v.model = to_kripke(found.structure, p);
    v.structure = std::move(found.structure);
    v.model_size = found.size;
  } else {
    v.note = "prover: " + sat.report().reason + "; finder stopped at size " + std::to_string(search.current_size());
  }
  v.seconds = detail::since(t0);
  return v;
}

// ---------------------------------------------------------------------------
// Reports

inline std::string print_lasso(const LassoWord& w) {
  auto letters = [](const std::vector<Letter>& ls) {
    std::string s = "[";
    for (std::size_t i = 0; i < ls.size(); ++i) {
      s += i ? ", {" : "{";
      bool first = true;
      for (const auto& a : ls[i]) {
        s += (first ? "" : ",") + a;
        first = false;
      }
      s += "}";
    }
    return s + "]";
  };
  return "prefix=" + letters(w.prefix) + " loop=" + letters(w.loop);
}

inline std::string report(const Verdict& v, bool with_evidence = true) {
  std::ostringstream os;
  os << "outcome: " << outcome_name(v.outcome) << '\n';
  os << "system: " << v.system.name << '\n';
  os << "formula: " << print_modal(v.goal) << '\n';
  for (std::size_t i = 0; i < v.directions.size(); ++i) {
    const auto& d = v.directions[i];
    os << "direction " << i + 1 << ": " << print_modal(d.goal) << " => " << outcome_name(d.outcome);
    if (d.outcome == Outcome::Invalid) os << " (" << d.model_size << " worlds)";
    os << '\n';
    os << "  timings: prover " << d.prover_seconds << "s, finder " << d.finder_seconds << "s, total " << d.seconds
       << "s; sizes tried: 1.." << d.largest_size_tried << '\n';
    if (!d.note.empty()) os << "  note: " << d.note << '\n';
    if (!with_evidence) continue;
    if (d.proof) {
      os << "  proof:\n";
      std::istringstream lines(proof_trace(*d.proof));
      for (std::string line; std::getline(lines, line);) os << "    " << line << '\n';
    }
    if (d.model) {
      os << "  model:\n";
      std::istringstream lines(print_kripke(*d.model));
      for (std::string line; std::getline(lines, line);) os << "    " << line << '\n';
    }
  }
  return os.str();
}

inline std::string report(const LtlVerdict& v, bool with_evidence = true) {
  std::ostringstream os;
  os << "outcome: " << kind_name(v.kind) << '\n';
  os << "formula: " << print_modal(v.goal) << '\n';
  os << "timings: total " << v.seconds << "s; rejected models: " << v.rejected_models << '\n';
  if (!v.note.empty()) os << "note: " << v.note << '\n';
  if (v.lasso) {
    os << "states: " << v.model_size << '\n';
    os << "lasso: " << print_lasso(v.lasso->word) << '\n';
  }
  if (with_evidence && v.model) os << "model:\n" << print_kripke(*v.model);
  if (with_evidence && v.proof) os << "proof:\n" << proof_trace(*v.proof);
  return os.str();
}

}  // namespace kfol
