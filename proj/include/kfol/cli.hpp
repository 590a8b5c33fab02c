// Command-line front end. run_cli() is the whole program; the kfol binary is
// a thin wrapper so tests can drive it in-process.
#pragma once

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kfol/cdp.hpp"
#include "kfol/corpus.hpp"
#include "kfol/model_finder.hpp"
#include "kfol/prover.hpp"
#include "kfol/translator.hpp"

namespace kfol {

enum ExitCode : int { kExitOk = 0, kExitMismatch = 1, kExitUnknown = 2, kExitUsage = 3 };

namespace cli {

struct Options {
  std::string formula;
  std::string system = "K";
  std::string schemas;
  std::string at;
  std::string emit;
  std::string corpus_file;
  std::string only;
  double budget = 60.0;
  int nmax = 6;
  std::uint64_t seed = 0;
  bool filtered = false;
  bool threaded = false;
  bool quiet = false;
  int atoms = 3;
  int clauses = 5;
  int depth = 1;
};

inline ModalSystem system_of(const Options& o) {
  if (!o.schemas.empty()) return ModalSystem::from_schemas(SchemaSet::parse(o.schemas));
  return ModalSystem::named(o.system);
}

inline Budget budget_of(const Options& o) {
  Budget b;
  b.seconds = o.budget;
  b.n_max = o.nmax;
  b.threaded = o.threaded;
  return b;
}

inline Modal formula_of(const Options& o) { return expand_macros(o.formula, standard_macros()); }

inline int translate_cmd(const Options& o, std::ostream& out) {
  Modal f = formula_of(o);
  if (!o.at.empty()) {
    Fol t = translate(f, Term::constant(o.at));
    out << (o.emit == "tptp" ? to_tptp("translation", "plain", t) : to_string(t)) << '\n';
    return kExitOk;
  }
  auto p = assemble(f, system_of(o));
  if (o.emit == "tptp") {
    out << problem_to_tptp(p);
    return kExitOk;
  }
  out << "% system " << p.system.name << '\n';
  for (const auto& a : p.axioms) out << "axiom: " << to_string(a) << '\n';
  out << "validity: " << to_string(p.validity_formula) << '\n';
  out << "refutation clauses:\n";
  for (const auto& c : p.refutation_clauses) out << "  " << to_string(c) << '\n';
  return kExitOk;
}

inline int prove_cmd(const Options& o, std::ostream& out) {
  Modal f = formula_of(o);
  ModalSystem sys = system_of(o);
  Budget b = budget_of(o);
  SaturationLimits lim;
  lim.max_seconds = o.budget;
  bool all_valid = true, refuted_any = false;
  for (const auto& part : split_goal(f)) {
    auto p = assemble(part, sys, b.clausify);
    auto r = saturate(p.refutation_clauses, lim, b.prover_options);
    out << print_modal(part) << ": ";
    if (auto* ref = std::get_if<Refutation>(&r)) {
      out << "Valid (" << ref->report.given << " given, " << ref->report.generated << " generated)\n";
      if (!o.quiet) out << proof_trace(ref->proof);
    } else if (std::holds_alternative<Saturated>(r)) {
      out << "Not valid (clause set saturated)\n";
      refuted_any = true;
      all_valid = false;
    } else {
      out << "Unknown (" << std::get<ResourceOut>(r).report.reason << ")\n";
      all_valid = false;
    }
  }
  out << (all_valid ? "Valid" : refuted_any ? "Invalid" : "Unknown") << '\n';
  return all_valid || refuted_any ? kExitOk : kExitUnknown;
}

inline int find_model_cmd(const Options& o, std::ostream& out) {
  Modal f = formula_of(o);
  ModalSystem sys = system_of(o);
  if (o.emit == "dimacs") {
    auto p = assemble(f, sys);
    out << to_dimacs(ground(flatten(p.countermodel_clauses), o.nmax));
    return kExitOk;
  }
  for (const auto& part : split_goal(f)) {
    auto p = assemble(part, sys);
    auto r = find_smallest_model(p.countermodel_clauses, o.nmax);
    if (auto* m = std::get_if<FoundModel>(&r)) {
      KripkeModel k = to_kripke(m->structure, p);
      out << "Invalid (" << m->size << " worlds)\n";
      out << "falsified: " << print_modal(part) << '\n';
      out << print_kripke(k);
      return kExitOk;
    }
  }
  out << "No countermodel up to " << o.nmax << " worlds\n";
  return kExitUnknown;
}

inline int decide_cmd(const Options& o, std::ostream& out) {
  Verdict v = decide(formula_of(o), system_of(o), budget_of(o));
  if (v.outcome == Outcome::Invalid) {
    const auto* d = v.countermodel_direction();
    out << "Invalid (" << d->model_size << " worlds)\n" << print_kripke(*d->model);
  } else {
    out << outcome_name(v.outcome) << '\n';
  }
  if (!o.quiet) out << report(v, false);
  return v.outcome == Outcome::Unknown ? kExitUnknown : kExitOk;
}

inline int ltl_cmd(const Options& o, std::ostream& out) {
  LtlVerdict v = ltl_decide(formula_of(o), budget_of(o));
  out << kind_name(v.kind);
  if (v.lasso) out << " (" << v.lasso->prefix_states.size() + v.lasso->loop_states.size() << "-state lasso)";
  out << '\n';
  if (v.lasso) out << "lasso: " << print_lasso(v.lasso->word) << '\n';
  if (!o.quiet) out << report(v, false);
  return v.kind == LtlVerdict::Kind::Unknown ? kExitUnknown : kExitOk;
}

struct BenchRow {
  std::string id, system, expect, got, size, status;
  double seconds = 0;
};

inline int bench_cmd(const Options& o, std::ostream& out) {
  std::vector<CorpusEntry> corpus;
  if (o.corpus_file.empty()) {
    corpus = load_corpus();
  } else {
    std::ifstream in(o.corpus_file);
    if (!in) throw Error("cannot read corpus file '" + o.corpus_file + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    corpus = parse_corpus(ss.str());
  }
  Budget b = budget_of(o);
  std::vector<BenchRow> rows;
  bool mismatch = false, unknown = false;
  for (const auto& e : corpus) {
    if (!o.only.empty() && e.id.find(o.only) == std::string::npos) continue;
    Verdict v = decide(e.parsed(), ModalSystem::named(e.system), b);
    BenchRow r{e.id, e.system, outcome_name(e.expect), outcome_name(v.outcome), "-", "ok", v.seconds()};
    if (const auto* d = v.countermodel_direction()) r.size = std::to_string(d->model_size);
    if (v.outcome == Outcome::Unknown) {
      r.status = e.tolerate_unknown ? "tolerated" : "UNKNOWN";
      unknown = unknown || !e.tolerate_unknown;
    } else if (v.outcome != e.expect) {
      r.status = "MISMATCH";
      mismatch = true;
    } else if (e.size && v.countermodel_direction() && v.countermodel_direction()->model_size != *e.size) {
      r.status = "SIZE " + std::to_string(*e.size) + " expected";
      mismatch = true;
    }
    rows.push_back(r);
  }
  out << std::left << std::setw(18) << "id" << std::setw(7) << "system" << std::setw(9) << "expect" << std::setw(9)
      << "verdict" << std::setw(6) << "size" << std::setw(10) << "seconds" << "status\n";
  for (const auto& r : rows)
    out << std::left << std::setw(18) << r.id << std::setw(7) << r.system << std::setw(9) << r.expect << std::setw(9)
        << r.got << std::setw(6) << r.size << std::setw(10) << std::fixed << std::setprecision(3) << r.seconds
        << r.status << '\n';
  for (const auto& r : rows)
    out << "RESULT id=" << r.id << " system=" << r.system << " expect=" << r.expect << " verdict=" << r.got
        << " size=" << r.size << " seconds=" << std::fixed << std::setprecision(3) << r.seconds << " status=" << r.status
        << '\n';
  if (mismatch) return kExitMismatch;
  return unknown ? kExitUnknown : kExitOk;
}

inline int random_cmd(const Options& o, std::ostream& out) {
  RandomCnfSpec spec;
  spec.atoms = o.atoms;
  spec.clauses = o.clauses;
  spec.max_depth = o.depth;
  spec.seed = o.seed;
  spec.filtered = o.filtered;
  Modal f = gen_random_3cnf(spec);
  out << print_modal(f) << '\n';
  return kExitOk;
}

}  // namespace cli

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  cli::Options o;
  CLI::App app{"Modal logic decision toolkit: relational translation, resolution and finite model search", "kfol"};
  app.require_subcommand(1);

  auto add_formula = [&](CLI::App* c) { c->add_option("formula", o.formula, "formula text (macros allowed)")->required(); };
  auto add_system = [&](CLI::App* c) {
    auto* sys = c->add_option("--system", o.system, "modal system: K, KD45, S4, S5, ...");
    c->add_option("--schemas", o.schemas, "schema letters, e.g. D45 or T4")->excludes(sys);
  };
  auto add_budget = [&](CLI::App* c) {
    c->add_option("--budget", o.budget, "seconds per direction")->check(CLI::PositiveNumber);
    c->add_option("--nmax", o.nmax, "largest domain size for model search")->check(CLI::Range(1, 64));
  };

  auto* translate = app.add_subcommand("translate", "print the first-order translation");
  add_formula(translate);
  add_system(translate);
  translate->add_option("--at", o.at, "translate at this world constant only");
  translate->add_option("--emit", o.emit, "output format")->check(CLI::IsMember({"tptp"}));

  auto* prove = app.add_subcommand("prove", "run the resolution prover only");
  add_formula(prove);
  add_system(prove);
  add_budget(prove);
  prove->add_flag("--quiet", o.quiet, "omit the proof");

  auto* find = app.add_subcommand("find-model", "search for the smallest countermodel only");
  add_formula(find);
  add_system(find);
  add_budget(find);
  find->add_option("--emit", o.emit, "print the ground CNF at size nmax instead")->check(CLI::IsMember({"dimacs"}));

  auto* dec = app.add_subcommand("decide", "race prover and model finder");
  add_formula(dec);
  add_system(dec);
  add_budget(dec);
  dec->add_flag("--threads", o.threaded, "run the two processes on separate threads");
  dec->add_flag("--quiet", o.quiet, "verdict and model only");

  auto* ltl = app.add_subcommand("ltl-sat", "satisfiability of a next-time temporal formula");
  add_formula(ltl);
  add_budget(ltl);
  ltl->add_flag("--quiet", o.quiet, "verdict and lasso only");

  auto* bench = app.add_subcommand("bench", "run the benchmark corpus");
  add_budget(bench);
  bench->add_option("--corpus", o.corpus_file, "stanza corpus file instead of the embedded one");
  bench->add_option("--only", o.only, "run entries whose id contains this text");
  bench->add_flag("--threads", o.threaded, "run the two processes on separate threads");

  auto* random = app.add_subcommand("random", "print a random modal 3CNF formula");
  random->add_option("--seed", o.seed, "generator seed");
  random->add_flag("--filtered", o.filtered, "no repeated or complementary literals in a clause");
  random->add_option("--atoms", o.atoms, "number of atoms")->check(CLI::PositiveNumber);
  random->add_option("--clauses", o.clauses, "number of clauses")->check(CLI::PositiveNumber);
  random->add_option("--depth", o.depth, "maximum modal depth")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*translate) return cli::translate_cmd(o, out);
    if (*prove) return cli::prove_cmd(o, out);
    if (*find) return cli::find_model_cmd(o, out);
    if (*dec) return cli::decide_cmd(o, out);
    if (*ltl) return cli::ltl_cmd(o, out);
    if (*bench) return cli::bench_cmd(o, out);
    if (*random) return cli::random_cmd(o, out);
  } catch (const SyntaxError& e) {
    err << "kfol: syntax error at " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "kfol: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace kfol
