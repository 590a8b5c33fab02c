// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Property suites are run as child processes.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "kfol/cdp.hpp"
#include "kfol/corpus.hpp"

using namespace kfol;

namespace {

int failures = 0;

void line(int n, bool ok, const std::string& what, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << n << ": " << what << " (" << detail << ")" << std::endl;
  if (!ok) ++failures;
}

std::string secs(double s) {
  std::ostringstream os;
  os.precision(3);
  os << std::fixed << s << "s";
  return os.str();
}

Budget budget(double seconds) {
  Budget b;
  b.seconds = seconds;
  return b;
}

const std::vector<CorpusEntry>& corpus() {
  static const auto c = load_corpus();
  return c;
}

Verdict run_entry(const std::string& id, double seconds) {
  const auto& e = corpus_entry(corpus(), id);
  return decide(e.parsed(), ModalSystem::named(e.system), budget(seconds));
}

// Countermodel evidence checked directly on the Kripke model.
bool evidence_ok(const Verdict& v) {
  const auto* d = v.countermodel_direction();
  if (!d || !d->model) return false;
  return d->model->worlds == d->model_size && !eval_modal(v.goal, *d->model, d->model->real_world) &&
         satisfies_frame(*d->model, v.system);
}

bool proofs_ok(const Verdict& v) {
  for (const auto& d : v.directions)
    if (d.outcome == Outcome::Valid && (!d.proof || !replay(*d.proof, d.refutation_clauses).empty())) return false;
  return true;
}

void criterion1() {
  Verdict v = decide(parse_modal("box p -> dia p"), ModalSystem::named("KT"), budget(5));
  bool ok = v.outcome == Outcome::Valid && v.seconds() <= 5 && proofs_ok(v);
  line(1, ok, "box p -> dia p in KT", std::string(outcome_name(v.outcome)) + " in " + secs(v.seconds()));
}

void criterion2() {
  Verdict v = run_entry("ps1-ow", 30);
  bool ok = v.outcome == Outcome::Valid && v.directions.size() == 2 && v.seconds() <= 30 && proofs_ok(v);
  line(2, ok, "dia box p <-> dia box dia box p in KD45 with splitting",
       std::string(outcome_name(v.outcome)) + ", " + std::to_string(v.directions.size()) + " directions in " +
           secs(v.seconds()));
}

void criterion3() {
  Verdict v = run_entry("ps1-last", 30);
  bool ok = v.outcome == Outcome::Valid && v.directions.size() == 2 && proofs_ok(v);
  std::string detail = outcome_name(v.outcome);
  for (const auto& d : v.directions) {
    ok = ok && d.seconds <= 30;
    detail += ", " + secs(d.seconds);
  }
  line(3, ok, "box box p <-> dia box p in KD45, each direction", detail);
}

void criterion4() {
  Verdict v = decide(parse_modal("box p -> box box p"), ModalSystem::named("K"), budget(10));
  const auto* d = v.countermodel_direction();
  bool ok = v.outcome == Outcome::Invalid && d && d->model_size == 2 && evidence_ok(v) && v.seconds() <= 10;
  // No one-world countermodel: two relations times two valuations.
  for (int r = 0; r < 2 && ok; ++r)
    for (int p = 0; p < 2 && ok; ++p) {
      KripkeModel m;
      m.relations[""];
      if (r) m.relations[""].insert({0, 0});
      if (p) m.valuation["p"].insert(0);
      ok = eval_modal(v.goal, m, 0);
    }
  line(4, ok, "box p -> box box p in K has a smallest countermodel of 2 worlds",
       std::string(outcome_name(v.outcome)) + ", size " + std::to_string(d ? d->model_size : 0) + " in " +
           secs(v.seconds()));
}

void criterion5() {
  const std::vector<std::pair<std::string, int>> table = {{"ps3-M-Pt", 2},    {"ps3-H-L", 3},    {"ps3-Hp-Lp", 2},
                                                          {"ps3-L-Lp", 2},    {"ps3-Lpp-Lp", 2}, {"ps3-Dum4-Dum", 2}};
  bool ok = true;
  std::string detail;
  for (const auto& [id, size] : table) {
    Verdict v = run_entry(id, 60);
    const auto* d = v.countermodel_direction();
    int got = d ? d->model_size : 0;
    ok = ok && v.outcome == Outcome::Invalid && got == size && evidence_ok(v) && v.seconds() <= 60;
    detail += (detail.empty() ? "" : ", ") + id.substr(4) + "=" + std::to_string(got);
  }
  line(5, ok, "M, Pt, H, L, Dum family countermodel sizes in K", detail);
}

void criterion6() {
  Verdict a = run_entry("ps3-M-Pt-K4", 120);
  Verdict b = run_entry("dum2-dum", 120);
  bool ok = a.outcome == Outcome::Valid && b.outcome == Outcome::Valid && proofs_ok(a) && proofs_ok(b);
  line(6, ok, "M -> Pt valid in K4, Dum2 -> Dum valid in KT",
       std::string(outcome_name(a.outcome)) + " in " + secs(a.seconds()) + ", " + outcome_name(b.outcome) + " in " +
           secs(b.seconds()));
}

void criterion7() {
  struct Want {
    const char* id;
    Outcome outcome;
    int size;
  };
  const std::vector<Want> wants = {{"demri-4", Outcome::Valid, 0},          {"demri-9a", Outcome::Valid, 0},
                                   {"demri-5-s5", Outcome::Valid, 0},       {"demri-6a-s5", Outcome::Valid, 0},
                                   {"demri-6", Outcome::Invalid, 1},        {"demri-9", Outcome::Invalid, 1},
                                   {"demri-4-variant", Outcome::Invalid, 1}};
  bool ok = true;
  std::string detail;
  for (const auto& w : wants) {
    Verdict v = run_entry(w.id, 120);
    bool tolerated = std::string(w.id) == "demri-6a-s5" && v.outcome == Outcome::Unknown && !v.directions.empty();
    bool good = v.outcome == w.outcome && (w.outcome == Outcome::Valid ? proofs_ok(v) : evidence_ok(v));
    if (w.size) good = good && v.countermodel_direction()->model_size == w.size;
    for (const auto& d : v.directions) good = good && d.seconds <= 120;
    ok = ok && (good || tolerated);
    detail += (detail.empty() ? "" : ", ") + std::string(w.id) + "=" + outcome_name(v.outcome);
    if (tolerated) detail += " (timeout tolerated)";
  }
  line(7, ok, "Demri formulas", detail);
}

void criterion8() {
  LtlVerdict sat = ltl_decide(parse_modal("X X box p"), budget(5));
  bool ok1 = sat.kind == LtlVerdict::Kind::Satisfiable && sat.lasso &&
             sat.lasso->prefix_states.size() + sat.lasso->loop_states.size() == 1 &&
             eval_ltl_lasso(sat.goal, sat.lasso->word) && sat.seconds <= 5;
  Modal u = parse_modal("X p & X ~p");
  LtlVerdict unsat = ltl_decide(u, budget(5));
  bool refuted = unsat.kind == LtlVerdict::Kind::Unsatisfiable && unsat.proof &&
                 replay(*unsat.proof, unsat.refutation_clauses).empty();
  bool no_model = std::holds_alternative<NoModelUpTo>(find_smallest_model(ltl_assemble(u).countermodel_clauses, 4));
  line(8, ok1 && refuted && no_model, "next-time satisfiability",
       std::string("X X box p ") + kind_name(sat.kind) + " in " + secs(sat.seconds) + ", X p & X ~p " +
           kind_name(unsat.kind) + (no_model ? ", no model up to 4" : ", model found up to 4"));
}

void criterion9() {
  struct Suite {
    const char* binary;
    const char* filter;
  };
  const std::vector<Suite> suites = {
      {KFOL_TEST_TRANSLATOR, "Translate.AgreesWithKripkeSemantics"},
      {KFOL_TEST_FOL, "Clausify.SatisfiabilityPreservedOnPool:Nnf.PreservesTruthOnAllSmallStructures"},
      {KFOL_TEST_MODEL_FINDER, "Dpll.AgreesWithTruthTables:Ground.FaithfulOnPool"},
      {KFOL_TEST_PROVER, "Saturate.AgreesWithGroundOracle:Unify.SoundAndMostGeneral"},
      {KFOL_TEST_CDP, "Corpus.*:Decide.AgreesWithKripkeOracle:Ltl.RandomFormulasHaveCheckedEvidence"},
  };
  auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string failed;
  for (const auto& s : suites) {
    std::string cmd = std::string("\"") + s.binary + "\" --gtest_brief=1 --gtest_filter='" + s.filter + "' > /dev/null 2>&1";
    if (std::system(cmd.c_str()) != 0) {
      ok = false;
      failed += std::string(" ") + s.filter;
    }
  }
  double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  ok = ok && total <= 600;
  line(9, ok, "property suites", (failed.empty() ? "all passed" : "failed:" + failed) + " in " + secs(total));
}

void criterion10() {
  // Bodies of the Demri formulas that are stated for S4 via dia box.
  const std::vector<std::pair<std::string, std::string>> bodies = {
      {"5", "box (p | box q) <-> (box p | box q)"},
      {"6", "(p -> q) <-> F(q, F(p, q))"},
      {"6a", "(p -> q) <-> F(p, F(p, q))"},
      {"9", "box (box p -> box (box q -> box r)) -> box (box (box p -> box q) -> box r)"},
      {"9a", "box (box p -> box (box q -> box r)) -> box (box (box p & box q) -> box r)"},
  };
  bool ok = true;
  std::string detail;
  auto name = [](Satisfiability s) {
    return s == Satisfiability::Satisfiable ? "sat" : s == Satisfiability::Unsatisfiable ? "unsat" : "unknown";
  };
  // The bodies themselves must agree definitively; their negations are run
  // too and may only fail by a definite disagreement.
  for (const auto& [label, text] : bodies) {
    Modal f = expand_macros(text, standard_macros());
    for (const Modal& g : {f, Modal::neg(f)}) {
      bool body = g == f;
      auto s5 = satisfiable(g, ModalSystem::named("S5"), budget(60));
      auto s4 = satisfiable(s5_to_s4(g), ModalSystem::named("S4"), budget(60));
      bool decided = s5 != Satisfiability::Unknown && s4 != Satisfiability::Unknown;
      if (body) ok = ok && decided && s5 == s4;
      if (!body) ok = ok && (!decided || s5 == s4);
      detail += std::string(detail.empty() ? "" : ", ") + (body ? "" : "~") + label + " " + name(s5) + "/" + name(s4);
    }
  }
  line(10, ok, "S5 satisfiability of each Demri body equals S4 satisfiability of its dia box form", detail);
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  std::cout << (failures ? "FAILED " : "ALL PASSED ") << 10 - failures << "/10" << std::endl;
  return failures ? 1 : 0;
}
