// Benchmark corpus (stanza format), the standard macro table and a seeded
// random generator for modal 3CNF formulas.
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "kfol/cdp.hpp"
#include "kfol/modal.hpp"

namespace kfol {

inline const MacroTable& standard_macros() {
  static const MacroTable table = [] {
    MacroTable t;
    auto def = [&](const char* name, std::vector<std::string> params, const char* body) {
      t[name] = Macro{std::move(params), body};
    };
    def("M", {}, "box dia p -> dia box p");
    def("Pt", {}, "box (p | dia p) -> dia (p & box p)");
    def("H", {}, "(box (p | q) & box (box p | q) & box (p | box q)) -> (box p | box q)");
    def("Hp", {}, "(box (box p | q) & box (p | box q)) -> (box p | box q)");
    def("L", {}, "box ((p & box p) -> q) | box ((q & box q) -> p)");
    def("Lp", {}, "box (box p -> q) | box (box q -> p)");
    def("Lpp", {}, "box (box p -> box q) | box (box q -> box p)");
    def("Dum", {}, "box (box (p -> box p) -> p) -> (dia box p -> p)");
    def("Dum2", {}, "box (box (p -> box p) -> box p) -> (dia box p -> p)");
    def("Dum4", {}, "box (box (p -> box p) -> p) -> (dia box p -> (p | box p))");
    def("F", {"A", "B"}, "~A | ~dia (A & B) | (B & dia (A & ~B))");
    return t;
  }();
  return table;
}

struct CorpusEntry {
  std::string id;
  std::string formula;  // source text, may use the standard macros
  std::string system;
  Outcome expect = Outcome::Valid;
  std::optional<int> size;  // smallest countermodel size, when known
  bool tolerate_unknown = false;
  std::string note;

  Modal parsed() const { return expand_macros(formula, standard_macros()); }
};

// Stanzas are blocks of `key: value` lines separated by blank lines; `#`
// starts a comment line. Keys: id, formula, system, expect, size, tolerate,
// note.
inline std::vector<CorpusEntry> parse_corpus(std::string_view text) {
  std::vector<CorpusEntry> out;
  std::optional<CorpusEntry> cur;
  int line_no = 0;
  auto fail = [&](const std::string& msg) { throw Error("corpus line " + std::to_string(line_no) + ": " + msg); };
  auto finish = [&] {
    if (!cur) return;
    if (cur->id.empty() || cur->formula.empty() || cur->system.empty()) fail("stanza needs id, formula and system");
    try {
      (void)cur->parsed();
      (void)ModalSystem::named(cur->system);
    } catch (const Error& e) {
      fail(cur->id + ": " + e.what());
    }
    out.push_back(std::move(*cur));
    cur.reset();
  };
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
      finish();
      continue;
    }
    if (line[first] == '#') continue;
    auto colon = line.find(':', first);
    if (colon == std::string::npos) fail("expected 'key: value'");
    std::string key = line.substr(first, colon - first);
    std::string value = line.substr(colon + 1);
    value.erase(0, value.find_first_not_of(" \t"));
    value.erase(value.find_last_not_of(" \t\r") + 1);
    if (!cur) cur.emplace();
    if (key == "id") {
      cur->id = value;
    } else if (key == "formula") {
      cur->formula = value;
    } else if (key == "system") {
      cur->system = value;
    } else if (key == "expect") {
      if (value == "valid")
        cur->expect = Outcome::Valid;
      else if (value == "invalid")
        cur->expect = Outcome::Invalid;
      else
        fail("expect must be valid or invalid");
    } else if (key == "size") {
      try {
        cur->size = std::stoi(value);
      } catch (const std::exception&) {
        fail("bad size '" + value + "'");
      }
    } else if (key == "tolerate") {
      if (value != "unknown") fail("tolerate must be 'unknown'");
      cur->tolerate_unknown = true;
    } else if (key == "note") {
      cur->note = value;
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  finish();
  return out;
}

inline constexpr std::string_view kEmbeddedCorpus = R"(# Worked examples
id: kt-d
formula: box p -> dia p
system: KT
expect: valid
note: worked translation example

id: k-4
formula: box p -> box box p
system: K
expect: invalid
size: 2
note: countermodel table, two worlds

# KD45 equivalences
id: ps1-ow
formula: dia box p <-> dia box dia box p
system: KD45
expect: valid
note: Ohlbach and Weidenbach example, proved after goal splitting

id: ps1-last
formula: box box p <-> dia box p
system: KD45
expect: valid
note: last of the KD45 equivalences

# Demri formulas, S4 (multimodal 4 uses S4 for every agent)
id: demri-4
formula: [c](~PC -> [b]~PC) & [c][b][a](PC | PB | PA) & [c][b](~PB -> [a]~PB) & [c][b](~PC -> [a]~PC) & [c]~[b]PB & [c][b]~[a]PA -> [c]PC
system: S4
expect: valid
note: three wise men

id: demri-4-variant
formula: [c](~PC -> [b]~PC) & [c][b][a](PC | PB | PA) & [c][b](~PB -> [a]~PB) & [c][b](~PC -> [a]~PC) & [c]~[b]PB & [c][b]~[a]PA -> [b]PB
system: S4
expect: invalid
size: 1
note: wise men with the conclusion replaced by [b]PB

id: demri-5
formula: dia box ((box (p | box q)) <-> (box p | box q))
system: S4
expect: valid
note: formula 5 given directly to S4; the S5 route below is the reference check

id: demri-5-s5
formula: box (p | box q) <-> (box p | box q)
system: S5
expect: valid
note: body of formula 5 proved in S5

id: demri-6
formula: dia box ((p -> q) <-> F(q, F(p, q)))
system: S4
expect: invalid
size: 1
note: formula 6 as printed with the typo, negation has a one-world model

id: demri-6a
formula: dia box ((p -> q) <-> F(p, F(p, q)))
system: S4
expect: valid
tolerate: unknown
note: corrected formula 6 given directly to S4

id: demri-6a-s5
formula: (p -> q) <-> F(p, F(p, q))
system: S5
expect: valid
note: body of corrected formula 6 proved in S5

id: demri-9
formula: box (box (box p -> box (box q -> box r)) -> box (box (box p -> box q) -> box r))
system: S4
expect: invalid
size: 1
note: formula 9 as printed with the typo, negation has a one-world model

id: demri-9a
formula: box (box (box p -> box (box q -> box r)) -> box (box (box p & box q) -> box r))
system: S4
expect: valid
note: corrected formula 9

# M, Pt, H, L and Dum family
id: ps3-M-Pt
formula: M -> Pt
system: K
expect: invalid
size: 2

id: ps3-M-Pt-K4
formula: M -> Pt
system: K4
expect: valid

id: ps3-H-L
formula: H -> L
system: K
expect: invalid
size: 3

id: ps3-Hp-Lp
formula: Hp -> Lp
system: K
expect: invalid
size: 2

id: ps3-L-Lp
formula: L -> Lp
system: K
expect: invalid
size: 2

id: ps3-Lpp-Lp
formula: Lpp -> Lp
system: K
expect: invalid
size: 2

id: ps3-Dum4-Dum
formula: Dum4 -> Dum
system: K
expect: invalid
size: 2

id: dum2-dum
formula: Dum2 -> Dum
system: KT
expect: valid

# Schema battery; sizes are recorded by the bench, not asserted
id: schema-D
formula: box p -> dia p
system: KD
expect: valid

id: schema-D-K
formula: box p -> dia p
system: K
expect: invalid

id: schema-T
formula: box p -> p
system: KT
expect: valid

id: schema-T-K
formula: box p -> p
system: K
expect: invalid

id: schema-B
formula: p -> box dia p
system: KTB
expect: valid

id: schema-B-K
formula: p -> box dia p
system: K
expect: invalid

id: schema-4-K4
formula: box p -> box box p
system: K4
expect: valid

id: schema-4-S4
formula: box p -> box box p
system: S4
expect: valid

id: schema-5-K5
formula: dia p -> box dia p
system: K5
expect: valid

id: schema-5-S5
formula: dia p -> box dia p
system: S5
expect: valid

id: schema-5-K
formula: dia p -> box dia p
system: K
expect: invalid
)";

inline std::vector<CorpusEntry> load_corpus() { return parse_corpus(kEmbeddedCorpus); }

inline const CorpusEntry& corpus_entry(const std::vector<CorpusEntry>& corpus, std::string_view id) {
  for (const auto& e : corpus)
    if (e.id == id) return e;
  throw Error("no corpus entry '" + std::string(id) + "'");
}

// ---------------------------------------------------------------------------
// Random modal 3CNF

struct RandomCnfSpec {
  int atoms = 3;
  int clauses = 5;
  int literals_per_clause = 3;
  int max_depth = 1;
  std::uint64_t seed = 0;
  double box_probability = 0.5;
  // Reject repeated or complementary literals within a clause.
  bool filtered = false;
};

namespace detail {

class CnfGenerator {
 public:
  explicit CnfGenerator(const RandomCnfSpec& s) : s_(s), rng_(s.seed) {
    if (s.atoms < 1 || s.clauses < 1 || s.literals_per_clause < 1 || s.max_depth < 0)
      throw Error("random 3CNF: sizes must be positive");
    if (s.filtered && s.literals_per_clause > s.atoms)
      throw Error("random 3CNF: filtered mode needs at least as many atoms as literals per clause");
  }

  Modal formula() {
    std::vector<Modal> cs;
    for (int i = 0; i < s_.clauses; ++i) cs.push_back(clause(s_.max_depth));
    return fold(cs, ModalOp::And);
  }

 private:
  static Modal fold(const std::vector<Modal>& xs, ModalOp op) {
    Modal out = xs.front();
    for (std::size_t i = 1; i < xs.size(); ++i) out = Modal::binary(op, out, xs[i]);
    return out;
  }

  Modal literal(int depth) {
    std::bernoulli_distribution boxed(depth > 0 ? s_.box_probability : 0.0);
    std::bernoulli_distribution negated(0.5);
    std::uniform_int_distribution<int> atom(1, s_.atoms);
    Modal core = boxed(rng_) ? Modal::box(clause(depth - 1)) : Modal::atom("p" + std::to_string(atom(rng_)));
    return negated(rng_) ? Modal::neg(core) : core;
  }

  static Modal base(const Modal& l) { return l.op() == ModalOp::Not ? l.child(0) : l; }

  Modal clause(int depth) {
    std::vector<Modal> lits;
    while (static_cast<int>(lits.size()) < s_.literals_per_clause) {
      Modal l = literal(depth);
      if (s_.filtered) {
        bool clash = false;
        for (const auto& m : lits) clash = clash || base(m) == base(l);
        if (clash) continue;
      }
      lits.push_back(l);
    }
    return fold(lits, ModalOp::Or);
  }

  RandomCnfSpec s_;
  std::mt19937_64 rng_;
};

}  // namespace detail

inline Modal gen_random_3cnf(const RandomCnfSpec& spec) { return detail::CnfGenerator(spec).formula(); }

}  // namespace kfol
