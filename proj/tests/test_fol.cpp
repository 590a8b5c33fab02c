#include <gtest/gtest.h>

#include <cctype>
#include <random>

#include "kfol/fol.hpp"
#include "support.hpp"

using namespace kfol;
using test::clause;
using test::clauses;

namespace {

Term V(const char* n) { return Term::var(n); }
Term C(const char* n) { return Term::constant(n); }
Fol P(const char* p, std::vector<Term> a) { return Fol::pred(p, std::move(a)); }

// Random closed formulas over P/1, Q/1, R/2, f/1 and the constant a, with at
// most two nested quantifiers.
struct FolGen {
  std::mt19937_64 rng;
  bool binary = true;
  bool function = true;
  explicit FolGen(std::uint64_t seed) : rng(seed) {}
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  Term term(const std::vector<std::string>& scope) {
    Term base = scope.empty() || pick(3) == 0 ? C("a") : V(scope[pick(static_cast<int>(scope.size()))].c_str());
    if (function && pick(4) == 0) return Term::fn("f", {base});
    return base;
  }
  Fol atom(const std::vector<std::string>& scope) {
    int k = pick(binary ? 3 : 2);
    if (k == 0) return P("P", {term(scope)});
    if (k == 1) return P("Q", {term(scope)});
    return P("R", {term(scope), term(scope)});
  }
  Fol operator()(int depth, std::vector<std::string> scope = {}) {
    if (depth <= 0 || pick(5) == 0) return atom(scope);
    int k = pick(scope.size() < 2 ? 8 : 6);
    switch (k) {
      case 0:
        return Fol::neg((*this)(depth - 1, scope));
      case 1:
        return Fol::conj((*this)(depth - 1, scope), (*this)(depth - 1, scope));
      case 2:
        return Fol::disj((*this)(depth - 1, scope), (*this)(depth - 1, scope));
      case 3:
        return Fol::imp((*this)(depth - 1, scope), (*this)(depth - 1, scope));
      case 4:
        return Fol::iff((*this)(depth - 1, scope), (*this)(depth - 1, scope));
      case 5:
        return Fol::neg((*this)(depth - 1, scope));
      default: {
        std::string v = scope.empty() ? "x" : "y";
        scope.push_back(v);
        Fol body = (*this)(depth - 1, scope);
        return k == 6 ? Fol::forall(v, body) : Fol::exists(v, body);
      }
    }
  }
};

bool fol_has_model(const Fol& f, int n) {
  return test::any_structure(test::signature_of(f), n, [&](const FiniteStructure& m) { return eval_fol(f, m); });
}

}  // namespace

// ---------------------------------------------------------------------------

TEST(Nnf, Examples) {
  Fol box = Fol::forall("v", Fol::imp(P("R", {V("w"), V("v")}), P("p", {V("v")})));
  EXPECT_EQ(to_nnf(Fol::neg(box)), Fol::exists("v", Fol::conj(P("R", {V("w"), V("v")}), Fol::neg(P("p", {V("v")})))));
  EXPECT_EQ(to_nnf(Fol::neg(Fol::neg(P("P", {C("a")})))), P("P", {C("a")}));
  Fol a = P("A", {}), b = P("B", {});
  EXPECT_EQ(to_nnf(Fol::iff(a, b)), Fol::conj(Fol::disj(Fol::neg(a), b), Fol::disj(Fol::neg(b), a)));
}

TEST(Nnf, PreservesTruthOnAllSmallStructures) {
  FolGen gen(3);
  for (int k = 0; k < 150; ++k) {
    Fol f = gen(4);
    Fol g = to_nnf(f);
    for (int n = 1; n <= 2; ++n)
      test::any_structure(test::signature_of(f), n, [&](const FiniteStructure& m) {
        EXPECT_EQ(eval_fol(f, m), eval_fol(g, m)) << to_string(f);
        return false;
      });
  }
  FolGen small(4);
  small.binary = false;
  for (int k = 0; k < 60; ++k) {
    Fol f = small(4);
    Fol g = to_nnf(f);
    test::any_structure(test::signature_of(f), 3, [&](const FiniteStructure& m) {
      EXPECT_EQ(eval_fol(f, m), eval_fol(g, m)) << to_string(f);
      return false;
    });
  }
}

TEST(Skolem, Examples) {
  EXPECT_TRUE(alpha_equivalent(skolemize(Fol::exists("w", P("P", {V("w")}))), P("P", {C("sk0")})));
  Fol serial = Fol::forall("w", Fol::exists("v", P("R", {V("w"), V("v")})));
  EXPECT_TRUE(
      alpha_equivalent(skolemize(serial), Fol::forall("w", P("R", {V("w"), Term::fn("sk0", {V("w")})}))));
}

// Skolem arguments are only the enclosing universals the witness uses.
TEST(Skolem, DependsOnUsedUniversalsOnly) {
  Fol f = Fol::forall("x", Fol::forall("y", Fol::exists("z", P("R", {V("y"), V("z")}))));
  Fol s = skolemize(f);
  std::string text = to_string(s);
  EXPECT_NE(text.find("sk0(X1)"), std::string::npos) << text;
  EXPECT_EQ(text.find("sk0(X0"), std::string::npos) << text;
}

TEST(Clausify, Examples) {
  ClauseSet cs = clausify(Fol::conj(P("P", {C("a")}), Fol::disj(P("Q", {C("a")}), Fol::neg(P("P", {C("a")})))));
  ASSERT_EQ(cs.size(), 2u);
  EXPECT_EQ(cs[0], clause("P(a)"));
  EXPECT_EQ(cs[1], clause("~P(a) | Q(a)"));

  ClauseSet refl = clausify(Fol::forall("x", P("R", {V("x"), V("x")})));
  ASSERT_EQ(refl.size(), 1u);
  ASSERT_EQ(refl[0].size(), 1u);
  EXPECT_EQ(refl[0].literals[0].args[0], refl[0].literals[0].args[1]);
  EXPECT_TRUE(refl[0].literals[0].args[0].is_var());

  EXPECT_TRUE(clausify(Fol::top()).empty());
  ClauseSet f = clausify(Fol::bottom());
  ASSERT_EQ(f.size(), 1u);
  EXPECT_TRUE(f[0].empty());
}

TEST(Clausify, DropsTautologiesAndStandardizesApart) {
  Fol f = Fol::forall("x", Fol::conj(Fol::disj(P("P", {V("x")}), Fol::neg(P("P", {V("x")}))),
                                     Fol::conj(P("Q", {V("x")}), P("R", {V("x"), V("x")}))));
  ClauseSet cs = clausify(f);
  ASSERT_EQ(cs.size(), 2u);
  auto v0 = cs[0].vars(), v1 = cs[1].vars();
  for (const auto& v : v0) EXPECT_EQ(v1.count(v), 0u);
}

TEST(Clausify, FreshSymbolsUseReservedPrefix) {
  FolGen gen(21);
  for (int k = 0; k < 200; ++k) {
    Fol f = gen(5);
    for (bool def : {false, true}) {
      ClausifyOptions o;
      o.definitional = def;
      for (const auto& c : clausify(f, o)) {
        for (const auto& l : c.literals) {
          EXPECT_TRUE(l.pred == "P" || l.pred == "Q" || l.pred == "R" || l.pred.rfind("skd", 0) == 0) << l.pred;
          FolSignature s;
          s.add_pred(l.pred, l.args);
          for (const auto& [fn, ar] : s.functions)
            EXPECT_TRUE(fn == "a" || fn == "f" || fn.rfind("sk", 0) == 0) << fn;
        }
      }
    }
  }
}

TEST(Flatten, Examples) {
  ClauseSet flat = flatten({clause("R(X, sk1(X))")});
  ASSERT_EQ(flat.size(), 1u);
  EXPECT_EQ(flat[0], [] {
    Clause c = clause("~Is_sk1(X, Y0) | R(X, Y0)");
    c.normalize();
    return c;
  }());

  Clause already = clause("~R(X, Y) | p(Y)");
  already.normalize();
  EXPECT_EQ(flatten({already})[0], already);

  ClauseSet nested = flatten({clause("p(S(S(X)))")});
  ASSERT_EQ(nested[0].size(), 3u);
  int graph = 0;
  for (const auto& l : nested[0].literals) graph += l.pred == "Is_S";
  EXPECT_EQ(graph, 2);

  // A repeated subterm is named once.
  EXPECT_EQ(flatten({clause("R(f(X), f(X))")})[0].size(), 2u);
}

// The central oracle for the normal-form pipeline: model existence at each
// domain size is preserved by clausify (both modes) and by flatten.
TEST(Clausify, SatisfiabilityPreservedOnPool) {
  FolGen gen(17);
  int checked = 0;
  for (int k = 0; k < 120; ++k) {
    Fol f = gen(4);
    ClauseSet plain = clausify(f);
    ClausifyOptions o;
    o.definitional = true;
    ClauseSet defs = clausify(f, o);
    for (int n = 1; n <= 2; ++n) {
      try {
        bool expect = fol_has_model(f, n);
        ASSERT_EQ(test::has_model(plain, n), expect) << to_string(f) << " n=" << n;
        ASSERT_EQ(test::has_model(flatten(plain), n), expect) << to_string(f) << " n=" << n;
        ASSERT_EQ(test::has_model(defs, n), expect) << to_string(f) << " n=" << n;
        ++checked;
      } catch (const std::runtime_error&) {
        // Too many Skolem tables to enumerate; skipped.
      }
    }
  }
  EXPECT_GT(checked, 150);
  FolGen small(18);
  small.binary = false;
  int checked3 = 0;
  for (int k = 0; k < 40; ++k) {
    Fol f = small(4);
    ClauseSet cs = clausify(f);
    try {
      bool expect = fol_has_model(f, 3);
      ASSERT_EQ(test::has_model(cs, 3), expect) << to_string(f);
      ASSERT_EQ(test::has_model(flatten(cs), 3), expect) << to_string(f);
      ++checked3;
    } catch (const std::runtime_error&) {
    }
  }
  EXPECT_GT(checked3, 20);
}

TEST(Eval, Examples) {
  FiniteStructure id;
  id.size = 2;
  id.add_predicate("R", 2);
  id.set_pred("R", {0, 0}, true);
  id.set_pred("R", {1, 1}, true);
  EXPECT_TRUE(eval_fol(Fol::forall("x", P("R", {V("x"), V("x")})), id));

  FiniteStructure empty;
  empty.size = 1;
  empty.add_predicate("P", 1);
  EXPECT_FALSE(eval_fol(Fol::exists("w", P("P", {V("w")})), empty));

  EXPECT_THROW(eval_fol(P("Z", {}), empty), Error);
  EXPECT_THROW(eval_fol(P("P", {C("c")}), empty), Error);
  EXPECT_THROW(eval_fol(P("P", {V("free")}), empty), Error);
}

TEST(Eval, ClauseAndGraphPredicates) {
  FiniteStructure m;
  m.size = 2;
  m.add_predicate("R", 2);
  m.add_function("sk1", 1);
  m.set_func("sk1", {0}, 1);
  m.set_func("sk1", {1}, 0);
  m.set_pred("R", {0, 1}, true);
  m.set_pred("R", {1, 0}, true);
  Clause c = clause("R(X, sk1(X))");
  EXPECT_TRUE(eval_clause(c, m));
  EXPECT_TRUE(eval_clauses(flatten({c}), m.with_graph_predicates()));
  m.set_func("sk1", {1}, 1);
  EXPECT_FALSE(eval_clause(c, m));
  EXPECT_FALSE(eval_clauses(flatten({c}), m.with_graph_predicates()));
}

TEST(Tptp, Emitter) {
  Fol refl = Fol::forall("x", P("R", {V("x"), V("x")}));
  EXPECT_EQ(to_tptp("frame_0", "axiom", refl), "fof(frame_0, axiom, ! [X] : 'R'(X,X)).");
  Fol tr = Fol::exists("w", Fol::conj(P("R", {C("o"), V("w")}),
                                      Fol::forall("v", Fol::imp(P("R", {V("w"), V("v")}), P("p", {V("v")})))));
  EXPECT_EQ(to_tptp("goal", "conjecture", tr),
            "fof(goal, conjecture, ? [W] : ('R'(o,W) & ! [V] : ('R'(W,V) => p(V)))).");
  EXPECT_TRUE(test::TptpChecker(to_tptp("goal", "conjecture", tr)).ok());
  EXPECT_FALSE(test::TptpChecker("fof(goal, conjecture, p & ).").ok());
}

TEST(Tptp, RandomFormulasAreWellFormed) {
  FolGen gen(8);
  for (int k = 0; k < 500; ++k) {
    Fol f = gen(6);
    std::string line = to_tptp("f" + std::to_string(k), "axiom", f);
    ASSERT_TRUE(test::TptpChecker(line).ok()) << line;
  }
  EXPECT_TRUE(test::TptpChecker(to_tptp("t", "axiom", Fol::conj(Fol::top(), Fol::neg(Fol::bottom())))).ok());
}

TEST(Subst, AlphaEquivalenceAndCapture) {
  Fol a = Fol::forall("x", P("R", {V("x"), V("y")}));
  Fol b = Fol::forall("z", P("R", {V("z"), V("y")}));
  EXPECT_TRUE(alpha_equivalent(a, b));
  EXPECT_FALSE(alpha_equivalent(a, Fol::forall("z", P("R", {V("z"), V("z")}))));
  EXPECT_EQ(free_vars(a), (std::set<std::string>{"y"}));
  // The bound x is untouched.
  EXPECT_EQ(apply_subst(TermSubst{{"x", C("c")}}, a), a);
  EXPECT_EQ(apply_subst(TermSubst{{"y", C("c")}}, a), Fol::forall("x", P("R", {V("x"), C("c")})));
}

TEST(Signature, ArityClash) {
  FolSignature s;
  s.add(P("P", {C("a")}));
  EXPECT_THROW(s.add(P("P", {C("a"), C("a")})), Error);
  EXPECT_THROW(s.add(P("Q", {Term::fn("a", {C("b")})})), Error);
}
