#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "kfol/corpus.hpp"
#include "kfol/model_finder.hpp"
#include "kfol/translator.hpp"
#include "support.hpp"

using namespace kfol;
using test::clause;
using test::clauses;

namespace {

bool truth_table_sat(int n, const std::vector<std::vector<int>>& cs) {
  for (std::uint32_t v = 0; v < (1u << n); ++v) {
    bool all = true;
    for (const auto& c : cs) {
      bool sat = false;
      for (int l : c) sat = sat || (((v >> (std::abs(l) - 1)) & 1) == (l > 0 ? 1u : 0u));
      if (!sat) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

bool prop_sat(const PropCnf& cnf) { return std::holds_alternative<DpllSat>(dpll(cnf)); }

ClauseSet countermodel(const char* f, const char* sys) {
  return assemble(parse_modal(f), ModalSystem::named(sys)).countermodel_clauses;
}

// Random clauses over p/1 and r/2 with the unary function f; no constants.
ClauseSet random_pool(std::mt19937_64& rng) {
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  auto term = [&] {
    Term v = Term::var(pick(2) ? "X" : "Y");
    int k = pick(5);
    if (k == 0) return Term::fn("f", {v});
    if (k == 1) return Term::fn("f", {Term::fn("f", {v})});
    return v;
  };
  ClauseSet out;
  int n = 1 + pick(4);
  for (int i = 0; i < n; ++i) {
    Clause c;
    int len = 1 + pick(3);
    for (int j = 0; j < len; ++j) {
      Literal l;
      l.positive = pick(2);
      if (pick(2)) {
        l.pred = "p";
        l.args = {term()};
      } else {
        l.pred = "r";
        l.args = {term(), term()};
      }
      c.literals.push_back(l);
    }
    c.normalize();
    out.push_back(c);
  }
  return out;
}

}  // namespace

TEST(Ground, Examples) {
  PropCnf g = ground(clauses({"~R(X, Y) | p(Y)"}), 2);
  EXPECT_EQ(g.num_vars, 6);
  EXPECT_EQ(g.clauses.size(), 4u);
  int r = 0, p = 0;
  for (const auto& c : g.decode) (c.symbol == "R" ? r : p) += 1;
  EXPECT_EQ(r, 4);
  EXPECT_EQ(p, 2);

  PropCnf unit = ground(clauses({"p(X)"}), 1);
  ASSERT_EQ(unit.clauses.size(), 1u);
  EXPECT_EQ(unit.clauses[0], std::vector<int>{1});

  // One constant over two elements: exactly one of its two value cells.
  PropCnf fn = ground(flatten(clauses({"q(c)"})), 2);
  std::vector<int> cvars;
  for (int v = 1; v <= fn.num_vars; ++v)
    if (fn.decode[v - 1].kind == Cell::Kind::Function) cvars.push_back(v);
  ASSERT_EQ(cvars.size(), 2u);
  auto has = [&](std::vector<int> c) { return std::find(fn.clauses.begin(), fn.clauses.end(), c) != fn.clauses.end(); };
  EXPECT_TRUE(has({cvars[0], cvars[1]}));
  EXPECT_TRUE(has({-cvars[0], -cvars[1]}));

  EXPECT_THROW(ground(clauses({"p(X)"}), 0), Error);
  EXPECT_THROW(ground(clauses({"p(a)"}), 2), Error);
}

TEST(Dpll, Examples) {
  PropCnf cnf;
  cnf.num_vars = 3;
  cnf.clauses = {{1, 2}, {-1}, {-2, 3}};
  auto r = dpll(cnf);
  ASSERT_TRUE(std::holds_alternative<DpllSat>(r));
  auto a = std::get<DpllSat>(r).assignment;
  EXPECT_FALSE(a[1]);
  EXPECT_TRUE(a[2]);
  EXPECT_TRUE(a[3]);

  cnf.num_vars = 1;
  cnf.clauses = {{1}, {-1}};
  EXPECT_TRUE(std::holds_alternative<DpllUnsat>(dpll(cnf)));

  PropCnf empty;
  empty.num_vars = 0;
  EXPECT_TRUE(std::holds_alternative<DpllSat>(dpll(empty)));

  PropCnf bottom;
  bottom.num_vars = 1;
  bottom.clauses = {{}};
  EXPECT_TRUE(std::holds_alternative<DpllUnsat>(dpll(bottom)));
}

TEST(Dpll, AgreesWithTruthTables) {
  std::mt19937_64 rng(99);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  int sat = 0, unsat = 0;
  for (int k = 0; k < 1200; ++k) {
    PropCnf cnf;
    cnf.num_vars = pick(1, 16);
    int m = pick(1, 5 * cnf.num_vars);
    for (int i = 0; i < m; ++i) {
      std::vector<int> c;
      int len = pick(1, 4);
      for (int j = 0; j < len; ++j) c.push_back(pick(1, cnf.num_vars) * (pick(0, 1) ? 1 : -1));
      cnf.clauses.push_back(c);
    }
    bool expect = truth_table_sat(cnf.num_vars, cnf.clauses);
    auto r = dpll(cnf);
    ASSERT_EQ(std::holds_alternative<DpllSat>(r), expect) << "case " << k;
    if (expect) {
      ASSERT_TRUE(satisfies(cnf, std::get<DpllSat>(r).assignment));
      ++sat;
    } else {
      ++unsat;
    }
    // Stepping one assignment at a time reaches the same answer.
    Dpll stepped(cnf);
    while (stepped.step(1) == Dpll::Status::Running) {
    }
    ASSERT_EQ(stepped.status() == Dpll::Status::Sat, expect);
  }
  EXPECT_GT(sat, 200);
  EXPECT_GT(unsat, 200);
}

TEST(Decode, CountermodelOfFour) {
  ClauseSet cs = countermodel("box p -> box box p", "K");
  PropCnf cnf = ground(flatten(cs), 2);
  // The two-world table: R = {(0,1),(1,0)}, p true at 1, real world 0. The
  // Skolem witnesses are completed by search over their tables.
  FiniteStructure expected;
  bool found = test::any_structure(test::signature_of(cs), 2, [&](const FiniteStructure& m) {
    std::set<std::pair<int, int>> r;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        if (m.pred("R", {a, b})) r.insert({a, b});
    if (r != std::set<std::pair<int, int>>{{0, 1}, {1, 0}}) return false;
    if (m.pred("p", {0}) || !m.pred("p", {1}) || m.func("w0", {}) != 0) return false;
    if (!eval_clauses(cs, m)) return false;
    expected = m;
    return true;
  });
  ASSERT_TRUE(found);
  auto a = encode(expected, cnf);
  EXPECT_TRUE(satisfies(cnf, a));
  FiniteStructure back = decode(a, cnf);
  EXPECT_TRUE(back.pred("R", {0, 1}));
  EXPECT_TRUE(back.pred("R", {1, 0}));
  EXPECT_FALSE(back.pred("R", {0, 0}));
  EXPECT_FALSE(back.pred("R", {1, 1}));
  EXPECT_TRUE(back.pred("p", {1}));
  EXPECT_FALSE(back.pred("p", {0}));
  EXPECT_EQ(back.func("w0", {}), 0);
}

TEST(Decode, AllFalseAndErrors) {
  PropCnf cnf = ground(clauses({"~p(X)"}), 1);
  FiniteStructure s = decode(std::vector<bool>(cnf.num_vars + 1, false), cnf);
  EXPECT_EQ(s.size, 1);
  EXPECT_FALSE(s.pred("p", {0}));

  PropCnf fn = ground(flatten(clauses({"q(c)"})), 2);
  std::vector<bool> both(fn.num_vars + 1, true);
  EXPECT_THROW(decode(both, fn), Error);
  std::vector<bool> none(fn.num_vars + 1, false);
  EXPECT_THROW(decode(none, fn), Error);
}

// Grounding is faithful, and every SAT assignment decodes to a structure whose
// re-encoding satisfies the CNF.
TEST(Ground, FaithfulOnPool) {
  std::mt19937_64 rng(5);
  int yes = 0, no = 0;
  for (int k = 0; k < 300; ++k) {
    ClauseSet cs = random_pool(rng);
    for (int n = 1; n <= 2; ++n) {
      PropCnf cnf = ground(flatten(cs), n);
      auto r = dpll(cnf);
      bool expect = test::has_model(cs, n);
      ASSERT_EQ(std::holds_alternative<DpllSat>(r), expect) << "case " << k << " n=" << n;
      if (expect) {
        ++yes;
        FiniteStructure m = decode(std::get<DpllSat>(r).assignment, cnf);
        ASSERT_TRUE(eval_clauses(cs, m));
        ASSERT_TRUE(satisfies(cnf, encode(m, cnf)));
      } else {
        ++no;
      }
    }
  }
  EXPECT_GT(yes, 100);
  EXPECT_GT(no, 30);
}

TEST(FindSmallestModel, Examples) {
  auto k4 = find_smallest_model(countermodel("box p -> box box p", "K"), 6);
  ASSERT_TRUE(std::holds_alternative<FoundModel>(k4));
  EXPECT_EQ(std::get<FoundModel>(k4).size, 2);

  Modal hl_goal = corpus_entry(load_corpus(), "ps3-H-L").parsed();
  auto hl = find_smallest_model(assemble(hl_goal, ModalSystem::named("K")).countermodel_clauses, 6);
  ASSERT_TRUE(std::holds_alternative<FoundModel>(hl));
  EXPECT_EQ(std::get<FoundModel>(hl).size, 3);

  auto kt = find_smallest_model(countermodel("box p -> dia p", "KT"), 3);
  ASSERT_TRUE(std::holds_alternative<NoModelUpTo>(kt));
  EXPECT_EQ(std::get<NoModelUpTo>(kt).n_max, 3);

  std::atomic<bool> stop{true};
  EXPECT_TRUE(std::holds_alternative<SearchCancelled>(find_smallest_model(countermodel("box p -> p", "K"), 4, &stop)));
  EXPECT_THROW(ModelSearch(ClauseSet{}, 0), Error);
}

// A model at n means every smaller size grounds to an unsatisfiable CNF, and
// the model satisfies the unflattened clauses.
TEST(FindSmallestModel, MinimalAndVerified) {
  std::vector<ClauseSet> problems;
  for (const auto& e : load_corpus())
    if (e.expect == Outcome::Invalid && (e.size.value_or(0) <= 3))
      problems.push_back(assemble(e.parsed(), ModalSystem::named(e.system)).countermodel_clauses);
  std::mt19937_64 rng(6);
  for (int k = 0; k < 100; ++k) problems.push_back(random_pool(rng));
  int found = 0;
  for (const auto& cs : problems) {
    auto r = find_smallest_model(cs, 3);
    if (!std::holds_alternative<FoundModel>(r)) continue;
    ++found;
    const auto& m = std::get<FoundModel>(r);
    EXPECT_EQ(m.structure.size, m.size);
    EXPECT_TRUE(eval_clauses(cs, m.structure));
    for (int smaller = 1; smaller < m.size; ++smaller) EXPECT_FALSE(prop_sat(ground(flatten(cs), smaller)));
  }
  EXPECT_GT(found, 60);
}

TEST(ModelSearch, FilterBlocksRejectedModels) {
  // p(c) | q(c): reject every model with p(c), so the accepted one has q(c).
  ClauseSet cs = clauses({"p(c) | q(c)"});
  ModelSearch::Filter f;
  f.accept = [](const FiniteStructure& m) { return !m.pred("p", {m.func("c", {})}); };
  f.block_symbols = {"p", "q", "c"};
  ModelSearch s(cs, 2, f);
  s.run();
  ASSERT_EQ(s.status(), ModelSearch::Status::Found);
  auto m = std::get<FoundModel>(s.result()).structure;
  EXPECT_TRUE(m.pred("q", {m.func("c", {})}));
  EXPECT_FALSE(m.pred("p", {m.func("c", {})}));

  ModelSearch::Filter never;
  never.accept = [](const FiniteStructure&) { return false; };
  never.block_symbols = {"p", "q", "c"};
  ModelSearch none(cs, 2, never);
  none.run();
  EXPECT_EQ(none.status(), ModelSearch::Status::Exhausted);
  EXPECT_GT(none.rejected(), 0u);
}

TEST(Dimacs, Format) {
  PropCnf cnf = ground(clauses({"~R(X, Y) | p(Y)"}), 2);
  std::istringstream in(to_dimacs(cnf));
  std::vector<std::vector<int>> read;
  int header_vars = -1, header_clauses = -1, comments = 0;
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("c ", 0) == 0) {
      ++comments;
      continue;
    }
    std::istringstream ls(line);
    if (line.rfind("p cnf ", 0) == 0) {
      std::string p, cnf_kw;
      ls >> p >> cnf_kw >> header_vars >> header_clauses;
      continue;
    }
    std::vector<int> c;
    for (int l; ls >> l;) c.push_back(l);
    ASSERT_FALSE(c.empty());
    ASSERT_EQ(c.back(), 0);
    c.pop_back();
    read.push_back(c);
  }
  EXPECT_EQ(header_vars, 6);
  EXPECT_EQ(header_clauses, 4);
  EXPECT_EQ(read, cnf.clauses);
  EXPECT_EQ(comments, 1 + 6);
}
