// Helpers shared by the test suites: a tiny clause reader, exhaustive
// structure enumeration (the oracle) and random generators.
#pragma once

#include <cctype>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kfol/fol.hpp"
#include "kfol/kripke.hpp"
#include "kfol/modal.hpp"

namespace kfol::test {

// Clause text: literals separated by '|', '~' negates, identifiers starting
// with an upper-case letter in argument position are variables. "[]" or ""
// is the empty clause.
class ClauseReader {
 public:
  explicit ClauseReader(std::string_view s) : s_(s) {}

  Clause read() {
    Clause c;
    skip();
    if (s_.substr(i_) == "[]" || i_ == s_.size()) return c;
    for (;;) {
      c.literals.push_back(literal());
      skip();
      if (i_ == s_.size()) break;
      expect('|');
    }
    return c;
  }

 private:
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  void expect(char c) {
    skip();
    if (i_ >= s_.size() || s_[i_] != c) throw std::runtime_error(std::string("clause text: expected ") + c);
    ++i_;
  }
  std::string ident() {
    skip();
    std::size_t b = i_;
    while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_' || s_[i_] == '$'))
      ++i_;
    if (b == i_) throw std::runtime_error("clause text: expected identifier");
    return std::string(s_.substr(b, i_ - b));
  }
  std::vector<Term> args() {
    std::vector<Term> out;
    skip();
    if (i_ < s_.size() && s_[i_] == '(') {
      ++i_;
      for (;;) {
        out.push_back(term());
        skip();
        if (s_[i_] == ')') {
          ++i_;
          break;
        }
        expect(',');
      }
    }
    return out;
  }
  Term term() {
    std::string name = ident();
    auto a = args();
    if (a.empty() && std::isupper(static_cast<unsigned char>(name[0]))) return Term::var(name);
    return Term::fn(name, std::move(a));
  }
  Literal literal() {
    skip();
    bool pos = true;
    if (s_[i_] == '~') {
      pos = false;
      ++i_;
    }
    std::string p = ident();
    return Literal{pos, p, args()};
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

inline Clause clause(std::string_view s) { return ClauseReader(s).read(); }

inline ClauseSet clauses(std::initializer_list<std::string_view> xs) {
  ClauseSet out;
  for (auto x : xs) out.push_back(clause(x));
  return out;
}

// Calls `f` on every structure of size n over `sig` until it returns true.
// Returns whether some call returned true. Throws if the space exceeds
// `limit` structures.
inline bool any_structure(const FolSignature& sig, int n, const std::function<bool(const FiniteStructure&)>& f,
                          double limit = 5e6) {
  FiniteStructure m = empty_structure(sig, n);
  struct Cell {
    char* pred = nullptr;
    int* func = nullptr;
  };
  std::vector<Cell> cells;
  double space = 1;
  for (auto& [name, t] : m.predicates)
    for (auto& h : t.holds) {
      cells.push_back({&h, nullptr});
      space *= 2;
    }
  for (auto& [name, t] : m.functions)
    for (auto& v : t.values) {
      cells.push_back({nullptr, &v});
      space *= n;
    }
  if (space > limit) throw std::runtime_error("structure space too large for enumeration");
  for (;;) {
    if (f(m)) return true;
    std::size_t i = 0;
    for (; i < cells.size(); ++i) {
      if (cells[i].pred) {
        if (*cells[i].pred == 0) {
          *cells[i].pred = 1;
          break;
        }
        *cells[i].pred = 0;
      } else {
        if (*cells[i].func + 1 < n) {
          ++*cells[i].func;
          break;
        }
        *cells[i].func = 0;
      }
    }
    if (i == cells.size()) return false;
  }
}

inline FolSignature signature_of(const ClauseSet& cs) {
  FolSignature s;
  s.add(cs);
  return s;
}

inline FolSignature signature_of(const Fol& f) {
  FolSignature s;
  s.add(f);
  return s;
}

// Enumerates structures over the clause signature; graph predicates of
// flattened clauses are read off the function tables.
inline bool has_model(const ClauseSet& cs, int n, double limit = 5e6) {
  FolSignature sig;
  for (const auto& c : cs)
    for (const auto& l : c.literals) {
      if (l.pred.rfind(kGraphPrefix, 0) == 0) {
        sig.functions[l.pred.substr(std::string(kGraphPrefix).size())] = static_cast<int>(l.args.size()) - 1;
        continue;
      }
      sig.add_pred(l.pred, l.args);
    }
  return any_structure(
      sig, n, [&](const FiniteStructure& m) { return eval_clauses(cs, m.with_graph_predicates()); }, limit);
}

// Minimal recursive-descent checker for the TPTP FOF subset we emit.
class TptpChecker {
 public:
  explicit TptpChecker(std::string s) : s_(std::move(s)) {}
  bool ok() {
    try {
      word("fof");
      ch('(');
      name();
      ch(',');
      name();
      ch(',');
      formula();
      ch(')');
      ch('.');
      ws();
      return i_ == s_.size();
    } catch (...) {
      return false;
    }
  }

 private:
  void ws() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool peek(const std::string& t) {
    ws();
    return s_.compare(i_, t.size(), t) == 0;
  }
  void ch(char c) {
    ws();
    if (i_ >= s_.size() || s_[i_] != c) throw 0;
    ++i_;
  }
  void word(const std::string& w) {
    ws();
    if (s_.compare(i_, w.size(), w) != 0) throw 0;
    i_ += w.size();
  }
  std::string alnum() {
    std::size_t b = i_;
    while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
    return s_.substr(b, i_ - b);
  }
  void name() {
    ws();
    if (s_[i_] == '\'') {
      ++i_;
      while (i_ < s_.size() && s_[i_] != '\'') i_ += s_[i_] == '\\' ? 2 : 1;
      ch('\'');
      return;
    }
    if (!std::islower(static_cast<unsigned char>(s_[i_]))) throw 0;
    alnum();
  }
  void variable() {
    ws();
    if (!std::isupper(static_cast<unsigned char>(s_[i_]))) throw 0;
    alnum();
  }
  void term() {
    ws();
    if (std::isupper(static_cast<unsigned char>(s_[i_]))) return variable();
    name();
    args();
  }
  void args() {
    if (!peek("(")) return;
    ch('(');
    term();
    while (peek(",")) {
      ch(',');
      term();
    }
    ch(')');
  }
  void unitary() {
    ws();
    if (peek("(")) {
      ch('(');
      formula();
      ch(')');
    } else if (peek("~")) {
      ch('~');
      unitary();
    } else if (peek("!") || peek("?")) {
      ++i_;
      ch('[');
      variable();
      while (peek(",")) {
        ch(',');
        variable();
      }
      ch(']');
      ch(':');
      unitary();
    } else if (peek("$true")) {
      word("$true");
    } else if (peek("$false")) {
      word("$false");
    } else {
      name();
      args();
    }
  }
  void formula() {
    unitary();
    for (const char* op : {"<=>", "=>", "&", "|"})
      if (peek(op)) {
        word(op);
        unitary();
        // & and | may chain; the others are binary only.
        while ((std::string(op) == "&" || std::string(op) == "|") && peek(op)) {
          word(op);
          unitary();
        }
        return;
      }
  }

  std::string s_;
  std::size_t i_ = 0;
};

// ---------------------------------------------------------------------------
// Random generators

struct ModalGen {
  std::mt19937_64 rng;
  std::vector<std::string> atoms{"p", "q"};
  std::vector<std::string> indices{""};
  bool next = false;
  bool constants = true;

  explicit ModalGen(std::uint64_t seed) : rng(seed) {}

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  Modal leaf() {
    if (constants && pick(8) == 0) return pick(2) ? Modal::top() : Modal::bottom();
    return Modal::atom(atoms[pick(static_cast<int>(atoms.size()))]);
  }

  Modal operator()(int depth) {
    if (depth <= 0 || pick(4) == 0) return leaf();
    int k = pick(next ? 9 : 8);
    const std::string& idx = indices[pick(static_cast<int>(indices.size()))];
    switch (k) {
      case 0:
        return Modal::neg((*this)(depth - 1));
      case 1:
        return Modal::conj((*this)(depth - 1), (*this)(depth - 1));
      case 2:
        return Modal::disj((*this)(depth - 1), (*this)(depth - 1));
      case 3:
        return Modal::imp((*this)(depth - 1), (*this)(depth - 1));
      case 4:
        return Modal::iff((*this)(depth - 1), (*this)(depth - 1));
      case 5:
      case 6:
        return Modal::box((*this)(depth - 1), idx);
      case 7:
        return Modal::dia((*this)(depth - 1), idx);
      default:
        return Modal::next((*this)(depth - 1));
    }
  }
};

// Calls `f` on every Kripke model with n worlds over the given atoms and
// agent labels (each world in turn as the real world) until it returns true.
inline bool any_kripke(int n, const std::vector<std::string>& atoms, const std::vector<std::string>& indices,
                       const std::function<bool(const KripkeModel&)>& f) {
  const int pairs = n * n;
  const std::size_t rel_bits = static_cast<std::size_t>(pairs) * indices.size();
  const std::size_t val_bits = static_cast<std::size_t>(n) * atoms.size();
  if (rel_bits + val_bits > 30) throw std::runtime_error("Kripke space too large for enumeration");
  KripkeModel m;
  m.worlds = n;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << (rel_bits + val_bits)); ++bits) {
    m.relations.clear();
    m.valuation.clear();
    std::size_t b = 0;
    for (const auto& idx : indices) {
      auto& r = m.relations[idx];
      for (int k = 0; k < pairs; ++k, ++b)
        if (bits >> b & 1) r.insert({k / n, k % n});
    }
    for (const auto& p : atoms) {
      auto& v = m.valuation[p];
      for (int w = 0; w < n; ++w, ++b)
        if (bits >> b & 1) v.insert(w);
    }
    for (int w = 0; w < n; ++w) {
      m.real_world = w;
      if (f(m)) return true;
    }
  }
  return false;
}

inline KripkeModel random_kripke(std::mt19937_64& rng, int n, const std::vector<std::string>& atoms,
                                 const std::vector<std::string>& indices) {
  std::bernoulli_distribution coin(0.5);
  KripkeModel m;
  m.worlds = n;
  m.real_world = std::uniform_int_distribution<int>(0, n - 1)(rng);
  for (const auto& idx : indices) {
    auto& r = m.relations[idx];
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (coin(rng)) r.insert({a, b});
  }
  for (const auto& p : atoms) {
    auto& v = m.valuation[p];
    for (int w = 0; w < n; ++w)
      if (coin(rng)) v.insert(w);
  }
  return m;
}

}  // namespace kfol::test
