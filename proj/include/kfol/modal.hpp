// Modal / next-time formula syntax: AST, parser, printer and macro expansion.
#pragma once

#include <cctype>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kfol {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& msg, int line, int column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

enum class ModalOp { Atom, True, False, Not, And, Or, Imp, Iff, Box, Dia, Next };

inline constexpr int arity(ModalOp op) noexcept {
  switch (op) {
    case ModalOp::Atom:
    case ModalOp::True:
    case ModalOp::False:
      return 0;
    case ModalOp::Not:
    case ModalOp::Box:
    case ModalOp::Dia:
    case ModalOp::Next:
      return 1;
    default:
      return 2;
  }
}

// Immutable, structurally shared modal formula. `name` holds the atom name for
// Atom and the agent label for Box/Dia (empty = the default modality).
class Modal {
 public:
  Modal() : Modal(ModalOp::True) {}

  static Modal atom(std::string name) { return Modal(ModalOp::Atom, std::move(name)); }
  static Modal top() { return Modal(ModalOp::True); }
  static Modal bottom() { return Modal(ModalOp::False); }
  static Modal neg(Modal a) { return Modal(ModalOp::Not, {}, {std::move(a)}); }
  static Modal conj(Modal a, Modal b) { return Modal(ModalOp::And, {}, {std::move(a), std::move(b)}); }
  static Modal disj(Modal a, Modal b) { return Modal(ModalOp::Or, {}, {std::move(a), std::move(b)}); }
  static Modal imp(Modal a, Modal b) { return Modal(ModalOp::Imp, {}, {std::move(a), std::move(b)}); }
  static Modal iff(Modal a, Modal b) { return Modal(ModalOp::Iff, {}, {std::move(a), std::move(b)}); }
  static Modal box(Modal a, std::string index = {}) {
    return Modal(ModalOp::Box, std::move(index), {std::move(a)});
  }
  static Modal dia(Modal a, std::string index = {}) {
    return Modal(ModalOp::Dia, std::move(index), {std::move(a)});
  }
  static Modal next(Modal a) { return Modal(ModalOp::Next, {}, {std::move(a)}); }
  static Modal unary(ModalOp op, Modal a, std::string index = {}) {
    return Modal(op, std::move(index), {std::move(a)});
  }
  static Modal binary(ModalOp op, Modal a, Modal b) {
    return Modal(op, {}, {std::move(a), std::move(b)});
  }

  ModalOp op() const noexcept { return node_->op; }
  const std::string& name() const noexcept { return node_->name; }
  const std::string& index() const noexcept { return node_->name; }
  const Modal& child(std::size_t i = 0) const { return node_->kids.at(i); }
  const Modal& lhs() const { return child(0); }
  const Modal& rhs() const { return child(1); }
  bool is_binary() const noexcept { return arity(op()) == 2; }

  friend bool operator==(const Modal& a, const Modal& b) {
    if (a.node_ == b.node_) return true;
    if (a.op() != b.op() || a.name() != b.name()) return false;
    for (std::size_t i = 0; i < a.node_->kids.size(); ++i)
      if (!(a.node_->kids[i] == b.node_->kids[i])) return false;
    return true;
  }

  std::size_t size() const {
    std::size_t s = 1;
    for (const auto& k : node_->kids) s += k.size();
    return s;
  }

  std::size_t modal_depth() const {
    std::size_t d = 0;
    for (const auto& k : node_->kids) d = std::max(d, k.modal_depth());
    if (op() == ModalOp::Box || op() == ModalOp::Dia || op() == ModalOp::Next) ++d;
    return d;
  }

 private:
  struct Node {
    ModalOp op;
    std::string name;
    std::vector<Modal> kids;
  };

  explicit Modal(ModalOp op, std::string name = {}, std::vector<Modal> kids = {})
      : node_(std::make_shared<const Node>(Node{op, std::move(name), std::move(kids)})) {}

  std::shared_ptr<const Node> node_;
};

// Collected syntactic features of a formula.
struct ModalSignature {
  std::set<std::string> atoms;
  std::set<std::string> indices;  // agent labels, "" for the default modality
  bool has_next = false;
  bool has_modality = false;
};

inline void collect_signature(const Modal& f, ModalSignature& sig) {
  switch (f.op()) {
    case ModalOp::Atom:
      sig.atoms.insert(f.name());
      return;
    case ModalOp::Box:
    case ModalOp::Dia:
      sig.indices.insert(f.index());
      sig.has_modality = true;
      break;
    case ModalOp::Next:
      sig.has_next = true;
      break;
    default:
      break;
  }
  for (int i = 0; i < arity(f.op()); ++i) collect_signature(f.child(i), sig);
}

inline ModalSignature signature(const Modal& f) {
  ModalSignature sig;
  collect_signature(f, sig);
  return sig;
}

// ---------------------------------------------------------------------------
// Macros

// A macro is a named formula with positional parameters; parameters are
// referenced in the body as atoms.
struct Macro {
  std::vector<std::string> params;
  std::string body;
};

using MacroTable = std::map<std::string, Macro, std::less<>>;

// ---------------------------------------------------------------------------
// Parser

namespace detail {

enum class Tok { Ident, Not, And, Or, Imp, Iff, LParen, RParen, Comma, BoxIdx, DiaIdx, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

inline bool is_keyword(std::string_view s) {
  return s == "box" || s == "dia" || s == "X" || s == "true" || s == "false";
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      int l = line_, c = col_;
      if (pos_ >= src_.size()) {
        out.push_back({Tok::End, "", l, c});
        return out;
      }
      char ch = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(ch))) {
        out.push_back({Tok::Ident, ident(), l, c});
      } else if (ch == '~') {
        adv();
        out.push_back({Tok::Not, "~", l, c});
      } else if (ch == '&') {
        adv();
        out.push_back({Tok::And, "&", l, c});
      } else if (ch == '|') {
        adv();
        out.push_back({Tok::Or, "|", l, c});
      } else if (ch == '(') {
        adv();
        out.push_back({Tok::LParen, "(", l, c});
      } else if (ch == ')') {
        adv();
        out.push_back({Tok::RParen, ")", l, c});
      } else if (ch == ',') {
        adv();
        out.push_back({Tok::Comma, ",", l, c});
      } else if (ch == '-' && peek(1) == '>') {
        adv();
        adv();
        out.push_back({Tok::Imp, "->", l, c});
      } else if (ch == '<' && peek(1) == '-' && peek(2) == '>') {
        adv();
        adv();
        adv();
        out.push_back({Tok::Iff, "<->", l, c});
      } else if (ch == '[' || ch == '<') {
        char close = ch == '[' ? ']' : '>';
        adv();
        skip_space();
        if (pos_ >= src_.size() || !std::isalpha(static_cast<unsigned char>(src_[pos_])))
          throw SyntaxError("expected agent label after '" + std::string(1, ch) + "'", line_, col_);
        std::string label = ident();
        skip_space();
        if (pos_ >= src_.size() || src_[pos_] != close)
          throw SyntaxError(std::string("expected '") + close + "'", line_, col_);
        adv();
        out.push_back({ch == '[' ? Tok::BoxIdx : Tok::DiaIdx, label, l, c});
      } else {
        throw SyntaxError(std::string("unknown token '") + ch + "'", l, c);
      }
    }
  }

 private:
  char peek(std::size_t k) const { return pos_ + k < src_.size() ? src_[pos_ + k] : '\0'; }
  void adv() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  void skip_space() {
    while (pos_ < src_.size()) {
      char ch = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(ch))) {
        adv();
      } else if (ch == '%') {  // comment to end of line
        while (pos_ < src_.size() && src_[pos_] != '\n') adv();
      } else {
        break;
      }
    }
  }
  std::string ident() {
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      adv();
    return std::string(src_.substr(start, pos_ - start));
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

Modal substitute(const Modal& f, const std::map<std::string, Modal>& bindings);

class Parser {
 public:
  Parser(std::vector<Token> toks, const MacroTable* macros, int depth)
      : toks_(std::move(toks)), macros_(macros), depth_(depth) {}

  Modal parse_all() {
    Modal f = iff();
    if (cur().kind != Tok::End) fail("unexpected '" + cur().text + "'");
    return f;
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(msg, cur().line, cur().column);
  }
  void expect(Tok k, const char* what) {
    if (cur().kind != k) fail(std::string("expected ") + what);
    ++pos_;
  }

  Modal iff() {
    Modal f = imp();
    while (cur().kind == Tok::Iff) {
      ++pos_;
      f = Modal::iff(f, imp());
    }
    return f;
  }
  Modal imp() {
    Modal f = disj();
    if (cur().kind == Tok::Imp) {
      ++pos_;
      return Modal::imp(f, imp());
    }
    return f;
  }
  Modal disj() {
    Modal f = conj();
    while (cur().kind == Tok::Or) {
      ++pos_;
      f = Modal::disj(f, conj());
    }
    return f;
  }
  Modal conj() {
    Modal f = unary();
    while (cur().kind == Tok::And) {
      ++pos_;
      f = Modal::conj(f, unary());
    }
    return f;
  }
  Modal unary() {
    const Token& t = cur();
    switch (t.kind) {
      case Tok::Not:
        ++pos_;
        return Modal::neg(unary());
      case Tok::BoxIdx: {
        std::string idx = t.text;
        ++pos_;
        return Modal::box(unary(), idx);
      }
      case Tok::DiaIdx: {
        std::string idx = t.text;
        ++pos_;
        return Modal::dia(unary(), idx);
      }
      case Tok::Ident:
        if (t.text == "box") {
          ++pos_;
          return Modal::box(unary());
        }
        if (t.text == "dia") {
          ++pos_;
          return Modal::dia(unary());
        }
        if (t.text == "X") {
          ++pos_;
          return Modal::next(unary());
        }
        return atom();
      default:
        return atom();
    }
  }
  Modal atom() {
    const Token t = cur();
    if (t.kind == Tok::LParen) {
      ++pos_;
      Modal f = iff();
      expect(Tok::RParen, "')'");
      return f;
    }
    if (t.kind != Tok::Ident) fail(t.kind == Tok::End ? "unexpected end of input" : "unexpected '" + t.text + "'");
    ++pos_;
    if (t.text == "true") return Modal::top();
    if (t.text == "false") return Modal::bottom();
    if (is_keyword(t.text)) fail("keyword '" + t.text + "' used as atom");
    bool call = cur().kind == Tok::LParen;
    if (macros_ != nullptr) {
      auto it = macros_->find(t.text);
      if (it != macros_->end()) return expand(t, it->second);
    }
    if (call) throw SyntaxError("unknown macro '" + t.text + "'", t.line, t.column);
    if (t.text.rfind("sk", 0) == 0)
      throw SyntaxError("identifier '" + t.text + "' uses the reserved prefix 'sk'", t.line, t.column);
    return Modal::atom(t.text);
  }

  Modal expand(const Token& t, const Macro& m) {
    std::vector<Modal> args;
    if (!m.params.empty()) {
      expect(Tok::LParen, "'(' after macro name");
      for (;;) {
        args.push_back(iff());
        if (cur().kind == Tok::Comma) {
          ++pos_;
          continue;
        }
        break;
      }
      expect(Tok::RParen, "')'");
    }
    if (args.size() != m.params.size())
      throw SyntaxError("macro '" + t.text + "' expects " + std::to_string(m.params.size()) +
                            " arguments",
                        t.line, t.column);
    if (depth_ > 64) throw SyntaxError("macro expansion too deep", t.line, t.column);
    Parser body(Lexer(m.body).run(), macros_, depth_ + 1);
    Modal f = body.parse_all();
    std::map<std::string, Modal> bind;
    for (std::size_t i = 0; i < args.size(); ++i) bind.emplace(m.params[i], args[i]);
    return bind.empty() ? f : substitute(f, bind);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const MacroTable* macros_;
  int depth_;
};

inline Modal substitute(const Modal& f, const std::map<std::string, Modal>& bindings) {
  switch (f.op()) {
    case ModalOp::Atom: {
      auto it = bindings.find(f.name());
      return it == bindings.end() ? f : it->second;
    }
    case ModalOp::True:
    case ModalOp::False:
      return f;
    default:
      break;
  }
  if (f.is_binary())
    return Modal::binary(f.op(), substitute(f.lhs(), bindings), substitute(f.rhs(), bindings));
  return Modal::unary(f.op(), substitute(f.child(), bindings), f.index());
}

}  // namespace detail

inline Modal parse_modal(std::string_view text) {
  return detail::Parser(detail::Lexer(text).run(), nullptr, 0).parse_all();
}

// Parses `text`, expanding macro references (`NAME` or `NAME(arg, ...)`).
inline Modal expand_macros(std::string_view text, const MacroTable& macros) {
  return detail::Parser(detail::Lexer(text).run(), &macros, 0).parse_all();
}

// Simultaneous substitution of formulas for atoms.
inline Modal substitute(const Modal& f, const std::map<std::string, Modal>& bindings) {
  return detail::substitute(f, bindings);
}

// ---------------------------------------------------------------------------
// Printer

namespace detail {

inline int precedence(ModalOp op) {
  switch (op) {
    case ModalOp::Iff:
      return 1;
    case ModalOp::Imp:
      return 2;
    case ModalOp::Or:
      return 3;
    case ModalOp::And:
      return 4;
    default:
      return 5;
  }
}

inline void print(const Modal& f, std::string& out) {
  auto sub = [&out](const Modal& g, bool parens) {
    if (parens) out += '(';
    print(g, out);
    if (parens) out += ')';
  };
  switch (f.op()) {
    case ModalOp::Atom:
      out += f.name();
      return;
    case ModalOp::True:
      out += "true";
      return;
    case ModalOp::False:
      out += "false";
      return;
    case ModalOp::Not:
      out += '~';
      break;
    case ModalOp::Box:
      out += f.index().empty() ? "box " : "[" + f.index() + "]";
      break;
    case ModalOp::Dia:
      out += f.index().empty() ? "dia " : "<" + f.index() + ">";
      break;
    case ModalOp::Next:
      out += "X ";
      break;
    default: {
      int p = precedence(f.op());
      bool right_assoc = f.op() == ModalOp::Imp;
      int lp = precedence(f.lhs().op());
      int rp = precedence(f.rhs().op());
      sub(f.lhs(), right_assoc ? lp <= p : lp < p);
      switch (f.op()) {
        case ModalOp::And:
          out += " & ";
          break;
        case ModalOp::Or:
          out += " | ";
          break;
        case ModalOp::Imp:
          out += " -> ";
          break;
        default:
          out += " <-> ";
          break;
      }
      sub(f.rhs(), right_assoc ? rp < p : rp <= p);
      return;
    }
  }
  sub(f.child(), f.child().is_binary());
}

}  // namespace detail

inline std::string print_modal(const Modal& f) {
  std::string out;
  detail::print(f, out);
  return out;
}

}  // namespace kfol
