#pragma once

// Tiny expression DSL shared by piecewise maps S and relation functions
// f(r,s,t).
//
//   map      := piece (";" piece)* | exprlist
//   piece    := "piece" guard ":" exprlist
//   guard    := var "in" "[" bound "," bound "]" ("and" guard)?
//   exprlist := expr ("," expr)* | "(" expr ("," expr)* ")"
//   expr     := term (("+"|"-") term)*
//   term     := factor (("*"|"/") factor)*
//   factor   := num | var | "(" expr ")" | "-" factor | func "(" expr ("," expr)* ")"
//   func     := "max" | "min" | "sqrt" | "abs"
//   var      := "x" | "y"  (maps)   |   "r" | "s" | "t"  (relations)
//   bound    := ("-")? num
//
// Unary minus binds tighter than * and /; + - * / are left-associative.
// Evaluation is canonical left-to-right, so a parsed expression always
// reproduces the same floating-point result as the equivalent hand-written
// C++ with the same bracketing.

#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "numfmt.hpp"

namespace proxipoint {

class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string& expected)
      : Error(errc::syntax_error,
              "at position " + std::to_string(position) + ": expected " + expected),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

enum class Func { max, min, sqrt, abs };

struct ExprNode {
  enum class Kind { number, variable, negate, add, sub, mul, div, call };
  Kind kind = Kind::number;
  double number = 0.0;
  int var_slot = -1;
  char var_name = 0;
  Func func = Func::max;
  std::vector<int> args;
};

struct ExprTree {
  std::vector<ExprNode> nodes;
  int root = -1;

  double eval(const double* vars, int nvars) const { return eval_node(root, vars, nvars); }

 private:
  double eval_node(int idx, const double* vars, int nvars) const {
    const ExprNode& n = nodes[static_cast<std::size_t>(idx)];
    switch (n.kind) {
      case ExprNode::Kind::number: return n.number;
      case ExprNode::Kind::variable:
        if (n.var_slot >= nvars)
          fail(errc::eval_error, std::string("variable ") + n.var_name + " unbound");
        return vars[n.var_slot];
      case ExprNode::Kind::negate: return -eval_node(n.args[0], vars, nvars);
      case ExprNode::Kind::add:
        return eval_node(n.args[0], vars, nvars) + eval_node(n.args[1], vars, nvars);
      case ExprNode::Kind::sub:
        return eval_node(n.args[0], vars, nvars) - eval_node(n.args[1], vars, nvars);
      case ExprNode::Kind::mul:
        return eval_node(n.args[0], vars, nvars) * eval_node(n.args[1], vars, nvars);
      case ExprNode::Kind::div: {
        double a = eval_node(n.args[0], vars, nvars);
        double b = eval_node(n.args[1], vars, nvars);
        if (b == 0.0) fail(errc::numeric_error, "division by zero");
        return a / b;
      }
      case ExprNode::Kind::call: {
        switch (n.func) {
          case Func::sqrt: {
            double a = eval_node(n.args[0], vars, nvars);
            if (a < 0.0) fail(errc::numeric_error, "sqrt of negative value");
            return std::sqrt(a);
          }
          case Func::abs: return std::abs(eval_node(n.args[0], vars, nvars));
          case Func::max: {
            double acc = eval_node(n.args[0], vars, nvars);
            for (std::size_t i = 1; i < n.args.size(); ++i)
              acc = std::max(acc, eval_node(n.args[i], vars, nvars));
            return acc;
          }
          case Func::min: {
            double acc = eval_node(n.args[0], vars, nvars);
            for (std::size_t i = 1; i < n.args.size(); ++i)
              acc = std::min(acc, eval_node(n.args[i], vars, nvars));
            return acc;
          }
        }
        return 0.0;
      }
    }
    return 0.0;
  }
};

inline bool tree_equal(const ExprTree& ta, int a, const ExprTree& tb, int b) {
  const ExprNode& na = ta.nodes[static_cast<std::size_t>(a)];
  const ExprNode& nb = tb.nodes[static_cast<std::size_t>(b)];
  if (na.kind != nb.kind) return false;
  switch (na.kind) {
    case ExprNode::Kind::number: return na.number == nb.number;
    case ExprNode::Kind::variable: return na.var_slot == nb.var_slot && na.var_name == nb.var_name;
    case ExprNode::Kind::call:
      if (na.func != nb.func) return false;
      break;
    default: break;
  }
  if (na.args.size() != nb.args.size()) return false;
  for (std::size_t i = 0; i < na.args.size(); ++i)
    if (!tree_equal(ta, na.args[i], tb, nb.args[i])) return false;
  return true;
}

inline bool operator==(const ExprTree& a, const ExprTree& b) {
  if ((a.root < 0) != (b.root < 0)) return false;
  if (a.root < 0) return true;
  return tree_equal(a, a.root, b, b.root);
}

// ---------------------------------------------------------------------------
// Piecewise mapping specs and relation expressions
// ---------------------------------------------------------------------------

struct GuardTerm {
  int var_slot = 0;
  char var_name = 'x';
  double lo = 0.0;
  double hi = 0.0;
};

struct MapPiece {
  std::vector<GuardTerm> guard;  // conjunction; empty = always true
  std::vector<ExprTree> outputs;
};

/// Parsed piecewise map S. Pieces are tried in declaration order; at shared
/// guard boundaries the earlier piece wins.
struct MappingSpec {
  int arity = 1;
  int out_dim = 1;
  std::vector<MapPiece> pieces;
};

inline bool operator==(const MappingSpec& a, const MappingSpec& b) {
  if (a.arity != b.arity || a.out_dim != b.out_dim || a.pieces.size() != b.pieces.size())
    return false;
  for (std::size_t i = 0; i < a.pieces.size(); ++i) {
    const auto& pa = a.pieces[i];
    const auto& pb = b.pieces[i];
    if (pa.guard.size() != pb.guard.size() || pa.outputs.size() != pb.outputs.size())
      return false;
    for (std::size_t g = 0; g < pa.guard.size(); ++g) {
      if (pa.guard[g].var_slot != pb.guard[g].var_slot || pa.guard[g].lo != pb.guard[g].lo ||
          pa.guard[g].hi != pb.guard[g].hi)
        return false;
    }
    for (std::size_t o = 0; o < pa.outputs.size(); ++o)
      if (!(pa.outputs[o] == pb.outputs[o])) return false;
  }
  return true;
}

enum class RelationClass { A, Aprime };

inline const char* relation_class_name(RelationClass c) {
  return c == RelationClass::A ? "A" : "Aprime";
}

/// Scalar function f(r, s, t) with a declared target class and any named
/// constants it was built from.
struct RelationExpr {
  ExprTree body;
  RelationClass declared_class = RelationClass::A;
  std::vector<std::pair<std::string, double>> params;  // sorted by name
  std::string source;

  double operator()(double r, double s, double t) const {
    double vars[3] = {r, s, t};
    return body.eval(vars, 3);
  }
};

// ---------------------------------------------------------------------------
// Lexer / parser
// ---------------------------------------------------------------------------

namespace detail {

struct Token {
  enum class Kind { number, ident, punct, end };
  Kind kind = Kind::end;
  double number = 0.0;
  std::string text;
  char punct = 0;
  std::size_t pos = 0;
};

inline std::vector<Token> lex(const std::string& text) {
  std::vector<Token> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    char c = text[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
      continue;
    }
    if ((c >= '0' && c <= '9') || (c == '.' && i + 1 < n && text[i + 1] >= '0' && text[i + 1] <= '9')) {
      std::size_t start = i;
      while (i < n && text[i] >= '0' && text[i] <= '9') ++i;
      if (i < n && text[i] == '.') {
        ++i;
        while (i < n && text[i] >= '0' && text[i] <= '9') ++i;
      }
      if (i < n && (text[i] == 'e' || text[i] == 'E')) {
        std::size_t save = i;
        ++i;
        if (i < n && (text[i] == '+' || text[i] == '-')) ++i;
        if (i < n && text[i] >= '0' && text[i] <= '9') {
          while (i < n && text[i] >= '0' && text[i] <= '9') ++i;
        } else {
          i = save;  // bare 'e' is not an exponent
        }
      }
      Token t;
      t.kind = Token::Kind::number;
      t.pos = start;
      t.text = text.substr(start, i - start);
      t.number = std::stod(t.text);
      out.push_back(std::move(t));
      continue;
    }
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') {
      std::size_t start = i;
      while (i < n && ((text[i] >= 'a' && text[i] <= 'z') || (text[i] >= 'A' && text[i] <= 'Z') ||
                       (text[i] >= '0' && text[i] <= '9') || text[i] == '_'))
        ++i;
      Token t;
      t.kind = Token::Kind::ident;
      t.pos = start;
      t.text = text.substr(start, i - start);
      out.push_back(std::move(t));
      continue;
    }
    if (std::string("+-*/(),[]:;").find(c) != std::string::npos) {
      Token t;
      t.kind = Token::Kind::punct;
      t.pos = i;
      t.punct = c;
      out.push_back(std::move(t));
      ++i;
      continue;
    }
    throw ParseError(i, "a token (unexpected character '" + std::string(1, c) + "')");
  }
  Token end;
  end.kind = Token::Kind::end;
  end.pos = n;
  out.push_back(end);
  return out;
}

/// Recursive-descent parser over the token stream. `relation_vars` selects
/// between the map alphabet {x, y} and the relation alphabet {r, s, t}.
class Parser {
 public:
  Parser(const std::string& text, bool relation_vars)
      : tokens_(lex(text)), relation_vars_(relation_vars) {}

  ExprTree parse_single_expression() {
    ExprTree tree;
    tree.root = parse_expr(tree);
    expect_end("end of expression");
    return tree;
  }

  MappingSpec parse_map() {
    MappingSpec spec;
    if (peek_ident("piece")) {
      spec.pieces.push_back(parse_piece());
      while (accept_punct(';')) spec.pieces.push_back(parse_piece());
    } else {
      MapPiece piece;
      piece.outputs = parse_exprlist();
      spec.pieces.push_back(std::move(piece));
    }
    expect_end("end of map");
    finalize(spec);
    return spec;
  }

 private:
  void finalize(MappingSpec& spec) {
    spec.out_dim = static_cast<int>(spec.pieces.front().outputs.size());
    int max_slot = 0;
    for (const auto& piece : spec.pieces) {
      if (static_cast<int>(piece.outputs.size()) != spec.out_dim)
        fail(errc::arity_error, "pieces disagree on output dimension");
      for (const auto& g : piece.guard) max_slot = std::max(max_slot, g.var_slot);
      for (const auto& tree : piece.outputs)
        for (const auto& node : tree.nodes)
          if (node.kind == ExprNode::Kind::variable)
            max_slot = std::max(max_slot, node.var_slot);
    }
    spec.arity = max_slot + 1;
  }

  MapPiece parse_piece() {
    expect_ident("piece", "'piece'");
    MapPiece piece;
    piece.guard.push_back(parse_guard_term());
    while (peek_ident("and")) {
      expect_ident("and", "'and'");
      piece.guard.push_back(parse_guard_term());
    }
    expect_punct(':', "':'");
    piece.outputs = parse_exprlist();
    return piece;
  }

  GuardTerm parse_guard_term() {
    GuardTerm g;
    const Token& t = cur();
    if (t.kind != Token::Kind::ident) throw ParseError(t.pos, "a guard variable");
    int slot = var_slot(t.text, t.pos);
    g.var_slot = slot;
    g.var_name = t.text[0];
    advance();
    expect_ident("in", "'in'");
    expect_punct('[', "'['");
    g.lo = parse_bound();
    expect_punct(',', "','");
    g.hi = parse_bound();
    expect_punct(']', "']'");
    if (g.lo > g.hi) fail(errc::schema_error, "guard interval has lo > hi");
    return g;
  }

  double parse_bound() {
    bool neg = accept_punct('-');
    const Token& t = cur();
    if (t.kind != Token::Kind::number) throw ParseError(t.pos, "a number");
    double v = t.number;
    advance();
    return neg ? -v : v;
  }

  std::vector<ExprTree> parse_exprlist() {
    // "(" expr "," ... ")" is a vector literal; disambiguate from a
    // parenthesized scalar expression by trying the tuple first.
    if (cur().kind == Token::Kind::punct && cur().punct == '(') {
      std::size_t save = idx_;
      advance();
      ExprTree first;
      bool tuple = false;
      try {
        first.root = parse_expr(first);
        tuple = cur().kind == Token::Kind::punct && cur().punct == ',';
      } catch (const ParseError&) {
        tuple = false;
      }
      if (tuple) {
        std::vector<ExprTree> list;
        list.push_back(std::move(first));
        while (accept_punct(',')) {
          ExprTree e;
          e.root = parse_expr(e);
          list.push_back(std::move(e));
        }
        expect_punct(')', "')'");
        return list;
      }
      idx_ = save;
    }
    std::vector<ExprTree> list;
    ExprTree e;
    e.root = parse_expr(e);
    list.push_back(std::move(e));
    while (accept_punct(',')) {
      ExprTree e2;
      e2.root = parse_expr(e2);
      list.push_back(std::move(e2));
    }
    return list;
  }

  int parse_expr(ExprTree& tree) {
    int lhs = parse_term(tree);
    for (;;) {
      if (accept_punct('+'))
        lhs = binary(tree, ExprNode::Kind::add, lhs, parse_term(tree));
      else if (accept_punct('-'))
        lhs = binary(tree, ExprNode::Kind::sub, lhs, parse_term(tree));
      else
        return lhs;
    }
  }

  int parse_term(ExprTree& tree) {
    int lhs = parse_factor(tree);
    for (;;) {
      if (accept_punct('*'))
        lhs = binary(tree, ExprNode::Kind::mul, lhs, parse_factor(tree));
      else if (accept_punct('/'))
        lhs = binary(tree, ExprNode::Kind::div, lhs, parse_factor(tree));
      else
        return lhs;
    }
  }

  int parse_factor(ExprTree& tree) {
    const Token& t = cur();
    if (t.kind == Token::Kind::number) {
      advance();
      ExprNode n;
      n.kind = ExprNode::Kind::number;
      n.number = t.number;
      return push(tree, std::move(n));
    }
    if (t.kind == Token::Kind::punct && t.punct == '-') {
      advance();
      ExprNode n;
      n.kind = ExprNode::Kind::negate;
      n.args = {parse_factor(tree)};
      return push(tree, std::move(n));
    }
    if (t.kind == Token::Kind::punct && t.punct == '(') {
      advance();
      int inner = parse_expr(tree);
      expect_punct(')', "')'");
      return inner;
    }
    if (t.kind == Token::Kind::ident) {
      if (t.text == "max" || t.text == "min" || t.text == "sqrt" || t.text == "abs") {
        Func f = t.text == "max"   ? Func::max
                 : t.text == "min" ? Func::min
                 : t.text == "sqrt" ? Func::sqrt
                                    : Func::abs;
        advance();
        expect_punct('(', "'('");
        std::vector<int> args;
        args.push_back(parse_expr(tree));
        while (accept_punct(',')) args.push_back(parse_expr(tree));
        expect_punct(')', "')'");
        if ((f == Func::max || f == Func::min) && args.size() < 2)
          fail(errc::arity_error, t.text + " needs at least two arguments");
        if ((f == Func::sqrt || f == Func::abs) && args.size() != 1)
          fail(errc::arity_error, t.text + " takes exactly one argument");
        ExprNode n;
        n.kind = ExprNode::Kind::call;
        n.func = f;
        n.args = std::move(args);
        return push(tree, std::move(n));
      }
      int slot = var_slot(t.text, t.pos);
      ExprNode n;
      n.kind = ExprNode::Kind::variable;
      n.var_slot = slot;
      n.var_name = t.text[0];
      advance();
      return push(tree, std::move(n));
    }
    throw ParseError(t.pos, "a number, variable, function call, or '('");
  }

  int var_slot(const std::string& name, std::size_t pos) {
    if (relation_vars_) {
      if (name == "r") return 0;
      if (name == "s") return 1;
      if (name == "t") return 2;
      if (name == "x" || name == "y")
        fail(errc::unknown_variable, "'" + name + "' is not a relation variable (use r, s, t)");
    } else {
      if (name == "x") return 0;
      if (name == "y") return 1;
      if (name == "r" || name == "s" || name == "t")
        fail(errc::unknown_variable, "'" + name + "' is not a map variable (use x, y)");
    }
    throw ParseError(pos, "a variable (unknown identifier '" + name + "')");
  }

  static int binary(ExprTree& tree, ExprNode::Kind kind, int a, int b) {
    ExprNode n;
    n.kind = kind;
    n.args = {a, b};
    return push(tree, std::move(n));
  }

  static int push(ExprTree& tree, ExprNode&& n) {
    tree.nodes.push_back(std::move(n));
    return static_cast<int>(tree.nodes.size()) - 1;
  }

  const Token& cur() const { return tokens_[idx_]; }
  void advance() { ++idx_; }

  bool peek_ident(const char* word) const {
    return cur().kind == Token::Kind::ident && cur().text == word;
  }

  void expect_ident(const char* word, const char* what) {
    if (!peek_ident(word)) throw ParseError(cur().pos, what);
    advance();
  }

  bool accept_punct(char c) {
    if (cur().kind == Token::Kind::punct && cur().punct == c) {
      advance();
      return true;
    }
    return false;
  }

  void expect_punct(char c, const char* what) {
    if (!accept_punct(c)) throw ParseError(cur().pos, what);
  }

  void expect_end(const char* what) {
    if (cur().kind != Token::Kind::end) throw ParseError(cur().pos, what);
  }

  std::vector<Token> tokens_;
  std::size_t idx_ = 0;
  bool relation_vars_;
};

}  // namespace detail

inline MappingSpec parse_map(const std::string& text) {
  return detail::Parser(text, /*relation_vars=*/false).parse_map();
}

inline RelationExpr parse_relation(const std::string& text) {
  RelationExpr rel;
  rel.body = detail::Parser(text, /*relation_vars=*/true).parse_single_expression();
  rel.source = text;
  return rel;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// Evaluates the first piece (in declaration order) whose guard accepts p.
inline Point eval_map(const MappingSpec& spec, const Point& p) {
  if (static_cast<int>(p.size()) < spec.arity)
    fail(errc::dimension_mismatch, "eval_map point has too few coordinates");
  for (const auto& piece : spec.pieces) {
    bool ok = true;
    for (const auto& g : piece.guard) {
      double v = p[static_cast<std::size_t>(g.var_slot)];
      if (v < g.lo || v > g.hi) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    Point out;
    out.reserve(piece.outputs.size());
    for (const auto& tree : piece.outputs)
      out.push_back(tree.eval(p.data(), static_cast<int>(p.size())));
    return out;
  }
  fail(errc::guard_miss, "point matches no piece guard");
}

// ---------------------------------------------------------------------------
// Printing (canonical, round-trips through parse)
// ---------------------------------------------------------------------------

namespace detail {

inline int node_prec(const ExprNode& n) {
  switch (n.kind) {
    case ExprNode::Kind::add:
    case ExprNode::Kind::sub: return 1;
    case ExprNode::Kind::mul:
    case ExprNode::Kind::div: return 2;
    case ExprNode::Kind::negate: return 3;
    default: return 100;
  }
}

inline void print_node(const ExprTree& tree, int idx, int min_prec, std::string& out) {
  const ExprNode& n = tree.nodes[static_cast<std::size_t>(idx)];
  bool parens = node_prec(n) < min_prec;
  if (parens) out += '(';
  switch (n.kind) {
    case ExprNode::Kind::number: out += format_shortest(n.number); break;
    case ExprNode::Kind::variable: out += n.var_name; break;
    case ExprNode::Kind::negate:
      out += '-';
      print_node(tree, n.args[0], 3, out);
      break;
    case ExprNode::Kind::add:
      print_node(tree, n.args[0], 1, out);
      out += '+';
      print_node(tree, n.args[1], 2, out);
      break;
    case ExprNode::Kind::sub:
      print_node(tree, n.args[0], 1, out);
      out += '-';
      print_node(tree, n.args[1], 2, out);
      break;
    case ExprNode::Kind::mul:
      print_node(tree, n.args[0], 2, out);
      out += '*';
      print_node(tree, n.args[1], 3, out);
      break;
    case ExprNode::Kind::div:
      print_node(tree, n.args[0], 2, out);
      out += '/';
      print_node(tree, n.args[1], 3, out);
      break;
    case ExprNode::Kind::call: {
      switch (n.func) {
        case Func::max: out += "max"; break;
        case Func::min: out += "min"; break;
        case Func::sqrt: out += "sqrt"; break;
        case Func::abs: out += "abs"; break;
      }
      out += '(';
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += ", ";
        print_node(tree, n.args[i], 0, out);
      }
      out += ')';
      break;
    }
  }
  if (parens) out += ')';
}

}  // namespace detail

inline std::string print_expr(const ExprTree& tree) {
  std::string out;
  detail::print_node(tree, tree.root, 0, out);
  return out;
}

inline std::string print_map(const MappingSpec& spec) {
  auto print_outputs = [](const MapPiece& piece) {
    std::string out;
    for (std::size_t i = 0; i < piece.outputs.size(); ++i) {
      if (i) out += ", ";
      out += print_expr(piece.outputs[i]);
    }
    return out;
  };
  if (spec.pieces.size() == 1 && spec.pieces.front().guard.empty())
    return print_outputs(spec.pieces.front());
  std::string out;
  for (std::size_t p = 0; p < spec.pieces.size(); ++p) {
    if (p) out += "; ";
    out += "piece ";
    const auto& piece = spec.pieces[p];
    for (std::size_t g = 0; g < piece.guard.size(); ++g) {
      if (g) out += " and ";
      out += piece.guard[g].var_name;
      out += " in [";
      out += format_shortest(piece.guard[g].lo);
      out += ",";
      out += format_shortest(piece.guard[g].hi);
      out += "]";
    }
    out += ": ";
    out += print_outputs(piece);
  }
  return out;
}

}  // namespace proxipoint
