#include "mafol/ast.hpp"

#include <cctype>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <sstream>

namespace mafol::dsl {

const char* func_name(Func f) {
  switch (f) {
    case Func::Conj: return "conj";
    case Func::Re: return "re";
    case Func::Im: return "im";
    case Func::Abs2: return "abs2";
    case Func::Exp: return "exp";
    case Func::Log: return "log";
  }
  return "?";
}

AstPtr ExprAst::make_number(double v) {
  auto node = std::make_shared<ExprAst>();
  node->kind = NodeKind::Number;
  node->number = v;
  return node;
}

AstPtr ExprAst::make_imag() {
  auto node = std::make_shared<ExprAst>();
  node->kind = NodeKind::ImagUnit;
  return node;
}

AstPtr ExprAst::make_var(int k) {
  auto node = std::make_shared<ExprAst>();
  node->kind = NodeKind::Var;
  node->var = k;
  return node;
}

AstPtr ExprAst::make_binary(NodeKind kind, AstPtr a, AstPtr b) {
  auto node = std::make_shared<ExprAst>();
  node->kind = kind;
  node->lhs = std::move(a);
  node->rhs = std::move(b);
  return node;
}

AstPtr ExprAst::make_neg(AstPtr a) {
  auto node = std::make_shared<ExprAst>();
  node->kind = NodeKind::Neg;
  node->lhs = std::move(a);
  return node;
}

AstPtr ExprAst::make_pow(AstPtr a, int e) {
  auto node = std::make_shared<ExprAst>();
  node->kind = NodeKind::IntPow;
  node->lhs = std::move(a);
  node->exponent = e;
  return node;
}

AstPtr ExprAst::make_call(Func f, AstPtr a) {
  auto node = std::make_shared<ExprAst>();
  node->kind = NodeKind::Call;
  node->func = f;
  node->lhs = std::move(a);
  return node;
}

namespace {

class Parser {
 public:
  Parser(const std::string& text, int n) : text_(text), n_(n) {}

  AstPtr run() {
    AstPtr e = expr();
    skip_ws();
    if (pos_ != text_.size()) error("end of input");
    return e;
  }

  double run_number_with_suffix(bool& is_imag) {
    skip_ws();
    bool neg = false;
    if (peek() == '-') {
      neg = true;
      ++pos_;
    } else if (peek() == '+') {
      ++pos_;
    }
    skip_ws();
    double v;
    if (peek() == 'i') {
      ++pos_;
      v = 1.0;
      is_imag = true;
    } else {
      v = number();
      is_imag = false;
      if (peek() == 'i') {
        ++pos_;
        is_imag = true;
      }
    }
    return neg ? -v : v;
  }

  bool at_end() {
    skip_ws();
    return pos_ == text_.size();
  }
  char peek_raw() { return peek(); }

 private:
  const std::string& text_;
  int n_;
  size_t pos_ = 0;

  [[noreturn]] void error(const std::string& expected) {
    fail(ErrorKind::ParseError,
         "at position " + std::to_string(pos_) + ": expected " + expected);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool consume(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  AstPtr expr() {
    AstPtr e = term();
    while (true) {
      char c = peek();
      if (c == '+' || c == '-') {
        ++pos_;
        e = ExprAst::make_binary(c == '+' ? NodeKind::Add : NodeKind::Sub, e, term());
      } else {
        return e;
      }
    }
  }

  AstPtr term() {
    AstPtr e = unary();
    while (true) {
      char c = peek();
      if (c == '*' || c == '/') {
        ++pos_;
        e = ExprAst::make_binary(c == '*' ? NodeKind::Mul : NodeKind::Div, e, unary());
      } else {
        return e;
      }
    }
  }

  AstPtr unary() {
    if (consume('-')) return ExprAst::make_neg(unary());
    return factor();
  }

  AstPtr factor() {
    AstPtr b = base();
    if (consume('^')) return ExprAst::make_pow(b, integer());
    return b;
  }

  AstPtr base() {
    char c = peek();
    if (c == '(') {
      ++pos_;
      AstPtr e = expr();
      if (!consume(')')) error("')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return ExprAst::make_number(number());
    if (std::isalpha(static_cast<unsigned char>(c))) return ident();
    error("number, 'i', variable, function call or '('");
  }

  AstPtr ident() {
    size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    std::string name = text_.substr(start, pos_ - start);
    if (name == "i") return ExprAst::make_imag();
    if (name.size() >= 2 && name[0] == 'z') {
      int k = 0;
      for (size_t j = 1; j < name.size(); ++j) {
        if (!std::isdigit(static_cast<unsigned char>(name[j]))) {
          pos_ = start;
          error("variable index after 'z'");
        }
        k = k * 10 + (name[j] - '0');
      }
      if (k < 1 || k > n_)
        fail(ErrorKind::UnknownVariable,
             "z" + std::to_string(k) + " with n = " + std::to_string(n_));
      return ExprAst::make_var(k - 1);
    }
    Func f;
    if (name == "conj") f = Func::Conj;
    else if (name == "re") f = Func::Re;
    else if (name == "im") f = Func::Im;
    else if (name == "abs2") f = Func::Abs2;
    else if (name == "exp") f = Func::Exp;
    else if (name == "log") f = Func::Log;
    else {
      pos_ = start;
      error("one of conj, re, im, abs2, exp, log");
    }
    if (!consume('(')) error("'(' after " + name);
    AstPtr arg = expr();
    if (!consume(')')) error("')'");
    return ExprAst::make_call(f, arg);
  }

  int integer() {
    skip_ws();
    bool neg = false;
    if (consume('-')) neg = true;
    if (!std::isdigit(static_cast<unsigned char>(peek()))) error("integer exponent");
    long v = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
      v = v * 10 + (text_[pos_++] - '0');
    return static_cast<int>(neg ? -v : v);
  }

  double number() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    if (pos_ == start) error("number");
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      size_t mark = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      } else {
        pos_ = mark;  // 'e' starts an identifier, not an exponent
      }
    }
    return std::strtod(text_.substr(start, pos_ - start).c_str(), nullptr);
  }
};

void print(const ExprAst& ast, std::ostream& os, int parent_prec);

int precedence(NodeKind k) {
  switch (k) {
    case NodeKind::Add:
    case NodeKind::Sub: return 1;
    case NodeKind::Mul:
    case NodeKind::Div: return 2;
    case NodeKind::Neg: return 3;
    case NodeKind::IntPow: return 4;
    default: return 5;
  }
}

void print(const ExprAst& ast, std::ostream& os, int parent_prec) {
  const int prec = precedence(ast.kind);
  const bool parens = prec < parent_prec;
  if (parens) os << '(';
  switch (ast.kind) {
    case NodeKind::Number: {
      std::ostringstream tmp;
      tmp.precision(17);
      tmp << ast.number;
      os << tmp.str();
      break;
    }
    case NodeKind::ImagUnit: os << 'i'; break;
    case NodeKind::Var: os << 'z' << (ast.var + 1); break;
    case NodeKind::Add:
      print(*ast.lhs, os, prec);
      os << " + ";
      print(*ast.rhs, os, prec + 1);
      break;
    case NodeKind::Sub:
      print(*ast.lhs, os, prec);
      os << " - ";
      print(*ast.rhs, os, prec + 1);
      break;
    case NodeKind::Mul:
      print(*ast.lhs, os, prec);
      os << "*";
      print(*ast.rhs, os, prec + 1);
      break;
    case NodeKind::Div:
      print(*ast.lhs, os, prec);
      os << "/";
      print(*ast.rhs, os, prec + 1);
      break;
    case NodeKind::Neg:
      os << '-';
      print(*ast.lhs, os, prec + 1);
      break;
    case NodeKind::IntPow:
      print(*ast.lhs, os, prec + 1);
      os << '^' << ast.exponent;
      break;
    case NodeKind::Call:
      os << func_name(ast.func) << '(';
      print(*ast.lhs, os, 0);
      os << ')';
      break;
  }
  if (parens) os << ')';
}

}  // namespace

AstPtr parse_expr(const std::string& text, int n) { return Parser(text, n).run(); }

std::string pretty_print(const ExprAst& ast) {
  std::ostringstream os;
  print(ast, os, 0);
  return os.str();
}

bool ast_equal(const ExprAst& a, const ExprAst& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case NodeKind::Number: return a.number == b.number;
    case NodeKind::ImagUnit: return true;
    case NodeKind::Var: return a.var == b.var;
    case NodeKind::IntPow: return a.exponent == b.exponent && ast_equal(*a.lhs, *b.lhs);
    case NodeKind::Neg: return ast_equal(*a.lhs, *b.lhs);
    case NodeKind::Call: return a.func == b.func && ast_equal(*a.lhs, *b.lhs);
    default: return ast_equal(*a.lhs, *b.lhs) && ast_equal(*a.rhs, *b.rhs);
  }
}

std::complex<double> parse_complex_literal(const std::string& text) {
  Parser p(text, 0);
  bool imag1 = false;
  double v1 = p.run_number_with_suffix(imag1);
  std::complex<double> out = imag1 ? std::complex<double>(0, v1) : std::complex<double>(v1, 0);
  if (!p.at_end()) {
    char c = p.peek_raw();
    if (c != '+' && c != '-') fail(ErrorKind::ParseError, "bad complex literal: " + text);
    bool imag2 = false;
    double v2 = p.run_number_with_suffix(imag2);
    if (imag1 == imag2) fail(ErrorKind::ParseError, "bad complex literal: " + text);
    out += imag2 ? std::complex<double>(0, v2) : std::complex<double>(v2, 0);
    if (!p.at_end()) fail(ErrorKind::ParseError, "bad complex literal: " + text);
  }
  return out;
}

PotentialSpec parse_potential(const std::string& text, int n, int p) {
  if (p < 1 || p >= n)
    fail(ErrorKind::BadCodimension, "p = " + std::to_string(p) + " outside [1, n-1], n = " + std::to_string(n));
  PotentialSpec spec;
  spec.n = n;
  spec.p = p;
  spec.expr = parse_expr(text, n);
  return spec;
}

FrameSpec parse_frame(const std::vector<std::string>& rows, int n) {
  if (rows.empty() || static_cast<int>(rows.size()) >= n)
    fail(ErrorKind::BadInput, "frame must have between 1 and n-1 rows");
  FrameSpec frame;
  frame.n = n;
  frame.rank = static_cast<int>(rows.size());
  for (const std::string& row : rows) {
    std::vector<AstPtr> comps;
    // split on top-level commas
    int depth = 0;
    std::string cur;
    for (char c : row) {
      if (c == '(') ++depth;
      if (c == ')') --depth;
      if (c == ',' && depth == 0) {
        comps.push_back(parse_expr(cur, n));
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    comps.push_back(parse_expr(cur, n));
    if (static_cast<int>(comps.size()) != n)
      fail(ErrorKind::ParseError,
           "frame row has " + std::to_string(comps.size()) + " components, expected " + std::to_string(n));
    frame.components.push_back(std::move(comps));
  }
  return frame;
}

}  // namespace mafol::dsl
