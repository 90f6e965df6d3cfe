#pragma once

// Expressions in one real variable x with complex arithmetic:
//   literals (3, 2.5e-1, 4i), i, pi, x, + - * / ^, sin cos sqrt exp log abs,
//   piecewise(c, left|right, below, above).
// A product with an exactly zero factor is zero, so x^a * sin(1/x) is 0 at x = 0.

#include <cctype>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kms/error.hpp"
#include "kms/numeric.hpp"
#include "kms/symbol.hpp"

namespace kms {

class Expr {
 public:
  enum class Op { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Call, Piecewise };

  struct Node {
    Op op = Op::Const;
    cplx value;
    std::string fn;
    double at = 0.0;
    Continuity side = Continuity::Left;
    std::vector<std::shared_ptr<const Node>> kids;
  };

  Expr() = default;

  static Expr parse(std::string_view text) {
    Parser p{text};
    auto root = p.expression();
    p.skip_ws();
    if (p.pos < text.size()) p.fail("unexpected '" + std::string(1, text[p.pos]) + "'");
    Expr e;
    e.root_ = std::move(root);
    e.text_ = std::string(text);
    return e;
  }

  const std::string& text() const noexcept { return text_; }

  cplx operator()(double x) const { return eval(*root_, x, std::nullopt); }

  /// Evaluates with every piecewise node choosing its branch as if x were `selector`.
  cplx eval_branch(double x, double selector) const { return eval(*root_, x, selector); }

  /// Breakpoints of all piecewise nodes, sorted; conflicting sides at one point throw.
  std::vector<Breakpoint> breakpoints() const {
    std::vector<Breakpoint> out;
    collect(*root_, out);
    std::sort(out.begin(), out.end(), [](const Breakpoint& a, const Breakpoint& b) { return a.at < b.at; });
    std::vector<Breakpoint> uniq;
    for (const auto& b : out) {
      if (!uniq.empty() && uniq.back().at == b.at) {
        if (uniq.back().side != b.side) throw ParseError("breakpoint with conflicting continuity sides", 1, 1);
        continue;
      }
      uniq.push_back(b);
    }
    return uniq;
  }

  /// Real potential with one smooth piece per interval between breakpoints.
  PiecewisePotential to_potential(std::string label = {}) const {
    const auto bps = breakpoints();
    std::vector<RealFn> pieces;
    for (std::size_t i = 0; i <= bps.size(); ++i) {
      const double lo = i == 0 ? 0.0 : bps[i - 1].at;
      const double hi = i == bps.size() ? 1.0 : bps[i].at;
      const double mid = 0.5 * (lo + hi);
      auto self = *this;
      pieces.push_back([self, mid](double x) {
        const cplx v = self.eval_branch(x, mid);
        if (std::abs(v.imag()) > 1e-12 * std::max(1.0, std::abs(v.real())))
          throw DomainError("potential takes the complex value at x = " + numeric::format_double(x));
        return v.real();
      });
    }
    return PiecewisePotential(std::move(pieces), bps, std::move(label));
  }

  CoefficientFn as_coefficient() const {
    auto self = *this;
    return [self](double x) { return self(x); };
  }

 private:
  using NodePtr = std::shared_ptr<const Node>;

  static NodePtr make(Op op, std::vector<NodePtr> kids = {}) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->kids = std::move(kids);
    return n;
  }

  static cplx power(cplx b, cplx e) {
    if (e.imag() == 0.0) {
      const double p = e.real();
      if (b == cplx(0.0)) return p > 0.0 ? cplx(0.0) : (p == 0.0 ? cplx(1.0) : cplx(HUGE_VAL));
      if (p == std::round(p) && std::abs(p) <= 64.0) {
        cplx r = 1.0;
        for (int i = 0; i < static_cast<int>(std::abs(p)); ++i) r *= b;
        return p < 0 ? 1.0 / r : r;
      }
      if (b.imag() == 0.0 && b.real() > 0.0) return std::pow(b.real(), p);
      return std::pow(b, p);
    }
    return std::pow(b, e);
  }

  static cplx eval(const Node& n, double x, std::optional<double> sel) {
    switch (n.op) {
      case Op::Const:
        return n.value;
      case Op::Var:
        return x;
      case Op::Add:
        return eval(*n.kids[0], x, sel) + eval(*n.kids[1], x, sel);
      case Op::Sub:
        return eval(*n.kids[0], x, sel) - eval(*n.kids[1], x, sel);
      case Op::Mul: {
        const cplx a = eval(*n.kids[0], x, sel);
        if (a == cplx(0.0)) return 0.0;
        const cplx b = eval(*n.kids[1], x, sel);
        if (b == cplx(0.0)) return 0.0;
        return a * b;
      }
      case Op::Div:
        return eval(*n.kids[0], x, sel) / eval(*n.kids[1], x, sel);
      case Op::Pow:
        return power(eval(*n.kids[0], x, sel), eval(*n.kids[1], x, sel));
      case Op::Neg:
        return -eval(*n.kids[0], x, sel);
      case Op::Call: {
        const cplx a = eval(*n.kids[0], x, sel);
        if (n.fn == "sin") return a.imag() == 0.0 ? cplx(std::sin(a.real())) : std::sin(a);
        if (n.fn == "cos") return a.imag() == 0.0 ? cplx(std::cos(a.real())) : std::cos(a);
        if (n.fn == "exp") return a.imag() == 0.0 ? cplx(std::exp(a.real())) : std::exp(a);
        if (n.fn == "sqrt") return (a.imag() == 0.0 && a.real() >= 0.0) ? cplx(std::sqrt(a.real())) : std::sqrt(a);
        if (n.fn == "log") return (a.imag() == 0.0 && a.real() > 0.0) ? cplx(std::log(a.real())) : std::log(a);
        return std::abs(a);
      }
      case Op::Piecewise: {
        const double probe = sel.value_or(x);
        const bool below = probe < n.at || (probe == n.at && n.side == Continuity::Left);
        return eval(*n.kids[below ? 0 : 1], x, sel);
      }
    }
    return 0.0;
  }

  static void collect(const Node& n, std::vector<Breakpoint>& out) {
    if (n.op == Op::Piecewise) out.push_back({n.at, n.side});
    for (const auto& k : n.kids) collect(*k, out);
  }

  struct Parser {
    std::string_view s;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& msg) const {
      std::size_t line = 1, col = 1;
      for (std::size_t i = 0; i < pos && i < s.size(); ++i) {
        if (s[i] == '\n') {
          ++line;
          col = 1;
        } else {
          ++col;
        }
      }
      throw ParseError("expression: " + msg, line, col);
    }

    void skip_ws() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    bool accept(char c) {
      skip_ws();
      if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }

    void expect(char c) {
      if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    NodePtr expression() {
      auto lhs = term();
      for (;;) {
        if (accept('+'))
          lhs = make(Op::Add, {lhs, term()});
        else if (accept('-'))
          lhs = make(Op::Sub, {lhs, term()});
        else
          return lhs;
      }
    }

    NodePtr term() {
      auto lhs = unary();
      for (;;) {
        if (accept('*'))
          lhs = make(Op::Mul, {lhs, unary()});
        else if (accept('/'))
          lhs = make(Op::Div, {lhs, unary()});
        else
          return lhs;
      }
    }

    NodePtr unary() {
      if (accept('-')) return make(Op::Neg, {unary()});
      if (accept('+')) return unary();
      return power();
    }

    NodePtr power() {
      auto base = primary();
      if (accept('^')) return make(Op::Pow, {base, unary()});
      return base;
    }

    std::string identifier() {
      std::string id;
      while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) id += s[pos++];
      return id;
    }

    double constant_number() {
      skip_ws();
      bool neg = false;
      if (accept('-')) neg = true;
      skip_ws();
      const std::size_t start = pos;
      auto n = primary();
      if (n->op != Op::Const || n->value.imag() != 0.0) {
        pos = start;
        fail("breakpoint must be a real constant");
      }
      return neg ? -n->value.real() : n->value.real();
    }

    NodePtr number() {
      const std::size_t start = pos;
      while (pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.')) ++pos;
      if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
        std::size_t save = pos++;
        if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) ++pos;
        if (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
          while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        } else {
          pos = save;
        }
      }
      double v = 0.0;
      try {
        v = numeric::parse_double(std::string(s.substr(start, pos - start)));
      } catch (const DomainError&) {
        pos = start;
        fail("malformed number");
      }
      auto n = make(Op::Const);
      if (pos < s.size() && s[pos] == 'i' &&
          !(pos + 1 < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos + 1])) || s[pos + 1] == '_'))) {
        ++pos;
        std::const_pointer_cast<Node>(n)->value = cplx(0.0, v);
      } else {
        std::const_pointer_cast<Node>(n)->value = cplx(v, 0.0);
      }
      return n;
    }

    NodePtr primary() {
      skip_ws();
      if (pos >= s.size()) fail("unexpected end of expression");
      const char c = s[pos];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
      if (c == '(') {
        ++pos;
        auto e = expression();
        expect(')');
        return e;
      }
      if (std::isalpha(static_cast<unsigned char>(c))) {
        const std::size_t start = pos;
        const auto id = identifier();
        if (id == "x") return make(Op::Var);
        if (id == "i" || id == "pi") {
          auto n = make(Op::Const);
          std::const_pointer_cast<Node>(n)->value = id == "i" ? cplx(0.0, 1.0) : cplx(kPi, 0.0);
          return n;
        }
        if (id == "sin" || id == "cos" || id == "sqrt" || id == "exp" || id == "log" || id == "abs") {
          expect('(');
          auto arg = expression();
          expect(')');
          auto n = make(Op::Call, {arg});
          std::const_pointer_cast<Node>(n)->fn = id;
          return n;
        }
        if (id == "piecewise") {
          expect('(');
          const double at = constant_number();
          expect(',');
          skip_ws();
          const std::size_t side_pos = pos;
          const auto side = identifier();
          if (side != "left" && side != "right") {
            pos = side_pos;
            fail("piecewise side must be 'left' or 'right'");
          }
          expect(',');
          auto below = expression();
          expect(',');
          auto above = expression();
          expect(')');
          auto n = make(Op::Piecewise, {below, above});
          auto* m = std::const_pointer_cast<Node>(n).get();
          m->at = at;
          m->side = side == "left" ? Continuity::Left : Continuity::Right;
          return n;
        }
        pos = start;
        fail("unknown identifier '" + id + "'");
      }
      fail(std::string("unexpected '") + c + "'");
    }
  };

  NodePtr root_ = make(Op::Const);
  std::string text_ = "0";
};

}  // namespace kms
