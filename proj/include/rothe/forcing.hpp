#pragma once

#include <cctype>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rothe/field.hpp"

namespace rothe {

/// Scalar function of t parsed from a small grammar:
///   expr   := term (('+' | '-') term)*
///   term   := unary (('*' | '/') unary)*
///   unary  := '-' unary | power
///   power  := atom ('^' unary)?
///   atom   := number | 't' | ('exp' | 'sin') '(' expr ')' | '(' expr ')'
class TimeExpression {
 public:
  static TimeExpression parse(std::string_view text) {
    Parser parser{text, 0};
    auto node = parser.expr();
    parser.skip();
    if (parser.pos != text.size())
      fail(ErrorCode::ParseError, "unexpected '" + std::string(text.substr(parser.pos)) + "' in time expression");
    return TimeExpression(std::string(text), std::move(node));
  }

  double operator()(double t) const { return eval_(t); }
  [[nodiscard]] const std::string& text() const noexcept { return text_; }

 private:
  using Fn = std::function<double(double)>;

  TimeExpression(std::string text, Fn fn) : text_(std::move(text)), eval_(std::move(fn)) {}

  struct Parser {
    std::string_view s;
    std::size_t pos;

    void skip() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
      skip();
      if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }
    Fn expr() {
      Fn lhs = term();
      while (true) {
        if (eat('+')) {
          lhs = [a = lhs, b = term()](double t) { return a(t) + b(t); };
        } else if (eat('-')) {
          lhs = [a = lhs, b = term()](double t) { return a(t) - b(t); };
        } else {
          return lhs;
        }
      }
    }
    Fn term() {
      Fn lhs = unary();
      while (true) {
        if (eat('*')) {
          lhs = [a = lhs, b = unary()](double t) { return a(t) * b(t); };
        } else if (eat('/')) {
          lhs = [a = lhs, b = unary()](double t) { return a(t) / b(t); };
        } else {
          return lhs;
        }
      }
    }
    Fn unary() {
      if (eat('-')) return [a = unary()](double t) { return -a(t); };
      return power();
    }
    Fn power() {
      Fn base = atom();
      if (eat('^')) return [a = base, b = unary()](double t) { return std::pow(a(t), b(t)); };
      return base;
    }
    Fn atom() {
      skip();
      if (pos >= s.size()) fail(ErrorCode::ParseError, "time expression ended early");
      if (eat('(')) {
        Fn inner = expr();
        if (!eat(')')) fail(ErrorCode::ParseError, "missing ')' in time expression");
        return inner;
      }
      const char c = s[pos];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        std::size_t used = 0;
        const double value = std::stod(std::string(s.substr(pos)), &used);
        pos += used;
        return [value](double) { return value; };
      }
      if (std::isalpha(static_cast<unsigned char>(c))) {
        std::size_t end = pos;
        while (end < s.size() && std::isalpha(static_cast<unsigned char>(s[end]))) ++end;
        const std::string name(s.substr(pos, end - pos));
        pos = end;
        if (name == "t") return [](double t) { return t; };
        if (name == "exp" || name == "sin") {
          if (!eat('(')) fail(ErrorCode::ParseError, "expected '(' after " + name);
          Fn arg = expr();
          if (!eat(')')) fail(ErrorCode::ParseError, "missing ')' after " + name + " argument");
          if (name == "exp") return [a = arg](double t) { return std::exp(a(t)); };
          return [a = arg](double t) { return std::sin(a(t)); };
        }
        fail(ErrorCode::ParseError, "unknown name '" + name + "' in time expression");
      }
      fail(ErrorCode::ParseError, std::string("unexpected character '") + c + "' in time expression");
    }
  };

  std::string text_;
  Fn eval_;
};

/// Time-parameterized forcing f(·, t) on a graph.
class Forcing {
 public:
  using Sampler = std::function<VertexField(double)>;

  Forcing(GraphPtr graph, Sampler sampler) : graph_(std::move(graph)), sampler_(std::move(sampler)) {}

  static Forcing zero(const GraphPtr& g) {
    return Forcing(g, [g](double) { return VertexField(g); });
  }

  static Forcing constant(VertexField f) {
    auto g = f.graph_ptr();
    return Forcing(g, [f = std::move(f)](double) { return f; });
  }

  /// f(x, t) = χ(x) · e(t).
  static Forcing separable(VertexField chi, TimeExpression time) {
    auto g = chi.graph_ptr();
    return Forcing(g, [chi = std::move(chi), time = std::move(time)](double t) { return time(t) * chi; });
  }

  static Forcing separable(VertexField chi, std::function<double(double)> time) {
    auto g = chi.graph_ptr();
    return Forcing(g, [chi = std::move(chi), time = std::move(time)](double t) { return time(t) * chi; });
  }

  /// Fields given at listed times; sampling any other time is an error.
  static Forcing table(std::vector<double> times, std::vector<VertexField> fields) {
    if (times.empty() || times.size() != fields.size())
      fail(ErrorCode::InvalidArgument, "forcing table needs one field per time");
    auto g = fields.front().graph_ptr();
    return Forcing(g, [times = std::move(times), fields = std::move(fields)](double t) {
      for (std::size_t k = 0; k < times.size(); ++k)
        if (std::abs(times[k] - t) <= 1e-12 * (1.0 + std::abs(t))) return fields[k];
      fail(ErrorCode::TimeOutOfRange, "forcing table has no entry at t = " + std::to_string(t));
    });
  }

  VertexField operator()(double t) const {
    VertexField f = sampler_(t);
    require_same_graph(f.graph(), *graph_);
    return f;
  }

  [[nodiscard]] const GraphPtr& graph_ptr() const noexcept { return graph_; }

 private:
  GraphPtr graph_;
  Sampler sampler_;
};

}  // namespace rothe
