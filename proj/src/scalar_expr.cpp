#include "bulksurf/scalar_expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "bulksurf/polynomial.hpp"

namespace bulksurf {

namespace {

using Fn = std::function<double(const double*)>;

class ExprParser {
 public:
  ExprParser(const std::string& s, const std::vector<std::string>& inputs, const std::map<std::string, double>& params)
      : s_(s), inputs_(inputs), params_(params) {}

  Fn run() {
    Fn f = expr();
    skip();
    if (pos_ != s_.size()) throw ParseError(std::string("unexpected character '") + s_[pos_] + "'", pos_);
    return f;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Fn expr() {
    Fn acc = term();
    while (true) {
      if (accept('+')) {
        Fn r = term();
        acc = [a = acc, r](const double* x) { return a(x) + r(x); };
      } else if (accept('-')) {
        Fn r = term();
        acc = [a = acc, r](const double* x) { return a(x) - r(x); };
      } else {
        return acc;
      }
    }
  }

  Fn term() {
    Fn acc = unary();
    while (true) {
      if (accept('*')) {
        Fn r = unary();
        acc = [a = acc, r](const double* x) { return a(x) * r(x); };
      } else if (accept('/')) {
        Fn r = unary();
        acc = [a = acc, r](const double* x) { return a(x) / r(x); };
      } else {
        return acc;
      }
    }
  }

  Fn unary() {
    if (accept('-')) {
      Fn f = unary();
      return [f](const double* x) { return -f(x); };
    }
    if (accept('+')) return unary();
    return power();
  }

  Fn power() {
    Fn b = primary();
    if (accept('^')) {
      Fn e = unary();
      return [b, e](const double* x) { return std::pow(b(x), e(x)); };
    }
    return b;
  }

  Fn primary() {
    skip();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of expression", pos_);
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Fn f = expr();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return f;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
        std::size_t save = pos_++;
        if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
        if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
          while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        } else {
          pos_ = save;
        }
      }
      double v = 0.0;
      auto res = std::from_chars(s_.data() + start, s_.data() + pos_, v);
      if (res.ec != std::errc() || res.ptr != s_.data() + pos_) throw ParseError("malformed number", start);
      return [v](const double*) { return v; };
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      std::string id = s_.substr(start, pos_ - start);
      skip();
      if (pos_ < s_.size() && s_[pos_] == '(') {
        ++pos_;
        Fn arg = expr();
        if (!accept(')')) throw ParseError("expected ')'", pos_);
        return call(id, arg, start);
      }
      for (std::size_t i = 0; i < inputs_.size(); ++i) {
        if (inputs_[i] == id) return [i](const double* x) { return x[i]; };
      }
      if (id == "pi") return [](const double*) { return M_PI; };
      auto it = params_.find(id);
      if (it != params_.end()) {
        double v = it->second;
        return [v](const double*) { return v; };
      }
      throw ParseError("unknown identifier '" + id + "'", start);
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  Fn call(const std::string& name, Fn arg, std::size_t at) {
    double (*f)(double) = nullptr;
    if (name == "cos") f = [](double a) { return std::cos(a); };
    else if (name == "sin") f = [](double a) { return std::sin(a); };
    else if (name == "exp") f = [](double a) { return std::exp(a); };
    else if (name == "log") f = [](double a) { return std::log(a); };
    else if (name == "sqrt") f = [](double a) { return std::sqrt(a); };
    else if (name == "abs") f = [](double a) { return std::fabs(a); };
    else if (name == "tanh") f = [](double a) { return std::tanh(a); };
    else if (name == "pos") f = [](double a) { return a > 0.0 ? a : 0.0; };
    else throw ParseError("unknown function '" + name + "'", at);
    return [f, arg](const double* x) { return f(arg(x)); };
  }

  const std::string& s_;
  const std::vector<std::string>& inputs_;
  const std::map<std::string, double>& params_;
  std::size_t pos_ = 0;
};

}  // namespace

ScalarExpr::ScalarExpr(const std::string& text, const std::vector<std::string>& inputs,
                       const std::map<std::string, double>& parameters)
    : text_(text), ninputs_(inputs.size()), fn_(ExprParser(text, inputs, parameters).run()) {}

double ScalarExpr::operator()(const std::vector<double>& args) const {
  if (args.size() != ninputs_) throw std::invalid_argument("wrong number of expression inputs");
  if (!fn_) return 0.0;
  return fn_(args.data());
}

}  // namespace bulksurf
