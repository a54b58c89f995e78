#include "bulksurf/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "bulksurf/format.hpp"

namespace bulksurf {

MultiIndex::MultiIndex(std::vector<int> exps) : exps_(std::move(exps)) {
  for (int e : exps_) {
    if (e < 0) throw std::invalid_argument("multi-index entries must be non-negative");
    if (e > kMaxExponent) throw std::overflow_error("exponent exceeds cap of 63");
  }
}

int MultiIndex::order() const {
  int s = 0;
  for (int e : exps_) s += e;
  return s;
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  if (other.size() != size()) throw std::invalid_argument("multi-index length mismatch");
  MultiIndex out(size());
  for (std::size_t i = 0; i < size(); ++i) {
    int e = exps_[i] + other.exps_[i];
    if (e > kMaxExponent) throw std::overflow_error("exponent exceeds cap of 63");
    out.exps_[i] = e;
  }
  return out;
}

bool GradedLexGreater::operator()(const MultiIndex& a, const MultiIndex& b) const {
  int da = a.order(), db = b.order();
  if (da != db) return da > db;
  return std::lexicographical_compare(b.exponents().begin(), b.exponents().end(),
                                      a.exponents().begin(), a.exponents().end());
}

Polynomial Polynomial::constant(std::size_t nvars, double c) {
  Polynomial p(nvars);
  p.add_term(MultiIndex(nvars), c);
  return p;
}

Polynomial Polynomial::variable(std::size_t nvars, std::size_t i) {
  if (i >= nvars) throw std::out_of_range("variable index out of range");
  std::vector<int> e(nvars, 0);
  e[i] = 1;
  return monomial(MultiIndex(e), 1.0);
}

Polynomial Polynomial::monomial(const MultiIndex& beta, double c) {
  Polynomial p(beta.size());
  p.add_term(beta, c);
  return p;
}

Polynomial Polynomial::positive_part(const Polynomial& inner) {
  Polynomial p(inner.num_vars());
  p.add_pos(constant(inner.num_vars(), 1.0), inner);
  return p;
}

bool Polynomial::has_pos() const { return !pos_.empty(); }

double Polynomial::coefficient(const MultiIndex& beta) const {
  auto it = terms_.find(beta);
  return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::add_term(const MultiIndex& beta, double c) {
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(beta, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

void Polynomial::add_pos(const Polynomial& factor, const Polynomial& inner) {
  if (factor.has_pos()) throw std::domain_error("product of two pos() terms is not supported");
  if (factor.is_zero()) return;
  if (!inner.has_pos() && inner.total_degree() == 0) {
    // pos of a constant folds into the term map
    double c = std::max(inner.coefficient(MultiIndex(nvars_)), 0.0);
    *this += factor * c;
    return;
  }
  for (auto it = pos_.begin(); it != pos_.end(); ++it) {
    if (*it->inner == inner) {
      Polynomial merged = *it->factor + factor;
      if (merged.is_zero()) {
        pos_.erase(it);
      } else {
        it->factor = std::make_shared<const Polynomial>(std::move(merged));
      }
      return;
    }
  }
  pos_.push_back({std::make_shared<const Polynomial>(factor), std::make_shared<const Polynomial>(inner)});
  std::sort(pos_.begin(), pos_.end(), [](const PosTerm& a, const PosTerm& b) {
    return a.inner->to_string() < b.inner->to_string();
  });
}

void Polynomial::check_same_space(const Polynomial& other) const {
  if (other.nvars_ != nvars_) throw std::invalid_argument("polynomials live in different variable spaces");
}

double Polynomial::evaluate(std::span<const double> x) const {
  if (x.size() != nvars_) throw std::invalid_argument("evaluation point has wrong dimension");
  double sum = 0.0;
  for (const auto& [beta, c] : terms_) {
    double m = c;
    for (std::size_t i = 0; i < nvars_; ++i) {
      for (int k = 0; k < beta[i]; ++k) m *= x[i];
    }
    sum += m;
  }
  for (const auto& t : pos_) {
    double in = t.inner->evaluate(x);
    if (in > 0.0) sum += t.factor->evaluate(x) * in;
  }
  return sum;
}

int Polynomial::total_degree() const {
  int deg = 0;
  for (const auto& [beta, c] : terms_) deg = std::max(deg, beta.order());
  for (const auto& t : pos_) deg = std::max(deg, t.factor->total_degree() + t.inner->total_degree());
  return deg;
}

Polynomial Polynomial::leading_homogeneous_part() const {
  if (has_pos()) throw std::domain_error("leading part undefined for pos() terms; use sampling");
  if (terms_.empty()) return Polynomial(nvars_);
  return homogeneous_part(terms_.begin()->first.order());
}

Polynomial Polynomial::homogeneous_part(int degree) const {
  if (has_pos()) throw std::domain_error("homogeneous part undefined for pos() terms");
  Polynomial out(nvars_);
  for (const auto& [beta, c] : terms_) {
    if (beta.order() == degree) out.terms_.emplace(beta, c);
  }
  return out;
}

Polynomial Polynomial::restricted(const std::vector<bool>& keep) const {
  if (has_pos()) throw std::domain_error("restriction undefined for pos() terms");
  if (keep.size() != nvars_) throw std::invalid_argument("restriction mask has wrong length");
  Polynomial out(nvars_);
  for (const auto& [beta, c] : terms_) {
    bool alive = true;
    for (std::size_t i = 0; i < nvars_ && alive; ++i) alive = keep[i] || beta[i] == 0;
    if (alive) out.terms_.emplace(beta, c);
  }
  return out;
}

Polynomial Polynomial::operator-() const {
  Polynomial out = *this;
  out *= -1.0;
  return out;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  check_same_space(other);
  for (const auto& [beta, c] : other.terms_) add_term(beta, c);
  for (const auto& t : other.pos_) add_pos(*t.factor, *t.inner);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) { return *this += -other; }

Polynomial& Polynomial::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    pos_.clear();
    return *this;
  }
  for (auto& [beta, c] : terms_) c *= s;
  for (auto& t : pos_) t.factor = std::make_shared<const Polynomial>(*t.factor * s);
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  a.check_same_space(b);
  if (a.has_pos() && b.has_pos()) throw std::domain_error("product of two pos() terms is not supported");
  Polynomial out(a.nvars_);
  for (const auto& [ba, ca] : a.terms_) {
    for (const auto& [bb, cb] : b.terms_) out.add_term(ba + bb, ca * cb);
  }
  if (a.has_pos() || b.has_pos()) {
    const Polynomial& with = a.has_pos() ? a : b;
    const Polynomial& without = a.has_pos() ? b : a;
    for (const auto& t : with.pos_) out.add_pos(*t.factor * without, *t.inner);
  }
  return out;
}

Polynomial Polynomial::pow(unsigned k) const {
  if (k == 0) return constant(nvars_, 1.0);
  if (has_pos() && k > 1) throw std::domain_error("powers of pos() terms are not supported");
  Polynomial out = *this;
  for (unsigned i = 1; i < k; ++i) out = out * *this;
  return out;
}

bool Polynomial::operator==(const Polynomial& other) const {
  if (nvars_ != other.nvars_ || terms_ != other.terms_ || pos_.size() != other.pos_.size()) return false;
  for (std::size_t i = 0; i < pos_.size(); ++i) {
    if (!(*pos_[i].factor == *other.pos_[i].factor) || !(*pos_[i].inner == *other.pos_[i].inner)) {
      return false;
    }
  }
  return true;
}

namespace {

std::string monomial_text(const MultiIndex& beta, const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < beta.size(); ++i) {
    if (beta[i] == 0) continue;
    if (!out.empty()) out += "*";
    out += names[i];
    if (beta[i] > 1) out += "^" + std::to_string(beta[i]);
  }
  return out;
}

void append_chunk(std::string& out, const std::string& chunk) {
  if (out.empty()) {
    out = chunk;
  } else if (chunk.front() == '-') {
    out += " - " + chunk.substr(1);
  } else {
    out += " + " + chunk;
  }
}

}  // namespace

std::string Polynomial::to_string(const std::vector<std::string>& names) const {
  if (names.size() != nvars_) throw std::invalid_argument("name list has wrong length");
  std::string out;
  for (const auto& [beta, c] : terms_) {
    std::string mono = monomial_text(beta, names);
    std::string chunk;
    if (mono.empty()) {
      chunk = format_double(c);
    } else if (c == 1.0) {
      chunk = mono;
    } else if (c == -1.0) {
      chunk = "-" + mono;
    } else {
      chunk = format_double(c) + "*" + mono;
    }
    append_chunk(out, chunk);
  }
  for (const auto& t : pos_) {
    std::string body = "pos(" + t.inner->to_string(names) + ")";
    const Polynomial& f = *t.factor;
    std::string chunk;
    if (f.total_degree() == 0) {
      double c = f.coefficient(MultiIndex(nvars_));
      chunk = c == 1.0 ? body : (c == -1.0 ? "-" + body : format_double(c) + "*" + body);
    } else {
      chunk = "(" + f.to_string(names) + ")*" + body;
    }
    append_chunk(out, chunk);
  }
  return out.empty() ? "0" : out;
}

std::string Polynomial::to_string() const {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < nvars_; ++i) names.push_back("x" + std::to_string(i + 1));
  return to_string(names);
}

Polynomial linear_combination(std::span<const double> coeffs, std::span<const Polynomial> polys) {
  if (coeffs.size() != polys.size()) throw std::invalid_argument("coefficient and polynomial counts differ");
  if (polys.empty()) return Polynomial();
  Polynomial out(polys[0].num_vars());
  for (std::size_t k = 0; k < polys.size(); ++k) {
    if (coeffs[k] != 0.0) out += polys[k] * coeffs[k];
    else if (polys[k].num_vars() != out.num_vars()) throw std::invalid_argument("polynomials live in different variable spaces");
  }
  return out;
}

namespace {

class Parser {
 public:
  Parser(const std::string& text, const std::vector<std::string>& vars, const std::map<std::string, double>& params)
      : s_(text), vars_(vars), params_(params) {}

  Polynomial run() {
    Polynomial p = expr();
    skip();
    if (pos_ != s_.size()) throw ParseError(std::string("unexpected character '") + s_[pos_] + "'", pos_);
    return p;
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
  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= s_.size()) throw ParseError(std::string("expected '") + c + "' but input ended", pos_);
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
  }

  template <class F>
  Polynomial guarded(std::size_t at, F&& f) {
    try {
      return f();
    } catch (const std::overflow_error& e) {
      throw ParseError(e.what(), at);
    } catch (const std::domain_error& e) {
      throw ParseError(e.what(), at);
    }
  }

  Polynomial expr() {
    skip();
    bool negate = false;
    if (accept('-')) negate = true;
    else accept('+');
    Polynomial acc = term();
    if (negate) acc = -acc;
    while (true) {
      std::size_t at = pos_;
      if (accept('+')) {
        Polynomial t = term();
        acc = guarded(at, [&] { return acc + t; });
      } else if (accept('-')) {
        Polynomial t = term();
        acc = guarded(at, [&] { return acc - t; });
      } else {
        return acc;
      }
    }
  }

  Polynomial term() {
    Polynomial acc = factor();
    while (true) {
      skip();
      std::size_t at = pos_;
      if (!accept('*')) return acc;
      Polynomial f = factor();
      acc = guarded(at, [&] { return acc * f; });
    }
  }

  Polynomial factor() {
    Polynomial b = base();
    skip();
    std::size_t at = pos_;
    if (!accept('^')) return b;
    skip();
    if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) throw ParseError("negative or signed exponent", pos_);
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) throw ParseError("exponent must be a non-negative integer", pos_);
    if (pos_ < s_.size() && (s_[pos_] == '.' || s_[pos_] == 'e' || s_[pos_] == 'E')) {
      throw ParseError("fractional exponent", start);
    }
    if (pos_ - start > 3) throw ParseError("exponent exceeds cap of 63", start);
    unsigned k = static_cast<unsigned>(std::stoul(s_.substr(start, pos_ - start)));
    if (k > static_cast<unsigned>(kMaxExponent)) throw ParseError("exponent exceeds cap of 63", start);
    return guarded(at, [&] { return b.pow(k); });
  }

  Polynomial base() {
    skip();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of expression", pos_);
    char c = s_[pos_];
    std::size_t n = vars_.size();
    if (c == '(') {
      ++pos_;
      Polynomial e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return Polynomial::constant(n, number());
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      std::string id = s_.substr(start, pos_ - start);
      if (id == "pos") {
        expect('(');
        Polynomial inner = expr();
        expect(')');
        return Polynomial::positive_part(inner);
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (vars_[i] == id) return Polynomial::variable(n, i);
      }
      auto it = params_.find(id);
      if (it != params_.end()) return Polynomial::constant(n, it->second);
      throw ParseError("unknown identifier '" + id + "'", start);
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  double number() {
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
    return v;
  }

  const std::string& s_;
  const std::vector<std::string>& vars_;
  const std::map<std::string, double>& params_;
  std::size_t pos_ = 0;
};

}  // namespace

Polynomial parse_expression(const std::string& text, const std::vector<std::string>& variables,
                            const std::map<std::string, double>& parameters) {
  return Parser(text, variables, parameters).run();
}

}  // namespace bulksurf
