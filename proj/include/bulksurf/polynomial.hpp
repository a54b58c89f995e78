#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bulksurf {

inline constexpr int kMaxExponent = 63;

class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t nvars) : exps_(nvars, 0) {}
  explicit MultiIndex(std::vector<int> exps);

  std::size_t size() const { return exps_.size(); }
  int operator[](std::size_t i) const { return exps_[i]; }
  int order() const;
  const std::vector<int>& exponents() const { return exps_; }

  // Adds exponentwise; throws std::overflow_error above kMaxExponent.
  MultiIndex operator+(const MultiIndex& other) const;
  bool operator==(const MultiIndex& other) const = default;

 private:
  std::vector<int> exps_;
};

// Higher total degree first, ties broken lexicographically (larger first).
struct GradedLexGreater {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const;
};

class Polynomial;

// factor(x) * max(inner(x), 0); factor is pos-free.
struct PosTerm {
  std::shared_ptr<const Polynomial> factor;
  std::shared_ptr<const Polynomial> inner;
};

class Polynomial {
 public:
  using TermMap = std::map<MultiIndex, double, GradedLexGreater>;

  Polynomial() = default;
  explicit Polynomial(std::size_t nvars) : nvars_(nvars) {}

  static Polynomial constant(std::size_t nvars, double c);
  static Polynomial variable(std::size_t nvars, std::size_t i);
  static Polynomial monomial(const MultiIndex& beta, double c);
  static Polynomial positive_part(const Polynomial& inner);

  std::size_t num_vars() const { return nvars_; }
  const TermMap& terms() const { return terms_; }
  const std::vector<PosTerm>& pos_terms() const { return pos_; }
  bool has_pos() const;
  bool is_zero() const { return terms_.empty() && pos_.empty(); }
  double coefficient(const MultiIndex& beta) const;

  double evaluate(std::span<const double> x) const;
  int total_degree() const;
  Polynomial leading_homogeneous_part() const;
  // Terms of exactly the given total degree (pos-free only).
  Polynomial homogeneous_part(int degree) const;
  // Sets every variable with keep[i] == false to zero (pos-free only).
  Polynomial restricted(const std::vector<bool>& keep) const;

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(double s);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  Polynomial pow(unsigned k) const;

  bool operator==(const Polynomial& other) const;

  std::string to_string(const std::vector<std::string>& names) const;
  std::string to_string() const;

 private:
  void add_term(const MultiIndex& beta, double c);
  void add_pos(const Polynomial& factor, const Polynomial& inner);
  void check_same_space(const Polynomial& other) const;

  std::size_t nvars_ = 0;
  TermMap terms_;
  std::vector<PosTerm> pos_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t offset)
      : std::runtime_error(msg + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

Polynomial parse_expression(const std::string& text, const std::vector<std::string>& variables,
                            const std::map<std::string, double>& parameters = {});

Polynomial linear_combination(std::span<const double> coeffs, std::span<const Polynomial> polys);

}  // namespace bulksurf
