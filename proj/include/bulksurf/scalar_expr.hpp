#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace bulksurf {

// Real-valued expression in named inputs, used for initial data and forcing.
// Grammar: + - * / ^ with real exponents, parentheses, unary minus, numbers,
// identifiers, and calls cos sin exp log sqrt abs tanh pos.
class ScalarExpr {
 public:
  ScalarExpr() = default;
  ScalarExpr(const std::string& text, const std::vector<std::string>& inputs,
             const std::map<std::string, double>& parameters = {});

  double operator()(const std::vector<double>& args) const;
  const std::string& text() const { return text_; }

 private:
  std::string text_;
  std::size_t ninputs_ = 0;
  std::function<double(const double*)> fn_;
};

}  // namespace bulksurf
