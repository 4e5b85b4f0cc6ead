#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>

namespace afmass::geometry {

/// Value and first two derivatives of a radial function at one point.
struct Jet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

namespace detail {
struct Node;
}

/// A function of the coordinate radius r parsed from text, with exact symbolic
/// first and second derivatives.
///
/// Grammar: numbers, the identifier `r`, named parameters (bound at parse time),
/// the constant `pi`, binary + - * / ^ (^ is right associative and binds tighter
/// than unary minus), unary -, the functions sqrt, exp, log and parentheses.
class RadialExpression {
 public:
  using Parameters = std::map<std::string, double, std::less<>>;

  /// Throws ParseError with the 0-based offending position.
  static RadialExpression parse(std::string_view source, const Parameters& parameters = {});

  double value(double r) const;
  double derivative(double r) const;
  double second_derivative(double r) const;
  /// Throws EvaluationError carrying r when any of the three leaves its domain.
  Jet jet(double r) const;

  const std::string& source() const noexcept { return source_; }
  /// Printable forms of the simplified trees (value, d/dr, d^2/dr^2).
  std::string to_string() const;
  std::string derivative_to_string() const;
  std::string second_derivative_to_string() const;

 private:
  RadialExpression() = default;
  std::string source_;
  std::shared_ptr<const detail::Node> value_;
  std::shared_ptr<const detail::Node> d1_;
  std::shared_ptr<const detail::Node> d2_;
};

inline RadialExpression parse_radial_expression(std::string_view source,
                                                const RadialExpression::Parameters& parameters = {}) {
  return RadialExpression::parse(source, parameters);
}

}  // namespace afmass::geometry
