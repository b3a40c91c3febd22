#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rydgate/errors.hpp"
#include "rydgate/expression.hpp"

using rydgate::ConfigError;
using rydgate::evaluate_expression;

TEST(Expression, Arithmetic) {
  const std::map<std::string, double> none;
  EXPECT_DOUBLE_EQ(evaluate_expression("1 + 2 * 3", none), 7.0);
  EXPECT_DOUBLE_EQ(evaluate_expression("(1 + 2) * 3", none), 9.0);
  EXPECT_DOUBLE_EQ(evaluate_expression("50/8", none), 6.25);
  EXPECT_DOUBLE_EQ(evaluate_expression("8 - 3 - 2", none), 3.0);
  EXPECT_DOUBLE_EQ(evaluate_expression("2^3^2", none), 512.0);
  EXPECT_DOUBLE_EQ(evaluate_expression("-2^2", none), -4.0);
  EXPECT_DOUBLE_EQ(evaluate_expression("2^-1", none), 0.5);
  EXPECT_DOUBLE_EQ(evaluate_expression("sqrt(2) * sqrt(2)", none), std::sqrt(2.0) * std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(evaluate_expression("2*pi", none), 2.0 * std::numbers::pi);
  EXPECT_DOUBLE_EQ(evaluate_expression("1e-3", none), 1e-3);
}

TEST(Expression, Names) {
  const std::map<std::string, double> names{{"delta", 50.0}, {"eta_delta", 0.02}, {"distance", 0.5}};
  EXPECT_DOUBLE_EQ(evaluate_expression("(1 + eta_delta)*delta", names), 51.0);
  EXPECT_DOUBLE_EQ(evaluate_expression("delta / distance^6", names), 3200.0);
  EXPECT_DOUBLE_EQ(evaluate_expression("-delta", names), -50.0);
}

TEST(Expression, Errors) {
  const std::map<std::string, double> names{{"delta", 50.0}};
  EXPECT_THROW(evaluate_expression("", names), ConfigError);
  EXPECT_THROW(evaluate_expression("1 +", names), ConfigError);
  EXPECT_THROW(evaluate_expression("(1 + 2", names), ConfigError);
  EXPECT_THROW(evaluate_expression("2 3", names), ConfigError);
  EXPECT_THROW(evaluate_expression("sqrt 2", names), ConfigError);
  EXPECT_THROW(evaluate_expression("1 $ 2", names), ConfigError);
  try {
    evaluate_expression("delta/omega", names);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("omega"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("offset 6"), std::string::npos);
  }
}
