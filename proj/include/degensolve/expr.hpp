#pragma once

#include <memory>
#include <string>

#include <Eigen/Core>

namespace degensolve {

/// Compiled arithmetic expression over the coordinates x1..x3. Supports
/// + - * / ^, parentheses, unary minus, sin cos exp sqrt abs log, and pi.
class Expression {
  public:
    static Expression parse(const std::string& text);

    double operator()(const Eigen::VectorXd& x) const;
    const std::string& text() const { return text_; }

    struct Node;

  private:
    std::shared_ptr<const Node> root_;
    std::string text_;
};

}  // namespace degensolve
