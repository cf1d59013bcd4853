#pragma once

// Scalar reverse-mode differentiation.
//
// A Tape records every operation as a node holding at most two parent
// indices and the local partial derivatives with respect to them. Parents
// always precede children, so a single reverse sweep over the node list
// propagates adjoints. Leaves are created with Tape::variable and gradients are
// reported in leaf registration order.
//
//   ad::Tape tape;
//   auto x = tape.variable(3.0);
//   auto y = x * x;
//   auto g = tape.backward(y);   // g[0] == 6

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace dhp::ad {

class Tape;

/// Raised when an operation leaves its mathematical domain (log of a
/// non-positive value and similar).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class Var {
 public:
  Var() = default;

  double value() const { return value_; }
  std::uint32_t index() const { return index_; }
  const Tape* tape() const { return tape_; }

 private:
  friend class Tape;
  Var(Tape* tape, std::uint32_t index, double value) : tape_(tape), index_(index), value_(value) {}

  Tape* tape_ = nullptr;
  std::uint32_t index_ = 0;
  double value_ = 0.0;
};

enum class Op : std::uint8_t {
  Leaf,
  Add,
  Sub,
  Mul,
  Div,
  Neg,
  Scale,
  Shift,
  Exp,
  Log,
  Tanh,
  Softplus,
  Sigmoid,
  Pow,
  Expm1,
  Log1p,
  NormalCdf,
};

class Tape {
 public:
  static constexpr std::uint32_t kNoParent = 0xffffffffu;

  struct Seed {
    Var var;
    double weight = 1.0;
  };

  /// Registers a new leaf.
  Var variable(double value);

  /// Records a node with one parent.
  Var unary(Op op, const Var& x, double value, double partial);
  /// Records a node with two parents on this tape.
  Var binary(Op op, const Var& x, const Var& y, double value, double dx, double dy);

  std::size_t size() const { return nodes_.size(); }
  std::size_t num_leaves() const { return leaves_.size(); }
  Op op(std::uint32_t node) const { return nodes_.at(node).op; }

  /// Drops all nodes and leaves; capacity is retained for reuse.
  void clear();

  /// ∂output/∂leaf for every leaf, in registration order.
  std::vector<double> backward(const Var& output) const;

  /// Gradient of Σ weight·var over all leaves, computed in one sweep.
  std::vector<double> backward(std::span<const Seed> seeds) const;

  /// Same as backward(seeds) but adds into `leaf_grad` and reuses `adjoint`
  /// as scratch storage.
  void accumulate(std::span<const Seed> seeds, std::span<double> leaf_grad,
                  std::vector<double>& adjoint) const;

 private:
  struct Node {
    std::uint32_t parent[2];
    double partial[2];
    Op op;
  };

  void check_owned(const Var& v) const;
  Var push(Node node, double value);

  std::vector<Node> nodes_;
  std::vector<std::uint32_t> leaves_;
};

Var operator+(const Var& x, const Var& y);
Var operator-(const Var& x, const Var& y);
Var operator*(const Var& x, const Var& y);
Var operator/(const Var& x, const Var& y);
Var operator-(const Var& x);

Var operator+(const Var& x, double c);
Var operator+(double c, const Var& x);
Var operator-(const Var& x, double c);
Var operator-(double c, const Var& x);
Var operator*(const Var& x, double c);
Var operator*(double c, const Var& x);
Var operator/(const Var& x, double c);
Var operator/(double c, const Var& x);

Var exp(const Var& x);
Var log(const Var& x);
Var tanh(const Var& x);
/// Stable softplus: x above 30, e^x below -30.
Var softplus(const Var& x);
Var sigmoid(const Var& x);
/// x^c for constant c; x must be positive unless c is a non-negative integer.
Var pow(const Var& x, double c);
Var expm1(const Var& x);
Var log1p(const Var& x);
/// Standard normal CDF Φ(x).
Var normal_cdf(const Var& x);

}  // namespace dhp::ad
