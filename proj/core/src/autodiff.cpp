#include "dhp/autodiff.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "dhp/numeric.hpp"

namespace dhp::ad {

void Tape::check_owned(const Var& v) const {
  if (v.tape_ != this || v.index_ >= nodes_.size())
    throw std::invalid_argument("autodiff: variable does not belong to this tape");
}

Var Tape::push(Node node, double value) {
  const auto index = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back(node);
  return Var(this, index, value);
}

Var Tape::variable(double value) {
  Var v = push(Node{{kNoParent, kNoParent}, {0.0, 0.0}, Op::Leaf}, value);
  leaves_.push_back(v.index_);
  return v;
}

Var Tape::unary(Op op, const Var& x, double value, double partial) {
  check_owned(x);
  return push(Node{{x.index_, kNoParent}, {partial, 0.0}, op}, value);
}

Var Tape::binary(Op op, const Var& x, const Var& y, double value, double dx, double dy) {
  check_owned(x);
  check_owned(y);
  return push(Node{{x.index_, y.index_}, {dx, dy}, op}, value);
}

void Tape::clear() {
  nodes_.clear();
  leaves_.clear();
}

std::vector<double> Tape::backward(const Var& output) const {
  const Seed seed{output, 1.0};
  return backward(std::span<const Seed>(&seed, 1));
}

std::vector<double> Tape::backward(std::span<const Seed> seeds) const {
  std::vector<double> grad(leaves_.size(), 0.0);
  std::vector<double> adjoint;
  accumulate(seeds, grad, adjoint);
  return grad;
}

void Tape::accumulate(std::span<const Seed> seeds, std::span<double> leaf_grad,
                      std::vector<double>& adjoint) const {
  if (leaf_grad.size() != leaves_.size())
    throw std::invalid_argument("autodiff: gradient buffer size does not match leaf count");
  adjoint.assign(nodes_.size(), 0.0);
  std::uint32_t top = 0;
  for (const auto& s : seeds) {
    check_owned(s.var);
    adjoint[s.var.index_] += s.weight;
    top = std::max(top, s.var.index_ + 1);
  }
  for (std::uint32_t k = top; k-- > 0;) {
    const double a = adjoint[k];
    if (a == 0.0) continue;
    const Node& n = nodes_[k];
    if (n.parent[0] != kNoParent) adjoint[n.parent[0]] += a * n.partial[0];
    if (n.parent[1] != kNoParent) adjoint[n.parent[1]] += a * n.partial[1];
  }
  for (std::size_t i = 0; i < leaves_.size(); ++i) leaf_grad[i] += adjoint[leaves_[i]];
}

namespace {

Tape& tape_of(const Var& x) { return *const_cast<Tape*>(x.tape()); }

}  // namespace

Var operator+(const Var& x, const Var& y) {
  return tape_of(x).binary(Op::Add, x, y, x.value() + y.value(), 1.0, 1.0);
}
Var operator-(const Var& x, const Var& y) {
  return tape_of(x).binary(Op::Sub, x, y, x.value() - y.value(), 1.0, -1.0);
}
Var operator*(const Var& x, const Var& y) {
  return tape_of(x).binary(Op::Mul, x, y, x.value() * y.value(), y.value(), x.value());
}
Var operator/(const Var& x, const Var& y) {
  if (y.value() == 0.0) throw DomainError("autodiff: division by zero");
  const double q = x.value() / y.value();
  return tape_of(x).binary(Op::Div, x, y, q, 1.0 / y.value(), -q / y.value());
}
Var operator-(const Var& x) { return tape_of(x).unary(Op::Neg, x, -x.value(), -1.0); }

Var operator+(const Var& x, double c) { return tape_of(x).unary(Op::Shift, x, x.value() + c, 1.0); }
Var operator+(double c, const Var& x) { return x + c; }
Var operator-(const Var& x, double c) { return tape_of(x).unary(Op::Shift, x, x.value() - c, 1.0); }
Var operator-(double c, const Var& x) { return tape_of(x).unary(Op::Shift, x, c - x.value(), -1.0); }
Var operator*(const Var& x, double c) { return tape_of(x).unary(Op::Scale, x, x.value() * c, c); }
Var operator*(double c, const Var& x) { return x * c; }
Var operator/(const Var& x, double c) {
  if (c == 0.0) throw DomainError("autodiff: division by zero");
  return tape_of(x).unary(Op::Scale, x, x.value() / c, 1.0 / c);
}
Var operator/(double c, const Var& x) {
  if (x.value() == 0.0) throw DomainError("autodiff: division by zero");
  const double q = c / x.value();
  return tape_of(x).unary(Op::Div, x, q, -q / x.value());
}

Var exp(const Var& x) {
  const double e = std::exp(x.value());
  return tape_of(x).unary(Op::Exp, x, e, e);
}

Var log(const Var& x) {
  if (!(x.value() > 0.0))
    throw DomainError("autodiff: log of non-positive value " + std::to_string(x.value()));
  return tape_of(x).unary(Op::Log, x, std::log(x.value()), 1.0 / x.value());
}

Var tanh(const Var& x) {
  const double t = std::tanh(x.value());
  return tape_of(x).unary(Op::Tanh, x, t, 1.0 - t * t);
}

Var softplus(const Var& x) {
  return tape_of(x).unary(Op::Softplus, x, dhp::softplus(x.value()), dhp::sigmoid(x.value()));
}

Var sigmoid(const Var& x) {
  const double s = dhp::sigmoid(x.value());
  return tape_of(x).unary(Op::Sigmoid, x, s, s * (1.0 - s));
}

Var pow(const Var& x, double c) {
  const double v = x.value();
  const bool integral_exponent = c >= 0.0 && std::floor(c) == c;
  if (v <= 0.0 && !integral_exponent)
    throw DomainError("autodiff: pow of non-positive base with non-integer exponent");
  const double value = std::pow(v, c);
  const double partial = c == 0.0 ? 0.0 : c * std::pow(v, c - 1.0);
  return tape_of(x).unary(Op::Pow, x, value, partial);
}

Var expm1(const Var& x) {
  return tape_of(x).unary(Op::Expm1, x, std::expm1(x.value()), std::exp(x.value()));
}

Var log1p(const Var& x) {
  if (!(x.value() > -1.0)) throw DomainError("autodiff: log1p argument must exceed -1");
  return tape_of(x).unary(Op::Log1p, x, std::log1p(x.value()), 1.0 / (1.0 + x.value()));
}

Var normal_cdf(const Var& x) {
  const double v = x.value();
  const double cdf = 0.5 * std::erfc(-v / std::numbers::sqrt2);
  const double pdf = std::exp(-0.5 * v * v) / std::sqrt(2.0 * std::numbers::pi);
  return tape_of(x).unary(Op::NormalCdf, x, cdf, pdf);
}

}  // namespace dhp::ad
