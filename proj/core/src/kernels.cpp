#include "dhp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dhp {

namespace {

void check_params(KernelParams p) {
  if (!(p.alpha >= 0.0) || !std::isfinite(p.alpha)) throw std::invalid_argument("kernel: alpha must be >= 0");
  if (!(p.beta > 0.0) || !std::isfinite(p.beta)) throw std::invalid_argument("kernel: beta must be > 0");
}

// Parameter derivatives of G at a finite point x.
struct AntiderivativeGrad {
  double d_alpha;
  double d_beta;
};

AntiderivativeGrad antiderivative_grad(const KernelSpec& spec, KernelParams prm, double x) {
  const double a = prm.alpha;
  const double b = prm.beta;
  if (std::isinf(x)) return {0.0, 0.0};
  switch (spec.family) {
    case KernelFamily::Exponential: {
      const double e = std::exp(-b * x);
      return {-e / b, a * e / (b * b) + a * x * e / b};
    }
    case KernelFamily::PowerLaw: {
      const double p = spec.power;
      const double u = a + b * x;
      if (u <= 0.0) return {0.0, 0.0};
      const double up = std::pow(u, -p);
      const double up1 = up / u;
      return {-up / p + a * up1, a * x * up1};
    }
    case KernelFamily::Rayleigh: {
      const double e = std::exp(-b * x * x);
      return {-e / (2.0 * b), a * e / (2.0 * b * b) + a * x * x * e / (2.0 * b)};
    }
  }
  return {0.0, 0.0};
}

}  // namespace

std::string_view to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::Exponential: return "exp";
    case KernelFamily::PowerLaw: return "pwl";
    case KernelFamily::Rayleigh: return "ray";
  }
  return "?";
}

KernelFamily parse_kernel_family(std::string_view name) {
  if (name == "exp" || name == "EXP") return KernelFamily::Exponential;
  if (name == "pwl" || name == "PWL") return KernelFamily::PowerLaw;
  if (name == "ray" || name == "RAY") return KernelFamily::Rayleigh;
  throw std::invalid_argument("unknown kernel family '" + std::string(name) + "' (expected exp, pwl or ray)");
}

void KernelSpec::validate() const {
  if (family == KernelFamily::PowerLaw && !(power > 1.0))
    throw std::invalid_argument("power-law exponent must exceed 1");
}

double kernel_value(const KernelSpec& spec, KernelParams p, double delta) {
  return kernel_value_grad(spec, p, delta).value;
}

KernelValueGrad kernel_value_grad(const KernelSpec& spec, KernelParams prm, double x) {
  check_params(prm);
  if (!(x >= 0.0)) throw std::invalid_argument("kernel: delta must be >= 0");
  const double a = prm.alpha;
  const double b = prm.beta;
  KernelValueGrad out;
  switch (spec.family) {
    case KernelFamily::Exponential: {
      const double e = std::exp(-b * x);
      out.value = a * e;
      out.d_alpha = e;
      out.d_beta = -x * a * e;
      out.d_delta = -b * a * e;
      break;
    }
    case KernelFamily::PowerLaw: {
      if (a == 0.0) break;  // degenerate: g ≡ 0
      const double p = spec.power;
      const double u = a + b * x;
      const double u1 = std::pow(u, -(p + 1.0));
      const double u2 = u1 / u;
      out.value = a * b * u1;
      out.d_alpha = b * u1 - (p + 1.0) * a * b * u2;
      out.d_beta = a * u1 - (p + 1.0) * a * b * x * u2;
      out.d_delta = -(p + 1.0) * a * b * b * u2;
      break;
    }
    case KernelFamily::Rayleigh: {
      const double e = std::exp(-b * x * x);
      out.value = a * x * e;
      out.d_alpha = x * e;
      out.d_beta = -x * x * out.value;
      out.d_delta = a * e * (1.0 - 2.0 * b * x * x);
      break;
    }
  }
  return out;
}

double kernel_integral(const KernelSpec& spec, KernelParams prm, double lo, double hi) {
  check_params(prm);
  if (!(lo >= 0.0)) throw std::invalid_argument("kernel_integral: lower limit must be >= 0");
  if (!(lo <= hi)) throw std::invalid_argument("kernel_integral: requires a <= b");
  const double a = prm.alpha;
  const double b = prm.beta;
  if (a == 0.0 || lo == hi) return 0.0;
  const bool to_inf = std::isinf(hi);
  switch (spec.family) {
    case KernelFamily::Exponential: {
      const double head = (a / b) * std::exp(-b * lo);
      return to_inf ? head : head * -std::expm1(-b * (hi - lo));
    }
    case KernelFamily::PowerLaw: {
      const double p = spec.power;
      const double head = (a / p) * std::pow(a + b * lo, -p);
      if (to_inf) return head;
      // 1 - ((α+βa)/(α+βb))^p written to survive b ≈ a.
      const double r = -b * (hi - lo) / (a + b * hi);
      return head * -std::expm1(p * std::log1p(r));
    }
    case KernelFamily::Rayleigh: {
      const double head = (a / (2.0 * b)) * std::exp(-b * lo * lo);
      return to_inf ? head : head * -std::expm1(-b * (hi - lo) * (hi + lo));
    }
  }
  return 0.0;
}

KernelIntegralGrad kernel_integral_grad(const KernelSpec& spec, KernelParams prm, double lo,
                                        double hi) {
  KernelIntegralGrad out;
  out.value = kernel_integral(spec, prm, lo, hi);
  const auto ga = antiderivative_grad(spec, prm, lo);
  const auto gb = antiderivative_grad(spec, prm, hi);
  out.d_alpha = gb.d_alpha - ga.d_alpha;
  out.d_beta = gb.d_beta - ga.d_beta;
  if (prm.alpha == 0.0 && spec.family == KernelFamily::PowerLaw) return {};
  out.d_lower = -kernel_value(spec, prm, lo);
  out.d_upper = std::isinf(hi) ? 0.0 : kernel_value(spec, prm, hi);
  return out;
}

double kernel_mass(const KernelSpec& spec, KernelParams p) {
  return kernel_integral(spec, p, 0.0, std::numeric_limits<double>::infinity());
}

double kernel_max(const KernelSpec& spec, KernelParams p, double lo, double hi) {
  check_params(p);
  if (spec.family != KernelFamily::Rayleigh) return kernel_value(spec, p, lo);
  const double peak = 1.0 / std::sqrt(2.0 * p.beta);
  if (lo <= peak && peak <= hi) return kernel_value(spec, p, peak);
  const double at_hi = std::isinf(hi) ? 0.0 : kernel_value(spec, p, hi);
  return std::max(kernel_value(spec, p, lo), at_hi);
}

}  // namespace dhp
