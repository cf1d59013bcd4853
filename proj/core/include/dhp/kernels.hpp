#pragma once

// Triggering kernels g(x) with closed-form antiderivatives G(x):
//
//   EXP  g = α e^{-βx}                 G = -(α/β) e^{-βx}
//   PWL  g = αβ / (α + βx)^{p+1}       G = -α / (p (α + βx)^p)
//   RAY  g = α x e^{-βx²}              G = -(α/2β) e^{-βx²}
//
// Parameter gradients are analytic so callers never need to tape them.

#include <string>
#include <string_view>

namespace dhp {

enum class KernelFamily { Exponential, PowerLaw, Rayleigh };

std::string_view to_string(KernelFamily family);
KernelFamily parse_kernel_family(std::string_view name);

struct KernelSpec {
  KernelFamily family = KernelFamily::PowerLaw;
  double power = 2.0;  // PWL exponent p, must exceed 1

  void validate() const;
};

struct KernelParams {
  double alpha = 0.0;
  double beta = 1.0;
};

double kernel_value(const KernelSpec& spec, KernelParams params, double delta);

/// G(b) - G(a) for 0 <= a <= b; b may be +infinity.
double kernel_integral(const KernelSpec& spec, KernelParams params, double a, double b);

/// Total mass ∫_0^∞ g.
double kernel_mass(const KernelSpec& spec, KernelParams params);

/// sup of g over [a, b], b may be +infinity.
double kernel_max(const KernelSpec& spec, KernelParams params, double a, double b);

struct KernelValueGrad {
  double value = 0.0;
  double d_alpha = 0.0;
  double d_beta = 0.0;
  double d_delta = 0.0;
};

KernelValueGrad kernel_value_grad(const KernelSpec& spec, KernelParams params, double delta);

struct KernelIntegralGrad {
  double value = 0.0;
  double d_alpha = 0.0;
  double d_beta = 0.0;
  double d_lower = 0.0;
  double d_upper = 0.0;
};

KernelIntegralGrad kernel_integral_grad(const KernelSpec& spec, KernelParams params, double a,
                                        double b);

}  // namespace dhp
