#pragma once

namespace semipos {

/// ln Γ(x) for x > 0.
double log_gamma(double x);

/// ln B(a, b) for a, b > 0.
double log_beta(double a, double b);

/// ln of the generalized binomial coefficient Γ(n+1)/(Γ(j+1)Γ(n−j+1)).
double log_binomial(double n, double j);

/// ln(e^a + e^b) without overflow; accepts -inf.
double log_add(double a, double b);

}  // namespace semipos
