#pragma once

namespace chmm {

double normal_pdf(double x);
double normal_logpdf(double x);

/// Standard normal cdf, evaluated through erfc so the lower tail keeps full
/// relative accuracy down to ~1e-308.
double normal_cdf(double x);

/// Standard normal quantile. Wichura's algorithm AS 241 (PPND16), a piecewise
/// rational approximation with ~1e-16 relative error over (0,1).
double normal_quantile(double p);

/// Regularized incomplete beta I_x(a,b) via the Lentz continued fraction.
double incomplete_beta(double a, double b, double x);

double student_t_logpdf(double x, double nu);
double student_t_cdf(double x, double nu);
double student_t_quantile(double p, double nu);

}  // namespace chmm
