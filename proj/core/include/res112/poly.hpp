#pragma once

#include <complex>
#include <vector>

// Dense real polynomials, coefficients stored lowest degree first.
namespace res112::poly {

using coeffs = std::vector<double>;

double eval(const coeffs& c, double x);
// k-th derivative at x
double eval_deriv(const coeffs& c, double x, int k);
coeffs derivative(const coeffs& c);
coeffs multiply(const coeffs& a, const coeffs& b);
coeffs add(const coeffs& a, const coeffs& b);
coeffs scale(const coeffs& a, double s);
// drops exactly-zero leading coefficients
coeffs trimmed(coeffs c);
// sum_k |c_k| |x|^k, used as a rounding scale for residuals
double magnitude(const coeffs& c, double x);

// All complex roots via companion-matrix eigenvalues.
// Throws numerical_error if the eigen solver does not converge.
std::vector<std::complex<double>> roots(const coeffs& c);

// Real roots (|Im| <= imag_tol * max(1,|z|)), Newton polished, ascending.
std::vector<double> real_roots(const coeffs& c, double imag_tol = 1e-9);

}  // namespace res112::poly
