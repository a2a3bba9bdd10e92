#include "res112/poly.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "res112/errors.hpp"

namespace res112::poly {

double eval(const coeffs& c, double x)
{
    double r = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + *it;
    return r;
}

coeffs derivative(const coeffs& c)
{
    if (c.size() <= 1) return {0.0};
    coeffs d(c.size() - 1);
    for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = static_cast<double>(k) * c[k];
    return d;
}

double eval_deriv(const coeffs& c, double x, int k)
{
    coeffs d = c;
    for (int i = 0; i < k; ++i) d = derivative(d);
    return eval(d, x);
}

coeffs multiply(const coeffs& a, const coeffs& b)
{
    if (a.empty() || b.empty()) return {};
    coeffs r(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

coeffs add(const coeffs& a, const coeffs& b)
{
    coeffs r(std::max(a.size(), b.size()), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return r;
}

coeffs scale(const coeffs& a, double s)
{
    coeffs r = a;
    for (auto& v : r) v *= s;
    return r;
}

coeffs trimmed(coeffs c)
{
    while (c.size() > 1 && c.back() == 0.0) c.pop_back();
    return c;
}

double magnitude(const coeffs& c, double x)
{
    double r = 0.0, p = 1.0, ax = std::abs(x);
    for (double v : c) {
        r += std::abs(v) * p;
        p *= ax;
    }
    return r;
}

std::vector<std::complex<double>> roots(const coeffs& c_in)
{
    const coeffs c = trimmed(c_in);
    const int n = static_cast<int>(c.size()) - 1;
    if (n <= 0) return {};
    if (n == 1) return {std::complex<double>(-c[0] / c[1], 0.0)};

    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -c[i] / c[n];

    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    if (es.info() != Eigen::Success) throw numerical_error("companion eigenvalue solver did not converge");
    std::vector<std::complex<double>> out(n);
    for (int i = 0; i < n; ++i) out[i] = es.eigenvalues()[i];
    return out;
}

std::vector<double> real_roots(const coeffs& c_in, double imag_tol)
{
    const coeffs c = trimmed(c_in);
    const coeffs d = derivative(c);
    std::vector<double> out;
    for (auto z : roots(c)) {
        if (std::abs(z.imag()) > imag_tol * std::max(1.0, std::abs(z))) continue;
        double x = z.real();
        // a couple of Newton steps, only kept while the residual shrinks
        double fx = eval(c, x);
        for (int it = 0; it < 4; ++it) {
            double dx = eval(d, x);
            if (dx == 0.0) break;
            double xn = x - fx / dx;
            double fn = eval(c, xn);
            if (!(std::abs(fn) < std::abs(fx))) break;
            x = xn;
            fx = fn;
        }
        out.push_back(x);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace res112::poly
