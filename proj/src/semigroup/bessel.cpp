#include <cmath>
#include <functional>

#include "kappa/errors.hpp"
#include "kappa/semigroup.hpp"

namespace kappa {

double bessel_j(int n, double x) {
  if (n < 0) return (n % 2 ? -1.0 : 1.0) * bessel_j(-n, x);
  if (std::abs(x) > 25.0) throw InvalidParameter("bessel_j series is limited to |x| <= 25");
  const double h = 0.5 * x;
  double term = 1.0;
  for (int k = 1; k <= n; ++k) term *= h / k;
  double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= -h * h / (static_cast<double>(k) * static_cast<double>(k + n));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

double bessel_j_prime(int n, double x) { return 0.5 * (bessel_j(n - 1, x) - bessel_j(n + 1, x)); }

namespace {

double kth_root(const std::function<double(double)>& f, int k, double start) {
  if (k < 1) throw InvalidParameter("root index starts at 1");
  const double step = 0.01;
  double a = start, fa = f(a);
  int found = 0;
  while (a < 25.0) {
    const double b = a + step, fb = f(b);
    if (fa == 0.0 || fa * fb < 0.0) {
      if (++found == k) {
        double lo = a, hi = b, flo = fa;
        if (fa == 0.0) return a;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
          const double mid = 0.5 * (lo + hi), fm = f(mid);
          if (flo * fm <= 0.0) {
            hi = mid;
          } else {
            lo = mid;
            flo = fm;
          }
        }
        return 0.5 * (lo + hi);
      }
    }
    a = b;
    fa = fb;
  }
  throw SolverError("Bessel root not bracketed below 25");
}

}  // namespace

double bessel_j_prime_zero(int n, int k) {
  return kth_root([n](double x) { return bessel_j_prime(n, x); }, k, 1e-3);
}

double bessel_j_zero(int n, int k) {
  return kth_root([n](double x) { return bessel_j(n, x); }, k, 1e-3);
}

}  // namespace kappa
