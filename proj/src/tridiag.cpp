#include "bcfkit/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bcfkit/error.hpp"

namespace bcfkit::tridiag {

std::vector<double> eigenvalues(std::vector<double> d, std::vector<double> offdiag) {
    const int n = static_cast<int>(d.size());
    if (n == 0) return {};
    if (static_cast<int>(offdiag.size()) != n - 1)
        throw ValidationError("tridiag: off-diagonal must have size n-1");
    std::vector<double> e(n, 0.0);
    std::copy(offdiag.begin(), offdiag.end(), e.begin());
    const int cap = 30 * n;

    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            // Look for a small off-diagonal element to split the matrix.
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
            }
            if (m != l) {
                if (++iter > cap) throw NoConvergence("tridiag: QL iteration cap exceeded", std::abs(e[l]));
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                int i;
                for (i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                }
                if (r == 0.0 && i >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
    std::sort(d.begin(), d.end());
    return d;
}

} // namespace bcfkit::tridiag
