#include "htc/franck_condon.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace htc {

// D_{mn} = <m|D(alpha)|n> with alpha = -lambda. From D^dagger a D = a + alpha:
//   sqrt(m+1) D_{m+1,n} = sqrt(n) D_{m,n-1} + alpha D_{m,n}
//   D_{0,n} = exp(-alpha^2/2) (-alpha)^n / sqrt(n!)
Eigen::MatrixXd franck_condon_table(int nu_rows, int nu_cols, double lambda)
{
    if (nu_rows < 0 || nu_cols < 0) throw std::invalid_argument("franck_condon_table: negative size");
    const double alpha = -lambda;
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(nu_rows + 1, nu_cols + 1);
    d(0, 0) = std::exp(-0.5 * alpha * alpha);
    for (int n = 1; n <= nu_cols; ++n) d(0, n) = d(0, n - 1) * (-alpha) / std::sqrt(double(n));
    for (int m = 0; m < nu_rows; ++m) {
        const double s = 1.0 / std::sqrt(double(m + 1));
        for (int n = 0; n <= nu_cols; ++n) {
            double v = alpha * d(m, n);
            if (n > 0) v += std::sqrt(double(n)) * d(m, n - 1);
            d(m + 1, n) = s * v;
        }
    }
    return d;
}

double franck_condon(int nu, int nu_tilde, double lambda)
{
    if (nu < 0 || nu_tilde < 0) throw std::invalid_argument("franck_condon: negative quantum number");
    return franck_condon_table(nu, nu_tilde, lambda)(nu, nu_tilde);
}

}  // namespace htc
