#pragma once

#include <Eigen/Dense>

namespace htc {

// Overlap <nu|nu~> between a ground-potential level and a level of the excited
// potential displaced by +lambda, with |nu~> = D^dagger(lambda)|nu>.
// <0|nu~> = exp(-lambda^2/2) lambda^nu~ / sqrt(nu~!) is positive.
double franck_condon(int nu, int nu_tilde, double lambda);

// Table F(nu, nu~) for 0 <= nu <= nu_rows, 0 <= nu~ <= nu_cols, filled by the
// three-term recursion of the displacement operator (no factorials).
Eigen::MatrixXd franck_condon_table(int nu_rows, int nu_cols, double lambda);

}  // namespace htc
