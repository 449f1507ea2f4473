#pragma once

#include <vector>

#include <Eigen/Dense>

#include "htc/basis.hpp"
#include "htc/hamiltonian.hpp"
#include "htc/params.hpp"

namespace htc {

struct ParityLabel {
    int value = 0;        // +1, -1, or 0 for mixed
    double mixing = 0.0;  // (1 - |<v|S|v>|) / 2, zero when value is +-1
    bool mixed() const { return value == 0; }
};

// In the displaced representation S swaps |e nu~ 0_c> and (-1)^nu |g nu 1_c>.
// On a symmetrized basis with N > 1 the swap is applied per permutation sector
// (single-particle <-> dressed-photon states of the same label); states
// without a partner inside the basis are mapped to zero and show up as
// leakage. Components outside the one-excitation manifold are rejected.
Eigen::VectorXd apply_symmetry(const Eigen::VectorXd& v, const Basis& basis, const ModelParams& p);

// Dense matrix of S on the one-excitation part of the basis.
Eigen::MatrixXd symmetry_matrix(const Basis& basis, const ModelParams& p);

ParityLabel parity_of(const Eigen::VectorXd& v, const Basis& basis, const ModelParams& p);

struct CommutatorReport {
    double light_matter = 0.0;  // max |[H_LM, S]| on the interior
    double full = 0.0;          // max |[H, S]| on the interior
    double unitarity_interior = 0.0;
    double unitarity_boundary = 0.0;  // max |S^2 - 1| anywhere, truncation leakage
    int nu_work = 0;
    int interior = 0;
};

// Single-emitter check on an undisplaced Fock working space with
// nu_work = nu_max + 8 levels; residuals are read off the block nu <= interior
// (default nu_max / 2).
CommutatorReport commutator_residual(const ModelParams& p, int interior = -1);

// Orthogonal matrix whose columns are |nu+-> = (|e nu~ 0> +- |g nu 1>)/sqrt(2)
// for an N = 1 basis, together with the parity of each column.
struct DiabaticBasis {
    Eigen::MatrixXd u;
    std::vector<ParityLabel> labels;
    std::vector<int> nu;
    std::vector<int> sign;  // +1 for |nu+>, -1 for |nu->
};
DiabaticBasis diabatic_transform(const Basis& basis, const ModelParams& p);

// Max |<even|H|odd>| over labelled states.
double resonant_block_check(const Eigen::MatrixXd& h, const std::vector<ParityLabel>& labels);

}  // namespace htc
