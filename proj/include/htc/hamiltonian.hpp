#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "htc/basis.hpp"
#include "htc/params.hpp"

namespace htc {

// omega_c(k) = omega_c(0) sqrt(1 + (c_d k)^2), omega_c(0) = omega_00 - detuning.
double cavity_frequency(double k_par, const ModelParams& p);

// Matrix element of the light-matter term between two symmetrized states.
// Only photon <-> material pairs are nonzero; the vibronic part of the
// Hamiltonian is diagonal in the displaced representation.
std::complex<double> coupling_element(const BasisState& bra, const BasisState& ket, const ModelParams& p);

// All couplings are real in both bases, so the Hermitian matrix is stored as a
// real symmetric one. Per-basis-state data needed for observables rides along.
struct HermitianMatrix {
    Eigen::MatrixXd data;
    Eigen::VectorXd photon;       // 1 for states carrying a cavity photon
    Eigen::VectorXi excitations;  // photon + electronic excitation
    Eigen::VectorXi sector;       // permutation label of the state, -1 if none
    Eigen::VectorXd a_ground;     // <G| a |s>
    Eigen::VectorXd mu_ground;    // <G| mu+ |s>, mu+ = sum_n sigma_n^-
    double k_par = 0.0;

    Eigen::Index dimension() const { return data.rows(); }
    double hermiticity_residual() const;
};

// Light-matter term alone (no diagonal), same layout as assemble_htc.
HermitianMatrix assemble_light_matter(const Basis& basis, const ModelParams& p);

// Full Hamiltonian in the frame rotating at omega_c(k_par).
HermitianMatrix assemble_htc(const Basis& basis, const ModelParams& p, double k_par = 0.0);

struct DegeneracyGroup {
    double value = 0.0;
    std::vector<int> members;
};

struct EigenSystem {
    Eigen::VectorXd values;  // ascending
    Eigen::MatrixXd vectors; // columns in basis order
    Eigen::VectorXd photon_weight;
    Eigen::VectorXd a_ground;
    Eigen::VectorXd mu_ground;
    Eigen::VectorXi excitations;
    Eigen::VectorXi block;
    Eigen::VectorXi sector;       // label of the supporting symmetrized sector, -1 if mixed/none
    Eigen::VectorXi group;        // index into groups
    std::vector<DegeneracyGroup> groups;

    Eigen::Index size() const { return values.size(); }
    int degeneracy(Eigen::Index j) const { return int(groups[group(j)].members.size()); }
};

// Dense diagonalization block by block (connected components of the coupling
// graph). Throws std::runtime_error on solver failure.
EigenSystem diagonalize(const HermitianMatrix& h, double tol = tol_deg);

// Connected components of the nonzero pattern, each sorted.
std::vector<std::vector<int>> coupling_blocks(const Eigen::MatrixXd& m);

}  // namespace htc
