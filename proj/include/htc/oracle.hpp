#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "htc/basis.hpp"
#include "htc/params.hpp"
#include "htc/spectra.hpp"

namespace htc {

using SparseOp = Eigen::SparseMatrix<std::complex<double>>;

struct Jump {
    std::string name;
    SparseOp op;
    double rate = 0.0;
};

// Master equation on the site-resolved space in the frame rotating at omega_c.
struct LindbladSpec {
    Basis basis{BasisKind::site_resolved, {}};
    Eigen::MatrixXcd H;
    std::vector<Jump> jumps;
    SparseOp a;
    SparseOp mu_minus;  // sum_n sigma_n^-
    Eigen::VectorXd excitations;
    double omega_p = 0.0;  // nonzero frame shift once a drive is attached
    double drive_amplitude = 0.0;

    Eigen::Index dimension() const { return H.rows(); }
};

enum class DipoleDissipator { local, collective };

// Full basis and cavity jump sqrt(kappa) a. The dipole channel is one
// sqrt(gamma_e) sigma_n^- per site (local) or a single sqrt(gamma_e) mu^-
// (collective, the form behind the closed-form widths).
LindbladSpec make_lindblad_spec(const ModelParams& p, double k_par = 0.0,
                                DipoleDissipator dipole = DipoleDissipator::local, std::size_t max_dimension = 4096);

// Adds Omega_p (a + a^dagger) and moves to the frame rotating at omega_p
// (measured from omega_c), where the drive is time independent.
LindbladSpec with_drive(const LindbladSpec& spec, double omega_p, double amplitude);

struct PropagateOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    bool store_states = false;
    bool check_invariants = true;
    double trace_tol = 1e-9;
    double positivity_tol = 1e-8;
};

struct Trajectory {
    std::vector<double> t;
    std::vector<double> trace;
    std::vector<double> photons;    // <a^dagger a>
    std::vector<double> emitters;   // sum_n <sigma_n^+ sigma_n^->
    std::vector<double> min_eigenvalue;
    std::vector<Eigen::MatrixXcd> states;
};

// Throws std::runtime_error when the trace or positivity checks fail or the
// integrator cannot make progress.
Trajectory lindblad_propagate(const LindbladSpec& spec, const Eigen::MatrixXcd& rho0, const std::vector<double>& t_grid,
                              const PropagateOptions& opt = {});

// L[X] for an arbitrary (not necessarily Hermitian) operator X.
Eigen::MatrixXcd lindblad_apply(const LindbladSpec& spec, const Eigen::MatrixXcd& x);

struct RegressionOptions {
    double dt = 0.01;
    double cutoff = 1e-8;
    double t_max = 5000.0;
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
};

// S(w) = Re int_0^inf C(tau) e^{-i w tau} dtau with C(tau) = Tr[o1 e^{L tau}(o2 rho)].
SpectrumSeries regression_spectrum(const LindbladSpec& spec, const SparseOp& o1, const SparseOp& o2,
                                   const Eigen::MatrixXcd& rho_init, const std::vector<double>& grid,
                                   const RegressionOptions& opt = {});

// Diagonal mixture of eigenstates of spec.H weighted as in the uniform LPL population.
Eigen::MatrixXcd uniform_polariton_state(const LindbladSpec& spec, const ModelParams& p,
                                         double window_above_up = 0.5);

// max(||a^2 rho||, ||sigma_n^- sigma_n^- rho||); zero when rho holds at most one excitation.
double nqj_residual(const LindbladSpec& spec, const Eigen::MatrixXcd& rho);

struct DrivenPopulation {
    Eigen::VectorXd omega;        // eigenvalues of the undriven H
    Eigen::VectorXd population;   // <j|rho|j> / rho_G
    double ground_population = 0.0;
    double t_final = 0.0;
    double drift = 0.0;  // relative change over the last chunk
    int chunks = 0;
};

// Population that decays into vibrationally excited ground states is driven
// again at fourth order, so the excited populations keep creeping slowly.
// A run is stationary once the per-chunk change drops below change_tol, or
// once it has stopped shrinking for three chunks while below drift_tol.
struct SteadyOptions {
    double change_tol = 1e-10;
    double drift_tol = 1e-4;
    double t_max = 2000.0;
    double abs_tol = 1e-15;
    double rel_tol = 1e-10;
};

// Long-time populations under a weak coherent drive of the cavity, starting
// from |G>. Population leaking into vibrationally excited ground states grows
// without bound, so stationarity is judged on rho_j / rho_G.
DrivenPopulation driven_steady_population(const LindbladSpec& spec, const ModelParams& p, double omega_p,
                                          double amplitude, const SteadyOptions& opt = {});

// ||a - b|| / ||a|| on the overlap of the two grids, b interpolated onto a.
double compare_spectra(const SpectrumSeries& a, const SpectrumSeries& b, bool peak_normalize = true);

}  // namespace htc
