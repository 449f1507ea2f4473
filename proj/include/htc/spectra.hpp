#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "htc/basis.hpp"
#include "htc/hamiltonian.hpp"
#include "htc/params.hpp"

namespace htc {

// <i| a |s> and <i| mu+ |s> for ground-manifold states i (rows) and basis
// states s (columns); mu+ = sum_n sigma_n^- in units of the molecular dipole.
struct LoweringOperators {
    Eigen::MatrixXd a;
    Eigen::MatrixXd mu;
    Eigen::VectorXd ground_energy;  // rotating frame
    std::vector<int> ground_nu;     // total vibrational quanta of each final state
};
LoweringOperators lowering_operators(const Basis& basis, const std::vector<BasisState>& ground, const ModelParams& p);

// Everything the spectra need about one diagonalized model.
struct SpectralModel {
    EigenSystem eig;
    std::vector<BasisState> ground;
    Eigen::MatrixXd a;   // <i|a|j>, eigenstates j
    Eigen::MatrixXd mu;  // <i|mu+|j>
    Eigen::VectorXd ground_energy;
    std::vector<int> ground_nu;
    std::vector<int> polaritons;  // eigenstates in the one-excitation manifold
    int n_molecules = 1;
};
SpectralModel make_spectral_model(const Basis& basis, const EigenSystem& eig,
                                  const std::vector<BasisState>& ground, const ModelParams& p);
// Convenience: build basis (symmetric or full per particle_level), assemble at k = 0, diagonalize.
SpectralModel build_spectral_model(const ModelParams& p, double k_par = 0.0);

struct RateSet {
    Eigen::MatrixXd gamma;     // gamma_ij, rows ground states, columns eigenstates
    Eigen::VectorXd Gamma;     // sum_i gamma_ij
    Eigen::VectorXd kappa_G;   // Gamma_j / 2 + gamma_nr
    Eigen::VectorXd fc_deficit;
    bool truncation_warning = false;
};

RateSet transition_rates(const SpectralModel& m, const ModelParams& p);

// F_j = sum_i |<i|mu+|j>|^2
Eigen::VectorXd dipole_strength(const SpectralModel& m);

enum class DarkClass { bright, X, Y, other_dark };
const char* to_string(DarkClass c);

struct DarkStateEntry {
    int index = 0;
    double omega = 0.0;
    double mu_ground = 0.0;  // |mu_Gj|
    double F = 0.0;
    double photon_weight = 0.0;
    int degeneracy = 1;
    DarkClass cls = DarkClass::bright;
    std::string label;
};
struct DarkStateReport {
    std::vector<DarkStateEntry> entries;  // sorted by omega
};

// Darkness is judged on |mu_Gj|^2 relative to the brightest state.
DarkStateReport classify_dark(const SpectralModel& m, const RateSet& rates, const ModelParams& p);

// Branch labels (LP, UP, X, X', Ya, Yb, or empty) for the polaritons of m.
std::vector<std::string> label_states(const SpectralModel& m);
int find_upper_polariton(const SpectralModel& m);
int find_lower_polariton(const SpectralModel& m);

struct CriticalResult {
    double rabi_single = 0.0;
    double rabi_collective = 0.0;
    double omega = 0.0;       // eigenvalue of the tracked state
    double mu_ground2 = 0.0;  // |mu_GX|^2
    double mu_ground2_relative = 0.0;
    double F_relative = 0.0;  // F_X / max F_j
    int iterations = 0;
};

// Bisection on the number of negative eigenvalues of the totally symmetric
// sector; the bracket is in single-particle Rabi units.
CriticalResult find_critical_rabi(const ModelParams& p, std::pair<double, double> bracket, double tol = 1e-10);
// Default bracket sqrt(N) Omega in [0.5, 3.5].
CriticalResult find_critical_rabi(const ModelParams& p);

struct DriveSpec {
    std::vector<double> omega_p;
    double amplitude = 1e-3;
};

enum class PopulationMode { uniform_window, ground_only, custom };

struct PopulationModel {
    PopulationMode mode = PopulationMode::uniform_window;
    double window_above_up = 0.5;
    Eigen::VectorXd custom;  // per eigenstate, used for mode custom
};

struct ResolvedPopulation {
    Eigen::VectorXd rho;  // per eigenstate
    int levels = 0;       // M
    double upper_bound = 0.0;
};
ResolvedPopulation resolve_population(const SpectralModel& m, const PopulationModel& pop, const ModelParams& p);

enum class SpectrumKind { absorption_amt, bound_absorption, lpl, empty_cavity_rt };
const char* to_string(SpectrumKind k);

struct SpectrumSeries {
    SpectrumKind kind = SpectrumKind::lpl;
    std::vector<double> omega;
    std::vector<double> intensity;
    std::vector<std::vector<double>> channels;  // per final-state nu, lpl only
    std::vector<int> channel_nu;
    double peak = 0.0;
    std::string fingerprint;

    std::vector<double> normalized() const;
};

SpectrumSeries absorption_spectrum(const SpectralModel& m, const RateSet& rates, const DriveSpec& drive);
SpectrumSeries bound_absorption_spectrum(const SpectralModel& m, const RateSet& rates, const std::vector<double>& grid);
SpectrumSeries lpl_spectrum(const SpectralModel& m, const RateSet& rates, const ResolvedPopulation& pop,
                            const std::vector<double>& grid);

struct ReflectionTransmission {
    double R = 0.0;
    double T = 0.0;
};
ReflectionTransmission empty_cavity_rt(double gamma_1, double gamma_2);

// Weak-drive polariton population to second order in the drive amplitude.
Eigen::VectorXd weak_drive_population(const SpectralModel& m, const RateSet& rates, double omega_p, double amplitude);

// Local maxima of a series, as (omega, value) pairs.
std::vector<std::pair<double, double>> local_maxima(const std::vector<double>& omega, const std::vector<double>& y,
                                                    double min_relative = 0.0);

std::vector<double> linspace(double a, double b, int n);

}  // namespace htc
