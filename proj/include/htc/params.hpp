#pragma once

#include <cstddef>
#include <string>

#include <json.hpp>

namespace htc {

enum class ParticleLevel { one, two, full };

std::string to_string(ParticleLevel level);
ParticleLevel particle_level_from_string(const std::string& s);

// Energies are in the same unit as omega_v (conventionally omega_v = 1).
struct ModelParams {
    int n_molecules = 1;
    double huang_rhys = 1.0;
    double omega_v = 1.0;
    double omega_00 = 10.0;
    double detuning = 0.0;
    double rabi_single = 1.0;
    double kappa = 0.0;
    double gamma_e = 0.0;
    double gamma_nr = 0.0;
    int nu_max = 4;
    ParticleLevel particle_level = ParticleLevel::two;
    int ground_nu_total_max = 2;
    double dispersion_curvature = 0.0;
    std::size_t max_dimension = 1000000;

    double lambda() const;
    double omega_e() const { return omega_00 + omega_v * huang_rhys; }
    double collective_rabi() const;

    // throws std::invalid_argument with the offending field
    void validate() const;
};

// Tolerances shared by the modules.
inline constexpr double tol_deg = 1e-8;
inline constexpr double tol_parity = 1e-6;
inline constexpr double tol_dark = 1e-8;
inline constexpr double visible_photon_weight = 0.1;

nlohmann::json to_json(const ModelParams& p);

// Accepts the field names of ModelParams. Two convenience keys are also read:
// rabi_collective (sqrt(N) * Omega) and gamma_e_collective (N * gamma_e).
ModelParams params_from_json(const nlohmann::json& j);

// Stable hex digest of the canonical JSON form.
std::string fingerprint(const ModelParams& p);

}  // namespace htc
