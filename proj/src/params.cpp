#include "htc/params.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>

namespace htc {

std::string to_string(ParticleLevel level)
{
    switch (level) {
    case ParticleLevel::one: return "one";
    case ParticleLevel::two: return "two";
    case ParticleLevel::full: return "full";
    }
    return "two";
}

ParticleLevel particle_level_from_string(const std::string& s)
{
    if (s == "one") return ParticleLevel::one;
    if (s == "two") return ParticleLevel::two;
    if (s == "full") return ParticleLevel::full;
    throw std::invalid_argument("particle_level: expected one|two|full, got '" + s + "'");
}

double ModelParams::lambda() const { return std::sqrt(huang_rhys); }

double ModelParams::collective_rabi() const
{
    return std::sqrt(static_cast<double>(n_molecules)) * rabi_single;
}

void ModelParams::validate() const
{
    auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
    if (n_molecules < 1) fail("n_molecules must be >= 1");
    if (nu_max < 0) fail("nu_max must be >= 0");
    if (ground_nu_total_max < 0) fail("ground_nu_total_max must be >= 0");
    if (huang_rhys < 0) fail("huang_rhys must be >= 0");
    if (!(omega_v > 0)) fail("omega_v must be > 0");
    if (kappa < 0) fail("kappa must be >= 0");
    if (gamma_e < 0) fail("gamma_e must be >= 0");
    if (gamma_nr < 0) fail("gamma_nr must be >= 0");
    if (rabi_single < 0) fail("rabi_single must be >= 0");
    if (dispersion_curvature < 0) fail("dispersion_curvature must be >= 0");
    if (max_dimension == 0) fail("max_dimension must be > 0");
}

nlohmann::json to_json(const ModelParams& p)
{
    nlohmann::json j;
    j["n_molecules"] = p.n_molecules;
    j["huang_rhys"] = p.huang_rhys;
    j["omega_v"] = p.omega_v;
    j["omega_00"] = p.omega_00;
    j["detuning"] = p.detuning;
    j["rabi_single"] = p.rabi_single;
    j["kappa"] = p.kappa;
    j["gamma_e"] = p.gamma_e;
    j["gamma_nr"] = p.gamma_nr;
    j["nu_max"] = p.nu_max;
    j["particle_level"] = to_string(p.particle_level);
    j["ground_nu_total_max"] = p.ground_nu_total_max;
    j["dispersion_curvature"] = p.dispersion_curvature;
    j["max_dimension"] = p.max_dimension;
    return j;
}

namespace {

template <class T>
void read(const nlohmann::json& j, const char* key, T& out)
{
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("field '") + key + "': " + e.what());
    }
}

}  // namespace

ModelParams params_from_json(const nlohmann::json& j)
{
    if (!j.is_object()) throw std::invalid_argument("model parameters must be a JSON object");
    static const char* known[] = {"n_molecules", "huang_rhys", "omega_v", "omega_00", "detuning",
                                  "rabi_single", "rabi_collective", "kappa", "gamma_e",
                                  "gamma_e_collective", "gamma_nr", "nu_max", "particle_level",
                                  "ground_nu_total_max", "dispersion_curvature", "max_dimension"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || it.key() == k;
        if (!ok) throw std::invalid_argument("unknown model field '" + it.key() + "'");
    }

    ModelParams p;
    read(j, "n_molecules", p.n_molecules);
    read(j, "huang_rhys", p.huang_rhys);
    read(j, "omega_v", p.omega_v);
    read(j, "omega_00", p.omega_00);
    read(j, "detuning", p.detuning);
    read(j, "rabi_single", p.rabi_single);
    read(j, "kappa", p.kappa);
    read(j, "gamma_e", p.gamma_e);
    read(j, "gamma_nr", p.gamma_nr);
    read(j, "nu_max", p.nu_max);
    read(j, "ground_nu_total_max", p.ground_nu_total_max);
    read(j, "dispersion_curvature", p.dispersion_curvature);
    read(j, "max_dimension", p.max_dimension);
    if (j.contains("particle_level")) {
        std::string s;
        read(j, "particle_level", s);
        p.particle_level = particle_level_from_string(s);
    }
    if (j.contains("rabi_collective")) {
        if (j.contains("rabi_single"))
            throw std::invalid_argument("give either rabi_single or rabi_collective, not both");
        double r = 0;
        read(j, "rabi_collective", r);
        p.rabi_single = r / std::sqrt(static_cast<double>(std::max(p.n_molecules, 1)));
    }
    if (j.contains("gamma_e_collective")) {
        if (j.contains("gamma_e"))
            throw std::invalid_argument("give either gamma_e or gamma_e_collective, not both");
        double g = 0;
        read(j, "gamma_e_collective", g);
        p.gamma_e = g / static_cast<double>(std::max(p.n_molecules, 1));
    }
    p.validate();
    return p;
}

std::string fingerprint(const ModelParams& p)
{
    // FNV-1a over the canonical dump; only needs to be stable, not secure.
    const std::string s = to_json(p).dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace htc
