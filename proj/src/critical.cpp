#include <cmath>
#include <stdexcept>
#include <string>

#include "htc/spectra.hpp"

namespace htc {

namespace {

ModelParams symmetric_level(const ModelParams& p)
{
    ModelParams q = p;
    if (q.particle_level == ParticleLevel::full) q.particle_level = ParticleLevel::two;
    return q;
}

Basis symmetric_sector_basis(const ModelParams& p)
{
    const Basis all = build_symmetric_basis(p);
    std::vector<BasisState> keep;
    for (const auto& s : all.states())
        if (s.label <= 0) keep.push_back(s);
    return Basis(BasisKind::symmetrized, std::move(keep));
}

int negative_count(const Basis& sector, ModelParams p, double rabi)
{
    p.rabi_single = rabi;
    const HermitianMatrix h = assemble_htc(sector, p, 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.data, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("find_critical_rabi: eigensolver failed");
    int n = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) n += es.eigenvalues()(i) < 0.0;
    return n;
}

}  // namespace

CriticalResult find_critical_rabi(const ModelParams& p_in, std::pair<double, double> bracket, double tol)
{
    const ModelParams p = symmetric_level(p_in);
    p.validate();
    const Basis sector = symmetric_sector_basis(p);
    double lo = bracket.first, hi = bracket.second;
    if (!(lo >= 0 && hi > lo)) throw std::invalid_argument("find_critical_rabi: invalid bracket");
    const int n_lo = negative_count(sector, p, lo);
    const int n_hi = negative_count(sector, p, hi);
    if (n_lo == n_hi)
        throw std::runtime_error("find_critical_rabi: no eigenvalue crosses zero in [" + std::to_string(lo) + ", " +
                                 std::to_string(hi) + "]");
    CriticalResult r;
    while (hi - lo > tol * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        if (negative_count(sector, p, mid) == n_lo) lo = mid;
        else hi = mid;
        ++r.iterations;
    }
    r.rabi_single = 0.5 * (lo + hi);
    r.rabi_collective = r.rabi_single * std::sqrt(double(p.n_molecules));

    ModelParams at = p;
    at.rabi_single = r.rabi_single;
    const SpectralModel m = build_spectral_model(at);
    const Eigen::VectorXd F = dipole_strength(m);
    int x = -1;
    double max_mu2 = 0.0, max_F = 0.0;
    for (int j : m.polaritons) {
        max_mu2 = std::max(max_mu2, m.eig.mu_ground(j) * m.eig.mu_ground(j));
        max_F = std::max(max_F, F(j));
        if (m.eig.sector(j) != 0) continue;
        if (x < 0 || std::abs(m.eig.values(j)) < std::abs(m.eig.values(x))) x = j;
    }
    if (x < 0) throw std::runtime_error("find_critical_rabi: no symmetric-sector state");
    r.omega = m.eig.values(x);
    r.mu_ground2 = m.eig.mu_ground(x) * m.eig.mu_ground(x);
    r.mu_ground2_relative = max_mu2 > 0 ? r.mu_ground2 / max_mu2 : 0.0;
    r.F_relative = max_F > 0 ? F(x) / max_F : 0.0;
    if (std::abs(r.omega) > 1e-4 * p.omega_v)
        throw std::runtime_error("find_critical_rabi: tracked eigenvalue " + std::to_string(r.omega) +
                                 " did not converge to zero");
    if (r.mu_ground2_relative > tol_dark)
        throw std::runtime_error("find_critical_rabi: zero-energy state is not dark, |mu_GX|^2 relative = " +
                                 std::to_string(r.mu_ground2_relative));
    return r;
}

CriticalResult find_critical_rabi(const ModelParams& p)
{
    const double s = std::sqrt(double(p.n_molecules));
    return find_critical_rabi(p, {0.5 / s, 3.5 / s});
}

}  // namespace htc
