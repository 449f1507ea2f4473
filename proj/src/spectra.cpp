#include "htc/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "htc/franck_condon.hpp"

namespace htc {

LoweringOperators lowering_operators(const Basis& basis, const std::vector<BasisState>& ground, const ModelParams& p)
{
    const Eigen::Index ng = Eigen::Index(ground.size()), d = Eigen::Index(basis.dimension());
    LoweringOperators op;
    op.a = Eigen::MatrixXd::Zero(ng, d);
    op.mu = Eigen::MatrixXd::Zero(ng, d);
    op.ground_energy.resize(ng);
    op.ground_nu.resize(ng);

    std::map<BasisState, Eigen::Index> row;
    for (Eigen::Index i = 0; i < ng; ++i) {
        row.emplace(ground[i], i);
        op.ground_nu[i] = ground[i].vib_quanta();
        op.ground_energy(i) = p.omega_v * op.ground_nu[i];
    }
    auto find = [&](const BasisState& s) -> Eigen::Index {
        auto it = row.find(s);
        return it == row.end() ? -1 : it->second;
    };

    int top = p.nu_max;
    for (const auto& g : ground) top = std::max(top, g.vib_quanta());
    const Eigen::MatrixXd fc = franck_condon_table(top, p.nu_max, p.lambda());
    const double n = p.n_molecules;

    for (Eigen::Index c = 0; c < d; ++c) {
        const BasisState& s = basis[c];
        switch (s.kind) {
        case StateKind::DressedPhoton: {
            const Eigen::Index r = s.label < 0 ? find(absolute_ground()) : find(ground_vib(s.label, s.nu));
            if (r >= 0) op.a(r, c) = 1.0;
            break;
        }
        case StateKind::SingleParticle: {
            if (s.label == 0) {
                const Eigen::Index r = find(absolute_ground());
                if (r >= 0) op.mu(r, c) = std::sqrt(n) * fc(0, s.nu_tilde);
            }
            for (int v = 1; v <= top; ++v) {
                const Eigen::Index r = find(ground_vib(s.label, v));
                if (r >= 0) op.mu(r, c) = fc(v, s.nu_tilde);
            }
            break;
        }
        case StateKind::TwoParticle: {
            const Eigen::Index r = find(ground_vib(s.label, s.nu));
            if (r >= 0) op.mu(r, c) = std::sqrt(n - 1.0) * fc(0, s.nu_tilde);
            break;
        }
        case StateKind::SiteResolved: {
            if (s.photon == 1) {
                const Eigen::Index r = find(site_resolved(-1, s.vib, 0));
                if (r >= 0) op.a(r, c) = 1.0;
            } else if (s.excited_site >= 0) {
                BasisState t = site_resolved(-1, s.vib, 0);
                for (int v = 0; v <= p.nu_max; ++v) {
                    t.vib[s.excited_site] = v;
                    const Eigen::Index r = find(t);
                    if (r >= 0) op.mu(r, c) = fc(v, s.vib[s.excited_site]);
                }
            }
            break;
        }
        default: break;
        }
    }
    return op;
}

SpectralModel make_spectral_model(const Basis& basis, const EigenSystem& eig, const std::vector<BasisState>& ground,
                                  const ModelParams& p)
{
    SpectralModel m;
    m.n_molecules = p.n_molecules;
    m.eig = eig;
    m.ground = ground;
    const LoweringOperators op = lowering_operators(basis, ground, p);
    m.a = op.a * eig.vectors;
    m.mu = op.mu * eig.vectors;
    m.ground_energy = op.ground_energy;
    m.ground_nu = op.ground_nu;
    for (Eigen::Index j = 0; j < eig.size(); ++j)
        if (eig.excitations(j) == 1) m.polaritons.push_back(int(j));

    // Inside a degenerate group the eigenvectors are fixed by diagonalizing the
    // decay matrix, so that every state decays with a single rate.
    for (const auto& g : m.eig.groups) {
        const int n = int(g.members.size());
        if (n < 2 || m.eig.excitations(g.members[0]) != 1) continue;
        Eigen::MatrixXd ga(m.a.rows(), n), gm(m.mu.rows(), n);
        for (int k = 0; k < n; ++k) ga.col(k) = m.a.col(g.members[k]), gm.col(k) = m.mu.col(g.members[k]);
        const Eigen::MatrixXd decay = p.kappa * ga.transpose() * ga + p.gamma_e * gm.transpose() * gm;
        const double off = (decay - Eigen::MatrixXd(decay.diagonal().asDiagonal())).cwiseAbs().maxCoeff();
        if (!(off > 1e-12 * std::max(1.0, decay.cwiseAbs().maxCoeff()))) continue;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(decay);
        const Eigen::MatrixXd& u = es.eigenvectors();
        Eigen::MatrixXd v(m.eig.vectors.rows(), n);
        for (int k = 0; k < n; ++k) v.col(k) = m.eig.vectors.col(g.members[k]);
        v = v * u;
        ga = ga * u;
        gm = gm * u;
        for (int k = 0; k < n; ++k) {
            const int j = g.members[k];
            m.eig.vectors.col(j) = v.col(k);
            m.a.col(j) = ga.col(k);
            m.mu.col(j) = gm.col(k);
            double pw = 0.0, ag = 0.0, mg = 0.0;
            for (Eigen::Index i = 0; i < v.rows(); ++i) {
                pw += basis[std::size_t(i)].photon * v(i, k) * v(i, k);
            }
            for (int q = 0; q < n; ++q) {
                ag += eig.a_ground(g.members[q]) * u(q, k);
                mg += eig.mu_ground(g.members[q]) * u(q, k);
            }
            m.eig.photon_weight(j) = pw;
            m.eig.a_ground(j) = ag;
            m.eig.mu_ground(j) = mg;
            m.eig.sector(j) = -1;
        }
    }
    return m;
}

SpectralModel build_spectral_model(const ModelParams& p, double k_par)
{
    const bool full = p.particle_level == ParticleLevel::full;
    const Basis basis = full ? build_full_basis(p) : build_symmetric_basis(p);
    const EigenSystem eig = diagonalize(assemble_htc(basis, p, k_par));
    return make_spectral_model(basis, eig, enumerate_ground_manifold(p, basis.kind()), p);
}

Eigen::VectorXd dipole_strength(const SpectralModel& m)
{
    return m.mu.cwiseAbs2().colwise().sum().transpose();
}

RateSet transition_rates(const SpectralModel& m, const ModelParams& p)
{
    const Eigen::Index ns = m.eig.size();
    RateSet r;
    r.gamma = Eigen::MatrixXd::Zero(m.a.rows(), ns);
    for (int j : m.polaritons)
        r.gamma.col(j) = p.kappa * m.a.col(j).cwiseAbs2() + p.gamma_e * m.mu.col(j).cwiseAbs2();
    r.Gamma = r.gamma.colwise().sum().transpose();
    r.kappa_G = (0.5 * r.Gamma).array() + p.gamma_nr;

    // Sum-rule deficit of the dipole channel, measured against a ground manifold
    // extended far enough that the single-site Franck-Condon sums are complete.
    r.fc_deficit = Eigen::VectorXd::Zero(ns);
    const Eigen::VectorXd F = dipole_strength(m);
    ModelParams wide = p;
    std::vector<BasisState> ext;
    if (p.particle_level == ParticleLevel::full) {
        wide.ground_nu_total_max = p.n_molecules * p.nu_max;
        ext = enumerate_ground_manifold(wide, BasisKind::site_resolved);
    } else {
        wide.ground_nu_total_max = p.nu_max + 30;
        ext = enumerate_ground_manifold(wide, BasisKind::symmetrized);
    }
    const Basis basis = p.particle_level == ParticleLevel::full ? build_full_basis(p) : build_symmetric_basis(p);
    const Eigen::MatrixXd mu_ext = lowering_operators(basis, ext, p).mu * m.eig.vectors;
    const Eigen::VectorXd F_ext = mu_ext.cwiseAbs2().colwise().sum().transpose();
    for (int j : m.polaritons) {
        if (F_ext(j) > 1e-14) r.fc_deficit(j) = std::max(0.0, 1.0 - F(j) / F_ext(j));
        if (m.eig.photon_weight(j) >= visible_photon_weight && r.fc_deficit(j) > 0.05) r.truncation_warning = true;
    }
    return r;
}

const char* to_string(DarkClass c)
{
    switch (c) {
    case DarkClass::bright: return "bright";
    case DarkClass::X: return "X";
    case DarkClass::Y: return "Y";
    case DarkClass::other_dark: return "other-dark";
    }
    return "?";
}

namespace {

double max_mu2(const SpectralModel& m)
{
    double best = 0.0;
    for (int j : m.polaritons) best = std::max(best, m.eig.mu_ground(j) * m.eig.mu_ground(j));
    return best;
}

bool symmetric_sector(const SpectralModel& m, int j)
{
    return m.eig.sector(j) == 0 || (m.eig.sector(j) < 0 && m.eig.degeneracy(j) == 1);
}

bool y_candidate(const SpectralModel& m, int j, int n)
{
    if (n < 2) return false;
    if (m.eig.sector(j) > 0) return true;
    return m.eig.sector(j) < 0 && n >= 3 && m.eig.degeneracy(j) == n - 1;
}

// Weight of the state in bound-mode absorption, which vanishes for dark states.
int brightest(const SpectralModel& m, bool above)
{
    int best = -1;
    double val = -1.0;
    for (int j : m.polaritons) {
        const double w = m.eig.values(j);
        if (above ? !(w > 0.0) : !(w < 0.0)) continue;
        const double b = m.eig.a_ground(j) * m.eig.a_ground(j) * m.eig.mu_ground(j) * m.eig.mu_ground(j);
        if (b > val) val = b, best = j;
    }
    return best;
}

}  // namespace

int find_upper_polariton(const SpectralModel& m) { return brightest(m, true); }
int find_lower_polariton(const SpectralModel& m) { return brightest(m, false); }

std::vector<std::string> label_states(const SpectralModel& m)
{
    std::vector<std::string> labels(m.eig.size());
    const int up = find_upper_polariton(m), lp = find_lower_polariton(m);
    if (lp >= 0) labels[lp] = "LP";
    if (up >= 0) labels[up] = "UP";
    if (up < 0 || lp < 0) return labels;
    const double wl = m.eig.values(lp), wu = m.eig.values(up);

    auto darkest_between = [&](double lo, double hi, int skip) {
        int best = -1;
        double val = std::numeric_limits<double>::infinity();
        for (int j : m.polaritons) {
            const double w = m.eig.values(j);
            if (j == skip || j == up || j == lp || !(w > lo && w < hi) || !symmetric_sector(m, j)) continue;
            const double mu2 = m.eig.mu_ground(j) * m.eig.mu_ground(j);
            if (mu2 < val) val = mu2, best = j;
        }
        return best;
    };
    const int x = darkest_between(wl, wu, -1);
    if (x < 0) return labels;
    labels[x] = "X";
    const double wx = m.eig.values(x);
    const int xp = darkest_between(wx, wu, x);
    if (xp >= 0) labels[xp] = "X'";

    const int n = m.n_molecules;
    int ya = -1, yb = -1;
    for (int j : m.polaritons) {
        if (!y_candidate(m, j, n) || m.eig.photon_weight(j) < visible_photon_weight) continue;
        const double w = m.eig.values(j);
        if (w < wx && (ya < 0 || w > m.eig.values(ya))) ya = j;
        if (w > wx && (yb < 0 || w < m.eig.values(yb))) yb = j;
    }
    auto mark_group = [&](int j, const char* name) {
        if (j < 0) return;
        for (int k : m.eig.groups[m.eig.group(j)].members)
            if (y_candidate(m, k, n)) labels[k] = name;
    };
    mark_group(ya, "Ya");
    mark_group(yb, "Yb");
    return labels;
}

DarkStateReport classify_dark(const SpectralModel& m, const RateSet& rates, const ModelParams& p)
{
    (void)rates;
    DarkStateReport rep;
    const Eigen::VectorXd F = dipole_strength(m);
    const double ref = max_mu2(m);
    const auto labels = label_states(m);
    for (int j : m.polaritons) {
        DarkStateEntry e;
        e.index = j;
        e.omega = m.eig.values(j);
        e.mu_ground = std::abs(m.eig.mu_ground(j));
        e.F = F(j);
        e.photon_weight = m.eig.photon_weight(j);
        e.degeneracy = m.eig.degeneracy(j);
        e.label = labels[j];
        const bool dark = e.mu_ground * e.mu_ground < tol_dark * ref;
        if (!dark) e.cls = DarkClass::bright;
        else if (y_candidate(m, j, p.n_molecules) && e.photon_weight > 1e-10) e.cls = DarkClass::Y;
        else if (symmetric_sector(m, j) && e.degeneracy == 1 && e.photon_weight > 1e-10) e.cls = DarkClass::X;
        else e.cls = DarkClass::other_dark;
        rep.entries.push_back(e);
    }
    std::stable_sort(rep.entries.begin(), rep.entries.end(),
                     [](const DarkStateEntry& a, const DarkStateEntry& b) { return a.omega < b.omega; });
    return rep;
}

ResolvedPopulation resolve_population(const SpectralModel& m, const PopulationModel& pop, const ModelParams& p)
{
    (void)p;
    ResolvedPopulation r;
    r.rho = Eigen::VectorXd::Zero(m.eig.size());
    switch (pop.mode) {
    case PopulationMode::ground_only: return r;
    case PopulationMode::custom:
        if (pop.custom.size() != m.eig.size()) throw std::invalid_argument("custom population: size mismatch");
        r.rho = pop.custom;
        return r;
    case PopulationMode::uniform_window: break;
    }
    const int up = find_upper_polariton(m);
    if (up < 0) throw std::runtime_error("population window: no upper polariton found");
    r.upper_bound = m.eig.values(up) + pop.window_above_up;
    std::vector<int> groups;
    for (int j : m.polaritons)
        if (m.eig.values(j) <= r.upper_bound) groups.push_back(m.eig.group(j));
    std::sort(groups.begin(), groups.end());
    groups.erase(std::unique(groups.begin(), groups.end()), groups.end());
    r.levels = int(groups.size());
    if (r.levels == 0) throw std::runtime_error("population window is empty");
    for (int g : groups) {
        const auto& mem = m.eig.groups[g].members;
        for (int j : mem) r.rho(j) = 1.0 / (double(r.levels) * double(mem.size()));
    }
    return r;
}

const char* to_string(SpectrumKind k)
{
    switch (k) {
    case SpectrumKind::absorption_amt: return "absorption_amt";
    case SpectrumKind::bound_absorption: return "bound_absorption";
    case SpectrumKind::lpl: return "lpl";
    case SpectrumKind::empty_cavity_rt: return "empty_cavity_rt";
    }
    return "?";
}

std::vector<double> SpectrumSeries::normalized() const
{
    std::vector<double> out(intensity.size(), 0.0);
    if (peak > 0)
        for (std::size_t i = 0; i < intensity.size(); ++i) out[i] = intensity[i] / peak;
    return out;
}

namespace {

void check_grid(const std::vector<double>& g)
{
    for (std::size_t i = 1; i < g.size(); ++i)
        if (!(g[i] > g[i - 1])) throw std::invalid_argument("frequency grid must be strictly increasing");
}

double lorentz(double x, double hw) { return hw / (x * x + hw * hw); }

void finish(SpectrumSeries& s)
{
    s.peak = 0.0;
    for (double v : s.intensity) s.peak = std::max(s.peak, v);
}

}  // namespace

SpectrumSeries absorption_spectrum(const SpectralModel& m, const RateSet& rates, const DriveSpec& drive)
{
    check_grid(drive.omega_p);
    SpectrumSeries s;
    s.kind = SpectrumKind::absorption_amt;
    s.omega = drive.omega_p;
    s.intensity.assign(s.omega.size(), 0.0);
    const Eigen::VectorXd F = dipole_strength(m);
    const double pref = std::numbers::pi * drive.amplitude * drive.amplitude;
    for (int j : m.polaritons) {
        const double a2 = m.eig.a_ground(j) * m.eig.a_ground(j);
        if (a2 == 0.0 || F(j) == 0.0) continue;
        if (!(rates.Gamma(j) > 0.0))
            throw std::domain_error("absorption: state with photon amplitude has zero width (index " +
                                    std::to_string(j) + ")");
        const double w = pref * a2 * F(j) / rates.Gamma(j);
        for (std::size_t k = 0; k < s.omega.size(); ++k)
            s.intensity[k] += w * lorentz(s.omega[k] - m.eig.values(j), rates.kappa_G(j));
    }
    finish(s);
    return s;
}

SpectrumSeries bound_absorption_spectrum(const SpectralModel& m, const RateSet& rates, const std::vector<double>& grid)
{
    check_grid(grid);
    SpectrumSeries s;
    s.kind = SpectrumKind::bound_absorption;
    s.omega = grid;
    s.intensity.assign(grid.size(), 0.0);
    for (int j : m.polaritons) {
        const double mu2 = m.eig.mu_ground(j) * m.eig.mu_ground(j);
        const double k = rates.kappa_G(j);
        if (mu2 == 0.0 || !(k > 0.0)) continue;
        for (std::size_t i = 0; i < grid.size(); ++i) s.intensity[i] += mu2 * lorentz(grid[i] - m.eig.values(j), k);
    }
    finish(s);
    return s;
}

SpectrumSeries lpl_spectrum(const SpectralModel& m, const RateSet& rates, const ResolvedPopulation& pop,
                            const std::vector<double>& grid)
{
    check_grid(grid);
    SpectrumSeries s;
    s.kind = SpectrumKind::lpl;
    s.omega = grid;
    s.intensity.assign(grid.size(), 0.0);
    int top = 0;
    for (int v : m.ground_nu) top = std::max(top, v);
    for (int v = 0; v <= top; ++v) s.channel_nu.push_back(v);
    s.channels.assign(top + 1, std::vector<double>(grid.size(), 0.0));

    for (int j : m.polaritons) {
        const double rho = pop.rho(j);
        const double hw = 0.5 * rates.Gamma(j);
        if (rho == 0.0 || !(hw > 0.0)) continue;
        for (Eigen::Index i = 0; i < m.a.rows(); ++i) {
            const double w = rho * m.a(i, j) * m.a(i, j);
            if (w == 0.0) continue;
            const double center = m.eig.values(j) - m.ground_energy(i);
            auto& ch = s.channels[m.ground_nu[i]];
            for (std::size_t k = 0; k < grid.size(); ++k) {
                const double v = w * lorentz(grid[k] - center, hw);
                ch[k] += v;
                s.intensity[k] += v;
            }
        }
    }
    finish(s);
    return s;
}

ReflectionTransmission empty_cavity_rt(double gamma_1, double gamma_2)
{
    if (gamma_1 < 0 || gamma_2 < 0) throw std::invalid_argument("empty_cavity_rt: rates must be >= 0");
    const double sum = gamma_1 + gamma_2;
    if (!(sum > 0)) throw std::invalid_argument("empty_cavity_rt: both mirror rates are zero");
    const double r = (gamma_2 - gamma_1) / sum;
    return {r * r, 4.0 * gamma_1 * gamma_2 / (sum * sum)};
}

Eigen::VectorXd weak_drive_population(const SpectralModel& m, const RateSet& rates, double omega_p, double amplitude)
{
    Eigen::VectorXd rho = Eigen::VectorXd::Zero(m.eig.size());
    for (int j : m.polaritons) {
        const double a2 = m.eig.a_ground(j) * m.eig.a_ground(j);
        if (a2 == 0.0 || !(rates.Gamma(j) > 0)) continue;
        const double k = rates.kappa_G(j), d = omega_p - m.eig.values(j);
        rho(j) = 2.0 * amplitude * amplitude / rates.Gamma(j) * a2 * k / (d * d + k * k);
    }
    return rho;
}

std::vector<std::pair<double, double>> local_maxima(const std::vector<double>& omega, const std::vector<double>& y,
                                                    double min_relative)
{
    std::vector<std::pair<double, double>> out;
    double top = 0.0;
    for (double v : y) top = std::max(top, v);
    for (std::size_t i = 1; i + 1 < y.size(); ++i)
        if (y[i] > y[i - 1] && y[i] >= y[i + 1] && y[i] >= min_relative * top) out.emplace_back(omega[i], y[i]);
    return out;
}

std::vector<double> linspace(double a, double b, int n)
{
    std::vector<double> g(std::max(n, 0));
    if (n == 1) g[0] = a;
    for (int i = 0; i < n && n > 1; ++i) g[i] = a + (b - a) * double(i) / double(n - 1);
    return g;
}

}  // namespace htc
