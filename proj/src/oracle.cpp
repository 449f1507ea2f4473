#include "htc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/numeric/odeint.hpp>

#include "htc/franck_condon.hpp"
#include "htc/hamiltonian.hpp"

namespace htc {

namespace odeint = boost::numeric::odeint;
using cd = std::complex<double>;

namespace {

using State = std::vector<double>;

Eigen::Map<Eigen::MatrixXcd> view(State& x, Eigen::Index d)
{
    return Eigen::Map<Eigen::MatrixXcd>(reinterpret_cast<cd*>(x.data()), d, d);
}
Eigen::Map<const Eigen::MatrixXcd> view(const State& x, Eigen::Index d)
{
    return Eigen::Map<const Eigen::MatrixXcd>(reinterpret_cast<const cd*>(x.data()), d, d);
}

State pack(const Eigen::MatrixXcd& m)
{
    State x(std::size_t(2 * m.size()));
    view(x, m.rows()) = m;
    return x;
}

// Matrix-free right-hand side: -i (Heff X - X Heff^dagger) + sum_k r_k L_k X L_k^dagger.
class Liouvillian {
public:
    explicit Liouvillian(const LindbladSpec& s) : spec_(s), d_(s.dimension())
    {
        heff_ = s.H;
        for (const auto& j : s.jumps) {
            if (j.rate == 0.0) continue;
            const Eigen::MatrixXcd ll = Eigen::MatrixXcd(j.op.adjoint() * j.op);
            heff_ -= cd(0.0, 0.5 * j.rate) * ll;
        }
        heff_adj_ = heff_.adjoint();
    }

    Eigen::MatrixXcd apply(const Eigen::MatrixXcd& x) const
    {
        Eigen::MatrixXcd out = cd(0.0, -1.0) * (heff_ * x - x * heff_adj_);
        for (const auto& j : spec_.jumps) {
            if (j.rate == 0.0) continue;
            const Eigen::MatrixXcd lx = j.op * x;
            out += j.rate * (lx * j.op.adjoint());
        }
        return out;
    }

    void operator()(const State& x, State& dxdt, double) const
    {
        dxdt.resize(x.size());
        view(dxdt, d_) = apply(view(x, d_));
    }

private:
    const LindbladSpec& spec_;
    Eigen::Index d_;
    Eigen::MatrixXcd heff_, heff_adj_;
};

// Dense-output dopri5 that advances on demand and samples at requested times.
class Propagator {
public:
    Propagator(const LindbladSpec& s, const Eigen::MatrixXcd& x0, double abs_tol, double rel_tol)
        : rhs_(s), d_(s.dimension()), stepper_(odeint::make_dense_output(abs_tol, rel_tol, odeint::runge_kutta_dopri5<State>()))
    {
        State x = pack(x0);
        stepper_.initialize(x, 0.0, 1e-3);
        buffer_.resize(x.size());
    }

    Eigen::MatrixXcd at(double t)
    {
        int guard = 0;
        while (stepper_.current_time() < t) {
            const double before = stepper_.current_time();
            stepper_.do_step(std::cref(rhs_));
            const double dt = stepper_.current_time() - before;
            if (!(dt > 1e-12 * std::max(1.0, std::abs(before))) && ++guard > 1000)
                throw std::runtime_error("lindblad: step size collapsed at t = " + std::to_string(before));
        }
        if (t == stepper_.current_time()) return view(stepper_.current_state(), d_);
        stepper_.calc_state(t, buffer_);
        return view(buffer_, d_);
    }

private:
    Liouvillian rhs_;
    Eigen::Index d_;
    odeint::result_of::make_dense_output<odeint::runge_kutta_dopri5<State>>::type stepper_;
    State buffer_;
};

int state_index(const LindbladSpec& spec, const BasisState& s)
{
    auto i = spec.basis.index_of(s);
    if (!i) throw std::logic_error("oracle: state missing from basis: " + s.describe());
    return int(*i);
}

BasisState site_ground(const ModelParams& p) { return site_resolved(-1, std::vector<int>(p.n_molecules, 0), 0); }

Eigen::MatrixXd real_hamiltonian(const LindbladSpec& spec)
{
    if (spec.omega_p != 0.0 || spec.drive_amplitude != 0.0)
        throw std::invalid_argument("oracle: expected an undriven spec");
    return spec.H.real();
}

}  // namespace

LindbladSpec make_lindblad_spec(const ModelParams& p_in, double k_par, DipoleDissipator dipole,
                                std::size_t max_dimension)
{
    ModelParams p = p_in;
    p.particle_level = ParticleLevel::full;
    p.validate();
    if (p.gamma_nr != 0.0) throw std::invalid_argument("make_lindblad_spec: gamma_nr must be 0 for the oracle");
    if (full_dimension(p) > max_dimension)
        throw std::length_error("make_lindblad_spec: dimension " + std::to_string(full_dimension(p)) +
                                " exceeds oracle cap " + std::to_string(max_dimension));
    LindbladSpec spec;
    spec.basis = build_full_basis(p);
    const HermitianMatrix h = assemble_htc(spec.basis, p, k_par);
    spec.H = h.data.cast<cd>();
    spec.excitations = h.excitations.cast<double>();

    const Eigen::Index d = spec.dimension();
    const Eigen::MatrixXd fc = franck_condon_table(p.nu_max, p.nu_max, p.lambda());
    std::vector<Eigen::Triplet<cd>> ta;
    std::vector<std::vector<Eigen::Triplet<cd>>> ts(std::size_t(p.n_molecules));
    for (Eigen::Index c = 0; c < d; ++c) {
        const BasisState& s = spec.basis[std::size_t(c)];
        if (s.photon == 1) {
            ta.emplace_back(state_index(spec, site_resolved(-1, s.vib, 0)), int(c), 1.0);
        } else if (s.excited_site >= 0) {
            const int n = s.excited_site;
            std::vector<int> v = s.vib;
            for (int q = 0; q <= p.nu_max; ++q) {
                v[std::size_t(n)] = q;
                ts[std::size_t(n)].emplace_back(state_index(spec, site_resolved(-1, v, 0)), int(c),
                                                fc(q, s.vib[std::size_t(n)]));
            }
        }
    }
    spec.a.resize(d, d);
    spec.a.setFromTriplets(ta.begin(), ta.end());
    spec.mu_minus.resize(d, d);
    if (p.kappa > 0) spec.jumps.push_back({"cavity", spec.a, p.kappa});
    for (int n = 0; n < p.n_molecules; ++n) {
        SparseOp sn(d, d);
        sn.setFromTriplets(ts[std::size_t(n)].begin(), ts[std::size_t(n)].end());
        spec.mu_minus += sn;
        if (p.gamma_e > 0 && dipole == DipoleDissipator::local)
            spec.jumps.push_back({"sigma_" + std::to_string(n), sn, p.gamma_e});
    }
    if (p.gamma_e > 0 && dipole == DipoleDissipator::collective) spec.jumps.push_back({"mu", spec.mu_minus, p.gamma_e});
    return spec;
}

LindbladSpec with_drive(const LindbladSpec& spec, double omega_p, double amplitude)
{
    LindbladSpec out = spec;
    out.omega_p = omega_p;
    out.drive_amplitude = amplitude;
    out.H -= omega_p * spec.excitations.cast<cd>().asDiagonal();
    const Eigen::MatrixXcd a = Eigen::MatrixXcd(spec.a);
    out.H += amplitude * (a + a.adjoint());
    return out;
}

Eigen::MatrixXcd lindblad_apply(const LindbladSpec& spec, const Eigen::MatrixXcd& x)
{
    return Liouvillian(spec).apply(x);
}

Trajectory lindblad_propagate(const LindbladSpec& spec, const Eigen::MatrixXcd& rho0, const std::vector<double>& t_grid,
                              const PropagateOptions& opt)
{
    const Eigen::Index d = spec.dimension();
    if (rho0.rows() != d || rho0.cols() != d) throw std::invalid_argument("lindblad_propagate: rho0 dimension mismatch");
    for (const auto& j : spec.jumps) {
        if (j.rate < 0) throw std::invalid_argument("lindblad_propagate: negative rate for " + j.name);
        if (j.op.rows() != d || j.op.cols() != d) throw std::invalid_argument("lindblad_propagate: jump size mismatch");
    }
    if (t_grid.empty() || t_grid.front() < 0) throw std::invalid_argument("lindblad_propagate: bad time grid");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1])) throw std::invalid_argument("lindblad_propagate: time grid must increase");

    const Eigen::VectorXd photon_diag = Eigen::MatrixXcd(spec.a.adjoint() * spec.a).diagonal().real();
    Eigen::VectorXd emitter_diag(d);
    for (Eigen::Index i = 0; i < d; ++i) emitter_diag(i) = spec.basis[std::size_t(i)].electronic_excitation() ? 1.0 : 0.0;
    const double tr0 = rho0.trace().real();

    Propagator prop(spec, rho0, opt.abs_tol, opt.rel_tol);
    Trajectory out;
    for (double t : t_grid) {
        const Eigen::MatrixXcd rho = prop.at(t);
        const double tr = rho.trace().real();
        out.t.push_back(t);
        out.trace.push_back(tr);
        out.photons.push_back(photon_diag.dot(rho.diagonal().real()));
        out.emitters.push_back(emitter_diag.dot(rho.diagonal().real()));
        double lo = 0.0;
        if (opt.check_invariants) {
            const Eigen::MatrixXcd herm = 0.5 * (rho + rho.adjoint());
            const double anti = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
            lo = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(herm, Eigen::EigenvaluesOnly).eigenvalues()(0);
            if (std::abs(tr - tr0) > opt.trace_tol)
                throw std::runtime_error("lindblad_propagate: trace drift " + std::to_string(tr - tr0) + " at t = " +
                                         std::to_string(t));
            if (anti > opt.trace_tol)
                throw std::runtime_error("lindblad_propagate: Hermiticity lost at t = " + std::to_string(t));
            if (lo < -opt.positivity_tol)
                throw std::runtime_error("lindblad_propagate: negative eigenvalue " + std::to_string(lo) +
                                         " at t = " + std::to_string(t));
        }
        out.min_eigenvalue.push_back(lo);
        if (opt.store_states) out.states.push_back(rho);
    }
    return out;
}

SpectrumSeries regression_spectrum(const LindbladSpec& spec, const SparseOp& o1, const SparseOp& o2,
                                   const Eigen::MatrixXcd& rho_init, const std::vector<double>& grid,
                                   const RegressionOptions& opt)
{
    const Eigen::Index d = spec.dimension();
    if (o1.rows() != d || o2.rows() != d || rho_init.rows() != d)
        throw std::invalid_argument("regression_spectrum: operator dimension mismatch");
    if (grid.empty()) throw std::invalid_argument("regression_spectrum: empty frequency grid");
    SpectrumSeries s;
    s.kind = SpectrumKind::lpl;
    s.omega = grid;
    s.intensity.assign(grid.size(), 0.0);

    const Eigen::MatrixXcd x0 = o2 * rho_init;
    if (x0.cwiseAbs().maxCoeff() == 0.0) return s;

    Propagator prop(spec, x0, opt.abs_tol, opt.rel_tol);
    const Eigen::MatrixXcd o1d = Eigen::MatrixXcd(o1);
    auto corr = [&](double t) { return (o1d.cwiseProduct(prop.at(t).transpose())).sum(); };

    std::vector<cd> c{corr(0.0)};
    double peak = std::abs(c[0]);
    const int block = std::max(1, int(std::lround(1.0 / opt.dt)));
    for (;;) {
        double block_max = 0.0;
        for (int k = 0; k < block; ++k) {
            c.push_back(corr(opt.dt * double(c.size())));
            block_max = std::max(block_max, std::abs(c.back()));
            peak = std::max(peak, std::abs(c.back()));
        }
        if (peak == 0.0 || block_max < opt.cutoff * peak) break;
        if (opt.dt * double(c.size()) > opt.t_max)
            throw std::runtime_error("regression_spectrum: correlation does not decay within t_max");
    }

    // Exponential tail beyond the last sample.
    const std::size_t n = c.size();
    cd rate(0.0, 0.0);
    if (std::abs(c[n - 2]) > 0 && std::abs(c[n - 1]) > 0) rate = std::log(c[n - 1] / c[n - 2]) / opt.dt;
    for (std::size_t w = 0; w < grid.size(); ++w) {
        const cd step = std::exp(cd(0.0, -grid[w] * opt.dt));
        cd phase(1.0, 0.0), acc(0.0, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            const double wt = (k == 0 || k + 1 == n) ? 0.5 : 1.0;
            acc += wt * c[k] * phase;
            phase *= step;
        }
        acc *= opt.dt;
        const cd z = rate - cd(0.0, grid[w]);
        if (rate.real() < 0) acc += -c[n - 1] * std::exp(cd(0.0, -grid[w] * opt.dt * double(n - 1))) / z;
        s.intensity[w] = acc.real();
    }
    s.peak = *std::max_element(s.intensity.begin(), s.intensity.end());
    return s;
}

Eigen::MatrixXcd uniform_polariton_state(const LindbladSpec& spec, const ModelParams& p_in, double window_above_up)
{
    ModelParams p = p_in;
    p.particle_level = ParticleLevel::full;
    const Basis basis = build_full_basis(p);
    if (Eigen::Index(basis.dimension()) != spec.dimension())
        throw std::invalid_argument("uniform_polariton_state: params do not match the spec");
    const SpectralModel m = make_spectral_model(basis, diagonalize(assemble_htc(basis, p, 0.0)),
                                                enumerate_ground_manifold(p, BasisKind::site_resolved), p);
    PopulationModel pm;
    pm.window_above_up = window_above_up;
    const ResolvedPopulation pop = resolve_population(m, pm, p);
    const Eigen::MatrixXd rho = m.eig.vectors * pop.rho.asDiagonal() * m.eig.vectors.transpose();
    return rho.cast<cd>();
}

double nqj_residual(const LindbladSpec& spec, const Eigen::MatrixXcd& rho)
{
    double r = Eigen::MatrixXcd(spec.a * (spec.a * rho)).norm();
    for (const auto& j : spec.jumps)
        if (j.name != "cavity") r = std::max(r, Eigen::MatrixXcd(j.op * (j.op * rho)).norm());
    return r;
}

DrivenPopulation driven_steady_population(const LindbladSpec& spec, const ModelParams& p, double omega_p,
                                          double amplitude, const SteadyOptions& opt)
{
    const Eigen::MatrixXd h = real_hamiltonian(spec);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (es.info() != Eigen::Success) throw std::runtime_error("driven_steady_population: eigensolver failed");
    const Eigen::MatrixXcd v = es.eigenvectors().cast<cd>();
    const int g = state_index(spec, site_ground(p));

    DrivenPopulation out;
    out.omega = es.eigenvalues();
    out.population = Eigen::VectorXd::Zero(h.rows());
    if (amplitude == 0.0) {
        out.ground_population = 1.0;
        return out;
    }
    const Eigen::VectorXcd a_g = (Eigen::MatrixXcd(spec.a).row(g) * v).transpose();
    const LindbladSpec driven = with_drive(spec, omega_p, amplitude);
    Eigen::MatrixXcd rho0 = Eigen::MatrixXcd::Zero(h.rows(), h.rows());
    rho0(g, g) = 1.0;
    Propagator prop(driven, rho0, opt.abs_tol, opt.rel_tol);

    const double chunk = std::clamp(2.0 * std::numbers::pi / std::max(std::abs(omega_p), 1e-12), 1.0, 10.0);
    Eigen::VectorXd prev = Eigen::VectorXd::Constant(h.rows(), -1.0);
    double last_change = std::numeric_limits<double>::infinity();
    int stalled = 0;
    for (double t = chunk;; t += chunk) {
        const Eigen::MatrixXcd rho = prop.at(t);
        const Eigen::VectorXd pops = (v.adjoint() * rho * v).diagonal().real();
        const double rg = rho(g, g).real();
        const Eigen::VectorXd ratio = pops / rg;
        ++out.chunks;
        out.t_final = t;
        // Only states the drive reaches from |G> directly are monitored.
        Eigen::VectorXd excited = ratio;
        for (Eigen::Index j = 0; j < excited.size(); ++j)
            if (std::norm(a_g(j)) < 1e-12) excited(j) = 0.0;
        const double scale = std::max(excited.cwiseAbs().maxCoeff(), 1e-300);
        const double change = (excited - prev).cwiseAbs().maxCoeff() / scale;
        prev = excited;
        stalled = (change > 0.9 * last_change && change < opt.drift_tol) ? stalled + 1 : 0;
        last_change = change;
        out.drift = change;
        if (change < opt.change_tol || stalled >= 3) {
            out.population = excited;
            out.ground_population = rg;
            return out;
        }
        if (t > opt.t_max) throw std::runtime_error("driven_steady_population: no steady state within t_max");
    }
}

double compare_spectra(const SpectrumSeries& a, const SpectrumSeries& b, bool peak_normalize)
{
    if (a.omega.size() != a.intensity.size() || b.omega.size() != b.intensity.size() || b.omega.size() < 2)
        throw std::invalid_argument("compare_spectra: malformed series");
    const double lo = std::max(a.omega.front(), b.omega.front()), hi = std::min(a.omega.back(), b.omega.back());
    std::vector<double> ya, yb;
    for (std::size_t i = 0; i < a.omega.size(); ++i) {
        const double w = a.omega[i];
        if (w < lo || w > hi) continue;
        auto it = std::lower_bound(b.omega.begin(), b.omega.end(), w);
        std::size_t k = std::size_t(it - b.omega.begin());
        k = std::clamp<std::size_t>(k, 1, b.omega.size() - 1);
        const double f = (w - b.omega[k - 1]) / (b.omega[k] - b.omega[k - 1]);
        ya.push_back(a.intensity[i]);
        yb.push_back((1 - f) * b.intensity[k - 1] + f * b.intensity[k]);
    }
    if (ya.size() < 2) throw std::invalid_argument("compare_spectra: grids do not overlap");
    Eigen::Map<Eigen::VectorXd> va(ya.data(), Eigen::Index(ya.size())), vb(yb.data(), Eigen::Index(yb.size()));
    if (peak_normalize) {
        const double pa = va.cwiseAbs().maxCoeff(), pb = vb.cwiseAbs().maxCoeff();
        if (pa > 0) va /= pa;
        if (pb > 0) vb /= pb;
    }
    const double na = va.norm();
    if (na == 0.0) return vb.norm() == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return (va - vb).norm() / na;
}

}  // namespace htc
