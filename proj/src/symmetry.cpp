#include "htc/symmetry.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

#include "htc/franck_condon.hpp"

namespace htc {

namespace {

int parity_sign(int nu) { return (nu % 2 == 0) ? 1 : -1; }

// Partner of a basis state under S, with the sign picked up.
std::optional<std::pair<BasisState, int>> partner(const BasisState& s, const ModelParams& p)
{
    switch (s.kind) {
    case StateKind::SingleParticle:
        if (s.nu_tilde == 0) {
            if (s.label != 0) return std::nullopt;
            return std::make_pair(bare_photon(), 1);
        }
        return std::make_pair(dressed_photon(s.label, s.nu_tilde), parity_sign(s.nu_tilde));
    case StateKind::DressedPhoton:
        if (s.label < 0) return std::make_pair(single_particle(0, 0), 1);
        return std::make_pair(single_particle(s.label, s.nu), parity_sign(s.nu));
    case StateKind::SiteResolved: {
        if (p.n_molecules != 1) throw std::invalid_argument("apply_symmetry: site-resolved basis needs N = 1");
        if (s.excitations() != 1) return std::nullopt;
        BasisState t = s;
        if (s.photon == 1) {
            t.photon = 0;
            t.excited_site = 0;
        } else {
            t.photon = 1;
            t.excited_site = -1;
        }
        return std::make_pair(t, parity_sign(s.vib[0]));
    }
    default: return std::nullopt;
    }
}

}  // namespace

Eigen::MatrixXd symmetry_matrix(const Basis& basis, const ModelParams& p)
{
    const Eigen::Index d = Eigen::Index(basis.dimension());
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        auto q = partner(basis[i], p);
        if (!q) continue;
        auto j = basis.index_of(q->first);
        if (!j) continue;
        s(Eigen::Index(*j), i) = q->second;
    }
    return s;
}

Eigen::VectorXd apply_symmetry(const Eigen::VectorXd& v, const Basis& basis, const ModelParams& p)
{
    if (v.size() != Eigen::Index(basis.dimension())) throw std::invalid_argument("apply_symmetry: size mismatch");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (v(i) == 0.0) continue;
        if (basis[i].excitations() != 1)
            throw std::invalid_argument("apply_symmetry: component outside the one-excitation manifold");
        auto q = partner(basis[i], p);
        if (!q) continue;
        auto j = basis.index_of(q->first);
        if (!j) continue;
        out(Eigen::Index(*j)) += q->second * v(i);
    }
    return out;
}

ParityLabel parity_of(const Eigen::VectorXd& v, const Basis& basis, const ModelParams& p)
{
    const double n2 = v.squaredNorm();
    ParityLabel out;
    if (n2 == 0.0) {
        out.mixing = 0.5;
        return out;
    }
    const double s = v.dot(apply_symmetry(v, basis, p)) / n2;
    if (std::abs(s) > 1.0 - tol_parity) {
        out.value = s > 0 ? 1 : -1;
        out.mixing = 0.0;
    } else {
        out.mixing = 0.5 * (1.0 - std::abs(s));
    }
    return out;
}

CommutatorReport commutator_residual(const ModelParams& p, int interior)
{
    CommutatorReport r;
    const int nw = p.nu_max + 8;
    r.nu_work = nw;
    r.interior = interior < 0 ? p.nu_max / 2 : interior;
    const int n = nw + 1;
    const double lam = p.lambda();

    // F(m, n) = <m|D^dagger(lambda)|n> = <m|n~>; every block of S is built from
    // exact matrix elements, so only the displaced-oscillator completeness is
    // truncated.
    const Eigen::MatrixXd f = franck_condon_table(nw, nw, lam);
    Eigen::VectorXd par(n);
    for (int k = 0; k < n; ++k) par(k) = parity_sign(k);

    // Ordering: [g nu 1_c]_{nu=0..nw}, [e nu 0_c]_{nu=0..nw} with Fock vibrations.
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    // e -> g: D_e^dagger(-lambda) Pi_e = D(lambda) D^dagger(lambda) Pi D(lambda) = Pi D(lambda)
    s.block(0, n, n, n) = par.asDiagonal() * f.transpose();
    // g -> e: D_g^dagger(lambda) Pi_g
    s.block(n, 0, n, n) = f * par.asDiagonal();

    Eigen::MatrixXd hlm = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    hlm.block(0, n, n, n) = 0.5 * p.rabi_single * Eigen::MatrixXd::Identity(n, n);
    hlm.block(n, 0, n, n) = 0.5 * p.rabi_single * Eigen::MatrixXd::Identity(n, n);

    // Excited potential in the undisplaced Fock basis: D^dagger b^dagger b D = (b^dagger + lambda)(b + lambda).
    Eigen::MatrixXd h = hlm;
    const double offset = p.omega_00 - cavity_frequency(0.0, p);
    for (int k = 0; k < n; ++k) {
        h(k, k) = p.omega_v * k;
        h(n + k, n + k) = offset + p.omega_v * (k + lam * lam);
        if (k + 1 < n) {
            const double off = p.omega_v * lam * std::sqrt(double(k + 1));
            h(n + k, n + k + 1) = off;
            h(n + k + 1, n + k) = off;
        }
    }

    auto interior_max = [&](const Eigen::MatrixXd& m) {
        double best = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                best = std::max(best, m.block(a * n, b * n, r.interior + 1, r.interior + 1).cwiseAbs().maxCoeff());
        return best;
    };
    r.light_matter = interior_max(hlm * s - s * hlm);
    r.full = interior_max(h * s - s * h);
    const Eigen::MatrixXd s2 = s * s - Eigen::MatrixXd::Identity(2 * n, 2 * n);
    r.unitarity_interior = interior_max(s2);
    r.unitarity_boundary = s2.cwiseAbs().maxCoeff();
    return r;
}

DiabaticBasis diabatic_transform(const Basis& basis, const ModelParams& p)
{
    if (p.n_molecules != 1) throw std::invalid_argument("diabatic_transform: N = 1 only");
    const Eigen::Index d = Eigen::Index(basis.dimension());
    DiabaticBasis out;
    out.u = Eigen::MatrixXd::Zero(d, d);
    Eigen::Index col = 0;
    const double r = 1.0 / std::sqrt(2.0);
    for (Eigen::Index i = 0; i < d; ++i) {
        const BasisState& s = basis[i];
        if (s.excitations() != 1) {
            out.u(i, col++) = 1.0;
            out.labels.push_back({});
            out.nu.push_back(s.vib_quanta());
            out.sign.push_back(0);
            continue;
        }
        const bool material = s.electronic_excitation();
        if (!material) continue;
        auto q = partner(s, p);
        auto j = q ? basis.index_of(q->first) : std::nullopt;
        if (!j) throw std::invalid_argument("diabatic_transform: unpaired state " + s.describe());
        const int nu = s.vib_quanta();
        for (int sg : {1, -1}) {
            out.u(i, col) = r;
            out.u(Eigen::Index(*j), col) = sg * r;
            ParityLabel l;
            l.value = sg * parity_sign(nu);
            out.labels.push_back(l);
            out.nu.push_back(nu);
            out.sign.push_back(sg);
            ++col;
        }
    }
    if (col != d) throw std::logic_error("diabatic_transform: column count mismatch");
    return out;
}

double resonant_block_check(const Eigen::MatrixXd& h, const std::vector<ParityLabel>& labels)
{
    if (Eigen::Index(labels.size()) != h.rows() || h.rows() != h.cols())
        throw std::invalid_argument("resonant_block_check: label list length mismatch");
    double best = 0.0;
    for (Eigen::Index i = 0; i < h.rows(); ++i)
        for (Eigen::Index j = 0; j < h.cols(); ++j) {
            const int a = labels[i].value, b = labels[j].value;
            if (a != 0 && b != 0 && a != b) best = std::max(best, std::abs(h(i, j)));
        }
    return best;
}

}  // namespace htc
