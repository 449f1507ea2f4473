#include "htc/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

#include "htc/franck_condon.hpp"

namespace htc {

double cavity_frequency(double k_par, const ModelParams& p)
{
    if (k_par < 0) throw std::invalid_argument("cavity_frequency: k_par must be >= 0");
    const double ck = p.dispersion_curvature * k_par;
    return (p.omega_00 - p.detuning) * std::sqrt(1.0 + ck * ck);
}

std::complex<double> coupling_element(const BasisState& bra, const BasisState& ket, const ModelParams& p)
{
    const bool bra_sym = bra.kind != StateKind::SiteResolved;
    const bool ket_sym = ket.kind != StateKind::SiteResolved;
    if (!bra_sym || !ket_sym) throw std::invalid_argument("coupling_element: symmetrized states only");

    const BasisState* ph = nullptr;
    const BasisState* mat = nullptr;
    if (bra.kind == StateKind::DressedPhoton) ph = &bra, mat = &ket;
    else if (ket.kind == StateKind::DressedPhoton) ph = &ket, mat = &bra;
    if (!ph || !mat->electronic_excitation()) return 0.0;

    const double lam = p.lambda();
    const double half = 0.5 * p.rabi_single;
    const double n = p.n_molecules;
    const int beta = ph->label < 0 ? 0 : ph->label;
    if (mat->label != beta) return 0.0;

    if (mat->kind == StateKind::SingleParticle) {
        if (ph->label < 0) return std::sqrt(n) * half * franck_condon(0, mat->nu_tilde, lam);
        return half * franck_condon(ph->nu, mat->nu_tilde, lam);
    }
    // Two-particle state: the photon-dressing quanta stay on the spectator site.
    if (ph->label < 0 || mat->nu != ph->nu) return 0.0;
    return std::sqrt(n - 1.0) * half * franck_condon(0, mat->nu_tilde, lam);
}

double HermitianMatrix::hermiticity_residual() const
{
    return (data - data.transpose()).cwiseAbs().maxCoeff();
}

namespace {

HermitianMatrix layout(const Basis& basis, const ModelParams& p)
{
    const Eigen::Index d = Eigen::Index(basis.dimension());
    HermitianMatrix h;
    h.data = Eigen::MatrixXd::Zero(d, d);
    h.photon = Eigen::VectorXd::Zero(d);
    h.excitations = Eigen::VectorXi::Zero(d);
    h.sector = Eigen::VectorXi::Constant(d, -1);
    h.a_ground = Eigen::VectorXd::Zero(d);
    h.mu_ground = Eigen::VectorXd::Zero(d);
    const double lam = p.lambda();
    for (Eigen::Index i = 0; i < d; ++i) {
        const BasisState& s = basis[i];
        h.photon(i) = s.photon;
        h.excitations(i) = s.excitations();
        if (s.kind == StateKind::SiteResolved) {
            const bool vib_free = std::all_of(s.vib.begin(), s.vib.end(), [&](int v) { return v == 0; });
            if (s.photon == 1 && s.excited_site < 0 && vib_free) h.a_ground(i) = 1.0;
            if (s.excited_site >= 0) {
                bool others_free = true;
                for (int m = 0; m < int(s.vib.size()); ++m)
                    if (m != s.excited_site && s.vib[m] != 0) others_free = false;
                if (others_free) h.mu_ground(i) = franck_condon(0, s.vib[s.excited_site], lam);
            }
        } else {
            h.sector(i) = s.label < 0 ? 0 : s.label;
            if (s.kind == StateKind::DressedPhoton && s.label < 0) h.a_ground(i) = 1.0;
            if (s.kind == StateKind::SingleParticle && s.label == 0)
                h.mu_ground(i) = std::sqrt(double(p.n_molecules)) * franck_condon(0, s.nu_tilde, lam);
        }
    }
    return h;
}

void fill_light_matter(HermitianMatrix& h, const Basis& basis, const ModelParams& p)
{
    const Eigen::Index d = h.dimension();
    if (basis.kind() == BasisKind::symmetrized) {
        for (Eigen::Index i = 0; i < d; ++i) {
            if (basis[i].kind != StateKind::DressedPhoton) continue;
            for (Eigen::Index j = 0; j < d; ++j) {
                if (!basis[j].electronic_excitation()) continue;
                const double v = coupling_element(basis[i], basis[j], p).real();
                h.data(i, j) = v;
                h.data(j, i) = v;
            }
        }
        return;
    }
    const double half = 0.5 * p.rabi_single;
    const Eigen::MatrixXd fc = franck_condon_table(p.nu_max, p.nu_max, p.lambda());
    for (Eigen::Index i = 0; i < d; ++i) {
        const BasisState& s = basis[i];
        if (s.photon != 1) continue;
        for (int site = 0; site < p.n_molecules; ++site) {
            BasisState t = s;
            t.photon = 0;
            t.excited_site = site;
            for (int vt = 0; vt <= p.nu_max; ++vt) {
                t.vib[site] = vt;
                auto j = basis.index_of(t);
                if (!j) continue;
                const double v = half * fc(s.vib[site], vt);
                h.data(i, Eigen::Index(*j)) = v;
                h.data(Eigen::Index(*j), i) = v;
            }
        }
    }
}

}  // namespace

HermitianMatrix assemble_light_matter(const Basis& basis, const ModelParams& p)
{
    HermitianMatrix h = layout(basis, p);
    fill_light_matter(h, basis, p);
    return h;
}

HermitianMatrix assemble_htc(const Basis& basis, const ModelParams& p, double k_par)
{
    p.validate();
    HermitianMatrix h = assemble_light_matter(basis, p);
    h.k_par = k_par;
    const double offset = p.omega_00 - cavity_frequency(k_par, p);
    for (Eigen::Index i = 0; i < h.dimension(); ++i) {
        const BasisState& s = basis[i];
        double e = p.omega_v * s.vib_quanta();
        if (s.electronic_excitation()) e += offset;
        h.data(i, i) = e;
    }
    return h;
}

std::vector<std::vector<int>> coupling_blocks(const Eigen::MatrixXd& m)
{
    const int d = int(m.rows());
    std::vector<int> parent(d);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < j; ++i)
            if (m(i, j) != 0.0 || m(j, i) != 0.0) {
                int a = find(i), b = find(j);
                if (a != b) parent[std::max(a, b)] = std::min(a, b);
            }
    std::vector<std::vector<int>> blocks;
    std::vector<int> slot(d, -1);
    for (int i = 0; i < d; ++i) {
        int r = find(i);
        if (slot[r] < 0) {
            slot[r] = int(blocks.size());
            blocks.emplace_back();
        }
        blocks[slot[r]].push_back(i);
    }
    return blocks;
}

EigenSystem diagonalize(const HermitianMatrix& h, double tol)
{
    const Eigen::Index d = h.dimension();
    if (h.data.cols() != d) throw std::invalid_argument("diagonalize: matrix not square");

    struct Entry {
        double value;
        int block;
        Eigen::VectorXd vec;
    };
    std::vector<Entry> entries;
    entries.reserve(d);
    const auto blocks = coupling_blocks(h.data);
    for (int b = 0; b < int(blocks.size()); ++b) {
        const auto& idx = blocks[b];
        const Eigen::Index n = Eigen::Index(idx.size());
        Eigen::MatrixXd sub(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) sub(i, j) = h.data(idx[i], idx[j]);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub);
        if (es.info() != Eigen::Success)
            throw std::runtime_error("eigensolver failed on block of size " + std::to_string(n) +
                                     ", max|H| = " + std::to_string(sub.cwiseAbs().maxCoeff()));
        for (Eigen::Index k = 0; k < n; ++k) {
            Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
            Eigen::Index arg = 0;
            es.eigenvectors().col(k).cwiseAbs().maxCoeff(&arg);
            const double sgn = es.eigenvectors()(arg, k) < 0 ? -1.0 : 1.0;
            for (Eigen::Index i = 0; i < n; ++i) v(idx[i]) = sgn * es.eigenvectors()(i, k);
            entries.push_back({es.eigenvalues()(k), b, std::move(v)});
        }
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const Entry& a, const Entry& b) { return a.value < b.value; });

    EigenSystem e;
    e.values.resize(d);
    e.vectors.resize(d, d);
    e.block.resize(d);
    for (Eigen::Index j = 0; j < d; ++j) {
        e.values(j) = entries[j].value;
        e.vectors.col(j) = entries[j].vec;
        e.block(j) = entries[j].block;
    }
    e.photon_weight = e.vectors.cwiseAbs2().transpose() * h.photon;
    e.a_ground = e.vectors.transpose() * h.a_ground;
    e.mu_ground = e.vectors.transpose() * h.mu_ground;

    e.excitations.resize(d);
    e.sector.resize(d);
    for (Eigen::Index j = 0; j < d; ++j) {
        const auto& idx = blocks[e.block(j)];
        e.excitations(j) = h.excitations(idx.front());
        int sec = h.sector(idx.front());
        for (int i : idx)
            if (h.sector(i) != sec) sec = -1;
        e.sector(j) = sec;
    }

    const double scale = std::max(1.0, d > 0 ? e.values.cwiseAbs().maxCoeff() : 0.0);
    // Degeneracy is only meaningful within one excitation manifold.
    e.group.resize(d);
    std::map<int, std::pair<int, double>> open;  // excitations -> (group, last value)
    for (Eigen::Index j = 0; j < d; ++j) {
        auto it = open.find(e.excitations(j));
        if (it == open.end() || e.values(j) - it->second.second > tol * scale) {
            e.groups.push_back({e.values(j), {}});
            it = open.insert_or_assign(e.excitations(j), std::make_pair(int(e.groups.size()) - 1, 0.0)).first;
        }
        it->second.second = e.values(j);
        e.groups[it->second.first].members.push_back(int(j));
        e.group(j) = it->second.first;
    }
    for (auto& g : e.groups) {
        double s = 0;
        for (int m : g.members) s += e.values(m);
        g.value = s / double(g.members.size());
    }
    return e;
}

}  // namespace htc
