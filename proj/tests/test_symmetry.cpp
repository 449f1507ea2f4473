#include <doctest.h>

#include <cmath>
#include <random>

#include "htc/spectra.hpp"
#include "htc/symmetry.hpp"

using namespace htc;

namespace {

ModelParams single(double rabi, int nu = 6)
{
    ModelParams p;
    p.nu_max = nu;
    p.rabi_single = rabi;
    p.particle_level = ParticleLevel::one;
    return p;
}

}  // namespace

TEST_SUITE("symmetry") {

TEST_CASE("diabatic polaritons are eigenvectors of S")
{
    const ModelParams p = single(1.0);
    const Basis b = build_symmetric_basis(p);
    const DiabaticBasis db = diabatic_transform(b, p);
    for (Eigen::Index k = 0; k < db.u.cols(); ++k) {
        if (db.nu[k] > p.nu_max - 2) continue;
        const Eigen::VectorXd v = db.u.col(k);
        const Eigen::VectorXd sv = apply_symmetry(v, b, p);
        CHECK((sv - db.labels[k].value * v).cwiseAbs().maxCoeff() < 1e-14);
        const int expect = db.sign[k] * (db.nu[k] % 2 ? -1 : 1);
        CHECK(db.labels[k].value == expect);
    }
    auto find = [&](int nu, int sign) {
        for (Eigen::Index k = 0; k < db.u.cols(); ++k)
            if (db.nu[k] == nu && db.sign[k] == sign) return k;
        return Eigen::Index(-1);
    };
    CHECK(parity_of(db.u.col(find(0, 1)), b, p).value == 1);
    CHECK(parity_of(db.u.col(find(0, -1)), b, p).value == -1);
    CHECK(parity_of(db.u.col(find(1, -1)), b, p).value == 1);
}

TEST_CASE("S is unitary and an involution")
{
    const ModelParams p = single(1.3);
    const Basis b = build_symmetric_basis(p);
    std::mt19937 rng(7);
    std::normal_distribution<double> g;
    for (int i = 0; i < 100; ++i) {
        Eigen::VectorXd v(Eigen::Index(b.dimension()));
        for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = g(rng);
        const Eigen::VectorXd sv = apply_symmetry(v, b, p);
        CHECK(std::abs(sv.norm() / v.norm() - 1.0) < 1e-12);
        CHECK((apply_symmetry(sv, b, p) - v).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("polariton parity at resonance")
{
    const ModelParams p = single(1.68);
    const SpectralModel m = build_spectral_model(p);
    const Basis b = build_symmetric_basis(p);
    CHECK(parity_of(m.eig.vectors.col(find_lower_polariton(m)), b, p).value == -1);
    CHECK(parity_of(m.eig.vectors.col(find_upper_polariton(m)), b, p).value == 1);
    for (Eigen::Index j = 0; j < m.eig.size(); ++j)
        if (m.eig.degeneracy(j) == 1) CHECK(parity_of(m.eig.vectors.col(j), b, p).mixing < 1e-8);
}

TEST_CASE("detuning mixes parities")
{
    ModelParams p = single(1.68);
    p.detuning = 0.3;
    const SpectralModel m = build_spectral_model(p);
    const ParityLabel l = parity_of(m.eig.vectors.col(find_lower_polariton(m)), build_symmetric_basis(p), p);
    CHECK(l.mixed());
    CHECK(l.mixing > 0.0);
}

TEST_CASE("many-body sectors without vibronic coupling")
{
    ModelParams p;
    p.n_molecules = 3;
    p.nu_max = 0;
    p.huang_rhys = 0.0;
    p.rabi_single = 2.0 / std::sqrt(3.0);
    p.particle_level = ParticleLevel::one;
    const Basis b = build_symmetric_basis(p);
    const SpectralModel m = build_spectral_model(p);
    CHECK(parity_of(m.eig.vectors.col(find_lower_polariton(m)), b, p).value == -1);
    CHECK(parity_of(m.eig.vectors.col(find_upper_polariton(m)), b, p).value == 1);
}

TEST_CASE("commutators")
{
    ModelParams p = single(1.68, 12);
    const CommutatorReport r = commutator_residual(p);
    CHECK(r.interior == 6);
    CHECK(r.nu_work == 20);
    CHECK(r.light_matter < 1e-10);
    CHECK(r.full < 1e-10);
    CHECK(r.unitarity_boundary > r.unitarity_interior);
    // Completeness of the displaced levels within the working space limits S^2 = 1.
    CHECK(commutator_residual(p, 4).unitarity_interior < 1e-10);

    p.detuning = 0.3;
    const CommutatorReport d = commutator_residual(p);
    CHECK(d.full > 1e-2);
    CHECK(d.light_matter < 1e-10);

    p.rabi_single = 0.0;
    CHECK(commutator_residual(p).light_matter == 0.0);
}

TEST_CASE("block structure of the resonant single-emitter Hamiltonian")
{
    auto check = [](double detuning, double rabi) {
        ModelParams p = single(rabi, 2);
        p.detuning = detuning;
        const Basis b = build_symmetric_basis(p);
        const DiabaticBasis db = diabatic_transform(b, p);
        const Eigen::MatrixXd h = db.u.transpose() * assemble_htc(b, p).data * db.u;
        return resonant_block_check(h, db.labels);
    };
    CHECK(check(0.0, 1.68) < 1e-15);
    CHECK(check(0.0, 0.0) == 0.0);
    const double a = check(0.1, 1.68), c = check(0.2, 1.68);
    CHECK(a > 0.0);
    CHECK(c / a == doctest::Approx(2.0).epsilon(1e-10));
    CHECK_THROWS_AS(resonant_block_check(Eigen::MatrixXd::Zero(2, 2), {ParityLabel{}}), std::invalid_argument);
}

}
