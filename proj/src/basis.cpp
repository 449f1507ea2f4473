#include "htc/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace htc {

const char* to_string(StateKind k)
{
    switch (k) {
    case StateKind::AbsoluteGround: return "G";
    case StateKind::GroundVib: return "GV";
    case StateKind::DressedPhoton: return "PH";
    case StateKind::SingleParticle: return "SP";
    case StateKind::TwoParticle: return "TP";
    case StateKind::SiteResolved: return "SR";
    }
    return "?";
}

bool BasisState::electronic_excitation() const
{
    switch (kind) {
    case StateKind::SingleParticle:
    case StateKind::TwoParticle: return true;
    case StateKind::SiteResolved: return excited_site >= 0;
    default: return false;
    }
}

int BasisState::vib_quanta() const
{
    switch (kind) {
    case StateKind::SingleParticle: return nu_tilde;
    case StateKind::TwoParticle: return nu_tilde + nu;
    case StateKind::SiteResolved: return std::accumulate(vib.begin(), vib.end(), 0);
    default: return nu;
    }
}

std::string BasisState::describe() const
{
    std::ostringstream os;
    os << to_string(kind);
    switch (kind) {
    case StateKind::AbsoluteGround: break;
    case StateKind::GroundVib: os << "(b=" << label << ",v=" << nu << ")"; break;
    case StateKind::DressedPhoton:
        if (label < 0) os << "(bare)";
        else os << "(b=" << label << ",v=" << nu << ")";
        break;
    case StateKind::SingleParticle: os << "(a=" << label << ",vt=" << nu_tilde << ")"; break;
    case StateKind::TwoParticle: os << "(b=" << label << ",vt=" << nu_tilde << ",v=" << nu << ")"; break;
    case StateKind::SiteResolved:
        os << "(e=" << excited_site << ",ph=" << photon << ",vib=";
        for (std::size_t i = 0; i < vib.size(); ++i) os << (i ? "," : "") << vib[i];
        os << ")";
        break;
    }
    return os.str();
}

BasisState absolute_ground() { return {}; }

BasisState ground_vib(int beta, int nu)
{
    BasisState s;
    s.kind = StateKind::GroundVib;
    s.label = beta;
    s.nu = nu;
    return s;
}

BasisState bare_photon()
{
    BasisState s;
    s.kind = StateKind::DressedPhoton;
    s.photon = 1;
    return s;
}

BasisState dressed_photon(int beta, int nu)
{
    BasisState s = bare_photon();
    s.label = beta;
    s.nu = nu;
    return s;
}

BasisState single_particle(int alpha, int nu_tilde)
{
    BasisState s;
    s.kind = StateKind::SingleParticle;
    s.label = alpha;
    s.nu_tilde = nu_tilde;
    return s;
}

BasisState two_particle(int beta, int nu_tilde, int nu)
{
    BasisState s;
    s.kind = StateKind::TwoParticle;
    s.label = beta;
    s.nu_tilde = nu_tilde;
    s.nu = nu;
    return s;
}

BasisState site_resolved(int excited_site, std::vector<int> vib, int photon)
{
    BasisState s;
    s.kind = StateKind::SiteResolved;
    s.excited_site = excited_site;
    s.vib = std::move(vib);
    s.photon = photon;
    return s;
}

Basis::Basis(BasisKind kind, std::vector<BasisState> states) : kind_(kind), states_(std::move(states))
{
    std::sort(states_.begin(), states_.end());
    for (std::size_t i = 0; i < states_.size(); ++i) {
        if (!index_.emplace(states_[i], i).second)
            throw std::invalid_argument("duplicate basis state " + states_[i].describe());
    }
}

std::optional<std::size_t> Basis::index_of(const BasisState& s) const
{
    auto it = index_.find(s);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t Basis::count(StateKind k) const
{
    return std::count_if(states_.begin(), states_.end(), [k](const BasisState& s) { return s.kind == k; });
}

std::size_t symmetric_dimension(const ModelParams& p)
{
    const std::size_t n = p.n_molecules, v = p.nu_max;
    std::size_t d = 1 + n * v + n * (v + 1);
    if (p.particle_level == ParticleLevel::two && n > 1) d += n * (v + 1) * v;
    return d;
}

std::size_t full_dimension(const ModelParams& p)
{
    const double d = std::pow(double(p.nu_max + 1), p.n_molecules) * (2.0 + p.n_molecules);
    if (d > 1e18) return static_cast<std::size_t>(-1);
    return static_cast<std::size_t>(d);
}

namespace {

void check_cap(std::size_t dim, const ModelParams& p)
{
    if (dim > p.max_dimension)
        throw std::length_error("basis dimension " + std::to_string(dim) + " exceeds cap " +
                                std::to_string(p.max_dimension));
}

// Calls f(config) for every vector of n digits in [0, base), first digit slowest.
template <class F>
void for_each_config(int n, int base, F&& f)
{
    std::vector<int> c(n, 0);
    while (true) {
        f(c);
        int k = n - 1;
        while (k >= 0 && ++c[k] == base) c[k--] = 0;
        if (k < 0) break;
    }
}

}  // namespace

Basis build_symmetric_basis(const ModelParams& p)
{
    p.validate();
    if (p.particle_level == ParticleLevel::full)
        throw std::invalid_argument("build_symmetric_basis: particle_level must be one or two");
    check_cap(symmetric_dimension(p), p);

    const int n = p.n_molecules;
    std::vector<BasisState> st;
    st.push_back(bare_photon());
    for (int b = 0; b < n; ++b)
        for (int v = 1; v <= p.nu_max; ++v) st.push_back(dressed_photon(b, v));
    for (int a = 0; a < n; ++a)
        for (int t = 0; t <= p.nu_max; ++t) st.push_back(single_particle(a, t));
    if (p.particle_level == ParticleLevel::two && n > 1) {
        for (int b = 0; b < n; ++b)
            for (int t = 0; t <= p.nu_max; ++t)
                for (int v = 1; v <= p.nu_max; ++v) st.push_back(two_particle(b, t, v));
    }
    return Basis(BasisKind::symmetrized, std::move(st));
}

Basis build_full_basis(const ModelParams& p)
{
    p.validate();
    if (p.particle_level != ParticleLevel::full)
        throw std::invalid_argument("build_full_basis: particle_level must be full");
    check_cap(full_dimension(p), p);

    const int n = p.n_molecules;
    std::vector<BasisState> st;
    for_each_config(n, p.nu_max + 1, [&](const std::vector<int>& c) {
        st.push_back(site_resolved(-1, c, 0));
        st.push_back(site_resolved(-1, c, 1));
        for (int e = 0; e < n; ++e) st.push_back(site_resolved(e, c, 0));
    });
    return Basis(BasisKind::site_resolved, std::move(st));
}

std::vector<BasisState> enumerate_ground_manifold(const ModelParams& p, BasisKind kind)
{
    std::vector<BasisState> out;
    if (kind == BasisKind::symmetrized) {
        out.push_back(absolute_ground());
        for (int b = 0; b < p.n_molecules; ++b)
            for (int v = 1; v <= p.ground_nu_total_max; ++v) out.push_back(ground_vib(b, v));
    } else {
        for_each_config(p.n_molecules, p.nu_max + 1, [&](const std::vector<int>& c) {
            if (std::accumulate(c.begin(), c.end(), 0) <= p.ground_nu_total_max)
                out.push_back(site_resolved(-1, c, 0));
        });
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace htc
