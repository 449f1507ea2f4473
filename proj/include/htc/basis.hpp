#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "htc/params.hpp"

namespace htc {

enum class StateKind {
    AbsoluteGround,
    GroundVib,
    DressedPhoton,
    SingleParticle,
    TwoParticle,
    SiteResolved,
};

const char* to_string(StateKind k);

// One configuration label. Which fields are meaningful depends on kind:
//   GroundVib       label = beta, nu
//   DressedPhoton   label = beta (-1 for the bare photon), nu, photon = 1
//   SingleParticle  label = alpha, nu_tilde
//   TwoParticle     label = beta, nu_tilde (excited site), nu >= 1 (other site)
//   SiteResolved    excited_site (-1 if none), vib per site, photon
// Label 0 is the totally symmetric permutation label.
struct BasisState {
    StateKind kind = StateKind::AbsoluteGround;
    int label = -1;
    int nu_tilde = 0;
    int nu = 0;
    int photon = 0;
    int excited_site = -1;
    std::vector<int> vib;

    auto operator<=>(const BasisState&) const = default;
    bool operator==(const BasisState&) const = default;

    bool electronic_excitation() const;
    int excitations() const { return photon + (electronic_excitation() ? 1 : 0); }
    int vib_quanta() const;
    std::string describe() const;
};

BasisState absolute_ground();
BasisState ground_vib(int beta, int nu);
BasisState bare_photon();
BasisState dressed_photon(int beta, int nu);
BasisState single_particle(int alpha, int nu_tilde);
BasisState two_particle(int beta, int nu_tilde, int nu);
BasisState site_resolved(int excited_site, std::vector<int> vib, int photon);

enum class BasisKind { symmetrized, site_resolved };

class Basis {
public:
    Basis(BasisKind kind, std::vector<BasisState> states);

    BasisKind kind() const { return kind_; }
    std::size_t dimension() const { return states_.size(); }
    const BasisState& operator[](std::size_t i) const { return states_[i]; }
    const std::vector<BasisState>& states() const { return states_; }
    std::optional<std::size_t> index_of(const BasisState& s) const;
    std::size_t count(StateKind k) const;

private:
    BasisKind kind_;
    std::vector<BasisState> states_;
    std::map<BasisState, std::size_t> index_;
};

// One-excitation manifold in the permutation-symmetrized representation.
Basis build_symmetric_basis(const ModelParams& p);

// Site-resolved states with photon + electronic excitation <= 1, including the
// ground manifold. The excited site carries displaced-potential quanta.
Basis build_full_basis(const ModelParams& p);

// Final states for emission: |G> plus vibrationally excited ground states with
// 1 <= total quanta <= ground_nu_total_max.
std::vector<BasisState> enumerate_ground_manifold(const ModelParams& p, BasisKind kind);

std::size_t symmetric_dimension(const ModelParams& p);
std::size_t full_dimension(const ModelParams& p);

}  // namespace htc
