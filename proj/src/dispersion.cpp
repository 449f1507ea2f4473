#include "htc/dispersion.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "htc/spectra.hpp"

namespace htc {

namespace {

struct Slice {
    Eigen::VectorXd omega;
    Eigen::VectorXd photon;
    Eigen::MatrixXd vectors;
};

Slice slice_of(const EigenSystem& e)
{
    std::vector<int> keep;
    for (Eigen::Index j = 0; j < e.size(); ++j)
        if (e.excitations(j) == 1) keep.push_back(int(j));
    Slice s;
    s.omega.resize(Eigen::Index(keep.size()));
    s.photon.resize(Eigen::Index(keep.size()));
    s.vectors.resize(e.vectors.rows(), Eigen::Index(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) {
        s.omega(Eigen::Index(i)) = e.values(keep[i]);
        s.photon(Eigen::Index(i)) = e.photon_weight(keep[i]);
        s.vectors.col(Eigen::Index(i)) = e.vectors.col(keep[i]);
    }
    return s;
}

// perm[b] = column of next carrying branch b; greedy on descending overlap,
// leftovers paired in energy order.
std::vector<int> match(const Slice& prev, const std::vector<int>& prev_perm, const Slice& next)
{
    const int n = int(next.omega.size());
    Eigen::MatrixXd ov = (prev.vectors.transpose() * next.vectors).cwiseAbs();
    std::vector<std::tuple<double, int, int>> pairs;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (ov(i, j) > 1e-3) pairs.emplace_back(-ov(i, j), i, j);
    std::sort(pairs.begin(), pairs.end());
    std::vector<int> col_of_prev(n, -1);
    std::vector<char> used(n, 0);
    for (const auto& [neg, i, j] : pairs) {
        if (col_of_prev[i] >= 0 || used[j]) continue;
        col_of_prev[i] = j;
        used[j] = 1;
    }
    std::vector<int> free_cols;
    for (int j = 0; j < n; ++j)
        if (!used[j]) free_cols.push_back(j);
    std::size_t f = 0;
    for (int i = 0; i < n; ++i)
        if (col_of_prev[i] < 0) col_of_prev[i] = free_cols[f++];
    std::vector<int> perm(n);
    for (int b = 0; b < n; ++b) perm[b] = col_of_prev[prev_perm[b]];
    return perm;
}

}  // namespace

DispersionGrid sweep_dispersion(const ModelParams& p, const std::vector<double>& k_grid, int threads,
                                double visible_threshold)
{
    p.validate();
    if (k_grid.empty()) throw std::invalid_argument("sweep_dispersion: empty k grid");
    for (std::size_t i = 0; i < k_grid.size(); ++i) {
        if (k_grid[i] < 0) throw std::invalid_argument("sweep_dispersion: negative k_par");
        if (i > 0 && !(k_grid[i] > k_grid[i - 1]))
            throw std::invalid_argument("sweep_dispersion: k grid must be strictly increasing");
    }
    const bool full = p.particle_level == ParticleLevel::full;
    const Basis basis = full ? build_full_basis(p) : build_symmetric_basis(p);

    DispersionGrid out;
    out.visible_threshold = visible_threshold;
    out.points.resize(k_grid.size());

    const SpectralModel m0 =
        make_spectral_model(basis, diagonalize(assemble_htc(basis, p, k_grid[0])),
                            enumerate_ground_manifold(p, basis.kind()), p);
    const std::vector<std::string> all_labels = label_states(m0);
    for (int j : m0.polaritons) out.labels.push_back(all_labels[j]);

    Slice prev = slice_of(m0.eig);
    std::vector<int> perm(prev.omega.size());
    std::iota(perm.begin(), perm.end(), 0);
    auto store = [&](std::size_t i, const Slice& s) {
        DispersionPoint& pt = out.points[i];
        pt.k_par = k_grid[i];
        pt.omega.resize(s.omega.size());
        pt.photon_weight.resize(s.omega.size());
        for (std::size_t b = 0; b < perm.size(); ++b) {
            pt.omega(Eigen::Index(b)) = s.omega(perm[b]);
            pt.photon_weight(Eigen::Index(b)) = s.photon(perm[b]);
        }
    };
    store(0, prev);

    const std::size_t chunk = std::size_t(std::max(1, threads));
    std::vector<Slice> work(chunk);
    for (std::size_t start = 1; start < k_grid.size(); start += chunk) {
        const std::size_t stop = std::min(k_grid.size(), start + chunk);
        auto solve = [&](std::size_t i) { work[i - start] = slice_of(diagonalize(assemble_htc(basis, p, k_grid[i]))); };
        if (chunk == 1) {
            solve(start);
        } else {
            std::vector<std::thread> pool;
            for (std::size_t i = start; i < stop; ++i) pool.emplace_back(solve, i);
            for (auto& t : pool) t.join();
        }
        for (std::size_t i = start; i < stop; ++i) {
            Slice& s = work[i - start];
            perm = match(prev, perm, s);
            store(i, s);
            prev = std::move(s);
        }
    }
    return out;
}

}  // namespace htc
