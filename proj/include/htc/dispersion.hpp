#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "htc/params.hpp"

namespace htc {

struct DispersionPoint {
    double k_par = 0.0;
    Eigen::VectorXd omega;          // indexed by branch id
    Eigen::VectorXd photon_weight;  // indexed by branch id
};

struct DispersionGrid {
    std::vector<DispersionPoint> points;
    std::vector<std::string> labels;  // per branch, assigned at the first grid point
    double visible_threshold = visible_photon_weight;

    int branches() const { return int(labels.size()); }
    bool visible(int point, int branch) const
    {
        return points[point].photon_weight(branch) >= visible_threshold;
    }
};

// One-excitation eigenvalues and photon weights per k. Branches are carried
// from one k to the next by eigenvector overlap. threads <= 1 runs serially.
DispersionGrid sweep_dispersion(const ModelParams& p, const std::vector<double>& k_grid, int threads = 1,
                                double visible_threshold = visible_photon_weight);

}  // namespace htc
