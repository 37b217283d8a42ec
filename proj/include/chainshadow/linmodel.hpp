#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chainshadow/chain.hpp"
#include "chainshadow/covering.hpp"
#include "chainshadow/geometry.hpp"

namespace chainshadow {

class Config;

namespace linmodel {

// Chain of n+1 fixed points p_i = (1,...,1,0,...,0) in R^n, linear local
// maps, translations along the connecting segments. Around p_i the
// coordinates split into past (x_1..x_{i-1}), incoming (x_i), outgoing
// (x_{i+1}) and future (x_{i+2}..x_n) directions.
struct LinearModelConfig {
    int n = 4;
    std::vector<double> mu;        // |mu_i| < 1, incoming contraction
    std::vector<double> lambda;    // |lambda_i| > 1, outgoing expansion
    std::vector<double> mu_p;      // past contraction bound, in (0,1)
    std::vector<double> lambda_f;  // future expansion bound, > 1
    double eps = 0.1;
    double sigma = 0.05;  // 0 < sigma < eps
    double eta = 0.5;     // in (0,1)

    // Optional general matrices for the past/future blocks at index i,
    // replacing mu_p*I / lambda_f*I. Must satisfy the norm bounds.
    std::vector<std::optional<Mat>> past_matrix;
    std::vector<std::optional<Mat>> future_matrix;

    void validate() const;
    static LinearModelConfig desk();
    static LinearModelConfig from_config(const Config& cfg);

    double mu_at(int i) const { return mu.size() == 1 ? mu[0] : mu.at(i); }
    double lambda_at(int i) const { return lambda.size() == 1 ? lambda[0] : lambda.at(i); }
    double mu_p_at(int i) const { return mu_p.size() == 1 ? mu_p[0] : mu_p.at(i); }
    double lambda_f_at(int i) const { return lambda_f.size() == 1 ? lambda_f[0] : lambda_f.at(i); }
};

struct LinearModelInstance {
    LinearModelConfig cfg;
    std::vector<Vec> fixed_points;      // p_0..p_n
    std::vector<MapHandle> local;       // f_i, i = 0..n
    std::vector<MapHandle> transition;  // f_{i,i+1}, i = 0..n-1
    std::vector<int> iterates;          // k_i, i = 0..n-1
};

LinearModelInstance build_model(const LinearModelConfig& cfg);

// Smallest integer strictly above the four closed-form bounds (bounds for
// empty blocks are skipped).
int min_iterates(const LinearModelConfig& cfg, int i);
std::vector<double> iterate_bounds(const LinearModelConfig& cfg, int i);

struct ChartSets {
    HSet inc;          // N_i^inc
    HSet out;          // N_i^out
    HSet out_dropped;  // N_i^out with the outgoing block retagged
};
ChartSets build_hsets(const LinearModelConfig& cfg, int i);

struct LinkCertificate {
    int index;
    std::string kind;  // "local" or "transition"
    CoveringCertificate cert;
};
std::vector<LinkCertificate> verify_model(const LinearModelConfig& cfg,
                                          const std::vector<int>* iterates = nullptr);

ChainSpec shadow_chain(const LinearModelConfig& cfg, const std::vector<int>* iterates = nullptr);

struct ShadowOrbit {
    ChainSolution solution;
    std::vector<long> visit_index;     // composite iterate count at each p_i visit
    std::vector<double> visit_distance;  // max-norm distance to p_i
};
ShadowOrbit shadow_orbit(const LinearModelConfig& cfg, const std::vector<int>* iterates = nullptr);

}  // namespace linmodel
}  // namespace chainshadow
