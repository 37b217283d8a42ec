#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "chainshadow/covering.hpp"
#include "chainshadow/geometry.hpp"

namespace chainshadow {

struct DropDirective {
    std::string label;
    Vec eta;  // unit coordinates of the dropped block; empty => zeros
};

// Alternating sequence hset, map, hset, ... with drop directives attached
// to the preceding h-set. ybar anchors the entry coordinates of the first
// set, xbar the (post-drop) exit coordinates of the last one.
struct ChainSpec {
    std::vector<std::variant<HSet, MapHandle, DropDirective>> elements;
    Vec ybar;  // empty => zeros
    Vec xbar;  // empty => zeros
    bool periodic = false;

    ChainSpec& add(HSet h) {
        elements.emplace_back(std::move(h));
        return *this;
    }
    ChainSpec& add(MapHandle m) {
        elements.emplace_back(std::move(m));
        return *this;
    }
    ChainSpec& drop(std::string label, Vec eta = {}) {
        elements.emplace_back(DropDirective{std::move(label), std::move(eta)});
        return *this;
    }
};

struct SolveOptions {
    double tol = 1e-10;
    int max_iter = 100;
    double fd_step = 1e-7;
    double interior_margin = kClassifyTol;
};

struct ChainSolution {
    bool converged = false;
    bool interior = false;
    Vec q0;
    std::vector<Vec> itinerary;  // real coordinates, one point per set
    double residual = 0.0;
    std::vector<PointClassification> memberships;
    int iterations = 0;
    bool linear_solve = false;
    std::string diagnostic;
};

struct EndpointCheck {
    bool nonsingular = false;
    double abs_det = 0.0;
};

// Normalized view of a chain used by the solver and checks.
struct ChainView {
    struct SetInfo {
        HSet original;   // tags as written (structure on arrival)
        HSet effective;  // tags after the drops attached to this set
        std::vector<std::pair<int, Vec>> drops;  // (block index, eta)
    };
    std::vector<SetInfo> sets;
    std::vector<MapHandle> maps;
    int total_dim = 0;

    static ChainView build(const ChainSpec& spec);
};

ChainSolution solve_chain(const ChainSpec& spec, const SolveOptions& opts = {});

// Builds the homotopy-endpoint linear system (A_i exit blocks, zero entry
// images, zero anchors) and reports |det|.
EndpointCheck endpoint_nonsingularity(const ChainSpec& spec);

// Recomputes the orbit from q0 by forward evaluation and classifies it
// against each set. Forward evaluation compounds the expansion rates, so
// for strongly hyperbolic chains prefer the itinerary memberships that
// solve_chain reports.
std::vector<PointClassification> verify_shadowing(const ChainSpec& spec,
                                                  const ChainSolution& sol,
                                                  double margin = kClassifyTol);

// Certify every link of the chain: exact checker when the map is affine,
// sampled otherwise.
std::vector<CoveringCertificate> certify_chain(const ChainSpec& spec,
                                               const SampleOptions& opts = {});

// Declarative text format. Map records may reference registered builders
// ("map <kind> <args...>") besides affine literals.
using MapBuilder = std::function<MapHandle(const std::vector<std::string>&)>;

struct ChainParseContext {
    // kind -> builder taking the remaining tokens of the map line
    std::vector<std::pair<std::string, MapBuilder>> builders;
    void register_builder(std::string kind, MapBuilder b) {
        builders.emplace_back(std::move(kind), std::move(b));
    }
};

ChainSpec parse_chain(std::istream& in, const ChainParseContext& ctx = {});
ChainSpec parse_chain_file(const std::string& path, const ChainParseContext& ctx = {});

}  // namespace chainshadow
