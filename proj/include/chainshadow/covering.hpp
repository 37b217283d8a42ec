#pragma once

#include <functional>
#include <optional>
#include <string>

#include "chainshadow/geometry.hpp"

namespace chainshadow {

struct AffineMap {
    Mat matrix;
    Vec offset;

    Vec operator()(const Vec& x) const { return matrix * x + offset; }
    AffineMap inverse() const;
    AffineMap compose(const AffineMap& inner) const;  // this ∘ inner
    AffineMap power(int k) const;
};

// A map between phase spaces, with whatever extra structure the caller can
// supply: exact affine form, inverse, exit-block linearization for the
// homotopy endpoint (unit coordinates of the covering it certifies).
struct MapHandle {
    int dim_in = 0;
    int dim_out = 0;
    std::function<Vec(const Vec&)> evaluator;
    std::optional<AffineMap> affine;
    std::function<Vec(const Vec&)> inverse;
    std::optional<Mat> exit_linearization;
    std::string name = "map";

    Vec operator()(const Vec& x) const { return evaluator(x); }
    bool has_inverse() const { return static_cast<bool>(inverse); }

    static MapHandle from_affine(AffineMap a, std::string name = "affine");
};

enum class CertificateMode { ExactAffine, Sampled };

struct CoveringCertificate {
    CertificateMode mode = CertificateMode::ExactAffine;
    bool pass = false;
    // min distance by which exit-boundary images clear the target support
    // (unit exit coordinates); +inf when u = 0.
    double exit_margin = 0.0;
    // min distance by which all images clear the target entry boundary;
    // +inf when s = 0.
    double entry_margin = 0.0;
    std::optional<int> degree;
    long sample_count = 0;
    std::optional<Vec> counterexample;  // source point, real coordinates
    std::string note;

    bool rigorous() const { return mode == CertificateMode::ExactAffine; }
};

// Unit-coordinate affine representation c_M ∘ f ∘ c_N^{-1} of an affine map.
struct UnitAffine {
    Mat matrix;
    Vec offset;
};
UnitAffine unit_affine(const HSet& N, const AffineMap& f, const HSet& M);

// Rigorous check of the covering relation via a straight-line homotopy from
// f_c to the linear endpoint (A p, 0), A = exit block of the unit map.
// Margins are deflated by 1e-10 against floating-point rounding.
CoveringCertificate check_covering_affine(const HSet& N, const MapHandle& f, const HSet& M);

struct SampleOptions {
    int grid_density = 3;       // interior samples per block axis
    int extra_random = 0;       // additional random exit-boundary points
    std::uint64_t seed = 12345;
    int threads = 1;
};

// Non-rigorous boundary-sample evidence for a covering, marked as such.
CoveringCertificate check_covering_sampled(const HSet& N, const MapHandle& f, const HSet& M,
                                           const SampleOptions& opts = {});

// N g-backcovers M  <=>  M^T f^{-1}-covers N^T.
CoveringCertificate check_backcovering(const HSet& N, const MapHandle& f, const HSet& M,
                                       const SampleOptions& opts = {});

std::string certificate_report(const CoveringCertificate& c, const std::string& name);

}  // namespace chainshadow
