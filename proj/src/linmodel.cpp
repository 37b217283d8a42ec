#include "chainshadow/linmodel.hpp"

#include <cmath>
#include <stdexcept>

#include "chainshadow/config.hpp"

namespace chainshadow::linmodel {

namespace {

// Block layout around p_i: past (dim i-1), inc (dim 1, coordinate x_i),
// out (dim 1, coordinate x_{i+1}), future (dim n-i-2+1). Empty blocks are
// omitted; blocks appear in coordinate order.
struct Split {
    int past = 0;  // count of past coords (i-1, clamped at 0)
    bool inc = false;
    bool out = false;
    int future = 0;
};

Split split_at(int n, int i) {
    Split s;
    s.past = std::max(0, i - 1);
    s.inc = i >= 1;
    s.out = i <= n - 1;
    s.future = std::max(0, n - i - 1);
    return s;
}

Vec fixed_point(int n, int i) {
    Vec p = Vec::Zero(n);
    for (int j = 0; j < i; ++j) p[j] = 1.0;
    return p;
}

void check_norm_bound(const Mat& A, double bound, bool is_lower, const std::string& what) {
    if (A.rows() != A.cols()) throw std::invalid_argument(what + ": matrix must be square");
    if (!is_lower) {
        // ||A z||_inf <= bound ||z||_inf  <=>  max row l1 norm <= bound
        double m = 0.0;
        for (int r = 0; r < A.rows(); ++r) m = std::max(m, A.row(r).cwiseAbs().sum());
        if (m > bound + 1e-12)
            throw std::invalid_argument(what + ": matrix violates the contraction bound");
        return;
    }
    if (A.isDiagonal(0.0)) {
        double m = A.diagonal().cwiseAbs().minCoeff();
        if (m < bound - 1e-12)
            throw std::invalid_argument(what + ": matrix violates the expansion bound");
        return;
    }
    // conservative check: sigma_min / sqrt(dim) >= bound
    Eigen::JacobiSVD<Mat> svd(A);
    double m = svd.singularValues().minCoeff() / std::sqrt(static_cast<double>(A.rows()));
    if (m < bound - 1e-12)
        throw std::invalid_argument(what + ": cannot certify the expansion bound");
}

}  // namespace

void LinearModelConfig::validate() const {
    if (n < 1) throw std::invalid_argument("linmodel: n must be >= 1");
    auto check_len = [&](const std::vector<double>& v, const std::string& name) {
        if (v.size() != 1 && v.size() != static_cast<std::size_t>(n + 1))
            throw std::invalid_argument("linmodel: " + name + " must be scalar or have n+1 entries");
    };
    check_len(mu, "mu");
    check_len(lambda, "lambda");
    check_len(mu_p, "mu_p");
    check_len(lambda_f, "lambda_f");
    for (int i = 0; i <= n; ++i) {
        if (!(std::abs(mu_at(i)) < 1.0))
            throw std::invalid_argument("linmodel: |mu_i| < 1 violated at i=" + std::to_string(i));
        if (!(std::abs(lambda_at(i)) > 1.0))
            throw std::invalid_argument("linmodel: |lambda_i| > 1 violated at i=" + std::to_string(i));
        if (!(mu_p_at(i) > 0.0 && mu_p_at(i) < 1.0))
            throw std::invalid_argument("linmodel: mu_p in (0,1) violated at i=" + std::to_string(i));
        if (!(lambda_f_at(i) > 1.0))
            throw std::invalid_argument("linmodel: lambda_f > 1 violated at i=" + std::to_string(i));
    }
    if (!(eps > 0.0)) throw std::invalid_argument("linmodel: eps must be positive");
    if (!(sigma > 0.0 && sigma < eps))
        throw std::invalid_argument("linmodel: 0 < sigma < eps violated");
    if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("linmodel: eta in (0,1) violated");
    for (int i = 0; i <= n; ++i) {
        const Split sp = split_at(n, i);
        if (i < static_cast<int>(past_matrix.size()) && past_matrix[i]) {
            if (past_matrix[i]->rows() != sp.past)
                throw std::invalid_argument("linmodel: past matrix dimension mismatch");
            check_norm_bound(*past_matrix[i], mu_p_at(i), false, "linmodel past matrix");
        }
        if (i < static_cast<int>(future_matrix.size()) && future_matrix[i]) {
            if (future_matrix[i]->rows() != sp.future)
                throw std::invalid_argument("linmodel: future matrix dimension mismatch");
            check_norm_bound(*future_matrix[i], lambda_f_at(i), true, "linmodel future matrix");
        }
    }
}

LinearModelConfig LinearModelConfig::desk() {
    LinearModelConfig c;
    c.n = 4;
    c.mu = {0.5};
    c.lambda = {2.0};
    c.mu_p = {0.4};
    c.lambda_f = {1.5};
    c.eps = 0.1;
    c.sigma = 0.05;
    c.eta = 0.5;
    return c;
}

LinearModelConfig LinearModelConfig::from_config(const Config& cfg) {
    LinearModelConfig c = desk();
    const std::string s = "linmodel";
    c.n = static_cast<int>(cfg.get_int(s, "n", c.n));
    c.mu = cfg.get_vector(s, "mu", c.mu);
    c.lambda = cfg.get_vector(s, "lambda", c.lambda);
    c.mu_p = cfg.get_vector(s, "mu_p", c.mu_p);
    c.lambda_f = cfg.get_vector(s, "lambda_f", c.lambda_f);
    c.eps = cfg.get_double(s, "eps", c.eps);
    c.sigma = cfg.get_double(s, "sigma", c.sigma);
    c.eta = cfg.get_double(s, "eta", c.eta);
    c.validate();
    return c;
}

LinearModelInstance build_model(const LinearModelConfig& cfg) {
    cfg.validate();
    LinearModelInstance inst;
    inst.cfg = cfg;
    const int n = cfg.n;
    for (int i = 0; i <= n; ++i) inst.fixed_points.push_back(fixed_point(n, i));

    for (int i = 0; i <= n; ++i) {
        const Split sp = split_at(n, i);
        Mat D = Mat::Zero(n, n);
        int at = 0;
        if (sp.past > 0) {
            if (i < static_cast<int>(cfg.past_matrix.size()) && cfg.past_matrix[i])
                D.block(at, at, sp.past, sp.past) = *cfg.past_matrix[i];
            else
                D.block(at, at, sp.past, sp.past) = cfg.mu_p_at(i) * Mat::Identity(sp.past, sp.past);
            at += sp.past;
        }
        if (sp.inc) D(at, at) = cfg.mu_at(i), ++at;
        if (sp.out) D(at, at) = cfg.lambda_at(i), ++at;
        if (sp.future > 0) {
            if (i < static_cast<int>(cfg.future_matrix.size()) && cfg.future_matrix[i])
                D.block(at, at, sp.future, sp.future) = *cfg.future_matrix[i];
            else
                D.block(at, at, sp.future, sp.future) =
                    cfg.lambda_f_at(i) * Mat::Identity(sp.future, sp.future);
        }
        const Vec p = inst.fixed_points[i];
        MapHandle h = MapHandle::from_affine({D, p - D * p}, "f" + std::to_string(i));
        inst.local.push_back(std::move(h));
    }
    for (int i = 0; i < n; ++i) {
        // translation sending q_{i,out} to q_{i+1,inc}
        const Vec shift = inst.fixed_points[i + 1] - inst.fixed_points[i];
        MapHandle h = MapHandle::from_affine({Mat::Identity(n, n), shift},
                                             "f" + std::to_string(i) + "," + std::to_string(i + 1));
        inst.transition.push_back(std::move(h));
    }
    for (int i = 0; i < n; ++i) inst.iterates.push_back(min_iterates(cfg, i));
    return inst;
}

std::vector<double> iterate_bounds(const LinearModelConfig& cfg, int i) {
    const Split sp = split_at(cfg.n, i);
    std::vector<double> b;
    if (sp.past > 0) b.push_back(std::log(1.0 - cfg.eta) / std::log(cfg.mu_p_at(i)));
    if (sp.inc)
        b.push_back(std::log((cfg.sigma + cfg.eps) / ((1.0 - cfg.eta) * cfg.eps)) /
                    std::log(1.0 / std::abs(cfg.mu_at(i))));
    if (sp.out)
        b.push_back(std::log((cfg.sigma + (1.0 + cfg.eta) * cfg.eps) / cfg.eps) /
                    std::log(std::abs(cfg.lambda_at(i))));
    if (sp.future > 0) b.push_back(std::log(1.0 + cfg.eta) / std::log(cfg.lambda_f_at(i)));
    return b;
}

int min_iterates(const LinearModelConfig& cfg, int i) {
    double bound = 0.0;
    for (double b : iterate_bounds(cfg, i)) bound = std::max(bound, b);
    int k = static_cast<int>(std::floor(bound)) + 1;
    return std::max(k, 1);
}

ChartSets build_hsets(const LinearModelConfig& cfg, int i) {
    const int n = cfg.n;
    const Split sp = split_at(n, i);
    const Vec p = fixed_point(n, i);

    auto blocks = [&](double r_past, double r_inc, double r_out, double r_f) {
        std::vector<Block> bs;
        if (sp.past > 0) bs.push_back({"p", sp.past, r_past, BlockTag::Entry});
        if (sp.inc) bs.push_back({"inc", 1, r_inc, BlockTag::Entry});
        if (sp.out) bs.push_back({"out", 1, r_out, BlockTag::Exit});
        if (sp.future > 0) bs.push_back({"f", sp.future, r_f, BlockTag::Exit});
        return bs;
    };

    Vec c_inc = p;
    if (sp.inc) c_inc[i - 1] += cfg.sigma;  // x_i direction
    HSet inc(c_inc, blocks(cfg.eps, cfg.eps, cfg.eps, cfg.eps));

    // Outgoing block uses the contracted radius (1-eta)eps: it is dropped
    // right after this set and lands on the incoming entry direction of the
    // next chart, so it must fit strictly inside an eps-cube there.
    Vec c_out = p;
    if (sp.out) c_out[i] += cfg.sigma;  // x_{i+1} direction
    HSet out(c_out, blocks((1.0 - cfg.eta) * cfg.eps, (1.0 - cfg.eta) * cfg.eps,
                           (1.0 - cfg.eta) * cfg.eps, (1.0 + cfg.eta) * cfg.eps));

    HSet dropped = sp.out ? out.drop_exit("out") : out;
    return {std::move(inc), std::move(out), std::move(dropped)};
}

std::vector<LinkCertificate> verify_model(const LinearModelConfig& cfg,
                                          const std::vector<int>* iterates) {
    LinearModelInstance inst = build_model(cfg);
    std::vector<LinkCertificate> out;
    for (int i = 0; i < cfg.n; ++i) {
        const int k = iterates ? iterates->at(i) : inst.iterates[i];
        const ChartSets si = build_hsets(cfg, i);
        const ChartSets snext = build_hsets(cfg, i + 1);
        MapHandle fk = MapHandle::from_affine(inst.local[i].affine->power(k),
                                              "f" + std::to_string(i) + "^" + std::to_string(k));
        out.push_back({i, "local", check_covering_affine(si.inc, fk, si.out)});
        out.push_back({i, "transition",
                       check_covering_affine(si.out_dropped, inst.transition[i], snext.inc)});
    }
    return out;
}

ChainSpec shadow_chain(const LinearModelConfig& cfg, const std::vector<int>* iterates) {
    LinearModelInstance inst = build_model(cfg);
    ChainSpec spec;
    for (int i = 0; i < cfg.n; ++i) {
        const int k = iterates ? iterates->at(i) : inst.iterates[i];
        const ChartSets si = build_hsets(cfg, i);
        spec.add(si.inc);
        spec.add(MapHandle::from_affine(inst.local[i].affine->power(k),
                                        "f" + std::to_string(i) + "^" + std::to_string(k)));
        spec.add(si.out);
        spec.drop("out");
        spec.add(inst.transition[i]);
    }
    spec.add(build_hsets(cfg, cfg.n).inc);
    return spec;
}

ShadowOrbit shadow_orbit(const LinearModelConfig& cfg, const std::vector<int>* iterates) {
    LinearModelInstance inst = build_model(cfg);
    ChainSpec spec = shadow_chain(cfg, iterates);
    ShadowOrbit so;
    so.solution = solve_chain(spec);

    // Forward orbit under the composed map, counting one application of f
    // per local iterate and per transition.
    Vec x = so.solution.q0;
    long steps = 0;
    for (int i = 0; i <= cfg.n; ++i) {
        so.visit_index.push_back(steps);
        so.visit_distance.push_back((x - inst.fixed_points[i]).cwiseAbs().maxCoeff());
        if (i == cfg.n) break;
        const int k = iterates ? iterates->at(i) : inst.iterates[i];
        for (int s = 0; s < k; ++s) x = inst.local[i].evaluator(x);
        x = inst.transition[i].evaluator(x);
        steps += k + 1;
    }
    return so;
}

}  // namespace chainshadow::linmodel
