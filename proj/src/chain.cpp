#include "chainshadow/chain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace chainshadow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Row layout of the stacked system F(q) = 0:
//   entry anchor on set 0, drop anchors per set, orbit equations per map,
//   exit anchor on the last set (or the closure equation when periodic).
struct Stacked {
    ChainView view;
    Vec ybar, xbar;
    bool periodic = false;
    int rows = 0;
    std::vector<int> set_offset;  // column offset of each set's unit coords

    int cols() const { return view.total_dim; }
};

Stacked prepare(const ChainSpec& spec) {
    Stacked st;
    st.view = ChainView::build(spec);
    st.periodic = spec.periodic;
    const auto& sets = st.view.sets;
    if (sets.empty()) throw std::invalid_argument("chain: no h-sets");

    int off = 0;
    for (const auto& s : sets) {
        st.set_offset.push_back(off);
        off += s.original.dim();
    }

    const int s_first = sets.front().original.entry_dim();
    const int u_last = sets.back().effective.exit_dim();
    st.ybar = spec.ybar.size() ? spec.ybar : Vec::Zero(s_first);
    st.xbar = spec.xbar.size() ? spec.xbar : Vec::Zero(u_last);
    if (!st.periodic) {
        if (st.ybar.size() != s_first)
            throw std::invalid_argument("chain: ybar dimension mismatch");
        if (st.xbar.size() != u_last)
            throw std::invalid_argument("chain: xbar dimension mismatch");
    }

    int rows = 0;
    if (!st.periodic) rows += s_first;
    for (const auto& s : sets)
        for (const auto& [bi, eta] : s.drops)
            rows += s.original.blocks()[static_cast<std::size_t>(bi)].dim;
    for (std::size_t i = 0; i + 1 < sets.size(); ++i)
        rows += sets[i + 1].original.dim();
    if (!st.periodic)
        rows += u_last;
    else
        rows += sets.front().original.dim();
    st.rows = rows;
    if (rows != st.view.total_dim) {
        std::ostringstream os;
        os << "chain: stacked system is not square (" << rows << " equations, "
           << st.view.total_dim << " unknowns); check entry/drop/exit dimension budget";
        throw std::invalid_argument(os.str());
    }
    return st;
}

// Residual of the stacked system at unit coordinates q (concatenated).
Vec residual(const Stacked& st, const Vec& q) {
    const auto& sets = st.view.sets;
    Vec r(st.rows);
    int row = 0;
    auto unit_of = [&](std::size_t i) {
        return q.segment(st.set_offset[i], sets[i].original.dim());
    };

    if (!st.periodic) {
        const Vec v0 = unit_of(0);
        int k = 0;
        for (int idx : sets.front().original.entry_indices()) {
            r[row++] = v0[idx] - st.ybar[k];
            ++k;
        }
    }
    for (std::size_t i = 0; i < sets.size(); ++i) {
        const Vec vi = unit_of(i);
        for (const auto& [bi, eta] : sets[i].drops) {
            const auto& blk = sets[i].original.blocks()[static_cast<std::size_t>(bi)];
            const int boff = sets[i].original.block_offset(static_cast<std::size_t>(bi));
            for (int d = 0; d < blk.dim; ++d) r[row++] = vi[boff + d] - eta[d];
        }
    }
    for (std::size_t i = 0; i + 1 < sets.size(); ++i) {
        const Vec x = sets[i].original.from_unit(unit_of(i));
        const Vec fx = st.view.maps[i].evaluator(x);
        const Vec w = sets[i + 1].original.to_unit(fx);
        const Vec diff = w - unit_of(i + 1);
        r.segment(row, diff.size()) = diff;
        row += diff.size();
    }
    if (!st.periodic) {
        const Vec vl = unit_of(sets.size() - 1);
        int k = 0;
        for (int idx : sets.back().effective.exit_indices()) {
            r[row++] = vl[idx] - st.xbar[k];
            ++k;
        }
    } else {
        const Vec diff = unit_of(sets.size() - 1) - unit_of(0);
        // closure: f_last(q_last) already equals q_first through the extra
        // orbit equation when the caller repeats the first set; here the
        // convention is that the last set equals the first one.
        r.segment(row, diff.size()) = diff;
        row += diff.size();
    }
    return r;
}

bool all_affine(const ChainView& view) {
    for (const auto& m : view.maps)
        if (!m.affine) return false;
    return true;
}

}  // namespace

ChainView ChainView::build(const ChainSpec& spec) {
    ChainView view;
    bool expecting_hset = true;
    for (const auto& el : spec.elements) {
        if (std::holds_alternative<HSet>(el)) {
            if (!expecting_hset)
                throw std::invalid_argument("chain: consecutive h-sets without a map");
            const HSet& h = std::get<HSet>(el);
            view.sets.push_back({h, h, {}});
            view.total_dim += h.dim();
            expecting_hset = false;
        } else if (std::holds_alternative<DropDirective>(el)) {
            if (view.sets.empty() || expecting_hset)
                throw std::invalid_argument("chain: drop directive must follow an h-set");
            auto& s = view.sets.back();
            const DropDirective& d = std::get<DropDirective>(el);
            s.effective = s.effective.drop_exit(d.label);
            const int bi = s.original.block_index(d.label);
            const int bdim = s.original.blocks()[static_cast<std::size_t>(bi)].dim;
            Vec eta = d.eta.size() ? d.eta : Vec::Zero(bdim);
            if (eta.size() != bdim)
                throw std::invalid_argument("chain: eta dimension mismatch for drop '" + d.label +
                                            "'");
            s.drops.emplace_back(bi, std::move(eta));
        } else {
            if (expecting_hset || view.sets.empty())
                throw std::invalid_argument("chain: map must follow an h-set");
            view.maps.push_back(std::get<MapHandle>(el));
            expecting_hset = true;
        }
    }
    if (view.sets.empty()) throw std::invalid_argument("chain: empty");
    if (view.maps.size() + 1 != view.sets.size())
        throw std::invalid_argument("chain: must end with an h-set");
    // covering-style dimensional consistency per link
    for (std::size_t i = 0; i < view.maps.size(); ++i) {
        const HSet& src = view.sets[i].effective;
        const HSet& dst = view.sets[i + 1].original;
        if (src.exit_dim() != dst.exit_dim() || src.entry_dim() != dst.entry_dim()) {
            std::ostringstream os;
            os << "chain: link " << i << " has u/s mismatch (source u=" << src.exit_dim()
               << ", s=" << src.entry_dim() << "; target u=" << dst.exit_dim()
               << ", s=" << dst.entry_dim() << ")";
            throw std::invalid_argument(os.str());
        }
    }
    return view;
}

ChainSolution solve_chain(const ChainSpec& spec, const SolveOptions& opts) {
    Stacked st = prepare(spec);
    const auto& sets = st.view.sets;
    const int n = st.cols();

    ChainSolution sol;
    Vec q = Vec::Zero(n);  // initial guess: centers

    auto jacobian = [&](const Vec& at) {
        Mat J(st.rows, n);
        if (all_affine(st.view)) {
            // exact: differentiate the residual symbolically via unit affine maps
            J.setZero();
            int row = 0;
            if (!st.periodic) {
                for (int idx : sets.front().original.entry_indices())
                    J(row++, st.set_offset[0] + idx) = 1.0;
            }
            for (std::size_t i = 0; i < sets.size(); ++i)
                for (const auto& [bi, eta] : sets[i].drops) {
                    const auto& blk = sets[i].original.blocks()[static_cast<std::size_t>(bi)];
                    const int boff = sets[i].original.block_offset(static_cast<std::size_t>(bi));
                    for (int d = 0; d < blk.dim; ++d)
                        J(row++, st.set_offset[i] + boff + d) = 1.0;
                }
            for (std::size_t i = 0; i + 1 < sets.size(); ++i) {
                const UnitAffine fc =
                    unit_affine(sets[i].original, *st.view.maps[i].affine, sets[i + 1].original);
                const int m = sets[i + 1].original.dim();
                J.block(row, st.set_offset[i], m, sets[i].original.dim()) = fc.matrix;
                J.block(row, st.set_offset[i + 1], m, m) = -Mat::Identity(m, m);
                row += m;
            }
            if (!st.periodic) {
                for (int idx : sets.back().effective.exit_indices())
                    J(row++, st.set_offset[sets.size() - 1] + idx) = 1.0;
            } else {
                const int m = sets.front().original.dim();
                J.block(row, st.set_offset[sets.size() - 1], m, m) = Mat::Identity(m, m);
                J.block(row, st.set_offset[0], m, m) -= Mat::Identity(m, m);
            }
            return J;
        }
        const Vec r0 = residual(st, at);
        for (int j = 0; j < n; ++j) {
            Vec p = at;
            p[j] += opts.fd_step;
            J.col(j) = (residual(st, p) - r0) / opts.fd_step;
        }
        return J;
    };

    if (all_affine(st.view)) {
        // single exact linear solve: F(q) = J q + F(0)
        const Vec r0 = residual(st, q);
        const Mat J = jacobian(q);
        q = J.partialPivLu().solve(-r0);
        sol.residual = residual(st, q).cwiseAbs().maxCoeff();
        sol.converged = sol.residual < opts.tol;
        sol.linear_solve = true;
        sol.iterations = 1;
    } else {
        double best = residual(st, q).cwiseAbs().maxCoeff();
        int it = 0;
        for (; it < opts.max_iter; ++it) {
            const Vec r = residual(st, q);
            const double rn = r.cwiseAbs().maxCoeff();
            if (rn < opts.tol) break;
            const Mat J = jacobian(q);
            const Vec step = J.partialPivLu().solve(-r);
            double alpha = 1.0;
            Vec q_new;
            double rn_new = kInf;
            for (int h = 0; h < 40; ++h) {
                q_new = q + alpha * step;
                rn_new = residual(st, q_new).cwiseAbs().maxCoeff();
                if (rn_new < rn) break;
                alpha *= 0.5;
            }
            if (!(rn_new < rn)) {
                sol.diagnostic = "newton stalled; best residual " + std::to_string(best);
                break;
            }
            q = q_new;
            best = std::min(best, rn_new);
        }
        sol.iterations = it;
        sol.residual = residual(st, q).cwiseAbs().maxCoeff();
        sol.converged = sol.residual < opts.tol;
        if (!sol.converged && sol.diagnostic.empty())
            sol.diagnostic =
                "newton did not reach tolerance; best residual " + std::to_string(sol.residual);
    }

    sol.itinerary.clear();
    for (std::size_t i = 0; i < sets.size(); ++i)
        sol.itinerary.push_back(
            sets[i].original.from_unit(q.segment(st.set_offset[i], sets[i].original.dim())));
    sol.q0 = sol.itinerary.front();

    sol.interior = true;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        PointClassification c = classify(sets[i].original, sol.itinerary[i]);
        double worst = kInf;
        for (double m : c.block_margins) worst = std::min(worst, m);
        if (!c.inside || worst <= opts.interior_margin) {
            sol.interior = false;
            if (sol.diagnostic.empty())
                sol.diagnostic = "solution escapes the support of set " + std::to_string(i);
        }
        sol.memberships.push_back(std::move(c));
    }
    return sol;
}

EndpointCheck endpoint_nonsingularity(const ChainSpec& spec) {
    Stacked st = prepare(spec);
    const auto& sets = st.view.sets;
    const int n = st.cols();
    Mat J = Mat::Zero(st.rows, n);
    int row = 0;
    if (!st.periodic)
        for (int idx : sets.front().original.entry_indices())
            J(row++, st.set_offset[0] + idx) = 1.0;
    for (std::size_t i = 0; i < sets.size(); ++i)
        for (const auto& [bi, eta] : sets[i].drops) {
            const auto& blk = sets[i].original.blocks()[static_cast<std::size_t>(bi)];
            const int boff = sets[i].original.block_offset(static_cast<std::size_t>(bi));
            for (int d = 0; d < blk.dim; ++d) J(row++, st.set_offset[i] + boff + d) = 1.0;
        }
    for (std::size_t i = 0; i + 1 < sets.size(); ++i) {
        const HSet& src = sets[i].effective;
        const HSet& dst = sets[i + 1].original;
        const int u = src.exit_dim();
        Mat A;
        if (st.view.maps[i].affine) {
            const UnitAffine fc = unit_affine(sets[i].original, *st.view.maps[i].affine, dst);
            const auto rows_ = dst.exit_indices();
            const auto cols_ = src.exit_indices();
            A.resize(u, u);
            for (int r = 0; r < u; ++r)
                for (int c = 0; c < u; ++c) A(r, c) = fc.matrix(rows_[r], cols_[c]);
        } else if (st.view.maps[i].exit_linearization) {
            A = *st.view.maps[i].exit_linearization;
            if (A.rows() != u || A.cols() != u)
                throw std::invalid_argument("endpoint: exit linearization has wrong shape at link " +
                                            std::to_string(i));
        } else {
            throw std::invalid_argument("endpoint: map " + std::to_string(i) +
                                        " has no exit-block linearization");
        }
        // (A p, 0) - q_{i+1} = 0
        const auto dst_exit = dst.exit_indices();
        const auto src_exit = src.exit_indices();
        for (int r = 0; r < u; ++r) {
            for (int c = 0; c < u; ++c)
                J(row + dst_exit[r], st.set_offset[i] + src_exit[c]) = A(r, c);
        }
        for (int d = 0; d < dst.dim(); ++d) J(row + d, st.set_offset[i + 1] + d) -= 1.0;
        row += dst.dim();
    }
    if (!st.periodic)
        for (int idx : sets.back().effective.exit_indices())
            J(row++, st.set_offset[sets.size() - 1] + idx) = 1.0;
    else {
        const int m = sets.front().original.dim();
        J.block(row, st.set_offset[sets.size() - 1], m, m) = Mat::Identity(m, m);
        J.block(row, st.set_offset[0], m, m) -= Mat::Identity(m, m);
    }

    EndpointCheck chk;
    chk.abs_det = std::abs(J.partialPivLu().determinant());
    chk.nonsingular = chk.abs_det > 1e-12;
    return chk;
}

std::vector<PointClassification> verify_shadowing(const ChainSpec& spec, const ChainSolution& sol,
                                                  double margin) {
    const ChainView view = ChainView::build(spec);
    std::vector<PointClassification> out;
    if (view.sets.empty()) return out;
    Vec x = sol.q0;
    for (std::size_t i = 0; i < view.sets.size(); ++i) {
        if (i > 0) x = view.maps[i - 1].evaluator(x);
        out.push_back(classify(view.sets[i].original, x, margin));
    }
    return out;
}

std::vector<CoveringCertificate> certify_chain(const ChainSpec& spec, const SampleOptions& opts) {
    const ChainView view = ChainView::build(spec);
    std::vector<CoveringCertificate> certs;
    for (std::size_t i = 0; i < view.maps.size(); ++i) {
        const HSet& src = view.sets[i].effective;
        const HSet& dst = view.sets[i + 1].original;
        certs.push_back(view.maps[i].affine
                            ? check_covering_affine(src, view.maps[i], dst)
                            : check_covering_sampled(src, view.maps[i], dst, opts));
    }
    return certs;
}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
    std::istringstream ls(line);
    std::vector<std::string> toks;
    std::string t;
    while (ls >> t) {
        if (!t.empty() && t[0] == '#') break;
        toks.push_back(t);
    }
    return toks;
}

[[noreturn]] void fail(int lineno, const std::string& msg) {
    throw std::runtime_error("chain parse, line " + std::to_string(lineno) + ": " + msg);
}

}  // namespace

ChainSpec parse_chain(std::istream& in, const ChainParseContext& ctx) {
    ChainSpec spec;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto toks = tokenize(line);
        if (toks.empty()) continue;
        const std::string& key = toks[0];
        if (key == "hset") {
            // re-parse the block form starting from this line
            std::ostringstream body;
            body << line << '\n';
            if (line.find('}') == std::string::npos) {
                while (std::getline(in, line)) {
                    ++lineno;
                    body << line << '\n';
                    if (tokenize(line).size() == 1 && tokenize(line)[0] == "}") break;
                }
            }
            try {
                spec.add(parse_hset_text(body.str()));
            } catch (const std::exception& e) {
                fail(lineno, e.what());
            }
        } else if (key == "map") {
            if (toks.size() < 2) fail(lineno, "map record needs a kind");
            if (toks[1] == "affine") {
                // map affine { matrix a b ; c d  offset x y }
                std::vector<double> entries, offset;
                bool in_matrix = false, in_offset = false;
                auto consume = [&](const std::vector<std::string>& ts) {
                    for (const auto& t : ts) {
                        if (t == "{" || t == "}") continue;
                        if (t == "matrix") {
                            in_matrix = true;
                            in_offset = false;
                        } else if (t == "offset") {
                            in_offset = true;
                            in_matrix = false;
                        } else if (t == ";") {
                            continue;
                        } else if (in_matrix) {
                            entries.push_back(std::stod(t));
                        } else if (in_offset) {
                            offset.push_back(std::stod(t));
                        }
                    }
                };
                consume(std::vector<std::string>(toks.begin() + 2, toks.end()));
                if (line.find('}') == std::string::npos) {
                    while (std::getline(in, line)) {
                        ++lineno;
                        consume(tokenize(line));
                        if (line.find('}') != std::string::npos) break;
                    }
                }
                const auto n = static_cast<Eigen::Index>(offset.size());
                if (n == 0 || static_cast<Eigen::Index>(entries.size()) != n * n)
                    fail(lineno, "affine map needs an n*n matrix and an n-vector offset");
                Mat A(n, n);
                for (Eigen::Index r = 0; r < n; ++r)
                    for (Eigen::Index c = 0; c < n; ++c)
                        A(r, c) = entries[static_cast<std::size_t>(r * n + c)];
                Vec b = Eigen::Map<const Vec>(offset.data(), n);
                spec.add(MapHandle::from_affine({A, b}));
            } else {
                bool handled = false;
                for (const auto& [kind, builder] : ctx.builders) {
                    if (toks[1] == kind) {
                        try {
                            spec.add(builder(std::vector<std::string>(toks.begin() + 2, toks.end())));
                        } catch (const std::exception& e) {
                            fail(lineno, e.what());
                        }
                        handled = true;
                        break;
                    }
                }
                if (!handled) fail(lineno, "unknown map kind '" + toks[1] + "'");
            }
        } else if (key == "drop") {
            if (toks.size() < 2) fail(lineno, "drop needs a block label");
            Vec eta;
            if (toks.size() > 2) {
                eta.resize(static_cast<Eigen::Index>(toks.size() - 2));
                for (std::size_t i = 2; i < toks.size(); ++i)
                    eta[static_cast<Eigen::Index>(i - 2)] = std::stod(toks[i]);
            }
            spec.drop(toks[1], eta);
        } else if (key == "ybar" || key == "xbar") {
            Vec v(static_cast<Eigen::Index>(toks.size() - 1));
            for (std::size_t i = 1; i < toks.size(); ++i)
                v[static_cast<Eigen::Index>(i - 1)] = std::stod(toks[i]);
            (key == "ybar" ? spec.ybar : spec.xbar) = v;
        } else if (key == "periodic") {
            spec.periodic = toks.size() > 1 && (toks[1] == "true" || toks[1] == "1");
        } else {
            fail(lineno, "unknown directive '" + key + "'");
        }
    }
    ChainView::build(spec);  // validate alternation and link dimensions
    return spec;
}

ChainSpec parse_chain_file(const std::string& path, const ChainParseContext& ctx) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open chain file: " + path);
    return parse_chain(in, ctx);
}

}  // namespace chainshadow
