#include "chainshadow/covering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace chainshadow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kExactDeflation = 1e-10;

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

struct BlockRef {
    int index;   // block index within the h-set
    int offset;  // first coordinate
    int dim;
    BlockNorm norm;
    BlockTag tag;
};

std::vector<BlockRef> block_refs(const HSet& h) {
    std::vector<BlockRef> out;
    for (std::size_t i = 0; i < h.blocks().size(); ++i) {
        const Block& b = h.blocks()[i];
        out.push_back({static_cast<int>(i), h.block_offset(i), b.dim, b.norm, b.tag});
    }
    return out;
}

double block_norm(const Vec& w, const BlockRef& b) {
    const auto seg = w.segment(b.offset, b.dim);
    return b.norm == BlockNorm::Disc ? seg.norm() : seg.cwiseAbs().maxCoeff();
}

// sup over the unit ball of source block `src` of the beta-norm of
// C.block(rows of beta, cols of src) * v.  Exact for interval and disc
// sources; subadditive (upper bound) when it has to combine.
double sup_contribution(const Mat& C, const BlockRef& beta, const BlockRef& src) {
    const Mat sub = C.block(beta.offset, src.offset, beta.dim, src.dim);
    if (sub.isZero(0.0)) return 0.0;
    if (beta.norm == BlockNorm::Box) {
        // max over beta coords of sup |row · v|
        double m = 0.0;
        for (int r = 0; r < beta.dim; ++r) {
            double s = src.norm == BlockNorm::Disc ? sub.row(r).norm()
                                                   : sub.row(r).cwiseAbs().sum();
            m = std::max(m, s);
        }
        return m;
    }
    // disc target
    if (src.norm == BlockNorm::Disc) {
        Eigen::JacobiSVD<Mat> svd(sub);
        return svd.singularValues()(0);
    }
    if (src.dim <= 16) {
        // exact: max of ||sub * corner||_2 over sign corners
        double m = 0.0;
        for (long mask = 0; mask < (1L << src.dim); ++mask) {
            Vec v(src.dim);
            for (int j = 0; j < src.dim; ++j) v[j] = (mask >> j) & 1 ? 1.0 : -1.0;
            m = std::max(m, (sub * v).norm());
        }
        return m;
    }
    double m = 0.0;
    for (int j = 0; j < src.dim; ++j) m += sub.col(j).norm();
    return m;
}

// sup over the whole source product of the beta-norm of (C v + d)_beta.
// Exact for box targets (per-coordinate), exact or subadditive for discs.
double sup_block(const Mat& C, const Vec& d, const BlockRef& beta,
                 const std::vector<BlockRef>& sources) {
    if (beta.norm == BlockNorm::Box) {
        double m = 0.0;
        for (int r = 0; r < beta.dim; ++r) {
            double s = std::abs(d[beta.offset + r]);
            for (const auto& src : sources) {
                const auto row = C.row(beta.offset + r).segment(src.offset, src.dim);
                s += src.norm == BlockNorm::Disc ? row.norm() : row.cwiseAbs().sum();
            }
            m = std::max(m, s);
        }
        return m;
    }
    // disc target: enumerate sign corners of interval/box sources when cheap,
    // add spectral norms of disc sources and the offset.
    std::vector<int> box_cols;
    double disc_sum = 0.0;
    for (const auto& src : sources) {
        const Mat sub = C.block(beta.offset, src.offset, beta.dim, src.dim);
        if (sub.isZero(0.0)) continue;
        if (src.norm == BlockNorm::Disc) {
            Eigen::JacobiSVD<Mat> svd(sub);
            disc_sum += svd.singularValues()(0);
        } else {
            for (int j = 0; j < src.dim; ++j) box_cols.push_back(src.offset + j);
        }
    }
    const Eigen::Vector2d off(d[beta.offset], d[beta.offset + 1]);
    if (box_cols.size() <= 16) {
        double m = 0.0;
        const long combos = 1L << box_cols.size();
        for (long mask = 0; mask < combos; ++mask) {
            Eigen::Vector2d acc = off;
            for (std::size_t j = 0; j < box_cols.size(); ++j) {
                double s = (mask >> j) & 1 ? 1.0 : -1.0;
                acc += s * C.block(beta.offset, box_cols[j], beta.dim, 1);
            }
            m = std::max(m, acc.norm());
        }
        return m + disc_sum;
    }
    double m = off.norm() + disc_sum;
    for (int cidx : box_cols) m += C.block(beta.offset, cidx, beta.dim, 1).norm();
    return m;
}

// Minimum gain of sub over the boundary of the source block ball, jointly
// with the other exit-target blocks: lower bound of
//   inf_{||v||_src = 1}  max_beta ( ||sub_beta v||_beta - slop_beta ).
double face_lower_bound(const Mat& C, const BlockRef& src,
                        const std::vector<BlockRef>& exit_targets,
                        const std::vector<double>& slop) {
    auto gain_at = [&](const Vec& v) {
        double g = -kInf;
        for (std::size_t b = 0; b < exit_targets.size(); ++b) {
            const auto& beta = exit_targets[b];
            const Mat sub = C.block(beta.offset, src.offset, beta.dim, src.dim);
            Vec img = sub * v;
            double n = beta.norm == BlockNorm::Disc ? img.norm() : img.cwiseAbs().maxCoeff();
            g = std::max(g, n - slop[b]);
        }
        return g;
    };

    if (src.dim == 1) {
        Vec v(1);
        v[0] = 1.0;
        double a = gain_at(v);
        v[0] = -1.0;
        return std::min(a, gain_at(v));
    }
    if (src.norm == BlockNorm::Disc) {
        // dense angular grid with Lipschitz deflation; the angular slope of
        // ||M v(th)|| is bounded by (smax^2-smin^2)/(2 smin) and by smax,
        // so pure scaled rotations deflate by zero
        double lip = 0.0;
        for (const auto& beta : exit_targets) {
            const Mat sub = C.block(beta.offset, src.offset, beta.dim, src.dim);
            Eigen::JacobiSVD<Mat> svd(sub);
            const double smax = svd.singularValues()(0);
            const double smin = svd.singularValues()(svd.singularValues().size() - 1);
            double l = smax;
            if (smin > 1e-300) l = std::min(l, (smax * smax - smin * smin) / (2.0 * smin));
            lip = std::max(lip, l);
        }
        const int n = 4096;
        double lo = kInf;
        Vec v(2);
        for (int i = 0; i < n; ++i) {
            double th = 2.0 * M_PI * i / n;
            v[0] = std::cos(th);
            v[1] = std::sin(th);
            lo = std::min(lo, gain_at(v));
        }
        return lo - lip * (M_PI / n);
    }
    // box block: boundary = union of sub-faces coordinate j = ±1; interval
    // lower bound per sub-face (exact for block-diagonal maps).
    double lo = kInf;
    for (int j = 0; j < src.dim; ++j) {
        double best = -kInf;
        for (std::size_t b = 0; b < exit_targets.size(); ++b) {
            const auto& beta = exit_targets[b];
            const Mat sub = C.block(beta.offset, src.offset, beta.dim, src.dim);
            double lb;
            if (beta.norm == BlockNorm::Disc) {
                // ||col_j||_2 minus the worst of the free coordinates
                double rest = 0.0;
                for (int jj = 0; jj < src.dim; ++jj)
                    if (jj != j) rest += sub.col(jj).norm();
                lb = sub.col(j).norm() - rest;
            } else {
                lb = -kInf;
                for (int r = 0; r < beta.dim; ++r) {
                    double rest = 0.0;
                    for (int jj = 0; jj < src.dim; ++jj)
                        if (jj != j) rest += std::abs(sub(r, jj));
                    lb = std::max(lb, std::abs(sub(r, j)) - rest);
                }
            }
            best = std::max(best, lb - slop[b]);
        }
        lo = std::min(lo, best);
    }
    return lo;
}

void require_compatible(const HSet& N, const HSet& M) {
    if (N.exit_dim() != M.exit_dim() || N.entry_dim() != M.entry_dim())
        throw std::invalid_argument("covering: u/s dimension mismatch between source and target");
}

}  // namespace

AffineMap AffineMap::inverse() const {
    Eigen::FullPivLU<Mat> lu(matrix);
    if (!lu.isInvertible()) throw std::runtime_error("affine map is not invertible");
    Mat inv = lu.inverse();
    return {inv, -(inv * offset)};
}

AffineMap AffineMap::compose(const AffineMap& inner) const {
    return {matrix * inner.matrix, matrix * inner.offset + offset};
}

AffineMap AffineMap::power(int k) const {
    if (k < 0) return inverse().power(-k);
    AffineMap acc{Mat::Identity(matrix.rows(), matrix.cols()), Vec::Zero(offset.size())};
    for (int i = 0; i < k; ++i) acc = compose(acc);
    return acc;
}

MapHandle MapHandle::from_affine(AffineMap a, std::string name) {
    MapHandle h;
    h.dim_in = static_cast<int>(a.matrix.cols());
    h.dim_out = static_cast<int>(a.matrix.rows());
    h.name = std::move(name);
    AffineMap copy = a;
    h.evaluator = [copy](const Vec& x) { return copy(x); };
    if (a.matrix.rows() == a.matrix.cols()) {
        Eigen::FullPivLU<Mat> lu(a.matrix);
        if (lu.isInvertible()) {
            AffineMap inv = a.inverse();
            h.inverse = [inv](const Vec& x) { return inv(x); };
        }
    }
    h.affine = std::move(a);
    return h;
}

UnitAffine unit_affine(const HSet& N, const AffineMap& f, const HSet& M) {
    const int n = N.dim();
    Mat from_unit_n = Mat::Identity(n, n);
    for (std::size_t i = 0; i < N.blocks().size(); ++i)
        for (int d = 0; d < N.blocks()[i].dim; ++d)
            from_unit_n(N.block_offset(i) + d, N.block_offset(i) + d) = N.blocks()[i].radius;
    if (N.has_basis()) from_unit_n = N.basis() * from_unit_n;

    const int m = M.dim();
    Mat to_unit_m = Mat::Identity(m, m);
    for (std::size_t i = 0; i < M.blocks().size(); ++i)
        for (int d = 0; d < M.blocks()[i].dim; ++d)
            to_unit_m(M.block_offset(i) + d, M.block_offset(i) + d) = 1.0 / M.blocks()[i].radius;
    if (M.has_basis()) {
        Eigen::FullPivLU<Mat> lu(M.basis());
        to_unit_m = to_unit_m * lu.inverse();
    }

    UnitAffine u;
    u.matrix = to_unit_m * f.matrix * from_unit_n;
    u.offset = to_unit_m * (f.matrix * N.center() + f.offset - M.center());
    return u;
}

CoveringCertificate check_covering_affine(const HSet& N, const MapHandle& f, const HSet& M) {
    if (!f.affine) throw std::invalid_argument("check_covering_affine: map has no affine form");
    require_compatible(N, M);
    if (f.affine->matrix.cols() != N.dim() || f.affine->matrix.rows() != M.dim())
        throw std::invalid_argument("check_covering_affine: map arity mismatch");

    const UnitAffine fc = unit_affine(N, *f.affine, M);
    const auto src_blocks = block_refs(N);
    const auto tgt_blocks = block_refs(M);

    std::vector<BlockRef> src_exit, src_entry, tgt_exit, tgt_entry;
    for (const auto& b : src_blocks) (b.tag == BlockTag::Exit ? src_exit : src_entry).push_back(b);
    for (const auto& b : tgt_blocks) (b.tag == BlockTag::Exit ? tgt_exit : tgt_entry).push_back(b);

    CoveringCertificate cert;
    cert.mode = CertificateMode::ExactAffine;

    // Entry condition: the image of the whole set, for every homotopy time,
    // stays clear of the target entry boundary.  The entry part of h_t is
    // (1-t) f_c, so t = 0 dominates.
    double entry_margin = kInf;
    for (const auto& beta : tgt_entry)
        entry_margin = std::min(entry_margin, 1.0 - sup_block(fc.matrix, fc.offset, beta, src_blocks));

    // Exit condition, per source exit face. Exit-to-exit terms persist for
    // all t; entry contributions and the offset are damped by (1-t) in [0,1].
    double exit_margin = kInf;
    const int u = N.exit_dim();
    if (u > 0) {
        for (const auto& face : src_exit) {
            std::vector<double> slop;
            for (const auto& beta : tgt_exit) {
                double s = 0.0;
                for (const auto& other : src_exit)
                    if (other.index != face.index) s += sup_contribution(fc.matrix, beta, other);
                double drift = sup_block(fc.matrix, fc.offset, beta, src_entry);
                s += std::max(0.0, drift);
                slop.push_back(s);
            }
            exit_margin = std::min(exit_margin,
                                   face_lower_bound(fc.matrix, face, tgt_exit, slop) - 1.0);
        }
    }

    // Degree from the exit-block linearization A (homotopy endpoint).
    double abs_det = kInf;
    if (u > 0) {
        const auto ex_rows = M.exit_indices();
        const auto ex_cols = N.exit_indices();
        Mat A(u, u);
        for (int r = 0; r < u; ++r)
            for (int c = 0; c < u; ++c) A(r, c) = fc.matrix(ex_rows[r], ex_cols[c]);
        double det = A.partialPivLu().determinant();
        abs_det = std::abs(det);
        if (abs_det > 1e-12) cert.degree = det > 0 ? 1 : -1;
    }

    if (entry_margin != kInf) entry_margin -= kExactDeflation;
    if (u > 0 && exit_margin != kInf) exit_margin -= kExactDeflation;
    cert.entry_margin = entry_margin;
    cert.exit_margin = u > 0 ? exit_margin : kInf;
    cert.pass = entry_margin > 0.0 && (u == 0 || (exit_margin > 0.0 && abs_det > 1e-12));
    if (u == 0) cert.degree = 1;
    return cert;
}

namespace {

// Per-block sample families used by the sampled checker.
std::vector<Vec> interior_samples(const BlockRef& b, int density) {
    std::vector<Vec> out;
    if (b.norm == BlockNorm::Disc) {
        out.push_back(Vec::Zero(2));
        const int m = std::max(2, density - 1);
        for (int i = 0; i < m; ++i) {
            double th = 2.0 * M_PI * i / m;
            Vec v(2);
            v << std::cos(th), std::sin(th);
            out.push_back(v);
        }
        return out;
    }
    std::vector<double> axis;
    if (density <= 1)
        axis = {0.0};
    else
        for (int i = 0; i < density; ++i) axis.push_back(-1.0 + 2.0 * i / (density - 1));
    Vec v = Vec::Zero(b.dim);
    std::function<void(int)> rec = [&](int j) {
        if (j == b.dim) {
            out.push_back(v);
            return;
        }
        for (double a : axis) {
            v[j] = a;
            rec(j + 1);
        }
    };
    rec(0);
    return out;
}

std::vector<Vec> boundary_samples(const BlockRef& b, int density) {
    std::vector<Vec> out;
    if (b.norm == BlockNorm::Disc) {
        const int m = std::max(8, 4 * density);
        for (int i = 0; i < m; ++i) {
            double th = 2.0 * M_PI * i / m;
            Vec v(2);
            v << std::cos(th), std::sin(th);
            out.push_back(v);
        }
        return out;
    }
    if (b.dim == 1) {
        Vec a(1), c(1);
        a[0] = 1.0;
        c[0] = -1.0;
        return {a, c};
    }
    // faces coordinate j = ±1, grid on the rest
    std::vector<Vec> out2;
    for (int j = 0; j < b.dim; ++j) {
        BlockRef rest{b.index, 0, b.dim - 1, BlockNorm::Box, b.tag};
        for (const Vec& r : interior_samples(rest, density)) {
            for (double s : {-1.0, 1.0}) {
                Vec v(b.dim);
                int k = 0;
                for (int jj = 0; jj < b.dim; ++jj) v[jj] = jj == j ? s : r[k++];
                out2.push_back(v);
            }
        }
    }
    return out2;
}

void cartesian(const std::vector<std::vector<Vec>>& per_block,
               const std::vector<BlockRef>& blocks, int dim,
               const std::function<void(const Vec&)>& emit) {
    Vec v = Vec::Zero(dim);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == per_block.size()) {
            emit(v);
            return;
        }
        for (const Vec& part : per_block[i]) {
            v.segment(blocks[i].offset, blocks[i].dim) = part;
            rec(i + 1);
        }
    };
    rec(0);
}

}  // namespace

CoveringCertificate check_covering_sampled(const HSet& N, const MapHandle& f, const HSet& M,
                                           const SampleOptions& opts) {
    require_compatible(N, M);
    if (!f.evaluator) throw std::invalid_argument("check_covering_sampled: no evaluator");
    constexpr double tau_shell = 1e-6;

    const auto src_blocks = block_refs(N);
    const auto tgt_blocks = block_refs(M);
    std::vector<BlockRef> tgt_exit, tgt_entry;
    for (const auto& b : tgt_blocks) (b.tag == BlockTag::Exit ? tgt_exit : tgt_entry).push_back(b);

    const int u = N.exit_dim();

    // Collect unit-coordinate samples: exit-boundary points and support points.
    std::vector<Vec> exit_pts, support_pts;
    for (std::size_t i = 0; i < src_blocks.size(); ++i) {
        if (src_blocks[i].tag != BlockTag::Exit) continue;
        std::vector<std::vector<Vec>> per_block;
        for (std::size_t j = 0; j < src_blocks.size(); ++j)
            per_block.push_back(i == j ? boundary_samples(src_blocks[j], opts.grid_density)
                                       : interior_samples(src_blocks[j], opts.grid_density));
        cartesian(per_block, src_blocks, N.dim(), [&](const Vec& v) { exit_pts.push_back(v); });
    }
    {
        std::vector<std::vector<Vec>> per_block;
        for (const auto& b : src_blocks) per_block.push_back(interior_samples(b, opts.grid_density));
        cartesian(per_block, src_blocks, N.dim(), [&](const Vec& v) { support_pts.push_back(v); });
    }
    if (opts.extra_random > 0 && u > 0) {
        std::mt19937_64 rng(opts.seed);
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        std::vector<const BlockRef*> exits;
        for (const auto& b : src_blocks)
            if (b.tag == BlockTag::Exit) exits.push_back(&b);
        for (int r = 0; r < opts.extra_random; ++r) {
            Vec v(N.dim());
            for (int j = 0; j < N.dim(); ++j) v[j] = unif(rng);
            for (const auto& b : src_blocks) {
                if (b.norm == BlockNorm::Disc) {
                    double n = v.segment(b.offset, b.dim).norm();
                    if (n > 1.0) v.segment(b.offset, b.dim) /= n;
                }
            }
            const BlockRef* face = exits[rng() % exits.size()];
            auto seg = v.segment(face->offset, face->dim);
            double n = face->norm == BlockNorm::Disc ? seg.norm() : seg.cwiseAbs().maxCoeff();
            if (n < 1e-9) {
                seg.setZero();
                seg[0] = 1.0;
            } else {
                seg /= n;
            }
            exit_pts.push_back(v);
        }
    }

    struct Outcome {
        double exit_margin = kInf;
        double entry_margin = kInf;
        std::optional<Vec> counterexample;
    };

    auto image_unit = [&](const Vec& v) { return M.to_unit(f.evaluator(N.from_unit(v))); };
    auto exit_norm = [&](const Vec& w) {
        double n = -kInf;
        for (const auto& b : tgt_exit) n = std::max(n, block_norm(w, b));
        return n;
    };
    auto entry_norm = [&](const Vec& w) {
        double n = -kInf;
        for (const auto& b : tgt_entry) n = std::max(n, block_norm(w, b));
        return n;
    };

    auto run_range = [&](const std::vector<Vec>& pts, bool is_exit, std::size_t lo, std::size_t hi,
                         Outcome& out) {
        for (std::size_t i = lo; i < hi; ++i) {
            Vec w;
            try {
                w = image_unit(pts[i]);
            } catch (const std::exception& e) {
                throw std::runtime_error(std::string("sampled covering: evaluator failed at unit point [") +
                                         [&] {
                                             std::ostringstream os;
                                             for (int j = 0; j < pts[i].size(); ++j)
                                                 os << (j ? " " : "") << pts[i][j];
                                             return os.str();
                                         }() + "]: " + e.what());
            }
            if (is_exit && u > 0) {
                double m = exit_norm(w) - 1.0;
                if (m < out.exit_margin) {
                    out.exit_margin = m;
                    if (m <= 0.0 && !out.counterexample) out.counterexample = N.from_unit(pts[i]);
                }
            }
            if (!tgt_entry.empty()) {
                double m = 1.0 - entry_norm(w);
                if (m < out.entry_margin) {
                    out.entry_margin = m;
                    if (m <= tau_shell && !out.counterexample)
                        out.counterexample = N.from_unit(pts[i]);
                }
            }
        }
    };

    auto run_parallel = [&](const std::vector<Vec>& pts, bool is_exit) {
        Outcome total;
        int nthreads = std::max(1, opts.threads);
        if (nthreads == 1 || pts.size() < 64) {
            run_range(pts, is_exit, 0, pts.size(), total);
            return total;
        }
        std::vector<Outcome> parts(static_cast<std::size_t>(nthreads));
        std::vector<std::thread> pool;
        std::size_t chunk = (pts.size() + nthreads - 1) / nthreads;
        for (int t = 0; t < nthreads; ++t) {
            std::size_t lo = t * chunk, hi = std::min(pts.size(), (t + 1) * chunk);
            if (lo >= hi) break;
            pool.emplace_back([&, lo, hi, t] { run_range(pts, is_exit, lo, hi, parts[t]); });
        }
        for (auto& th : pool) th.join();
        for (const auto& p : parts) {
            if (p.exit_margin < total.exit_margin) total.exit_margin = p.exit_margin;
            if (p.entry_margin < total.entry_margin) total.entry_margin = p.entry_margin;
            if (!total.counterexample && p.counterexample) total.counterexample = p.counterexample;
        }
        return total;
    };

    Outcome on_exit = run_parallel(exit_pts, true);
    Outcome on_support = run_parallel(support_pts, false);

    CoveringCertificate cert;
    cert.mode = CertificateMode::Sampled;
    cert.sample_count = static_cast<long>(exit_pts.size() + support_pts.size());
    cert.exit_margin = u > 0 ? on_exit.exit_margin : kInf;
    cert.entry_margin = std::min(on_exit.entry_margin, on_support.entry_margin);
    if (tgt_entry.empty()) cert.entry_margin = kInf;

    if (u > 0 && f.exit_linearization) {
        double det = f.exit_linearization->partialPivLu().determinant();
        if (std::abs(det) > 1e-12) cert.degree = det > 0 ? 1 : -1;
    } else if (u > 0 && f.affine) {
        UnitAffine fc = unit_affine(N, *f.affine, M);
        const auto rows = M.exit_indices();
        const auto cols = N.exit_indices();
        Mat A(u, u);
        for (int r = 0; r < u; ++r)
            for (int c = 0; c < u; ++c) A(r, c) = fc.matrix(rows[r], cols[c]);
        double det = A.partialPivLu().determinant();
        if (std::abs(det) > 1e-12) cert.degree = det > 0 ? 1 : -1;
    } else if (u == 0) {
        cert.degree = 1;
    }

    bool exit_ok = u == 0 || cert.exit_margin > 0.0;
    bool entry_ok = tgt_entry.empty() || cert.entry_margin > tau_shell;
    cert.pass = exit_ok && entry_ok && (u == 0 || cert.degree.has_value());
    if (!cert.pass) {
        cert.counterexample = on_exit.counterexample ? on_exit.counterexample
                                                     : on_support.counterexample;
    }
    cert.note = "NON-RIGOROUS sampled evidence";
    return cert;
}

CoveringCertificate check_backcovering(const HSet& N, const MapHandle& f, const HSet& M,
                                       const SampleOptions& opts) {
    if (!f.has_inverse() && !f.affine)
        throw std::invalid_argument("check_backcovering: map has no inverse");
    MapHandle g;
    g.dim_in = f.dim_out;
    g.dim_out = f.dim_in;
    g.name = f.name + "^-1";
    if (f.affine) {
        AffineMap inv = f.affine->inverse();
        g.affine = inv;
        g.evaluator = [inv](const Vec& x) { return inv(x); };
    } else {
        g.evaluator = f.inverse;
    }
    const HSet Mt = M.transpose();
    const HSet Nt = N.transpose();
    return g.affine ? check_covering_affine(Mt, g, Nt) : check_covering_sampled(Mt, g, Nt, opts);
}

std::string certificate_report(const CoveringCertificate& c, const std::string& name) {
    std::ostringstream os;
    os << "covering " << name << " {\n";
    os << "  mode = " << (c.mode == CertificateMode::ExactAffine ? "exact-affine" : "sampled")
       << "\n";
    os << "  rigorous = " << (c.rigorous() ? "true" : "false") << "\n";
    os << "  pass = " << (c.pass ? "true" : "false") << "\n";
    os << "  exit_margin = " << fmt17(c.exit_margin) << "\n";
    os << "  entry_margin = " << fmt17(c.entry_margin) << "\n";
    os << "  degree = " << (c.degree ? std::to_string(*c.degree) : std::string("none")) << "\n";
    os << "  samples = " << c.sample_count << "\n";
    if (c.counterexample) {
        os << "  counterexample =";
        for (int i = 0; i < c.counterexample->size(); ++i)
            os << ' ' << fmt17((*c.counterexample)[i]);
        os << "\n";
    }
    if (!c.note.empty()) os << "  note = " << c.note << "\n";
    os << "}\n";
    return os.str();
}

}  // namespace chainshadow
