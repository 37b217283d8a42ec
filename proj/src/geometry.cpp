#include "chainshadow/geometry.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace chainshadow {

namespace {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace

HSet::HSet(Vec center, std::vector<Block> blocks)
    : center_(std::move(center)), blocks_(std::move(blocks)) {
    validate();
}

HSet::HSet(Vec center, Mat basis, std::vector<Block> blocks)
    : center_(std::move(center)), basis_(std::move(basis)), blocks_(std::move(blocks)) {
    if (basis_.size() != 0 && basis_.isIdentity(0.0)) basis_ = Mat();
    if (basis_.size() != 0) {
        if (basis_.rows() != center_.size() || basis_.cols() != center_.size())
            throw std::invalid_argument("hset: basis shape does not match dimension");
        Eigen::FullPivLU<Mat> lu(basis_);
        if (!lu.isInvertible()) throw std::invalid_argument("hset: singular basis");
        basis_inv_ = lu.inverse();
    }
    validate();
}

void HSet::validate() const {
    int total = 0;
    for (const auto& b : blocks_) {
        if (b.dim < 1) throw std::invalid_argument("hset: block dim must be >= 1");
        if (!(b.radius > 0.0)) throw std::invalid_argument("hset: block radius must be positive");
        if (b.norm == BlockNorm::Disc && b.dim != 2)
            throw std::invalid_argument("hset: disc norm requires a 2-dimensional block");
        for (const auto& other : blocks_)
            if (&other != &b && other.label == b.label)
                throw std::invalid_argument("hset: duplicate block label '" + b.label + "'");
        total += b.dim;
    }
    if (total != center_.size())
        throw std::invalid_argument("hset: block dims do not sum to the ambient dimension");
    const_cast<HSet*>(this)->offsets_.clear();
    int off = 0;
    for (const auto& b : blocks_) {
        const_cast<HSet*>(this)->offsets_.push_back(off);
        off += b.dim;
    }
}

int HSet::exit_dim() const {
    int u = 0;
    for (const auto& b : blocks_)
        if (b.tag == BlockTag::Exit) u += b.dim;
    return u;
}

int HSet::entry_dim() const { return dim() - exit_dim(); }

const Mat& HSet::basis() const {
    static const Mat empty;
    return basis_.size() != 0 ? basis_ : empty;
}

int HSet::block_offset(std::size_t block_index) const {
    return offsets_.at(block_index);
}

int HSet::block_index(const std::string& label) const {
    for (std::size_t i = 0; i < blocks_.size(); ++i)
        if (blocks_[i].label == label) return static_cast<int>(i);
    throw std::invalid_argument("hset: no block named '" + label + "'");
}

const Block& HSet::block(const std::string& label) const {
    return blocks_[static_cast<std::size_t>(block_index(label))];
}

std::vector<int> HSet::exit_indices() const {
    std::vector<int> idx;
    for (std::size_t i = 0; i < blocks_.size(); ++i)
        if (blocks_[i].tag == BlockTag::Exit)
            for (int d = 0; d < blocks_[i].dim; ++d) idx.push_back(offsets_[i] + d);
    return idx;
}

std::vector<int> HSet::entry_indices() const {
    std::vector<int> idx;
    for (std::size_t i = 0; i < blocks_.size(); ++i)
        if (blocks_[i].tag == BlockTag::Entry)
            for (int d = 0; d < blocks_[i].dim; ++d) idx.push_back(offsets_[i] + d);
    return idx;
}

Vec HSet::to_unit(const Vec& x) const {
    Vec v = x - center_;
    if (basis_.size() != 0) v = basis_inv_ * v;
    for (std::size_t i = 0; i < blocks_.size(); ++i)
        v.segment(offsets_[i], blocks_[i].dim) /= blocks_[i].radius;
    return v;
}

Vec HSet::from_unit(const Vec& v) const {
    Vec w = v;
    for (std::size_t i = 0; i < blocks_.size(); ++i)
        w.segment(offsets_[i], blocks_[i].dim) *= blocks_[i].radius;
    if (basis_.size() != 0) w = basis_ * w;
    return w + center_;
}

double HSet::block_unit_norm(const Vec& v, std::size_t i) const {
    const auto seg = v.segment(offsets_[i], blocks_[i].dim);
    return blocks_[i].norm == BlockNorm::Disc ? seg.norm() : seg.cwiseAbs().maxCoeff();
}

HSet HSet::with_tags(const std::vector<BlockTag>& tags) const {
    if (tags.size() != blocks_.size()) throw std::invalid_argument("hset: tag count mismatch");
    std::vector<Block> bs = blocks_;
    for (std::size_t i = 0; i < bs.size(); ++i) bs[i].tag = tags[i];
    return basis_.size() != 0 ? HSet(center_, basis_, std::move(bs))
                              : HSet(center_, std::move(bs));
}

HSet HSet::transpose() const {
    std::vector<BlockTag> tags;
    for (const auto& b : blocks_)
        tags.push_back(b.tag == BlockTag::Exit ? BlockTag::Entry : BlockTag::Exit);
    return with_tags(tags);
}

HSet HSet::drop_exit(const std::string& label) const {
    int i = block_index(label);
    if (blocks_[static_cast<std::size_t>(i)].tag != BlockTag::Exit)
        throw std::invalid_argument("drop_exit: block '" + label + "' is not an exit block");
    std::vector<BlockTag> tags;
    for (const auto& b : blocks_) tags.push_back(b.tag);
    tags[static_cast<std::size_t>(i)] = BlockTag::Entry;
    return with_tags(tags);
}

PointClassification classify(const HSet& h, const Vec& x, double tol) {
    PointClassification c;
    const Vec v = h.to_unit(x);
    bool inside = true;
    bool exit_face = false, entry_face = false;
    for (std::size_t i = 0; i < h.blocks().size(); ++i) {
        double n = h.block_unit_norm(v, i);
        c.block_margins.push_back(1.0 - n);
        if (n > 1.0 + tol) inside = false;
        if (std::abs(n - 1.0) <= tol) {
            if (h.blocks()[i].tag == BlockTag::Exit)
                exit_face = true;
            else
                entry_face = true;
        }
    }
    c.inside = inside;
    c.on_exit_boundary = inside && exit_face;
    c.on_entry_boundary = inside && entry_face;
    return c;
}

HSet natural_hset(const Vec& center, int exit_dim, double exit_radius, int entry_dim,
                  double entry_radius) {
    std::vector<Block> blocks;
    if (exit_dim > 0) blocks.push_back({"x", exit_dim, exit_radius, BlockTag::Exit});
    if (entry_dim > 0) blocks.push_back({"y", entry_dim, entry_radius, BlockTag::Entry});
    return HSet(center, std::move(blocks));
}

HSet natural_hset(const Vec& center, const std::vector<double>& exit_radii,
                  const std::vector<double>& entry_radii) {
    std::vector<Block> blocks;
    for (std::size_t i = 0; i < exit_radii.size(); ++i)
        blocks.push_back({"x" + std::to_string(i), 1, exit_radii[i], BlockTag::Exit});
    for (std::size_t i = 0; i < entry_radii.size(); ++i)
        blocks.push_back({"y" + std::to_string(i), 1, entry_radii[i], BlockTag::Entry});
    return HSet(center, std::move(blocks));
}

std::string to_text(const HSet& h) {
    std::ostringstream os;
    os << "hset {\n  center";
    for (int i = 0; i < h.dim(); ++i) os << ' ' << fmt17(h.center()[i]);
    os << '\n';
    if (h.has_basis()) {
        os << "  basis";
        for (int r = 0; r < h.dim(); ++r) {
            for (int c = 0; c < h.dim(); ++c) os << ' ' << fmt17(h.basis()(r, c));
            if (r + 1 < h.dim()) os << " ;";
        }
        os << '\n';
    }
    for (const auto& b : h.blocks()) {
        os << "  block " << b.label << ' ' << b.dim << ' ' << fmt17(b.radius) << ' '
           << (b.tag == BlockTag::Exit ? "exit" : "entry");
        if (b.norm == BlockNorm::Disc) os << " disc";
        os << '\n';
    }
    os << "}\n";
    return os.str();
}

HSet parse_hset(std::istream& in) {
    std::string tok;
    if (!(in >> tok) || tok != "hset") throw std::runtime_error("hset parse: expected 'hset'");
    if (!(in >> tok) || tok != "{") throw std::runtime_error("hset parse: expected '{'");
    std::vector<double> center;
    std::vector<double> basis_entries;
    std::vector<Block> blocks;
    bool have_basis = false;

    auto finish = [&]() {
        Vec c = Eigen::Map<const Vec>(center.data(), static_cast<Eigen::Index>(center.size()));
        if (!have_basis) return HSet(c, std::move(blocks));
        const auto n = static_cast<Eigen::Index>(center.size());
        if (static_cast<Eigen::Index>(basis_entries.size()) != n * n)
            throw std::runtime_error("hset parse: basis entry count mismatch");
        Mat B(n, n);
        for (Eigen::Index r = 0; r < n; ++r)
            for (Eigen::Index col = 0; col < n; ++col)
                B(r, col) = basis_entries[static_cast<std::size_t>(r * n + col)];
        return HSet(c, B, std::move(blocks));
    };

    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::vector<std::string> toks;
        while (ls >> tok) toks.push_back(tok);
        bool closing = !toks.empty() && toks.back() == "}";
        if (closing) toks.pop_back();
        if (!toks.empty()) {
            const std::string& key = toks[0];
            if (key == "center") {
                for (std::size_t i = 1; i < toks.size(); ++i) center.push_back(std::stod(toks[i]));
            } else if (key == "basis") {
                have_basis = true;
                for (std::size_t i = 1; i < toks.size(); ++i)
                    if (toks[i] != ";") basis_entries.push_back(std::stod(toks[i]));
            } else if (key == "block") {
                if (toks.size() < 5)
                    throw std::runtime_error("hset parse: malformed block line: " + line);
                Block b;
                b.label = toks[1];
                b.dim = std::stoi(toks[2]);
                b.radius = std::stod(toks[3]);
                if (toks[4] == "exit")
                    b.tag = BlockTag::Exit;
                else if (toks[4] == "entry")
                    b.tag = BlockTag::Entry;
                else
                    throw std::runtime_error("hset parse: bad tag '" + toks[4] + "'");
                if (toks.size() > 5) {
                    if (toks[5] == "disc")
                        b.norm = BlockNorm::Disc;
                    else if (toks[5] != "box")
                        throw std::runtime_error("hset parse: bad norm '" + toks[5] + "'");
                }
                blocks.push_back(std::move(b));
            } else {
                throw std::runtime_error("hset parse: unknown key '" + key + "'");
            }
        }
        if (closing) return finish();
    }
    throw std::runtime_error("hset parse: missing closing '}'");
}

HSet parse_hset_text(const std::string& text) {
    std::istringstream is(text);
    return parse_hset(is);
}

}  // namespace chainshadow
