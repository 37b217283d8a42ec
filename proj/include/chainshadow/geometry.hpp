#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace chainshadow {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Boundary classification tolerance in unit coordinates.
inline constexpr double kClassifyTol = 1e-9;

enum class BlockTag { Exit, Entry };

// Norm used inside one block. Box is the max norm; Disc is the euclidean
// norm and is restricted to 2-dimensional blocks (complex coordinates).
enum class BlockNorm { Box, Disc };

struct Block {
    std::string label;
    int dim = 1;
    double radius = 1.0;
    BlockTag tag = BlockTag::Exit;
    BlockNorm norm = BlockNorm::Box;
};

// A compact box/disc product in affine coordinates. The support is
// { center + basis * diag-scaled v : per-block norm of v <= 1 }.
class HSet {
  public:
    HSet(Vec center, std::vector<Block> blocks);
    HSet(Vec center, Mat basis, std::vector<Block> blocks);

    int dim() const { return static_cast<int>(center_.size()); }
    int exit_dim() const;   // u(N)
    int entry_dim() const;  // s(N)

    const Vec& center() const { return center_; }
    bool has_basis() const { return basis_.size() != 0; }
    const Mat& basis() const;
    const std::vector<Block>& blocks() const { return blocks_; }

    int block_offset(std::size_t block_index) const;
    const Block& block(const std::string& label) const;
    int block_index(const std::string& label) const;

    // Indices (in state order) of all coordinates belonging to exit/entry blocks.
    std::vector<int> exit_indices() const;
    std::vector<int> entry_indices() const;

    Vec to_unit(const Vec& x) const;
    Vec from_unit(const Vec& v) const;

    // Per-block norm of a unit-coordinate vector.
    double block_unit_norm(const Vec& v, std::size_t block_index) const;

    HSet transpose() const;
    HSet drop_exit(const std::string& label) const;

    // Retag helper used by transpose/drop; keeps support and coordinates.
    HSet with_tags(const std::vector<BlockTag>& tags) const;

  private:
    void validate() const;

    Vec center_;
    Mat basis_;      // empty => identity
    Mat basis_inv_;  // cached, empty when basis_ is
    std::vector<Block> blocks_;
    std::vector<int> offsets_;
};

struct PointClassification {
    bool inside = false;
    bool on_exit_boundary = false;
    bool on_entry_boundary = false;
    std::vector<double> block_margins;  // 1 - unit block norm, per block
};

PointClassification classify(const HSet& h, const Vec& x, double tol = kClassifyTol);

// Natural structure: identity basis, one exit block then one entry block.
// A zero-dimensional side is omitted.
HSet natural_hset(const Vec& center, int exit_dim, double exit_radius, int entry_dim,
                  double entry_radius);

// Natural structure with one 1-dimensional block per radius entry,
// exit coordinates first.
HSet natural_hset(const Vec& center, const std::vector<double>& exit_radii,
                  const std::vector<double>& entry_radii);

// Text record with exact decimal round-trip.
std::string to_text(const HSet& h);
HSet parse_hset(std::istream& in);
HSet parse_hset_text(const std::string& text);

}  // namespace chainshadow
