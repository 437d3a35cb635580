#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tilegp {

/// Tile grid geometry for an n x n symmetric matrix: nt = ceil(n/ts) tile
/// rows/columns, the last tile possibly ragged.
struct TileLayout {
  int n = 0;
  int ts = 0;
  int nt = 0;

  TileLayout() = default;
  TileLayout(int n_, int ts_);

  int tile_dim(int i) const { return (i == nt - 1) ? n - i * ts : ts; }
  int offset(int i) const { return i * ts; }
};

enum class TileKind : std::uint8_t { Dense, Zero, LowRank };

/// One tile. Dense tiles hold a row-major rows x cols block in `a`. LowRank
/// tiles hold the factors of U*V: U (rows x rank, row-major) in `a` and
/// V (rank x cols, row-major) in `b`.
struct Tile {
  TileKind kind = TileKind::Dense;
  int rows = 0;
  int cols = 0;
  int rank = 0;
  std::vector<double> a;
  std::vector<double> b;
};

enum class ComputeMode { Exact, Dst, Tlr };

/// Symmetric n x n matrix stored as the lower-triangular grid of tiles.
/// Diagonal tiles are always Dense; the mode decides what off-diagonal tiles
/// may look like (Figure-1 style): Exact keeps them Dense, Dst zeroes tiles
/// beyond a bandwidth, Tlr stores them rank-truncated to an accuracy.
class TiledMatrix {
 public:
  TiledMatrix() = default;
  TiledMatrix(TileLayout layout, ComputeMode mode);

  const TileLayout& layout() const { return layout_; }
  ComputeMode mode() const { return mode_; }

  Tile& tile(int i, int j) { return tiles_[index(i, j)]; }
  const Tile& tile(int i, int j) const { return tiles_[index(i, j)]; }

  int dst_bandwidth() const { return dst_bandwidth_; }
  double tlr_accuracy() const { return tlr_accuracy_; }

  /// Set while assembling when two locations produce identical rows; the
  /// factorization will then raise the hard singularity error.
  bool duplicate_warning() const { return duplicate_warning_; }
  void set_duplicate_warning() { duplicate_warning_ = true; }

  /// Full dense reconstruction, mirroring the lower triangle (covariance use).
  std::vector<double> densify_symmetric() const;
  /// Dense reconstruction of the stored lower triangle only (factor use).
  std::vector<double> densify_lower() const;

 private:
  friend TiledMatrix dst_truncate(TiledMatrix matrix, int bandwidth);
  friend TiledMatrix tlr_compress_impl(const TiledMatrix&, double, class WorkerPool&);

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * (i + 1) / 2 + j;
  }

  TileLayout layout_;
  ComputeMode mode_ = ComputeMode::Exact;
  int dst_bandwidth_ = 0;
  double tlr_accuracy_ = 0.0;
  bool duplicate_warning_ = false;
  std::vector<Tile> tiles_;
};

/// Zeroes every tile with |i-j| > bandwidth (diagonal tiles always stay).
/// The result factorizes to the Cholesky factor of the truncated matrix.
TiledMatrix dst_truncate(TiledMatrix matrix, int bandwidth);

/// Debug dump: header (n, ts, mode), then tiles in row-major tile order,
/// each prefixed by its variant tag and rank; payload little-endian doubles.
void write_tiled(const std::string& path, const TiledMatrix& matrix);
TiledMatrix read_tiled(const std::string& path);

}  // namespace tilegp
