#include "tilegp/tiled_matrix.hpp"

#include <cstdint>
#include <fstream>
#include <stdexcept>

namespace tilegp {

TileLayout::TileLayout(int n_, int ts_) : n(n_), ts(ts_) {
  if (n < 1) throw std::invalid_argument("TileLayout: n must be >= 1");
  if (ts < 1) throw std::invalid_argument("TileLayout: ts must be >= 1");
  if (ts > n) ts = n;
  nt = (n + ts - 1) / ts;
}

TiledMatrix::TiledMatrix(TileLayout layout, ComputeMode mode) : layout_(layout), mode_(mode) {
  tiles_.resize(static_cast<std::size_t>(layout_.nt) * (layout_.nt + 1) / 2);
  for (int i = 0; i < layout_.nt; ++i) {
    for (int j = 0; j <= i; ++j) {
      Tile& t = tile(i, j);
      t.rows = layout_.tile_dim(i);
      t.cols = layout_.tile_dim(j);
      t.kind = TileKind::Dense;
      t.a.assign(static_cast<std::size_t>(t.rows) * t.cols, 0.0);
    }
  }
}

namespace {

void add_tile_to(const Tile& t, int row0, int col0, int n, std::vector<double>& out) {
  if (t.kind == TileKind::Zero) return;
  if (t.kind == TileKind::Dense) {
    for (int r = 0; r < t.rows; ++r)
      for (int c = 0; c < t.cols; ++c) out[static_cast<std::size_t>(row0 + r) * n + col0 + c] = t.a[static_cast<std::size_t>(r) * t.cols + c];
    return;
  }
  for (int r = 0; r < t.rows; ++r) {
    for (int c = 0; c < t.cols; ++c) {
      double s = 0.0;
      for (int k = 0; k < t.rank; ++k)
        s += t.a[static_cast<std::size_t>(r) * t.rank + k] * t.b[static_cast<std::size_t>(k) * t.cols + c];
      out[static_cast<std::size_t>(row0 + r) * n + col0 + c] = s;
    }
  }
}

}  // namespace

std::vector<double> TiledMatrix::densify_lower() const {
  const int n = layout_.n;
  std::vector<double> out(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < layout_.nt; ++i)
    for (int j = 0; j <= i; ++j) add_tile_to(tile(i, j), layout_.offset(i), layout_.offset(j), n, out);
  return out;
}

std::vector<double> TiledMatrix::densify_symmetric() const {
  std::vector<double> out = densify_lower();
  const int n = layout_.n;
  for (int r = 0; r < n; ++r)
    for (int c = r + 1; c < n; ++c) out[static_cast<std::size_t>(r) * n + c] = out[static_cast<std::size_t>(c) * n + r];
  return out;
}

TiledMatrix dst_truncate(TiledMatrix matrix, int bandwidth) {
  if (bandwidth < 0) throw std::invalid_argument("dst_truncate: bandwidth must be >= 0");
  matrix.mode_ = ComputeMode::Dst;
  matrix.dst_bandwidth_ = bandwidth;
  const int nt = matrix.layout().nt;
  for (int i = 0; i < nt; ++i) {
    for (int j = 0; j <= i; ++j) {
      if (i - j > bandwidth) {
        Tile& t = matrix.tile(i, j);
        t.kind = TileKind::Zero;
        t.rank = 0;
        t.a.clear();
        t.a.shrink_to_fit();
        t.b.clear();
        t.b.shrink_to_fit();
      }
    }
  }
  return matrix;
}

namespace {

template <typename T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw std::runtime_error("tiled matrix file truncated");
  return v;
}

}  // namespace

void write_tiled(const std::string& path, const TiledMatrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  put<std::int64_t>(out, m.layout().n);
  put<std::int64_t>(out, m.layout().ts);
  put<std::int64_t>(out, static_cast<std::int64_t>(m.mode()));
  for (int i = 0; i < m.layout().nt; ++i) {
    for (int j = 0; j <= i; ++j) {
      const Tile& t = m.tile(i, j);
      put<std::int64_t>(out, static_cast<std::int64_t>(t.kind));
      put<std::int64_t>(out, t.rank);
      if (t.kind == TileKind::Dense) {
        out.write(reinterpret_cast<const char*>(t.a.data()), static_cast<std::streamsize>(t.a.size() * sizeof(double)));
      } else if (t.kind == TileKind::LowRank) {
        out.write(reinterpret_cast<const char*>(t.a.data()), static_cast<std::streamsize>(t.a.size() * sizeof(double)));
        out.write(reinterpret_cast<const char*>(t.b.data()), static_cast<std::streamsize>(t.b.size() * sizeof(double)));
      }
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

TiledMatrix read_tiled(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  const auto n = get<std::int64_t>(in);
  const auto ts = get<std::int64_t>(in);
  const auto mode = get<std::int64_t>(in);
  if (mode < 0 || mode > 2) throw std::runtime_error(path + ": bad mode tag");
  TiledMatrix m(TileLayout(static_cast<int>(n), static_cast<int>(ts)), static_cast<ComputeMode>(mode));
  for (int i = 0; i < m.layout().nt; ++i) {
    for (int j = 0; j <= i; ++j) {
      Tile& t = m.tile(i, j);
      const auto kind = get<std::int64_t>(in);
      const auto rank = get<std::int64_t>(in);
      if (kind < 0 || kind > 2) throw std::runtime_error(path + ": bad tile tag");
      t.kind = static_cast<TileKind>(kind);
      t.rank = static_cast<int>(rank);
      if (t.kind == TileKind::Dense) {
        t.a.resize(static_cast<std::size_t>(t.rows) * t.cols);
        in.read(reinterpret_cast<char*>(t.a.data()), static_cast<std::streamsize>(t.a.size() * sizeof(double)));
      } else if (t.kind == TileKind::Zero) {
        t.a.clear();
        t.b.clear();
      } else {
        t.a.resize(static_cast<std::size_t>(t.rows) * t.rank);
        t.b.resize(static_cast<std::size_t>(t.rank) * t.cols);
        in.read(reinterpret_cast<char*>(t.a.data()), static_cast<std::streamsize>(t.a.size() * sizeof(double)));
        in.read(reinterpret_cast<char*>(t.b.data()), static_cast<std::streamsize>(t.b.size() * sizeof(double)));
      }
      if (!in) throw std::runtime_error(path + ": truncated tile payload");
    }
  }
  return m;
}

}  // namespace tilegp
