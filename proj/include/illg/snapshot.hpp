#pragma once

#include <string>

#include "illg/grid.hpp"

namespace illg {

/// Full-field state in SI units, as stored on disk.
struct Snapshot {
  int nx = 0, ny = 0, nz = 0;
  double dx = 0.0, dy = 0.0, dz = 0.0;  // meters
  double time = 0.0;                    // seconds
  std::vector<Vec3> m;                  // canonical layout order
};

/// Text format, 17 significant digits (lossless double round trip):
///   line 1:  nx ny nz dx dy dz time
///   then one line per cell:  j k l x y z mx my mz
/// with 1-based indices (j,k,l) and cell-center positions in meters, in
/// canonical layout order (x fastest).
void write_snapshot(const Snapshot& s, const std::string& path);

/// Throws std::runtime_error on malformed files or cell-count mismatch.
[[nodiscard]] Snapshot read_snapshot(const std::string& path);

}  // namespace illg
