#pragma once

#include <complex>
#include <vector>

#include "illg/grid.hpp"
#include "illg/vec3.hpp"

// Forward declaration so the header does not leak <fftw3.h>.
struct fftw_plan_s;

namespace illg {

/// Symmetric cell-averaged magnetostatic tensor, dimensionless.
/// The stray field of a source cell with moment m (units of Ms) at relative
/// offset r is h = -N(r) m.
struct SymTensor3 {
  double xx = 0.0, yy = 0.0, zz = 0.0;
  double xy = 0.0, xz = 0.0, yz = 0.0;
};

inline Vec3 apply(const SymTensor3& n, const Vec3& m) {
  return {n.xx * m.x + n.xy * m.y + n.xz * m.z,
          n.xy * m.x + n.yy * m.y + n.yz * m.z,
          n.xz * m.x + n.yz * m.y + n.zz * m.z};
}

/// Newell cell-averaged tensor between two identical boxes of size `cell`
/// (meters) whose centers differ by `offset` (meters). Offsets farther than
/// 30 cell diagonals switch to the point-dipole asymptote
///   N_ij = V (delta_ij R^2 - 3 R_i R_j) / (4 pi R^5),
/// whose relative error O((d/R)^2) is below the switch point's accuracy.
[[nodiscard]] SymTensor3 demag_cell_tensor(const Vec3& offset, const Vec3& cell);

/// Same tensor without the far-field switch (exposed for the asymptote
/// cross-check in tests).
[[nodiscard]] SymTensor3 demag_cell_tensor_newell(const Vec3& offset, const Vec3& cell);
[[nodiscard]] SymTensor3 demag_cell_tensor_dipole(const Vec3& offset, const Vec3& cell);

/// Precomputed spectral tensor on the zero-padded cyclic domain plus FFT
/// plans. Building is O(N log N) plus one Newell evaluation per distinct
/// absolute offset; evaluation is 6 transforms. Move-only (owns plans).
class DemagKernel {
 public:
  DemagKernel() = default;
  ~DemagKernel();
  DemagKernel(DemagKernel&&) noexcept;
  DemagKernel& operator=(DemagKernel&&) noexcept;
  DemagKernel(const DemagKernel&) = delete;
  DemagKernel& operator=(const DemagKernel&) = delete;

  [[nodiscard]] const Grid& grid() const { return grid_; }
  [[nodiscard]] const Vec3& cell() const { return cell_; }
  [[nodiscard]] SymTensor3 self_tensor() const { return self_; }

 private:
  friend DemagKernel build_demag_kernel(const Grid& g, const Vec3& cell_m);
  friend VectorField stray_field(const DemagKernel& k, const VectorField& m);

  Grid grid_{};
  Vec3 cell_{};
  SymTensor3 self_{};
  int px_ = 0, py_ = 0, pz_ = 0;  // padded dims (2n, or 1 where n == 1)
  std::size_t spectral_count_ = 0;
  // xx, yy, zz, xy, xz, yz
  std::vector<std::complex<double>> nhat_[6];
  fftw_plan_s* fwd_ = nullptr;
  fftw_plan_s* bwd_ = nullptr;
};

/// cell_m is the physical cell size in meters (the tensor is scale
/// invariant, only aspect ratios matter). Throws on non-positive sizes.
[[nodiscard]] DemagKernel build_demag_kernel(const Grid& g, const Vec3& cell_m);

/// h_s = -N * m via padded transforms. Scratch is allocated per call, so
/// concurrent evaluations against the same kernel are safe.
[[nodiscard]] VectorField stray_field(const DemagKernel& k, const VectorField& m);

/// O(N^2) reference summation over cell pairs with the same cell-averaged
/// tensor. Oracle for the transform path; use on small grids only.
[[nodiscard]] VectorField stray_field_direct(const Grid& g, const Vec3& cell_m,
                                             const VectorField& m);

}  // namespace illg
