#include "illg/demag.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace illg {

namespace {

constexpr double kPi = 3.14159265358979323846;

/// Doubly compensated summation after ordering by decreasing magnitude.
/// The Newell sums cancel heavily at large offsets; plain addition loses
/// most of the significand there.
double accurate_sum(int n, double* arr) {
  std::sort(arr, arr + n, [](double a, double b) { return std::fabs(a) > std::fabs(b); });
  double sum = arr[0], corr = 0.0;
  for (int i = 1; i < n; ++i) {
    const double x = arr[i];
    const double y = corr + x;
    const double u = x - (y - corr);
    const double t = y + sum;
    const double v = y - (t - sum);
    const double z = u + v;
    sum = t + z;
    corr = z - (sum - t);
  }
  return sum;
}

/// Newell's f, even in all arguments. Guards keep the logs and atan2 finite
/// as arguments approach zero.
double newell_f(double x, double y, double z) {
  x = std::fabs(x);
  y = std::fabs(y);
  z = std::fabs(z);
  const double xsq = x * x, ysq = y * y, zsq = z * z;
  double R = xsq + ysq + zsq;
  if (R <= 0.0) return 0.0;
  R = std::sqrt(R);

  double piece[8];
  int n = 0;
  if (z > 0.0) {
    piece[n++] = 2.0 * (2.0 * xsq - ysq - zsq) * R;
    const double xyz = x * y * z;
    if (xyz > 0.0) piece[n++] = -12.0 * xyz * std::atan2(y * z, x * R);
    const double xz = xsq + zsq;
    if (y > 0.0 && xz > 0.0) {
      const double lg = std::log(((y + R) * (y + R)) / xz);
      piece[n++] = 3.0 * y * zsq * lg;
      piece[n++] = -3.0 * y * xsq * lg;
    }
    const double xy = xsq + ysq;
    if (xy > 0.0) {
      const double lg = std::log(((z + R) * (z + R)) / xy);
      piece[n++] = 3.0 * z * ysq * lg;
      piece[n++] = -3.0 * z * xsq * lg;
    }
  } else {
    if (x == y) {
      const double K = 2.0 * std::sqrt(2.0) - 6.0 * std::log(1.0 + std::sqrt(2.0));
      piece[n++] = K * xsq * x;
    } else {
      piece[n++] = 2.0 * (2.0 * xsq - ysq) * R;
      if (y > 0.0 && x > 0.0) piece[n++] = -6.0 * y * xsq * std::log((y + R) / x);
    }
  }
  return accurate_sum(n, piece) / 12.0;
}

/// Newell's g, odd in x and y, even in z.
double newell_g(double x, double y, double z) {
  double sign = 1.0;
  if (x < 0.0) sign = -sign;
  if (y < 0.0) sign = -sign;
  x = std::fabs(x);
  y = std::fabs(y);
  z = std::fabs(z);

  const double xsq = x * x, ysq = y * y, zsq = z * z;
  double R = xsq + ysq + zsq;
  if (R <= 0.0) return 0.0;
  R = std::sqrt(R);

  double piece[7];
  int n = 0;
  piece[n++] = -2.0 * x * y * R;
  if (z > 0.0) {
    piece[n++] = -z * zsq * std::atan2(x * y, z * R);
    piece[n++] = -3.0 * z * ysq * std::atan2(x * z, y * R);
    piece[n++] = -3.0 * z * xsq * std::atan2(y * z, x * R);
    const double xy = xsq + ysq;
    if (xy > 0.0) piece[n++] = 6.0 * x * y * z * std::log((z + R) / std::sqrt(xy));
    const double yz = ysq + zsq;
    if (yz > 0.0) piece[n++] = y * (3.0 * zsq - ysq) * std::log((x + R) / std::sqrt(yz));
    const double xz = xsq + zsq;
    if (xz > 0.0) piece[n++] = x * (3.0 * zsq - xsq) * std::log((y + R) / std::sqrt(xz));
  } else {
    if (y > 0.0) piece[n++] = -y * ysq * std::log((x + R) / y);
    if (x > 0.0) piece[n++] = -x * xsq * std::log((y + R) / x);
  }
  return (1.0 / 6.0) * sign * accurate_sum(n, piece);
}

/// Self term Dx with Hx = -Dx Mx / (4 pi dx dy dz). Assumes positive sizes.
double self_demag_dx(double x, double y, double z) {
  if (x == y && y == z) return 4.0 * kPi * x * x * x / 3.0;

  const double xsq = x * x, ysq = y * y, zsq = z * z;
  const double diag = std::sqrt(xsq + ysq + zsq);
  const double mpxy = (x - y) * (x + y);
  const double mpxz = (x - z) * (x + z);

  double arr[15];
  arr[0] = -4.0 * (2.0 * xsq * x - ysq * y - zsq * z);
  arr[1] = 4.0 * (xsq + mpxy) * std::sqrt(xsq + ysq);
  arr[2] = 4.0 * (xsq + mpxz) * std::sqrt(xsq + zsq);
  arr[3] = -4.0 * (ysq + zsq) * std::sqrt(ysq + zsq);
  arr[4] = -4.0 * diag * (mpxy + mpxz);
  arr[5] = 24.0 * x * y * z * std::atan(y * z / (x * diag));
  arr[6] = 12.0 * (z + y) * xsq * std::log(x);
  arr[7] = 12.0 * z * ysq * std::log((std::sqrt(ysq + zsq) + z) / y);
  arr[8] = -12.0 * z * xsq * std::log(std::sqrt(xsq + zsq) + z);
  arr[9] = 12.0 * z * mpxy * std::log(diag + z);
  arr[10] = -6.0 * z * mpxy * std::log(xsq + ysq);
  arr[11] = 12.0 * y * zsq * std::log((std::sqrt(ysq + zsq) + y) / z);
  arr[12] = -12.0 * y * xsq * std::log(std::sqrt(xsq + ysq) + y);
  arr[13] = 12.0 * y * mpxz * std::log(diag + y);
  arr[14] = -6.0 * y * mpxz * std::log(xsq + zsq);
  return accurate_sum(15, arr) / 3.0;
}

/// 27-point second-difference stencil of f over one cell pair; equals
/// Nxx * 4 pi V. The same weights with g give Nxy * 4 pi V.
template <typename F>
double sda_sum(const F& fn, double x, double y, double z, double dx, double dy, double dz) {
  double arr[27];
  int n = 0;
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j)
      for (int k = -1; k <= 1; ++k) {
        const double w = (i == 0 ? 2.0 : -1.0) * (j == 0 ? 2.0 : -1.0) * (k == 0 ? 2.0 : -1.0);
        arr[n++] = w * fn(x + i * dx, y + j * dy, z + k * dz);
      }
  return accurate_sum(27, arr);
}

double sda00(double x, double y, double z, double dx, double dy, double dz) {
  if (x == 0.0 && y == 0.0 && z == 0.0) return self_demag_dx(dx, dy, dz);
  return sda_sum(newell_f, x, y, z, dx, dy, dz);
}

double sda01(double x, double y, double z, double dx, double dy, double dz) {
  return sda_sum(newell_g, x, y, z, dx, dy, dz);
}

}  // namespace

SymTensor3 demag_cell_tensor_newell(const Vec3& offset, const Vec3& cell) {
  const double x = offset.x, y = offset.y, z = offset.z;
  const double dx = cell.x, dy = cell.y, dz = cell.z;
  const double scale = 1.0 / (4.0 * kPi * dx * dy * dz);
  SymTensor3 t;
  t.xx = scale * sda00(x, y, z, dx, dy, dz);
  t.yy = scale * sda00(y, z, x, dy, dz, dx);
  t.zz = scale * sda00(z, x, y, dz, dx, dy);
  t.xy = scale * sda01(x, y, z, dx, dy, dz);
  t.xz = scale * sda01(x, z, y, dx, dz, dy);
  t.yz = scale * sda01(y, z, x, dy, dz, dx);
  return t;
}

SymTensor3 demag_cell_tensor_dipole(const Vec3& offset, const Vec3& cell) {
  const double R2 = dot(offset, offset);
  const double R = std::sqrt(R2);
  const double V = cell.x * cell.y * cell.z;
  const double scale = V / (4.0 * kPi * R2 * R2 * R);
  SymTensor3 t;
  t.xx = scale * (R2 - 3.0 * offset.x * offset.x);
  t.yy = scale * (R2 - 3.0 * offset.y * offset.y);
  t.zz = scale * (R2 - 3.0 * offset.z * offset.z);
  t.xy = scale * (-3.0 * offset.x * offset.y);
  t.xz = scale * (-3.0 * offset.x * offset.z);
  t.yz = scale * (-3.0 * offset.y * offset.z);
  return t;
}

SymTensor3 demag_cell_tensor(const Vec3& offset, const Vec3& cell) {
  if (norm(offset) > 30.0 * norm(cell)) return demag_cell_tensor_dipole(offset, cell);
  return demag_cell_tensor_newell(offset, cell);
}

namespace {

/// Tensor table over absolute integer offsets. Oddness of the off-diagonal
/// components under single-axis reflection supplies the signed entries, so
/// each distinct |offset| is evaluated once.
struct TensorTable {
  int nx, ny, nz;
  std::vector<SymTensor3> t;

  TensorTable(const Grid& g, const Vec3& cell) : nx(g.nx), ny(g.ny), nz(g.nz) {
    t.resize(static_cast<std::size_t>(nx) * ny * nz);
    for (int k = 0; k < nz; ++k)
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
          t[idx(i, j, k)] = demag_cell_tensor({i * cell.x, j * cell.y, k * cell.z}, cell);
  }

  [[nodiscard]] std::size_t idx(int i, int j, int k) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(nx) * (j + static_cast<std::size_t>(ny) * k);
  }

  [[nodiscard]] SymTensor3 at(int ox, int oy, int oz) const {
    const double sx = ox < 0 ? -1.0 : 1.0;
    const double sy = oy < 0 ? -1.0 : 1.0;
    const double sz = oz < 0 ? -1.0 : 1.0;
    SymTensor3 s = t[idx(std::abs(ox), std::abs(oy), std::abs(oz))];
    s.xy *= sx * sy;
    s.xz *= sx * sz;
    s.yz *= sy * sz;
    return s;
  }
};

std::size_t padded_index(int i, int j, int k, int px, int py) {
  return static_cast<std::size_t>(i) + static_cast<std::size_t>(px) * (j + static_cast<std::size_t>(py) * k);
}

struct FftwBuffer {
  void* p = nullptr;
  explicit FftwBuffer(std::size_t bytes) : p(fftw_malloc(bytes)) {
    if (!p) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(p); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
};

}  // namespace

DemagKernel::~DemagKernel() {
  if (fwd_) fftw_destroy_plan(reinterpret_cast<fftw_plan>(fwd_));
  if (bwd_) fftw_destroy_plan(reinterpret_cast<fftw_plan>(bwd_));
}

DemagKernel::DemagKernel(DemagKernel&& o) noexcept { *this = std::move(o); }

DemagKernel& DemagKernel::operator=(DemagKernel&& o) noexcept {
  if (this == &o) return *this;
  this->~DemagKernel();
  grid_ = o.grid_;
  cell_ = o.cell_;
  self_ = o.self_;
  px_ = o.px_;
  py_ = o.py_;
  pz_ = o.pz_;
  spectral_count_ = o.spectral_count_;
  for (int c = 0; c < 6; ++c) nhat_[c] = std::move(o.nhat_[c]);
  fwd_ = o.fwd_;
  bwd_ = o.bwd_;
  o.fwd_ = nullptr;
  o.bwd_ = nullptr;
  return *this;
}

DemagKernel build_demag_kernel(const Grid& g, const Vec3& cell_m) {
  if (!(cell_m.x > 0.0) || !(cell_m.y > 0.0) || !(cell_m.z > 0.0))
    throw std::invalid_argument("build_demag_kernel: cell dimensions must be positive");

  DemagKernel k;
  k.grid_ = g;
  k.cell_ = cell_m;
  // 2n holds every linear-convolution offset without wrap collisions; a
  // singleton axis has only the zero offset and needs no padding.
  k.px_ = g.nx == 1 ? 1 : 2 * g.nx;
  k.py_ = g.ny == 1 ? 1 : 2 * g.ny;
  k.pz_ = g.nz == 1 ? 1 : 2 * g.nz;
  const std::size_t real_count = static_cast<std::size_t>(k.px_) * k.py_ * k.pz_;
  k.spectral_count_ = static_cast<std::size_t>(k.px_ / 2 + 1) * k.py_ * k.pz_;

  TensorTable table(g, cell_m);
  k.self_ = table.at(0, 0, 0);

  FftwBuffer rbuf(sizeof(double) * real_count);
  FftwBuffer cbuf(sizeof(fftw_complex) * k.spectral_count_);
  auto* real = static_cast<double*>(rbuf.p);
  auto* cpx = static_cast<fftw_complex*>(cbuf.p);

  // FFTW's r2c wants row-major (n0, n1, n2) with n2 contiguous; our canonical
  // layout is x fastest, so (n0, n1, n2) = (pz, py, px).
  fftw_plan fwd = fftw_plan_dft_r2c_3d(k.pz_, k.py_, k.px_, real, cpx, FFTW_ESTIMATE);
  fftw_plan bwd = fftw_plan_dft_c2r_3d(k.pz_, k.py_, k.px_, cpx, real, FFTW_ESTIMATE);
  if (!fwd || !bwd) throw std::runtime_error("build_demag_kernel: FFTW planning failed");
  k.fwd_ = reinterpret_cast<fftw_plan_s*>(fwd);
  k.bwd_ = reinterpret_cast<fftw_plan_s*>(bwd);

  auto component = [](const SymTensor3& t, int c) {
    switch (c) {
      case 0: return t.xx;
      case 1: return t.yy;
      case 2: return t.zz;
      case 3: return t.xy;
      case 4: return t.xz;
      default: return t.yz;
    }
  };

  for (int c = 0; c < 6; ++c) {
    std::fill(real, real + real_count, 0.0);
    for (int oz = -(g.nz - 1); oz <= g.nz - 1; ++oz)
      for (int oy = -(g.ny - 1); oy <= g.ny - 1; ++oy)
        for (int ox = -(g.nx - 1); ox <= g.nx - 1; ++ox) {
          const int wi = (ox + k.px_) % k.px_;
          const int wj = (oy + k.py_) % k.py_;
          const int wk = (oz + k.pz_) % k.pz_;
          real[padded_index(wi, wj, wk, k.px_, k.py_)] = component(table.at(ox, oy, oz), c);
        }
    fftw_execute_dft_r2c(fwd, real, cpx);
    k.nhat_[c].resize(k.spectral_count_);
    for (std::size_t i = 0; i < k.spectral_count_; ++i)
      k.nhat_[c][i] = {cpx[i][0], cpx[i][1]};
  }
  return k;
}

VectorField stray_field(const DemagKernel& k, const VectorField& m) {
  if (!(m.grid == k.grid())) throw std::invalid_argument("stray_field: grid mismatch");
  const Grid& g = k.grid_;
  const int px = k.px_, py = k.py_, pz = k.pz_;
  const std::size_t real_count = static_cast<std::size_t>(px) * py * pz;
  const std::size_t cpx_count = k.spectral_count_;

  // One allocation per array: fftw_malloc alignment must match the buffers
  // the plans were created with, and slicing a single block can lose it.
  FftwBuffer rbuf0(sizeof(double) * real_count), rbuf1(sizeof(double) * real_count),
      rbuf2(sizeof(double) * real_count);
  FftwBuffer cbuf0(sizeof(fftw_complex) * cpx_count), cbuf1(sizeof(fftw_complex) * cpx_count),
      cbuf2(sizeof(fftw_complex) * cpx_count);
  double* real[3] = {static_cast<double*>(rbuf0.p), static_cast<double*>(rbuf1.p),
                     static_cast<double*>(rbuf2.p)};
  fftw_complex* cpx[3] = {static_cast<fftw_complex*>(cbuf0.p),
                          static_cast<fftw_complex*>(cbuf1.p),
                          static_cast<fftw_complex*>(cbuf2.p)};

  for (int c = 0; c < 3; ++c) std::fill(real[c], real[c] + real_count, 0.0);
  for (int kk = 0; kk < g.nz; ++kk)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const std::size_t src = 3 * g.index(i, j, kk);
        const std::size_t dst = padded_index(i, j, kk, px, py);
        real[0][dst] = m.values[src];
        real[1][dst] = m.values[src + 1];
        real[2][dst] = m.values[src + 2];
      }

  auto fwd = reinterpret_cast<fftw_plan>(k.fwd_);
  auto bwd = reinterpret_cast<fftw_plan>(k.bwd_);
  for (int c = 0; c < 3; ++c) fftw_execute_dft_r2c(fwd, real[c], cpx[c]);

  for (std::size_t i = 0; i < cpx_count; ++i) {
    const std::complex<double> mx(cpx[0][i][0], cpx[0][i][1]);
    const std::complex<double> my(cpx[1][i][0], cpx[1][i][1]);
    const std::complex<double> mz(cpx[2][i][0], cpx[2][i][1]);
    const std::complex<double> hx = -(k.nhat_[0][i] * mx + k.nhat_[3][i] * my + k.nhat_[4][i] * mz);
    const std::complex<double> hy = -(k.nhat_[3][i] * mx + k.nhat_[1][i] * my + k.nhat_[5][i] * mz);
    const std::complex<double> hz = -(k.nhat_[4][i] * mx + k.nhat_[5][i] * my + k.nhat_[2][i] * mz);
    cpx[0][i][0] = hx.real();
    cpx[0][i][1] = hx.imag();
    cpx[1][i][0] = hy.real();
    cpx[1][i][1] = hy.imag();
    cpx[2][i][0] = hz.real();
    cpx[2][i][1] = hz.imag();
  }

  for (int c = 0; c < 3; ++c) fftw_execute_dft_c2r(bwd, cpx[c], real[c]);

  VectorField h(g);
  const double scale = 1.0 / static_cast<double>(real_count);
  for (int kk = 0; kk < g.nz; ++kk)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const std::size_t src = padded_index(i, j, kk, px, py);
        const std::size_t dst = 3 * g.index(i, j, kk);
        h.values[dst] = scale * real[0][src];
        h.values[dst + 1] = scale * real[1][src];
        h.values[dst + 2] = scale * real[2][src];
      }
  return h;
}

VectorField stray_field_direct(const Grid& g, const Vec3& cell_m, const VectorField& m) {
  if (!(m.grid == g)) throw std::invalid_argument("stray_field_direct: grid mismatch");
  TensorTable table(g, cell_m);
  VectorField h(g);
  for (int kt = 0; kt < g.nz; ++kt)
    for (int jt = 0; jt < g.ny; ++jt)
      for (int it = 0; it < g.nx; ++it) {
        Vec3 acc{};
        for (int ks = 0; ks < g.nz; ++ks)
          for (int js = 0; js < g.ny; ++js)
            for (int is = 0; is < g.nx; ++is)
              acc -= apply(table.at(it - is, jt - js, kt - ks), m.at(g.index(is, js, ks)));
        h.set(g.index(it, jt, kt), acc);
      }
  return h;
}

}  // namespace illg
