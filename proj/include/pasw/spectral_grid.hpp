#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pasw {

using cplx = std::complex<double>;

/// Base error type for everything the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// FFTW's planner is not thread-safe; plan execution is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

/// Signed index for position i of an n-point periodic axis: 0..n/2-1, -n/2..-1.
constexpr int wrap_index(int i, int n) { return i < n / 2 ? i : i - n; }

/// Spectral coefficients of a doubly periodic field on an nx x ny grid.
///
/// Storage is the full complex array, row-major with index i*ny + j (i along
/// x). Fields representing real physical data are Hermitian-symmetric;
/// intermediates of the Chebyshev recurrence are not, which is why the full
/// array is kept instead of the half-spectrum.
class Field2D {
 public:
  Field2D() = default;
  Field2D(int nx, int ny) : nx_(nx), ny_(ny), c_(static_cast<std::size_t>(nx) * ny) {}

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::size_t size() const { return c_.size(); }

  cplx& operator()(int i, int j) { return c_[static_cast<std::size_t>(i) * ny_ + j]; }
  const cplx& operator()(int i, int j) const { return c_[static_cast<std::size_t>(i) * ny_ + j]; }
  cplx& operator[](std::size_t n) { return c_[n]; }
  const cplx& operator[](std::size_t n) const { return c_[n]; }

  std::span<cplx> coeffs() { return c_; }
  std::span<const cplx> coeffs() const { return c_; }

  bool same_shape(const Field2D& o) const { return nx_ == o.nx_ && ny_ == o.ny_; }

  Field2D& operator+=(const Field2D& o) {
    require_shape(o);
    for (std::size_t n = 0; n < c_.size(); ++n) c_[n] += o.c_[n];
    return *this;
  }
  Field2D& operator-=(const Field2D& o) {
    require_shape(o);
    for (std::size_t n = 0; n < c_.size(); ++n) c_[n] -= o.c_[n];
    return *this;
  }
  Field2D& operator*=(cplx a) {
    for (auto& c : c_) c *= a;
    return *this;
  }
  Field2D& operator*=(double a) {
    for (auto& c : c_) c *= a;
    return *this;
  }
  /// this += a * x
  Field2D& axpy(cplx a, const Field2D& x) {
    require_shape(x);
    for (std::size_t n = 0; n < c_.size(); ++n) c_[n] += a * x.c_[n];
    return *this;
  }
  Field2D& axpy(double a, const Field2D& x) {
    require_shape(x);
    for (std::size_t n = 0; n < c_.size(); ++n) c_[n] += a * x.c_[n];
    return *this;
  }

  friend Field2D operator+(Field2D a, const Field2D& b) { return a += b; }
  friend Field2D operator-(Field2D a, const Field2D& b) { return a -= b; }
  friend Field2D operator*(double s, Field2D a) { return a *= s; }
  friend Field2D operator*(cplx s, Field2D a) { return a *= s; }

  bool operator==(const Field2D&) const = default;

 private:
  void require_shape(const Field2D& o) const {
    if (!same_shape(o)) throw Error("Field2D shape mismatch");
  }

  int nx_ = 0;
  int ny_ = 0;
  std::vector<cplx> c_;
};

inline double max_abs(const Field2D& f) {
  double m = 0.0;
  for (const auto& c : f.coeffs()) m = std::max(m, std::norm(c));
  return std::sqrt(m);
}

inline bool all_finite(const Field2D& f) {
  for (const auto& c : f.coeffs())
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  return true;
}

/// Location and size of the worst violation of c[-i,-j] = conj(c[i,j]).
struct HermitianResidual {
  double value = 0.0;  // absolute
  int i = 0;
  int j = 0;
};

inline HermitianResidual hermitian_residual(const Field2D& f) {
  HermitianResidual r;
  const int nx = f.nx(), ny = f.ny();
  for (int i = 0; i < nx; ++i) {
    const int mi = (nx - i) % nx;
    for (int j = 0; j < ny; ++j) {
      const int mj = (ny - j) % ny;
      const double d = std::norm(f(i, j) - std::conj(f(mi, mj)));
      if (d > r.value) r = {d, i, j};
    }
  }
  r.value = std::sqrt(r.value);
  return r;
}

/// Replace f by the Hermitian part (f + conj(f reflected)) / 2.
inline void project_hermitian(Field2D& f) {
  const int nx = f.nx(), ny = f.ny();
  for (int i = 0; i < nx; ++i) {
    const int mi = (nx - i) % nx;
    for (int j = 0; j < ny; ++j) {
      const int mj = (ny - j) % ny;
      const std::size_t a = static_cast<std::size_t>(i) * ny + j;
      const std::size_t b = static_cast<std::size_t>(mi) * ny + mj;
      if (b < a) continue;
      const cplx h = 0.5 * (f[a] + std::conj(f[b]));
      f[a] = h;
      f[b] = std::conj(h);
    }
  }
}

/// Doubly periodic rectangular grid with its Fourier transforms.
///
/// Normalization convention: to_spectral carries the 1/(nx*ny) factor, so
/// c(0,0) is the domain mean and to_physical is a plain inverse sum.
/// Immutable after construction; transforms may be called concurrently.
class SpectralGrid {
 public:
  /// Relative tolerance on the Hermitian residual accepted by to_physical.
  static constexpr double kHermitianTol = 1e-12;

  SpectralGrid(int nx, int ny, double lx, double ly) : nx_(nx), ny_(ny), lx_(lx), ly_(ly) {
    if (nx < 8 || ny < 8 || nx % 2 != 0 || ny % 2 != 0)
      throw Error("grid dimensions must be even and >= 8 (got " + std::to_string(nx) + " x " +
                  std::to_string(ny) + ")");
    if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly))
      throw Error("domain lengths must be positive and finite");

    kx_.resize(nx);
    dkx_.resize(nx);
    for (int i = 0; i < nx; ++i) {
      kx_[i] = 2.0 * std::numbers::pi * wrap_index(i, nx) / lx;
      dkx_[i] = (i == nx / 2) ? 0.0 : kx_[i];
    }
    ky_.resize(ny);
    dky_.resize(ny);
    for (int j = 0; j < ny; ++j) {
      ky_[j] = 2.0 * std::numbers::pi * wrap_index(j, ny) / ly;
      dky_[j] = (j == ny / 2) ? 0.0 : ky_[j];
    }
    keep_x_.resize(nx);
    keep_y_.resize(ny);
    // 3|m| < n keeps quadratic products alias-free on the retained band.
    for (int i = 0; i < nx; ++i) keep_x_[i] = 3 * std::abs(wrap_index(i, nx)) < nx;
    for (int j = 0; j < ny; ++j) keep_y_[j] = 3 * std::abs(wrap_index(j, ny)) < ny;

    plans_ = std::make_shared<const Plans>(nx, ny);
  }

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double lx() const { return lx_; }
  double ly() const { return ly_; }
  std::size_t points() const { return static_cast<std::size_t>(nx_) * ny_; }
  double cell_area() const { return lx_ * ly_ / static_cast<double>(points()); }
  double x(int i) const { return lx_ * i / nx_; }
  double y(int j) const { return ly_ * j / ny_; }

  /// Angular wavenumbers 2*pi*wrap(i)/Lx, including the Nyquist entry.
  const std::vector<double>& kx() const { return kx_; }
  const std::vector<double>& ky() const { return ky_; }
  /// Wavenumbers used by spectral derivatives: as kx/ky with the Nyquist
  /// entry zeroed, so derivatives of real fields stay real.
  const std::vector<double>& dkx() const { return dkx_; }
  const std::vector<double>& dky() const { return dky_; }

  bool dealias_mask(int i, int j) const { return keep_x_[i] && keep_y_[j]; }

  bool matches(const Field2D& f) const { return f.nx() == nx_ && f.ny() == ny_; }
  void require(const Field2D& f) const {
    if (!matches(f))
      throw Error("field shape " + std::to_string(f.nx()) + " x " + std::to_string(f.ny()) +
                  " does not match grid " + std::to_string(nx_) + " x " + std::to_string(ny_));
  }

  Field2D zeros() const { return Field2D(nx_, ny_); }

  Field2D to_spectral(std::span<const double> samples) const {
    if (samples.size() != points())
      throw Error("physical array has " + std::to_string(samples.size()) + " samples, grid has " +
                  std::to_string(points()));
    const int nyh = ny_ / 2 + 1;
    std::vector<double> in(samples.begin(), samples.end());
    std::vector<cplx> half(static_cast<std::size_t>(nx_) * nyh);
    fftw_execute_dft_r2c(plans_->forward, in.data(), reinterpret_cast<fftw_complex*>(half.data()));

    Field2D out(nx_, ny_);
    const double norm = 1.0 / static_cast<double>(points());
    for (int i = 0; i < nx_; ++i) {
      const int mi = (nx_ - i) % nx_;
      for (int j = 0; j < nyh; ++j) {
        const cplx c = half[static_cast<std::size_t>(i) * nyh + j] * norm;
        out(i, j) = c;
        if (j != 0 && j != ny_ / 2) out(mi, ny_ - j) = std::conj(c);
      }
    }
    // The j = 0 and j = ny/2 planes come straight from FFTW; symmetrize them
    // so the Hermitian invariant holds bitwise.
    for (int j : {0, ny_ / 2}) {
      for (int i = 0; i <= nx_ / 2; ++i) {
        const int mi = (nx_ - i) % nx_;
        const cplx h = 0.5 * (out(i, j) + std::conj(out(mi, j)));
        out(i, j) = h;
        out(mi, j) = std::conj(h);
      }
    }
    return out;
  }

  std::vector<double> to_physical(const Field2D& f) const {
    require(f);
    const auto res = hermitian_residual(f);
    const double scale = max_abs(f);
    if (res.value > kHermitianTol * scale)
      throw Error("field is not Hermitian-symmetric at mode (" + std::to_string(wrap_index(res.i, nx_)) +
                  ", " + std::to_string(wrap_index(res.j, ny_)) + "): residual " +
                  std::to_string(res.value / scale) + " relative");
    const int nyh = ny_ / 2 + 1;
    std::vector<cplx> half(static_cast<std::size_t>(nx_) * nyh);
    for (int i = 0; i < nx_; ++i)
      for (int j = 0; j < nyh; ++j) half[static_cast<std::size_t>(i) * nyh + j] = f(i, j);
    std::vector<double> out(points());
    fftw_execute_dft_c2r(plans_->inverse, reinterpret_cast<fftw_complex*>(half.data()), out.data());
    return out;
  }

  Field2D dealias(Field2D f) const {
    require(f);
    for (int i = 0; i < nx_; ++i)
      for (int j = 0; j < ny_; ++j)
        if (!dealias_mask(i, j)) f(i, j) = 0.0;
    return f;
  }

  Field2D ddx(const Field2D& f) const {
    require(f);
    Field2D out(nx_, ny_);
    for (int i = 0; i < nx_; ++i)
      for (int j = 0; j < ny_; ++j) out(i, j) = cplx(0.0, dkx_[i]) * f(i, j);
    return out;
  }

  Field2D ddy(const Field2D& f) const {
    require(f);
    Field2D out(nx_, ny_);
    for (int i = 0; i < nx_; ++i)
      for (int j = 0; j < ny_; ++j) out(i, j) = cplx(0.0, dky_[j]) * f(i, j);
    return out;
  }

 private:
  struct Plans {
    fftw_plan forward = nullptr;
    fftw_plan inverse = nullptr;

    Plans(int nx, int ny) {
      const std::size_t n = static_cast<std::size_t>(nx) * ny;
      const std::size_t nh = static_cast<std::size_t>(nx) * (ny / 2 + 1);
      std::lock_guard lock(fftw_planner_mutex());
      double* r = fftw_alloc_real(n);
      fftw_complex* c = fftw_alloc_complex(nh);
      // UNALIGNED: plans are executed on std::vector storage.
      const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
      forward = fftw_plan_dft_r2c_2d(nx, ny, r, c, flags);
      inverse = fftw_plan_dft_c2r_2d(nx, ny, c, r, flags);
      fftw_free(r);
      fftw_free(c);
      if (!forward || !inverse) throw Error("FFTW planning failed");
    }
    ~Plans() {
      std::lock_guard lock(fftw_planner_mutex());
      fftw_destroy_plan(forward);
      fftw_destroy_plan(inverse);
    }
    Plans(const Plans&) = delete;
    Plans& operator=(const Plans&) = delete;
  };

  int nx_;
  int ny_;
  double lx_;
  double ly_;
  std::vector<double> kx_, ky_, dkx_, dky_;
  std::vector<bool> keep_x_, keep_y_;
  std::shared_ptr<const Plans> plans_;
};

inline SpectralGrid make_grid(int nx, int ny, double lx, double ly) { return SpectralGrid(nx, ny, lx, ly); }

}  // namespace pasw
