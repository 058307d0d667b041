#include "wbfv/convolution.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>

namespace wbfv {

namespace {
// the FFTW planner is not thread safe
std::mutex planner_mutex;
}  // namespace

struct GridConvolution::Fft {
  std::size_t len = 0;
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  std::vector<std::complex<double>> kernel;
  fftw_plan forward = nullptr, backward = nullptr;

  explicit Fft(std::span<const double> row) {
    const std::size_t n = row.size();
    len = 1;
    while (len < 2 * n) len <<= 1;
    real = fftw_alloc_real(len);
    spec = fftw_alloc_complex(len / 2 + 1);
    const int l = static_cast<int>(len);
    std::unique_lock lock(planner_mutex);
    forward = fftw_plan_dft_r2c_1d(l, real, spec, FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_1d(l, spec, real, FFTW_ESTIMATE);
    lock.unlock();
    std::fill(real, real + len, 0.0);
    for (std::size_t k = 0; k < n; ++k) real[k] = row[k];
    for (std::size_t k = 1; k < n; ++k) real[len - k] = row[k];
    fftw_execute(forward);
    kernel.resize(len / 2 + 1);
    for (std::size_t k = 0; k <= len / 2; ++k) kernel[k] = {spec[k][0], spec[k][1]};
  }
  ~Fft() {
    std::lock_guard lock(planner_mutex);
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
    fftw_free(real);
    fftw_free(spec);
  }
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  void apply(std::span<const double> f, double h, std::span<double> out) {
    const std::size_t n = f.size();
    std::fill(real, real + len, 0.0);
    for (std::size_t j = 0; j < n; ++j) real[j] = h * f[j];
    fftw_execute(forward);
    for (std::size_t k = 0; k <= len / 2; ++k) {
      const std::complex<double> z = std::complex<double>(spec[k][0], spec[k][1]) * kernel[k];
      spec[k][0] = z.real();
      spec[k][1] = z.imag();
    }
    fftw_execute(backward);
    const double scale = 1.0 / static_cast<double>(len);
    for (std::size_t i = 0; i < n; ++i) out[i] = real[i] * scale;
  }
};

GridConvolution::GridConvolution(const Grid& g, const Entry& entry)
    : n_(g.size()), toeplitz_(g.is_uniform()), widths_(g.widths().begin(), g.widths().end()) {
  if (toeplitz_) {
    const double h = g.width(0);
    row_.resize(n_);
    for (std::size_t k = 0; k < n_; ++k) row_[k] = entry(static_cast<double>(k) * h, h);
    if (n_ > kFftThreshold) fft_ = std::make_unique<Fft>(row_);
  } else {
    matrix_.resize(n_ * n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        matrix_[i * n_ + j] = entry(g.center(i) - g.center(j), g.width(j));
  }
}

GridConvolution::~GridConvolution() = default;
GridConvolution::GridConvolution(GridConvolution&&) noexcept = default;
GridConvolution& GridConvolution::operator=(GridConvolution&&) noexcept = default;

double GridConvolution::entry(std::size_t i, std::size_t j) const {
  if (toeplitz_) return row_[i > j ? i - j : j - i];
  return matrix_[i * n_ + j];
}

void GridConvolution::apply(std::span<const double> f, std::span<double> out) const {
  if (f.size() != n_ || out.size() != n_) throw Error("convolution: size mismatch");
  if (fft_) {
    fft_->apply(f, widths_[0], out);
    return;
  }
  if (toeplitz_) {
    const double h = widths_[0];
    for (std::size_t i = 0; i < n_; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < i; ++j) acc += row_[i - j] * f[j];
      for (std::size_t j = i; j < n_; ++j) acc += row_[j - i] * f[j];
      out[i] = h * acc;
    }
    return;
  }
  for (std::size_t i = 0; i < n_; ++i) {
    double acc = 0.0;
    const double* row = &matrix_[i * n_];
    for (std::size_t j = 0; j < n_; ++j) acc += widths_[j] * row[j] * f[j];
    out[i] = acc;
  }
}

std::vector<double> GridConvolution::apply(std::span<const double> f) const {
  std::vector<double> out(n_);
  apply(f, out);
  return out;
}

std::vector<double> GridConvolution::dense() const {
  std::vector<double> m(n_ * n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) m[i * n_ + j] = entry(i, j);
  return m;
}

}  // namespace wbfv
