#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "wbfv/grid.hpp"

namespace wbfv {

// Discrete convolution out_i = sum_j dx_j K_ij f_j with an even kernel.
// K_ij = entry(x_i - x_j, dx_j). On uniform grids only the first row is kept
// (symmetric Toeplitz) and large grids go through an FFT.
class GridConvolution {
 public:
  using Entry = std::function<double(double offset, double source_width)>;

  GridConvolution(const Grid& g, const Entry& entry);
  ~GridConvolution();
  GridConvolution(GridConvolution&&) noexcept;
  GridConvolution& operator=(GridConvolution&&) noexcept;

  std::size_t size() const { return n_; }
  double entry(std::size_t i, std::size_t j) const;
  // Not reentrant: shares FFT scratch buffers.
  void apply(std::span<const double> f, std::span<double> out) const;
  std::vector<double> apply(std::span<const double> f) const;
  std::vector<double> dense() const;

  static constexpr std::size_t kFftThreshold = 2048;

 private:
  struct Fft;
  std::size_t n_ = 0;
  bool toeplitz_ = false;
  std::vector<double> row_;     // toeplitz: K(k h) for k = 0..n-1
  std::vector<double> matrix_;  // general: row-major n*n
  std::vector<double> widths_;
  std::unique_ptr<Fft> fft_;
};

}  // namespace wbfv
