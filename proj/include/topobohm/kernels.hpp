#pragma once

#include <cstddef>
#include <span>

#include "topobohm/linalg.hpp"

namespace topobohm {

/// Which implementation of the hot loops to use. Both give bitwise identical
/// results; `serial` is the reference the parallel variants are tested against.
enum class Backend { serial, omp };

/// Batched in-place complex DFTs of `rows` contiguous rows of length n.
/// forward: X_m = Σ_j x_j e^{−2πi jm/n}; inverse is unnormalized.
void fft_rows(cplx* data, int n, int rows, bool inverse, Backend backend);

/// In-place 2-D DFT of an n×n row-major array.
void fft_2d(cplx* data, int n, bool inverse, Backend backend);

/// One trigonometric interpolant evaluated at a point: value and θ-derivative
/// of every component.
struct SpectralPoint {
  cplx value[4];
  cplx derivative[4];
};

/// Maximum number of components handled by the spectral evaluators.
inline constexpr int kMaxComponents = 4;

namespace kernels {

// Each function exists in a serial and an OpenMP flavour with identical
// signatures and identical floating-point operation order per element.

namespace serial {
void multiply(std::span<cplx> data, std::span<const cplx> factor);
void fft_rows(cplx* data, int n, int rows, bool inverse);
/// Evaluate the trigonometric interpolants with Fourier coefficients
/// `coeffs` (components × n, unnormalized DFT order) at `points`.
void spectral_eval(std::span<const cplx> coeffs, int n, int components, std::span<const double> points,
                   std::span<SpectralPoint> out);
}  // namespace serial

namespace omp {
void multiply(std::span<cplx> data, std::span<const cplx> factor);
void fft_rows(cplx* data, int n, int rows, bool inverse);
void spectral_eval(std::span<const cplx> coeffs, int n, int components, std::span<const double> points,
                   std::span<SpectralPoint> out);
}  // namespace omp

}  // namespace kernels

void multiply(std::span<cplx> data, std::span<const cplx> factor, Backend backend);
void spectral_eval(std::span<const cplx> coeffs, int n, int components, std::span<const double> points,
                   std::span<SpectralPoint> out, Backend backend);

/// Signed wavenumber of DFT index m on an n-point grid, in [−n/2, n/2).
inline int wavenumber(int m, int n) { return m < (n + 1) / 2 ? m : m - n; }

}  // namespace topobohm
