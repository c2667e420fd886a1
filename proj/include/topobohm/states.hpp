#pragma once

#include <vector>

#include "topobohm/propagator.hpp"

namespace topobohm {

/// Twisted plane wave e^{i(m + β/2π)θ}/√(2π): constant χ times e^{imθ}.
WaveGrid ring_eigenstate(int n, int index, double beta);

/// ψ(θ) = Σ_m e^{−iβm} φ(θ + 2πm) with φ(x) = exp(−(x−c)²/4σ²) e^{ik₀(x−c)},
/// which satisfies ψ(θ + 2π) = e^{iβ}ψ(θ). Embedded and normalized.
WaveGrid wrapped_gaussian(int n, double center, double sigma, double k0, double beta);

/// χ(θ) = exp(κ cos(θ − c)) e^{imθ}: smooth and periodic, with rapidly
/// decaying Fourier coefficients.
WaveGrid von_mises(int n, double center, double kappa, int m, double beta);

/// Two-particle torus state from one-particle orbitals f, g:
/// χ(θ₁, θ₂) = f(θ₁)g(θ₂) + sector·g(θ₁)f(θ₂).
TorusGrid torus_pair(int n, int sector, double beta, const std::vector<cplx>& f, const std::vector<cplx>& g);

}  // namespace topobohm
