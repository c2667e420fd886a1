#include "topobohm/states.hpp"

#include <cmath>

#include "topobohm/errors.hpp"

namespace topobohm {

WaveGrid ring_eigenstate(int n, int index, double beta) {
  std::vector<cplx> chi(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) chi[static_cast<size_t>(j)] = std::polar(1.0, index * kTwoPi * j / n);
  return twist_embed(std::move(chi), ring_character(beta));
}

WaveGrid wrapped_gaussian(int n, double center, double sigma, double k0, double beta) {
  if (!(sigma > 0.0)) throw DomainError("packet width must be positive");
  // Images beyond this many sheets are below double precision.
  const int images = 2 + static_cast<int>(std::ceil(12.0 * sigma / kTwoPi));
  std::vector<cplx> psi(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double th = kTwoPi * j / n;
    cplx s = 0.0;
    for (int m = -images; m <= images; ++m) {
      const double x = th + kTwoPi * m - center;
      s += std::polar(std::exp(-x * x / (4.0 * sigma * sigma)), k0 * x - beta * m);
    }
    psi[static_cast<size_t>(j)] = s;
  }
  return twist_embed(std::move(psi), ring_character(beta), EmbedInput::cover_sheet);
}

WaveGrid von_mises(int n, double center, double kappa, int m, double beta) {
  std::vector<cplx> chi(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) {
    const double th = kTwoPi * j / n;
    chi[static_cast<size_t>(j)] = std::polar(std::exp(kappa * std::cos(th - center)), m * th);
  }
  return twist_embed(std::move(chi), ring_character(beta));
}

TorusGrid torus_pair(int n, int sector, double beta, const std::vector<cplx>& f, const std::vector<cplx>& g) {
  if (f.size() != static_cast<size_t>(n) || g.size() != static_cast<size_t>(n)) throw DomainError("orbitals must have n samples");
  std::vector<cplx> v(static_cast<size_t>(n) * static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      v[static_cast<size_t>(i) * static_cast<size_t>(n) + static_cast<size_t>(j)] =
          f[static_cast<size_t>(i)] * g[static_cast<size_t>(j)] + static_cast<double>(sector) * g[static_cast<size_t>(i)] * f[static_cast<size_t>(j)];
  return make_torus_state(n, sector, beta, std::move(v));
}

}  // namespace topobohm
