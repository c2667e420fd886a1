#include "topobohm/scenario.hpp"

#include <cmath>

#include "topobohm/errors.hpp"
#include "topobohm/io.hpp"
#include "topobohm/rng.hpp"
#include "topobohm/schema.hpp"
#include "topobohm/states.hpp"

namespace topobohm {

using nlohmann::json;

const json& scenario_defaults() {
  static const json d = {
      {"schema", kScenarioSchemaTag},
      {"space", {{"kind", "ring"}, {"n_points", 256}, {"sheet_window", 3}}},
      {"units", {{"hbar", 1}, {"mass", 1}, {"radius", 1}, {"charge", 1.0}}},
      {"factor", {{"kind", "character"}, {"beta", 0.0}, {"sector", 1}}},
      {"potential", {{"kind", "zero"}, {"constant", 0.0}, {"pair", 0.0}, {"samples", 8}}},
      {"initial", {{"kind", "gaussian"}, {"center", kPi}, {"sigma", 0.5}, {"k0", 0.0}, {"index", 0}, {"kappa", 1.0}, {"m", 0}}},
      {"numerics",
       {{"dt", 1e-3},
        {"T", 1.0},
        {"eps_node", 1e-12},
        {"n_levels", 8},
        {"record_stride", 1},
        {"check_every", 100},
        {"tolerances",
         {{"norm", 1e-7}, {"twist", 1e-9}, {"exchange", 1e-9}, {"gauge", 1e-6}, {"spectrum", 1e-10}, {"twisted_law", 1e-12}}}}},
      {"trajectories", {{"count", 100}, {"velocity_scale", 1.0}}},
      {"equivariance", {{"samples", 10000}, {"checkpoints", {0.25, 0.5, 1.0}}, {"bins", 64}, {"velocity_scale", 1.0}}},
      {"classify", {{"word_length_cap", 6}}},
      {"twisted", {{"particles", 2}, {"radius", 4}, {"samples", 1000}, {"corrupt", false}}},
      {"grw", {{"lambda", 1.0}, {"a", 0.3}, {"allow_aperiodic", false}}},
      {"outputs", {{"state", true}, {"samples", false}}},
  };
  return d;
}

json effective_config(const json& config) {
  validate_schema(config, scenario_schema());
  json merged = scenario_defaults();
  merged.merge_patch(config);
  return merged;
}

bool is_two_particle(const json& cfg) { return cfg["space"]["kind"] == "two_particle_ring"; }

int grid_points(const json& cfg) {
  const int n = cfg["space"]["n_points"];
  if ((n & (n - 1)) != 0) throw SchemaError("/space/n_points", "must be a power of two");
  return n;
}

std::uint64_t require_seed(const json& cfg) {
  if (!cfg.contains("seed")) throw SchemaError("/seed", "this subcommand is randomized and needs an explicit seed");
  return cfg["seed"].get<std::uint64_t>();
}

MatrixRep build_factor(const json& cfg) {
  const auto& f = cfg["factor"];
  const std::string kind = f["kind"];
  if (kind == "character") return scalar_rep(ring_character(f.value("beta", 0.0)), 1);
  if (kind == "flux") return MatrixRep();
  if (kind == "matrix") {
    if (!f.contains("generator")) throw SchemaError("/factor/generator", "matrix factor needs a generator");
    CMatrix g;
    try {
      g = matrix_from_json(f["generator"]);
    } catch (const DomainError& e) {
      throw SchemaError("/factor/generator", e.what());
    }
    if (g.rows() != g.cols() || g.rows() > kMaxComponents) throw SchemaError("/factor/generator", "must be square, at most 4x4");
    return make_matrix_rep(DeckGroup::integers(), {g});
  }
  // aharonov_casher
  Eigen::Vector3d axis(0, 0, 1);
  if (f.contains("axis")) axis = Eigen::Vector3d(f["axis"][0], f["axis"][1], f["axis"][2]);
  if (axis.norm() == 0.0) throw SchemaError("/factor/axis", "axis must be non-zero");
  return aharonov_casher_rep(axis, f.value("angle", kPi / 2));
}

double build_vector_potential(const json& cfg) {
  const auto& f = cfg["factor"];
  if (f["kind"] != "flux") return 0.0;
  if (!f.contains("flux")) throw SchemaError("/factor/flux", "flux factor needs a flux");
  const double charge = f.value("charge", cfg["units"].value("charge", 1.0));
  return charge * f["flux"].get<double>() / kTwoPi;
}

std::vector<CMatrix> random_hermitian_samples(int count, int dimension, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<CMatrix> out;
  for (int s = 0; s < count; ++s) {
    CMatrix m(dimension, dimension);
    for (int i = 0; i < dimension; ++i)
      for (int j = 0; j < dimension; ++j) m(i, j) = cplx(standard_normal(rng), standard_normal(rng));
    out.emplace_back(0.5 * (m + m.adjoint()));
  }
  return out;
}

namespace {

std::vector<double> fourier_values(const json& p, int n) {
  const double c0 = p.value("constant", 0.0);
  const json terms = p.value("terms", json::array());
  return sample_grid(n, [&](double t) {
    double v = c0;
    for (const auto& term : terms) {
      const int k = term["n"];
      v += term.value("cos", 0.0) * std::cos(k * t) + term.value("sin", 0.0) * std::sin(k * t);
    }
    return v;
  });
}

CMatrix pauli_matrix(const json& coeffs) {
  return coeffs[0].get<double>() * CMatrix::Identity(2, 2) + coeffs[1].get<double>() * pauli::x() +
         coeffs[2].get<double>() * pauli::y() + coeffs[3].get<double>() * pauli::z();
}

}  // namespace

Potential build_potential(const json& cfg, int components) {
  const auto& p = cfg["potential"];
  const std::string kind = p["kind"];
  const int n = grid_points(cfg);
  if (kind == "zero") return Potential::zero(n, components);
  if (kind == "fourier") return Potential::from_scalar(fourier_values(p, n), components);
  if (kind == "tabulated") {
    if (!p.contains("values") || static_cast<int>(p["values"].size()) != n)
      throw SchemaError("/potential/values", "needs exactly n_points samples");
    return Potential::from_scalar(p["values"].get<std::vector<double>>(), components);
  }
  if (kind == "pauli" || kind == "covariant_pauli") {
    if (components != 2) throw SchemaError("/potential/kind", "Pauli potentials need a two-component factor");
    if (!p.contains("coefficients")) throw SchemaError("/potential/coefficients", "missing [c0, cx, cy, cz]");
    const CMatrix m = pauli_matrix(p["coefficients"]);
    std::vector<CMatrix> v(static_cast<size_t>(n), m);
    return kind == "pauli" ? Potential::from_matrices(std::move(v)) : Potential::covariant_field(std::move(v));
  }
  throw SchemaError("/potential/kind", "random_hermitian potentials are only used by classify");
}

WaveGrid build_state(const json& cfg) {
  const int n = grid_points(cfg);
  const MatrixRep factor = build_factor(cfg);
  const double ea = build_vector_potential(cfg);
  const auto& in = cfg["initial"];
  const std::string kind = in["kind"];
  const int k = factor.dimension();
  const bool scalar_twist = k == 1;
  const double beta = scalar_twist ? wrap_phase(std::arg(factor.generator_matrices().front()(0, 0))) : 0.0;

  WaveGrid base;
  if (kind == "eigenstate")
    base = ring_eigenstate(n, in.value("index", 0), beta);
  else if (kind == "gaussian")
    base = wrapped_gaussian(n, in.value("center", kPi), in.value("sigma", 0.5), in.value("k0", 0.0), beta);
  else if (kind == "von_mises")
    base = von_mises(n, in.value("center", kPi), in.value("kappa", 1.0), in.value("m", 0), beta);
  else
    throw SchemaError("/initial/kind", "'pair' initial states need space.kind = two_particle_ring");

  WaveGrid out;
  if (scalar_twist) {
    out = twist_embed(base.chi, 1, factor);
  } else {
    // Spatial profile times a constant spinor in the gauge-fixed picture.
    std::vector<cplx> spinor(static_cast<size_t>(k), 0.0);
    spinor[0] = 1.0;
    if (in.contains("spinor")) {
      if (static_cast<int>(in["spinor"].size()) != k) throw SchemaError("/initial/spinor", "length must match the factor dimension");
      for (int c = 0; c < k; ++c) spinor[static_cast<size_t>(c)] = complex_from_json(in["spinor"][static_cast<size_t>(c)]);
    }
    std::vector<cplx> values;
    for (int c = 0; c < k; ++c)
      for (int j = 0; j < n; ++j) values.push_back(spinor[static_cast<size_t>(c)] * base.chi[static_cast<size_t>(j)]);
    out = twist_embed(std::move(values), k, factor);
  }
  out.vector_potential = ea;
  return out;
}

namespace {

std::vector<cplx> orbital(const json& o, int n, double beta) {
  const std::string kind = o.value("kind", "gaussian");
  WaveGrid g;
  if (kind == "eigenstate")
    g = ring_eigenstate(n, o.value("index", 0), beta);
  else if (kind == "von_mises")
    g = von_mises(n, o.value("center", kPi), o.value("kappa", 1.0), o.value("m", 0), beta);
  else
    g = wrapped_gaussian(n, o.value("center", kPi), o.value("sigma", 0.5), o.value("k0", 0.0), beta);
  return g.chi;
}

}  // namespace

TorusGrid build_torus_state(const json& cfg) {
  const int n = grid_points(cfg);
  const auto& f = cfg["factor"];
  if (f["kind"] != "character") throw SchemaError("/factor/kind", "two-particle rings use a character factor with an exchange sector");
  const double beta = f.value("beta", 0.0);
  const int sector = f.value("sector", 1);
  const auto& in = cfg["initial"];
  if (in["kind"] != "pair" || !in.contains("orbitals")) throw SchemaError("/initial", "two-particle rings need kind 'pair' with two orbitals");
  try {
    return torus_pair(n, sector, beta, orbital(in["orbitals"][0], n, beta), orbital(in["orbitals"][1], n, beta));
  } catch (const DomainError& e) {
    throw SchemaError("/initial/orbitals", e.what());
  }
}

std::vector<double> build_torus_potential(const json& cfg) {
  const int n = grid_points(cfg);
  const auto& p = cfg["potential"];
  const std::string kind = p["kind"];
  std::vector<double> one(static_cast<size_t>(n), 0.0);
  if (kind == "fourier")
    one = fourier_values(p, n);
  else if (kind != "zero")
    throw SchemaError("/potential/kind", "two-particle rings support zero or fourier potentials");
  const double g = p.value("pair", 0.0);
  std::vector<double> v(static_cast<size_t>(n) * static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      v[static_cast<size_t>(i) * static_cast<size_t>(n) + static_cast<size_t>(j)] =
          one[static_cast<size_t>(i)] + one[static_cast<size_t>(j)] + g * std::cos(kTwoPi * (i - j) / n);
  return v;
}

long long build_steps(const json& cfg) {
  const double dt = cfg["numerics"]["dt"];
  const double t = cfg["numerics"]["T"];
  const double r = t / dt;
  const long long s = std::llround(r);
  if (std::abs(r - static_cast<double>(s)) > 1e-9 * std::max(1.0, r)) throw SchemaError("/numerics/dt", "must divide numerics.T");
  return s;
}

}  // namespace topobohm
