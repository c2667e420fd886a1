#include "topobohm/covering.hpp"

#include <algorithm>
#include <cmath>

#include "topobohm/errors.hpp"
#include "topobohm/linalg.hpp"

namespace topobohm {

double RingPoint::unwrapped() const { return kTwoPi * static_cast<double>(sheet) + angle; }

RingPoint RingPoint::from_unwrapped(double theta) {
  const double turns = std::floor(theta / kTwoPi);
  double angle = theta - kTwoPi * turns;
  long long sheet = static_cast<long long>(turns);
  if (angle >= kTwoPi) {
    angle -= kTwoPi;
    ++sheet;
  }
  if (angle < 0.0) angle = 0.0;
  return RingPoint{sheet, angle};
}

std::string to_string(CoverKind kind) {
  switch (kind) {
    case CoverKind::Ring: return "ring";
    case CoverKind::TwoParticleRing: return "two_particle_ring";
    case CoverKind::AbstractFreeCover: return "free_cover";
    case CoverKind::NFermionCover: return "nfermion";
  }
  return "?";
}

CoveringSpace CoveringSpace::ring(int sheet_window) {
  if (sheet_window < 3) throw DomainError("sheet window must be >= 3");
  return CoveringSpace(CoverKind::Ring, DeckGroup::integers(), sheet_window);
}

CoveringSpace CoveringSpace::two_particle_ring(int sheet_window) {
  if (sheet_window < 3) throw DomainError("sheet window must be >= 3");
  return CoveringSpace(CoverKind::TwoParticleRing, DeckGroup::semidirect(2, 1), sheet_window);
}

CoveringSpace CoveringSpace::free_cover(int generators, int max_word_length) {
  return CoveringSpace(CoverKind::AbstractFreeCover, DeckGroup::free(generators, max_word_length),
                       kDefaultSheetWindow);
}

CoveringSpace CoveringSpace::nfermion(int particles, int generators, int max_word_length) {
  return CoveringSpace(CoverKind::NFermionCover, DeckGroup::semidirect(particles, generators, max_word_length),
                       kDefaultSheetWindow);
}

double CoveringSpace::circumference() const { return kTwoPi; }

void CoveringSpace::check_window(const RingPoint& p) const {
  if (p.sheet < -sheet_window_ || p.sheet > sheet_window_)
    throw OutOfWindowError("cover point on sheet " + std::to_string(p.sheet) + " outside the materialized window ±" +
                           std::to_string(sheet_window_));
}

namespace {

RingPoint shift(const RingPoint& p, long long turns) { return RingPoint{p.sheet + turns, p.angle}; }

long long word_turns(const FreeWord& w) {
  if (w.max_generator() > 1) throw DomainError("ring tuples only carry single-generator words");
  return w.exponent_sum(1);
}

}  // namespace

CoverPoint CoveringSpace::deck_apply(const DeckElement& sigma, const CoverPoint& qhat) const {
  group_.require(sigma);
  switch (kind_) {
    case CoverKind::Ring: {
      const auto* p = std::get_if<RingPoint>(&qhat);
      if (!p) throw DomainError("deck_apply: ring cover expects a RingPoint");
      check_window(*p);
      RingPoint r = shift(*p, std::get<Winding>(sigma).turns);
      check_window(r);
      return r;
    }
    case CoverKind::AbstractFreeCover: {
      const auto* p = std::get_if<TreePoint>(&qhat);
      if (!p) throw DomainError("deck_apply: free cover expects a TreePoint");
      return TreePoint{std::get<FreeWord>(sigma).times(p->path, group_.max_word_length())};
    }
    case CoverKind::TwoParticleRing:
    case CoverKind::NFermionCover: {
      const auto& e = std::get<SemidirectElement>(sigma);
      const int n = group_.particles();
      const Permutation pinv = e.perm.inverse();
      if (const auto* t = std::get_if<RingTuple>(&qhat)) {
        if (static_cast<int>(t->particles.size()) != n) throw DomainError("deck_apply: particle count mismatch");
        RingTuple out;
        out.particles.resize(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
          const int src = pinv(i);
          const RingPoint& q = t->particles[static_cast<size_t>(src)];
          check_window(q);
          RingPoint r = shift(q, word_turns(e.words[static_cast<size_t>(src)]));
          check_window(r);
          out.particles[static_cast<size_t>(i)] = r;
        }
        return out;
      }
      if (const auto* t = std::get_if<TreeTuple>(&qhat)) {
        if (static_cast<int>(t->paths.size()) != n) throw DomainError("deck_apply: particle count mismatch");
        TreeTuple out;
        out.paths.resize(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
          const int src = pinv(i);
          out.paths[static_cast<size_t>(i)] =
              e.words[static_cast<size_t>(src)].times(t->paths[static_cast<size_t>(src)], group_.max_word_length());
        }
        return out;
      }
      throw DomainError("deck_apply: tuple cover expects a RingTuple or TreeTuple");
    }
  }
  return qhat;
}

DeckElement CoveringSpace::deck_compose(const DeckElement& s1, const DeckElement& s2) const {
  return group_.compose(s1, s2);
}

std::vector<double> CoveringSpace::project(const CoverPoint& qhat) const {
  if (const auto* p = std::get_if<RingPoint>(&qhat)) return {p->angle};
  if (const auto* t = std::get_if<RingTuple>(&qhat)) {
    std::vector<double> out;
    for (const auto& p : t->particles) out.push_back(p.angle);
    return out;
  }
  throw DomainError("project: symbolic cover points have no base coordinates");
}

CoverPoint CoveringSpace::lift(std::span<const double> angles, std::span<const long long> sheets) const {
  if (angles.size() != sheets.size()) throw DomainError("lift: angles and sheets differ in length");
  auto make = [&](size_t i) {
    RingPoint p = RingPoint::from_unwrapped(angles[i]);
    p.sheet += sheets[i];
    check_window(p);
    return p;
  };
  if (kind_ == CoverKind::Ring) {
    if (angles.size() != 1) throw DomainError("lift: ring takes one angle");
    return make(0);
  }
  if (kind_ == CoverKind::TwoParticleRing) {
    if (angles.size() != 2) throw DomainError("lift: two-particle ring takes two angles");
    return RingTuple{{make(0), make(1)}};
  }
  throw DomainError("lift: only ring-type covers are materialized");
}

bool CoveringSpace::acts_freely(std::span<const DeckElement> elements, std::span<const CoverPoint> points) const {
  for (const auto& s : elements) {
    if (group_.is_identity(s)) continue;
    for (const auto& q : points)
      if (deck_apply(s, q) == q) return false;
  }
  return true;
}

double projectability_residual(const SheetSamples& field) {
  if (field.values.size() < 2 || field.sheets.size() != field.values.size())
    throw DomainError("projectability check needs samples on at least two sheets");
  const auto& ref = field.values.front();
  double r = 0.0;
  for (size_t s = 1; s < field.values.size(); ++s) {
    if (field.values[s].size() != ref.size()) throw DomainError("projectability check: sheet size mismatch");
    for (size_t j = 0; j < ref.size(); ++j) {
      const double d = std::abs(field.values[s][j] - ref[j]);
      r = std::isnan(d) ? std::numeric_limits<double>::infinity() : std::max(r, d);
    }
  }
  return r;
}

bool is_projectable_field(const SheetSamples& field, double tol) { return projectability_residual(field) <= tol; }

std::vector<double> project_density(const SheetSamples& rho_hat, double tol) {
  const double r = projectability_residual(rho_hat);
  if (r > tol)
    throw NonProjectableError("density is not deck-invariant (residual " + std::to_string(r) +
                              "); the factor is not unimodular or the state is corrupted");
  std::vector<double> rho = rho_hat.values.front();
  if (rho.empty()) throw DomainError("project_density: empty grid");
  const double dtheta = kTwoPi / static_cast<double>(rho.size());
  double mass = 0.0;
  for (double v : rho) {
    if (v < 0.0) throw DomainError("project_density: negative density");
    mass += v * dtheta;
  }
  if (mass <= 0.0) throw DomainError("project_density: zero mass");
  for (double& v : rho) v /= mass;
  return rho;
}

}  // namespace topobohm
