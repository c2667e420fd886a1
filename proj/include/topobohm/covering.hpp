#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "topobohm/deck.hpp"

namespace topobohm {

/// Point on the ring cover ℝ, stored as (sheet, angle in [0, 2π)). The cover
/// coordinate is 2π·sheet + angle.
struct RingPoint {
  long long sheet = 0;
  double angle = 0.0;

  double unwrapped() const;
  static RingPoint from_unwrapped(double theta);
  friend bool operator==(const RingPoint&, const RingPoint&) = default;
};

/// N ring points (the two-particle torus uses N = 2).
struct RingTuple {
  std::vector<RingPoint> particles;
  friend bool operator==(const RingTuple&, const RingTuple&) = default;
};

/// Point on the cover of a base with free fundamental group: the homotopy
/// class of a path from the base point, as a reduced word.
struct TreePoint {
  FreeWord path;
  friend bool operator==(const TreePoint&, const TreePoint&) = default;
};

/// N-tuple of tree points (symbolic points of the N-particle cover).
struct TreeTuple {
  std::vector<FreeWord> paths;
  friend bool operator==(const TreeTuple&, const TreeTuple&) = default;
};

using CoverPoint = std::variant<RingPoint, RingTuple, TreePoint, TreeTuple>;

enum class CoverKind { Ring, TwoParticleRing, AbstractFreeCover, NFermionCover };

std::string to_string(CoverKind kind);

/// The supported covering spaces and their deck actions. Values are immutable.
class CoveringSpace {
 public:
  static constexpr int kDefaultSheetWindow = 3;

  /// S¹ covered by ℝ, deck group ℤ.
  static CoveringSpace ring(int sheet_window = kDefaultSheetWindow);
  /// Torus [0,2π)² with the exchange deck action: deck group S₂ ⋉ ℤ².
  static CoveringSpace two_particle_ring(int sheet_window = kDefaultSheetWindow);
  /// Base with free fundamental group F_g; deck elements are reduced words.
  static CoveringSpace free_cover(int generators, int max_word_length = kDefaultMaxWordLength);
  /// N particles on a base with fundamental group F_g: S_N ⋉ F_g^N.
  static CoveringSpace nfermion(int particles, int generators, int max_word_length = kDefaultMaxWordLength);

  CoverKind kind() const { return kind_; }
  const DeckGroup& deck_group() const { return group_; }
  int sheet_window() const { return sheet_window_; }
  double circumference() const;

  /// σq̂. Ring-type points must stay within ±sheet_window sheets.
  CoverPoint deck_apply(const DeckElement& sigma, const CoverPoint& qhat) const;
  DeckElement deck_compose(const DeckElement& s1, const DeckElement& s2) const;

  /// Projection to base angles (Ring / TwoParticleRing points only).
  std::vector<double> project(const CoverPoint& qhat) const;

  /// Lift of base angles onto the given sheet(s).
  CoverPoint lift(std::span<const double> angles, std::span<const long long> sheets) const;

  /// True if no non-identity element among `elements` fixes any of `points`.
  bool acts_freely(std::span<const DeckElement> elements, std::span<const CoverPoint> points) const;

 private:
  CoveringSpace(CoverKind kind, DeckGroup group, int sheet_window)
      : kind_(kind), group_(std::move(group)), sheet_window_(sheet_window) {}

  void check_window(const RingPoint& p) const;

  CoverKind kind_;
  DeckGroup group_;
  int sheet_window_;
};

/// Scalar samples of a cover-side function on several sheets of the ring
/// cover, all at the same base grid.
struct SheetSamples {
  std::vector<long long> sheets;
  std::vector<std::vector<double>> values;  // values[s][j] at base grid point j
};

/// max over sheets and grid of |f(σq̂) − f(q̂)| relative to sheet 0 (the
/// pushforward σ* is trivial on the ring). Throws DomainError with fewer than
/// two sheets.
double projectability_residual(const SheetSamples& field);

bool is_projectable_field(const SheetSamples& field, double tol);

/// Descend a deck-invariant density to the base grid and normalize so that
/// Σρ·Δθ = 1. Throws NonProjectableError if sheets disagree beyond `tol`.
std::vector<double> project_density(const SheetSamples& rho_hat, double tol = 1e-9);

}  // namespace topobohm
