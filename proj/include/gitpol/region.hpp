#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gitpol/rational.hpp"

namespace gitpol {

// coeffs · x + constant ≥ 0, or > 0 when strict.
struct HalfSpace {
  Vec coeffs;
  Rational constant;
  bool strict = false;
  std::string label;

  Rational evaluate(const Vec& x) const;
  bool satisfied_by(const Vec& x) const;
};

// Convex set cut out by finitely many half-spaces in dimension 1 or 2.
// The closure is stored as a vertex list (counter-clockwise in 2D, [lo, hi] in 1D).
struct ConvexPiece {
  std::vector<HalfSpace> constraints;
  std::vector<Vec> closure;
  std::optional<Vec> witness;  // a point satisfying every constraint, if any

  bool nonempty() const { return witness.has_value(); }
  bool contains(const Vec& x) const;
};

struct Region {
  int dim = 0;
  std::vector<ConvexPiece> pieces;

  bool nonempty() const;
  bool contains(const Vec& x) const;
};

// Axis-aligned box; bounds are closed unless the piece is later intersected with strict constraints.
struct Box {
  Vec lo, hi;
};

// Builds the piece. bounding must contain the closure of the set; it only keeps the polygon finite.
ConvexPiece make_piece(int dim, const std::vector<HalfSpace>& constraints, const Box& bounding);

// Twice the signed area of a polygon given counter-clockwise.
Rational twice_area(const std::vector<Vec>& polygon);

// Splits the closed polygon by the line coeffs · x + constant = 0. Returns the non-negative
// and negative sides; either may be empty.
std::pair<std::vector<Vec>, std::vector<Vec>> split_polygon(const std::vector<Vec>& polygon,
                                                            const Vec& coeffs,
                                                            const Rational& constant);

std::vector<Vec> clip_polygon(const std::vector<Vec>& polygon, const Vec& coeffs,
                              const Rational& constant);

// Scales an affine form to coprime integers with positive leading coefficient.
// Returns false when the linear part vanishes.
bool primitive_form(Vec& coeffs, Rational& constant);

}  // namespace gitpol
