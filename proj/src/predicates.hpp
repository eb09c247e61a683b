#pragma once

#include "eddy2d/geometry.hpp"

namespace eddy2d::detail {

/// Sign-exact orientation: > 0 when a, b, c turn counterclockwise.
double orient2d(Point a, Point b, Point c);

/// Sign-exact in-circle test: > 0 when d lies strictly inside the circle through
/// the counterclockwise triangle a, b, c.
double incircle(Point a, Point b, Point c, Point d);

}  // namespace eddy2d::detail
