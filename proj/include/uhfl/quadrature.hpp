#pragma once

#include <functional>

#include "uhfl/types.hpp"

namespace uhfl {

/// Adaptive Gauss-Kronrod (7,15) integration of f over [lo, hi].
/// The estimate satisfies |error| <= max(abs_tol, rel_tol*|result|);
/// throws ConvergenceFailure when the subdivision budget is exhausted.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const QuadratureSpec& spec = {});

}  // namespace uhfl
