#include "uhfl/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace uhfl {
namespace {

// Gauss-Kronrod (7,15) nodes and weights on [-1, 1] (QUADPACK constants).
constexpr int kKronrodN = 15;
constexpr double kKronrodNodes[kKronrodN] = {
    -9.9145537112081261e-01, -9.4910791234275871e-01, -8.6486442335976887e-01,
    -7.4153118559939424e-01, -5.8608723546769104e-01, -4.0584515137739713e-01,
    -2.0778495500789815e-01, 0.0,
    2.0778495500789815e-01,  4.0584515137739713e-01,  5.8608723546769104e-01,
    7.4153118559939424e-01,  8.6486442335976887e-01,  9.4910791234275871e-01,
    9.9145537112081261e-01};
constexpr double kKronrodWeights[kKronrodN] = {
    2.2935322010529225e-02, 6.3092092629978553e-02, 1.0479001032225018e-01,
    1.4065325971552592e-01, 1.6900472663926790e-01, 1.9035057806478559e-01,
    2.0443294007529889e-01, 2.0948214108472783e-01, 2.0443294007529889e-01,
    1.9035057806478559e-01, 1.6900472663926790e-01, 1.4065325971552592e-01,
    1.0479001032225018e-01, 6.3092092629978553e-02, 2.2935322010529225e-02};
// Embedded 7-point Gauss weights, aligned with odd Kronrod node indices.
constexpr double kGaussWeights[7] = {
    1.2948496616886969e-01, 2.7970539148927667e-01, 3.8183005050511894e-01,
    4.1795918367346939e-01, 3.8183005050511894e-01, 2.7970539148927667e-01,
    1.2948496616886969e-01};

struct Segment {
  double lo, hi, value, error;
};

Segment eval_segment(const std::function<double(double)>& f, double lo, double hi) {
  const double c = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double kron = 0.0, gauss = 0.0;
  for (int i = 0; i < kKronrodN; ++i) {
    const double fx = f(c + half * kKronrodNodes[i]);
    kron += kKronrodWeights[i] * fx;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * fx;
  }
  kron *= half;
  gauss *= half;
  return {lo, hi, kron, std::abs(kron - gauss)};
}

}  // namespace

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const QuadratureSpec& spec) {
  if (lo > hi) throw std::invalid_argument("integrate: lo > hi");
  if (lo == hi) return 0.0;

  std::vector<Segment> segs{eval_segment(f, lo, hi)};
  int subdivisions = 0;
  while (true) {
    double total = 0.0, err = 0.0;
    for (const auto& s : segs) {
      total += s.value;
      err += s.error;
    }
    const double tol = std::max(spec.abs_tol, spec.rel_tol * std::abs(total));
    if (err <= tol) return total;
    if (subdivisions >= spec.max_subdivisions)
      throw ConvergenceFailure("integrate: subdivision budget exhausted", total, err);

    auto worst = std::max_element(segs.begin(), segs.end(),
                                  [](const Segment& a, const Segment& b) { return a.error < b.error; });
    const Segment w = *worst;
    const double mid = 0.5 * (w.lo + w.hi);
    *worst = eval_segment(f, w.lo, mid);
    segs.push_back(eval_segment(f, mid, w.hi));
    ++subdivisions;
  }
}

}  // namespace uhfl
