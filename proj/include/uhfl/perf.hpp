#pragma once

#include <vector>

#include "uhfl/types.hpp"

namespace uhfl {

struct BTerms {
  double b1 = 0.0;
  double b2 = 0.0;
  double b3 = 0.0;
};

/// Channel-unreliability penalties:
/// B1 = sum_u pu_u (1/Pback_u - 1)
/// B2 = sum_u sum_{k in S_u} p_k (1/(Pback_u Pedge_k) - 1)
/// B3 = sum_u sum_{k in S_u} p_k (1/Pedge_k - 1)
BTerms compute_b_terms(const std::vector<double>& p_edge, const std::vector<double>& p_back,
                       const std::vector<double>& p_k, const std::vector<double>& p_u,
                       const std::vector<std::vector<int>>& clusters);

struct BoundInputs {
  double lipschitz = 1.0;           // L
  double upward_div_sq = 1.0;       // eps^2, UAV vs BS
  double downward_div_sq = 1.0;     // eps-hat^2, device vs UAV
  double global_div_sq = 1.0;       // eps-tilde^2
  double grad_bound_uav_sq = 1.0;   // A1^2
  double grad_bound_device_sq = 1.0;  // A2^2
  double learning_rate = 1e-3;
  double local_period = 2;   // E
  double global_period = 2;  // G
  double horizon = 100;      // T
  double initial_gap = 1.0;  // f(w0) - f*
  std::vector<double> cluster_weights;  // p_u
  BTerms b;
  double total_samples = 1e4;  // n-bar
  int n_uavs = 10;
  // constant terms 4*B1*A1^2 + 4*B2*A2^2 instead of 4*B1^2*(A1^2 + A2^2)
  bool appendix_constants = false;

  void validate() const;
};

/// Headline bound; throws invalid_argument when eta >= 1/(4 sqrt(3) G L).
double convergence_bound(const BoundInputs& in);

/// Uniform random grouping variant with kappa = (N_u - 1)/(n-bar - 1).
double convergence_bound_uniform(const BoundInputs& in);

/// Literal evaluation of the published improvement inequality on B3.
/// m is accepted but unused; its role in the source condition is undefined.
bool improvement_condition(double b2, double b3, double eps_tilde_sq, double a2_sq,
                           int n_uavs, double n_bar, double m);

/// Uniform-bound delta when the periods are rescaled to (l*G, q*E);
/// positive means the rescaled schedule has the smaller bound.
double uniform_bound_delta(const BoundInputs& in, double l, double q);

/// c * n / sigma seconds.
double latency_compute(double cycles_per_sample, double n_samples, double cpu_hz);

/// Z / (b * log2(1 + sinr)) seconds; sinr == 0 gives +inf.
double latency_link(double bits, double bandwidth_hz, double sinr);

struct UavLatency {
  std::vector<double> t_down;  // per member device, UAV -> device
  std::vector<double> t_up;    // per member device, device -> UAV
  std::vector<double> t_cmp;   // per member device
  double t_backhaul = 0.0;     // UAV -> BS
};

/// Per-global-round wall time, slowest UAV over
/// max_k (G/E) t_down + max_k (G/E) t_up + t_backhaul + G max_k t_cmp.
double latency_round(const std::vector<UavLatency>& uavs, int local_period,
                     int global_period);

}  // namespace uhfl
