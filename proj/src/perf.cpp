#include "uhfl/perf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace uhfl {
namespace {

constexpr double kC = 112.0 / 5.0;

void check_probs(const std::vector<double>& p, const char* what) {
  for (double v : p)
    if (!(v > 0.0) || v > 1.0) throw std::invalid_argument(std::string(what) + " must lie in (0,1]");
}

}  // namespace

BTerms compute_b_terms(const std::vector<double>& p_edge, const std::vector<double>& p_back,
                       const std::vector<double>& p_k, const std::vector<double>& p_u,
                       const std::vector<std::vector<int>>& clusters) {
  check_probs(p_edge, "edge probability");
  check_probs(p_back, "backhaul probability");
  if (p_back.size() != clusters.size() || p_u.size() != clusters.size())
    throw std::invalid_argument("compute_b_terms: cluster size mismatch");
  BTerms b;
  for (std::size_t u = 0; u < clusters.size(); ++u) {
    b.b1 += p_u[u] * (1.0 / p_back[u] - 1.0);
    for (int k : clusters[u]) {
      b.b2 += p_k[k] * (1.0 / (p_back[u] * p_edge[k]) - 1.0);
      b.b3 += p_k[k] * (1.0 / p_edge[k] - 1.0);
    }
  }
  return b;
}

void BoundInputs::validate() const {
  if (lipschitz <= 0) throw std::invalid_argument("lipschitz must be positive");
  if (upward_div_sq < 0 || downward_div_sq < 0 || global_div_sq < 0)
    throw std::invalid_argument("divergences must be nonnegative");
  if (local_period < 1 || global_period < local_period || horizon < global_period)
    throw std::invalid_argument("need 1 <= E <= G <= T");
  if (!(learning_rate > 0) ||
      learning_rate >= 1.0 / (4.0 * std::sqrt(3.0) * global_period * lipschitz))
    throw std::invalid_argument("learning rate violates eta < 1/(4 sqrt(3) G L)");
}

double convergence_bound(const BoundInputs& in) {
  in.validate();
  const double eta = in.learning_rate, L = in.lipschitz;
  const double E = in.local_period, G = in.global_period, T = in.horizon;
  const double a1 = in.grad_bound_uav_sq, a2 = in.grad_bound_device_sq;
  double sum_pu_e2 = 0.0;
  if (in.cluster_weights.empty())
    sum_pu_e2 = E * E;
  else
    for (double pu : in.cluster_weights) sum_pu_e2 += pu * E * E;

  const double constant_terms =
      in.appendix_constants ? 4.0 * in.b.b1 * a1 + 4.0 * in.b.b2 * a2
                            : 4.0 * in.b.b1 * in.b.b1 * a1 + 4.0 * in.b.b1 * in.b.b1 * a2;
  return 2.0 / (eta * T) * in.initial_gap + constant_terms +
         2.0 * kC * eta * eta * G * G * a2 * L * L * (in.b.b3 + in.b.b2) +
         5.0 * kC * eta * eta * G * G * in.upward_div_sq * L * L +
         kC * eta * eta * E * E * a2 * L * L * in.b.b3 +
         kC * eta * eta * L * L * sum_pu_e2 * in.downward_div_sq;
}

double convergence_bound_uniform(const BoundInputs& in) {
  in.validate();
  if (in.total_samples <= 1 || in.n_uavs < 1)
    throw std::invalid_argument("need n_bar > 1 and N_u >= 1");
  const double eta = in.learning_rate, L = in.lipschitz;
  const double E = in.local_period, G = in.global_period, T = in.horizon;
  const double a1 = in.grad_bound_uav_sq, a2 = in.grad_bound_device_sq;
  const double kappa = (in.n_uavs - 1.0) / (in.total_samples - 1.0);
  const double constant_terms =
      in.appendix_constants ? 4.0 * in.b.b1 * a1 + 4.0 * in.b.b2 * a2
                            : 4.0 * in.b.b1 * in.b.b1 * a1 + 4.0 * in.b.b1 * in.b.b1 * a2;
  return 2.0 / (eta * T) * in.initial_gap + constant_terms +
         5.0 * kC * eta * eta * L * L * (kappa * G * G + (1.0 - kappa) * E * E) *
             in.global_div_sq +
         2.0 * kC * eta * eta * L * L * a2 *
             ((in.b.b3 + in.b.b2) * G * G + in.b.b3 * E * E);
}

bool improvement_condition(double b2, double b3, double eps_tilde_sq, double a2_sq,
                           int n_uavs, double n_bar, double m) {
  (void)m;  // accepted for interface stability; the source inequality never binds it
  if (!(n_bar > n_uavs)) throw std::invalid_argument("need n_bar > N_u");
  const double denom = 2.0 * n_uavs - n_bar;
  if (denom == 0.0) throw std::invalid_argument("n_bar == 2 N_u: condition undefined");
  const double nu = n_uavs;
  const double numer = -2.5 * (nu * eps_tilde_sq / a2_sq) *
                           (1.0 + (nu - 1.0) / (n_bar - 1.0) - (nu - 1.0) / nu) +
                       b2 * (n_bar - nu);
  return b3 <= numer / denom;
}

double uniform_bound_delta(const BoundInputs& in, double l, double q) {
  if (l <= 0 || q <= 0) throw std::invalid_argument("period scales must be positive");
  BoundInputs scaled = in;
  scaled.global_period = l * in.global_period;
  scaled.local_period = q * in.local_period;
  // keep the step-size guard satisfiable under the rescaled G
  scaled.learning_rate =
      std::min(in.learning_rate,
               0.99 / (4.0 * std::sqrt(3.0) * scaled.global_period * scaled.lipschitz));
  BoundInputs base = in;
  base.learning_rate = scaled.learning_rate;
  return convergence_bound_uniform(base) - convergence_bound_uniform(scaled);
}

double latency_compute(double cycles_per_sample, double n_samples, double cpu_hz) {
  if (cycles_per_sample < 0 || n_samples < 0 || cpu_hz <= 0)
    throw std::invalid_argument("latency_compute: bad inputs");
  return cycles_per_sample * n_samples / cpu_hz;
}

double latency_link(double bits, double bandwidth_hz, double sinr) {
  if (bits <= 0 || bandwidth_hz <= 0 || sinr < 0)
    throw std::invalid_argument("latency_link: bad inputs");
  if (sinr == 0.0) return std::numeric_limits<double>::infinity();
  return bits / (bandwidth_hz * std::log2(1.0 + sinr));
}

double latency_round(const std::vector<UavLatency>& uavs, int local_period,
                     int global_period) {
  if (local_period < 1 || global_period < local_period)
    throw std::invalid_argument("latency_round: bad periods");
  const double rounds = static_cast<double>(global_period) / local_period;
  double worst = 0.0;
  for (const UavLatency& u : uavs) {
    auto vmax = [](const std::vector<double>& v) {
      return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
    };
    const double t = rounds * vmax(u.t_down) + rounds * vmax(u.t_up) + u.t_backhaul +
                     global_period * vmax(u.t_cmp);
    worst = std::max(worst, t);
  }
  return worst;
}

}  // namespace uhfl
