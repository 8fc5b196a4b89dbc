#pragma once

#include "uhfl/analytics.hpp"
#include "uhfl/geometry.hpp"
#include "uhfl/types.hpp"

namespace uhfl {

/// Unit-mean Nakagami-m power gain: Gamma(m, 1/m).
double sample_nakagami_power(int m, Rng& rng);

/// Balanced random RB allocation: a random permutation dealt round-robin,
/// so each RB carries ceil(n/n_rbs) or floor(n/n_rbs) transmitters.
std::vector<int> allocate_rbs(int n_transmitters, int n_rbs, Rng& rng);

enum class LinkType { Edge, Back, Direct };

struct EmpiricalEstimate {
  double p = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  int n_trials = 0;
};

/// Empirical success frequency for one tagged link, simulating the
/// conditional law of the analytic model: serving distance fixed, LoS states
/// and interferer positions redrawn each trial. The serving-link fading uses
/// the same tail model as the closed forms (max of m exponentials with rate
/// eta = m (m!)^{-1/m}; exact Gamma for m = 1), interferers exact Gamma.
EmpiricalEstimate empirical_success(const Topology& topo, const ClusterAssignment& asg,
                                    LinkType link, int target, const ChannelParams& ch,
                                    const ResourceConfig& res, int n_trials,
                                    std::uint64_t seed);

/// Brute-force estimates of E[exp(-s I)] for the interference Laplace
/// transforms, via single-interferer draws raised to the real-valued
/// interferer count.
double laplace_oracle_edge1(double s, double l_k, double x0, LosState serving,
                            double n_interferers, const ChannelParams& ch, double R,
                            double h, int n_draws, std::uint64_t seed);
double laplace_oracle_edge2(double s, double y0, double n_interferers,
                            const ChannelParams& ch, double R, double h, int n_draws,
                            std::uint64_t seed);
double laplace_oracle_back(double s, double n_interferers, const ChannelParams& ch,
                           double R, double h, int n_draws, std::uint64_t seed);
double laplace_oracle_direct(double s, double n_interferers, const ChannelParams& ch,
                             double R, int n_draws, std::uint64_t seed);

/// One fading + RB-allocation draw over the whole fixed topology.
struct ChannelRealization {
  std::vector<double> sinr_edge1;   // per device, serving UAV -> device
  std::vector<double> sinr_edge2;   // per device, device -> serving UAV
  std::vector<double> sinr_back;    // per UAV, UAV -> BS
  std::vector<double> sinr_direct;  // per device, device -> BS
  std::vector<std::uint8_t> edge_ok;    // I2 indicators (joint edge1 & edge2)
  std::vector<std::uint8_t> back_ok;    // I1 indicators
  std::vector<std::uint8_t> direct_ok;  // direct-upload indicators
};

ChannelRealization realize_round(const Topology& topo, const ClusterAssignment& asg,
                                 const ChannelParams& ch, const ResourceConfig& res,
                                 Rng& rng);

}  // namespace uhfl
