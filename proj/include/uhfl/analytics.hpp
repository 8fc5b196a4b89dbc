#pragma once

#include "uhfl/geometry.hpp"
#include "uhfl/types.hpp"

namespace uhfl {

/// Device and UAV population sizes entering the average interferer counts.
struct NetworkScale {
  int n_devices = 50;
  int n_uavs = 10;
};

/// eta_z = m (m!)^(-1/m), computed in log space.
double nakagami_eta(int m);

/// Laplace transform of the downlink edge interference at a device at planar
/// offset x0 served over distance l_k with the given LoS state. n_interferers
/// may be real-valued; values <= 0 give 1.
double laplace_edge1(double s, double l_k, double x0, LosState serving,
                     double n_interferers, const ChannelParams& ch, double R,
                     double h, const QuadratureSpec& spec = {});

/// Laplace transform of the uplink edge interference at a UAV at planar
/// offset y0 (uniform transmitter policy, no exclusion regions).
double laplace_edge2(double s, double y0, LosState serving, double n_interferers,
                     const ChannelParams& ch, double R, double h,
                     const QuadratureSpec& spec = {});

/// Laplace transform of the backhaul interference at the central BS.
double laplace_back(double s, double n_interferers, const ChannelParams& ch,
                    double R, double h, const QuadratureSpec& spec = {});

/// Laplace transform of device-to-BS interference for the direct FL baseline.
double laplace_direct(double s, double n_interferers, const ChannelParams& ch,
                      double R, const QuadratureSpec& spec = {});

/// Joint downlink+uplink edge success probability conditioned on l_k,
/// averaged over the serving LoS state. x0/y0 are the device and serving
/// UAV planar offsets from the BS.
double edge_success(double l_k, double x0, double y0, const ChannelParams& ch,
                    const ResourceConfig& res, const NetworkScale& net, double R,
                    double h, const QuadratureSpec& spec = {});

double backhaul_success(double g_u, const ChannelParams& ch, const ResourceConfig& res,
                        const NetworkScale& net, double R, double h,
                        const QuadratureSpec& spec = {});

double direct_success(double q_k, const ChannelParams& ch, const ResourceConfig& res,
                      const NetworkScale& net, double R, const QuadratureSpec& spec = {});

struct SuccessProbabilities {
  std::vector<double> edge;      // per device
  std::vector<double> backhaul;  // per UAV
  std::vector<double> direct;    // per device
};

/// All per-device and per-UAV success probabilities for a realization.
/// Throws NumericalFailure if any probability is not in (0, 1].
SuccessProbabilities compute_success_probabilities(const Topology& topo,
                                                   const ClusterAssignment& asg,
                                                   const ChannelParams& ch,
                                                   const ResourceConfig& res,
                                                   const QuadratureSpec& spec = {});

}  // namespace uhfl
