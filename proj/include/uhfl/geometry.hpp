#pragma once

#include <optional>
#include <random>
#include <vector>

#include "uhfl/types.hpp"

namespace uhfl {

using Rng = std::mt19937_64;

/// BS at the origin, devices on the ground and UAVs at height h,
/// both uniform on the disk of radius R.
struct Topology {
  double radius = 500.0;
  double height = 120.0;
  std::vector<Vec2> devices;
  std::vector<Vec2> uavs;

  int n_devices() const { return static_cast<int>(devices.size()); }
  int n_uavs() const { return static_cast<int>(uavs.size()); }
  /// 3-D distance between device k and UAV u.
  double link_distance(int device, int uav) const;
  /// 3-D distance between UAV u and the BS.
  double backhaul_distance(int uav) const;
  /// Ground distance between device k and the BS.
  double direct_distance(int device) const;
};

Topology sample_topology(int n_devices, int n_uavs, double radius, double height,
                         std::uint64_t seed);

/// Eq-style LoS probability for a 3-D distance r to a UAV at height h.
/// The elevation angle at r == h is taken as 90 degrees.
double los_probability(double r, double h, double a, double b);
double nlos_probability(double r, double h, double a, double b);

/// Minimum distance of an opposite-state interferer implied by
/// strongest-average-power association: l^(alpha_from/alpha_to).
double exclusion_region(double l, double alpha_from, double alpha_to);

/// Distance pdf from a uniform point on the disk (at height offset h) to a
/// ground receiver at planar offset x0 from the center. Support [h, w_p].
double interferer_pdf_offcenter(double r, double x0, double R, double h);
/// Central-receiver special case: 2r/R^2 on [h, sqrt(R^2+h^2)].
double interferer_pdf_center(double r, double R, double h);

/// Truncated state-conditioned interferer distance density
/// f(r) = base(r) P_state(r) / mass on [lower, upper].
struct StatePdf {
  LosState state;
  double lower = 0.0;
  double upper = 0.0;
  double mass = 0.0;  // integral of base*P_state over [lower, upper]
  double x0 = 0.0;    // receiver planar offset; 0 selects the central pdf
  double R = 0.0, h = 0.0, a = 0.0, b = 0.0;

  bool zero_mass() const { return mass < 1e-12; }
  /// Normalized density; 0 outside the support. Undefined for zero_mass().
  double operator()(double r) const;
};

StatePdf conditional_state_pdf(LosState state, double lower, double x0, double R,
                               double h, double a, double b,
                               const QuadratureSpec& spec = {});

/// Device-to-UAV association and the sampled per-run LoS states.
struct ClusterAssignment {
  std::vector<int> serving_uav;            // per device
  std::vector<double> serving_distance_l;  // per device, 3-D
  std::vector<LosState> serving_los_state; // per device
  std::vector<double> backhaul_distance_g; // per UAV, 3-D
  std::vector<LosState> backhaul_los_state;// per UAV
  // Full device x UAV LoS state matrix, row-major by device.
  std::vector<LosState> link_los_state;
  int n_uavs = 0;

  LosState link_state(int device, int uav) const { return link_los_state[device * n_uavs + uav]; }
  std::vector<std::vector<int>> clusters() const;
};

/// Max received average power association under per-link sampled LoS states.
ClusterAssignment associate(const Topology& topo, const ChannelParams& ch,
                            std::uint64_t seed);

}  // namespace uhfl
