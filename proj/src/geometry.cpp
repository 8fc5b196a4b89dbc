#include "uhfl/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "uhfl/quadrature.hpp"

namespace uhfl {

double Vec2::norm() const { return std::hypot(x, y); }

void ChannelParams::validate() const {
  if (alpha_los > alpha_nlos) throw std::invalid_argument("alpha_los must not exceed alpha_nlos");
  if (m_los < 1 || m_nlos < 1 || m_direct < 1) throw std::invalid_argument("Nakagami m must be >= 1");
  if (theta <= 0) throw std::invalid_argument("theta must be positive (linear)");
  if (p_device <= 0 || p_uav <= 0 || noise < 0) throw std::invalid_argument("bad power parameter");
}

void ResourceConfig::validate() const {
  if (rb_bs < 1 || rb_uav < 1 || rb_direct < 1) throw std::invalid_argument("RB counts must be >= 1");
  if (bandwidth_device <= 0 || bandwidth_uav <= 0) throw std::invalid_argument("bandwidth must be positive");
}

double Topology::link_distance(int device, int uav) const {
  const double dx = devices[device].x - uavs[uav].x;
  const double dy = devices[device].y - uavs[uav].y;
  return std::sqrt(dx * dx + dy * dy + height * height);
}

double Topology::backhaul_distance(int uav) const {
  const double d = uavs[uav].norm();
  return std::sqrt(d * d + height * height);
}

double Topology::direct_distance(int device) const { return devices[device].norm(); }

namespace {

Vec2 sample_disk_point(double radius, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r = radius * std::sqrt(unit(rng));
  const double phi = 2.0 * M_PI * unit(rng);
  return {r * std::cos(phi), r * std::sin(phi)};
}

}  // namespace

Topology sample_topology(int n_devices, int n_uavs, double radius, double height,
                         std::uint64_t seed) {
  if (n_devices < 1 || n_uavs < 1) throw std::invalid_argument("counts must be >= 1");
  if (radius <= 0 || height <= 0) throw std::invalid_argument("radius and height must be positive");
  Topology topo;
  topo.radius = radius;
  topo.height = height;
  Rng rng(seed);
  topo.devices.reserve(n_devices);
  topo.uavs.reserve(n_uavs);
  for (int i = 0; i < n_devices; ++i) topo.devices.push_back(sample_disk_point(radius, rng));
  for (int i = 0; i < n_uavs; ++i) topo.uavs.push_back(sample_disk_point(radius, rng));
  return topo;
}

double los_probability(double r, double h, double a, double b) {
  if (h <= 0) throw std::invalid_argument("height must be positive");
  if (r < h) throw std::invalid_argument("3-D distance below UAV height");
  const double planar = std::sqrt(std::max(r * r - h * h, 0.0));
  const double angle_deg = planar == 0.0 ? 90.0 : (180.0 / M_PI) * std::atan(h / planar);
  return 1.0 / (1.0 + a * std::exp(-b * (angle_deg - a)));
}

double nlos_probability(double r, double h, double a, double b) {
  return 1.0 - los_probability(r, h, a, b);
}

double exclusion_region(double l, double alpha_from, double alpha_to) {
  if (l <= 0 || alpha_from <= 0 || alpha_to <= 0)
    throw std::invalid_argument("exclusion_region: nonpositive input");
  return std::pow(l, alpha_from / alpha_to);
}

double interferer_pdf_offcenter(double r, double x0, double R, double h) {
  if (x0 > R) throw std::invalid_argument("receiver offset outside disk");
  if (x0 < 0 || R <= 0 || h <= 0) throw std::invalid_argument("bad geometry");
  if (x0 == 0.0) return interferer_pdf_center(r, R, h);
  const double w_m = std::sqrt((R - x0) * (R - x0) + h * h);
  const double w_p = std::sqrt((R + x0) * (R + x0) + h * h);
  const double d = std::sqrt(R * R + h * h);
  if (r < h || r > w_p) return 0.0;
  if (r <= w_m) return 2.0 * r / (R * R);
  const double planar = std::sqrt(std::max(r * r - h * h, 0.0));
  double arg = (r * r + x0 * x0 - d * d) / (2.0 * x0 * std::max(planar, 1e-300));
  arg = std::clamp(arg, -1.0, 1.0);
  return 2.0 * r / (M_PI * R * R) * std::acos(arg);
}

double interferer_pdf_center(double r, double R, double h) {
  const double d = std::sqrt(R * R + h * h);
  if (r < h || r > d) return 0.0;
  return 2.0 * r / (R * R);
}

double StatePdf::operator()(double r) const {
  if (r < lower || r > upper || zero_mass()) return 0.0;
  const double base = interferer_pdf_offcenter(r, x0, R, h);
  const double p = state == LosState::Los ? los_probability(r, h, a, b)
                                          : nlos_probability(r, h, a, b);
  return base * p / mass;
}

StatePdf conditional_state_pdf(LosState state, double lower, double x0, double R,
                               double h, double a, double b, const QuadratureSpec& spec) {
  StatePdf pdf;
  pdf.state = state;
  pdf.x0 = x0;
  pdf.R = R;
  pdf.h = h;
  pdf.a = a;
  pdf.b = b;
  pdf.lower = std::max(lower, h);
  pdf.upper = std::sqrt((R + x0) * (R + x0) + h * h);
  lower = pdf.lower;
  if (lower >= pdf.upper) {
    pdf.mass = 0.0;
    return pdf;
  }
  pdf.mass = integrate(
      [&](double r) {
        const double p = state == LosState::Los ? los_probability(r, h, a, b)
                                                : nlos_probability(r, h, a, b);
        return interferer_pdf_offcenter(r, x0, R, h) * p;
      },
      lower, pdf.upper, spec);
  return pdf;
}

std::vector<std::vector<int>> ClusterAssignment::clusters() const {
  std::vector<std::vector<int>> out(n_uavs);
  for (int k = 0; k < static_cast<int>(serving_uav.size()); ++k)
    out[serving_uav[k]].push_back(k);
  return out;
}

ClusterAssignment associate(const Topology& topo, const ChannelParams& ch,
                            std::uint64_t seed) {
  ch.validate();
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ClusterAssignment asg;
  const int nd = topo.n_devices();
  const int nu = topo.n_uavs();
  asg.n_uavs = nu;
  asg.link_los_state.resize(static_cast<std::size_t>(nd) * nu);
  asg.serving_uav.resize(nd);
  asg.serving_distance_l.resize(nd);
  asg.serving_los_state.resize(nd);

  for (int k = 0; k < nd; ++k) {
    int best = -1;
    double best_power = -1.0;
    for (int u = 0; u < nu; ++u) {
      const double r = topo.link_distance(k, u);
      const double pl = los_probability(r, topo.height, ch.a, ch.b);
      const LosState z = unit(rng) < pl ? LosState::Los : LosState::Nlos;
      asg.link_los_state[static_cast<std::size_t>(k) * nu + u] = z;
      const double power = ch.p_uav * std::pow(r, -ch.alpha(z));
      if (power > best_power) {
        best_power = power;
        best = u;
      }
    }
    asg.serving_uav[k] = best;
    asg.serving_distance_l[k] = topo.link_distance(k, best);
    asg.serving_los_state[k] = asg.link_state(k, best);
  }

  asg.backhaul_distance_g.resize(nu);
  asg.backhaul_los_state.resize(nu);
  for (int u = 0; u < nu; ++u) {
    const double g = topo.backhaul_distance(u);
    asg.backhaul_distance_g[u] = g;
    const double pl = los_probability(g, topo.height, ch.a, ch.b);
    asg.backhaul_los_state[u] = unit(rng) < pl ? LosState::Los : LosState::Nlos;
  }
  return asg;
}

}  // namespace uhfl
