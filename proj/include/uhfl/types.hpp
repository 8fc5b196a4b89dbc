#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace uhfl {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  double norm() const;
};

enum class LosState { Los, Nlos };

/// Path-loss, fading and power parameters shared by all links.
struct ChannelParams {
  double alpha_los = 2.0;
  double alpha_nlos = 3.5;
  int m_los = 4;
  int m_nlos = 1;
  double a = 9.61;
  double b = 0.16;
  double p_device = 0.75;   // W
  double p_uav = 1.5;       // W
  double noise = 4.14e-6;   // W
  double theta = 0.316227766016838;  // linear, default -5 dB
  int m_direct = 2;
  double alpha_direct = 2.5;

  double alpha(LosState z) const { return z == LosState::Los ? alpha_los : alpha_nlos; }
  int m(LosState z) const { return z == LosState::Los ? m_los : m_nlos; }
  void validate() const;
};

struct ResourceConfig {
  int rb_bs = 5;       // M_b
  int rb_uav = 15;     // M_u
  int rb_direct = 20;  // M_d
  double bandwidth_device = 1e6;  // Hz
  double bandwidth_uav = 1e6;     // Hz
  void validate() const;
};

struct QuadratureSpec {
  double rel_tol = 1e-6;
  double abs_tol = 1e-9;
  int max_subdivisions = 512;
};

/// Adaptive quadrature ran out of subdivision budget; carries the best estimate.
class ConvergenceFailure : public std::runtime_error {
 public:
  ConvergenceFailure(const std::string& what, double best_estimate, double error_estimate)
      : std::runtime_error(what), best(best_estimate), error(error_estimate) {}
  double best;
  double error;
};

class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

}  // namespace uhfl
