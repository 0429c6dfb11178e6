#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

namespace qcgauge {

/// F_K(alpha, gamma): the largest Hausdorff dimension of a set on which a
/// K-quasiconformal map stretches like alpha and rotates like gamma.
/// Can be <= 0 for extreme parameters; callers check positivity.
inline double spectrum_dimension(double K, double alpha, double gamma) {
  if (K == 1.0) throw std::invalid_argument("conformal case excluded");
  if (!(K > 1.0)) throw std::invalid_argument("K must exceed 1");
  double rotation_term = 4.0 * K * alpha * alpha * gamma * gamma / ((K + 1.0) * (K + 1.0));
  return 1.0 + alpha -
         (K + 1.0) / (K - 1.0) * std::sqrt((1.0 - alpha) * (1.0 - alpha) + rotation_term);
}

/// Membership of alpha(1 + i gamma) in the disk centered (K + 1/K)/2 with
/// radius (K - 1/K)/2. Boundary points belong only to the closed disk.
inline bool in_B_K(double K, double alpha, double gamma, bool open) {
  std::complex<double> tau(alpha, alpha * gamma);
  double center = 0.5 * (K + 1.0 / K);
  double radius = 0.5 * (K - 1.0 / K);
  double dist = std::abs(tau - center);
  // Absorb rounding at the boundary so 1/K and K land on the circle.
  constexpr double kSlack = 1e-13;
  if (open) return dist < radius - kSlack;
  return dist <= radius + kSlack;
}

struct StretchRotationParams {
  double K = 2.0;
  double alpha = 1.0;
  double gamma = 0.0;

  StretchRotationParams() = default;
  StretchRotationParams(double K_, double alpha_, double gamma_) : K(K_), alpha(alpha_), gamma(gamma_) {
    if (!(K > 1.0)) throw std::invalid_argument("K must exceed 1");
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    if (!in_B_K(K, alpha, gamma, false))
      throw std::invalid_argument("alpha(1 + i gamma) lies outside the closed disk B_K");
  }

  double dimension() const { return spectrum_dimension(K, alpha, gamma); }
};

/// The auxiliary distortion K̄ of the rotation construction: the pure-stretch
/// spectrum at K̄ matches the rotating spectrum at K,
/// F_{K̄}(alpha, 0) = F_K(alpha, gamma). Reduces to K when gamma = 0.
inline double rotation_distortion(double K, double alpha, double gamma) {
  if (!(alpha < 1.0)) throw std::invalid_argument("rotation construction needs alpha < 1");
  double ratio = 2.0 * std::sqrt(K) * alpha * gamma / ((K + 1.0) * (1.0 - alpha));
  double q = (K + 1.0) / (K - 1.0) * std::sqrt(1.0 + ratio * ratio);
  return (q + 1.0) / (q - 1.0);
}

/// Spiral exponent of the rotating annuli: 1/K̄ + i alpha gamma (K̄-1) / (K̄(1-alpha)).
inline std::complex<double> rotation_exponent(double Kbar, double alpha, double gamma) {
  return {1.0 / Kbar, alpha * gamma * (Kbar - 1.0) / (Kbar * (1.0 - alpha))};
}

/// Parameters of the (beta, p) Riesz capacity whose homogeneity 2 - beta p
/// equals the construction dimension d.
struct RieszParams {
  double beta = 0.0;
  double p = 2.0;
  double p_conjugate = 2.0;
  double delta = 1.0;

  RieszParams() = default;

  static RieszParams from_dimension(double d, double K, double p) {
    if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
    if (!(d > 0.0 && d < 2.0)) throw std::invalid_argument("dimension must lie in (0, 2)");
    RieszParams r;
    r.p = p;
    r.beta = (2.0 - d) / p;
    r.p_conjugate = p / (p - 1.0);
    r.delta = 1.0 + 1.0 / (d * K * (r.p_conjugate - 1.0));
    return r;
  }

  double homogeneity() const { return 2.0 - beta * p; }
};

}  // namespace qcgauge
