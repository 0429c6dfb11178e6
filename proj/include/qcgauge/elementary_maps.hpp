#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <variant>

#include "qcgauge/geometry.hpp"

namespace qcgauge {

using Complex = std::complex<double>;

struct Identity {};

/// w = post_center + scale * e^{i rotation} * (z - pre_center)
struct Similarity {
  LogScale scale;
  double rotation = 0.0;
  ComplexPoint pre_center{};
  ComplexPoint post_center{};
};

/// z -> c + (z - c) |(z - c)/R|^{exponent - 1} inside the disk, identity outside.
struct RadialStretch {
  ComplexPoint center{};
  LogScale outer_radius;
  double exponent_real = 1.0;
};

/// Spiral variant of the radial stretch with complex exponent a + ib.
/// Holds exponent - 1, the quantity every evaluation actually needs.
class SpiralStretch {
 public:
  SpiralStretch(ComplexPoint center, LogScale outer_radius, Complex exponent)
      : center_(center), outer_radius_(outer_radius), offset_(exponent - 1.0) {
    if (!(exponent.real() > 0.0))
      throw std::invalid_argument("spiral stretch needs a positive real exponent part");
  }

  static SpiralStretch from_alpha_gamma(ComplexPoint center, LogScale outer_radius, double alpha,
                                        double gamma) {
    return SpiralStretch(center, outer_radius, Complex(alpha, alpha * gamma));
  }

  ComplexPoint center() const { return center_; }
  LogScale outer_radius() const { return outer_radius_; }
  Complex exponent() const { return offset_ + 1.0; }
  Complex exponent_offset() const { return offset_; }
  double alpha() const { return offset_.real() + 1.0; }
  double gamma() const { return offset_.imag() / alpha(); }

 private:
  ComplexPoint center_;
  LogScale outer_radius_;
  Complex offset_;
};

using ElementaryMap = std::variant<Identity, Similarity, RadialStretch, SpiralStretch>;

struct BeltramiSample {
  ComplexPoint location;
  Complex mu;
};

namespace detail {

// Power map about `center` evaluated in log-polar form, so tiny offsets
// never pass through an underflowing magnitude.
inline ComplexPoint power_stretch(ComplexPoint z, ComplexPoint center, double log_outer,
                                  Complex offset) {
  Complex d = z - center;
  double rho = std::abs(d);
  if (rho == 0.0) return center;
  double log_rho = std::log(rho);
  double rel = log_rho - log_outer;
  if (rel >= 0.0) return z;
  double log_mag = log_rho + offset.real() * rel;
  double angle = std::arg(d) + offset.imag() * rel;
  return center + std::polar(std::exp(log_mag), angle);
}

inline ComplexPoint power_stretch_inverse(ComplexPoint w, ComplexPoint center, double log_outer,
                                          Complex offset) {
  Complex d = w - center;
  double rho = std::abs(d);
  if (rho == 0.0) return center;
  double rel_w = std::log(rho) - log_outer;
  if (rel_w >= 0.0) return w;
  double rel = rel_w / (offset.real() + 1.0);
  double angle = std::arg(d) - offset.imag() * rel;
  return center + std::polar(std::exp(log_outer + rel), angle);
}

// For f = z|z|^{lambda-1}: mu = (lambda-1)/(lambda+1) * z / conj(z).
inline Complex power_beltrami(ComplexPoint z, ComplexPoint center, double log_outer,
                              Complex offset) {
  Complex d = z - center;
  double rho = std::abs(d);
  if (rho == 0.0 || std::log(rho) >= log_outer) return 0.0;
  Complex lambda = offset + 1.0;
  return (lambda - 1.0) / (lambda + 1.0) * (d / std::conj(d));
}

}  // namespace detail

inline ComplexPoint eval(const ElementaryMap& map, ComplexPoint z) {
  return std::visit(
      [z](const auto& m) -> ComplexPoint {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Identity>) {
          return z;
        } else if constexpr (std::is_same_v<T, Similarity>) {
          return m.post_center + std::polar(m.scale.value(), m.rotation) * (z - m.pre_center);
        } else if constexpr (std::is_same_v<T, RadialStretch>) {
          return detail::power_stretch(z, m.center, m.outer_radius.log_value(),
                                       Complex(m.exponent_real - 1.0, 0.0));
        } else {
          return detail::power_stretch(z, m.center(), m.outer_radius().log_value(),
                                       m.exponent_offset());
        }
      },
      map);
}

inline ComplexPoint inverse_eval(const ElementaryMap& map, ComplexPoint w) {
  return std::visit(
      [w](const auto& m) -> ComplexPoint {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Identity>) {
          return w;
        } else if constexpr (std::is_same_v<T, Similarity>) {
          return m.pre_center + (w - m.post_center) / std::polar(m.scale.value(), m.rotation);
        } else if constexpr (std::is_same_v<T, RadialStretch>) {
          return detail::power_stretch_inverse(w, m.center, m.outer_radius.log_value(),
                                               Complex(m.exponent_real - 1.0, 0.0));
        } else {
          return detail::power_stretch_inverse(w, m.center(), m.outer_radius().log_value(),
                                               m.exponent_offset());
        }
      },
      map);
}

/// Analytic Beltrami coefficient; zero wherever the map is conformal.
inline Complex beltrami(const ElementaryMap& map, ComplexPoint z) {
  return std::visit(
      [z](const auto& m) -> Complex {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Identity> || std::is_same_v<T, Similarity>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, RadialStretch>) {
          return detail::power_beltrami(z, m.center, m.outer_radius.log_value(),
                                        Complex(m.exponent_real - 1.0, 0.0));
        } else {
          return detail::power_beltrami(z, m.center(), m.outer_radius().log_value(),
                                        m.exponent_offset());
        }
      },
      map);
}

inline double distortion_from_mu(double abs_mu) { return (1.0 + abs_mu) / (1.0 - abs_mu); }
inline double mu_bound(double K) { return (K - 1.0) / (K + 1.0); }

/// |mu| of z|z|^{lambda-1}; below one exactly when Re(lambda) > 0.
inline double power_map_mu(Complex lambda) { return std::abs(lambda - 1.0) / std::abs(lambda + 1.0); }

/// Declared distortion K of a map.
inline double declared_distortion(const ElementaryMap& map) {
  return std::visit(
      [](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Identity> || std::is_same_v<T, Similarity>) {
          return 1.0;
        } else if constexpr (std::is_same_v<T, RadialStretch>) {
          return distortion_from_mu(power_map_mu(Complex(m.exponent_real, 0.0)));
        } else {
          return distortion_from_mu(power_map_mu(m.exponent()));
        }
      },
      map);
}

/// One disk of a generation map: power stretch on the annulus between the
/// inner and outer radius, rigid similarity on the inner disk, identity
/// outside. The inner similarity factor (inner/outer)^{lambda-1} makes the
/// pieces agree on the inner circle.
class AnnularStretch {
 public:
  AnnularStretch(ComplexPoint center, double log_outer, double log_inner, Complex exponent)
      : center_(center), log_outer_(log_outer), log_inner_(log_inner), offset_(exponent - 1.0) {
    if (!(log_inner < log_outer)) throw std::invalid_argument("inner radius must be below outer");
    if (!(exponent.real() > 0.0)) throw std::invalid_argument("exponent needs positive real part");
  }

  ComplexPoint center() const { return center_; }
  double log_outer() const { return log_outer_; }
  double log_inner() const { return log_inner_; }
  Complex exponent() const { return offset_ + 1.0; }

  /// log of the inner similarity's scale factor and its rotation angle.
  double log_inner_factor() const { return offset_.real() * (log_inner_ - log_outer_); }
  double inner_phase() const { return offset_.imag() * (log_inner_ - log_outer_); }

  ComplexPoint eval(ComplexPoint z) const {
    Complex d = z - center_;
    double rho = std::abs(d);
    if (rho == 0.0) return center_;
    double log_rho = std::log(rho);
    if (log_rho >= log_outer_) return z;
    if (log_rho <= log_inner_)
      return center_ + std::polar(std::exp(log_inner_factor()), inner_phase()) * d;
    return detail::power_stretch(z, center_, log_outer_, offset_);
  }

  ComplexPoint inverse_eval(ComplexPoint w) const {
    Complex d = w - center_;
    double rho = std::abs(d);
    if (rho == 0.0) return center_;
    double log_rho = std::log(rho);
    if (log_rho >= log_outer_) return w;
    double log_image_inner = log_inner_ + log_inner_factor();
    if (log_rho <= log_image_inner)
      return center_ + d / std::polar(std::exp(log_inner_factor()), inner_phase());
    return detail::power_stretch_inverse(w, center_, log_outer_, offset_);
  }

  Complex beltrami(ComplexPoint z) const {
    double rho = std::abs(z - center_);
    if (rho == 0.0) return 0.0;
    double log_rho = std::log(rho);
    if (log_rho <= log_inner_ || log_rho >= log_outer_) return 0.0;
    return detail::power_beltrami(z, center_, log_outer_, offset_);
  }

 private:
  ComplexPoint center_;
  double log_outer_;
  double log_inner_;
  Complex offset_;
};

/// Central-difference estimate of d_zbar f / d_z f. O(h^2) bias away from
/// piece boundaries; a stencil straddling a boundary sees a kink.
template <typename Map>
Complex finite_difference_beltrami(const Map& f, ComplexPoint z, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite difference step must be positive");
  const Complex ih(0.0, h);
  Complex fx = (f(z + h) - f(z - h)) / (2.0 * h);
  Complex fy = (f(z + ih) - f(z - ih)) / (2.0 * h);
  Complex dz = 0.5 * (fx - Complex(0.0, 1.0) * fy);
  Complex dzbar = 0.5 * (fx + Complex(0.0, 1.0) * fy);
  if (std::abs(dz) < 1e-14) throw std::domain_error("derivative vanishes");
  return dzbar / dz;
}

}  // namespace qcgauge
