#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qcgauge/geometry.hpp"
#include "qcgauge/random.hpp"

namespace qcgauge {

class PackingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// m disks of normalized radius R.
struct Family {
  int count = 0;
  double log_radius = 0.0;

  static Family of(int count, double radius) { return {count, std::log(radius)}; }
  double radius() const { return std::exp(log_radius); }
  double area() const { return count * radius() * radius(); }
};

struct PlacedDisk {
  ComplexPoint center;
  int family = 0;
};

struct PackingOptions {
  double margin = 1e-6;  // disks are kept (R_a + R_b)(1 + margin) apart
  int attempts_per_disk = 20000;
  int restarts = 8;
};

/// Uniform grid over [-1, 1]^2 holding disk indices by bounding box.
class DiskGrid {
 public:
  DiskGrid() = default;
  explicit DiskGrid(double cell) {
    cell_ = std::max(cell, 2.0 / kMaxCells);
    n_ = std::max(1, static_cast<int>(std::ceil(2.0 / cell_)));
    cells_.assign(static_cast<std::size_t>(n_) * n_, {});
  }

  bool empty() const { return count_ == 0; }

  void insert(int index, ComplexPoint c, double r) {
    auto [x0, y0] = cell_of(c.real() - r, c.imag() - r);
    auto [x1, y1] = cell_of(c.real() + r, c.imag() + r);
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) cells_[static_cast<std::size_t>(y) * n_ + x].push_back(index);
    ++count_;
  }

  /// Calls fn(index) for every stored disk whose box may meet the square
  /// of half-width r about c. An index can be reported more than once.
  template <typename Fn>
  void query(ComplexPoint c, double r, Fn&& fn) const {
    if (count_ == 0) return;
    auto [x0, y0] = cell_of(c.real() - r, c.imag() - r);
    auto [x1, y1] = cell_of(c.real() + r, c.imag() + r);
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x)
        for (int idx : cells_[static_cast<std::size_t>(y) * n_ + x])
          if (!fn(idx)) return;
  }

 private:
  static constexpr int kMaxCells = 512;

  std::pair<int, int> cell_of(double x, double y) const {
    auto clamp = [this](double v) {
      int i = static_cast<int>(std::floor((v + 1.0) / cell_));
      return std::clamp(i, 0, n_ - 1);
    };
    return {clamp(x), clamp(y)};
  }

  double cell_ = 2.0;
  int n_ = 1;
  int count_ = 0;
  std::vector<std::vector<int>> cells_;
};

/// Disjoint disks inside the unit disk, in coordinates normalized to it.
class Packing {
 public:
  Packing() = default;
  Packing(std::vector<Family> families, std::vector<PlacedDisk> disks)
      : families_(std::move(families)), disks_(std::move(disks)) {
    index();
  }

  const std::vector<Family>& families() const { return families_; }
  const std::vector<PlacedDisk>& disks() const { return disks_; }
  const std::vector<int>& members(int family) const { return members_.at(family); }
  double radius(int disk) const { return families_[disks_[disk].family].radius(); }
  double log_radius(int disk) const { return families_[disks_[disk].family].log_radius; }

  /// Sum of m R^2 over the families.
  double coverage() const {
    CompensatedSum acc;
    for (const auto& f : families_) acc.add(f.area());
    return acc.value();
  }

  double max_radius() const {
    double r = 0.0;
    for (const auto& f : families_) r = std::max(r, f.radius());
    return r;
  }

  /// Disk whose open interior contains u, or -1.
  int locate(ComplexPoint u) const {
    if (std::abs(u) >= 1.0) return -1;
    int found = -1;
    grid_.query(u, 0.0, [&](int idx) {
      if (std::abs(u - disks_[idx].center) < radius(idx)) {
        found = idx;
        return false;
      }
      return true;
    });
    return found;
  }

 private:
  void index() {
    members_.assign(families_.size(), {});
    for (std::size_t i = 0; i < disks_.size(); ++i) {
      int f = disks_[i].family;
      if (f < 0 || f >= static_cast<int>(families_.size()))
        throw std::invalid_argument("packing disk refers to an unknown family");
      members_[f].push_back(static_cast<int>(i));
    }
    for (std::size_t f = 0; f < families_.size(); ++f)
      if (static_cast<int>(members_[f].size()) != families_[f].count)
        throw std::invalid_argument("packing family count does not match its disks");
    grid_ = DiskGrid(2.0 * max_radius());
    for (std::size_t i = 0; i < disks_.size(); ++i)
      grid_.insert(static_cast<int>(i), disks_[i].center, radius(static_cast<int>(i)));
  }

  std::vector<Family> families_;
  std::vector<PlacedDisk> disks_;
  std::vector<std::vector<int>> members_;
  DiskGrid grid_;
};

namespace detail {

// Dart thrower with one collision grid per radius level.
class DartBoard {
 public:
  DartBoard(const std::vector<double>& radii, double margin) : radii_(radii), margin_(margin) {
    for (double r : radii) grids_.emplace_back(2.0 * r * (1.0 + margin));
    placed_.resize(radii.size());
  }

  bool fits(ComplexPoint c, double r) const {
    if (std::abs(c) + r * (1.0 + margin_) > 1.0) return false;
    for (std::size_t level = 0; level < grids_.size(); ++level) {
      if (grids_[level].empty()) continue;
      double reach = (r + radii_[level]) * (1.0 + margin_);
      bool ok = true;
      grids_[level].query(c, reach, [&](int idx) {
        if (std::abs(c - placed_[level][idx]) <= reach) {
          ok = false;
          return false;
        }
        return true;
      });
      if (!ok) return false;
    }
    return true;
  }

  void place(std::size_t level, ComplexPoint c) {
    grids_[level].insert(static_cast<int>(placed_[level].size()), c, radii_[level]);
    placed_[level].push_back(c);
  }

  static ComplexPoint dart(Rng& rng, double max_abs) {
    double rho = max_abs * std::sqrt(rng.uniform());
    double phi = 2.0 * std::numbers::pi * rng.uniform();
    return std::polar(rho, phi);
  }

 private:
  std::vector<double> radii_;
  double margin_;
  std::vector<DiskGrid> grids_;
  std::vector<std::vector<ComplexPoint>> placed_;
};

inline std::vector<std::size_t> largest_first(const std::vector<Family>& families) {
  std::vector<std::size_t> order(families.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return families[a].log_radius > families[b].log_radius;
  });
  return order;
}

}  // namespace detail

/// Places the requested families by greedy dart throwing, largest radius
/// first. Deterministic in the seed.
inline Packing pack_unit_disk(const std::vector<Family>& families, std::uint64_t seed,
                              const PackingOptions& opt = {}) {
  double area = 0.0;
  for (const auto& f : families) {
    if (f.count < 0) throw std::invalid_argument("family count must be nonnegative");
    if (!(f.radius() > 0.0 && f.radius() < 1.0)) throw std::invalid_argument("family radius must lie in (0, 1)");
    area += f.area();
  }
  if (area >= 1.0) throw PackingError("packing infeasible, reduce radii or coverage");

  auto order = detail::largest_first(families);
  for (int attempt = 0; attempt < opt.restarts; ++attempt) {
    Rng rng = Rng::derived(seed, 0xd15c, static_cast<std::uint64_t>(attempt));
    std::vector<double> radii;
    for (const auto& f : families) radii.push_back(f.radius());
    detail::DartBoard board(radii, opt.margin);
    std::vector<PlacedDisk> disks;
    bool ok = true;
    for (std::size_t fi : order) {
      double r = radii[fi];
      for (int k = 0; k < families[fi].count && ok; ++k) {
        bool placed = false;
        for (int a = 0; a < opt.attempts_per_disk; ++a) {
          ComplexPoint c = detail::DartBoard::dart(rng, 1.0 - r * (1.0 + opt.margin));
          if (board.fits(c, r)) {
            board.place(fi, c);
            disks.push_back({c, static_cast<int>(fi)});
            placed = true;
            break;
          }
        }
        ok = placed;
      }
      if (!ok) break;
    }
    if (ok) return Packing(families, std::move(disks));
  }
  throw PackingError("packing infeasible, reduce radii or coverage");
}

/// Fills the unit disk level by level with radii top * 2^-l, throwing
/// `attempts / R^2` darts per level; the counts are whatever landed.
inline Packing saturate_unit_disk(double top_radius, int levels, double attempts,
                                  std::uint64_t seed, std::size_t max_disks,
                                  const PackingOptions& opt = {}) {
  if (!(top_radius > 0.0 && top_radius < 1.0)) throw std::invalid_argument("top radius must lie in (0, 1)");
  if (levels < 1) throw std::invalid_argument("at least one radius level is required");
  std::vector<double> radii;
  for (int l = 0; l < levels; ++l) radii.push_back(top_radius * std::ldexp(1.0, -l));
  Rng rng = Rng::derived(seed, 0x5a7, 0);
  detail::DartBoard board(radii, opt.margin);
  std::vector<PlacedDisk> disks;
  std::vector<Family> families;
  for (int l = 0; l < levels; ++l) {
    double r = radii[l];
    auto darts = static_cast<long long>(attempts / (r * r));
    int count = 0;
    for (long long a = 0; a < darts; ++a) {
      ComplexPoint c = detail::DartBoard::dart(rng, 1.0 - r * (1.0 + opt.margin));
      if (board.fits(c, r)) {
        board.place(l, c);
        disks.push_back({c, l});
        ++count;
        if (disks.size() > max_disks) throw PackingError("packing exceeds the disk budget");
      }
    }
    families.push_back({count, std::log(r)});
  }
  // Drop empty levels but keep family indices dense.
  std::vector<int> remap(families.size(), -1);
  std::vector<Family> kept;
  for (std::size_t f = 0; f < families.size(); ++f) {
    if (families[f].count == 0) continue;
    remap[f] = static_cast<int>(kept.size());
    kept.push_back(families[f]);
  }
  for (auto& d : disks) d.family = remap[d.family];
  return Packing(std::move(kept), std::move(disks));
}

}  // namespace qcgauge
