#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace coarsehall {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double dist(const Vec2& a, const Vec2& b) {
  const double dx = a.x - b.x, dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

/// Sentinel for distances to the empty set.
inline constexpr double kInfiniteDistance = std::numeric_limits<double>::infinity();

/// A finite 2D point set with the Euclidean metric and counting measure.
/// Square-lattice clouds remember their grid shape so lattice-only model
/// builders can validate their input.
class SiteCloud {
 public:
  SiteCloud(std::vector<Vec2> sites, std::string label);

  std::size_t size() const { return sites_.size(); }
  const Vec2& site(std::size_t i) const { return sites_[i]; }
  const std::vector<Vec2>& sites() const { return sites_; }
  const std::string& label() const { return label_; }

  double distance(std::size_t i, std::size_t j) const { return dist(sites_[i], sites_[j]); }
  double diameter() const;

  bool is_square_lattice() const { return nx_ > 0; }
  int lattice_nx() const { return nx_; }
  int lattice_ny() const { return ny_; }
  double lattice_spacing() const { return spacing_; }
  void set_lattice_shape(int nx, int ny, double spacing);

 private:
  std::vector<Vec2> sites_;
  std::string label_;
  int nx_ = 0, ny_ = 0;
  double spacing_ = 0.0;
};

using CloudPtr = std::shared_ptr<const SiteCloud>;

/// Boolean site mask standing in for a Borel subset Z and the
/// multiplication operator chi_Z.
class RegionMask {
 public:
  RegionMask() = default;
  RegionMask(CloudPtr cloud, std::vector<std::uint8_t> bits);
  static RegionMask empty(CloudPtr cloud);
  static RegionMask full(CloudPtr cloud);
  static RegionMask of_indices(CloudPtr cloud, const std::vector<std::size_t>& indices);

  const CloudPtr& cloud() const { return cloud_; }
  std::size_t size() const { return bits_.size(); }
  bool contains(std::size_t i) const { return bits_[i] != 0; }
  std::size_t count() const;
  std::vector<std::size_t> indices() const;
  bool is_empty() const { return count() == 0; }

  RegionMask complement() const;
  RegionMask operator&(const RegionMask& o) const;
  RegionMask operator|(const RegionMask& o) const;
  RegionMask setminus(const RegionMask& o) const;
  bool operator==(const RegionMask& o) const;
  bool subset_of(const RegionMask& o) const;
  bool disjoint_from(const RegionMask& o) const;

  /// min site-pair distance to another mask; +inf if either side empty
  double distance_to(const RegionMask& o) const;
  /// min distance from one site to the mask; +inf if mask empty
  double distance_from_site(std::size_t i) const;
  /// max pairwise distance among member sites; 0 if empty or singleton
  double diameter() const;

 private:
  CloudPtr cloud_;
  std::vector<std::uint8_t> bits_;
};

void require_same_cloud(const RegionMask& a, const RegionMask& b);

/// Disjoint cover of the cloud by bounded-diameter cells.
struct Tiling {
  CloudPtr cloud;
  double r0 = 0.0;
  std::vector<int> cell_of;                        // cell id per site
  std::vector<std::vector<std::size_t>> cells;     // member sites per cell

  std::size_t cell_count() const { return cells.size(); }
};

struct ExcisivenessReport {
  std::vector<double> r_samples;
  std::vector<double> f_hat;  // minimal covering radius per r; +inf sentinel allowed
  double mu_hat = 0.0;
  enum class Verdict { polynomial_like, non_polynomial_like, inconclusive };
  Verdict verdict = Verdict::inconclusive;
};

const char* to_string(ExcisivenessReport::Verdict v);

struct ProfileRow {
  double r = 0.0;
  double value = 0.0;
};

struct GrowthProfile {
  std::vector<ProfileRow> rows;  // (r, max ball population)
  double exponent = 0.0;         // least-squares log-log slope; NaN if too few points
};

class capacity_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

CloudPtr build_square_lattice(int nx, int ny, double spacing,
                              std::size_t max_sites = 10000);
CloudPtr build_poisson_cloud(double density, double width, double height,
                             std::uint64_t seed, std::size_t max_sites = 10000);
/// Reflect all sites through the y axis (x -> -x); lattice shape is kept.
CloudPtr mirror_x(const CloudPtr& cloud);

RegionMask thicken(const RegionMask& region, double r);

std::vector<ProfileRow> transversality_profile(const std::vector<RegionMask>& regions,
                                               const std::vector<double>& r_samples);
ExcisivenessReport excisiveness_profile(const std::vector<RegionMask>& regions,
                                        const std::vector<double>& r_samples);

Tiling build_tiling(const CloudPtr& cloud, double r0);
/// Tiling validator: disjoint cover, cell diameter <= r0, and local
/// finiteness (returns the max number of cells meeting any probe ball).
std::size_t validate_tiling(const Tiling& t, double probe_radius);

GrowthProfile volume_growth_profile(const CloudPtr& cloud,
                                    const std::vector<double>& r_samples);

/// Least-squares slope of log(y) against log(x) over points with x,y > 0
/// and finite. Returns NaN if fewer than two usable points remain.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace coarsehall
