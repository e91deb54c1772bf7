#include "coarsehall/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

namespace coarsehall {

SiteCloud::SiteCloud(std::vector<Vec2> sites, std::string label)
    : sites_(std::move(sites)), label_(std::move(label)) {
  if (sites_.empty()) throw std::invalid_argument("SiteCloud: need at least one site");
  for (const auto& s : sites_) {
    if (!std::isfinite(s.x) || !std::isfinite(s.y))
      throw std::invalid_argument("SiteCloud: non-finite coordinate");
  }
}

double SiteCloud::diameter() const {
  double d = 0.0;
  for (std::size_t i = 0; i < sites_.size(); ++i)
    for (std::size_t j = i + 1; j < sites_.size(); ++j)
      d = std::max(d, dist(sites_[i], sites_[j]));
  return d;
}

void SiteCloud::set_lattice_shape(int nx, int ny, double spacing) {
  nx_ = nx;
  ny_ = ny;
  spacing_ = spacing;
}

RegionMask::RegionMask(CloudPtr cloud, std::vector<std::uint8_t> bits)
    : cloud_(std::move(cloud)), bits_(std::move(bits)) {
  if (!cloud_ || bits_.size() != cloud_->size())
    throw std::invalid_argument("RegionMask: bits length must match cloud size");
}

RegionMask RegionMask::empty(CloudPtr cloud) {
  std::vector<std::uint8_t> b(cloud->size(), 0);
  return RegionMask(std::move(cloud), std::move(b));
}

RegionMask RegionMask::full(CloudPtr cloud) {
  std::vector<std::uint8_t> b(cloud->size(), 1);
  return RegionMask(std::move(cloud), std::move(b));
}

RegionMask RegionMask::of_indices(CloudPtr cloud, const std::vector<std::size_t>& indices) {
  std::vector<std::uint8_t> b(cloud->size(), 0);
  for (auto i : indices) {
    if (i >= b.size()) throw std::invalid_argument("RegionMask: index out of range");
    b[i] = 1;
  }
  return RegionMask(std::move(cloud), std::move(b));
}

std::size_t RegionMask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::vector<std::size_t> RegionMask::indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i]) out.push_back(i);
  return out;
}

RegionMask RegionMask::complement() const {
  std::vector<std::uint8_t> b(bits_.size());
  for (std::size_t i = 0; i < bits_.size(); ++i) b[i] = bits_[i] ? 0 : 1;
  return RegionMask(cloud_, std::move(b));
}

void require_same_cloud(const RegionMask& a, const RegionMask& b) {
  if (a.cloud() != b.cloud())
    throw std::invalid_argument("region masks refer to different clouds");
}

RegionMask RegionMask::operator&(const RegionMask& o) const {
  require_same_cloud(*this, o);
  std::vector<std::uint8_t> b(bits_.size());
  for (std::size_t i = 0; i < bits_.size(); ++i) b[i] = bits_[i] & o.bits_[i];
  return RegionMask(cloud_, std::move(b));
}

RegionMask RegionMask::operator|(const RegionMask& o) const {
  require_same_cloud(*this, o);
  std::vector<std::uint8_t> b(bits_.size());
  for (std::size_t i = 0; i < bits_.size(); ++i) b[i] = bits_[i] | o.bits_[i];
  return RegionMask(cloud_, std::move(b));
}

RegionMask RegionMask::setminus(const RegionMask& o) const {
  require_same_cloud(*this, o);
  std::vector<std::uint8_t> b(bits_.size());
  for (std::size_t i = 0; i < bits_.size(); ++i) b[i] = bits_[i] & (o.bits_[i] ? 0 : 1);
  return RegionMask(cloud_, std::move(b));
}

bool RegionMask::operator==(const RegionMask& o) const {
  return cloud_ == o.cloud_ && bits_ == o.bits_;
}

bool RegionMask::subset_of(const RegionMask& o) const {
  require_same_cloud(*this, o);
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i] && !o.bits_[i]) return false;
  return true;
}

bool RegionMask::disjoint_from(const RegionMask& o) const {
  require_same_cloud(*this, o);
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i] && o.bits_[i]) return false;
  return true;
}

double RegionMask::distance_to(const RegionMask& o) const {
  require_same_cloud(*this, o);
  double best = kInfiniteDistance;
  const auto a = indices();
  const auto b = o.indices();
  for (auto i : a)
    for (auto j : b) best = std::min(best, cloud_->distance(i, j));
  return best;
}

double RegionMask::distance_from_site(std::size_t i) const {
  double best = kInfiniteDistance;
  for (std::size_t j = 0; j < bits_.size(); ++j)
    if (bits_[j]) best = std::min(best, cloud_->distance(i, j));
  return best;
}

double RegionMask::diameter() const {
  const auto idx = indices();
  double d = 0.0;
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a + 1; b < idx.size(); ++b)
      d = std::max(d, cloud_->distance(idx[a], idx[b]));
  return d;
}

CloudPtr build_square_lattice(int nx, int ny, double spacing, std::size_t max_sites) {
  if (nx <= 0 || ny <= 0 || spacing <= 0.0)
    throw std::invalid_argument("build_square_lattice: nx, ny, spacing must be positive");
  const std::size_t n = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  if (n > max_sites)
    throw capacity_error("build_square_lattice: " + std::to_string(n) +
                         " sites exceeds maximum " + std::to_string(max_sites));
  std::vector<Vec2> sites;
  sites.reserve(n);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) sites.push_back({i * spacing, j * spacing});
  auto cloud = std::make_shared<SiteCloud>(std::move(sites), "square-lattice");
  cloud->set_lattice_shape(nx, ny, spacing);
  return cloud;
}

CloudPtr build_poisson_cloud(double density, double width, double height,
                             std::uint64_t seed, std::size_t max_sites) {
  if (density <= 0.0 || width <= 0.0 || height <= 0.0)
    throw std::invalid_argument("build_poisson_cloud: density and box must be positive");
  const double mean = density * width * height;
  if (mean < 0.5) throw std::invalid_argument("build_poisson_cloud: expected count is zero");
  if (mean > static_cast<double>(max_sites))
    throw capacity_error("build_poisson_cloud: expected count exceeds maximum");
  std::mt19937_64 rng(seed);
  std::poisson_distribution<std::size_t> count_dist(mean);
  std::size_t n = std::max<std::size_t>(1, count_dist(rng));
  n = std::min(n, max_sites);
  std::uniform_real_distribution<double> ux(0.0, width), uy(0.0, height);
  std::vector<Vec2> sites;
  sites.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double x = ux(rng);
    const double y = uy(rng);
    sites.push_back({x, y});
  }
  return std::make_shared<SiteCloud>(std::move(sites), "poisson-cloud");
}

CloudPtr mirror_x(const CloudPtr& cloud) {
  std::vector<Vec2> sites = cloud->sites();
  for (auto& s : sites) s.x = -s.x;
  auto out = std::make_shared<SiteCloud>(std::move(sites), cloud->label() + "-mirrored");
  if (cloud->is_square_lattice())
    out->set_lattice_shape(cloud->lattice_nx(), cloud->lattice_ny(), cloud->lattice_spacing());
  return out;
}

RegionMask thicken(const RegionMask& region, double r) {
  if (r < 0.0) throw std::invalid_argument("thicken: radius must be nonnegative");
  const auto& cloud = region.cloud();
  const auto members = region.indices();
  std::vector<std::uint8_t> bits(region.size(), 0);
  for (std::size_t i = 0; i < region.size(); ++i) {
    if (region.contains(i)) {
      bits[i] = 1;
      continue;
    }
    for (auto j : members) {
      if (cloud->distance(i, j) <= r) {
        bits[i] = 1;
        break;
      }
    }
  }
  return RegionMask(cloud, std::move(bits));
}

static void check_region_family(const std::vector<RegionMask>& regions,
                                const std::vector<double>& r_samples) {
  if (regions.size() < 2)
    throw std::invalid_argument("need at least two regions");
  for (std::size_t k = 1; k < regions.size(); ++k)
    require_same_cloud(regions[0], regions[k]);
  if (r_samples.empty()) throw std::invalid_argument("r_samples must be nonempty");
  if (!std::is_sorted(r_samples.begin(), r_samples.end()))
    throw std::invalid_argument("r_samples must be sorted ascending");
}

std::vector<ProfileRow> transversality_profile(const std::vector<RegionMask>& regions,
                                               const std::vector<double>& r_samples) {
  check_region_family(regions, r_samples);
  std::vector<ProfileRow> rows;
  rows.reserve(r_samples.size());
  for (double r : r_samples) {
    RegionMask inter = thicken(regions[0], r);
    for (std::size_t k = 1; k < regions.size(); ++k)
      inter = inter & thicken(regions[k], r);
    rows.push_back({r, inter.diameter()});
  }
  return rows;
}

const char* to_string(ExcisivenessReport::Verdict v) {
  switch (v) {
    case ExcisivenessReport::Verdict::polynomial_like: return "polynomial-like";
    case ExcisivenessReport::Verdict::non_polynomial_like: return "non-polynomial-like";
    default: return "inconclusive";
  }
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0 && std::isfinite(x[i]) && std::isfinite(y[i])) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  const std::size_t n = lx.size();
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / sxx;
}

ExcisivenessReport excisiveness_profile(const std::vector<RegionMask>& regions,
                                        const std::vector<double>& r_samples) {
  check_region_family(regions, r_samples);
  ExcisivenessReport rep;
  rep.r_samples = r_samples;

  RegionMask base = regions[0];
  for (std::size_t k = 1; k < regions.size(); ++k) base = base & regions[k];
  const bool base_empty = base.is_empty();

  for (double r : r_samples) {
    RegionMask inter = thicken(regions[0], r);
    for (std::size_t k = 1; k < regions.size(); ++k)
      inter = inter & thicken(regions[k], r);
    if (inter.is_empty()) {
      rep.f_hat.push_back(0.0);  // inclusion holds vacuously
      continue;
    }
    if (base_empty) {
      rep.f_hat.push_back(kInfiniteDistance);
      continue;
    }
    double s = 0.0;
    for (auto i : inter.indices()) s = std::max(s, base.distance_from_site(i));
    rep.f_hat.push_back(s);
  }

  bool any_infinite = false;
  std::vector<double> rs, fs;
  for (std::size_t i = 0; i < rep.f_hat.size(); ++i) {
    if (std::isinf(rep.f_hat[i])) any_infinite = true;
    if (rep.r_samples[i] > 0.0 && rep.f_hat[i] > 0.0 && std::isfinite(rep.f_hat[i])) {
      rs.push_back(rep.r_samples[i]);
      fs.push_back(rep.f_hat[i]);
    }
  }
  if (any_infinite) {
    rep.verdict = ExcisivenessReport::Verdict::non_polynomial_like;
    return rep;
  }
  if (rs.size() < 4) {
    rep.verdict = ExcisivenessReport::Verdict::inconclusive;
    return rep;
  }
  rep.mu_hat = loglog_slope(rs, fs);
  if (!std::isfinite(rep.mu_hat)) {
    rep.verdict = ExcisivenessReport::Verdict::inconclusive;
  } else if (rep.mu_hat <= 4.0) {
    rep.mu_hat = std::max(rep.mu_hat, 0.0);
    rep.verdict = ExcisivenessReport::Verdict::polynomial_like;
  } else {
    rep.verdict = ExcisivenessReport::Verdict::non_polynomial_like;
  }
  return rep;
}

Tiling build_tiling(const CloudPtr& cloud, double r0) {
  if (r0 <= 0.0) throw std::invalid_argument("build_tiling: r0 must be positive");
  const double side = r0 / std::sqrt(2.0);
  double minx = kInfiniteDistance, miny = kInfiniteDistance;
  for (const auto& s : cloud->sites()) {
    minx = std::min(minx, s.x);
    miny = std::min(miny, s.y);
  }
  std::map<std::pair<long, long>, int> cell_ids;
  Tiling t;
  t.cloud = cloud;
  t.r0 = r0;
  t.cell_of.assign(cloud->size(), -1);
  for (std::size_t i = 0; i < cloud->size(); ++i) {
    const auto& s = cloud->site(i);
    const long cx = static_cast<long>(std::floor((s.x - minx) / side + 1e-12));
    const long cy = static_cast<long>(std::floor((s.y - miny) / side + 1e-12));
    auto [it, inserted] = cell_ids.try_emplace({cx, cy}, static_cast<int>(t.cells.size()));
    if (inserted) t.cells.emplace_back();
    t.cell_of[i] = it->second;
    t.cells[static_cast<std::size_t>(it->second)].push_back(i);
  }
  return t;
}

std::size_t validate_tiling(const Tiling& t, double probe_radius) {
  const auto& cloud = *t.cloud;
  std::vector<std::uint8_t> seen(cloud.size(), 0);
  for (std::size_t c = 0; c < t.cells.size(); ++c) {
    if (t.cells[c].empty()) throw std::runtime_error("tiling has an empty cell");
    for (auto i : t.cells[c]) {
      if (seen[i]) throw std::runtime_error("tiling cells overlap");
      seen[i] = 1;
      if (t.cell_of[i] != static_cast<int>(c))
        throw std::runtime_error("tiling cell_of inconsistent with cells");
    }
    // property (c)
    for (std::size_t a = 0; a < t.cells[c].size(); ++a)
      for (std::size_t b = a + 1; b < t.cells[c].size(); ++b)
        if (cloud.distance(t.cells[c][a], t.cells[c][b]) > t.r0 + 1e-12)
          throw std::runtime_error("tiling cell exceeds diameter bound");
  }
  for (std::size_t i = 0; i < cloud.size(); ++i)
    if (!seen[i]) throw std::runtime_error("tiling does not cover all sites");

  // property (d): max number of cells meeting a ball of probe_radius
  std::size_t worst = 0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    std::vector<std::uint8_t> hit(t.cells.size(), 0);
    std::size_t n = 0;
    for (std::size_t j = 0; j < cloud.size(); ++j) {
      if (cloud.distance(i, j) <= probe_radius) {
        const auto c = static_cast<std::size_t>(t.cell_of[j]);
        if (!hit[c]) {
          hit[c] = 1;
          ++n;
        }
      }
    }
    worst = std::max(worst, n);
  }
  return worst;
}

GrowthProfile volume_growth_profile(const CloudPtr& cloud,
                                    const std::vector<double>& r_samples) {
  if (!std::is_sorted(r_samples.begin(), r_samples.end()))
    throw std::invalid_argument("volume_growth_profile: r_samples must be sorted");
  GrowthProfile out;
  std::vector<double> rs, vs;
  for (double r : r_samples) {
    std::size_t best = 0;
    for (std::size_t i = 0; i < cloud->size(); ++i) {
      std::size_t n = 0;
      for (std::size_t j = 0; j < cloud->size(); ++j)
        if (cloud->distance(i, j) <= r) ++n;
      best = std::max(best, n);
    }
    out.rows.push_back({r, static_cast<double>(best)});
    rs.push_back(r);
    vs.push_back(static_cast<double>(best));
  }
  out.exponent = loglog_slope(rs, vs);
  return out;
}

}  // namespace coarsehall
