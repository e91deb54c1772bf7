#include "coarsehall/operators.hpp"

#include <algorithm>
#include <cmath>

namespace coarsehall {

SiteOperator SiteOperator::identity(CloudPtr cloud) {
  const auto n = static_cast<Eigen::Index>(cloud->size());
  return {Matrix::Identity(n, n), std::move(cloud)};
}

SiteOperator SiteOperator::zero(CloudPtr cloud) {
  const auto n = static_cast<Eigen::Index>(cloud->size());
  return {Matrix::Zero(n, n), std::move(cloud)};
}

SiteOperator SiteOperator::from_projection(const FermiProjection& p) {
  return {p.matrix, p.cloud};
}

Matrix mask_left(const RegionMask& z, const Matrix& m) {
  Matrix out = m;
  for (std::size_t i = 0; i < z.size(); ++i)
    if (!z.contains(i)) out.row(static_cast<Eigen::Index>(i)).setZero();
  return out;
}

Matrix mask_right(const Matrix& m, const RegionMask& z) {
  Matrix out = m;
  for (std::size_t i = 0; i < z.size(); ++i)
    if (!z.contains(i)) out.col(static_cast<Eigen::Index>(i)).setZero();
  return out;
}

static Matrix submatrix(const Matrix& m, const std::vector<std::size_t>& rows,
                        const std::vector<std::size_t>& cols) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t b = 0; b < cols.size(); ++b)
      out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
          m(static_cast<Eigen::Index>(rows[a]), static_cast<Eigen::Index>(cols[b]));
  return out;
}

SiteOperator compress(const SiteOperator& p, const RegionMask& z) {
  if (p.cloud != z.cloud())
    throw std::invalid_argument("compress: operator and mask clouds differ");
  return {p.matrix * mask_left(z, p.matrix), p.cloud};
}

SiteOperator generalized_commutator(const RegionMask& a, const RegionMask& b,
                                    const RegionMask& c, const SiteOperator& p) {
  require_same_cloud(a, b);
  require_same_cloud(a, c);
  if (p.cloud != a.cloud())
    throw std::invalid_argument("generalized_commutator: clouds differ");
  const Matrix ap = mask_left(a, p.matrix);
  const Matrix bp = mask_left(b, p.matrix);
  const Matrix cp = mask_left(c, p.matrix);
  Matrix out = ap * bp * cp + bp * cp * ap + cp * ap * bp;
  out -= cp * bp * ap + bp * ap * cp + ap * cp * bp;
  return {std::move(out), p.cloud};
}

Complex generalized_commutator_trace(const RegionMask& a, const RegionMask& b,
                                     const RegionMask& c, const SiteOperator& p) {
  const auto ia = a.indices();
  const auto ib = b.indices();
  const auto ic = c.indices();
  if (ia.empty() || ib.empty() || ic.empty()) return Complex(0.0, 0.0);
  const Matrix pab = submatrix(p.matrix, ia, ib);
  const Matrix pbc = submatrix(p.matrix, ib, ic);
  const Matrix pca = submatrix(p.matrix, ic, ia);
  const Matrix pac = submatrix(p.matrix, ia, ic);
  const Matrix pcb = submatrix(p.matrix, ic, ib);
  const Matrix pba = submatrix(p.matrix, ib, ia);
  const Complex fwd = ((pab * pbc).array() * pca.transpose().array()).sum();
  const Complex bwd = ((pac * pcb).array() * pba.transpose().array()).sum();
  return 3.0 * (fwd - bwd);
}

double block_trace_norm(const SiteOperator& l, const RegionMask& v, const RegionMask& w) {
  const auto rows = v.indices();
  const auto cols = w.indices();
  if (rows.empty() || cols.empty()) return 0.0;
  const Matrix block = submatrix(l.matrix, rows, cols);
  return block.jacobiSvd().singularValues().sum();
}

static double block_norm(const Matrix& m, const std::vector<std::size_t>& rows,
                         const std::vector<std::size_t>& cols) {
  const Matrix block = submatrix(m, rows, cols);
  return block.jacobiSvd().singularValues().sum();
}

TileBlockData tile_block_data(const SiteOperator& l, const Tiling& t) {
  if (l.cloud != t.cloud)
    throw std::invalid_argument("tile_block_data: operator and tiling clouds differ");
  const std::size_t nc = t.cell_count();
  TileBlockData data{nc, std::vector<double>(nc * nc, 0.0), std::vector<double>(nc * nc, 0.0)};
  for (std::size_t v = 0; v < nc; ++v) {
    for (std::size_t w = 0; w < nc; ++w) {
      data.norms[v * nc + w] = block_norm(l.matrix, t.cells[v], t.cells[w]);
      double d = kInfiniteDistance;
      for (auto i : t.cells[v])
        for (auto j : t.cells[w]) d = std::min(d, t.cloud->distance(i, j));
      data.dist[v * nc + w] = d;
    }
  }
  return data;
}

static std::vector<double> tile_distances_to(const Tiling& t, const RegionMask& z) {
  std::vector<double> out(t.cell_count(), kInfiniteDistance);
  for (std::size_t c = 0; c < t.cell_count(); ++c)
    for (auto i : t.cells[c]) out[c] = std::min(out[c], z.distance_from_site(i));
  return out;
}

double seminorm(const TileBlockData& data, const Tiling& t, double nu, SeminormKind kind,
                const std::optional<RegionMask>& z) {
  if (nu < 0.0) throw std::invalid_argument("seminorm: nu must be nonnegative");
  const std::size_t nc = data.cells;
  std::vector<double> dz;
  if (z) dz = tile_distances_to(t, *z);

  auto weight = [&](std::size_t v, std::size_t w) {
    if (z) return std::pow(1.0 + dz[v], nu) * std::pow(1.0 + dz[w], nu);
    return std::pow(1.0 + data.dist[v * nc + w], nu);
  };

  double result = 0.0;
  if (kind == SeminormKind::bracket) {
    for (std::size_t v = 0; v < nc; ++v)
      for (std::size_t w = 0; w < nc; ++w) {
        const double n = data.norms[v * nc + w];
        if (n > 0.0) result = std::max(result, n * weight(v, w));
      }
  } else {
    for (std::size_t v = 0; v < nc; ++v) {
      double row = 0.0;
      for (std::size_t w = 0; w < nc; ++w) {
        const double n = data.norms[v * nc + w];
        if (n > 0.0) row += n * weight(v, w);
      }
      result = std::max(result, row);
    }
  }
  return result;
}

double seminorm(const SiteOperator& l, double nu, const Tiling& t, SeminormKind kind,
                const std::optional<RegionMask>& z) {
  return seminorm(tile_block_data(l, t), t, nu, kind, z);
}

SeminormReport seminorm_report(const SiteOperator& l, const Tiling& t,
                               const std::vector<double>& nu_grid,
                               const std::optional<RegionMask>& z) {
  const TileBlockData data = tile_block_data(l, t);
  SeminormReport rep;
  for (double nu : nu_grid) {
    rep.entries.push_back(
        {SeminormKind::bracket, nu, z.has_value(), seminorm(data, t, nu, SeminormKind::bracket, z)});
    rep.entries.push_back(
        {SeminormKind::sum, nu, z.has_value(), seminorm(data, t, nu, SeminormKind::sum, z)});
  }
  return rep;
}

double propagation_radius(const SiteOperator& l, double threshold) {
  if (threshold <= 0.0) throw std::invalid_argument("propagation_radius: threshold > 0");
  double r = 0.0;
  const std::size_t n = l.dim();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (std::abs(l.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) >
          threshold)
        r = std::max(r, l.cloud->distance(i, j));
  return r;
}

std::vector<DecayBin> decay_profile(const SiteOperator& l, const Tiling& t,
                                    const std::vector<double>& bin_edges) {
  if (bin_edges.size() < 2 || !std::is_sorted(bin_edges.begin(), bin_edges.end()))
    throw std::invalid_argument("decay_profile: need ascending bin edges");
  const TileBlockData data = tile_block_data(l, t);
  std::vector<DecayBin> bins;
  for (std::size_t b = 0; b + 1 < bin_edges.size(); ++b)
    bins.push_back({bin_edges[b], bin_edges[b + 1], 0.0});
  const std::size_t nc = data.cells;
  for (std::size_t v = 0; v < nc; ++v)
    for (std::size_t w = 0; w < nc; ++w) {
      const double d = data.dist[v * nc + w];
      for (auto& bin : bins)
        if (d >= bin.lower && d < bin.upper)
          bin.max_block_norm = std::max(bin.max_block_norm, data.norms[v * nc + w]);
    }
  return bins;
}

double decay_slope(const std::vector<DecayBin>& profile) {
  std::vector<double> x, logy;
  for (const auto& b : profile) {
    if (b.max_block_norm > 0.0) {
      x.push_back(0.5 * (b.lower + b.upper));
      logy.push_back(std::log(b.max_block_norm));
    }
  }
  const std::size_t n = x.size();
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += logy[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (logy[i] - my);
  }
  return sxy / sxx;
}

}  // namespace coarsehall
