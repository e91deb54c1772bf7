#pragma once

#include <optional>

#include "coarsehall/geometry.hpp"
#include "coarsehall/models.hpp"

namespace coarsehall {

/// Dense operator over the sites of a cloud. Indicator masks act on it by
/// zeroing rows/columns.
struct SiteOperator {
  Matrix matrix;
  CloudPtr cloud;

  std::size_t dim() const { return static_cast<std::size_t>(matrix.rows()); }
  double idempotency_defect() const { return (matrix * matrix - matrix).cwiseAbs().maxCoeff(); }

  static SiteOperator identity(CloudPtr cloud);
  static SiteOperator zero(CloudPtr cloud);
  static SiteOperator from_projection(const FermiProjection& p);
};

/// chi_Z · L (rows outside Z zeroed)
Matrix mask_left(const RegionMask& z, const Matrix& m);
/// L · chi_Z (columns outside Z zeroed)
Matrix mask_right(const Matrix& m, const RegionMask& z);

/// P_Z = P · chi_Z · P
SiteOperator compress(const SiteOperator& p, const RegionMask& z);

/// [A,B,C]_P = APBPCP + BPCPAP + CPAPBP − CPBPAP − BPAPCP − APCPBP
SiteOperator generalized_commutator(const RegionMask& a, const RegionMask& b,
                                    const RegionMask& c, const SiteOperator& p);

/// Trace of [A,B,C]_P without forming the six-term operator: by cyclicity
/// it equals 3·(Tr(APBPCP) − Tr(APCPBP)), evaluated on submatrix products.
Complex generalized_commutator_trace(const RegionMask& a, const RegionMask& b,
                                     const RegionMask& c, const SiteOperator& p);

/// Sum of singular values of the submatrix with rows in V, columns in W.
double block_trace_norm(const SiteOperator& l, const RegionMask& v, const RegionMask& w);

enum class SeminormKind { bracket, sum };

struct SeminormEntry {
  SeminormKind kind;
  double nu;
  bool localized;  // whether a Z mask was given
  double value;
};

struct SeminormReport {
  std::vector<SeminormEntry> entries;
};

/// Precomputed per-tile-pair block trace norms and distances; the
/// expensive part shared by seminorm/decay computations.
struct TileBlockData {
  std::size_t cells;
  std::vector<double> norms;  // cells×cells, row-major: ‖V L W‖_Tr
  std::vector<double> dist;   // min site-pair distance between tiles
};

TileBlockData tile_block_data(const SiteOperator& l, const Tiling& t);

double seminorm(const SiteOperator& l, double nu, const Tiling& t, SeminormKind kind,
                const std::optional<RegionMask>& z = std::nullopt);
double seminorm(const TileBlockData& data, const Tiling& t, double nu, SeminormKind kind,
                const std::optional<RegionMask>& z = std::nullopt);

SeminormReport seminorm_report(const SiteOperator& l, const Tiling& t,
                               const std::vector<double>& nu_grid,
                               const std::optional<RegionMask>& z = std::nullopt);

/// Smallest r with |L[i,j]| <= threshold whenever d(i,j) > r.
double propagation_radius(const SiteOperator& l, double threshold);

struct DecayBin {
  double lower = 0.0;
  double upper = 0.0;
  double max_block_norm = 0.0;
};

/// Per distance bin, the max block trace norm over tile pairs with
/// inter-tile distance in the bin.
std::vector<DecayBin> decay_profile(const SiteOperator& l, const Tiling& t,
                                    const std::vector<double>& bin_edges);

/// Least-squares slope of log(max block norm) vs bin midpoint over
/// nonempty bins with positive norm.
double decay_slope(const std::vector<DecayBin>& profile);

}  // namespace coarsehall
