#pragma once

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <optional>
#include <string>

#include "coarsehall/geometry.hpp"

namespace coarsehall {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

class gap_violation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Hermitian tight-binding Hamiltonian over the sites of a cloud.
struct Hamiltonian {
  Matrix matrix;
  CloudPtr cloud;
  std::map<std::string, double> params;
  double hop_range = 0.0;  // locality bound: H[i,j] = 0 beyond this distance

  std::size_t dim() const { return static_cast<std::size_t>(matrix.rows()); }
  /// max |H - H†| entry, relative to max |H| entry
  double hermiticity_defect() const;
  /// max |H[i,j]| over pairs with d(i,j) > hop_range
  double locality_defect() const;
};

struct SpectrumInfo {
  std::vector<double> eigenvalues;  // ascending
  struct Gap {
    double lower = 0.0;
    double upper = 0.0;
    double width() const { return upper - lower; }
  };
  std::vector<Gap> gaps;  // maximal gaps above the width threshold, ascending
};

struct FermiProjection {
  Matrix matrix;
  CloudPtr cloud;
  double fermi_energy = 0.0;
  double gap_lower = 0.0;
  double gap_upper = 0.0;
  std::size_t rank = 0;

  double idempotency_defect() const;  // max |P² − P| entry
  double hermiticity_defect() const;  // max |P − P†| entry
};

/// Nearest-neighbor square-lattice model with Landau-gauge Peierls phases:
/// a bond from site i to j carries phase exp(i·B·(x_i+x_j)/2·(y_j−y_i))
/// with B = 2π·flux/spacing². On the standard lattice this puts
/// exp(2πi·flux·x) on the vertical bond (x,y)→(x,y+1) and leaves
/// horizontal bonds real; open boundary.
Hamiltonian hofstadter(const CloudPtr& cloud, double flux, double t);

/// Symmetric-gauge model on an arbitrary cloud:
/// H[i,j] = −t·exp(iθ_ij) for d(i,j) ≤ hop_range, θ_ij = (B/2)(x_i·y_j − x_j·y_i).
Hamiltonian amorphous_magnetic(const CloudPtr& cloud, double hop_range, double t, double field);

/// Real gapped model: nearest-neighbor hopping −t plus staggered onsite
/// ±delta on the (x+y) parity.
Hamiltonian checkerboard_trivial(const CloudPtr& cloud, double t, double delta);

/// Seeded uniform onsite disorder in [−w, w] added to the diagonal.
Hamiltonian add_onsite_disorder(const Hamiltonian& h, double w, std::uint64_t seed);

SpectrumInfo spectrum(const Hamiltonian& h, double gap_width_threshold);

/// Gap finder restricted to eigenstates with weight >= min_weight on the
/// bulk mask; screens out open-boundary edge states.
SpectrumInfo bulk_spectrum(const Hamiltonian& h, const RegionMask& bulk,
                           double min_weight, double gap_width_threshold);

FermiProjection fermi_projection(const Hamiltonian& h, double fermi_energy);

/// Spectral re-idempotization: projector onto eigenvalues > 1/2 of a
/// Hermitian near-projection.
Matrix reidempotize(const Matrix& q);

}  // namespace coarsehall
