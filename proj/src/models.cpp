#include "coarsehall/models.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace coarsehall {

double Hamiltonian::hermiticity_defect() const {
  const double scale = matrix.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff() / scale;
}

double Hamiltonian::locality_defect() const {
  double worst = 0.0;
  const std::size_t n = dim();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && cloud->distance(i, j) > hop_range)
        worst = std::max(worst, std::abs(matrix(i, j)));
  return worst;
}

double FermiProjection::idempotency_defect() const {
  return (matrix * matrix - matrix).cwiseAbs().maxCoeff();
}

double FermiProjection::hermiticity_defect() const {
  return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
}

Hamiltonian hofstadter(const CloudPtr& cloud, double flux, double t) {
  if (!cloud->is_square_lattice())
    throw std::invalid_argument("hofstadter: cloud must be a square lattice");
  const double a = cloud->lattice_spacing();
  const double B = 2.0 * M_PI * flux / (a * a);
  const std::size_t n = cloud->size();
  Matrix H = Matrix::Zero(n, n);
  const double cutoff = a * 1.001;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (cloud->distance(i, j) > cutoff) continue;
      const auto& si = cloud->site(i);
      const auto& sj = cloud->site(j);
      // Landau gauge A = (0, Bx): line integral along the bond
      const double theta = B * 0.5 * (si.x + sj.x) * (sj.y - si.y);
      H(i, j) = -t * std::exp(Complex(0.0, theta));
      H(j, i) = std::conj(H(i, j));
    }
  }
  Hamiltonian h{std::move(H), cloud, {{"flux", flux}, {"t", t}}, cutoff};
  return h;
}

Hamiltonian amorphous_magnetic(const CloudPtr& cloud, double hop_range, double t,
                               double field) {
  if (hop_range <= 0.0)
    throw std::invalid_argument("amorphous_magnetic: hop_range must be positive");
  const std::size_t n = cloud->size();
  Matrix H = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (cloud->distance(i, j) > hop_range) continue;
      const auto& si = cloud->site(i);
      const auto& sj = cloud->site(j);
      const double theta = 0.5 * field * (si.x * sj.y - sj.x * si.y);
      H(i, j) = -t * std::exp(Complex(0.0, theta));
      H(j, i) = std::conj(H(i, j));
    }
  }
  Hamiltonian h{std::move(H), cloud, {{"t", t}, {"B", field}, {"hop_range", hop_range}},
                hop_range};
  return h;
}

Hamiltonian checkerboard_trivial(const CloudPtr& cloud, double t, double delta) {
  if (!cloud->is_square_lattice())
    throw std::invalid_argument("checkerboard_trivial: cloud must be a square lattice");
  if (delta <= 0.0) throw std::invalid_argument("checkerboard_trivial: delta must be positive");
  const double a = cloud->lattice_spacing();
  const std::size_t n = cloud->size();
  Matrix H = Matrix::Zero(n, n);
  const double cutoff = a * 1.001;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = cloud->site(i);
    const long parity =
        (std::lround(s.x / a) + std::lround(s.y / a)) & 1L;
    H(i, i) = parity == 0 ? delta : -delta;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (cloud->distance(i, j) > cutoff) continue;
      H(i, j) = -t;
      H(j, i) = -t;
    }
  }
  Hamiltonian h{std::move(H), cloud, {{"t", t}, {"delta", delta}}, cutoff};
  return h;
}

Hamiltonian add_onsite_disorder(const Hamiltonian& h, double w, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-w, w);
  Hamiltonian out = h;
  for (std::size_t i = 0; i < h.dim(); ++i) out.matrix(i, i) += u(rng);
  out.params["disorder_w"] = w;
  return out;
}

static std::vector<SpectrumInfo::Gap> find_gaps(const std::vector<double>& evals,
                                                double threshold) {
  std::vector<SpectrumInfo::Gap> gaps;
  for (std::size_t i = 0; i + 1 < evals.size(); ++i)
    if (evals[i + 1] - evals[i] > threshold) gaps.push_back({evals[i], evals[i + 1]});
  return gaps;
}

SpectrumInfo spectrum(const Hamiltonian& h, double gap_width_threshold) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("spectrum: eigensolver failed to converge");
  SpectrumInfo info;
  info.eigenvalues.assign(es.eigenvalues().data(),
                          es.eigenvalues().data() + es.eigenvalues().size());
  info.gaps = find_gaps(info.eigenvalues, gap_width_threshold);
  return info;
}

SpectrumInfo bulk_spectrum(const Hamiltonian& h, const RegionMask& bulk,
                           double min_weight, double gap_width_threshold) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("bulk_spectrum: eigensolver failed to converge");
  SpectrumInfo info;
  const auto idx = bulk.indices();
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    double weight = 0.0;
    for (auto i : idx) weight += std::norm(es.eigenvectors()(static_cast<Eigen::Index>(i), k));
    if (weight >= min_weight) info.eigenvalues.push_back(es.eigenvalues()(k));
  }
  info.gaps = find_gaps(info.eigenvalues, gap_width_threshold);
  return info;
}

FermiProjection fermi_projection(const Hamiltonian& h, double fermi_energy) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("fermi_projection: eigensolver failed to converge");
  const auto& evals = es.eigenvalues();
  const std::size_t n = h.dim();
  const double radius = std::max(std::abs(evals(0)), std::abs(evals(evals.size() - 1)));
  const double margin = 1e-6 * std::max(radius, 1.0);

  double below = -kInfiniteDistance, above = kInfiniteDistance;
  std::size_t rank = 0;
  for (Eigen::Index k = 0; k < evals.size(); ++k) {
    if (evals(k) < fermi_energy) {
      below = std::max(below, evals(k));
      ++rank;
    } else {
      above = std::min(above, evals(k));
    }
  }
  if (fermi_energy - below < margin || above - fermi_energy < margin) {
    throw gap_violation_error(
        "fermi_projection: Fermi energy " + std::to_string(fermi_energy) +
        " is not inside a spectral gap (nearest levels " + std::to_string(below) + ", " +
        std::to_string(above) + ")");
  }

  FermiProjection p;
  p.cloud = h.cloud;
  p.fermi_energy = fermi_energy;
  p.gap_lower = below;
  p.gap_upper = above;
  p.rank = rank;
  if (rank == 0) {
    p.matrix = Matrix::Zero(n, n);
  } else {
    const Matrix occ = es.eigenvectors().leftCols(static_cast<Eigen::Index>(rank));
    p.matrix = occ * occ.adjoint();
  }
  return p;
}

Matrix reidempotize(const Matrix& q) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(q);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("reidempotize: eigensolver failed to converge");
  const auto n = q.rows();
  Matrix p = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k)
    if (es.eigenvalues()(k) > 0.5)
      p += es.eigenvectors().col(k) * es.eigenvectors().col(k).adjoint();
  return p;
}

}  // namespace coarsehall
