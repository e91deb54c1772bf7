#include <cmath>
#include <complex>

#include "doctest.h"

#include "coarsehall/experiments.hpp"
#include "coarsehall/models.hpp"

using namespace coarsehall;

TEST_CASE("hofstadter basics") {
  auto cloud = build_square_lattice(8, 8, 1.0);

  const Hamiltonian h0 = hofstadter(cloud, 0.0, 1.0);
  CHECK(h0.matrix.imag().cwiseAbs().maxCoeff() == 0.0);
  CHECK(h0.hermiticity_defect() <= 1e-15);
  CHECK(h0.locality_defect() == 0.0);

  auto poisson = build_poisson_cloud(1.0, 5.0, 5.0, 2);
  CHECK_THROWS_AS(hofstadter(poisson, 0.25, 1.0), std::invalid_argument);
}

TEST_CASE("hofstadter plaquette phase equals the flux") {
  auto cloud = build_square_lattice(2, 2, 1.0);
  const double flux = 0.5;
  const Hamiltonian h = hofstadter(cloud, flux, 1.0);
  // directed loop 0 -> 1 -> 3 -> 2 -> 0 around the single plaquette;
  // each directed amplitude is -t e^{i theta}
  const std::complex<double> loop =
      (-h.matrix(0, 1)) * (-h.matrix(1, 3)) * (-h.matrix(3, 2)) * (-h.matrix(2, 0));
  CHECK(std::abs(loop - std::polar(1.0, 2.0 * M_PI * flux)) < 1e-12);
  CHECK(loop.real() == doctest::Approx(-1.0));
}

TEST_CASE("hofstadter flux 1/4 has four bands") {
  auto cloud = build_square_lattice(32, 32, 1.0);
  const Hamiltonian h = hofstadter(cloud, 0.25, 1.0);
  // open-boundary edge states thin the gaps; screen them with a bulk mask
  std::vector<std::size_t> interior;
  for (std::size_t i = 0; i < cloud->size(); ++i) {
    const auto& s = cloud->site(i);
    if (s.x >= 6 && s.x <= 25 && s.y >= 6 && s.y <= 25) interior.push_back(i);
  }
  const RegionMask bulk = RegionMask::of_indices(cloud, interior);
  const double frac = static_cast<double>(bulk.count()) / cloud->size();
  const SpectrumInfo info = bulk_spectrum(h, bulk, 0.4 * frac, 0.5);
  // four bands; the two central bands touch at flux 1/4 (even denominator),
  // so two wide gaps remain
  CHECK(info.gaps.size() >= 2);
  CHECK(info.gaps.front().upper < 0.0);
  CHECK(info.gaps.back().lower > 0.0);
}

TEST_CASE("amorphous model gauge phases") {
  auto cloud = build_poisson_cloud(1.0, 8.0, 8.0, 5);
  const Hamiltonian h0 = amorphous_magnetic(cloud, 1.4, 1.0, 0.0);
  CHECK(h0.matrix.imag().cwiseAbs().maxCoeff() == 0.0);

  const Hamiltonian h = amorphous_magnetic(cloud, 1.4, 1.0, 0.7);
  CHECK(h.hermiticity_defect() <= 1e-14);
  CHECK(h.locality_defect() == 0.0);
  // theta_ij + theta_ji = 0 is exactly Hermiticity of the phase factor
  for (std::size_t i = 0; i < cloud->size(); ++i)
    for (std::size_t j = 0; j < cloud->size(); ++j)
      CHECK(std::abs(h.matrix(i, j) - std::conj(h.matrix(j, i))) < 1e-15);
}

TEST_CASE("amorphous magnetic model opens a spectral gap") {
  auto cloud = build_poisson_cloud(1.0, 30.0, 30.0, 1);
  const Hamiltonian h = amorphous_magnetic(cloud, 1.4, 1.0, 2.0 * M_PI / 8.0);
  const SpectrumInfo info = spectrum(h, 0.2);
  CHECK(info.gaps.size() >= 1);
}

TEST_CASE("checkerboard model") {
  auto cloud = build_square_lattice(10, 10, 1.0);
  const Hamiltonian h = checkerboard_trivial(cloud, 1.0, 10.0);
  CHECK((h.matrix - h.matrix.conjugate()).cwiseAbs().maxCoeff() == 0.0);  // real

  // delta >> t: the Fermi projection at E=0 approaches the odd-site indicator
  const FermiProjection p = fermi_projection(h, 0.0);
  CHECK(p.rank == 50);
  for (std::size_t i = 0; i < cloud->size(); ++i) {
    const auto& s = cloud->site(i);
    const long parity = (std::lround(s.x) + std::lround(s.y)) & 1L;
    const double occupancy = p.matrix(static_cast<Eigen::Index>(i),
                                      static_cast<Eigen::Index>(i)).real();
    CHECK(std::abs(occupancy - (parity == 1 ? 1.0 : 0.0)) < 0.05);
  }
}

TEST_CASE("spectrum basics") {
  auto single = build_square_lattice(1, 1, 1.0);
  const Hamiltonian h1 = hofstadter(single, 0.25, 1.0);
  const SpectrumInfo s1 = spectrum(h1, 0.1);
  REQUIRE(s1.eigenvalues.size() == 1);
  CHECK(s1.eigenvalues[0] == doctest::Approx(0.0));

  auto cloud = build_square_lattice(6, 6, 1.0);
  Hamiltonian h = hofstadter(cloud, 0.25, 1.0);
  const SpectrumInfo a = spectrum(h, 0.1);
  Hamiltonian shifted = h;
  shifted.matrix += 0.7 * Matrix::Identity(h.matrix.rows(), h.matrix.cols());
  const SpectrumInfo b = spectrum(shifted, 0.1);
  const double scale = h.matrix.cwiseAbs().maxCoeff();
  for (std::size_t k = 0; k < a.eigenvalues.size(); ++k)
    CHECK(std::abs(b.eigenvalues[k] - a.eigenvalues[k] - 0.7) <= 1e-12 * scale);

  // chiral symmetry: bipartite lattice with no onsite term
  const SpectrumInfo c = spectrum(hofstadter(cloud, 0.0, 1.0), 0.1);
  const std::size_t n = c.eigenvalues.size();
  for (std::size_t k = 0; k < n; ++k)
    CHECK(c.eigenvalues[k] == doctest::Approx(-c.eigenvalues[n - 1 - k]).epsilon(1e-9));
}

TEST_CASE("fermi projection contracts") {
  auto cloud = build_square_lattice(8, 8, 1.0);
  const Hamiltonian h = hofstadter(cloud, 0.25, 1.0);
  const SpectrumInfo info = spectrum(h, 0.0);

  const FermiProjection none = fermi_projection(h, info.eigenvalues.front() - 1.0);
  CHECK(none.rank == 0);
  CHECK(none.matrix.cwiseAbs().maxCoeff() == 0.0);

  const FermiProjection all = fermi_projection(h, info.eigenvalues.back() + 1.0);
  CHECK(all.rank == cloud->size());
  CHECK((all.matrix - Matrix::Identity(64, 64)).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(fermi_projection(h, info.eigenvalues[3]), gap_violation_error);

  // mid-gap projection satisfies the advertised tolerances; use the
  // bulk-filtered gap since edge states fill the full-spectrum gaps
  auto big = build_square_lattice(16, 16, 1.0);
  const Hamiltonian hb = hofstadter(big, 0.25, 1.0);
  const double e = pick_fermi_energy(hb, 1, 0.1);
  const FermiProjection p = fermi_projection(hb, e);
  CHECK(p.idempotency_defect() <= 1e-10);
  CHECK(p.hermiticity_defect() <= 1e-12);
  CHECK(std::abs(p.matrix.trace().real() - static_cast<double>(p.rank)) <= 1e-8);
  const double hp = (hb.matrix * p.matrix - p.matrix * hb.matrix).cwiseAbs().maxCoeff();
  CHECK(hp <= 1e-9 * hb.matrix.cwiseAbs().maxCoeff() * hb.dim());
}

TEST_CASE("gauge covariance of the Fermi projection") {
  auto cloud = build_square_lattice(14, 14, 1.0);
  const Hamiltonian h = hofstadter(cloud, 0.25, 1.0);
  const double e = pick_fermi_energy(h, 1, 0.1);
  const FermiProjection p = fermi_projection(h, e);

  // conjugate H by a diagonal unitary of site phases
  Eigen::VectorXcd u(static_cast<Eigen::Index>(cloud->size()));
  for (Eigen::Index i = 0; i < u.size(); ++i)
    u(i) = std::polar(1.0, 0.1 * static_cast<double>(i));
  Hamiltonian hg = h;
  hg.matrix = u.asDiagonal() * h.matrix * u.asDiagonal().inverse();
  const FermiProjection pg = fermi_projection(hg, e);
  const Matrix expected = u.asDiagonal() * p.matrix * u.asDiagonal().inverse();
  CHECK((pg.matrix - expected).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("disorder and reidempotize") {
  auto cloud = build_square_lattice(6, 6, 1.0);
  const Hamiltonian h = hofstadter(cloud, 0.25, 1.0);
  const Hamiltonian hd = add_onsite_disorder(h, 0.1, 9);
  const Hamiltonian hd2 = add_onsite_disorder(h, 0.1, 9);
  CHECK((hd.matrix - hd2.matrix).cwiseAbs().maxCoeff() == 0.0);  // seeded
  CHECK((hd.matrix - h.matrix).diagonal().cwiseAbs().maxCoeff() <= 0.1);
  CHECK(hd.hermiticity_defect() <= 1e-14);

  const SpectrumInfo info = spectrum(h, 0.3);
  REQUIRE(!info.gaps.empty());
  const double e = 0.5 * (info.gaps[0].lower + info.gaps[0].upper);
  const Matrix p = fermi_projection(h, e).matrix;
  const Matrix noisy = p + 0.01 * Matrix::Identity(p.rows(), p.cols());
  const Matrix q = reidempotize(noisy);
  CHECK((q * q - q).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((q - p).cwiseAbs().maxCoeff() < 0.02);
}
