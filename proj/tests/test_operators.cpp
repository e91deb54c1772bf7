#include <cmath>
#include <random>

#include "doctest.h"

#include "coarsehall/experiments.hpp"
#include "coarsehall/operators.hpp"

using namespace coarsehall;

namespace {

Matrix random_matrix(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

/// Banded random operator: entries only within `range` of the diagonal
/// site distance, so it has finite propagation by construction.
SiteOperator random_local_operator(const CloudPtr& cloud, double range, std::uint64_t seed) {
  Matrix m = random_matrix(cloud->size(), seed);
  for (std::size_t i = 0; i < cloud->size(); ++i)
    for (std::size_t j = 0; j < cloud->size(); ++j)
      if (cloud->distance(i, j) > range)
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 0.0;
  return {std::move(m), cloud};
}

}  // namespace

TEST_CASE("compress") {
  auto cloud = build_square_lattice(4, 4, 1.0);
  const SiteOperator p = random_idempotent(cloud, 1);
  const RegionMask z = RegionMask::of_indices(cloud, {1, 2, 7});

  CHECK((compress(p, RegionMask::full(cloud)).matrix - p.matrix).cwiseAbs().maxCoeff() <
        1e-10);
  CHECK(compress(p, RegionMask::empty(cloud)).matrix.cwiseAbs().maxCoeff() == 0.0);

  const SiteOperator id = SiteOperator::identity(cloud);
  const Matrix diag = compress(id, z).matrix;
  for (Eigen::Index i = 0; i < diag.rows(); ++i)
    for (Eigen::Index j = 0; j < diag.cols(); ++j) {
      const double expected = (i == j && z.contains(static_cast<std::size_t>(i))) ? 1.0 : 0.0;
      CHECK(std::abs(diag(i, j) - expected) < 1e-15);
    }
}

TEST_CASE("generalized commutator identities") {
  auto cloud = build_square_lattice(3, 3, 1.0);
  const SiteOperator p = random_idempotent(cloud, 3);
  const RegionMask a = RegionMask::of_indices(cloud, {0, 1, 2});
  const RegionMask b = RegionMask::of_indices(cloud, {3, 4});
  const RegionMask c = RegionMask::of_indices(cloud, {5, 6, 7, 8});
  const RegionMask m = RegionMask::full(cloud);

  const Matrix abc = generalized_commutator(a, b, c, p).matrix;

  // antisymmetry: negation under transpositions (same six products, so any
  // difference is summation-order rounding)
  const double scale = 1.0 + abc.cwiseAbs().maxCoeff();
  CHECK((abc + generalized_commutator(b, a, c, p).matrix).cwiseAbs().maxCoeff() <
        1e-11 * scale);
  CHECK((abc + generalized_commutator(a, c, b, p).matrix).cwiseAbs().maxCoeff() <
        1e-11 * scale);
  CHECK((abc + generalized_commutator(c, b, a, p).matrix).cwiseAbs().maxCoeff() <
        1e-11 * scale);

  // repeated entry vanishes
  CHECK(generalized_commutator(a, b, a, p).matrix.cwiseAbs().maxCoeff() == 0.0);

  // additivity over a disjoint split of the first slot
  const RegionMask a1 = RegionMask::of_indices(cloud, {0});
  const RegionMask a2 = RegionMask::of_indices(cloud, {1, 2});
  const Matrix sum = generalized_commutator(a1, b, c, p).matrix +
                     generalized_commutator(a2, b, c, p).matrix;
  CHECK((abc - sum).cwiseAbs().maxCoeff() < 1e-12);

  // one entry is the whole sample: [A,B,M]_P = [P_A, P_B]
  const Matrix pa = compress(p, a).matrix;
  const Matrix pb = compress(p, b).matrix;
  const double pnorm = p.matrix.cwiseAbs().maxCoeff();
  CHECK((generalized_commutator(a, b, m, p).matrix - (pa * pb - pb * pa))
            .cwiseAbs()
            .maxCoeff() < 1e-12 * pnorm * pnorm * pnorm * 100);

  // trace shortcut matches the trace of the six-term operator
  const Complex direct = abc.trace();
  const Complex fast = generalized_commutator_trace(a, b, c, p);
  CHECK(std::abs(direct - fast) < 1e-10);
}

TEST_CASE("block trace norm") {
  auto cloud = build_square_lattice(6, 1, 1.0);
  const SiteOperator id = SiteOperator::identity(cloud);
  const RegionMask one = RegionMask::of_indices(cloud, {2});
  CHECK(block_trace_norm(id, one, one) == doctest::Approx(1.0));
  CHECK(block_trace_norm(id, one, RegionMask::of_indices(cloud, {3})) ==
        doctest::Approx(0.0));
  CHECK(block_trace_norm(id, RegionMask::empty(cloud), one) == 0.0);

  const SiteOperator l{random_matrix(6, 4), cloud};
  const RegionMask full = RegionMask::full(cloud);
  const double direct = l.matrix.jacobiSvd().singularValues().sum();
  CHECK(block_trace_norm(l, full, full) == doctest::Approx(direct));

  // adjoint symmetry
  const RegionMask v = RegionMask::of_indices(cloud, {0, 1});
  const RegionMask w = RegionMask::of_indices(cloud, {4, 5});
  const SiteOperator ladj{l.matrix.adjoint(), cloud};
  CHECK(block_trace_norm(l, v, w) == doctest::Approx(block_trace_norm(ladj, w, v)));
}

TEST_CASE("seminorms on simple operators") {
  auto cloud = build_square_lattice(8, 8, 1.0);
  const Tiling t = build_tiling(cloud, 1.0);  // one site per tile

  const SiteOperator id = SiteOperator::identity(cloud);
  for (double nu : {0.0, 1.0, 4.0}) {
    CHECK(seminorm(id, nu, t, SeminormKind::bracket) == doctest::Approx(1.0));
    CHECK(seminorm(id, nu, t, SeminormKind::sum) == doctest::Approx(1.0));
  }

  const SiteOperator zero = SiteOperator::zero(cloud);
  CHECK(seminorm(zero, 2.0, t, SeminormKind::bracket) == 0.0);
  CHECK(seminorm(zero, 2.0, t, SeminormKind::sum) == 0.0);

  // bracket <= sum, and both grow with nu for off-diagonal mass
  const SiteOperator l = random_local_operator(cloud, 2.0, 7);
  const double b1 = seminorm(l, 1.0, t, SeminormKind::bracket);
  const double s1 = seminorm(l, 1.0, t, SeminormKind::sum);
  const double b2 = seminorm(l, 2.0, t, SeminormKind::bracket);
  CHECK(b1 <= s1 + 1e-12);
  CHECK(b1 <= b2 + 1e-12);

  // localized seminorm with Z = whole cloud has weight 1 everywhere
  const RegionMask full = RegionMask::full(cloud);
  CHECK(seminorm(l, 3.0, t, SeminormKind::bracket, full) ==
        doctest::Approx(seminorm(l, 0.0, t, SeminormKind::bracket)));
}

TEST_CASE("submultiplicativity and ideal estimate") {
  auto cloud = build_square_lattice(8, 8, 1.0);
  const Tiling t = build_tiling(cloud, 2.0);
  const double r0 = t.r0;
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 10; ++trial) {
    const SiteOperator l = random_local_operator(cloud, 2.0, rng());
    const SiteOperator lp = random_local_operator(cloud, 2.0, rng());
    const SiteOperator prod{l.matrix * lp.matrix, cloud};
    const RegionMask z = random_mask(cloud, rng(), 0.2);
    for (double nu : {0.0, 1.0, 2.0}) {
      const double c = std::pow(1.0 + r0, nu);
      CHECK(seminorm(prod, nu, t, SeminormKind::sum) <=
            c * seminorm(l, nu, t, SeminormKind::sum) *
                    seminorm(lp, nu, t, SeminormKind::sum) +
                1e-9);
      if (!z.is_empty()) {
        CHECK(seminorm(prod, nu, t, SeminormKind::sum, z) <=
              c * seminorm(l, nu, t, SeminormKind::sum) *
                      seminorm(lp, nu, t, SeminormKind::sum, z) +
                  1e-9);
      }
    }
  }
}

TEST_CASE("propagation radius") {
  auto cloud = build_square_lattice(6, 6, 1.0);
  const SiteOperator diag{Matrix::Identity(36, 36) * Complex(2.0, 0.0), cloud};
  CHECK(propagation_radius(diag, 0.5) == 0.0);

  const Hamiltonian h = hofstadter(cloud, 0.25, 1.0);
  const SiteOperator hop{h.matrix, cloud};
  CHECK(propagation_radius(hop, 0.5) == doctest::Approx(1.0));
}

TEST_CASE("decay profile") {
  auto cloud = build_square_lattice(6, 6, 1.0);
  const Tiling t = build_tiling(cloud, 1.0);
  const SiteOperator id = SiteOperator::identity(cloud);
  const auto bins = decay_profile(id, t, {0.0, 0.5, 2.0, 4.0});
  CHECK(bins[0].max_block_norm == doctest::Approx(1.0));
  CHECK(bins[1].max_block_norm == 0.0);
  CHECK(bins[2].max_block_norm == 0.0);

  // adjoint has the same profile
  const SiteOperator l = random_local_operator(cloud, 2.0, 99);
  const SiteOperator ladj{l.matrix.adjoint(), cloud};
  const auto pa = decay_profile(l, t, {0.0, 1.1, 2.2, 3.3});
  const auto pb = decay_profile(ladj, t, {0.0, 1.1, 2.2, 3.3});
  for (std::size_t i = 0; i < pa.size(); ++i)
    CHECK(pa[i].max_block_norm == doctest::Approx(pb[i].max_block_norm));
}
