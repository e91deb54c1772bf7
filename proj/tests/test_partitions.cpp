#include <cmath>
#include <random>

#include "doctest.h"

#include "coarsehall/partitions.hpp"

using namespace coarsehall;

namespace {

const std::array<double, 3> kCuts = {M_PI / 2, 7 * M_PI / 6, 11 * M_PI / 6};

bool is_valid_partition(const std::vector<RegionMask>& parts) {
  try {
    QPartition p(parts);
    (void)p;
    return true;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

}  // namespace

TEST_CASE("partition validator") {
  auto cloud = build_square_lattice(4, 4, 1.0);
  const RegionMask a = RegionMask::of_indices(cloud, {0, 1, 2, 3});
  const RegionMask rest = a.complement();
  CHECK(is_valid_partition({a, rest}));
  CHECK_FALSE(is_valid_partition({a, a.complement(), a}));       // overlap
  CHECK_FALSE(is_valid_partition({a, RegionMask::empty(cloud)}));  // no cover
}

TEST_CASE("coordinate half-spaces") {
  auto cloud = build_square_lattice(32, 32, 1.0);
  const HalfSpacePair hs = coordinate_halfspaces(cloud, 15.5, 15.5);
  CHECK(hs.X.count() == 512);
  CHECK(hs.Y.count() == 512);
  // quadrants partition the cloud
  CHECK(is_valid_partition({hs.XY, hs.XYc, hs.XcY, hs.XcYc}));

  const HalfSpacePair all = coordinate_halfspaces(cloud, -1.0, 15.5);
  CHECK(all.X == RegionMask::full(cloud));
  CHECK(all.X.complement().is_empty());
}

TEST_CASE("sector partition") {
  auto cloud = build_square_lattice(33, 33, 1.0);
  const Vec2 center{16.137, 16.071};
  const QPartition p = sector_partition(cloud, center, kCuts);
  REQUIRE(p.part_count() == 3);
  const double n3 = static_cast<double>(cloud->size()) / 3.0;
  for (const auto& part : p.parts())
    CHECK(std::abs(static_cast<double>(part.count()) - n3) <= 0.05 * cloud->size());

  CHECK_THROWS_AS(sector_partition(cloud, center, {0.0, 1.0, 1.0 + 2 * M_PI}),
                  std::invalid_argument);
}

TEST_CASE("rotating the cuts by 120 degrees permutes sector populations") {
  auto cloud = build_square_lattice(21, 21, 1.0);  // odd side, center on a site
  const Vec2 center{10.0, 10.0};
  const QPartition p = sector_partition(cloud, center, kCuts);
  const double shift = 2.0 * M_PI / 3.0;
  const QPartition q = sector_partition(
      cloud, center, {kCuts[0] + shift, kCuts[1] + shift, kCuts[2] + shift});
  CHECK(q.part(0).count() == p.part(1).count());
  CHECK(q.part(1).count() == p.part(2).count());
  CHECK(q.part(2).count() == p.part(0).count());
}

TEST_CASE("half-spaces to partition and back") {
  auto cloud = build_square_lattice(32, 32, 1.0);
  const HalfSpacePair hs = coordinate_halfspaces(cloud, 15.5, 15.5);
  const QPartition p = halfspaces_to_partition(hs);
  CHECK(p.part(0).count() == 512);
  CHECK(p.part(1).count() == 256);
  CHECK(p.part(2).count() == 256);
  CHECK(p.part(0) == hs.X);

  // degenerate: X = M
  const HalfSpacePair all = coordinate_halfspaces(cloud, -1.0, 15.5);
  const QPartition pd = halfspaces_to_partition(all);
  CHECK(pd.part(0) == RegionMask::full(cloud));
  CHECK(pd.part(1).is_empty());
  CHECK(pd.part(2).is_empty());
}

TEST_CASE("round trip partition -> half-spaces -> partition is the identity") {
  auto cloud = build_square_lattice(24, 24, 1.0);
  const QPartition sectors = sector_partition(cloud, {11.637, 11.571}, kCuts);
  const HalfSpacePair hs = partition_to_halfspaces(sectors);
  const QPartition back = halfspaces_to_partition(hs);
  CHECK(back.part(0) == sectors.part(0));
  CHECK(back.part(1) == sectors.part(1));
  CHECK(back.part(2) == sectors.part(2));

  // also on a coordinate partition
  const QPartition quad = halfspaces_to_partition(coordinate_halfspaces(cloud, 11.5, 11.5));
  const QPartition back2 = halfspaces_to_partition(partition_to_halfspaces(quad));
  for (std::size_t k = 0; k < 3; ++k) CHECK(back2.part(k) == quad.part(k));
}

TEST_CASE("bisection sentinel when a part is empty") {
  auto cloud = build_square_lattice(6, 6, 1.0);
  const RegionMask a = RegionMask::of_indices(cloud, {0, 1, 2});
  const RegionMask c = a.complement();
  const QPartition p({a, RegionMask::empty(cloud), c});
  const HalfSpacePair hs = partition_to_halfspaces(p);
  // W = empty since every distance to B is +inf > finite distance to C
  CHECK(hs.Y.is_empty());
  CHECK(hs.X == a);
}

TEST_CASE("bisection picks the half of A nearer to B") {
  auto cloud = build_square_lattice(16, 16, 1.0);
  const QPartition p = sector_partition(cloud, {7.637, 7.571}, kCuts);
  const HalfSpacePair hs = partition_to_halfspaces(p);
  const auto& A = p.part(0);
  const auto& B = p.part(1);
  const auto& C = p.part(2);
  for (std::size_t i = 0; i < cloud->size(); ++i) {
    if (!A.contains(i)) continue;
    const bool in_w = hs.Y.contains(i) && !B.contains(i);
    CHECK(in_w == (B.distance_from_site(i) <= C.distance_from_site(i)));
  }
}

TEST_CASE("elementary cobordism moves") {
  auto cloud = build_square_lattice(8, 8, 1.0);
  const HalfSpacePair hs = coordinate_halfspaces(cloud, 3.5, 3.5);
  const QPartition p = halfspaces_to_partition(hs);

  // W = empty: partition unchanged
  const auto unchanged = elementary_cobordism(p, 0, 1, RegionMask::empty(cloud));
  for (std::size_t k = 0; k < 3; ++k) CHECK(unchanged.result.part(k) == p.part(k));

  // W = all of part 0: part 0 becomes empty
  const auto drained = elementary_cobordism(p, 0, 1, p.part(0));
  CHECK(drained.result.part(0).is_empty());
  CHECK(drained.result.part(1) == (p.part(0) | p.part(1)));

  // move X∩Y from part 0 to part 1: (X, Xc∩Y, Xc∩Yc) -> (X∩Yc, Y, Xc∩Yc)
  const auto moved = elementary_cobordism(p, 0, 1, hs.XY);
  CHECK(moved.result.part(0) == hs.XYc);
  CHECK(moved.result.part(1) == hs.Y);
  CHECK(moved.result.part(2) == hs.XcYc);
  CHECK_FALSE(moved.transversality_witness.empty());

  CHECK_THROWS_AS(elementary_cobordism(p, 0, 1, hs.XcY), std::invalid_argument);
  CHECK_THROWS_AS(elementary_cobordism(p, 1, 1, RegionMask::empty(cloud)),
                  std::invalid_argument);
}

TEST_CASE("bulk window") {
  auto cloud = build_square_lattice(24, 24, 1.0);
  const Vec2 center{11.637, 11.571};
  const QPartition p = sector_partition(cloud, center, kCuts);

  const RegionMask k4 = bulk_window(p, 4.0);
  const RegionMask k6 = bulk_window(p, 6.0);
  CHECK_FALSE(k4.is_empty());
  CHECK(k4.subset_of(k6));  // monotone in r

  // contained in the ball of radius r*sqrt(2) about the triple point
  for (auto i : k4.indices())
    CHECK(dist(cloud->site(i), center) <= 4.0 * std::sqrt(2.0) + 1e-9);

  // separated parts: small r gives an empty window
  auto line = build_square_lattice(30, 1, 1.0);
  const RegionMask a = RegionMask::of_indices(line, {0, 1, 2});
  const RegionMask b = RegionMask::of_indices(line, {14, 15});
  const RegionMask c = a.complement().setminus(b);
  // a and b are ~12 apart; r=2 cannot bridge the gap
  const QPartition sep({a, b, c});
  CHECK(bulk_window(sep, 2.0).is_empty());
}
