#include <cmath>

#include "doctest.h"

#include "coarsehall/experiments.hpp"
#include "coarsehall/io.hpp"

using namespace coarsehall;

TEST_CASE("hashing is stable and content-sensitive") {
  CHECK(fnv1a_hash("") == 14695981039346656037ULL);
  CHECK(fnv1a_hash("a") != fnv1a_hash("b"));
  CHECK(hash_hex(0) == "0000000000000000");
  CHECK(hash_hex(255) == "00000000000000ff");

  auto a = build_square_lattice(4, 4, 1.0);
  auto b = build_square_lattice(4, 4, 1.0);
  auto c = build_square_lattice(4, 5, 1.0);
  CHECK(cloud_hash(*a) == cloud_hash(*b));
  CHECK(cloud_hash(*a) != cloud_hash(*c));
}

TEST_CASE("number formatting") {
  CHECK(format_number(1.5) == "1.5");
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("cloud json round trip") {
  auto cloud = build_square_lattice(3, 2, 0.5);
  const std::string j = cloud_to_json(*cloud);
  auto back = cloud_from_json(j);
  REQUIRE(back->size() == cloud->size());
  for (std::size_t i = 0; i < cloud->size(); ++i) {
    CHECK(back->site(i).x == cloud->site(i).x);
    CHECK(back->site(i).y == cloud->site(i).y);
  }
  CHECK(back->is_square_lattice());
  CHECK(back->lattice_nx() == 3);
  CHECK(back->lattice_spacing() == 0.5);
  CHECK(cloud_hash(*back) != 0);

  auto poisson = build_poisson_cloud(1.0, 5.0, 5.0, 3);
  auto pback = cloud_from_json(cloud_to_json(*poisson));
  CHECK_FALSE(pback->is_square_lattice());
  CHECK(cloud_to_json(*pback) == cloud_to_json(*poisson));  // byte-stable
}

TEST_CASE("operator json round trip with integrity check") {
  auto cloud = build_square_lattice(3, 3, 1.0);
  const SiteOperator p = random_idempotent(cloud, 3);
  const std::string j = operator_to_json(p);
  const SiteOperator back = operator_from_json(j, cloud);
  CHECK((back.matrix - p.matrix).cwiseAbs().maxCoeff() == 0.0);

  auto other = build_square_lattice(4, 4, 1.0);
  CHECK_THROWS_AS(operator_from_json(j, other), std::invalid_argument);
}

TEST_CASE("mask, partition and pairing serialization") {
  auto cloud = build_square_lattice(3, 3, 1.0);
  const RegionMask m = RegionMask::of_indices(cloud, {1, 4});
  CHECK(mask_to_json(m) == "{\"sites\":[1,4]}");

  const QPartition part = random_partition(cloud, 5);
  const std::string pj = partition_to_json(part);
  CHECK(pj.find("\"parts\"") != std::string::npos);

  PairingResult r;
  r.raw = Complex(0.0, 1.0);
  r.normalized = 4.0 * M_PI;
  r.provenance = "test";
  const std::string rj = pairing_to_json(r);
  CHECK(rj.find("\"raw_im\":1.0") != std::string::npos);
  CHECK(rj.find("\"provenance\":\"test\"") != std::string::npos);
}

TEST_CASE("csv rows") {
  CHECK(csv_row({"a", "b", "c"}) == "a,b,c\n");
  CHECK(csv_row({}) == "\n");
}
