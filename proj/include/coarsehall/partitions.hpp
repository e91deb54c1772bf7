#pragma once

#include <array>

#include "coarsehall/geometry.hpp"

namespace coarsehall {

/// Ordered disjoint cover (A_0, ..., A_q) of the cloud. Order matters:
/// swapping two parts flips the sign of the pairing downstream.
class QPartition {
 public:
  explicit QPartition(std::vector<RegionMask> parts);

  std::size_t part_count() const { return parts_.size(); }
  const RegionMask& part(std::size_t i) const { return parts_.at(i); }
  const std::vector<RegionMask>& parts() const { return parts_; }
  const CloudPtr& cloud() const { return parts_.front().cloud(); }

 private:
  std::vector<RegionMask> parts_;
};

/// Half-space pair (X, Y) with its four quadrant masks cached.
struct HalfSpacePair {
  RegionMask X;
  RegionMask Y;
  RegionMask XY;    // X ∩ Y
  RegionMask XYc;   // X ∩ Yᶜ
  RegionMask XcY;   // Xᶜ ∩ Y
  RegionMask XcYc;  // Xᶜ ∩ Yᶜ

  static HalfSpacePair from(RegionMask X, RegionMask Y);
};

HalfSpacePair coordinate_halfspaces(const CloudPtr& cloud, double x0, double y0);

/// Three angular sectors around `center`, counterclockwise from the first
/// cut angle. Sites on a starting cut belong to that sector.
QPartition sector_partition(const CloudPtr& cloud, Vec2 center,
                            const std::array<double, 3>& cut_angles);

/// (X, Xᶜ∩Y, Xᶜ∩Yᶜ)
QPartition halfspaces_to_partition(const HalfSpacePair& hs);

/// Bisection of a 3-part partition (A,B,C): W = {a in A : d(a,B) <= d(a,C)},
/// X = A, Y = W ⊔ B. Distance to an empty part is +inf.
HalfSpacePair partition_to_halfspaces(const QPartition& p);

struct CobordismMove {
  QPartition result;
  std::vector<ProfileRow> transversality_witness;  // profile of (W, untouched parts)
};

CobordismMove elementary_cobordism(const QPartition& p, std::size_t i, std::size_t j,
                                   const RegionMask& W,
                                   const std::vector<double>& witness_radii = {1, 2, 4, 8});

/// K = A_r ∩ B_r ∩ C_r for a 3-part partition.
RegionMask bulk_window(const QPartition& p, double r);

}  // namespace coarsehall
