#include "coarsehall/partitions.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace coarsehall {

QPartition::QPartition(std::vector<RegionMask> parts) : parts_(std::move(parts)) {
  if (parts_.size() < 2) throw std::invalid_argument("QPartition: need at least 2 parts");
  for (std::size_t k = 1; k < parts_.size(); ++k)
    require_same_cloud(parts_[0], parts_[k]);
  const std::size_t n = parts_[0].size();
  std::vector<std::size_t> hits(n, 0);
  for (const auto& p : parts_)
    for (std::size_t i = 0; i < n; ++i)
      if (p.contains(i)) ++hits[i];
  for (std::size_t i = 0; i < n; ++i) {
    if (hits[i] == 0) throw std::invalid_argument("QPartition: parts do not cover the cloud");
    if (hits[i] > 1) throw std::invalid_argument("QPartition: parts are not disjoint");
  }
}

HalfSpacePair HalfSpacePair::from(RegionMask X, RegionMask Y) {
  require_same_cloud(X, Y);
  HalfSpacePair hs{X, Y, X & Y, X & Y.complement(), X.complement() & Y,
                   X.complement() & Y.complement()};
  return hs;
}

HalfSpacePair coordinate_halfspaces(const CloudPtr& cloud, double x0, double y0) {
  std::vector<std::uint8_t> bx(cloud->size()), by(cloud->size());
  for (std::size_t i = 0; i < cloud->size(); ++i) {
    bx[i] = cloud->site(i).x >= x0 ? 1 : 0;
    by[i] = cloud->site(i).y >= y0 ? 1 : 0;
  }
  return HalfSpacePair::from(RegionMask(cloud, std::move(bx)),
                             RegionMask(cloud, std::move(by)));
}

QPartition sector_partition(const CloudPtr& cloud, Vec2 center,
                            const std::array<double, 3>& cut_angles) {
  const double two_pi = 2.0 * M_PI;
  auto wrap = [&](double a) {
    a = std::fmod(a, two_pi);
    if (a < 0) a += two_pi;
    return a;
  };
  std::array<double, 3> cuts = {wrap(cut_angles[0]), wrap(cut_angles[1]), wrap(cut_angles[2])};
  // counterclockwise order starting at the first cut
  std::array<double, 3> rel = {0.0, wrap(cuts[1] - cuts[0]), wrap(cuts[2] - cuts[0])};
  std::array<int, 3> order = {0, 1, 2};
  std::sort(order.begin() + 1, order.end(), [&](int a, int b) { return rel[a] < rel[b]; });
  for (int k = 1; k < 3; ++k)
    if (rel[order[k]] == rel[order[k - 1]])
      throw std::invalid_argument("sector_partition: cut angles coincide modulo 2pi");

  std::array<std::vector<std::uint8_t>, 3> bits;
  for (auto& b : bits) b.assign(cloud->size(), 0);
  for (std::size_t i = 0; i < cloud->size(); ++i) {
    const auto& s = cloud->site(i);
    double a = wrap(std::atan2(s.y - center.y, s.x - center.x) - cuts[0]);
    // the site at the center goes with the first sector
    int sector = order[2];
    for (int k = 0; k < 3; ++k) {
      const double lo = rel[order[k]];
      const double hi = (k < 2) ? rel[order[k + 1]] : two_pi;
      if (a >= lo && a < hi) {
        sector = order[k];
        break;
      }
    }
    bits[static_cast<std::size_t>(sector)][i] = 1;
  }
  std::vector<RegionMask> parts;
  for (auto& b : bits) parts.emplace_back(cloud, std::move(b));
  return QPartition(std::move(parts));
}

QPartition halfspaces_to_partition(const HalfSpacePair& hs) {
  return QPartition({hs.X, hs.XcY, hs.XcYc});
}

HalfSpacePair partition_to_halfspaces(const QPartition& p) {
  if (p.part_count() != 3)
    throw std::invalid_argument("partition_to_halfspaces: expected exactly 3 parts");
  const auto& A = p.part(0);
  const auto& B = p.part(1);
  const auto& C = p.part(2);
  std::vector<std::uint8_t> w(A.size(), 0);
  for (std::size_t i = 0; i < A.size(); ++i) {
    if (!A.contains(i)) continue;
    if (B.distance_from_site(i) <= C.distance_from_site(i)) w[i] = 1;
  }
  RegionMask W(A.cloud(), std::move(w));
  return HalfSpacePair::from(A, W | B);
}

CobordismMove elementary_cobordism(const QPartition& p, std::size_t i, std::size_t j,
                                   const RegionMask& W,
                                   const std::vector<double>& witness_radii) {
  if (i == j) throw std::invalid_argument("elementary_cobordism: i and j must differ");
  if (i >= p.part_count() || j >= p.part_count())
    throw std::invalid_argument("elementary_cobordism: part index out of range");
  if (!W.subset_of(p.part(i)))
    throw std::invalid_argument("elementary_cobordism: W must be a subset of parts[i]");

  std::vector<RegionMask> parts = p.parts();
  parts[i] = parts[i].setminus(W);
  parts[j] = W | parts[j];

  CobordismMove move{QPartition(std::move(parts)), {}};
  std::vector<RegionMask> untouched{W};
  for (std::size_t k = 0; k < p.part_count(); ++k)
    if (k != i && k != j) untouched.push_back(p.part(k));
  if (untouched.size() >= 2 && !W.is_empty())
    move.transversality_witness = transversality_profile(untouched, witness_radii);
  return move;
}

RegionMask bulk_window(const QPartition& p, double r) {
  if (p.part_count() != 3)
    throw std::invalid_argument("bulk_window: expected exactly 3 parts");
  return thicken(p.part(0), r) & thicken(p.part(1), r) & thicken(p.part(2), r);
}

}  // namespace coarsehall
