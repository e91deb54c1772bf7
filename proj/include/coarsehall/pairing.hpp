#pragma once

#include "coarsehall/operators.hpp"
#include "coarsehall/partitions.hpp"

namespace coarsehall {

class contract_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PairingResult {
  Complex raw{0.0, 0.0};
  double normalized = 0.0;  // 4π·Im(raw)
  double residual = 0.0;    // |Re(raw)| plus the idempotency defect of P
  std::string provenance;
};

inline constexpr double kIdempotencyTolerance = 1e-8;

/// ⟨A,B,C;P⟩ = Tr[A,B,C]_P, cross-checked against Tr[P_A,P_B].
PairingResult partition_pairing(const QPartition& p, const SiteOperator& proj);

/// Tr[P_X,P_Y], cross-checked term by term against the subdivided
/// commutator decomposition.
PairingResult commutator_trace(const HalfSpacePair& hs, const SiteOperator& proj);

/// 3·Σ_{i∈A,j∈B,k∈C} (P_ij P_jk P_ki − P_ik P_kj P_ji), by explicit
/// triangle summation (independent of the operator route).
Complex two_current_sum(const QPartition& p, const SiteOperator& proj);

/// P·[[X,P],[Y,P]]; asserted equal to [P_X,P_Y] entrywise.
SiteOperator kubo_commutator(const HalfSpacePair& hs, const SiteOperator& proj);

/// σ_K = 4πi·Tr[A∩K, B∩K, C∩K]_P, cross-checked against the rewritten
/// form 12πi·Tr(K[PKAKP, PKBKP]K).
PairingResult bulk_conductance(const QPartition& p, const RegionMask& k,
                               const SiteOperator& proj);

struct ChernOracleResult {
  int chern = 0;
  double rounding_defect = 0.0;
};

/// Momentum-space Chern number of the bands below the chosen gap of the
/// Hofstadter model at flux p/q, via link-variable Berry curvature on a
/// discretized magnetic Brillouin zone.
ChernOracleResult fhs_chern_oracle(int p, int q, int fermi_gap_index, int k_grid);

}  // namespace coarsehall
