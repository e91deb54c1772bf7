#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coarsehall/models.hpp"
#include "coarsehall/pairing.hpp"

namespace coarsehall {

struct ExperimentTable {
  std::vector<std::string> schema;
  std::vector<std::vector<std::string>> rows;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string version = "coarse-hall-1";

  void add_row(std::vector<std::string> cells);
  std::size_t pass_count() const;
  std::size_t fail_count() const;
  double worst_defect() const;
  bool all_pass() const { return fail_count() == 0; }
  std::string to_csv() const;
  std::string summary_json(const std::string& suite_name) const;

  /// indices of the "pass" and "defect" columns, if present
  int pass_column() const;
  int defect_column() const;
};

/// Seeded random idempotent Q·diag(0/1)·Q⁻¹ with cond(Q) <= 10.
SiteOperator random_idempotent(const CloudPtr& cloud, std::uint64_t seed);
/// Seeded random Hermitian idempotent (spectral projector of a random
/// Hermitian matrix onto its lower half).
SiteOperator random_hermitian_idempotent(const CloudPtr& cloud, std::uint64_t seed);
/// Random 3-part partition by seeded site assignment.
QPartition random_partition(const CloudPtr& cloud, std::uint64_t seed);
RegionMask random_mask(const CloudPtr& cloud, std::uint64_t seed, double fill = 0.5);

/// Exact operator-identity checks for one (P, partition, half-space) triple.
ExperimentTable identity_suite(const SiteOperator& p, const QPartition& part,
                               const HalfSpacePair& hs, double rel_tolerance = 1e-10);

/// Fredholm-determinant identities for Hermitian idempotents (N <= 200),
/// plus the generalized det(e^A e^B e^{-A} e^{-B}) = exp(tr[A,B]) check on
/// seeded random 8x8 pairs.
ExperimentTable determinant_identity_suite(const SiteOperator& p, const HalfSpacePair& hs,
                                           std::uint64_t phh_seed = 1,
                                           int phh_instances = 5);

struct QuantizationConfig {
  int nx = 32;
  int ny = 32;
  int flux_p = 1;
  int flux_q = 4;
  double t = 1.0;
  int gap_index = 1;
  std::vector<double> r_samples = {4, 6, 8, 10};
  double disorder_w = 0.0;
  std::vector<std::uint64_t> disorder_seeds = {};
  double quantization_tolerance = 0.05;
};

/// Picks the Fermi energy mid-gap using the bulk-weighted spectrum (edge
/// states of the open boundary are screened out), then centers it between
/// the two nearest discrete levels.
double pick_fermi_energy(const Hamiltonian& h, int gap_index, double gap_threshold);

ExperimentTable quantization_experiment(const QuantizationConfig& cfg);

struct AdditivityConfig {
  int nx = 36;
  int ny = 36;
  int flux_p = 1;
  int flux_q = 3;
  double t = 1.0;
  int gap_index_1 = 1;
  int gap_index_2 = 2;
  double window_r = 8.0;
  double defect_tolerance = 0.1;
};

ExperimentTable additivity_experiment(const AdditivityConfig& cfg);

enum class TrivialityCase { finite_rank, half_space_supported, exact_projection, mirror, real_model };

ExperimentTable triviality_suite(const std::vector<TrivialityCase>& cases);
std::vector<TrivialityCase> all_triviality_cases();

struct ConvergenceConfig {
  std::vector<int> sizes = {20, 28, 36};
  int flux_p = 1;
  int flux_q = 4;
  double t = 1.0;
  int gap_index = 1;
  double r_fraction = 0.25;  // window radius = size * r_fraction
  double slack = 0.2;
};

ExperimentTable convergence_study(const ConvergenceConfig& cfg);

}  // namespace coarsehall
