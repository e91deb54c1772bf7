#include "coarsehall/pairing.hpp"

#include <cmath>

namespace coarsehall {

namespace {

void require_idempotent(const SiteOperator& p, const char* who) {
  const double defect = p.idempotency_defect();
  if (defect > kIdempotencyTolerance)
    throw contract_error(std::string(who) + ": operator is not idempotent (defect " +
                         std::to_string(defect) + ")");
}

PairingResult make_result(Complex raw, double extra_residual, std::string provenance) {
  PairingResult r;
  r.raw = raw;
  r.normalized = 4.0 * M_PI * raw.imag();
  r.residual = std::abs(raw.real()) + extra_residual;
  r.provenance = std::move(provenance);
  return r;
}

}  // namespace

PairingResult partition_pairing(const QPartition& p, const SiteOperator& proj) {
  if (p.part_count() != 3)
    throw std::invalid_argument("partition_pairing: expected a 3-part partition");
  require_idempotent(proj, "partition_pairing");
  const auto& A = p.part(0);
  const auto& B = p.part(1);
  const auto& C = p.part(2);
  const Complex raw = generalized_commutator_trace(A, B, C, proj);

  // equality route: Tr[P_A, P_B]
  const Matrix pa = compress(proj, A).matrix;
  const Matrix pb = compress(proj, B).matrix;
  const Complex comm = (pa * pb - pb * pa).trace();
  const double n = static_cast<double>(proj.dim());
  if (std::abs(raw - comm) > 1e-10 * n)
    throw contract_error("partition_pairing: trace routes disagree by " +
                         std::to_string(std::abs(raw - comm)));
  return make_result(raw, proj.idempotency_defect(), "partition_pairing");
}

PairingResult commutator_trace(const HalfSpacePair& hs, const SiteOperator& proj) {
  require_idempotent(proj, "commutator_trace");
  const Matrix px = compress(proj, hs.X).matrix;
  const Matrix py = compress(proj, hs.Y).matrix;
  const Complex raw = (px * py - py * px).trace();

  // subdivided-commutator decomposition, term by term
  const Matrix pxcy = compress(proj, hs.XcY).matrix;
  const Matrix pxyc = compress(proj, hs.XYc).matrix;
  const Complex t1 = (px * pxcy - pxcy * px).trace();
  const Complex t2 = (py * pxyc - pxyc * py).trace();
  const Complex t3 = (pxcy * pxyc - pxyc * pxcy).trace();
  const double n = static_cast<double>(proj.dim());
  if (std::abs(raw - (t1 - t2 + t3)) > 1e-10 * n)
    throw contract_error("commutator_trace: subdivided decomposition disagrees");
  return make_result(raw, proj.idempotency_defect(), "commutator_trace");
}

Complex two_current_sum(const QPartition& p, const SiteOperator& proj) {
  if (p.part_count() != 3)
    throw std::invalid_argument("two_current_sum: expected a 3-part partition");
  const auto ia = p.part(0).indices();
  const auto ib = p.part(1).indices();
  const auto ic = p.part(2).indices();
  const Matrix& m = proj.matrix;
  Complex sum(0.0, 0.0);
  for (auto i : ia) {
    const auto ii = static_cast<Eigen::Index>(i);
    for (auto j : ib) {
      const auto jj = static_cast<Eigen::Index>(j);
      const Complex pij = m(ii, jj);
      const Complex pji = m(jj, ii);
      for (auto k : ic) {
        const auto kk = static_cast<Eigen::Index>(k);
        sum += pij * m(jj, kk) * m(kk, ii) - m(ii, kk) * m(kk, jj) * pji;
      }
    }
  }
  return 3.0 * sum;
}

SiteOperator kubo_commutator(const HalfSpacePair& hs, const SiteOperator& proj) {
  require_idempotent(proj, "kubo_commutator");
  const Matrix& p = proj.matrix;
  const Matrix xp_comm = mask_left(hs.X, p) - mask_right(p, hs.X);  // [X, P]
  const Matrix yp_comm = mask_left(hs.Y, p) - mask_right(p, hs.Y);  // [Y, P]
  Matrix out = p * (xp_comm * yp_comm - yp_comm * xp_comm);

  const Matrix px = compress(proj, hs.X).matrix;
  const Matrix py = compress(proj, hs.Y).matrix;
  const Matrix direct = px * py - py * px;
  const double pnorm = p.cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, pnorm * pnorm * pnorm);
  const double defect = (out - direct).cwiseAbs().maxCoeff();
  if (defect > 1e-12 * scale * static_cast<double>(proj.dim()))
    throw contract_error("kubo_commutator: identity with [P_X,P_Y] fails (defect " +
                         std::to_string(defect) + ", idempotency defect " +
                         std::to_string(proj.idempotency_defect()) + ")");
  return {std::move(out), proj.cloud};
}

PairingResult bulk_conductance(const QPartition& p, const RegionMask& k,
                               const SiteOperator& proj) {
  if (p.part_count() != 3)
    throw std::invalid_argument("bulk_conductance: expected a 3-part partition");
  if (k.is_empty()) throw std::invalid_argument("bulk_conductance: window K is empty");
  require_idempotent(proj, "bulk_conductance");

  const RegionMask ak = p.part(0) & k;
  const RegionMask bk = p.part(1) & k;
  const RegionMask ck = p.part(2) & k;
  const Complex raw = generalized_commutator_trace(ak, bk, ck, proj);

  // rewritten form: the trace equals 3·Tr((KPK)A(KPK)B(KPK) − (KPK)B(KPK)A(KPK))
  // on the K-compressed kernel; KPK is not idempotent, so this is not the
  // trace of a commutator.
  const auto kidx = k.indices();
  const auto nk = static_cast<Eigen::Index>(kidx.size());
  Matrix pk(nk, nk);
  for (Eigen::Index a = 0; a < nk; ++a)
    for (Eigen::Index b = 0; b < nk; ++b)
      pk(a, b) = proj.matrix(static_cast<Eigen::Index>(kidx[static_cast<std::size_t>(a)]),
                             static_cast<Eigen::Index>(kidx[static_cast<std::size_t>(b)]));
  Eigen::VectorXd adiag(nk), bdiag(nk);
  for (Eigen::Index a = 0; a < nk; ++a) {
    adiag(a) = p.part(0).contains(kidx[static_cast<std::size_t>(a)]) ? 1.0 : 0.0;
    bdiag(a) = p.part(1).contains(kidx[static_cast<std::size_t>(a)]) ? 1.0 : 0.0;
  }
  const Matrix ka = pk * adiag.asDiagonal();
  const Matrix kb = pk * bdiag.asDiagonal();
  const Complex rewritten =
      3.0 * ((ka * kb * pk).trace() - (kb * ka * pk).trace());
  const double n = static_cast<double>(proj.dim());
  if (std::abs(raw - rewritten) > 1e-9 * n)
    throw contract_error("bulk_conductance: rewritten trace form disagrees by " +
                         std::to_string(std::abs(raw - rewritten)));
  return make_result(raw, proj.idempotency_defect(), "bulk_conductance");
}

ChernOracleResult fhs_chern_oracle(int p, int q, int fermi_gap_index, int k_grid) {
  if (q < 1) throw std::invalid_argument("fhs_chern_oracle: q must be >= 1");
  if (fermi_gap_index < 1 || fermi_gap_index >= q)
    throw std::invalid_argument("fhs_chern_oracle: gap index must be in [1, q-1]");
  if (k_grid < 6 * q) throw std::invalid_argument("fhs_chern_oracle: k_grid must be >= 6q");

  const int nb = fermi_gap_index;  // occupied bands below the chosen gap
  const double phi = static_cast<double>(p) / static_cast<double>(q);
  const double t = 1.0;
  // kx runs over the full 2π period, where the Bloch matrix is exactly
  // periodic; this covers the magnetic Brillouin zone q times, so the
  // field sum is divided by q at the end.
  const int nkx = k_grid, nky = k_grid;
  const double dkx = 2.0 * M_PI / nkx;
  const double dky = 2.0 * M_PI / nky;

  auto bloch = [&](double kx, double ky) {
    Matrix h = Matrix::Zero(q, q);
    for (int m = 0; m < q; ++m) {
      h(m, m) += -2.0 * t * std::cos(2.0 * M_PI * phi * m - ky);
      h(m, (m + 1) % q) += -t * std::exp(Complex(0.0, kx));
      h((m + 1) % q, m) += -t * std::exp(Complex(0.0, -kx));
    }
    return h;
  };

  // occupied-band frames on the grid
  std::vector<Matrix> frames(static_cast<std::size_t>(nkx * nky));
  for (int i = 0; i < nkx; ++i) {
    for (int j = 0; j < nky; ++j) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(bloch(i * dkx, j * dky));
      const auto& ev = es.eigenvalues();
      if (ev(nb) - ev(nb - 1) < 1e-9)
        throw gap_violation_error("fhs_chern_oracle: gap closes at a grid point");
      frames[static_cast<std::size_t>(i * nky + j)] = es.eigenvectors().leftCols(nb);
    }
  }

  auto link = [&](int i1, int j1, int i2, int j2) {
    const Matrix overlap = frames[static_cast<std::size_t>(i1 * nky + j1)].adjoint() *
                           frames[static_cast<std::size_t>(i2 * nky + j2)];
    Complex d = overlap.determinant();
    const double mag = std::abs(d);
    if (mag < 1e-12)
      throw gap_violation_error("fhs_chern_oracle: vanishing link variable");
    return d / mag;
  };

  double field_sum = 0.0;
  for (int i = 0; i < nkx; ++i) {
    const int ip = (i + 1) % nkx;
    for (int j = 0; j < nky; ++j) {
      const int jp = (j + 1) % nky;
      const Complex u1 = link(i, j, ip, j);
      const Complex u2 = link(ip, j, ip, jp);
      const Complex u3 = link(ip, jp, i, jp);
      const Complex u4 = link(i, jp, i, j);
      field_sum += std::arg(u1 * u2 * u3 * u4);
    }
  }
  const double c = field_sum / (2.0 * M_PI * q);
  ChernOracleResult out;
  out.chern = static_cast<int>(std::lround(c));
  out.rounding_defect = std::abs(c - out.chern);
  if (out.rounding_defect >= 1e-3)
    throw std::runtime_error("fhs_chern_oracle: field sum is not close to an integer");
  return out;
}

}  // namespace coarsehall
