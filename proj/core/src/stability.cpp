#include "sopf/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace sopf {

namespace {

void require_hessian_shape(const Matrix& H, const char* what) {
  if (H.cols() != H.rows() * H.rows()) {
    throw std::invalid_argument(std::string(what) + ": H must be n x n^2");
  }
}

constexpr double kSymmetryTol = 1e-12;
constexpr double kPositiveFloor = 1e-12;

}  // namespace

EnergyCheck energy_preserving_check(const Matrix& H, double tol) {
  require_hessian_shape(H, "energy_preserving_check");
  const Eigen::Index n = H.rows();
  auto h = [&](Eigen::Index i, Eigen::Index j, Eigen::Index k) { return H(i, j * n + k); };
  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      for (Eigen::Index k = j; k < n; ++k) {
        // Grouped so that skew blocks (H_ijk = -H_kji) cancel exactly.
        const double sum = (h(i, j, k) + h(k, j, i)) + (h(i, k, j) + h(j, k, i)) +
                           (h(j, i, k) + h(k, i, j));
        worst = std::max(worst, std::abs(sum));
      }
    }
  }
  return {worst <= tol, worst};
}

double energy_preserving_sample_check(const Matrix& H, int trials, std::uint64_t seed) {
  require_hessian_shape(H, "energy_preserving_sample_check");
  if (trials < 1) throw std::invalid_argument("energy_preserving_sample_check: trials >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const Eigen::Index n = H.rows();
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    Vector z(n);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = normal(rng);
    const double norm = z.norm();
    if (norm == 0.0) continue;
    z /= norm;
    worst = std::max(worst, std::abs(z.dot(H * kron_vec(z))));
  }
  return worst;
}

HurwitzCheck is_hurwitz(const Matrix& A) {
  require_square(A, "is_hurwitz");
  Eigen::EigenSolver<Matrix> es(A, false);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("is_hurwitz: eigensolver did not converge");
  }
  const double abscissa = es.eigenvalues().real().maxCoeff();
  return {abscissa < 0.0, abscissa};
}

bool is_positive_definite(const Matrix& M) {
  require_square(M, "is_positive_definite");
  const double scale = spectral_norm(M);
  if (asymmetry(M) > kSymmetryTol * std::max(1.0, scale)) return false;
  if (scale == 0.0) return false;
  return min_symmetric_eigenvalue(M) > kPositiveFloor * scale;
}

std::optional<MonotoneSplit> monotone_decompose(const Matrix& A) {
  require_square(A, "monotone_decompose");
  MonotoneSplit split{skew_part(A), -sym_part(A)};
  if (!is_positive_definite(split.R)) return std::nullopt;
  return split;
}

double StabilityCertificate::trapping_radius(double u_bound, double B_norm) const {
  if (u_bound < 0.0 || B_norm < 0.0) {
    throw std::invalid_argument("trapping_radius: bounds must be nonnegative");
  }
  if (u_bound == 0.0 || B_norm == 0.0) return 0.0;
  return B_norm * u_bound / sigma_min_R;
}

double StabilityCertificate::lyapunov_norm(const Vector& x) const {
  return std::sqrt(std::max(0.0, x.dot(Q * x)));
}

double StabilityCertificate::invariant_level(double u_bound) const {
  return trapping_radius(u_bound) / std::sqrt(q_min_eigenvalue);
}

double StabilityCertificate::state_bound(const Vector& x0, double u_bound) const {
  const double level = std::max(lyapunov_norm(x0), invariant_level(u_bound));
  if (!generalized) return std::max(x0.norm(), trapping_radius(u_bound));
  return level / std::sqrt(q_min_eigenvalue);
}

namespace {

StabilityCertificate make_certificate(MonotoneSplit split, Matrix Q, double q_min,
                                      const QuadraticControlSystem& sys, double violation,
                                      bool generalized) {
  StabilityCertificate cert;
  cert.sigma_min_R = min_singular_value(split.R);
  cert.J = std::move(split.J);
  cert.R = std::move(split.R);
  cert.Q = std::move(Q);
  cert.q_min_eigenvalue = q_min;
  cert.b_norm = spectral_norm(sys.B());
  cert.energy_violation = violation;
  cert.generalized = generalized;
  return cert;
}

}  // namespace

CertificationReport certify(const QuadraticControlSystem& sys, double energy_tol) {
  CertificationReport report;
  const HurwitzCheck hw = is_hurwitz(sys.A());
  report.hurwitz = hw.hurwitz;
  report.abscissa = hw.abscissa;
  const EnergyCheck ep = energy_preserving_check(sys.H(), energy_tol);
  report.energy_violation = ep.max_violation;
  report.energy_preserving = ep.preserving;
  auto split = monotone_decompose(sys.A());
  report.monotone = split.has_value();
  report.trapping_radius_per_unit_input = std::numeric_limits<double>::infinity();
  if (split) report.sigma_min_R = min_singular_value(split->R);

  if (!report.hurwitz) {
    report.reason = "A is not Hurwitz";
  } else if (!report.monotone) {
    report.reason = "symmetric part of A is not negative definite";
  } else if (!report.energy_preserving) {
    report.reason = "H is not energy-preserving";
  }
  if (!report.reason.empty()) return report;

  const Eigen::Index n = sys.state_dim();
  report.certificate =
      make_certificate(std::move(*split), Matrix::Identity(n, n), 1.0, sys, ep.max_violation, false);
  report.trapping_radius_per_unit_input = report.certificate->trapping_radius(1.0);
  return report;
}

std::optional<double> trapping_radius(const QuadraticControlSystem& sys, double u_bound) {
  if (u_bound < 0.0) throw std::invalid_argument("trapping_radius: u_bound must be >= 0");
  const CertificationReport report = certify(sys);
  if (!report.certified()) return std::nullopt;
  return report.certificate->trapping_radius(u_bound);
}

CertificationReport generalized_certificate(const QuadraticControlSystem& sys, const Matrix& Q,
                                            double tol) {
  const Eigen::Index n = sys.state_dim();
  if (Q.rows() != n || Q.cols() != n) {
    throw std::invalid_argument("generalized_certificate: Q must be n x n");
  }
  if (!is_positive_definite(Q)) {
    throw std::invalid_argument("generalized_certificate: Q must be symmetric positive definite");
  }
  CertificationReport report;
  const HurwitzCheck hw = is_hurwitz(sys.A());
  report.hurwitz = hw.hurwitz;
  report.abscissa = hw.abscissa;
  report.trapping_radius_per_unit_input = std::numeric_limits<double>::infinity();

  const Matrix Qs = sym_part(Q);
  const Eigen::LLT<Matrix> llt(Qs);
  // A Q⁻¹ = (Q⁻¹ Aᵀ)ᵀ since Q is symmetric.
  const Matrix core = llt.solve(sys.A().transpose()).transpose();
  auto split = monotone_decompose(core);
  report.monotone = split.has_value();
  if (split) report.sigma_min_R = min_singular_value(split->R);

  const Matrix QH = Qs * sys.H();
  const double scale = std::max(1.0, QH.size() ? QH.cwiseAbs().maxCoeff() : 0.0);
  const EnergyCheck ep = energy_preserving_check(QH, tol * scale);
  report.energy_violation = ep.max_violation;
  report.energy_preserving = ep.preserving;

  if (!report.hurwitz) {
    report.reason = "A is not Hurwitz";
  } else if (!report.monotone) {
    report.reason = "A Q^-1 does not split as J - R with R positive definite";
  } else if (!report.energy_preserving) {
    report.reason = "Q H is not energy-preserving";
  }
  if (!report.reason.empty()) return report;

  Eigen::SelfAdjointEigenSolver<Matrix> es(Qs, Eigen::EigenvaluesOnly);
  report.certificate = make_certificate(std::move(*split), Qs, es.eigenvalues()(0), sys,
                                        ep.max_violation, true);
  report.trapping_radius_per_unit_input = report.certificate->trapping_radius(1.0);
  return report;
}

std::vector<Matrix> to_skew_block_form(const Matrix& H, double tol) {
  require_hessian_shape(H, "to_skew_block_form");
  const EnergyCheck ep = energy_preserving_check(H, tol);
  if (!ep.preserving) {
    throw std::invalid_argument("to_skew_block_form: H is not energy-preserving (violation " +
                                std::to_string(ep.max_violation) + ")");
  }
  const Eigen::Index n = H.rows();
  auto s = [&](Eigen::Index i, Eigen::Index j, Eigen::Index k) {
    return 0.5 * (H(i, j * n + k) + H(i, k * n + j));
  };
  std::vector<Matrix> blocks(static_cast<std::size_t>(n), Matrix::Zero(n, n));
  for (Eigen::Index k = 0; k < n; ++k) {
    Matrix& blk = blocks[static_cast<std::size_t>(k)];
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double v = (2.0 / 3.0) * (s(i, j, k) - s(j, i, k));
        blk(i, j) = v;
        blk(j, i) = -v;
      }
    }
  }
  return blocks;
}

BibsReport check_bibs(const StabilityCertificate& cert, const Trajectory& traj, double u_bound,
                      const BibsOptions& opts) {
  BibsReport report;
  report.diverged = traj.diverged();
  report.blowup_time = traj.blowup_time;
  report.radius = cert.trapping_radius(u_bound);
  const Eigen::Index samples = traj.states.cols();
  if (samples == 0) return report;

  const Vector x0 = traj.states.col(0);
  report.bound = cert.state_bound(x0, u_bound);
  const double level = cert.invariant_level(u_bound);
  const double limit = report.bound * (1.0 + opts.bound_rel_slack);

  report.within_bound = true;
  report.monotone_outside_ball = true;
  double previous = cert.lyapunov_norm(x0);
  for (Eigen::Index k = 0; k < samples; ++k) {
    const Vector x = traj.states.col(k);
    const double norm = x.norm();
    report.max_norm = std::max(report.max_norm, norm);
    bool ok = norm <= limit;
    report.within_bound = report.within_bound && ok;
    const double current = cert.lyapunov_norm(x);
    if (k > 0 && previous > level) {
      const bool decreasing = current <= previous + opts.monotone_slack * std::max(1.0, previous);
      report.monotone_outside_ball = report.monotone_outside_ball && decreasing;
      ok = ok && decreasing;
    }
    if (!ok && !report.first_violation) report.first_violation = k;
    previous = current;
  }
  return report;
}

BibsReport verify_bibs(const QuadraticControlSystem& sys, const StabilityCertificate& cert,
                       const Vector& x0, const InputFunction& u, double horizon,
                       double u_bound, int samples, const BibsOptions& opts) {
  if (!(horizon > 0.0)) throw std::invalid_argument("verify_bibs: horizon must be positive");
  const std::vector<double> t = linspace(0.0, horizon, samples);
  const Trajectory traj = simulate(sys, x0, u, t, opts.sim);
  return check_bibs(cert, traj, u_bound, opts);
}

BibsReport verify_bibs(const QuadraticControlSystem& sys, const Vector& x0,
                       const InputFunction& u, double horizon, double u_bound, int samples,
                       const BibsOptions& opts) {
  const CertificationReport report = certify(sys);
  if (!report.certified()) {
    throw std::invalid_argument("verify_bibs: system is not certified: " + report.reason);
  }
  return verify_bibs(sys, *report.certificate, x0, u, horizon, u_bound, samples, opts);
}

}  // namespace sopf
