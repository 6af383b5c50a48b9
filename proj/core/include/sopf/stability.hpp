#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sopf/quadratic_system.hpp"
#include "sopf/signals.hpp"
#include "sopf/simulate.hpp"

namespace sopf {

struct EnergyCheck {
  bool preserving = false;
  /// max over i <= j <= k of |Σ_{perm} H_{perm(i,j,k)}|
  double max_violation = 0.0;
};

/// Index-permutation test: H_ijk + H_ikj + H_jik + H_jki + H_kij + H_kji = 0,
/// with H_ijk = e_iᵀ H (e_j ⊗ e_k). The sum is symmetric in (i, j, k), so only
/// i <= j <= k is enumerated.
EnergyCheck energy_preserving_check(const Matrix& H, double tol = 1e-12);

/// max |zᵀ H (z ⊗ z)| over `trials` random unit vectors z.
double energy_preserving_sample_check(const Matrix& H, int trials, std::uint64_t seed);

struct HurwitzCheck {
  bool hurwitz = false;
  double abscissa = 0.0;  ///< max real part of the spectrum
};

/// Throws std::runtime_error if the eigensolver does not converge.
HurwitzCheck is_hurwitz(const Matrix& A);

/// Symmetric and smallest eigenvalue above 1e-12 * ‖M‖₂.
bool is_positive_definite(const Matrix& M);

struct MonotoneSplit {
  Matrix J;  ///< skew-symmetric
  Matrix R;  ///< symmetric positive definite
};

/// A = J - R with J = skew(A), R = -sym(A). Empty when R is not positive
/// definite, i.e. when ‖x(t)‖ is not monotone for ẋ = A x.
std::optional<MonotoneSplit> monotone_decompose(const Matrix& A);

/// Witnesses for bounded-input bounded-state stability with Lyapunov function
/// V(x) = xᵀ Q x (Q = I in the monotone case). Outside ‖Q x‖ <= r, V strictly
/// decreases, where r = ‖B‖₂ ‖u‖_∞ / σ_min(R).
struct StabilityCertificate {
  Matrix J;
  Matrix R;
  Matrix Q;
  double sigma_min_R = 0.0;
  double q_min_eigenvalue = 1.0;
  double b_norm = 0.0;
  double energy_violation = 0.0;
  bool generalized = false;

  /// r = B_norm * u_bound / sigma_min_R
  double trapping_radius(double u_bound, double B_norm) const;
  double trapping_radius(double u_bound) const { return trapping_radius(u_bound, b_norm); }

  /// Upper bound on ‖x(t)‖₂ for all t >= 0. Equals max(‖x0‖₂, r) when Q = I.
  double state_bound(const Vector& x0, double u_bound) const;

  /// sqrt(xᵀ Q x); equals ‖x‖₂ when Q = I.
  double lyapunov_norm(const Vector& x) const;

  /// Lyapunov-norm level r / sqrt(λ_min(Q)); the sublevel set below it contains
  /// the ball ‖Q x‖ <= r and is forward invariant. Equals r when Q = I.
  double invariant_level(double u_bound) const;
};

/// Everything the certify command reports about one system.
struct CertificationReport {
  bool hurwitz = false;
  double abscissa = 0.0;
  bool monotone = false;
  double sigma_min_R = 0.0;
  double energy_violation = 0.0;
  bool energy_preserving = false;
  double trapping_radius_per_unit_input = 0.0;  ///< +inf when not certified
  std::optional<StabilityCertificate> certificate;
  std::string reason;  ///< empty when certified

  bool certified() const { return certificate.has_value(); }
};

/// Monotone (Q = I) certification: Hurwitz test, A = J - R split, and the
/// energy-preserving check on H with tolerance `energy_tol`.
CertificationReport certify(const QuadraticControlSystem& sys, double energy_tol = 1e-12);

/// r = ‖B‖₂ u_bound / σ_min(R), or empty if the system is not certified.
std::optional<double> trapping_radius(const QuadraticControlSystem& sys, double u_bound);

/// Certification with V(x) = xᵀ Q x: A Q⁻¹ must split as J - R and Q H must be
/// energy-preserving, which holds whenever A = (J - R) Q and
/// H = [H_1 Q ... H_n Q] with skew H_k. With Q = I this is certify().
CertificationReport generalized_certificate(const QuadraticControlSystem& sys, const Matrix& Q,
                                            double tol = 1e-10);

/// Skew blocks H_1..H_n with Σ_k x_k H_k x = H (x ⊗ x). Symmetrizes in the last
/// two indices, S_ijk = (H_ijk + H_ikj) / 2, then (H_k)_ij = 2/3 (S_ijk - S_jik).
/// Throws std::invalid_argument unless H passes the energy-preserving check.
std::vector<Matrix> to_skew_block_form(const Matrix& H, double tol = 1e-12);

struct BibsReport {
  double max_norm = 0.0;
  double bound = 0.0;
  double radius = 0.0;
  bool within_bound = false;
  bool monotone_outside_ball = false;
  bool diverged = false;
  std::optional<double> blowup_time;
  /// first sample index that broke either check, if any
  std::optional<Eigen::Index> first_violation;

  bool satisfied() const { return within_bound && monotone_outside_ball && !diverged; }
};

struct BibsOptions {
  double bound_rel_slack = 1e-6;
  double monotone_slack = 1e-9;
  SimulationOptions sim;
};

/// Checks a sampled trajectory against the certificate: the state stays
/// below the state bound (with relative slack), and the Lyapunov norm does not
/// increase between samples whenever it exceeds invariant_level() (for Q = I:
/// ‖x(t)‖ is non-increasing while ‖x(t)‖ > r).
BibsReport check_bibs(const StabilityCertificate& cert, const Trajectory& traj, double u_bound,
                      const BibsOptions& opts = {});

/// Simulates on `samples` equidistant points over [0, horizon] and runs check_bibs.
/// Throws std::invalid_argument if the system is not certified.
BibsReport verify_bibs(const QuadraticControlSystem& sys, const Vector& x0,
                       const InputFunction& u, double horizon, double u_bound,
                       int samples = 1001, const BibsOptions& opts = {});

BibsReport verify_bibs(const QuadraticControlSystem& sys, const StabilityCertificate& cert,
                       const Vector& x0, const InputFunction& u, double horizon,
                       double u_bound, int samples = 1001, const BibsOptions& opts = {});

}  // namespace sopf
