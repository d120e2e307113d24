#pragma once

#include <complex>
#include <optional>

#include <Eigen/Dense>

#include "htom/common.hpp"

namespace htom {

// Fock-basis density matrix truncated at photon number `cutoff`
// (dimension cutoff+1). Stored exactly Hermitian; unit trace after any
// normalizing operation; positive semidefinite up to -1e-10.
class DensityMatrix {
 public:
  explicit DensityMatrix(int cutoff);

  static DensityMatrix vacuum(int cutoff);
  static DensityMatrix fock(int n, int cutoff);
  static DensityMatrix maximally_mixed(int cutoff);
  // Diagonal state from populations; throws on negative entries. With
  // renormalize=false the populations must already sum to 1 within 1e-12.
  static DensityMatrix from_diagonal(const Eigen::VectorXd& populations,
                                     bool renormalize = false);
  // Verifies Hermiticity within `herm_tol` (relative to the largest element),
  // then stores the exactly symmetrized matrix.
  static DensityMatrix from_matrix(const Eigen::MatrixXcd& m, double herm_tol = 1e-9);

  int cutoff() const { return cutoff_; }
  int dim() const { return cutoff_ + 1; }
  const Eigen::MatrixXcd& elements() const { return m_; }
  std::complex<double> at(int m, int n) const { return m_(m, n); }
  double population(int n) const { return m_(n, n).real(); }
  Eigen::VectorXd diagonal() const { return m_.diagonal().real(); }

  double trace() const { return m_.trace().real(); }
  void normalize();
  double smallest_eigenvalue() const;
  bool is_diagonal(double tol = 0.0) const;

  // Checks all three type invariants; throws NumericError on violation.
  void require_valid(double trace_tol = 1e-9, double psd_tol = 1e-10) const;

 private:
  int cutoff_;
  Eigen::MatrixXcd m_;
};

// One calibrated homodyne outcome: quadrature value in vacuum-variance-1/2
// units and the local-oscillator phase, normalized to [0, 2pi).
struct QuadratureSample {
  double value;
  double phase;
  QuadratureSample(double value_in, double phase_in);
};

double normalize_phase(double theta);

// Quadrature projector (possibly integrated over a bin); Hermitian PSD.
struct MeasurementOperator {
  int cutoff;
  Eigen::MatrixXcd elements;
};

struct PhotonStatistics {
  double mean_n;
  double mean_n_sq;
  double mean_aadagger2;  // <a†a†aa> = sum n(n-1) rho_nn
};

// Highest supported Hermite-Gauss index; the normalized recurrence stays
// finite well past this, the cap just bounds precomputed tables.
inline constexpr int kHermiteMaxN = 200;
// Bin integration: fixed-order Gauss-Legendre, kBinQuadraturePanels panels of
// kBinQuadratureOrder points per bin.
inline constexpr int kBinQuadratureOrder = 16;
inline constexpr int kBinQuadraturePanels = 1;

// Normalized Hermite-Gauss wavefunction psi_n(q) in the convention
// |psi_0(q)|^2 = pi^(-1/2) exp(-q^2) (vacuum quadrature variance 1/2).
double hermite_fn(int n, double q);
// Fills out[0..n_max] with psi_0(q)..psi_n_max(q) by the three-term
// recurrence on normalized functions.
void hermite_fn_all(int n_max, double q, Eigen::Ref<Eigen::VectorXd> out);

// Pi(q, theta) with elements exp(i(m-n)theta) psi_m(q) psi_n(q); when
// bin_width is given, the Hermite product is integrated over
// [q - bin_width/2, q + bin_width/2].
MeasurementOperator quadrature_projector(double q, double theta, int cutoff,
                                         std::optional<double> bin_width = std::nullopt);

// Beam-splitter (generalized Bernoulli) loss map with transmission eta.
// Trace preserving; cutoff unchanged.
DensityMatrix loss_channel(const DensityMatrix& rho, double eta);

PhotonStatistics photon_statistics(const DensityMatrix& rho);

// Wigner function in the convention where the vacuum is
// (1/pi) exp(-x^2 - p^2) and the grid integral is 1.
double wigner(const DensityMatrix& rho, double x, double p);
// Fast path: W(0,0) = (1/pi) sum (-1)^n rho_nn.
double wigner_origin(const DensityMatrix& rho);

// pr(q | theta) = sum_mn rho_mn exp(i(m-n)theta) psi_m(q) psi_n(q).
double marginal_pdf(const DensityMatrix& rho, double theta, double q);

}  // namespace htom
