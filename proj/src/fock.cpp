#include "htom/fock.hpp"

#include <cmath>
#include <vector>

namespace htom {

namespace {

constexpr double kQuarterRootPi = 0.7511255444649425;  // pi^(-1/4)

// Gauss-Legendre nodes/weights on [-1, 1], computed once by Newton iteration
// on the Legendre polynomial.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
  explicit GaussLegendre(int order) {
    nodes.resize(order);
    weights.resize(order);
    for (int i = 0; i < order; ++i) {
      double x = std::cos(kPi * (i + 0.75) / (order + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= order; ++k) {
          double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = order * (x * p1 - p0) / (x * x - 1.0);
        double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      nodes[i] = x;
      weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }
};

const GaussLegendre& bin_quadrature() {
  static const GaussLegendre gl(kBinQuadratureOrder);
  return gl;
}

}  // namespace

DensityMatrix::DensityMatrix(int cutoff) : cutoff_(cutoff) {
  if (cutoff < 0) throw InputError("DensityMatrix: cutoff must be >= 0");
  m_ = Eigen::MatrixXcd::Zero(cutoff + 1, cutoff + 1);
}

DensityMatrix DensityMatrix::vacuum(int cutoff) { return fock(0, cutoff); }

DensityMatrix DensityMatrix::fock(int n, int cutoff) {
  if (n < 0 || n > cutoff) throw InputError("DensityMatrix::fock: n outside [0, cutoff]");
  DensityMatrix rho(cutoff);
  rho.m_(n, n) = 1.0;
  return rho;
}

DensityMatrix DensityMatrix::maximally_mixed(int cutoff) {
  DensityMatrix rho(cutoff);
  rho.m_.diagonal().setConstant(1.0 / (cutoff + 1));
  return rho;
}

DensityMatrix DensityMatrix::from_diagonal(const Eigen::VectorXd& populations,
                                           bool renormalize) {
  if (populations.size() < 1) throw InputError("from_diagonal: empty populations");
  if ((populations.array() < 0.0).any())
    throw InputError("from_diagonal: negative population");
  DensityMatrix rho(static_cast<int>(populations.size()) - 1);
  rho.m_.diagonal() = populations.cast<std::complex<double>>();
  const double tr = populations.sum();
  if (renormalize) {
    if (tr <= 0.0) throw InputError("from_diagonal: zero total population");
    rho.m_ /= tr;
  } else if (std::abs(tr - 1.0) > 1e-12) {
    throw InputError("from_diagonal: populations do not sum to 1");
  }
  return rho;
}

DensityMatrix DensityMatrix::from_matrix(const Eigen::MatrixXcd& m, double herm_tol) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw InputError("from_matrix: matrix must be square and nonempty");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > herm_tol * scale)
    throw InputError("from_matrix: matrix is not Hermitian");
  DensityMatrix rho(static_cast<int>(m.rows()) - 1);
  rho.m_ = 0.5 * (m + m.adjoint().eval());
  return rho;
}

void DensityMatrix::normalize() {
  const double tr = trace();
  if (!(tr > 0.0)) throw NumericError("DensityMatrix::normalize: nonpositive trace");
  m_ /= tr;
}

double DensityMatrix::smallest_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

bool DensityMatrix::is_diagonal(double tol) const {
  for (int i = 0; i < dim(); ++i)
    for (int j = 0; j < dim(); ++j)
      if (i != j && std::abs(m_(i, j)) > tol) return false;
  return true;
}

void DensityMatrix::require_valid(double trace_tol, double psd_tol) const {
  if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() != 0.0)
    throw NumericError("DensityMatrix: stored matrix is not exactly Hermitian");
  if (std::abs(trace() - 1.0) > trace_tol)
    throw NumericError("DensityMatrix: trace deviates from 1");
  if (smallest_eigenvalue() < -psd_tol)
    throw NumericError("DensityMatrix: negative eigenvalue beyond tolerance");
}

double normalize_phase(double theta) {
  if (!std::isfinite(theta)) throw InputError("phase must be finite");
  double t = std::fmod(theta, 2.0 * kPi);
  if (t < 0.0) t += 2.0 * kPi;
  if (t >= 2.0 * kPi) t = 0.0;
  return t;
}

QuadratureSample::QuadratureSample(double value_in, double phase_in)
    : value(value_in), phase(normalize_phase(phase_in)) {
  if (!std::isfinite(value_in)) throw InputError("quadrature value must be finite");
}

double hermite_fn(int n, double q) {
  if (n < 0) throw InputError("hermite_fn: n must be >= 0");
  if (n > kHermiteMaxN) throw InputError("hermite_fn: n exceeds supported limit of 200");
  if (!std::isfinite(q)) throw InputError("hermite_fn: q must be finite");
  double h0 = kQuarterRootPi * std::exp(-0.5 * q * q);
  if (n == 0) return h0;
  double h1 = std::sqrt(2.0) * q * h0;
  for (int k = 2; k <= n; ++k) {
    double h2 = std::sqrt(2.0 / k) * q * h1 - std::sqrt((k - 1.0) / k) * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

void hermite_fn_all(int n_max, double q, Eigen::Ref<Eigen::VectorXd> out) {
  if (n_max < 0 || n_max > kHermiteMaxN)
    throw InputError("hermite_fn_all: n_max outside [0, 200]");
  if (!std::isfinite(q)) throw InputError("hermite_fn_all: q must be finite");
  out[0] = kQuarterRootPi * std::exp(-0.5 * q * q);
  if (n_max == 0) return;
  out[1] = std::sqrt(2.0) * q * out[0];
  for (int k = 2; k <= n_max; ++k)
    out[k] = std::sqrt(2.0 / k) * q * out[k - 1] - std::sqrt((k - 1.0) / k) * out[k - 2];
}

MeasurementOperator quadrature_projector(double q, double theta, int cutoff,
                                         std::optional<double> bin_width) {
  if (cutoff <= 0) throw InputError("quadrature_projector: cutoff must be >= 1");
  if (!std::isfinite(q)) throw InputError("quadrature_projector: q must be finite");
  const int d = cutoff + 1;

  // Real symmetric core: psi_m psi_n at q, or its integral over the bin.
  Eigen::MatrixXd core(d, d);
  Eigen::VectorXd psi(d);
  if (!bin_width) {
    hermite_fn_all(cutoff, q, psi);
    core = psi * psi.transpose();
  } else {
    if (!(*bin_width > 0.0)) throw InputError("quadrature_projector: bin_width must be > 0");
    core.setZero();
    const auto& gl = bin_quadrature();
    const double lo = q - 0.5 * *bin_width;
    const double panel = *bin_width / kBinQuadraturePanels;
    for (int p = 0; p < kBinQuadraturePanels; ++p) {
      const double a = lo + p * panel;
      const double mid = a + 0.5 * panel;
      const double half = 0.5 * panel;
      for (int i = 0; i < kBinQuadratureOrder; ++i) {
        hermite_fn_all(cutoff, mid + half * gl.nodes[i], psi);
        core.noalias() += (gl.weights[i] * half) * (psi * psi.transpose());
      }
    }
  }

  Eigen::VectorXcd phase(d);
  for (int m = 0; m < d; ++m) phase[m] = std::polar(1.0, m * theta);
  MeasurementOperator op{cutoff, Eigen::MatrixXcd(d, d)};
  op.elements = phase.asDiagonal() * core * phase.conjugate().asDiagonal();
  return op;
}

DensityMatrix loss_channel(const DensityMatrix& rho, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw InputError("loss_channel: eta must be in [0,1]");
  const int d = rho.dim();
  // B(n, k) = C(n+k, k) eta^n (1-eta)^k, the probability of keeping n photons
  // out of n+k. All entries are in [0, 1]; the recurrence in n is stable.
  Eigen::MatrixXd b(d, d);
  for (int k = 0; k < d; ++k) {
    b(0, k) = std::pow(1.0 - eta, k);
    for (int n = 1; n + k < d; ++n)
      b(n, k) = b(n - 1, k) * eta * (n + k) / static_cast<double>(n);
  }
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
  for (int m = 0; m < d; ++m) {
    for (int n = 0; n < d; ++n) {
      std::complex<double> acc = 0.0;
      const int kmax = d - 1 - std::max(m, n);
      for (int k = 0; k <= kmax; ++k)
        acc += std::sqrt(b(m, k) * b(n, k)) * rho.at(m + k, n + k);
      out(m, n) = acc;
    }
  }
  return DensityMatrix::from_matrix(out, 1e-12);
}

PhotonStatistics photon_statistics(const DensityMatrix& rho) {
  PhotonStatistics s{0.0, 0.0, 0.0};
  for (int n = 0; n <= rho.cutoff(); ++n) {
    const double p = rho.population(n);
    s.mean_n += n * p;
    s.mean_n_sq += static_cast<double>(n) * n * p;
    s.mean_aadagger2 += static_cast<double>(n) * (n - 1) * p;
  }
  return s;
}

double wigner(const DensityMatrix& rho, double x, double p) {
  const int d = rho.dim();
  const double r2 = x * x + p * p;
  const double expfac = std::exp(-r2);
  const double phi = std::atan2(p, x);
  const double log_sqrt2r = r2 > 0.0 ? 0.5 * std::log(2.0 * r2) : 0.0;

  double total = 0.0;
  // Taking m >= n: W_mn = (-1)^n/pi sqrt(n!/m!) (sqrt(2)(x-ip))^(m-n)
  //                       L_n^(m-n)(2 r^2) exp(-r^2).
  // The (m, n) and (n, m) terms fold into 2 Re(rho_mn W_mn).
  for (int delta = 0; delta < d; ++delta) {
    if (delta > 0 && r2 == 0.0) break;
    // Associated Laguerre recurrence in the lower index at fixed delta.
    double l0 = 1.0, l1 = 1.0 + delta - 2.0 * r2;
    for (int n = 0; n + delta < d; ++n) {
      const int m = n + delta;
      double lag;
      if (n == 0) {
        lag = l0;
      } else if (n == 1) {
        lag = l1;
      } else {
        lag = ((2.0 * n - 1.0 + delta - 2.0 * r2) * l1 - (n - 1.0 + delta) * l0) / n;
        l0 = l1;
        l1 = lag;
      }
      const double sign = (n % 2 == 0) ? 1.0 : -1.0;
      const double pref =
          std::exp(0.5 * (std::lgamma(n + 1.0) - std::lgamma(m + 1.0)) + delta * log_sqrt2r);
      const double mag = sign / kPi * pref * lag * expfac;
      if (delta == 0) {
        total += rho.population(n) * mag;
      } else {
        const std::complex<double> wmn = mag * std::polar(1.0, -delta * phi);
        total += 2.0 * std::real(rho.at(m, n) * wmn);
      }
    }
  }
  return total;
}

double wigner_origin(const DensityMatrix& rho) {
  double s = 0.0;
  for (int n = 0; n <= rho.cutoff(); ++n)
    s += (n % 2 == 0 ? 1.0 : -1.0) * rho.population(n);
  return s / kPi;
}

double marginal_pdf(const DensityMatrix& rho, double theta, double q) {
  const int d = rho.dim();
  Eigen::VectorXd psi(d);
  hermite_fn_all(rho.cutoff(), q, psi);
  Eigen::VectorXcd u(d);
  for (int m = 0; m < d; ++m) u[m] = std::polar(psi[m], m * theta);
  const std::complex<double> s = u.transpose() * (rho.elements() * u.conjugate());
  return std::max(0.0, s.real());
}

}  // namespace htom
