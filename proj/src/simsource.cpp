#include "htom/simsource.hpp"

#include <cmath>
#include <iostream>

namespace htom {

Eigen::VectorXd ModeShape::discretize(int n_samples, double dt_ns, int trigger_index) const {
  if (n_samples < kMinTraceLength)
    throw InputError("mode_shape: n_samples must be >= 16");
  Eigen::VectorXd psi(n_samples);
  switch (kind) {
    case ModeShapeKind::Gaussian:
    case ModeShapeKind::GaussianSidelobes: {
      if (!(fwhm_ns > 0.0)) throw InputError("mode_shape: fwhm_ns must be > 0");
      // Intensity FWHM -> amplitude Gaussian exp(-t^2 / (4 sigma^2)).
      const double sigma = fwhm_ns / (2.0 * std::sqrt(2.0 * std::log(2.0)));
      for (int i = 0; i < n_samples; ++i) {
        const double t = (i - trigger_index) * dt_ns - center_ns;
        double v = std::exp(-t * t / (4.0 * sigma * sigma));
        if (kind == ModeShapeKind::GaussianSidelobes) {
          const double tl = t - lobe_offset_ns;
          const double tr = t + lobe_offset_ns;
          v -= lobe_amp * std::exp(-tl * tl / (4.0 * sigma * sigma));
          v -= lobe_amp * std::exp(-tr * tr / (4.0 * sigma * sigma));
        }
        psi[i] = v;
      }
      break;
    }
    case ModeShapeKind::Custom: {
      if (static_cast<int>(samples.size()) != n_samples)
        throw InputError("mode_shape: custom sample count does not match the trace window");
      for (int i = 0; i < n_samples; ++i) psi[i] = samples[i];
      break;
    }
  }
  const double norm = psi.norm();
  if (!(norm > 0.0)) throw InputError("mode_shape: zero norm after discretization");
  return psi / norm;
}

void SourceParams::require_valid() const {
  if (!(lambda_sq >= 0.0 && lambda_sq < 1.0))
    throw InputError("source: lambda_sq must be in [0, 1)");
  for (auto [v, name] : {std::pair{eta_signal, "eta_signal"},
                         std::pair{eta_idler, "eta_idler"},
                         std::pair{false_herald_prob, "false_herald_prob"}}) {
    if (!(v >= 0.0 && v <= 1.0))
      throw InputError(std::string("source: ") + name + " must be in [0, 1]");
  }
  if (!(bg_thermal_n >= 0.0)) throw InputError("source: bg_thermal_n must be >= 0");
  if (cutoff < 1) throw InputError("source: cutoff must be >= 1");
  if (trace.n_samples < kMinTraceLength) throw InputError("source: n_samples must be >= 16");
  if (!(trace.dt_ns > 0.0)) throw InputError("source: dt_ns must be > 0");
  if (trace.trigger_index < 0 || trace.trigger_index >= trace.n_samples)
    throw InputError("source: trigger_index outside the trace window");
  if (!(trace.electronic_noise_var >= 0.0))
    throw InputError("source: electronic_noise_var must be >= 0");
}

double thermal_truncated_mass(double nbar, int cutoff) {
  if (nbar < 0.0) throw InputError("thermal: nbar must be >= 0");
  if (nbar == 0.0) return 0.0;
  // Geometric tail: sum_{n > cutoff} nbar^n / (1+nbar)^(n+1) = (nbar/(1+nbar))^(cutoff+1).
  return std::pow(nbar / (1.0 + nbar), cutoff + 1);
}

DensityMatrix background_state(const SourceParams& params) {
  params.require_valid();
  const double nbar = params.bg_thermal_n;
  const int cutoff = params.cutoff;
  Eigen::VectorXd pops(cutoff + 1);
  for (int n = 0; n <= cutoff; ++n)
    pops[n] = std::pow(nbar / (1.0 + nbar), n) / (1.0 + nbar);
  if (thermal_truncated_mass(nbar, cutoff) >= 1e-6)
    std::cerr << "warning: thermal background truncation error "
              << thermal_truncated_mass(nbar, cutoff) << " at cutoff " << cutoff << "\n";
  return DensityMatrix::from_diagonal(pops, true);
}

DensityMatrix heralded_state(const SourceParams& params) {
  params.require_valid();
  const int cutoff = params.cutoff;
  const double lam = params.lambda_sq;
  const double p_f = params.false_herald_prob;
  const DensityMatrix bg = background_state(params);

  if (lam == 0.0) {
    // No pairs: every click is false. With p_f = 0 heralding cannot happen.
    if (p_f == 0.0)
      throw InputError("heralded_state: zero click probability (lambda = 0, no false heralds)");
    return bg;
  }

  Eigen::VectorXd w(cutoff + 1);
  for (int n = 0; n <= cutoff; ++n) {
    const double tmsv = (1.0 - lam * lam) * std::pow(lam, 2 * n);
    w[n] = tmsv * (1.0 - std::pow(1.0 - params.eta_idler, n));
  }
  if (!(w.sum() > 0.0)) {
    if (p_f == 0.0) throw InputError("heralded_state: zero click probability");
    return bg;
  }
  DensityMatrix cond = DensityMatrix::from_diagonal(w, true);
  cond = loss_channel(cond, params.eta_signal);

  Eigen::VectorXd mixed =
      (1.0 - p_f) * cond.diagonal() + p_f * bg.diagonal();
  return DensityMatrix::from_diagonal(mixed, true);
}

namespace {

double herald_rate_hint(const SourceParams& params) {
  const double lam = params.lambda_sq;
  double p_click = 0.0;
  for (int n = 1; n <= params.cutoff; ++n)
    p_click += (1.0 - lam * lam) * std::pow(lam, 2 * n) *
               (1.0 - std::pow(1.0 - params.eta_idler, n));
  const double window_s = params.trace.n_samples * params.trace.dt_ns * 1e-9;
  return p_click / window_s;
}

}  // namespace

QuadratureSampler::QuadratureSampler(const DensityMatrix& rho, double theta) {
  grid_.resize(kGridPoints);
  cdf_.resize(kGridPoints);
  const double step = (kQMax - kQMin) / (kGridPoints - 1);
  Eigen::VectorXd pdf(kGridPoints);
  for (int i = 0; i < kGridPoints; ++i) {
    grid_[i] = kQMin + i * step;
    pdf[i] = marginal_pdf(rho, theta, grid_[i]);
  }
  cdf_[0] = 0.0;
  for (int i = 1; i < kGridPoints; ++i)
    cdf_[i] = cdf_[i - 1] + 0.5 * (pdf[i] + pdf[i - 1]) * step;

  // Out-of-grid mass, measured with Simpson quadrature so the check is not
  // polluted by the trapezoid error of the CDF itself.
  double simpson = 0.0;
  for (int i = 0; i + 2 < kGridPoints; i += 2)
    simpson += (pdf[i] + 4.0 * pdf[i + 1] + pdf[i + 2]) * step / 3.0;
  simpson += 0.5 * (pdf[kGridPoints - 2] + pdf[kGridPoints - 1]) * step;
  if (std::abs(1.0 - simpson) > 1e-9)
    throw InputError("QuadratureSampler: state has probability mass outside [-8, 8]");
}

double QuadratureSampler::sample(Rng& rng) const {
  const double target = rng.uniform01() * cdf_[kGridPoints - 1];
  // Binary search for the bracketing CDF interval, then linear interpolation.
  int lo = 0, hi = kGridPoints - 1;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    if (cdf_[mid] <= target)
      lo = mid;
    else
      hi = mid;
  }
  const double span = cdf_[hi] - cdf_[lo];
  const double frac = span > 0.0 ? (target - cdf_[lo]) / span : 0.5;
  return grid_[lo] + frac * (grid_[hi] - grid_[lo]);
}

double sample_quadrature(const DensityMatrix& rho, double theta, Rng& rng) {
  return QuadratureSampler(rho, theta).sample(rng);
}

namespace {

// Orthonormal basis whose first column is psi, completed deterministically by
// Householder QR of [psi | I].
Eigen::MatrixXd mode_basis(const Eigen::VectorXd& psi) {
  const int n = static_cast<int>(psi.size());
  Eigen::MatrixXd a(n, n + 1);
  a.col(0) = psi;
  a.rightCols(n) = Eigen::MatrixXd::Identity(n, n);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  if (q.col(0).dot(psi) < 0.0) q.col(0) = -q.col(0);
  if ((q.col(0) - psi).norm() > 1e-10)
    throw NumericError("mode basis: QR did not reproduce the extraction mode");
  q.col(0) = psi;
  return q;
}

// Fills `rows` of precomputed mode-quadrature draws; mode 0 is the extraction
// mode. Column inner products with the basis give trace samples.
TraceSet synthesize_set(const SourceParams& params, int n_traces,
                        const QuadratureSampler& mode0_sampler,
                        const QuadratureSampler& bg_sampler,
                        const Eigen::MatrixXd& basis, uint64_t seed,
                        uint64_t stream_offset, bool record_phases, int n_threads,
                        const std::string& label) {
  const int n_samples = params.trace.n_samples;
  const double noise_sd = std::sqrt(params.trace.electronic_noise_var);
  Eigen::MatrixXd data(n_traces, n_samples);
  std::vector<double> phases(record_phases ? n_traces : 0);

  parallel_chunks(n_traces, 1024, n_threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    Eigen::VectorXd q(n_samples);
    for (std::size_t e = begin; e < end; ++e) {
      Rng rng = Rng::substream(seed, stream_offset + e);
      const double theta = rng.uniform01() * 2.0 * kPi;
      if (record_phases) phases[e] = theta;
      q[0] = mode0_sampler.sample(rng);
      for (int k = 1; k < n_samples; ++k) q[k] = bg_sampler.sample(rng);
      data.row(e) = (basis * q).transpose();
      if (noise_sd > 0.0)
        for (int i = 0; i < n_samples; ++i) data(e, i) += noise_sd * rng.gaussian();
    }
  });

  TraceSet set(std::move(data), params.trace.dt_ns, params.trace.trigger_index,
               TraceMeta{label, seed, ""});
  if (record_phases) set.phases = std::move(phases);
  return set;
}

}  // namespace

SynthesisResult synthesize_traces(const SourceParams& params, int n_heralds,
                                  int n_background, uint64_t seed, int n_threads) {
  params.require_valid();
  if (n_heralds < 0 || n_background < 0)
    throw InputError("synthesize_traces: negative trace count");

  const DensityMatrix her = heralded_state(params);
  const DensityMatrix bg = background_state(params);
  const Eigen::VectorXd psi = params.trace.mode_shape.discretize(
      params.trace.n_samples, params.trace.dt_ns, params.trace.trigger_index);
  const Eigen::MatrixXd basis = mode_basis(psi);

  // Both states are diagonal, so their marginals are phase independent and
  // one sampler per state serves every mode and LO phase.
  const QuadratureSampler her_sampler(her, 0.0);
  const QuadratureSampler bg_sampler(bg, 0.0);

  constexpr uint64_t kBackgroundStream = 1ULL << 32;
  SynthesisResult out{
      synthesize_set(params, n_heralds, her_sampler, bg_sampler, basis, seed, 0,
                     true, n_threads, "heralded"),
      synthesize_set(params, n_background, bg_sampler, bg_sampler, basis, seed,
                     kBackgroundStream, false, n_threads, "background"),
      GroundTruth{her, bg, TemporalMode{psi, params.trace.dt_ns, 1.0},
                  herald_rate_hint(params)}};
  return out;
}

TraceSet synthesize_vacuum(const SourceParams& params, int n_traces, uint64_t seed,
                           int n_threads) {
  params.require_valid();
  if (n_traces < 0) throw InputError("synthesize_vacuum: negative trace count");
  SourceParams vac = params;
  vac.bg_thermal_n = 0.0;
  const DensityMatrix vacuum = background_state(vac);
  const Eigen::VectorXd psi = params.trace.mode_shape.discretize(
      params.trace.n_samples, params.trace.dt_ns, params.trace.trigger_index);
  const Eigen::MatrixXd basis = mode_basis(psi);
  const QuadratureSampler sampler(vacuum, 0.0);
  constexpr uint64_t kVacuumStream = 1ULL << 33;
  return synthesize_set(params, n_traces, sampler, sampler, basis, seed, kVacuumStream,
                        false, n_threads, "vacuum");
}

}  // namespace htom
