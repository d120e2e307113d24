#pragma once

#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "htom/common.hpp"
#include "htom/fock.hpp"
#include "htom/tmode.hpp"

namespace htom {

enum class ModeShapeKind { Gaussian, GaussianSidelobes, Custom };

// Temporal-mode recipe, discretized over the trace window and normalized to
// unit Euclidean norm. Gaussian parameters refer to the intensity profile
// |psi(t)|^2; center_ns is measured from the trigger sample.
struct ModeShape {
  ModeShapeKind kind = ModeShapeKind::Gaussian;
  double center_ns = 0.0;
  double fwhm_ns = 11.316;
  double lobe_amp = 0.15;       // GaussianSidelobes: lobe amplitude vs main
  double lobe_offset_ns = 30.0; // GaussianSidelobes: lobe center offset
  std::vector<double> samples;  // Custom

  Eigen::VectorXd discretize(int n_samples, double dt_ns, int trigger_index) const;
};

struct TraceConfig {
  int n_samples = 18;
  double dt_ns = 10.0;
  int trigger_index = 8;
  ModeShape mode_shape;
  double electronic_noise_var = 0.0;  // per raw sample
};

// Effective source model: TMSV squeezing parameter lambda (|n,n> weight
// proportional to lambda^(2n)), path efficiencies, false-herald probability
// and background thermal occupation.
struct SourceParams {
  double lambda_sq = 0.5;
  double eta_signal = 0.5354;
  double eta_idler = 0.35;
  double false_herald_prob = 0.02;
  double bg_thermal_n = 0.04;
  int cutoff = 12;
  TraceConfig trace;

  void require_valid() const;
};

struct GroundTruth {
  DensityMatrix heralded_state;
  DensityMatrix background_state;
  TemporalMode mode;
  double herald_rate_hint_hz = 0.0;
};

struct SynthesisResult {
  TraceSet heralded;
  TraceSet background;
  GroundTruth truth;
};

// Conditional signal state given a click: TMSV weights conditioned on the
// on/off idler POVM, signal loss, then mixed with the background via the
// false-herald probability. Always diagonal.
DensityMatrix heralded_state(const SourceParams& params);

// Truncated, renormalized thermal state at bg_thermal_n. Warns on stderr when
// the truncated mass exceeds 1e-6.
DensityMatrix background_state(const SourceParams& params);

// Mass of an untruncated thermal state above the cutoff.
double thermal_truncated_mass(double nbar, int cutoff);

// Inverse-CDF sampler for marginal_pdf(rho, theta, .) on a fixed grid over
// [-8, 8] with 2^14 points and linear interpolation.
class QuadratureSampler {
 public:
  QuadratureSampler(const DensityMatrix& rho, double theta);
  double sample(Rng& rng) const;

  static constexpr double kQMin = -8.0;
  static constexpr double kQMax = 8.0;
  static constexpr int kGridPoints = 1 << 14;

 private:
  Eigen::VectorXd grid_;
  Eigen::VectorXd cdf_;  // unnormalized cumulative trapezoid
};

// Single draw; for bulk sampling construct a QuadratureSampler once.
double sample_quadrature(const DensityMatrix& rho, double theta, Rng& rng);

// Synthesizes trigger-aligned trace sets. Each heralded event draws the
// extraction-mode quadrature from the heralded state at a uniform-random
// phase (recorded in TraceSet::phases) and every orthogonal background mode
// from the background state; background traces draw all modes from the
// background state. Deterministic given the seed, independent of threading.
SynthesisResult synthesize_traces(const SourceParams& params, int n_heralds,
                                  int n_background, uint64_t seed, int n_threads = 1);

// Vacuum trace set (all modes vacuum plus electronic noise); the calibration
// input of the pipeline.
TraceSet synthesize_vacuum(const SourceParams& params, int n_traces, uint64_t seed,
                           int n_threads = 1);

}  // namespace htom
