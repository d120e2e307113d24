#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "htom/common.hpp"

namespace htom {

// One trigger-aligned homodyne photocurrent segment in raw acquisition units.
struct Trace {
  Eigen::VectorXd samples;
  double dt_ns = 1.0;
  int trigger_index = 0;
};

struct TraceMeta {
  std::string label;
  uint64_t seed = 0;
  std::string notes;
};

inline constexpr int kMinTraceLength = 16;
inline constexpr int kMaxTraceLength = 1 << 20;

// Homogeneous set of traces: row i of data() is trace i. All traces share
// dt_ns and trigger_index; homogeneity is enforced at construction/load.
class TraceSet {
 public:
  TraceSet() = default;
  TraceSet(Eigen::MatrixXd data, double dt_ns, int trigger_index, TraceMeta meta = {});

  int n_traces() const { return static_cast<int>(data_.rows()); }
  int n_samples() const { return static_cast<int>(data_.cols()); }
  double dt_ns() const { return dt_ns_; }
  int trigger_index() const { return trigger_index_; }
  const Eigen::MatrixXd& data() const { return data_; }
  const TraceMeta& meta() const { return meta_; }
  TraceMeta& meta() { return meta_; }

  Trace trace(int i) const;

  // True LO phase per trace, when known (synthetic data records it).
  std::optional<std::vector<double>> phases;

 private:
  Eigen::MatrixXd data_;
  double dt_ns_ = 1.0;
  int trigger_index_ = 0;
  TraceMeta meta_;
};

// Discrete temporal mode over the trace window: unit Euclidean norm, with the
// dominant-eigenvalue fraction of the excess autocorrelation as purity.
struct TemporalMode {
  Eigen::VectorXd psi;
  double dt_ns = 1.0;
  double purity = 1.0;
};

struct ModeExtraction {
  TemporalMode mode;
  double leading_eigenvalue = 0.0;
  double second_eigenvalue = 0.0;
  std::string warning;  // nonempty when the eigenvalue gap is degenerate
};

// Per-sample-index unbiased variance across traces.
Eigen::VectorXd variance_profile(const TraceSet& set);

// A_ij = mean over traces of q_i q_j with the per-index mean subtracted
// (unbiased normalization); exactly symmetric by construction.
Eigen::MatrixXd autocorrelation_matrix(const TraceSet& set, int n_threads = 1);

// Temporal mode from the excess autocorrelation A_heralded - A_background:
// the eigenvector of the largest eigenvalue, sign-canonicalized so the
// largest-magnitude sample is positive.
ModeExtraction extract_mode(const TraceSet& heralded, const TraceSet& background,
                            int n_threads = 1);
ModeExtraction extract_mode_from_delta(const Eigen::MatrixXd& delta_a, double dt_ns);

// FWHM of |DFT(psi)|^2 in MHz, with x`zero_pad_factor` zero padding (rounded
// up to a power of two) and parabolic interpolation of the half-maximum
// crossings.
double mode_bandwidth_mhz(const TemporalMode& mode, int zero_pad_factor = 16);

}  // namespace htom
