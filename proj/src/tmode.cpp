#include "htom/tmode.hpp"

#include <cmath>
#include <complex>
#include <vector>

namespace htom {

TraceSet::TraceSet(Eigen::MatrixXd data, double dt_ns, int trigger_index, TraceMeta meta)
    : data_(std::move(data)), dt_ns_(dt_ns), trigger_index_(trigger_index),
      meta_(std::move(meta)) {
  if (data_.rows() > 0) {
    if (data_.cols() < kMinTraceLength || data_.cols() > kMaxTraceLength)
      throw InputError("TraceSet: trace length outside [16, 2^20]");
    if (!data_.allFinite()) throw InputError("TraceSet: non-finite sample");
  }
  if (!(dt_ns_ > 0.0)) throw InputError("TraceSet: dt_ns must be > 0");
}

Trace TraceSet::trace(int i) const {
  if (i < 0 || i >= n_traces()) throw InputError("TraceSet::trace: index out of range");
  return Trace{data_.row(i).transpose(), dt_ns_, trigger_index_};
}

Eigen::VectorXd variance_profile(const TraceSet& set) {
  const int t = set.n_traces();
  if (t < 2) throw InputError("variance_profile: need at least 2 traces");
  const Eigen::RowVectorXd mean = set.data().colwise().mean();
  return (set.data().rowwise() - mean).colwise().squaredNorm().transpose() / (t - 1.0);
}

Eigen::MatrixXd autocorrelation_matrix(const TraceSet& set, int n_threads) {
  const int t = set.n_traces();
  const int s = set.n_samples();
  if (t < 2) throw InputError("autocorrelation_matrix: need at least 2 traces");
  const Eigen::RowVectorXd mean = set.data().colwise().mean();

  // Fixed-size chunks combined in chunk order: bit-reproducible for any
  // thread count.
  constexpr std::size_t kChunk = 4096;
  const std::size_t n_chunks = chunk_count(t, kChunk);
  std::vector<Eigen::MatrixXd> partial(n_chunks);
  parallel_chunks(t, kChunk, n_threads, [&](std::size_t c, std::size_t begin, std::size_t end) {
    const auto block = set.data().middleRows(begin, end - begin).rowwise() - mean;
    partial[c] = block.transpose() * block.eval();
  });
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(s, s);
  for (const auto& m : partial) acc += m;
  acc /= (t - 1.0);
  // Exact symmetry regardless of accumulation roundoff.
  return 0.5 * (acc + acc.transpose().eval());
}

ModeExtraction extract_mode_from_delta(const Eigen::MatrixXd& delta_a, double dt_ns) {
  if (delta_a.rows() != delta_a.cols() || delta_a.rows() < 2)
    throw InputError("extract_mode: autocorrelation matrix must be square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (delta_a + delta_a.transpose().eval()));
  const Eigen::VectorXd& ev = es.eigenvalues();  // ascending
  const int last = static_cast<int>(ev.size()) - 1;
  const double lambda1 = ev[last];
  const double lambda2 = ev[last - 1];
  if (!(lambda1 > 0.0))
    throw NumericError(
        "no excess mode: heralded autocorrelation does not exceed the background");

  Eigen::VectorXd psi = es.eigenvectors().col(last);
  int imax = 0;
  psi.cwiseAbs().maxCoeff(&imax);
  if (psi[imax] < 0.0) psi = -psi;
  psi /= psi.norm();

  double positive_sum = 0.0;
  for (int i = 0; i <= last; ++i)
    if (ev[i] > 0.0) positive_sum += ev[i];

  ModeExtraction out;
  out.mode = TemporalMode{psi, dt_ns, lambda1 / positive_sum};
  out.leading_eigenvalue = lambda1;
  out.second_eigenvalue = lambda2;
  if (lambda1 - lambda2 < 1e-9 * lambda1)
    out.warning = "degenerate leading eigenvalues: temporal mode is not unique";
  return out;
}

ModeExtraction extract_mode(const TraceSet& heralded, const TraceSet& background,
                            int n_threads) {
  if (heralded.n_samples() != background.n_samples())
    throw InputError("extract_mode: trace lengths differ");
  if (std::abs(heralded.dt_ns() - background.dt_ns()) >
      1e-12 * std::max(heralded.dt_ns(), background.dt_ns()))
    throw InputError("extract_mode: dt mismatch");
  const Eigen::MatrixXd delta = autocorrelation_matrix(heralded, n_threads) -
                                autocorrelation_matrix(background, n_threads);
  return extract_mode_from_delta(delta, heralded.dt_ns());
}

namespace {

// Iterative radix-2 FFT; n must be a power of two.
void fft_pow2(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * kPi / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

// Solves |F|^2 = half_max between bins k and k+1 by a quadratic through
// (k-1, k, k+1); falls back to linear interpolation when degenerate.
double half_crossing(const std::vector<double>& power, int k, double half) {
  if (k < 1) return k + (half - power[k]) / (power[k + 1] - power[k]);
  const double y0 = power[k - 1], y1 = power[k], y2 = power[k + 1];
  const double a = 0.5 * (y0 + y2) - y1;
  const double b = 0.5 * (y2 - y0);
  const double c = y1 - half;
  if (std::abs(a) > 1e-300) {
    const double disc = b * b - 4.0 * a * c;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      for (double root : {(-b + sq) / (2.0 * a), (-b - sq) / (2.0 * a)}) {
        if (root >= -1.0 - 1e-9 && root <= 1.0 + 1e-9 && root >= 0.0) return k + root;
      }
    }
  }
  return k + (half - y1) / (y2 - y1);
}

}  // namespace

double mode_bandwidth_mhz(const TemporalMode& mode, int zero_pad_factor) {
  const int n = static_cast<int>(mode.psi.size());
  if (n < 2) throw InputError("mode_bandwidth: mode too short");
  if (zero_pad_factor < 1) throw InputError("mode_bandwidth: zero_pad_factor must be >= 1");
  std::size_t m = 1;
  while (m < static_cast<std::size_t>(n) * zero_pad_factor) m <<= 1;
  std::vector<std::complex<double>> a(m, 0.0);
  for (int i = 0; i < n; ++i) a[i] = mode.psi[i];
  fft_pow2(a);

  const int half_n = static_cast<int>(m / 2);
  std::vector<double> power(half_n + 1);
  for (int i = 0; i <= half_n; ++i) power[i] = std::norm(a[i]);

  int peak = 0;
  for (int i = 1; i <= half_n; ++i)
    if (power[i] > power[peak]) peak = i;
  if (peak >= half_n - 1)
    throw NumericError("mode_bandwidth: spectral peak at the Nyquist edge (undersampled mode)");

  const double half = 0.5 * power[peak];
  const double bin_to_mhz = 1e3 / (static_cast<double>(m) * mode.dt_ns);  // GHz -> MHz

  // Right crossing, scanning outward from the peak.
  int kr = peak;
  while (kr + 1 <= half_n && power[kr + 1] >= half) ++kr;
  if (kr + 1 > half_n)
    throw NumericError("mode_bandwidth: half maximum not reached below Nyquist");
  const double right = half_crossing(power, kr, half);

  // Left crossing; the spectrum of a real mode is symmetric about zero, so a
  // peak at DC mirrors the right crossing.
  double left;
  if (peak == 0) {
    left = -right;
  } else {
    int kl = peak;
    while (kl - 1 >= 0 && power[kl - 1] >= half) --kl;
    if (kl == 0) {
      left = -right;  // merged with the mirrored lobe across DC
    } else {
      const double y0 = power[kl - 1], y1 = power[kl];
      left = kl - 1 + (half - y0) / (y1 - y0);
    }
  }
  return (right - left) * bin_to_mhz;
}

}  // namespace htom
