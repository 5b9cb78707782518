// Copyright 2026 The semiq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "semiq/metrics.hpp"

// Shot-level sampling oracle. Every state in the engine is Gaussian and
// every element acts linearly on quadratures (measurement feedforward
// included), so quantum expectation values coincide with the statistics of
// a classical simulation that draws the input quadratures from their
// Wigner distributions and pushes the numbers through the same arithmetic.
// The pipeline below does exactly that, one scalar at a time, without ever
// touching ModeExpr composition - which is what makes it an independent
// check of the closed-form path.

namespace semiq {

struct MCConfig {
  std::uint64_t shots{1000000};
  std::uint64_t seed{20260823};
  /// Shots per work chunk. Each chunk owns an independent, reproducible
  /// random substream, so results are bit-identical for a fixed config
  /// regardless of thread count.
  std::uint64_t chunk_shots{65536};
  /// Worker threads; 0 picks the hardware concurrency.
  unsigned thread_count{0};
};

struct MCEstimate {
  double value{0};
  double std_error{0};

  bool consistent_with(double reference, double sigmas = 3.0) const {
    return std::abs(value - reference) <= sigmas * std_error;
  }
};

/// Moment estimates for one output mode of a sampled protocol run.
struct OutputMoments {
  MCEstimate mean_x;
  MCEstimate mean_y;
  MCEstimate var_x;
  MCEstimate var_y;
  /// Fidelity against the coherent input, evaluated on the estimated
  /// moments with a first-order (delta method) error bar.
  MCEstimate fidelity;
};

struct ShotSimulation {
  std::uint64_t shots{0};
  std::uint64_t seed{0};
  /// Same order as ProtocolOutputs::outputs: kept output first.
  std::vector<OutputMoments> outputs;
};

struct SnrSimulation {
  std::uint64_t shots{0};
  std::uint64_t seed{0};
  /// Regression-based signal-to-noise estimates for homodyne readout of
  /// the channel mode, including one unit of detector vacuum.
  MCEstimate snr_x;
  MCEstimate snr_y;
  /// Fitted channel amplitude gains (diagnostics).
  MCEstimate gain_x;
  MCEstimate gain_y;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Engine for one (seed, substream) pair. Substreams are decorrelated by
/// hashing, so chunk k's draws never depend on how work was scheduled.
inline std::mt19937_64 substream_engine(std::uint64_t seed,
                                        std::uint64_t stream) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(stream)));
}

inline void validate_mc_config(const MCConfig& config) {
  if (config.shots < 2) {
    throw std::domain_error("shot count must be at least 2");
  }
  if (config.chunk_shots < 2) {
    throw std::domain_error("chunk size must be at least 2");
  }
}

/// Runs body(chunk_index) for every chunk on a small worker pool. The
/// first worker exception (if any) is rethrown on the calling thread.
inline void run_chunks(std::uint64_t chunk_count, unsigned thread_count,
                       const std::function<void(std::uint64_t)>& body) {
  if (thread_count == 0) {
    thread_count = std::max(1u, std::thread::hardware_concurrency());
  }
  if (static_cast<std::uint64_t>(thread_count) > chunk_count) {
    thread_count = static_cast<unsigned>(chunk_count);
  }
  if (thread_count <= 1) {
    for (std::uint64_t c = 0; c < chunk_count; ++c) body(c);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    for (;;) {
      const std::uint64_t c = next.fetch_add(1);
      if (c >= chunk_count) return;
      try {
        body(c);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(thread_count);
  for (unsigned t = 0; t < thread_count; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Per-shot protocol arithmetic on plain doubles. Draw order is fixed by
/// construction parameters only, never by scheduling.
class ShotPipeline {
 public:
  explicit ShotPipeline(const ProtocolParams<double>& params)
      : params_(params),
        gain_(resolve_gain(params)),
        root_t_(std::sqrt(1.0 - params.reflectivity)),
        root_r_(std::sqrt(params.reflectivity)),
        squeeze_down_(std::exp(-params.squeezing)),
        squeeze_up_(std::exp(params.squeezing)),
        lossy_(params.transmission < 1.0),
        loss_mix_(std::sqrt(1.0 - params.transmission * params.transmission)),
        clone_count_(params.clone_count.value_or(0)) {}

  int output_count() const {
    return clone_count_ ? clone_count_ : 2;
  }

  /// One shot: fills xs/ys (size output_count()) with sampled output
  /// quadratures and reports the drawn input and channel quadratures for
  /// estimators that need them.
  void sample(std::mt19937_64& rng, std::normal_distribution<double>& normal,
              double* xs, double* ys, double input_sigma_x = 1.0,
              double input_sigma_y = 1.0, double* input_out = nullptr,
              double* channel_out = nullptr) {
    const double inv_root2 = 1.0 / std::sqrt(2.0);

    const double x_in =
        params_.input_mean[0] + input_sigma_x * normal(rng);
    const double y_in =
        params_.input_mean[1] + input_sigma_y * normal(rng);

    // EPR pair from its squeezed joint quadratures: (x1 - x2)/sqrt(2) and
    // (y1 + y2)/sqrt(2) are squeezed to e^{-2r} in variance, the conjugate
    // combinations anti-squeezed to e^{+2r}.
    const double x_minus = squeeze_down_ * normal(rng);
    const double x_plus = squeeze_up_ * normal(rng);
    const double y_plus = squeeze_down_ * normal(rng);
    const double y_minus = squeeze_up_ * normal(rng);
    const double x_e1 = (x_plus + x_minus) * inv_root2;
    const double x_e2 = (x_plus - x_minus) * inv_root2;
    const double y_e1 = (y_plus + y_minus) * inv_root2;
    const double y_e2 = (y_plus - y_minus) * inv_root2;

    const double x_v = normal(rng);
    const double y_v = normal(rng);

    // Sender splitter on (input, empty port).
    const double x_t = root_t_ * x_in + root_r_ * x_v;
    const double y_t = root_t_ * y_in + root_r_ * y_v;
    const double x_r = root_r_ * x_in - root_t_ * x_v;
    const double y_r = root_r_ * y_in - root_t_ * y_v;

    // Joint measurement of the reflected port with EPR half 1, then
    // feedforward onto the carrier.
    const double x_u = (x_r - x_e1) * inv_root2;
    const double y_w = (y_r + y_e1) * inv_root2;
    double x_d = x_t + gain_ * x_u;
    double y_d = y_t + gain_ * y_w;

    if (lossy_) {
      const double x_fresh = normal(rng);
      const double y_fresh = normal(rng);
      x_d = params_.transmission * x_d + loss_mix_ * x_fresh;
      y_d = params_.transmission * y_d + loss_mix_ * y_fresh;
    }

    if (input_out) {
      input_out[0] = x_in;
      input_out[1] = y_in;
    }
    if (channel_out) {
      channel_out[0] = x_d;
      channel_out[1] = y_d;
    }

    // Receiver splitter on (channel, EPR half 2).
    xs[0] = root_t_ * x_d + root_r_ * x_e2;
    ys[0] = root_t_ * y_d + root_r_ * y_e2;
    double x_rem = root_r_ * x_d - root_t_ * x_e2;
    double y_rem = root_r_ * y_d - root_t_ * y_e2;

    if (clone_count_ == 0) {
      xs[1] = x_rem;
      ys[1] = y_rem;
      return;
    }
    // Balanced split of the remainder into clone_count_ - 1 clones, with
    // the cascade remainder negated each step to keep signs uniform.
    const int splits = clone_count_ - 2;
    for (int j = 0; j < splits; ++j) {
      const double share = 1.0 / static_cast<double>(clone_count_ - 1 - j);
      const double keep = std::sqrt(1.0 - share);
      const double take = std::sqrt(share);
      const double x_a = normal(rng);
      const double y_a = normal(rng);
      xs[j + 1] = keep * x_a + take * x_rem;
      ys[j + 1] = keep * y_a + take * y_rem;
      const double x_next = keep * x_rem - take * x_a;
      const double y_next = keep * y_rem - take * y_a;
      x_rem = x_next;
      y_rem = y_next;
    }
    xs[clone_count_ - 1] = x_rem;
    ys[clone_count_ - 1] = y_rem;
  }

 private:
  ProtocolParams<double> params_;
  double gain_;
  double root_t_;
  double root_r_;
  double squeeze_down_;
  double squeeze_up_;
  bool lossy_;
  double loss_mix_;
  int clone_count_;
};

struct MomentSums {
  double n{0};
  double sum_x{0};
  double sum_y{0};
  double sum_xx{0};
  double sum_yy{0};

  void add(double x, double y) {
    n += 1;
    sum_x += x;
    sum_y += y;
    sum_xx += x * x;
    sum_yy += y * y;
  }
  void merge(const MomentSums& other) {
    n += other.n;
    sum_x += other.sum_x;
    sum_y += other.sum_y;
    sum_xx += other.sum_xx;
    sum_yy += other.sum_yy;
  }
};

struct RegressionSums {
  double n{0};
  double sum_s{0};
  double sum_m{0};
  double sum_ss{0};
  double sum_mm{0};
  double sum_sm{0};

  void add(double s, double m) {
    n += 1;
    sum_s += s;
    sum_m += m;
    sum_ss += s * s;
    sum_mm += m * m;
    sum_sm += s * m;
  }
  void merge(const RegressionSums& other) {
    n += other.n;
    sum_s += other.sum_s;
    sum_m += other.sum_m;
    sum_ss += other.sum_ss;
    sum_mm += other.sum_mm;
    sum_sm += other.sum_sm;
  }

  /// Slope, signal variance and residual variance of m regressed on s.
  void fit(double& slope, double& signal_var, double& residual_var) const {
    const double css = sum_ss - sum_s * sum_s / n;
    const double cmm = sum_mm - sum_m * sum_m / n;
    const double csm = sum_sm - sum_s * sum_m / n;
    slope = csm / css;
    signal_var = css / (n - 1);
    residual_var = (cmm - slope * csm) / (n - 1);
  }
};

}  // namespace detail

/// Draws joint samples of all basis quadratures of a Gaussian state.
/// Factorizes the covariance once (symmetric eigendecomposition, with tiny
/// negative eigenvalues clamped to zero) and then maps standard normals.
class GaussianSampler {
 public:
  GaussianSampler(Eigen::VectorXd mean_vector, const Eigen::MatrixXd& cov)
      : mean_(std::move(mean_vector)) {
    if (cov.rows() != cov.cols() || cov.rows() != mean_.size()) {
      throw std::invalid_argument(
          "covariance and mean dimensions disagree");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    Eigen::VectorXd values = solver.eigenvalues();
    const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < values.size(); ++i) {
      if (values[i] < -algebraic_tolerance * scale) {
        throw std::invalid_argument(
            "covariance is not positive semidefinite");
      }
      if (values[i] < 0) values[i] = 0;
    }
    factor_ = solver.eigenvectors() * values.cwiseSqrt().asDiagonal();
  }

  Eigen::Index dimension() const { return mean_.size(); }

  template <typename Rng>
  Eigen::VectorXd operator()(Rng& rng) const {
    std::normal_distribution<double> normal;
    Eigen::VectorXd z(mean_.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal(rng);
    return mean_ + factor_ * z;
  }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd factor_;  // cov = factor factor^T
};

/// One joint draw of every basis quadrature of `state`, ordered
/// (X1, Y1, ..., XN, YN). Convenience wrapper; hold a GaussianSampler
/// directly when sampling in a loop.
template <typename Rng>
Eigen::VectorXd sample_basis(const BasisState<double>& state, Rng& rng) {
  GaussianSampler sampler(state.mean, state.cov);
  return sampler(rng);
}

/// Samples the full protocol shot-by-shot and estimates per-output means,
/// variances and coherent-input fidelities with standard errors. Chunked
/// substreams make the result a pure function of (params, config).
inline ShotSimulation simulate_protocol_shots(
    const ProtocolParams<double>& raw, const MCConfig& config) {
  detail::validate_mc_config(config);
  const ProtocolParams<double> params = detail::validate_params(raw);
  detail::ShotPipeline prototype(params);
  const int outputs = prototype.output_count();

  const std::uint64_t chunk_count =
      (config.shots + config.chunk_shots - 1) / config.chunk_shots;
  std::vector<std::vector<detail::MomentSums>> partials(
      chunk_count, std::vector<detail::MomentSums>(
                       static_cast<std::size_t>(outputs)));

  detail::run_chunks(
      chunk_count, config.thread_count, [&](std::uint64_t c) {
        detail::ShotPipeline pipeline(params);
        auto rng = detail::substream_engine(config.seed, c);
        std::normal_distribution<double> normal;
        std::vector<double> xs(static_cast<std::size_t>(outputs));
        std::vector<double> ys(static_cast<std::size_t>(outputs));
        const std::uint64_t begin = c * config.chunk_shots;
        const std::uint64_t end =
            std::min(config.shots, begin + config.chunk_shots);
        auto& sums = partials[c];
        for (std::uint64_t s = begin; s < end; ++s) {
          pipeline.sample(rng, normal, xs.data(), ys.data());
          for (int k = 0; k < outputs; ++k) {
            sums[static_cast<std::size_t>(k)].add(
                xs[static_cast<std::size_t>(k)],
                ys[static_cast<std::size_t>(k)]);
          }
        }
      });

  ShotSimulation result;
  result.shots = config.shots;
  result.seed = config.seed;
  result.outputs.resize(static_cast<std::size_t>(outputs));
  for (int k = 0; k < outputs; ++k) {
    detail::MomentSums total;
    for (std::uint64_t c = 0; c < chunk_count; ++c) {
      total.merge(partials[c][static_cast<std::size_t>(k)]);
    }
    const double n = total.n;
    const double mean_x = total.sum_x / n;
    const double mean_y = total.sum_y / n;
    const double var_x =
        (total.sum_xx - n * mean_x * mean_x) / (n - 1);
    const double var_y =
        (total.sum_yy - n * mean_y * mean_y) / (n - 1);

    OutputMoments& out = result.outputs[static_cast<std::size_t>(k)];
    out.mean_x = {mean_x, std::sqrt(var_x / n)};
    out.mean_y = {mean_y, std::sqrt(var_y / n)};
    const double var_rel_err = std::sqrt(2.0 / (n - 1));
    out.var_x = {var_x, var_x * var_rel_err};
    out.var_y = {var_y, var_y * var_rel_err};

    // Fidelity from estimated moments, with a delta-method error bar.
    // Mean and variance estimates are uncorrelated for Gaussian samples,
    // and X/Y draws of one output are uncorrelated in this circuit.
    const double tx = params.input_mean[0];
    const double ty = params.input_mean[1];
    const double fid =
        fidelity_from_moments(mean_x, mean_y, var_x, var_y, tx, ty);
    const double sx = 1.0 + var_x;
    const double sy = 1.0 + var_y;
    const double dx = mean_x - tx;
    const double dy = mean_y - ty;
    const double d_vx = fid * (-0.5 / sx + dx * dx / (2.0 * sx * sx));
    const double d_vy = fid * (-0.5 / sy + dy * dy / (2.0 * sy * sy));
    const double d_mx = fid * (-dx / sx);
    const double d_my = fid * (-dy / sy);
    const double fid_var = d_vx * d_vx * out.var_x.std_error *
                               out.var_x.std_error +
                           d_vy * d_vy * out.var_y.std_error *
                               out.var_y.std_error +
                           d_mx * d_mx * var_x / n + d_my * d_my * var_y / n;
    out.fidelity = {fid, std::sqrt(fid_var)};
  }
  return result;
}

/// Regression-based signal-to-noise estimate for homodyne readout of the
/// channel mode. The input beam is drawn with quadrature variances
/// `input_variance`; the detector adds one unit of vacuum per quadrature.
/// Slope and residual variance of measured-vs-input give
/// SNR = slope^2 Var(input) / Var(residual); the error bar comes from the
/// scatter of independent chunk estimates.
inline SnrSimulation estimate_channel_snr(
    const ProtocolParams<double>& raw,
    const Eigen::Vector2d& input_variance, const MCConfig& config) {
  detail::validate_mc_config(config);
  if (!(input_variance[0] > 0 && input_variance[1] > 0)) {
    throw std::domain_error("input variances must be positive");
  }
  const ProtocolParams<double> params = detail::validate_params(raw);

  // Scatter-based errors need a healthy number of chunks.
  std::uint64_t chunk_shots = config.chunk_shots;
  if (config.shots / chunk_shots < 64 && config.shots >= 128) {
    chunk_shots = config.shots / 64;
  }
  const std::uint64_t chunk_count =
      (config.shots + chunk_shots - 1) / chunk_shots;

  struct ChunkFit {
    detail::RegressionSums x;
    detail::RegressionSums y;
    double snr_x{0};
    double snr_y{0};
  };
  std::vector<ChunkFit> partials(chunk_count);
  const double sigma_x = std::sqrt(input_variance[0]);
  const double sigma_y = std::sqrt(input_variance[1]);

  detail::run_chunks(
      chunk_count, config.thread_count, [&](std::uint64_t c) {
        detail::ShotPipeline pipeline(params);
        auto rng = detail::substream_engine(config.seed, c);
        std::normal_distribution<double> normal;
        std::vector<double> xs(
            static_cast<std::size_t>(pipeline.output_count()));
        std::vector<double> ys(xs.size());
        double input_q[2];
        double channel_q[2];
        const std::uint64_t begin = c * chunk_shots;
        const std::uint64_t end =
            std::min(config.shots, begin + chunk_shots);
        auto& fit = partials[c];
        for (std::uint64_t s = begin; s < end; ++s) {
          pipeline.sample(rng, normal, xs.data(), ys.data(), sigma_x,
                          sigma_y, input_q, channel_q);
          const double meas_x = channel_q[0] + normal(rng);
          const double meas_y = channel_q[1] + normal(rng);
          fit.x.add(input_q[0], meas_x);
          fit.y.add(input_q[1], meas_y);
        }
        double slope, signal, residual;
        fit.x.fit(slope, signal, residual);
        fit.snr_x = slope * slope * signal / residual;
        fit.y.fit(slope, signal, residual);
        fit.snr_y = slope * slope * signal / residual;
      });

  detail::RegressionSums total_x;
  detail::RegressionSums total_y;
  for (const auto& fit : partials) {
    total_x.merge(fit.x);
    total_y.merge(fit.y);
  }

  SnrSimulation result;
  result.shots = config.shots;
  result.seed = config.seed;

  double slope, signal, residual;
  total_x.fit(slope, signal, residual);
  result.snr_x.value = slope * slope * signal / residual;
  result.gain_x.value = slope;
  total_y.fit(slope, signal, residual);
  result.snr_y.value = slope * slope * signal / residual;
  result.gain_y.value = slope;

  if (chunk_count >= 2) {
    double scatter_x = 0;
    double scatter_y = 0;
    double mean_x = 0;
    double mean_y = 0;
    for (const auto& fit : partials) {
      mean_x += fit.snr_x;
      mean_y += fit.snr_y;
    }
    mean_x /= static_cast<double>(chunk_count);
    mean_y /= static_cast<double>(chunk_count);
    for (const auto& fit : partials) {
      scatter_x += (fit.snr_x - mean_x) * (fit.snr_x - mean_x);
      scatter_y += (fit.snr_y - mean_y) * (fit.snr_y - mean_y);
    }
    const double c = static_cast<double>(chunk_count);
    result.snr_x.std_error = std::sqrt(scatter_x / (c - 1) / c);
    result.snr_y.std_error = std::sqrt(scatter_y / (c - 1) / c);
  }
  return result;
}

}  // namespace semiq
