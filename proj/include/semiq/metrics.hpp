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

#include <cmath>
#include <stdexcept>
#include <vector>

#include "semiq/protocol.hpp"

namespace semiq {

template <typename Scalar = double>
struct FidelityReport {
  Scalar fidelity{0};
  /// Output quadrature variances (vacuum = 1).
  Scalar var_x{0};
  Scalar var_y{0};
  /// Output mean and the coherent target it is compared against.
  Eigen::Matrix<Scalar, 2, 1> mean{Scalar(0), Scalar(0)};
  Eigen::Matrix<Scalar, 2, 1> target{Scalar(0), Scalar(0)};
};

/// Fidelity between a Gaussian mode with the given quadrature moments and
/// the coherent state centered at (target_x, target_y) with vacuum-level
/// variances. For X/Y-uncorrelated modes the Gaussian overlap factorizes
/// per quadrature:
///
///   F = 2 / sqrt((1 + Vx)(1 + Vy))
///       * exp(-dx^2 / (2 (1 + Vx)) - dy^2 / (2 (1 + Vy)))
///
/// with (dx, dy) the mean mismatch. The prefactor is the usual
/// 2 / sqrt(det(S1 + S2)) overlap normalization for single-mode states
/// with our variance convention.
template <typename Scalar>
Scalar fidelity_from_moments(Scalar mean_x, Scalar mean_y, Scalar var_x,
                             Scalar var_y, Scalar target_x, Scalar target_y) {
  if (!(var_x > Scalar(-1) && var_y > Scalar(-1))) {
    throw std::domain_error("variances must exceed -1 for a valid overlap");
  }
  const Scalar dx = mean_x - target_x;
  const Scalar dy = mean_y - target_y;
  const Scalar sx = Scalar(1) + var_x;
  const Scalar sy = Scalar(1) + var_y;
  return Scalar(2) / std::sqrt(sx * sy) *
         std::exp(-dx * dx / (Scalar(2) * sx) -
                  dy * dy / (Scalar(2) * sy));
}

/// Fidelity of a Gaussian output mode against the coherent state with mean
/// `target_mean`, evaluated on the mode's exact Heisenberg-picture moments.
template <typename Scalar>
FidelityReport<Scalar> fidelity_coherent(
    const ModeExpr<Scalar>& expr, const BasisState<Scalar>& state,
    const Eigen::Matrix<Scalar, 2, 1>& target_mean) {
  FidelityReport<Scalar> report;
  const auto var = variance(expr, state);
  report.var_x = var[0];
  report.var_y = var[1];
  report.mean = mean(expr, state);
  report.target = target_mean;
  report.fidelity =
      fidelity_from_moments(report.mean[0], report.mean[1], report.var_x,
                            report.var_y, target_mean[0], target_mean[1]);
  return report;
}

/// Best average fidelity any classical (measure-and-resend) strategy can
/// reach for the partial transfer at reflectivity R: F = 1 / (1 + R).
/// At R = 1 this is the familiar 1/2 benchmark of fully disembodied
/// transmission; at R = 0 nothing leaves the carrier and F = 1.
template <typename Scalar>
Scalar fidelity_bound_transfer(Scalar reflectivity) {
  if (!(reflectivity >= Scalar(0) && reflectivity <= Scalar(1))) {
    throw std::domain_error(
        "classical transfer bound needs reflectivity in [0, 1]");
  }
  return Scalar(1) / (Scalar(1) + reflectivity);
}

/// Benchmark fidelity of conventional unity-gain teleportation over the
/// same EPR resource: F = 1 / (1 + e^{-2r}). Approaches 1/2 with no
/// squeezing and 1 in the infinite-squeezing limit.
template <typename Scalar>
Scalar teleport_limit_fidelity(Scalar squeezing) {
  if (!(squeezing >= Scalar(0))) {
    throw std::domain_error("squeezing factor must be >= 0");
  }
  return Scalar(1) / (Scalar(1) + std::exp(Scalar(-2) * squeezing));
}

template <typename Scalar = double>
struct CloneFidelities {
  int clone_count{0};
  /// Fidelity of the kept output, M / (M + (M-1) e^{-2r}).
  Scalar kept_fidelity{0};
  /// Fidelity of each of the M - 1 balanced clones.
  Scalar clone_fidelity{0};
  /// Optimal symmetric 1 -> M Gaussian cloning fidelity, M / (2M - 1).
  Scalar optimal_bound{0};
};

/// Closed-form fidelities for the 1 -> M cloning configuration
/// (reflectivity (M-1)/M, cancellation gain, lossless channel). At r = 0
/// the kept output and all clones coincide at the optimal symmetric bound
/// M / (2M - 1); squeezing trades clone quality for kept-output quality.
template <typename Scalar>
CloneFidelities<Scalar> clone_fidelities(int clone_count, Scalar squeezing) {
  if (clone_count < 2) {
    throw std::domain_error("clone count must be at least 2");
  }
  if (!(squeezing >= Scalar(0))) {
    throw std::domain_error("squeezing factor must be >= 0");
  }
  const Scalar m = static_cast<Scalar>(clone_count);
  const Scalar down = std::exp(Scalar(-2) * squeezing);
  const Scalar up = std::exp(Scalar(2) * squeezing);

  CloneFidelities<Scalar> result;
  result.clone_count = clone_count;
  result.kept_fidelity = m / (m + (m - Scalar(1)) * down);
  // Each clone carries the input at unit amplitude plus EPR and split
  // noise; 1 + Var works out to the bracket below (see the variance
  // identity exercised in the unit tests).
  const Scalar bracket = Scalar(2) + up * m / (Scalar(2) * (m - Scalar(1))) +
                         down * (m - Scalar(2)) * (m - Scalar(2)) /
                             (Scalar(2) * m * (m - Scalar(1))) +
                         (m - Scalar(2)) / (m - Scalar(1));
  result.clone_fidelity = Scalar(2) / bracket;
  result.optimal_bound = m / (Scalar(2) * m - Scalar(1));
  return result;
}

/// Fidelity reports for every output of a protocol run, each against the
/// coherent input as target.
template <typename Scalar>
std::vector<FidelityReport<Scalar>> output_fidelities(
    const ProtocolOutputs<Scalar>& proto) {
  std::vector<FidelityReport<Scalar>> reports;
  reports.reserve(proto.outputs.size());
  for (const auto& out : proto.outputs) {
    reports.push_back(
        fidelity_coherent(out, proto.state, proto.params.input_mean));
  }
  return reports;
}

template <typename Scalar = double>
struct SnrReport {
  /// Signal-to-noise ratios of homodyne readout on the channel mode.
  Scalar snr_x{0};
  Scalar snr_y{0};
  /// Amplitude gain of the channel on the input quadratures.
  Scalar signal_gain_x{0};
  Scalar signal_gain_y{0};
  /// Channel-added noise variance (everything except the input beam and
  /// the unit detection vacuum).
  Scalar noise_var_x{0};
  Scalar noise_var_y{0};
  /// Total non-signal noise referred back to the input plane,
  /// (noise + 1) / gain^2.
  Scalar noise_referred_x{0};
  Scalar noise_referred_y{0};
  /// Commonly quoted closed form V / (cosh 2r + (1 - cosh 2r)/(1 - R)).
  /// Its denominator is only positive near r = 0 or R = 0; outside that
  /// regime the value is reported for comparison, not trusted.
  Scalar reference_formula_value{0};
  bool reference_valid{false};
};

/// Signal-to-noise ratio of homodyne detection on the channel mode. The
/// input beam carries quadrature variances `input_variance` (modulation
/// plus its own quantum noise); the detector contributes one unit of
/// vacuum. First-principles definition:
///
///   SNR_x = gain_x^2 Vx / (channel-added noise on X + 1)
///
/// and likewise for Y. For the lossless cancellation-gain channel this
/// reduces to V / (1 + R (cosh 2r - 1)).
template <typename Scalar>
SnrReport<Scalar> channel_snr(
    const ProtocolParams<Scalar>& params,
    const Eigen::Matrix<Scalar, 2, 1>& input_variance) {
  if (!(input_variance[0] > Scalar(0) && input_variance[1] > Scalar(0))) {
    throw std::domain_error("input variances must be positive");
  }
  const auto proto = build_transfer(params);
  const ModeExpr<Scalar>& channel = *proto.channel;

  const Eigen::Matrix<Scalar, 2, 2> block =
      channel.mode_block(mode_ids::input);
  const auto var = variance(channel, proto.state);

  SnrReport<Scalar> report;
  report.signal_gain_x = block(0, 0);
  report.signal_gain_y = block(1, 1);
  // The input mode is uncorrelated with every other basis mode and has
  // unit variances in the basis state, so its contribution separates.
  report.noise_var_x =
      var[0] - report.signal_gain_x * report.signal_gain_x;
  report.noise_var_y =
      var[1] - report.signal_gain_y * report.signal_gain_y;

  const Scalar gx2 = report.signal_gain_x * report.signal_gain_x;
  const Scalar gy2 = report.signal_gain_y * report.signal_gain_y;
  report.snr_x = gx2 * input_variance[0] / (report.noise_var_x + Scalar(1));
  report.snr_y = gy2 * input_variance[1] / (report.noise_var_y + Scalar(1));
  report.noise_referred_x = (report.noise_var_x + Scalar(1)) / gx2;
  report.noise_referred_y = (report.noise_var_y + Scalar(1)) / gy2;

  const Scalar cosh2r = std::cosh(Scalar(2) * proto.params.squeezing);
  const Scalar denom =
      cosh2r + (Scalar(1) - cosh2r) / (Scalar(1) - proto.params.reflectivity);
  report.reference_valid = denom > Scalar(0);
  report.reference_formula_value = input_variance[0] / denom;
  return report;
}

}  // namespace semiq
