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
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "semiq/elements.hpp"

namespace semiq {

/// How the feedforward gain is chosen.
///  - Cancellation: g = sqrt(2R/(1-R)); removes the empty-port vacuum from
///    the kept output in a lossless channel.
///  - LossCompensated: g = sqrt(2)(1 - eta(1-R))/(eta sqrt(R(1-R)));
///    restores unit signal transmission through a lossy channel.
///  - Manual: use ProtocolParams::manual_gain as given (gain-mismatch and
///    zero-feedforward studies).
enum class GainPolicy { Cancellation, LossCompensated, Manual };

template <typename Scalar = double>
struct ProtocolParams {
  /// Power reflectivity R in [0, 1) of the input (and receiver) splitter.
  Scalar reflectivity{Scalar(0.5)};
  /// EPR squeezing factor r >= 0 of the shared resource pair.
  Scalar squeezing{0};
  /// Amplitude transmission eta in (0, 1] of the channel; 1 = lossless.
  Scalar transmission{1};
  GainPolicy gain_policy{GainPolicy::Cancellation};
  Scalar manual_gain{0};
  /// When set (M >= 2), run 1 -> M cloning: reflectivity is derived as
  /// (M-1)/M and the non-kept port is split into M - 1 balanced clones.
  std::optional<int> clone_count{};
  /// Coherent amplitude of the input mode, as a quadrature mean (x, y).
  Eigen::Matrix<Scalar, 2, 1> input_mean{Scalar(0), Scalar(0)};
};

/// Well-known basis mode ids used by build_transfer. Exposed so tests and
/// the sampling oracle can address modes without duplicating strings.
namespace mode_ids {
inline constexpr const char* input = "a_in";
inline constexpr const char* input_vacuum = "v1";
inline constexpr const char* epr_half_1 = "epr1";
inline constexpr const char* epr_half_2 = "epr2";
inline constexpr const char* channel_loss = "v_c";
inline std::string split_ancilla(int k) {
  return "v_b" + std::to_string(k + 1);
}
}  // namespace mode_ids

template <typename Scalar = double>
struct ProtocolOutputs {
  BasisRegistryPtr<Scalar> registry;
  BasisState<Scalar> state;
  /// Input parameters with derived fields resolved (reflectivity for
  /// cloning runs).
  ProtocolParams<Scalar> params;
  /// Feedforward gain actually applied.
  Scalar gain{0};
  /// Kept output first, then the second port (transfer) or the balanced
  /// clones (cloning).
  std::vector<ModeExpr<Scalar>> outputs;
  /// Displaced mode entering the receiver splitter (absent for the
  /// teleportation reference, which has no partial carrier).
  std::optional<ModeExpr<Scalar>> channel;

  const ModeExpr<Scalar>& out1() const { return outputs.at(0); }
  const ModeExpr<Scalar>& out2() const { return outputs.at(1); }
};

template <typename Scalar>
Scalar resolve_gain(const ProtocolParams<Scalar>& params) {
  switch (params.gain_policy) {
    case GainPolicy::Cancellation:
      return cancellation_gain(params.reflectivity);
    case GainPolicy::LossCompensated:
      return loss_compensated_gain(params.reflectivity, params.transmission);
    case GainPolicy::Manual:
      if (!std::isfinite(params.manual_gain)) {
        throw std::domain_error("manual feedforward gain must be finite");
      }
      return params.manual_gain;
  }
  throw std::logic_error("unknown gain policy");
}

namespace detail {

template <typename Scalar>
ProtocolParams<Scalar> validate_params(ProtocolParams<Scalar> params) {
  if (params.clone_count) {
    if (*params.clone_count < 2) {
      throw std::domain_error("clone count must be at least 2");
    }
    const Scalar m = static_cast<Scalar>(*params.clone_count);
    params.reflectivity = (m - Scalar(1)) / m;
  }
  if (!(params.reflectivity >= Scalar(0) && params.reflectivity < Scalar(1))) {
    throw std::domain_error("reflectivity must lie in [0, 1)");
  }
  if (!(params.squeezing >= Scalar(0))) {
    throw std::domain_error("squeezing factor must be >= 0");
  }
  if (!(params.transmission > Scalar(0) &&
        params.transmission <= Scalar(1))) {
    throw std::domain_error("channel transmission must lie in (0, 1]");
  }
  if (!params.input_mean.allFinite()) {
    throw std::domain_error("input mean must be finite");
  }
  return params;
}

template <typename Scalar>
std::vector<BasisMode<Scalar>> protocol_modes(
    const ProtocolParams<Scalar>& params) {
  std::vector<BasisMode<Scalar>> modes;
  modes.push_back(coherent_mode<Scalar>(
      mode_ids::input, params.input_mean[0], params.input_mean[1]));
  modes.push_back(vacuum_mode<Scalar>(mode_ids::input_vacuum));
  auto [epr1, epr2] = epr_modes<Scalar>(mode_ids::epr_half_1,
                                        mode_ids::epr_half_2, "epr",
                                        params.squeezing);
  modes.push_back(std::move(epr1));
  modes.push_back(std::move(epr2));
  if (params.transmission < Scalar(1)) {
    modes.push_back(vacuum_mode<Scalar>(mode_ids::channel_loss));
  }
  if (params.clone_count) {
    for (int k = 0; k < *params.clone_count - 2; ++k) {
      modes.push_back(vacuum_mode<Scalar>(mode_ids::split_ancilla(k)));
    }
  }
  return modes;
}

}  // namespace detail

/// Builds the partial-transfer circuit in the Heisenberg picture.
///
/// Stages (all linear, so outputs are exact symbolic forms):
///  1. The coherent input meets an empty port on a splitter with power
///     reflectivity R; the transmitted part is the carrier that physically
///     travels, the reflected part feeds the measurement.
///  2. The reflected part is jointly measured with EPR half 1 (balanced
///     mixing, X on one port, Y on the other) and the outcome displaces
///     the carrier with the resolved gain. The displaced carrier is the
///     channel mode.
///  3. The channel crosses a loss stage with amplitude transmission eta
///     (skipped when eta = 1).
///  4. At the receiver the channel meets EPR half 2 on a second splitter
///     with the same reflectivity; the transmitted port is the kept output
///     out1 and the other port is out2.
///  5. In cloning mode (M >= 2) the second port is instead split into
///     M - 1 balanced clones using M - 2 fresh vacua, so the kept output
///     plus the clones form M outputs that are symmetric copies at r = 0.
template <typename Scalar>
ProtocolOutputs<Scalar> build_transfer(const ProtocolParams<Scalar>& raw) {
  ProtocolParams<Scalar> params = detail::validate_params(raw);

  auto [registry, state] = make_registry(detail::protocol_modes(params));
  const Scalar gain = resolve_gain(params);
  const Scalar reflectivity = params.reflectivity;

  const auto input = ModeExpr<Scalar>::identity(registry, mode_ids::input);
  const auto empty_port =
      ModeExpr<Scalar>::identity(registry, mode_ids::input_vacuum);
  const auto epr1 =
      ModeExpr<Scalar>::identity(registry, mode_ids::epr_half_1);
  const auto epr2 =
      ModeExpr<Scalar>::identity(registry, mode_ids::epr_half_2);

  auto sender = apply_beamsplitter(input, empty_port, reflectivity);
  ModeExpr<Scalar> channel = apply_bell_feedforward(
      sender.transmitted, sender.reflected, epr1, gain);
  if (params.transmission < Scalar(1)) {
    const auto fresh =
        ModeExpr<Scalar>::identity(registry, mode_ids::channel_loss);
    channel = apply_loss(channel, params.transmission, fresh);
  }

  auto receiver = apply_beamsplitter(channel, epr2, reflectivity);

  ProtocolOutputs<Scalar> result;
  result.registry = registry;
  result.state = std::move(state);
  result.params = params;
  result.gain = gain;
  result.channel = channel;
  result.outputs.push_back(std::move(receiver.transmitted));
  if (params.clone_count) {
    std::vector<ModeExpr<Scalar>> ancillas;
    ancillas.reserve(static_cast<std::size_t>(*params.clone_count - 2));
    for (int k = 0; k < *params.clone_count - 2; ++k) {
      ancillas.push_back(ModeExpr<Scalar>::identity(
          registry, mode_ids::split_ancilla(k)));
    }
    auto clones = apply_balanced_split(receiver.reflected, ancillas);
    for (auto& clone : clones) {
      result.outputs.push_back(std::move(clone));
    }
  } else {
    result.outputs.push_back(std::move(receiver.reflected));
  }
  return result;
}

/// Fully disembodied reference: conventional continuous-variable
/// teleportation of the same input over the same EPR resource at unity
/// gain. The output equals input - epr1^dagger + epr2, whose excess noise
/// 2 e^{-2r} sets the teleportation benchmark the partial transfer is
/// compared against.
template <typename Scalar>
ProtocolOutputs<Scalar> teleport_limit_outputs(
    const ProtocolParams<Scalar>& raw) {
  ProtocolParams<Scalar> params = detail::validate_params(raw);

  std::vector<BasisMode<Scalar>> modes;
  modes.push_back(coherent_mode<Scalar>(
      mode_ids::input, params.input_mean[0], params.input_mean[1]));
  auto [epr1_mode, epr2_mode] = epr_modes<Scalar>(
      mode_ids::epr_half_1, mode_ids::epr_half_2, "epr", params.squeezing);
  modes.push_back(std::move(epr1_mode));
  modes.push_back(std::move(epr2_mode));
  auto [registry, state] = make_registry(std::move(modes));

  const auto input = ModeExpr<Scalar>::identity(registry, mode_ids::input);
  const auto epr1 =
      ModeExpr<Scalar>::identity(registry, mode_ids::epr_half_1);
  const auto epr2 =
      ModeExpr<Scalar>::identity(registry, mode_ids::epr_half_2);

  // Unity-gain teleportation: the input is Bell-measured against EPR
  // half 1 and EPR half 2 is displaced by sqrt(2) times the outcomes.
  const Scalar unity = std::sqrt(Scalar(2));
  ModeExpr<Scalar> out = apply_bell_feedforward(epr2, input, epr1, unity);

  ProtocolOutputs<Scalar> result;
  result.registry = registry;
  result.state = std::move(state);
  result.params = params;
  result.gain = unity;
  result.outputs.push_back(std::move(out));
  return result;
}

}  // namespace semiq
