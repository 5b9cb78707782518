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
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "semiq/mode_expr.hpp"

namespace semiq {

/// Descriptions of the Gaussian circuit elements the engine supports.
/// Useful for building element lists (e.g. randomized circuits); the
/// apply_* free functions below do the actual work on ModeExpr values.
template <typename Scalar = double>
struct Beamsplitter {
  Scalar reflectivity{0};
};

template <typename Scalar = double>
struct BellFeedforward {
  Scalar gain{0};
};

template <typename Scalar = double>
struct Loss {
  Scalar transmission{1};  // amplitude transmission coefficient eta
};

struct BalancedSplit {};

template <typename Scalar = double>
using Element = std::variant<Beamsplitter<Scalar>, BellFeedforward<Scalar>,
                             Loss<Scalar>, BalancedSplit>;

template <typename Scalar>
std::string element_name(const Element<Scalar>& element) {
  return std::visit(
      [](const auto& e) -> std::string {
        using E = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<E, Beamsplitter<Scalar>>) {
          return "beamsplitter";
        } else if constexpr (std::is_same_v<E, BellFeedforward<Scalar>>) {
          return "bell-feedforward";
        } else if constexpr (std::is_same_v<E, Loss<Scalar>>) {
          return "loss";
        } else {
          return "balanced-split";
        }
      },
      element);
}

template <typename Scalar>
struct BeamsplitterPorts {
  ModeExpr<Scalar> transmitted;
  ModeExpr<Scalar> reflected;
};

/// Beamsplitter with power reflectivity R acting on modes (a, b):
///   transmitted = sqrt(1-R) a + sqrt(R) b
///   reflected   = sqrt(R)   a - sqrt(1-R) b
/// The map is orthogonal, so canonical commutators are preserved for any
/// R in [0, 1].
template <typename Scalar>
BeamsplitterPorts<Scalar> apply_beamsplitter(const ModeExpr<Scalar>& a,
                                             const ModeExpr<Scalar>& b,
                                             Scalar reflectivity) {
  if (!(reflectivity >= Scalar(0) && reflectivity <= Scalar(1))) {
    throw std::domain_error("beamsplitter reflectivity must lie in [0, 1]");
  }
  const Scalar t = std::sqrt(Scalar(1) - reflectivity);
  const Scalar r = std::sqrt(reflectivity);
  return {t * a + r * b, r * a - t * b};
}

/// Feedforward stage of the transfer: the reflected input port and EPR
/// half 1 are combined on a balanced beamsplitter, X is measured on one
/// output and Y on the other,
///   x_u = (x_reflected - x_epr1) / sqrt(2),
///   y_w = (y_reflected + y_epr1) / sqrt(2),
/// and the transmitted port is displaced by gain * (x_u, y_w). In the
/// Heisenberg picture the whole measure-and-displace step collapses to
///
///   out = transmitted + (gain / sqrt(2)) * (reflected - epr1^dagger),
///
/// because measured quadratures commute with everything downstream. The
/// dagger on epr1 is what lets anti-correlated EPR noise cancel.
template <typename Scalar>
ModeExpr<Scalar> apply_bell_feedforward(const ModeExpr<Scalar>& transmitted,
                                        const ModeExpr<Scalar>& reflected,
                                        const ModeExpr<Scalar>& epr1,
                                        Scalar gain) {
  if (!std::isfinite(gain)) {
    throw std::domain_error("feedforward gain must be finite");
  }
  const Scalar scale = gain / std::sqrt(Scalar(2));
  return transmitted + scale * (reflected - epr1.dagger());
}

/// Gain that exactly cancels the reflected-input contribution to the kept
/// port: g = sqrt(2 R / (1 - R)). Defined for R in [0, 1).
template <typename Scalar>
Scalar cancellation_gain(Scalar reflectivity) {
  if (!(reflectivity >= Scalar(0) && reflectivity < Scalar(1))) {
    throw std::domain_error(
        "cancellation gain needs reflectivity in [0, 1)");
  }
  return std::sqrt(Scalar(2) * reflectivity / (Scalar(1) - reflectivity));
}

/// Gain that restores unit signal transmission when the feedforward signal
/// travels through a channel with amplitude transmission eta:
///   g = sqrt(2) (1 - eta (1 - R)) / (eta sqrt(R (1 - R))).
/// Defined for R in (0, 1) and eta in (0, 1]. Reduces to the cancellation
/// gain at eta = 1.
template <typename Scalar>
Scalar loss_compensated_gain(Scalar reflectivity, Scalar transmission) {
  if (!(reflectivity > Scalar(0) && reflectivity < Scalar(1))) {
    throw std::domain_error(
        "loss-compensated gain needs reflectivity in (0, 1)");
  }
  if (!(transmission > Scalar(0) && transmission <= Scalar(1))) {
    throw std::domain_error(
        "loss-compensated gain needs transmission in (0, 1]");
  }
  return std::sqrt(Scalar(2)) *
         (Scalar(1) - transmission * (Scalar(1) - reflectivity)) /
         (transmission *
          std::sqrt(reflectivity * (Scalar(1) - reflectivity)));
}

/// Pure loss with amplitude transmission eta:
///   out = eta * expr + sqrt(1 - eta^2) * fresh.
/// `fresh` must be an untouched vacuum basis mode (identity expression of a
/// vacuum mode, no displacement) that `expr` does not already involve;
/// reuse of an ancilla would silently break commutators, so it is rejected.
template <typename Scalar>
ModeExpr<Scalar> apply_loss(const ModeExpr<Scalar>& expr, Scalar transmission,
                            const ModeExpr<Scalar>& fresh) {
  if (!(transmission >= Scalar(0) && transmission <= Scalar(1))) {
    throw std::domain_error("loss transmission must lie in [0, 1]");
  }
  if (expr.registry() != fresh.registry()) {
    throw std::invalid_argument(
        "loss target and fresh ancilla use different bases");
  }
  const auto& registry = expr.registry();

  // Identify the ancilla mode: fresh must be exactly one identity block.
  Eigen::Index fresh_mode = -1;
  for (Eigen::Index m = 0; m < registry->mode_count(); ++m) {
    const Eigen::Matrix<Scalar, 2, 2> block =
        fresh.coeffs().template block<2, 2>(0, 2 * m);
    if (block.cwiseAbs().maxCoeff() == Scalar(0)) continue;
    if (fresh_mode >= 0 ||
        !block.isApprox(Eigen::Matrix<Scalar, 2, 2>::Identity())) {
      throw std::invalid_argument(
          "loss ancilla must be a single untouched basis mode");
    }
    fresh_mode = m;
  }
  if (fresh_mode < 0 ||
      fresh.displacement().cwiseAbs().maxCoeff() != Scalar(0)) {
    throw std::invalid_argument(
        "loss ancilla must be a single untouched basis mode");
  }
  if (!registry->mode(fresh_mode).is_vacuum()) {
    throw std::invalid_argument("loss ancilla must be a vacuum mode");
  }
  if (expr.coeffs()
          .template block<2, 2>(0, 2 * fresh_mode)
          .cwiseAbs()
          .maxCoeff() != Scalar(0)) {
    throw std::invalid_argument(
        "loss ancilla is already consumed by the target expression");
  }

  const Scalar mix = std::sqrt(Scalar(1) - transmission * transmission);
  return transmission * expr + mix * fresh;
}

/// Splits `input` into ancillas.size() + 1 balanced copies using a cascade
/// of beamsplitters with reflectivity 1 / (remaining outputs). Every output
/// carries the input with amplitude +1 / sqrt(N_out); the cascade remainder
/// is negated after each step so the sign stays uniform. Each ancilla must
/// be a distinct fresh mode (they enter with orthogonal vacuum patterns via
/// the beamsplitter, which keeps the output family canonical).
template <typename Scalar>
std::vector<ModeExpr<Scalar>> apply_balanced_split(
    const ModeExpr<Scalar>& input,
    const std::vector<ModeExpr<Scalar>>& ancillas) {
  const std::size_t outputs = ancillas.size() + 1;
  std::vector<ModeExpr<Scalar>> result;
  result.reserve(outputs);
  ModeExpr<Scalar> remainder = input;
  for (std::size_t j = 0; j < ancillas.size(); ++j) {
    const Scalar share =
        Scalar(1) / static_cast<Scalar>(outputs - j);
    auto ports = apply_beamsplitter(ancillas[j], remainder, share);
    result.push_back(std::move(ports.transmitted));
    remainder = -ports.reflected;
  }
  result.push_back(std::move(remainder));
  return result;
}

}  // namespace semiq
