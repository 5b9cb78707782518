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

#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

// Quadrature conventions used throughout:
//   a = (X + iY)/2,  [X, Y] = 2i,  vacuum variance <dX^2> = <dY^2> = 1.
// All states are Gaussian and fully described by the mean vector and the
// symmetrized covariance matrix over (X_1, Y_1, ..., X_N, Y_N).

namespace semiq {

/// Tolerance for algebraic identities (commutators, symplectic checks).
inline constexpr double algebraic_tolerance = 1e-9;
/// Tolerance for closed-form scalar comparisons.
inline constexpr double closed_form_tolerance = 1e-12;

template <typename Scalar>
struct CoherentInput {
  Scalar mean_x{0};
  Scalar mean_y{0};
};

struct Vacuum {};

/// One half of a two-mode squeezed vacuum pair. Halves are matched by
/// pair_id and carry index 1 or 2 plus the common squeezing factor r >= 0.
template <typename Scalar>
struct EprHalf {
  std::string pair_id;
  int index{1};
  Scalar squeezing{0};
};

template <typename Scalar = double>
struct BasisMode {
  using Kind = std::variant<CoherentInput<Scalar>, Vacuum, EprHalf<Scalar>>;

  std::string id;
  Kind kind;
  std::string label;

  bool is_vacuum() const { return std::holds_alternative<Vacuum>(kind); }
  bool is_coherent() const {
    return std::holds_alternative<CoherentInput<Scalar>>(kind);
  }
  bool is_epr_half() const {
    return std::holds_alternative<EprHalf<Scalar>>(kind);
  }
};

template <typename Scalar = double>
BasisMode<Scalar> coherent_mode(std::string id, Scalar mean_x, Scalar mean_y,
                                std::string label = {}) {
  if (label.empty()) label = id;
  return {std::move(id), CoherentInput<Scalar>{mean_x, mean_y},
          std::move(label)};
}

template <typename Scalar = double>
BasisMode<Scalar> vacuum_mode(std::string id, std::string label = {}) {
  if (label.empty()) label = id;
  return {std::move(id), Vacuum{}, std::move(label)};
}

/// Builds the two matched halves of an EPR pair with squeezing factor r.
template <typename Scalar = double>
std::pair<BasisMode<Scalar>, BasisMode<Scalar>> epr_modes(
    std::string id1, std::string id2, std::string pair_id, Scalar squeezing) {
  BasisMode<Scalar> first{id1, EprHalf<Scalar>{pair_id, 1, squeezing}, id1};
  BasisMode<Scalar> second{id2, EprHalf<Scalar>{pair_id, 2, squeezing}, id2};
  return {std::move(first), std::move(second)};
}

/// Covariance of a two-mode squeezed vacuum over (X1, Y1, X2, Y2):
///   [[c, 0, s, 0], [0, c, 0, -s], [s, 0, c, 0], [0, -s, 0, c]]
/// with c = cosh 2r, s = sinh 2r. The squeezed joint quadratures obey
/// Var(X1 - X2) = Var(Y1 + Y2) = 2 e^{-2r} and the conjugate combinations
/// are anti-squeezed to 2 e^{+2r}.
template <typename Scalar>
Eigen::Matrix<Scalar, 4, 4> make_epr_covariance(Scalar squeezing) {
  if (!(squeezing >= Scalar(0))) {
    throw std::invalid_argument("EPR squeezing factor must be >= 0");
  }
  const Scalar c = std::cosh(Scalar(2) * squeezing);
  const Scalar s = std::sinh(Scalar(2) * squeezing);
  Eigen::Matrix<Scalar, 4, 4> cov;
  cov << c, 0, s, 0,  //
      0, c, 0, -s,    //
      s, 0, c, 0,     //
      0, -s, 0, c;
  return cov;
}

/// Block-diagonal symplectic form with 2x2 blocks [[0, 1], [-1, 0]], one per
/// mode. Encodes [X, Y] = 2i: quadrature operators q obey [q_j, q_k] =
/// 2i Omega_jk. Antisymmetric with Omega^2 = -I.
template <typename Scalar>
Eigen::MatrixX<Scalar> symplectic_form(Eigen::Index mode_count) {
  Eigen::MatrixX<Scalar> omega =
      Eigen::MatrixX<Scalar>::Zero(2 * mode_count, 2 * mode_count);
  for (Eigen::Index m = 0; m < mode_count; ++m) {
    omega(2 * m, 2 * m + 1) = Scalar(1);
    omega(2 * m + 1, 2 * m) = Scalar(-1);
  }
  return omega;
}

/// Symplectic spectrum of a symmetric covariance matrix, ascending. A state
/// is physical iff every value is >= 1 (vacuum saturates the bound); pure
/// Gaussian states have all values equal to 1.
template <typename Scalar>
Eigen::VectorX<Scalar> symplectic_eigenvalues(
    const Eigen::MatrixX<Scalar>& cov) {
  const Eigen::Index dim = cov.rows();
  if (dim != cov.cols() || dim % 2 != 0) {
    throw std::invalid_argument("covariance must be square with even size");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixX<Scalar>> root_solver(cov);
  Eigen::VectorX<Scalar> clipped = root_solver.eigenvalues();
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (clipped[i] < Scalar(0)) clipped[i] = Scalar(0);
  }
  const Eigen::MatrixX<Scalar> sqrt_cov =
      root_solver.eigenvectors() * clipped.cwiseSqrt().asDiagonal() *
      root_solver.eigenvectors().transpose();
  // K = sqrt(cov) * Omega * sqrt(cov) is antisymmetric with eigenvalues
  // +/- i nu_k; K^T K is symmetric psd with each nu_k^2 twice.
  const Eigen::MatrixX<Scalar> k =
      sqrt_cov * symplectic_form<Scalar>(dim / 2) * sqrt_cov;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixX<Scalar>> pair_solver(
      k.transpose() * k);
  Eigen::VectorX<Scalar> values(dim / 2);
  for (Eigen::Index i = 0; i < dim / 2; ++i) {
    Scalar v = pair_solver.eigenvalues()[2 * i];
    values[i] = std::sqrt(v < Scalar(0) ? Scalar(0) : v);
  }
  return values;
}

/// True when cov is symmetric and its symplectic spectrum sits above the
/// vacuum bound, nu_k >= 1 - tolerance.
template <typename Scalar>
bool is_physical_covariance(const Eigen::MatrixX<Scalar>& cov,
                            double tolerance = algebraic_tolerance) {
  if (cov.rows() != cov.cols() || cov.rows() % 2 != 0) return false;
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > Scalar(tolerance)) {
    return false;
  }
  const auto values = symplectic_eigenvalues(cov);
  return values.size() == 0 ||
         values.minCoeff() >= Scalar(1) - Scalar(tolerance);
}

/// Immutable ordered collection of basis modes. Validates id uniqueness and
/// EPR pairing on construction; afterwards shared read-only.
template <typename Scalar = double>
class BasisRegistry {
 public:
  explicit BasisRegistry(std::vector<BasisMode<Scalar>> modes)
      : modes_(std::move(modes)) {
    std::map<std::string, std::vector<Eigen::Index>> pairs;
    for (Eigen::Index i = 0; i < mode_count(); ++i) {
      const BasisMode<Scalar>& mode = modes_[static_cast<std::size_t>(i)];
      if (mode.id.empty()) {
        throw std::invalid_argument("basis mode id must be non-empty");
      }
      if (!index_.emplace(mode.id, i).second) {
        throw std::invalid_argument("duplicate basis mode id: " + mode.id);
      }
      if (const auto* half = std::get_if<EprHalf<Scalar>>(&mode.kind)) {
        if (!(half->squeezing >= Scalar(0))) {
          throw std::invalid_argument("EPR squeezing must be >= 0 for mode " +
                                      mode.id);
        }
        if (half->index != 1 && half->index != 2) {
          throw std::invalid_argument("EPR half index must be 1 or 2: " +
                                      mode.id);
        }
        pairs[half->pair_id].push_back(i);
      }
    }
    for (const auto& [pair_id, members] : pairs) {
      if (members.size() != 2) {
        throw std::invalid_argument("EPR pair '" + pair_id +
                                    "' must have exactly two halves");
      }
      const auto& a = std::get<EprHalf<Scalar>>(
          modes_[static_cast<std::size_t>(members[0])].kind);
      const auto& b = std::get<EprHalf<Scalar>>(
          modes_[static_cast<std::size_t>(members[1])].kind);
      if (a.index + b.index != 3) {
        throw std::invalid_argument("EPR pair '" + pair_id +
                                    "' needs one half with index 1 and one "
                                    "with index 2");
      }
      if (a.squeezing != b.squeezing) {
        throw std::invalid_argument("EPR pair '" + pair_id +
                                    "' halves disagree on squeezing");
      }
    }
  }

  Eigen::Index mode_count() const {
    return static_cast<Eigen::Index>(modes_.size());
  }
  Eigen::Index quadrature_count() const { return 2 * mode_count(); }

  const BasisMode<Scalar>& mode(Eigen::Index i) const {
    return modes_.at(static_cast<std::size_t>(i));
  }

  const std::vector<BasisMode<Scalar>>& modes() const { return modes_; }

  bool contains(std::string_view id) const {
    return index_.find(std::string(id)) != index_.end();
  }

  Eigen::Index index_of(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) {
      throw std::invalid_argument("unknown basis mode id: " + std::string(id));
    }
    return it->second;
  }

 private:
  std::vector<BasisMode<Scalar>> modes_;
  std::unordered_map<std::string, Eigen::Index> index_;
};

template <typename Scalar = double>
using BasisRegistryPtr = std::shared_ptr<const BasisRegistry<Scalar>>;

/// Gaussian statistics of every basis mode: mean vector of length 2N and a
/// 2N x 2N covariance matrix in quadrature order (X1, Y1, ..., XN, YN).
template <typename Scalar = double>
struct BasisState {
  BasisRegistryPtr<Scalar> registry;
  Eigen::VectorX<Scalar> mean;
  Eigen::MatrixX<Scalar> cov;

  Eigen::Index mode_count() const {
    return registry ? registry->mode_count() : 0;
  }
};

/// Builds the registry plus its block-diagonal initial state: identity
/// covariance for vacuum and coherent modes, the two-mode squeezed block
/// for each EPR pair (scattered correctly even when halves are not
/// adjacent in the ordering).
template <typename Scalar>
std::pair<BasisRegistryPtr<Scalar>, BasisState<Scalar>> make_registry(
    std::vector<BasisMode<Scalar>> modes) {
  auto registry =
      std::make_shared<const BasisRegistry<Scalar>>(std::move(modes));
  const Eigen::Index n = registry->mode_count();

  BasisState<Scalar> state;
  state.registry = registry;
  state.mean = Eigen::VectorX<Scalar>::Zero(2 * n);
  state.cov = Eigen::MatrixX<Scalar>::Identity(2 * n, 2 * n);

  std::map<std::string, std::array<Eigen::Index, 2>> pair_slots;
  for (Eigen::Index i = 0; i < n; ++i) {
    const BasisMode<Scalar>& mode = registry->mode(i);
    if (const auto* coherent = std::get_if<CoherentInput<Scalar>>(&mode.kind)) {
      state.mean[2 * i] = coherent->mean_x;
      state.mean[2 * i + 1] = coherent->mean_y;
    } else if (const auto* half = std::get_if<EprHalf<Scalar>>(&mode.kind)) {
      pair_slots[half->pair_id][static_cast<std::size_t>(half->index - 1)] = i;
    }
  }
  for (const auto& [pair_id, slots] : pair_slots) {
    const auto& half = std::get<EprHalf<Scalar>>(
        registry->mode(slots[0]).kind);
    const Eigen::Matrix<Scalar, 4, 4> block =
        make_epr_covariance(half.squeezing);
    const std::array<Eigen::Index, 2> at = {2 * slots[0], 2 * slots[1]};
    for (int bi = 0; bi < 2; ++bi) {
      for (int bj = 0; bj < 2; ++bj) {
        state.cov.template block<2, 2>(at[static_cast<std::size_t>(bi)],
                                       at[static_cast<std::size_t>(bj)]) =
            block.template block<2, 2>(2 * bi, 2 * bj);
      }
    }
  }

  if (!is_physical_covariance(state.cov)) {
    throw std::logic_error("constructed basis covariance is unphysical");
  }
  return {registry, std::move(state)};
}

}  // namespace semiq
