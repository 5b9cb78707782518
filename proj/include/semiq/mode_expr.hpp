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
#include <complex>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

#include "semiq/basis.hpp"

namespace semiq {

/// A single evolved mode in the Heisenberg picture: a real linear form over
/// the basis quadratures plus a classical displacement,
///
///   X_out = sum_j coeffs(0, j) q_j + disp.x
///   Y_out = sum_j coeffs(1, j) q_j + disp.y
///
/// where q = (X_1, Y_1, ..., X_N, Y_N) are the (static) input quadratures.
/// Passive and active Gaussian elements act by linear recombination, so the
/// whole protocol stays inside this representation.
template <typename Scalar = double>
class ModeExpr {
 public:
  using Coefficients = Eigen::Matrix<Scalar, 2, Eigen::Dynamic>;
  using Displacement = Eigen::Matrix<Scalar, 2, 1>;

  ModeExpr(BasisRegistryPtr<Scalar> registry, Coefficients coeffs,
           Displacement disp = Displacement::Zero())
      : registry_(std::move(registry)),
        coeffs_(std::move(coeffs)),
        disp_(std::move(disp)) {
    if (!registry_) {
      throw std::invalid_argument("ModeExpr requires a basis registry");
    }
    if (coeffs_.cols() != registry_->quadrature_count()) {
      throw std::invalid_argument(
          "ModeExpr coefficient width does not match basis size");
    }
  }

  /// The expression equal to basis mode `id` itself (unit X and Y rows).
  static ModeExpr identity(const BasisRegistryPtr<Scalar>& registry,
                           std::string_view id) {
    if (!registry) {
      throw std::invalid_argument("ModeExpr requires a basis registry");
    }
    const Eigen::Index m = registry->index_of(id);
    Coefficients coeffs =
        Coefficients::Zero(2, registry->quadrature_count());
    coeffs(0, 2 * m) = Scalar(1);
    coeffs(1, 2 * m + 1) = Scalar(1);
    return ModeExpr(registry, std::move(coeffs));
  }

  const BasisRegistryPtr<Scalar>& registry() const { return registry_; }
  const Coefficients& coeffs() const { return coeffs_; }
  const Displacement& displacement() const { return disp_; }

  /// The 2x2 sub-block of coefficients acting on basis mode `id`.
  Eigen::Matrix<Scalar, 2, 2> mode_block(std::string_view id) const {
    const Eigen::Index m = registry_->index_of(id);
    return coeffs_.template block<2, 2>(0, 2 * m);
  }

  /// True when the expression involves basis mode `id` at all.
  bool touches(std::string_view id, Scalar tolerance = Scalar(0)) const {
    return mode_block(id).cwiseAbs().maxCoeff() > tolerance;
  }

  /// Hermitian conjugate of the annihilation-operator view: with
  /// a = (X + iY)/2, conjugation maps a -> a^dagger, i.e. Y -> -Y. On the
  /// real quadrature form this negates the Y row and the Y displacement.
  ModeExpr dagger() const {
    ModeExpr result = *this;
    result.coeffs_.row(1) = -result.coeffs_.row(1);
    result.disp_[1] = -result.disp_[1];
    return result;
  }

  ModeExpr operator-() const {
    ModeExpr result = *this;
    result.coeffs_ = -result.coeffs_;
    result.disp_ = -result.disp_;
    return result;
  }

  ModeExpr& operator+=(const ModeExpr& other) {
    require_same_basis(other);
    coeffs_ += other.coeffs_;
    disp_ += other.disp_;
    return *this;
  }

  ModeExpr& operator-=(const ModeExpr& other) {
    require_same_basis(other);
    coeffs_ -= other.coeffs_;
    disp_ -= other.disp_;
    return *this;
  }

  ModeExpr& operator*=(Scalar factor) {
    coeffs_ *= factor;
    disp_ *= factor;
    return *this;
  }

  friend ModeExpr operator+(ModeExpr lhs, const ModeExpr& rhs) {
    lhs += rhs;
    return lhs;
  }
  friend ModeExpr operator-(ModeExpr lhs, const ModeExpr& rhs) {
    lhs -= rhs;
    return lhs;
  }
  friend ModeExpr operator*(Scalar factor, ModeExpr expr) {
    expr *= factor;
    return expr;
  }
  friend ModeExpr operator*(ModeExpr expr, Scalar factor) {
    expr *= factor;
    return expr;
  }

  /// Adds a classical displacement (dx, dy) to the mean of this mode.
  ModeExpr displaced(Scalar dx, Scalar dy) const {
    ModeExpr result = *this;
    result.disp_[0] += dx;
    result.disp_[1] += dy;
    return result;
  }

 private:
  void require_same_basis(const ModeExpr& other) const {
    if (registry_ != other.registry_) {
      throw std::invalid_argument(
          "ModeExpr operands belong to different basis registries");
    }
  }

  BasisRegistryPtr<Scalar> registry_;
  Coefficients coeffs_;
  Displacement disp_;
};

/// Mean of (X_out, Y_out) for the given basis state.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> mean(const ModeExpr<Scalar>& expr,
                                 const BasisState<Scalar>& state) {
  if (expr.registry() != state.registry) {
    throw std::invalid_argument("expression and state use different bases");
  }
  return expr.coeffs() * state.mean + expr.displacement();
}

/// Variances (Var X_out, Var Y_out) for the given basis state:
/// diag(C Sigma C^T) with C the 2 x 2N coefficient matrix.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> variance(const ModeExpr<Scalar>& expr,
                                     const BasisState<Scalar>& state) {
  if (expr.registry() != state.registry) {
    throw std::invalid_argument("expression and state use different bases");
  }
  const Eigen::Matrix<Scalar, 2, 2> second_moments =
      expr.coeffs() * state.cov * expr.coeffs().transpose();
  return second_moments.diagonal();
}

/// Full 2M x 2M covariance matrix of a list of output modes.
template <typename Scalar>
Eigen::MatrixX<Scalar> joint_covariance(
    const std::vector<ModeExpr<Scalar>>& exprs,
    const BasisState<Scalar>& state) {
  const Eigen::Index m = static_cast<Eigen::Index>(exprs.size());
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> stacked(
      2 * m, state.registry->quadrature_count());
  for (Eigen::Index i = 0; i < m; ++i) {
    if (exprs[static_cast<std::size_t>(i)].registry() != state.registry) {
      throw std::invalid_argument("expression and state use different bases");
    }
    stacked.middleRows(2 * i, 2) =
        exprs[static_cast<std::size_t>(i)].coeffs();
  }
  return stacked * state.cov * stacked.transpose();
}

/// Commutator matrix of a set of modes: entry (j, k) is C Omega C^T for the
/// stacked coefficient rows, which equals the symplectic form of the outputs
/// when canonical commutation relations are preserved.
template <typename Scalar>
Eigen::MatrixX<Scalar> commutator_matrix(
    const std::vector<ModeExpr<Scalar>>& exprs) {
  if (exprs.empty()) return Eigen::MatrixX<Scalar>();
  const auto& registry = exprs.front().registry();
  const Eigen::Index m = static_cast<Eigen::Index>(exprs.size());
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> stacked(
      2 * m, registry->quadrature_count());
  for (Eigen::Index i = 0; i < m; ++i) {
    if (exprs[static_cast<std::size_t>(i)].registry() != registry) {
      throw std::invalid_argument(
          "commutator check requires a common basis registry");
    }
    stacked.middleRows(2 * i, 2) =
        exprs[static_cast<std::size_t>(i)].coeffs();
  }
  return stacked * symplectic_form<Scalar>(registry->mode_count()) *
         stacked.transpose();
}

/// True when the modes jointly satisfy canonical commutation relations:
/// [X_j, Y_j] = 2i within each mode and all cross-mode commutators vanish,
/// i.e. C Omega C^T equals the M-mode symplectic form.
template <typename Scalar>
bool check_commutators(const std::vector<ModeExpr<Scalar>>& exprs,
                       double tolerance = algebraic_tolerance) {
  if (exprs.empty()) return true;
  const Eigen::MatrixX<Scalar> actual = commutator_matrix(exprs);
  const Eigen::MatrixX<Scalar> expected = symplectic_form<Scalar>(
      static_cast<Eigen::Index>(exprs.size()));
  return (actual - expected).cwiseAbs().maxCoeff() <= Scalar(tolerance);
}

/// Folds an annihilation/creation-operator combination into a quadrature
/// expression: contribution c * b adds (+c, +c) to (X, Y) rows of mode b,
/// while d * b^dagger adds (+d, -d). Convenience for building expressions
/// straight from operator-language coefficients.
template <typename Scalar>
ModeExpr<Scalar> from_operator_terms(
    const BasisRegistryPtr<Scalar>& registry,
    const std::vector<std::pair<std::string, Scalar>>& annihilation_terms,
    const std::vector<std::pair<std::string, Scalar>>& creation_terms) {
  if (!registry) {
    throw std::invalid_argument("from_operator_terms requires a registry");
  }
  typename ModeExpr<Scalar>::Coefficients coeffs =
      ModeExpr<Scalar>::Coefficients::Zero(2,
                                           registry->quadrature_count());
  for (const auto& [id, c] : annihilation_terms) {
    const Eigen::Index m = registry->index_of(id);
    coeffs(0, 2 * m) += c;
    coeffs(1, 2 * m + 1) += c;
  }
  for (const auto& [id, d] : creation_terms) {
    const Eigen::Index m = registry->index_of(id);
    coeffs(0, 2 * m) += d;
    coeffs(1, 2 * m + 1) -= d;
  }
  return ModeExpr<Scalar>(registry, std::move(coeffs));
}

}  // namespace semiq
