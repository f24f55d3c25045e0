// Copyright 2026 The RidgeSVM Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RIDGESVM_LINALG_HPP
#define RIDGESVM_LINALG_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ridgesvm/error.hpp"

namespace ridgesvm {

using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Absolute tolerance on pivots and scalar denominators.
inline constexpr double kPivotTolerance = 1e-12;

/*
 * Inverse of the saddle-point matrix
 *
 *   M = | 0       borderᵀ |
 *       | border  Q_S     |
 *
 * assembled from Q_S⁻¹ through the Schur complement of Q_S:
 *
 *   M⁻¹ = | z             −z uᵀ            |     u = Q_S⁻¹ border
 *         | −z u          Q_S⁻¹ + z u uᵀ   |     z = −(borderᵀ u)⁻¹
 *
 * `inv` is (order+1) × (order+1); row/column 0 belongs to the bias.
 */
struct BorderedInverse {
  double z = 0.0;
  Eigen::Index order = 0;
  DenseMatrix inv;

  /// Solves M [Δb; Δx_S] = rhs.
  Vector solve(const Vector& rhs) const { return inv * rhs; }
};

namespace detail {

inline constexpr Eigen::Index kTile = 64;

/// Averages m with its transpose, tile by tile.
inline void symmetrize(DenseMatrix& m) {
  const Eigen::Index n = m.rows();
  for (Eigen::Index jb = 0; jb < n; jb += kTile) {
    const Eigen::Index bj = std::min(kTile, n - jb);
    for (Eigen::Index ib = jb; ib < n; ib += kTile) {
      const Eigen::Index bi = std::min(kTile, n - ib);
      const DenseMatrix avg = 0.5 * (m.block(ib, jb, bi, bj) + m.block(jb, ib, bj, bi).transpose());
      m.block(ib, jb, bi, bj) = avg;
      m.block(jb, ib, bj, bi) = avg.transpose();
    }
  }
}

/// Copies the lower triangle of m onto its upper triangle, tile by tile.
inline void mirror_lower(DenseMatrix& m) {
  const Eigen::Index n = m.rows();
  for (Eigen::Index jb = 0; jb < n; jb += kTile) {
    const Eigen::Index bj = std::min(kTile, n - jb);
    for (Eigen::Index ib = jb; ib < n; ib += kTile) {
      const Eigen::Index bi = std::min(kTile, n - ib);
      if (ib == jb) {
        for (Eigen::Index c = 0; c < bj; ++c) {
          for (Eigen::Index r = c + 1; r < bi; ++r) m(jb + c, ib + r) = m(ib + r, jb + c);
        }
      } else {
        const DenseMatrix tile = m.block(ib, jb, bi, bj);
        m.block(jb, ib, bj, bi) = tile.transpose();
      }
    }
  }
}

/// Cholesky of a small SPD block with the shared pivot tolerance.
inline Eigen::LLT<DenseMatrix> small_cholesky(const DenseMatrix& m, Errc failure, const char* what) {
  Eigen::LLT<DenseMatrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw Error(failure, std::string(what) + " factorization failed");
  }
  const double min_pivot = llt.matrixLLT().diagonal().array().square().minCoeff();
  if (!(min_pivot > kPivotTolerance)) {
    throw Error(failure, std::string(what) + " has pivot " + std::to_string(min_pivot));
  }
  return llt;
}

}  // namespace detail

/// Inverse of a symmetric positive-definite matrix via Cholesky.
inline DenseMatrix invert_spd(const DenseMatrix& m) {
  if (m.rows() != m.cols()) {
    throw Error(Errc::dimension_mismatch, "invert_spd: matrix is not square");
  }
  if (m.rows() == 0) return DenseMatrix(0, 0);
  Eigen::LLT<DenseMatrix> llt(m);
  if (llt.info() != Eigen::Success) {
    throw Error(Errc::not_positive_definite, "invert_spd: Cholesky breakdown");
  }
  const double min_pivot = llt.matrixLLT().diagonal().array().square().minCoeff();
  if (!(min_pivot > kPivotTolerance)) {
    throw Error(Errc::not_positive_definite,
                "invert_spd: pivot " + std::to_string(min_pivot) + " below tolerance");
  }
  DenseMatrix inv = llt.solve(DenseMatrix::Identity(m.rows(), m.cols()));
  detail::symmetrize(inv);
  return inv;
}

/// Assembles the bordered inverse from an already available Q_S⁻¹.
inline BorderedInverse bordered_inverse_from(const DenseMatrix& q_inv, const Vector& border) {
  if (q_inv.rows() != border.size() || q_inv.cols() != border.size()) {
    throw Error(Errc::dimension_mismatch, "bordered_inverse: border length differs from Q_S order");
  }
  const Eigen::Index n = border.size();
  const Vector u = q_inv * border;
  const double denom = border.dot(u);
  if (!(std::abs(denom) > kPivotTolerance)) {
    throw Error(Errc::singular_border, "bordered_inverse: |borderᵀ Q_S⁻¹ border| = " +
                                           std::to_string(std::abs(denom)));
  }
  BorderedInverse out;
  out.z = -1.0 / denom;
  out.order = n;
  out.inv.resize(n + 1, n + 1);
  out.inv(0, 0) = out.z;
  out.inv.block(0, 1, 1, n) = -out.z * u.transpose();
  out.inv.block(1, 0, n, 1) = -out.z * u;
  out.inv.block(1, 1, n, n) = q_inv + out.z * u * u.transpose();
  return out;
}

/// Factored bordered inverse: only u = Q_S⁻¹ border and z are kept, and M⁻¹ is
/// applied through Q_S⁻¹ without forming the (order+1)² matrix.
struct BorderedFactor {
  double z = 0.0;
  Eigen::Index order = 0;
  Vector u;

  /// Solves M [Δb; Δx_S] = rhs given the Q_S⁻¹ the factor was built from
  /// (a dense matrix or a self-adjoint view).
  template <class Inverse>
  Vector solve(const Inverse& q_inv, const Vector& rhs) const {
    Vector out(order + 1);
    const auto tail = rhs.tail(order);
    out(0) = z * (rhs(0) - u.dot(tail));
    out.tail(order).noalias() = q_inv * tail;
    out.tail(order) -= out(0) * u;
    return out;
  }
};

template <class Inverse>
BorderedFactor bordered_factor(const Inverse& q_inv, const Vector& border) {
  if (q_inv.rows() != border.size() || q_inv.cols() != border.size()) {
    throw Error(Errc::dimension_mismatch, "bordered_factor: border length differs from Q_S order");
  }
  BorderedFactor out;
  out.order = border.size();
  out.u.noalias() = q_inv * border;
  const double denom = border.dot(out.u);
  if (!(std::abs(denom) > kPivotTolerance)) {
    throw Error(Errc::singular_border, "bordered_factor: |borderᵀ Q_S⁻¹ border| = " +
                                           std::to_string(std::abs(denom)));
  }
  out.z = -1.0 / denom;
  return out;
}

inline BorderedInverse bordered_inverse(const DenseMatrix& q_s, const Vector& border) {
  if (q_s.rows() != border.size()) {
    throw Error(Errc::dimension_mismatch, "bordered_inverse: border length differs from Q_S order");
  }
  return bordered_inverse_from(invert_spd(q_s), border);
}

/*
 * Block grow of a symmetric inverse. Given P = Q⁻¹ and the border of the new
 * rows/columns,
 *
 *   | Q      cross |⁻¹   | P + H V⁻¹ Hᵀ   H V⁻¹ |
 *   | crossᵀ new   |   = | V⁻¹ Hᵀ         V⁻¹   |
 *
 * with H = −P cross and V = new − crossᵀ P cross. V is symmetric, so V⁻ᵀ = V⁻¹.
 */
inline DenseMatrix inverse_grow(const DenseMatrix& q_inv_prev, const DenseMatrix& q_cross,
                                const DenseMatrix& q_new) {
  const Eigen::Index n = q_inv_prev.rows();
  const Eigen::Index k = q_new.rows();
  if (q_inv_prev.cols() != n || q_cross.rows() != n || q_cross.cols() != k || q_new.cols() != k) {
    throw Error(Errc::dimension_mismatch, "inverse_grow: block shapes disagree");
  }
  if (k == 0) return q_inv_prev;

  DenseMatrix h(n, k);
  h.noalias() = -q_inv_prev * q_cross;
  DenseMatrix v = q_new;
  v.noalias() += q_cross.transpose() * h;
  detail::symmetrize(v);
  // V = L Lᵀ, so H V⁻¹ Hᵀ = W Wᵀ with W = H L⁻ᵀ.
  const auto llt = detail::small_cholesky(v, Errc::singular_schur_block, "inverse_grow: V");
  DenseMatrix w = h;
  llt.matrixU().solveInPlace<Eigen::OnTheRight>(w);
  DenseMatrix h_v_inv = w;
  llt.matrixL().solveInPlace<Eigen::OnTheRight>(h_v_inv);
  DenseMatrix v_inv = llt.solve(DenseMatrix::Identity(k, k));
  detail::symmetrize(v_inv);

  DenseMatrix out(n + k, n + k);
  out.topLeftCorner(n, n).triangularView<Eigen::Lower>() = q_inv_prev;
  out.topLeftCorner(n, n).selfadjointView<Eigen::Lower>().rankUpdate(w, 1.0);
  out.bottomLeftCorner(k, n) = h_v_inv.transpose();
  out.bottomRightCorner(k, k) = v_inv;
  detail::mirror_lower(out);
  return out;
}

/*
 * Block shrink. With the removed indices permuted to the bottom-right corner,
 *
 *   P = | Λ    h |      (Q without R)⁻¹ = Λ − h v⁻¹ hᵀ.
 *       | hᵀ   v |
 *
 * Surviving indices keep their relative order.
 */
inline DenseMatrix inverse_shrink(const DenseMatrix& q_inv_prev, std::span<const Eigen::Index> removed) {
  const Eigen::Index n = q_inv_prev.rows();
  if (q_inv_prev.cols() != n) {
    throw Error(Errc::dimension_mismatch, "inverse_shrink: matrix is not square");
  }
  std::vector<bool> drop(static_cast<std::size_t>(n), false);
  std::vector<Eigen::Index> rem;
  for (Eigen::Index r : removed) {
    if (r < 0 || r >= n) {
      throw Error(Errc::dimension_mismatch, "inverse_shrink: index " + std::to_string(r) + " out of range");
    }
    if (!drop[static_cast<std::size_t>(r)]) {
      drop[static_cast<std::size_t>(r)] = true;
      rem.push_back(r);
    }
  }
  if (rem.empty()) return q_inv_prev;
  std::sort(rem.begin(), rem.end());
  std::vector<Eigen::Index> keep;
  keep.reserve(static_cast<std::size_t>(n) - rem.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!drop[static_cast<std::size_t>(i)]) keep.push_back(i);
  }

  DenseMatrix v = q_inv_prev(rem, rem);
  detail::symmetrize(v);
  // v = L Lᵀ, so h v⁻¹ hᵀ = W Wᵀ with W = h L⁻ᵀ.
  const auto llt = detail::small_cholesky(v, Errc::singular_corner_block, "inverse_shrink: v_R");
  DenseMatrix w = q_inv_prev(keep, rem);
  llt.matrixU().solveInPlace<Eigen::OnTheRight>(w);
  const auto m = static_cast<Eigen::Index>(keep.size());
  DenseMatrix out(m, m);
  for (Eigen::Index c = 0; c < m; ++c) {
    const Eigen::Index src = keep[static_cast<std::size_t>(c)];
    for (Eigen::Index r = c; r < m; ++r) out(r, c) = q_inv_prev(keep[static_cast<std::size_t>(r)], src);
  }
  out.selfadjointView<Eigen::Lower>().rankUpdate(w, -1.0);
  detail::mirror_lower(out);
  return out;
}

/*
 * In-place variant of inverse_grow_shrink for a running inverse. Only the
 * lower triangle of the leading `order`×`order` block of `store` is read or
 * written; the rest of `store` is spare capacity. Removed rows are compacted
 * in place, the rank updates touch one triangle, and new rows go into the
 * spare capacity (the buffer is reallocated with slack when it runs out).
 * Returns the new order.
 */
inline Eigen::Index inverse_grow_shrink_lower(DenseMatrix& store, Eigen::Index order, const DenseMatrix& q_cross,
                                              const DenseMatrix& q_new, std::span<const Eigen::Index> removed) {
  const Eigen::Index k = q_new.rows();
  if (store.rows() < order || store.cols() < order || q_cross.rows() != order || q_cross.cols() != k ||
      q_new.cols() != k) {
    throw Error(Errc::dimension_mismatch, "inverse_grow_shrink_lower: block shapes disagree");
  }
  auto at = [&store](Eigen::Index i, Eigen::Index j) { return i >= j ? store(i, j) : store(j, i); };

  std::vector<bool> drop(static_cast<std::size_t>(order), false);
  std::vector<Eigen::Index> rem;
  for (Eigen::Index r : removed) {
    if (r < 0 || r >= order) {
      throw Error(Errc::dimension_mismatch, "inverse_grow_shrink_lower: index " + std::to_string(r) + " out of range");
    }
    if (!drop[static_cast<std::size_t>(r)]) {
      drop[static_cast<std::size_t>(r)] = true;
      rem.push_back(r);
    }
  }
  std::sort(rem.begin(), rem.end());
  std::vector<Eigen::Index> keep;
  keep.reserve(static_cast<std::size_t>(order) - rem.size());
  for (Eigen::Index i = 0; i < order; ++i) {
    if (!drop[static_cast<std::size_t>(i)]) keep.push_back(i);
  }
  const auto m = static_cast<Eigen::Index>(keep.size());

  // Shrink factor: Λ − h v⁻¹ hᵀ = Λ − W_s W_sᵀ.
  DenseMatrix w_shrink(m, 0);
  if (!rem.empty()) {
    const auto r = static_cast<Eigen::Index>(rem.size());
    DenseMatrix v(r, r);
    w_shrink.resize(m, r);
    for (Eigen::Index b = 0; b < r; ++b) {
      for (Eigen::Index a = 0; a < r; ++a) v(a, b) = at(rem[static_cast<std::size_t>(a)], rem[static_cast<std::size_t>(b)]);
      for (Eigen::Index a = 0; a < m; ++a) {
        w_shrink(a, b) = at(keep[static_cast<std::size_t>(a)], rem[static_cast<std::size_t>(b)]);
      }
    }
    const auto llt = detail::small_cholesky(v, Errc::singular_corner_block, "inverse_shrink: v_R");
    llt.matrixU().solveInPlace<Eigen::OnTheRight>(w_shrink);
    // Compaction: every source lies at or after its destination in column-major order.
    for (Eigen::Index c = 0; c < m; ++c) {
      const Eigen::Index sc = keep[static_cast<std::size_t>(c)];
      for (Eigen::Index rr = c; rr < m; ++rr) store(rr, c) = store(keep[static_cast<std::size_t>(rr)], sc);
    }
  }
  if (k == 0) {
    if (!rem.empty()) store.topLeftCorner(m, m).selfadjointView<Eigen::Lower>().rankUpdate(w_shrink, -1.0);
    return m;
  }

  // Grow against the shrunk inverse without forming it: P' c = Λ c − W_s (W_sᵀ c).
  const DenseMatrix cross_kept = q_cross(keep, Eigen::all);
  DenseMatrix h(m, k);
  h.noalias() = -(store.topLeftCorner(m, m).selfadjointView<Eigen::Lower>() * cross_kept);
  if (!rem.empty()) h.noalias() += w_shrink * (w_shrink.transpose() * cross_kept);
  DenseMatrix v = q_new;
  v.noalias() += cross_kept.transpose() * h;
  detail::symmetrize(v);
  const auto llt = detail::small_cholesky(v, Errc::singular_schur_block, "inverse_grow: V");
  DenseMatrix w = h;
  llt.matrixU().solveInPlace<Eigen::OnTheRight>(w);
  DenseMatrix h_v_inv = w;
  llt.matrixL().solveInPlace<Eigen::OnTheRight>(h_v_inv);
  const DenseMatrix v_inv = llt.solve(DenseMatrix::Identity(k, k));

  if (store.rows() < m + k) {
    const Eigen::Index cap = m + k + std::max<Eigen::Index>(64, (m + k) / 8);
    DenseMatrix bigger(cap, cap);
    bigger.topLeftCorner(m, m) = store.topLeftCorner(m, m);
    store.swap(bigger);
  }
  // One pass over the triangle: Λ + W Wᵀ − W_s W_sᵀ.
  const Eigen::Index r = w_shrink.cols();
  DenseMatrix left(m, k + r);
  DenseMatrix right(m, k + r);
  left << w, w_shrink;
  right << w, -w_shrink;
  store.topLeftCorner(m, m).triangularView<Eigen::Lower>() += left * right.transpose();
  store.block(m, 0, k, m) = h_v_inv.transpose();
  store.block(m, m, k, k) = v_inv;
  return m + k;
}

/// Shrink by `removed`, then grow by the new block. `q_cross` has one row per
/// index of the previous matrix; rows of removed indices are ignored. The new
/// layout is [survivors in order, added].
inline DenseMatrix inverse_grow_shrink(const DenseMatrix& q_inv_prev, const DenseMatrix& q_cross,
                                       const DenseMatrix& q_new, std::span<const Eigen::Index> removed) {
  if (q_cross.rows() != q_inv_prev.rows()) {
    throw Error(Errc::dimension_mismatch, "inverse_grow_shrink: cross block rows differ from previous order");
  }
  if (removed.empty()) return inverse_grow(q_inv_prev, q_cross, q_new);
  const DenseMatrix shrunk = inverse_shrink(q_inv_prev, removed);
  std::vector<bool> drop(static_cast<std::size_t>(q_inv_prev.rows()), false);
  for (Eigen::Index r : removed) drop[static_cast<std::size_t>(r)] = true;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < q_inv_prev.rows(); ++i) {
    if (!drop[static_cast<std::size_t>(i)]) keep.push_back(i);
  }
  const DenseMatrix cross_kept = q_cross(keep, Eigen::all);
  return inverse_grow(shrunk, cross_kept, q_new);
}

}  // namespace ridgesvm

#endif  // RIDGESVM_LINALG_HPP
