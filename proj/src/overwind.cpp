/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The vssa-elastography Authors. All rights reserved.
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "vssa/overwind.hpp"

#include <cmath>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "vssa/parallel.hpp"

namespace vssa {

OverwindParams OverwindParams::tied_lf(double alpha1, double alpha2) {
  OverwindParams p;
  p.alpha1 = alpha1;
  p.alpha2 = alpha2;
  p.beta1 = 0.5 * alpha1;
  p.beta2 = 0.5 * alpha2;
  p.window_half_r = 1;
  p.tie_rule = TieRule::tied_lf;
  return p;
}

OverwindParams OverwindParams::tied_hf(double alpha1) {
  OverwindParams p = tied_lf(alpha1, alpha1);
  p.window_half_r = p.window_half_k;
  p.tie_rule = TieRule::tied_hf;
  return p;
}

void OverwindParams::validate() const {
  if (!(alpha1 >= 0.0) || !(alpha2 >= 0.0) || !(beta1 >= 0.0) || !(beta2 >= 0.0))
    throw std::invalid_argument("OverwindParams: weights must be >= 0");
  for (double l : lambda)
    if (!(l > 0.0)) throw std::invalid_argument("OverwindParams: lambda must be positive");
  if (!std::isfinite(epsilon_a) || !std::isfinite(epsilon_l))
    throw std::invalid_argument("OverwindParams: epsilon must be finite");
  if (window_half_k < 0 || window_half_r < 0) throw std::invalid_argument("OverwindParams: window half-size < 0");
  if (irls_iterations < 1) throw std::invalid_argument("OverwindParams: need at least one IRLS iteration");
  const double tol = 1e-12 * (1.0 + std::abs(alpha1) + std::abs(alpha2));
  if (tie_rule != TieRule::manual &&
      (std::abs(beta1 - 0.5 * alpha1) > tol || std::abs(beta2 - 0.5 * alpha2) > tol))
    throw std::invalid_argument("OverwindParams: tied weights require beta = alpha / 2");
  if (tie_rule == TieRule::tied_hf && std::abs(alpha2 - alpha1) > tol)
    throw std::invalid_argument("OverwindParams: tied_hf requires alpha2 = alpha1");
}

double default_epsilon_a(const DisplacementField& d) {
  double sum = 0.0;
  long count = 0;
  for (int ix = 0; ix < d.grid.nx; ++ix)
    for (int iz = 1; iz < d.grid.nz; ++iz)
      if (d.valid(iz, ix) && d.valid(iz - 1, ix)) {
        sum += d.axial_int(iz, ix) - d.axial_int(iz - 1, ix);
        ++count;
      }
  return count > 0 ? sum / static_cast<double>(count) : 0.0;
}

namespace {

// Window moments of e = I1 - I2(shifted), g_a, g_l: the data term of a node
// is (See - 2 da Sea - 2 dl Sel + da^2 Saa + 2 da dl Sal + dl^2 Sll) / n.
struct Moments {
  double see = 0, sea = 0, sel = 0, saa = 0, sal = 0, sll = 0;
  int n = 0;

  double value(double da, double dl) const {
    if (n == 0) return 0.0;
    return (see - 2.0 * da * sea - 2.0 * dl * sel + da * da * saa + 2.0 * da * dl * sal + dl * dl * sll) / n;
  }
};

// One regularizer term weight * smooth_l1(lambda, s) with
// s = u[n] - u[m] - offset on displacement component `comp`.
struct Pair {
  int n, m;
  int comp;
  double weight, lambda, offset;
};

struct Problem {
  std::vector<std::array<int, 2>> nodes;  // (iz, ix) per unknown pair
  std::vector<Moments> moments;
  std::vector<std::array<double, 2>> integer;  // (a, l)
  std::vector<Pair> pairs;
};

// Central differences, one-sided at the frame edges.
Field derivative(const Field& v, int axis) {
  Field d(v.rows(), v.cols());
  const Eigen::Index n = axis == 0 ? v.rows() : v.cols();
  for (Eigen::Index c = 0; c < v.cols(); ++c)
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
      const Eigen::Index k = axis == 0 ? r : c;
      auto at = [&](Eigen::Index q) { return axis == 0 ? v(q, c) : v(r, q); };
      if (n < 2)
        d(r, c) = 0.0;
      else if (k == 0)
        d(r, c) = at(1) - at(0);
      else if (k == n - 1)
        d(r, c) = at(n - 1) - at(n - 2);
      else
        d(r, c) = 0.5 * (at(k + 1) - at(k - 1));
    }
  return d;
}

Problem build_problem(const RfFrame& i1, const RfFrame& i2, const DisplacementField& disp, const OverwindParams& p) {
  p.validate();
  if (!(i1.grid == i2.grid) || !(disp.grid == i1.grid))
    throw std::invalid_argument("overwind: frames and displacement field differ in dimensions");
  const int nz = i1.grid.nz, nx = i1.grid.nx;
  Problem pr;
  Eigen::MatrixXi index = Eigen::MatrixXi::Constant(nz, nx, -1);
  for (int ix = 0; ix < nx; ++ix)
    for (int iz = 0; iz < nz; ++iz)
      if (disp.valid(iz, ix) && std::isfinite(disp.axial_int(iz, ix)) && std::isfinite(disp.lateral_int(iz, ix))) {
        index(iz, ix) = static_cast<int>(pr.nodes.size());
        pr.nodes.push_back({iz, ix});
        pr.integer.push_back({disp.axial_int(iz, ix), disp.lateral_int(iz, ix)});
      }

  const Field ga = derivative(i2.values, 0);
  const Field gl = derivative(i2.values, 1);
  pr.moments.resize(pr.nodes.size());
  parallel_for(static_cast<int>(pr.nodes.size()), [&](int n) {
    const auto [iz, ix] = pr.nodes[n];
    const int a = static_cast<int>(std::lround(pr.integer[n][0]));
    const int l = static_cast<int>(std::lround(pr.integer[n][1]));
    Moments m;
    for (int r = -p.window_half_r; r <= p.window_half_r; ++r) {
      const int c1 = ix + r, c2 = ix + r + l;
      if (c1 < 0 || c1 >= nx || c2 < 0 || c2 >= nx) continue;
      for (int k = -p.window_half_k; k <= p.window_half_k; ++k) {
        const int r1 = iz + k, r2 = iz + k + a;
        if (r1 < 0 || r1 >= nz || r2 < 0 || r2 >= nz) continue;
        if (!i1.valid(r1, c1) || !i2.valid(r2, c2)) continue;
        const double e = i1.values(r1, c1) - i2.values(r2, c2);
        const double da = ga(r2, c2), dl = gl(r2, c2);
        m.see += e * e;
        m.sea += e * da;
        m.sel += e * dl;
        m.saa += da * da;
        m.sal += da * dl;
        m.sll += dl * dl;
        ++m.n;
      }
    }
    pr.moments[n] = m;
  });

  auto add = [&](int n, int m, int comp, double w, double lambda, double offset) {
    if (w > 0.0) pr.pairs.push_back({n, m, comp, w, lambda, offset});
  };
  for (std::size_t n = 0; n < pr.nodes.size(); ++n) {
    const auto [iz, ix] = pr.nodes[n];
    const int nn = static_cast<int>(n);
    if (iz > 0 && index(iz - 1, ix) >= 0) {
      const int up = index(iz - 1, ix);
      add(nn, up, 0, p.alpha1, p.lambda[0], p.epsilon_a);
      add(nn, up, 1, p.beta1, p.lambda[2], 0.0);
    }
    if (ix > 0 && index(iz, ix - 1) >= 0) {
      const int left = index(iz, ix - 1);
      add(nn, left, 0, p.alpha2, p.lambda[1], 0.0);
      add(nn, left, 1, p.beta2, p.lambda[3], p.epsilon_l);
    }
  }
  return pr;
}

// Unknown vector layout: x[2 n] = axial sub-sample, x[2 n + 1] = lateral.
double pair_residual(const Problem& pr, const Pair& q, const Eigen::VectorXd& x) {
  return pr.integer[q.n][q.comp] + x[2 * q.n + q.comp] - pr.integer[q.m][q.comp] - x[2 * q.m + q.comp] - q.offset;
}

double total_cost(const Problem& pr, const Eigen::VectorXd& x) {
  double c = 0.0;
  for (std::size_t n = 0; n < pr.nodes.size(); ++n) c += pr.moments[n].value(x[2 * n], x[2 * n + 1]);
  for (const Pair& q : pr.pairs) c += q.weight * smooth_l1(q.lambda, pair_residual(pr, q, x));
  return c;
}

Eigen::VectorXd gather(const Problem& pr, const DisplacementField& disp) {
  Eigen::VectorXd x(2 * pr.nodes.size());
  for (std::size_t n = 0; n < pr.nodes.size(); ++n) {
    const auto [iz, ix] = pr.nodes[n];
    x[2 * n] = disp.axial_sub(iz, ix);
    x[2 * n + 1] = disp.lateral_sub(iz, ix);
  }
  return x;
}

}  // namespace

double overwind_cost(const RfFrame& i1, const RfFrame& i2, const DisplacementField& disp,
                     const OverwindParams& params) {
  const Problem pr = build_problem(i1, i2, disp, params);
  return total_cost(pr, gather(pr, disp));
}

OverwindGradient overwind_gradient(const RfFrame& i1, const RfFrame& i2, const DisplacementField& disp,
                                   const OverwindParams& params) {
  const Problem pr = build_problem(i1, i2, disp, params);
  const Eigen::VectorXd x = gather(pr, disp);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
  for (std::size_t n = 0; n < pr.nodes.size(); ++n) {
    const Moments& m = pr.moments[n];
    if (m.n == 0) continue;
    const double da = x[2 * n], dl = x[2 * n + 1];
    g[2 * n] = 2.0 * (da * m.saa + dl * m.sal - m.sea) / m.n;
    g[2 * n + 1] = 2.0 * (da * m.sal + dl * m.sll - m.sel) / m.n;
  }
  for (const Pair& q : pr.pairs) {
    const double s = pair_residual(pr, q, x);
    const double d = q.weight * 2.0 * q.lambda * s / std::sqrt(q.lambda * q.lambda + s * s);
    g[2 * q.n + q.comp] += d;
    g[2 * q.m + q.comp] -= d;
  }
  OverwindGradient out{Field::Zero(disp.grid.nz, disp.grid.nx), Field::Zero(disp.grid.nz, disp.grid.nx)};
  for (std::size_t n = 0; n < pr.nodes.size(); ++n) {
    const auto [iz, ix] = pr.nodes[n];
    out.axial(iz, ix) = g[2 * n];
    out.lateral(iz, ix) = g[2 * n + 1];
  }
  return out;
}

OverwindResult overwind_solve(const RfFrame& i1, const RfFrame& i2, const DisplacementField& integer_disp,
                              const OverwindParams& params) {
  DisplacementField start = integer_disp;
  start.axial_sub.setZero();
  start.lateral_sub.setZero();
  const Problem pr = build_problem(i1, i2, start, params);
  const Eigen::Index nu = 2 * static_cast<Eigen::Index>(pr.nodes.size());

  OverwindResult result{start, {}, 0};
  result.displacement.apply_mask();
  if (nu == 0) return result;

  Eigen::VectorXd x = Eigen::VectorXd::Zero(nu);
  result.cost_history.push_back(total_cost(pr, x));

  // The data blocks and the sparsity pattern do not change between iterations.
  std::vector<Eigen::Triplet<double>> fixed;
  Eigen::VectorXd rhs_fixed = Eigen::VectorXd::Zero(nu);
  for (std::size_t n = 0; n < pr.nodes.size(); ++n) {
    const Moments& m = pr.moments[n];
    const double s = m.n > 0 ? 2.0 / m.n : 0.0;
    const int a = 2 * static_cast<int>(n), l = a + 1;
    fixed.emplace_back(a, a, s * m.saa);
    fixed.emplace_back(a, l, s * m.sal);
    fixed.emplace_back(l, a, s * m.sal);
    fixed.emplace_back(l, l, s * m.sll);
    rhs_fixed[a] = s * m.sea;
    rhs_fixed[l] = s * m.sel;
  }

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  std::vector<Eigen::Triplet<double>> triplets;
  for (int it = 0; it < params.irls_iterations; ++it) {
    // Tangent majorizer of smooth_l1 in s^2: weight lambda / sqrt(lambda^2 + s0^2).
    triplets = fixed;
    Eigen::VectorXd rhs = rhs_fixed;
    for (const Pair& q : pr.pairs) {
      const double s0 = pair_residual(pr, q, x);
      const double w = 2.0 * q.weight * q.lambda / std::sqrt(q.lambda * q.lambda + s0 * s0);
      const int u = 2 * q.n + q.comp, v = 2 * q.m + q.comp;
      triplets.emplace_back(u, u, w);
      triplets.emplace_back(v, v, w);
      triplets.emplace_back(u, v, -w);
      triplets.emplace_back(v, u, -w);
      // Constant part of s: integer difference minus offset.
      const double c = pr.integer[q.n][q.comp] - pr.integer[q.m][q.comp] - q.offset;
      rhs[u] -= w * c;
      rhs[v] += w * c;
    }
    Eigen::SparseMatrix<double> h(nu, nu);
    h.setFromTriplets(triplets.begin(), triplets.end());
    if (it == 0) solver.analyzePattern(h);
    solver.factorize(h);
    if (solver.info() != Eigen::Success) throw DegenerateInput("overwind_solve: factorization failed");
    const Eigen::VectorXd& d = solver.vectorD();
    const double dmax = d.cwiseAbs().maxCoeff();
    if (!(dmax > 0.0) || !(d.minCoeff() > 1e-12 * dmax))
      throw DegenerateInput("overwind_solve: normal equations are singular");
    x = solver.solve(rhs);
    result.cost_history.push_back(total_cost(pr, x));
  }

  for (std::size_t n = 0; n < pr.nodes.size(); ++n) {
    const auto [iz, ix] = pr.nodes[n];
    result.displacement.axial_sub(iz, ix) = x[2 * n];
    result.displacement.lateral_sub(iz, ix) = x[2 * n + 1];
    if (std::abs(x[2 * n]) > 1.0 || std::abs(x[2 * n + 1]) > 1.0) ++result.large_subsample_nodes;
  }
  return result;
}

}  // namespace vssa
