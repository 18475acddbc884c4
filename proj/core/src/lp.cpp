// Copyright 2026 The transitmarket Authors
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

#include "transitmarket/lp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "transitmarket/log.hpp"

namespace transitmarket {

int LinearProgram::add_variable(double lb, double ub, double obj, std::string name) {
  lower.push_back(lb);
  upper.push_back(ub);
  objective.push_back(obj);
  col_names.push_back(std::move(name));
  return num_cols() - 1;
}

int LinearProgram::add_row(Relation rel, double b, std::string name) {
  relations.push_back(rel);
  rhs.push_back(b);
  row_names.push_back(std::move(name));
  return num_rows() - 1;
}

void LinearProgram::add_entry(int row, int col, double value) {
  entries.push_back(Entry{row, col, value});
}

namespace {

constexpr double kInf = kInfinity;

bool finite(double v) { return v > -kInf && v < kInf; }

// Raised when floating point error leaves the solver without a usable
// basis. The entry point retries with more conservative settings.
struct NumericalFailure : SolverError {
  using SolverError::SolverError;
};

// Dense LU factorization with partial pivoting, row-major storage.
class DenseLU {
 public:
  void factor(std::vector<double> matrix, int m,
              std::chrono::steady_clock::time_point deadline =
                  std::chrono::steady_clock::time_point::max()) {
    m_ = m;
    a_ = std::move(matrix);
    piv_.resize(m);
    for (int k = 0; k < m; ++k) {
      if ((k & 255) == 0 && std::chrono::steady_clock::now() > deadline) {
        throw LPTimeout("basis factorization ran past the wall clock budget");
      }
      int p = k;
      double best = std::fabs(a_[k * m_ + k]);
      for (int i = k + 1; i < m; ++i) {
        double v = std::fabs(a_[i * m_ + k]);
        if (v > best) {
          best = v;
          p = i;
        }
      }
      if (best < 1e-13) {
        throw NumericalFailure("singular basis matrix in simplex");
      }
      piv_[k] = p;
      if (p != k) {
        for (int j = 0; j < m; ++j) std::swap(a_[k * m_ + j], a_[p * m_ + j]);
      }
      const double inv = 1.0 / a_[k * m_ + k];
      for (int i = k + 1; i < m; ++i) {
        double f = a_[i * m_ + k] * inv;
        a_[i * m_ + k] = f;
        if (f == 0.0) continue;
        const double* rk = &a_[k * m_ + 0];
        double* ri = &a_[i * m_ + 0];
        for (int j = k + 1; j < m; ++j) ri[j] -= f * rk[j];
      }
    }
  }

  // Solves B v = rhs in place.
  void solve(std::vector<double>& v) const {
    for (int k = 0; k < m_; ++k) {
      if (piv_[k] != k) std::swap(v[k], v[piv_[k]]);
    }
    for (int i = 1; i < m_; ++i) {
      double s = v[i];
      const double* ri = &a_[i * m_ + 0];
      for (int j = 0; j < i; ++j) s -= ri[j] * v[j];
      v[i] = s;
    }
    for (int i = m_ - 1; i >= 0; --i) {
      double s = v[i];
      const double* ri = &a_[i * m_ + 0];
      for (int j = i + 1; j < m_; ++j) s -= ri[j] * v[j];
      v[i] = s / ri[i];
    }
  }

  // Solves B' v = rhs in place.
  void solve_transpose(std::vector<double>& v) const {
    for (int i = 0; i < m_; ++i) {
      double s = v[i];
      for (int j = 0; j < i; ++j) s -= a_[j * m_ + i] * v[j];
      v[i] = s / a_[i * m_ + i];
    }
    for (int i = m_ - 1; i >= 0; --i) {
      double s = v[i];
      for (int j = i + 1; j < m_; ++j) s -= a_[j * m_ + i] * v[j];
      v[i] = s;
    }
    for (int k = m_ - 1; k >= 0; --k) {
      if (piv_[k] != k) std::swap(v[k], v[piv_[k]]);
    }
  }

 private:
  int m_ = 0;
  std::vector<double> a_;
  std::vector<int> piv_;
};

enum class VarState : unsigned char { kAtLower, kAtUpper, kBasic, kFreeZero };

class Simplex {
 public:
  Simplex(const LinearProgram& lp, const SimplexOptions& opt)
      : lp_(lp), opt_(opt), start_(std::chrono::steady_clock::now()) {
    deadline_ = opt.time_limit_seconds > 0
                    ? start_ + std::chrono::duration_cast<
                                   std::chrono::steady_clock::duration>(
                                   std::chrono::duration<double>(
                                       opt.time_limit_seconds))
                    : std::chrono::steady_clock::time_point::max();
  }

  LPSolution run() {
    build();
    LPSolution out;
    if (m_ == 0) {
      solve_unconstrained(out);
      return out;
    }
    if (needs_phase1_ && !phase1(out)) return out;
    phase2(out);
    return out;
  }

 private:
  // Column layout: [0, n) structural, [n, n + m) slacks, then artificials.
  void build() {
    n_ = lp_.num_cols();
    m_ = lp_.num_rows();
    flip_ = lp_.sense == Sense::kMaximize;

    cost_.assign(n_ + m_, 0.0);
    lb_.assign(n_ + m_, 0.0);
    ub_.assign(n_ + m_, 0.0);
    for (int j = 0; j < n_; ++j) {
      cost_[j] = flip_ ? -lp_.objective[j] : lp_.objective[j];
      lb_[j] = lp_.lower[j];
      ub_[j] = lp_.upper[j];
      if (lb_[j] > ub_[j] + 1e-12) throw SolverError("variable with empty bound interval");
    }
    for (int i = 0; i < m_; ++i) {
      switch (lp_.relations[i]) {
        case Relation::kLessEqual:
          lb_[n_ + i] = 0.0;
          ub_[n_ + i] = kInf;
          break;
        case Relation::kGreaterEqual:
          lb_[n_ + i] = -kInf;
          ub_[n_ + i] = 0.0;
          break;
        case Relation::kEqual:
          lb_[n_ + i] = 0.0;
          ub_[n_ + i] = 0.0;
          break;
      }
    }

    // Column-major matrix over structural and slack columns.
    std::vector<int> count(n_, 0);
    for (const auto& e : lp_.entries) {
      if (e.row < 0 || e.row >= m_ || e.col < 0 || e.col >= n_)
        throw SolverError("matrix entry out of range");
      ++count[e.col];
    }
    col_start_.assign(n_ + m_ + 1, 0);
    for (int j = 0; j < n_; ++j) col_start_[j + 1] = col_start_[j] + count[j];
    int struct_nnz = col_start_[n_];
    col_row_.resize(struct_nnz + m_);
    col_val_.resize(struct_nnz + m_);
    std::vector<int> fill(n_, 0);
    for (const auto& e : lp_.entries) {
      int pos = col_start_[e.col] + fill[e.col]++;
      col_row_[pos] = e.row;
      col_val_[pos] = e.value;
    }
    // Merge duplicate entries within each column.
    int write = 0;
    std::vector<int> new_start(n_ + m_ + 1, 0);
    std::vector<double> dense(m_, 0.0);
    for (int j = 0; j < n_; ++j) {
      new_start[j] = write;
      int b = col_start_[j], e = col_start_[j + 1];
      for (int k = b; k < e; ++k) dense[col_row_[k]] += col_val_[k];
      std::vector<int> rows;
      for (int k = b; k < e; ++k) rows.push_back(col_row_[k]);
      std::sort(rows.begin(), rows.end());
      rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
      for (int r : rows) {
        col_row_[write] = r;
        col_val_[write] = dense[r];
        dense[r] = 0.0;
        ++write;
      }
      new_start[j + 1] = write;
    }
    for (int i = 0; i < m_; ++i) {
      new_start[n_ + i] = write;
      col_row_[write] = i;
      col_val_[write] = 1.0;
      ++write;
      new_start[n_ + i + 1] = write;
    }
    col_row_.resize(write);
    col_val_.resize(write);
    col_start_ = std::move(new_start);

    // Initial point: structurals at the finite bound closest to zero, free
    // variables at zero, slacks at zero.
    state_.assign(n_ + m_, VarState::kAtLower);
    xval_.assign(n_ + m_, 0.0);
    for (int j = 0; j < n_ + m_; ++j) {
      if (finite(lb_[j]) && finite(ub_[j])) {
        bool pick_lower = std::fabs(lb_[j]) <= std::fabs(ub_[j]);
        state_[j] = pick_lower ? VarState::kAtLower : VarState::kAtUpper;
        xval_[j] = pick_lower ? lb_[j] : ub_[j];
      } else if (finite(lb_[j])) {
        state_[j] = VarState::kAtLower;
        xval_[j] = lb_[j];
      } else if (finite(ub_[j])) {
        state_[j] = VarState::kAtUpper;
        xval_[j] = ub_[j];
      } else {
        state_[j] = VarState::kFreeZero;
        xval_[j] = 0.0;
      }
    }

    if (m_ == 0) return;

    // Row residuals decide between a slack start and an artificial start.
    std::vector<double> resid(lp_.rhs);
    for (int j = 0; j < n_; ++j) {
      double v = xval_[j];
      if (v == 0.0) continue;
      for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) resid[col_row_[k]] -= col_val_[k] * v;
    }
    basis_.assign(m_, -1);
    needs_phase1_ = false;
    for (int i = 0; i < m_; ++i) {
      int slack = n_ + i;
      if (resid[i] >= lb_[slack] - opt_.feasibility_tol &&
          resid[i] <= ub_[slack] + opt_.feasibility_tol) {
        basis_[i] = slack;
        state_[slack] = VarState::kBasic;
        xval_[slack] = resid[i];
      } else {
        double sgn = resid[i] >= 0.0 ? 1.0 : -1.0;
        int art = static_cast<int>(cost_.size());
        cost_.push_back(0.0);
        lb_.push_back(0.0);
        ub_.push_back(kInf);
        state_.push_back(VarState::kBasic);
        xval_.push_back(std::fabs(resid[i]));
        col_start_.push_back(static_cast<int>(col_row_.size()) + 1);
        col_row_.push_back(i);
        col_val_.push_back(sgn);
        basis_[i] = art;
        artificials_.push_back(art);
        needs_phase1_ = true;
      }
    }
    total_cols_ = static_cast<int>(cost_.size());
  }

  void solve_unconstrained(LPSolution& out) {
    out.x.assign(n_, 0.0);
    double obj = 0.0;
    for (int j = 0; j < n_; ++j) {
      double c = cost_[j];
      double v;
      if (c > 0) {
        v = finite(lb_[j]) ? lb_[j] : -kInf;
      } else if (c < 0) {
        v = finite(ub_[j]) ? ub_[j] : kInf;
      } else {
        v = finite(lb_[j]) ? lb_[j] : (finite(ub_[j]) ? ub_[j] : 0.0);
      }
      if (!finite(v)) {
        out.status = LPStatus::kUnbounded;
        out.ray.assign(n_, 0.0);
        out.ray[j] = c > 0 ? -1.0 : 1.0;
        return;
      }
      out.x[j] = v;
      obj += c * v;
    }
    out.status = LPStatus::kOptimal;
    out.objective = flip_ ? -obj : obj;
    out.duals.clear();
    out.reduced_costs.resize(n_);
    for (int j = 0; j < n_; ++j) out.reduced_costs[j] = flip_ ? lp_.objective[j] : cost_[j];
  }

  void refactor() {
    std::vector<double> mat(static_cast<size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      int j = basis_[i];
      for (int k = col_start_[j]; k < col_start_[j + 1]; ++k)
        mat[static_cast<size_t>(col_row_[k]) * m_ + i] = col_val_[k];
    }
    lu_.factor(std::move(mat), m_, deadline_);
    etas_.clear();
    eta_rows_.clear();
    recompute_basics();
  }

  void recompute_basics() {
    std::vector<double> r(lp_.rhs);
    for (int j = 0; j < total_cols_; ++j) {
      if (state_[j] == VarState::kBasic) continue;
      double v = xval_[j];
      if (v == 0.0) continue;
      for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) r[col_row_[k]] -= col_val_[k] * v;
    }
    ftran(r);
    for (int i = 0; i < m_; ++i) xval_[basis_[i]] = r[i];
  }

  void ftran(std::vector<double>& v) const {
    lu_.solve(v);
    for (size_t k = 0; k < etas_.size(); ++k) {
      const std::vector<double>& w = etas_[k];
      int r = eta_rows_[k];
      double t = v[r] / w[r];
      if (t != 0.0) {
        for (int i = 0; i < m_; ++i) v[i] -= w[i] * t;
        v[r] = t;
      } else {
        v[r] = 0.0;
      }
    }
  }

  void btran(std::vector<double>& v) const {
    for (size_t k = etas_.size(); k-- > 0;) {
      const std::vector<double>& w = etas_[k];
      int r = eta_rows_[k];
      double s = v[r];
      for (int i = 0; i < m_; ++i) {
        if (i != r) s -= w[i] * v[i];
      }
      v[r] = s / w[r];
    }
    lu_.solve_transpose(v);
  }

  std::vector<double> column(int j) const {
    std::vector<double> a(m_, 0.0);
    for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) a[col_row_[k]] = col_val_[k];
    return a;
  }

  double col_dot(int j, const std::vector<double>& y) const {
    double s = 0.0;
    for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) s += col_val_[k] * y[col_row_[k]];
    return s;
  }

  // One simplex phase on the active cost vector. Returns false on unbounded.
  bool iterate(const std::vector<double>& cost, int max_iters, LPSolution* unbounded_out) {
    refactor();
    int degen = 0;
    bool bland = false;
    std::vector<double> y(m_), w(m_);
    for (int it = 0; it < max_iters; ++it) {
      ++iterations_;
      if (opt_.time_limit_seconds > 0 && (iterations_ & 31) == 0 &&
          std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                        start_)
                  .count() > opt_.time_limit_seconds) {
        throw LPTimeout("simplex ran past its wall clock budget");
      }
      for (int i = 0; i < m_; ++i) y[i] = cost[basis_[i]];
      btran(y);

      int entering = -1;
      double best = opt_.optimality_tol;
      int dir = 0;
      for (int j = 0; j < total_cols_; ++j) {
        VarState st = state_[j];
        if (st == VarState::kBasic) continue;
        if (lb_[j] == ub_[j]) continue;
        double d = cost[j] - col_dot(j, y);
        double viol = 0.0;
        int cdir = 0;
        if (st == VarState::kAtLower && d < -opt_.optimality_tol) {
          viol = -d;
          cdir = 1;
        } else if (st == VarState::kAtUpper && d > opt_.optimality_tol) {
          viol = d;
          cdir = -1;
        } else if (st == VarState::kFreeZero && std::fabs(d) > opt_.optimality_tol) {
          viol = std::fabs(d);
          cdir = d < 0 ? 1 : -1;
        }
        if (cdir == 0) continue;
        if (bland) {
          entering = j;
          dir = cdir;
          break;
        }
        if (viol > best) {
          best = viol;
          entering = j;
          dir = cdir;
        }
      }
      if (entering < 0) return true;

      std::vector<double> aq = column(entering);
      w = aq;
      ftran(w);

      // Ratio test: smallest step that drives a basic variable to a bound or
      // the entering variable to its opposite bound. Ties prefer the larger
      // pivot magnitude, then the lower variable index (lowest index only,
      // once Bland's rule is active).
      double t_best = kInf;
      int leave_pos = -1;
      double leave_pivot = 0.0;
      int leave_to_lower = 0;
      auto consider = [&](int i, double wi, double t, int to_lower) {
        if (t < 0.0) t = 0.0;
        bool take;
        if (leave_pos < 0 || t < t_best - 1e-12) {
          take = true;
        } else if (t > t_best + 1e-12) {
          take = false;
        } else if (bland) {
          take = basis_[i] < basis_[leave_pos];
        } else if (std::fabs(wi) > std::fabs(leave_pivot) + 1e-12) {
          take = true;
        } else if (std::fabs(wi) < std::fabs(leave_pivot) - 1e-12) {
          take = false;
        } else {
          take = basis_[i] < basis_[leave_pos];
        }
        if (take) {
          t_best = std::min(t_best, t);
          leave_pos = i;
          leave_pivot = wi;
          leave_to_lower = to_lower;
        }
      };
      for (int i = 0; i < m_; ++i) {
        double wi = dir * w[i];
        int bj = basis_[i];
        if (wi > opt_.pivot_tol) {
          if (!finite(lb_[bj])) continue;
          consider(i, wi, (xval_[bj] - lb_[bj]) / wi, 1);
        } else if (wi < -opt_.pivot_tol) {
          if (!finite(ub_[bj])) continue;
          consider(i, wi, (xval_[bj] - ub_[bj]) / wi, 0);
        }
      }
      double t_own = kInf;
      if (state_[entering] == VarState::kAtLower && finite(ub_[entering]))
        t_own = ub_[entering] - lb_[entering];
      else if (state_[entering] == VarState::kAtUpper && finite(lb_[entering]))
        t_own = ub_[entering] - lb_[entering];

      if (t_best >= kInf && t_own >= kInf) {
        if (unbounded_out != nullptr) {
          unbounded_out->status = LPStatus::kUnbounded;
          unbounded_out->ray.assign(n_, 0.0);
          if (entering < n_) unbounded_out->ray[entering] = dir;
          for (int i = 0; i < m_; ++i) {
            int bj = basis_[i];
            if (bj < n_) unbounded_out->ray[bj] = -dir * w[i];
          }
        }
        return false;
      }

      if (t_own <= t_best) {
        // Bound flip, basis unchanged.
        double t = t_own;
        for (int i = 0; i < m_; ++i) {
          if (w[i] != 0.0) xval_[basis_[i]] -= dir * t * w[i];
        }
        if (state_[entering] == VarState::kAtLower) {
          state_[entering] = VarState::kAtUpper;
          xval_[entering] = ub_[entering];
        } else {
          state_[entering] = VarState::kAtLower;
          xval_[entering] = lb_[entering];
        }
        if (t < 1e-11) ++degen; else degen = 0;
      } else {
        double t = t_best;
        for (int i = 0; i < m_; ++i) {
          if (w[i] != 0.0) xval_[basis_[i]] -= dir * t * w[i];
        }
        int leaving = basis_[leave_pos];
        xval_[leaving] = leave_to_lower ? lb_[leaving] : ub_[leaving];
        state_[leaving] = leave_to_lower ? VarState::kAtLower : VarState::kAtUpper;
        if (lb_[leaving] == ub_[leaving]) state_[leaving] = VarState::kAtLower;
        xval_[entering] = xval_[entering] + dir * t;
        state_[entering] = VarState::kBasic;
        basis_[leave_pos] = entering;
        etas_.push_back(w);
        eta_rows_.push_back(leave_pos);
        if (static_cast<int>(etas_.size()) >= opt_.refactor_interval) refactor();
        if (t < 1e-11) ++degen; else degen = 0;
      }
      if (degen > opt_.degeneracy_limit) bland = true;
      if (degen == 0) bland = false;
    }
    throw NumericalFailure("simplex iteration limit exceeded");
  }

  int max_iters() const {
    if (opt_.max_iterations > 0) return opt_.max_iterations;
    return 20000 + 200 * (m_ + n_);
  }

  bool phase1(LPSolution& out) {
    std::vector<double> c1(total_cols_, 0.0);
    for (int a : artificials_) c1[a] = 1.0;
    if (!iterate(c1, max_iters(), nullptr))
      throw SolverError("phase one reported an unbounded direction");
    double v1 = 0.0;
    for (int a : artificials_) v1 += xval_[a];
    if (v1 > 1e-7) {
      // Infeasible: the phase-one duals are a Farkas certificate.
      std::vector<double> y(m_);
      for (int i = 0; i < m_; ++i) y[i] = c1[basis_[i]];
      btran(y);
      out.status = LPStatus::kInfeasible;
      out.ray.assign(m_, 0.0);
      for (int i = 0; i < m_; ++i) out.ray[i] = y[i];
      out.iterations = iterations_;
      return false;
    }
    // Pivot residual artificials out of the basis where possible; rows whose
    // artificial cannot leave are redundant and keep it fixed at zero.
    for (int i = 0; i < m_; ++i) {
      int bj = basis_[i];
      bool is_art = bj >= n_ + m_;
      if (!is_art) continue;
      std::vector<double> rho(m_, 0.0);
      rho[i] = 1.0;
      btran(rho);
      int replacement = -1;
      for (int j = 0; j < n_ + m_; ++j) {
        if (state_[j] == VarState::kBasic) continue;
        if (lb_[j] == ub_[j]) continue;
        if (std::fabs(col_dot(j, rho)) > 1e-7) {
          replacement = j;
          break;
        }
      }
      if (replacement < 0) continue;
      state_[bj] = VarState::kAtLower;
      xval_[bj] = 0.0;
      state_[replacement] = VarState::kBasic;
      basis_[i] = replacement;
      refactor();
    }
    for (int a : artificials_) {
      lb_[a] = 0.0;
      ub_[a] = 0.0;
      if (state_[a] != VarState::kBasic) {
        state_[a] = VarState::kAtLower;
        xval_[a] = 0.0;
      }
    }
    return true;
  }

  void phase2(LPSolution& out) {
    std::vector<double> c2(total_cols_, 0.0);
    for (int j = 0; j < n_ + m_; ++j) c2[j] = cost_[j];
    LPSolution probe;
    if (!iterate(c2, max_iters(), &probe)) {
      out = probe;
      out.iterations = iterations_;
      return;
    }
    out.status = LPStatus::kOptimal;
    out.iterations = iterations_;
    out.x.resize(n_);
    for (int j = 0; j < n_; ++j) {
      double v = xval_[j];
      if (finite(lb_[j]) && std::fabs(v - lb_[j]) < 1e-9) v = lb_[j];
      if (finite(ub_[j]) && std::fabs(v - ub_[j]) < 1e-9) v = ub_[j];
      out.x[j] = v;
    }
    double obj = 0.0;
    for (int j = 0; j < n_; ++j) obj += cost_[j] * out.x[j];
    out.objective = flip_ ? -obj : obj;

    std::vector<double> y(m_);
    for (int i = 0; i < m_; ++i) y[i] = c2[basis_[i]];
    btran(y);
    out.duals.resize(m_);
    for (int i = 0; i < m_; ++i) out.duals[i] = flip_ ? -y[i] : y[i];
    out.reduced_costs.resize(n_);
    for (int j = 0; j < n_; ++j) {
      double d = cost_[j] - col_dot(j, y);
      if (state_[j] == VarState::kBasic) d = 0.0;
      out.reduced_costs[j] = flip_ ? -d : d;
    }
    out.basis = basis_;
    std::sort(out.basis.begin(), out.basis.end());
  }

  const LinearProgram& lp_;
  SimplexOptions opt_;
  bool flip_ = false;
  int n_ = 0, m_ = 0, total_cols_ = 0;
  bool needs_phase1_ = false;
  std::vector<double> cost_, lb_, ub_, xval_;
  std::vector<int> col_start_, col_row_;
  std::vector<double> col_val_;
  std::vector<VarState> state_;
  std::vector<int> basis_;
  std::vector<int> artificials_;
  DenseLU lu_;
  std::vector<std::vector<double>> etas_;
  std::vector<int> eta_rows_;
  int iterations_ = 0;
  std::chrono::steady_clock::time_point start_;
  std::chrono::steady_clock::time_point deadline_;
};

}  // namespace

LPSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options) {
  SimplexOptions opts = options;
  LPSolution sol;
  for (int attempt = 0;; ++attempt) {
    try {
      Simplex solver(lp, opts);
      sol = solver.run();
      break;
    } catch (const NumericalFailure&) {
      if (attempt >= 2) throw;
      // A shorter eta chain and a stricter pivot threshold keep the basis
      // better conditioned on the rerun.
      opts.refactor_interval = std::max(8, opts.refactor_interval / 4);
      opts.pivot_tol = std::min(1e-6, opts.pivot_tol * 100.0);
      if (log::enabled(log::Level::kDebug)) {
        log::debug("lp retry " + std::to_string(attempt + 1) +
                   ": basis went singular, tightening pivot tolerance");
      }
    }
  }
  if (sol.status == LPStatus::kOptimal && log::enabled(log::Level::kDebug)) {
    double dual_obj = 0.0;
    for (int i = 0; i < lp.num_rows(); ++i) dual_obj += sol.duals[i] * lp.rhs[i];
    for (int j = 0; j < lp.num_cols(); ++j) dual_obj += sol.reduced_costs[j] * sol.x[j];
    log::debug("lp solved: obj=" + std::to_string(sol.objective) +
               " gap=" + std::to_string(sol.objective - dual_obj) +
               " iters=" + std::to_string(sol.iterations));
  }
  return sol;
}

namespace {

std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string col_label(const LinearProgram& lp, int j) {
  if (!lp.col_names[j].empty()) return lp.col_names[j];
  return "x" + std::to_string(j);
}

}  // namespace

std::string write_lp_format(const LinearProgram& lp) {
  std::ostringstream os;
  os << (lp.sense == Sense::kMaximize ? "Maximize\n" : "Minimize\n");
  os << " obj:";
  bool first = true;
  for (int j = 0; j < lp.num_cols(); ++j) {
    double c = lp.objective[j];
    if (c == 0.0) continue;
    os << (c >= 0 && !first ? " + " : (c < 0 ? " - " : " ")) << fmt_num(std::fabs(c)) << " "
       << col_label(lp, j);
    first = false;
  }
  if (first) os << " 0";
  os << "\nSubject To\n";
  // Gather row entries in column order for stable output.
  std::vector<std::vector<std::pair<int, double>>> rows(lp.num_rows());
  for (const auto& e : lp.entries) rows[e.row].push_back({e.col, e.value});
  for (int i = 0; i < lp.num_rows(); ++i) {
    auto& r = rows[i];
    std::sort(r.begin(), r.end());
    os << " " << (lp.row_names[i].empty() ? "r" + std::to_string(i) : lp.row_names[i]) << ":";
    bool f2 = true;
    for (auto& [col, val] : r) {
      if (val == 0.0) continue;
      os << (val >= 0 && !f2 ? " + " : (val < 0 ? " - " : " ")) << fmt_num(std::fabs(val)) << " "
         << col_label(lp, col);
      f2 = false;
    }
    if (f2) os << " 0";
    switch (lp.relations[i]) {
      case Relation::kLessEqual: os << " <= "; break;
      case Relation::kEqual: os << " = "; break;
      case Relation::kGreaterEqual: os << " >= "; break;
    }
    os << fmt_num(lp.rhs[i]) << "\n";
  }
  os << "Bounds\n";
  for (int j = 0; j < lp.num_cols(); ++j) {
    double l = lp.lower[j], u = lp.upper[j];
    std::string nm = col_label(lp, j);
    if (l <= -kInfinity && u >= kInfinity) {
      os << " " << nm << " free\n";
    } else if (l <= -kInfinity) {
      os << " -inf <= " << nm << " <= " << fmt_num(u) << "\n";
    } else if (u >= kInfinity) {
      os << " " << fmt_num(l) << " <= " << nm << "\n";
    } else {
      os << " " << fmt_num(l) << " <= " << nm << " <= " << fmt_num(u) << "\n";
    }
  }
  os << "End\n";
  return os.str();
}

}  // namespace transitmarket
