#include "tilegp/optimizer.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace tilegp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct BudgetExhausted {};  // internal control flow: evaluation budget hit

// Maximizes g's + s'Hs/2 subject to ||s|| <= delta and lo <= s <= hi,
// with fixed (frozen) coordinates pinned at zero. Projected truncated CG
// with active-set restarts; boundary steps are taken whenever curvature
// along the search direction is nonnegative.
VectorXd trs_box_max(const VectorXd& g, const MatrixXd& h, double delta, const VectorXd& lo,
                     const VectorXd& hi, const std::vector<bool>& frozen) {
  const int n = static_cast<int>(g.size());
  VectorXd s = VectorXd::Zero(n);
  std::vector<bool> active(frozen);
  const double tiny = 1e-13 * (1.0 + g.cwiseAbs().maxCoeff());

  for (int restart = 0; restart <= n; ++restart) {
    VectorXd r = g + h * s;  // ascent direction of the model
    for (int i = 0; i < n; ++i) {
      if (frozen[i]) active[i] = true;
      else if (s[i] >= hi[i] - 1e-14 && r[i] > 0.0) active[i] = true;
      else if (s[i] <= lo[i] + 1e-14 && r[i] < 0.0) active[i] = true;
      else active[i] = false;
    }
    for (int i = 0; i < n; ++i)
      if (active[i]) r[i] = 0.0;
    if (r.norm() <= tiny) break;

    VectorXd p = r;
    bool boundary_hit = false;
    for (int it = 0; it < 2 * n + 4 && !boundary_hit; ++it) {
      VectorXd hp = h * p;
      for (int i = 0; i < n; ++i)
        if (active[i]) hp[i] = 0.0;
      const double curv = p.dot(hp);
      const double slope = r.dot(p);
      if (slope <= 0.0) break;

      // largest feasible step along p
      double amax = kInf;
      int hit_box = -1;
      const double pp = p.squaredNorm();
      const double sp = s.dot(p);
      const double ss = s.squaredNorm();
      const double disc = sp * sp + pp * (delta * delta - ss);
      const double a_tr = (-sp + std::sqrt(std::max(0.0, disc))) / pp;
      amax = a_tr;
      for (int i = 0; i < n; ++i) {
        if (active[i] || p[i] == 0.0) continue;
        const double a_i = (p[i] > 0.0) ? (hi[i] - s[i]) / p[i] : (lo[i] - s[i]) / p[i];
        if (a_i < amax) {
          amax = a_i;
          hit_box = i;
        }
      }
      if (!(amax > 0.0)) break;

      double alpha;
      if (curv < 0.0) {
        alpha = std::min(-slope / curv, amax);
      } else {
        alpha = amax;  // nonconcave direction: go to the boundary
      }
      s += alpha * p;
      if (alpha == amax) {
        if (hit_box >= 0) {
          s[hit_box] = (p[hit_box] > 0.0) ? hi[hit_box] : lo[hit_box];
          boundary_hit = true;  // re-enter with this bound active
        } else {
          return s;  // trust-region sphere is terminal
        }
      } else {
        VectorXd rn = g + h * s;
        for (int i = 0; i < n; ++i)
          if (active[i]) rn[i] = 0.0;
        const double beta = rn.squaredNorm() / r.squaredNorm();
        if (rn.norm() <= tiny) return s;
        p = rn + beta * p;
        r = rn;
      }
    }
    if (!boundary_hit) break;
  }
  return s;
}

class Maximizer {
 public:
  Maximizer(const std::function<double(std::span<const double>)>& objective,
            const OptimizerConfig& cfg)
      : f_(objective), cfg_(cfg), n_(static_cast<int>(cfg.lower.size())) {
    validate();
    lower_ = Eigen::Map<const VectorXd>(cfg_.lower.data(), n_);
    upper_ = Eigen::Map<const VectorXd>(cfg_.upper.data(), n_);
    x0_ = cfg_.initial.empty() ? lower_ : VectorXd(Eigen::Map<const VectorXd>(cfg_.initial.data(), n_));
    frozen_.resize(n_);
    double min_gap = kInf;
    for (int i = 0; i < n_; ++i) {
      frozen_[i] = upper_[i] - lower_[i] <= 0.0;
      if (!frozen_[i]) min_gap = std::min(min_gap, upper_[i] - lower_[i]);
    }
    nfree_ = static_cast<int>(std::count(frozen_.begin(), frozen_.end(), false));
    rho_beg_ = cfg_.initial_radius > 0.0 ? cfg_.initial_radius : 0.1 * (nfree_ ? min_gap : 1.0);
    if (nfree_) rho_beg_ = std::min(rho_beg_, 0.25 * min_gap);
    rho_end_ = std::max(1e-10, 1e-7 * rho_beg_);
  }

  OptTrace run() {
    try {
      stencil(x0_, rho_beg_);
      if (nfree_ > 0) main_loop();
    } catch (BudgetExhausted&) {
    }
    if (!have_finite_) {
      trace_.best_point.assign(x0_.data(), x0_.data() + n_);
      trace_.best_value = -kInf;
      throw OptimizationError("maximize: objective returned -inf/NaN at every evaluated point", trace_);
    }
    trace_.best_value = fbest_;
    trace_.best_point.assign(xbest_.data(), xbest_.data() + n_);
    return trace_;
  }

 private:
  void validate() const {
    if (n_ == 0 || cfg_.upper.size() != static_cast<std::size_t>(n_))
      throw std::invalid_argument("maximize: bounds must be nonempty and equal-length");
    if (!cfg_.initial.empty() && cfg_.initial.size() != static_cast<std::size_t>(n_))
      throw std::invalid_argument("maximize: initial point has wrong dimension");
    if (!(cfg_.tol > 0.0)) throw std::invalid_argument("maximize: tol must be positive");
    for (int i = 0; i < n_; ++i) {
      if (!(cfg_.lower[i] <= cfg_.upper[i])) throw std::invalid_argument("maximize: lower > upper");
      if (!cfg_.initial.empty() &&
          (cfg_.initial[i] < cfg_.lower[i] || cfg_.initial[i] > cfg_.upper[i]))
        throw std::invalid_argument("maximize: initial point outside bounds");
    }
  }

  // Evaluates the objective at clamp(x); records the trace; maintains the
  // incumbent; returns a finite value (non-finite results are mapped to a
  // penalty below every finite value seen).
  double eval(VectorXd x) {
    if (cfg_.max_iters > 0 && trace_.iterations >= cfg_.max_iters) throw BudgetExhausted{};
    for (int i = 0; i < n_; ++i) x[i] = std::clamp(x[i], lower_[i], upper_[i]);
    const auto t0 = std::chrono::steady_clock::now();
    double v = f_(std::span<const double>(x.data(), static_cast<std::size_t>(n_)));
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    if (std::isnan(v)) v = -kInf;
    ++trace_.iterations;
    trace_.values.push_back(v);
    trace_.per_eval_times.push_back(dt.count());
    if (std::isfinite(v)) {
      last_eval_penalized_ = false;
      if (!have_finite_) {
        worst_finite_ = v;
        have_finite_ = true;
        fbest_ = v;
        xbest_ = x;
      }
      worst_finite_ = std::min(worst_finite_, v);
      if (v > fbest_) {
        fbest_ = v;
        xbest_ = x;
      }
      return v;
    }
    last_eval_penalized_ = true;
    return penalty();
  }

  double penalty() const {
    if (!have_finite_) return -1e12;
    return worst_finite_ - 10.0 * (std::fabs(worst_finite_) + 1.0);
  }

  void push_point(const VectorXd& x) {
    const double v = eval(x);
    pts_.push_back(x);
    vals_.push_back(v);
    penal_.push_back(last_eval_penalized_);
  }

  // Fresh 2*nfree+1 interpolation set around xc and a diagonal initial model.
  void stencil(const VectorXd& xc, double h) {
    pts_.clear();
    vals_.clear();
    penal_.clear();
    push_point(xc);
    const double c = vals_[0];
    grad_ = VectorXd::Zero(n_);
    hess_ = MatrixXd::Zero(n_, n_);
    base_ = xc;
    cval_ = c;
    for (int i = 0; i < n_; ++i) {
      if (frozen_[i]) continue;
      const double dir = (xc[i] + h <= upper_[i]) ? 1.0 : -1.0;
      const double a = dir * h;
      VectorXd xa = xc;
      xa[i] += a;
      push_point(xa);
      double b;
      if (xc[i] - h >= lower_[i] && xc[i] + h <= upper_[i]) b = -h;
      else b = 2.0 * a;
      VectorXd xb = xc;
      xb[i] += b;
      push_point(xb);
      const double fa = vals_[vals_.size() - 2] - c;
      const double fb = vals_.back() - c;
      const double det = a * b * b / 2.0 - b * a * a / 2.0;
      grad_[i] = (fa * b * b / 2.0 - fb * a * a / 2.0) / det;
      hess_(i, i) = (a * fb - b * fa) / det;
    }
    best_idx_ = 0;
    for (std::size_t j = 1; j < vals_.size(); ++j)
      if (vals_[j] > vals_[best_idx_]) best_idx_ = j;
    recentre();
  }

  // Shift the model base to the incumbent point.
  void recentre() {
    const VectorXd t = pts_[best_idx_] - base_;
    if (t.squaredNorm() == 0.0) return;
    cval_ += grad_.dot(t) + 0.5 * t.dot(hess_ * t);
    grad_ += hess_ * t;
    base_ = pts_[best_idx_];
  }

  double model_at(const VectorXd& x) const {
    const VectorXd d = x - base_;
    return cval_ + grad_.dot(d) + 0.5 * d.dot(hess_ * d);
  }

  // Least-Frobenius-norm-change refit: solves the KKT system of
  // min ||dHess||_F s.t. the updated model interpolates all current points.
  // Returns false when the interpolation geometry has degenerated.
  bool refit() {
    const int m = static_cast<int>(pts_.size());
    std::vector<int> free;
    for (int i = 0; i < n_; ++i)
      if (!frozen_[i]) free.push_back(i);
    const int nf = static_cast<int>(free.size());
    const double sigma = std::max(delta_, 1e-12);

    MatrixXd d(m, nf);
    VectorXd r(m);
    for (int j = 0; j < m; ++j) {
      const VectorXd dj = pts_[j] - base_;
      for (int i = 0; i < nf; ++i) d(j, i) = dj[free[i]] / sigma;
      r[j] = vals_[j] - model_at(pts_[j]);
    }

    const int dim = m + 1 + nf;
    MatrixXd w = MatrixXd::Zero(dim, dim);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const double t = d.row(i).dot(d.row(j));
        w(i, j) = 0.5 * t * t;
      }
    w.block(0, m, m, 1).setOnes();
    w.block(m, 0, 1, m).setOnes();
    w.block(0, m + 1, m, nf) = d;
    w.block(m + 1, 0, nf, m) = d.transpose();

    VectorXd rhs = VectorXd::Zero(dim);
    rhs.head(m) = r;
    Eigen::FullPivLU<MatrixXd> lu(w);
    if (!lu.isInvertible()) return false;
    const VectorXd sol = lu.solve(rhs);
    const VectorXd lambda = sol.head(m);
    if (!sol.allFinite() || lambda.cwiseAbs().maxCoeff() > 1e13) return false;

    cval_ += sol[m];
    for (int i = 0; i < nf; ++i) grad_[free[i]] += sol[m + 1 + i] / sigma;
    for (int i = 0; i < nf; ++i)
      for (int j = 0; j < nf; ++j) {
        double acc = 0.0;
        for (int k = 0; k < m; ++k) acc += lambda[k] * d(k, i) * d(k, j);
        hess_(free[i], free[j]) += acc / (sigma * sigma);
      }
    return true;
  }

  void main_loop() {
    delta_ = rho_beg_;
    double rho = rho_beg_;
    double stage_start = fbest_;
    int fails_at_rho = 0;

    // ends the current trust-region stage; returns false when converged
    const auto next_stage = [&] {
      const double gain = fbest_ - stage_start;
      if (gain < cfg_.tol || rho <= rho_end_) return false;
      stage_start = fbest_;
      rho *= 0.25;
      delta_ = rho * 4.0;
      fails_at_rho = 0;
      return true;
    };

    while (true) {
      recentre();
      const VectorXd s =
          trs_box_max(grad_, hess_, delta_, lower_ - base_, upper_ - base_, frozen_);
      const double pred = grad_.dot(s) + 0.5 * s.dot(hess_ * s);
      const double steplen = s.norm();

      if (pred <= 1e-13 * (1.0 + std::fabs(fbest_)) || steplen < 0.1 * rho) {
        if (delta_ > rho * 1.0000001) {
          delta_ = std::max(rho, 0.25 * delta_);
          continue;
        }
        if (!next_stage()) break;
        continue;
      }

      const double fnew = eval(base_ + s);
      const bool fnew_penalized = last_eval_penalized_;
      const double ratio = (fnew - vals_[best_idx_]) / pred;
      if (ratio < 0.1) {
        delta_ = std::max(rho, std::min(0.5 * delta_, 0.5 * steplen));
      } else if (ratio > 0.7 && steplen >= 0.9 * delta_) {
        delta_ = std::min(2.0 * delta_, (upper_ - lower_).norm());
      }

      replace_point(base_ + s, fnew, fnew_penalized);
      if (!refit()) stencil(xbest_, std::max(rho, 0.5 * delta_));

      // Failed steps at the radius floor double as geometry repair while the
      // set is still spread out; once every point sits within ~2 rho of the
      // incumbent the model has seen all it will see at this scale.
      if (ratio > 0.0) {
        fails_at_rho = 0;
      } else if (delta_ <= rho * 1.0000001) {
        double maxdist2 = 0.0;
        for (const auto& p : pts_) maxdist2 = std::max(maxdist2, (p - pts_[best_idx_]).squaredNorm());
        if (maxdist2 <= 6.25 * rho * rho && ++fails_at_rho >= 2 && !next_stage()) break;
      }
    }
  }

  void replace_point(const VectorXd& x, double v, bool v_penalized) {
    // Drop a penalized point first, otherwise the one farthest from the
    // incumbent; the incumbent itself is never dropped.
    int drop = -1;
    double worst_dist = -1.0;
    for (std::size_t j = 0; j < pts_.size(); ++j) {
      if (j == best_idx_) continue;
      if (penal_[j]) {
        drop = static_cast<int>(j);
        break;
      }
      const double dist = (pts_[j] - pts_[best_idx_]).squaredNorm();
      if (dist > worst_dist) {
        worst_dist = dist;
        drop = static_cast<int>(j);
      }
    }
    pts_[drop] = x;
    vals_[drop] = v;
    penal_[drop] = v_penalized;
    if (v > vals_[best_idx_]) best_idx_ = drop;
  }

  const std::function<double(std::span<const double>)>& f_;
  OptimizerConfig cfg_;
  int n_;
  int nfree_ = 0;
  VectorXd lower_, upper_, x0_;
  std::vector<bool> frozen_;
  double rho_beg_ = 0.0, rho_end_ = 0.0;

  // interpolation set and quadratic model around base_
  std::vector<VectorXd> pts_;
  std::vector<double> vals_;
  std::vector<bool> penal_;
  std::size_t best_idx_ = 0;
  VectorXd base_, grad_;
  MatrixXd hess_;
  double cval_ = 0.0;
  double delta_ = 0.0;

  // incumbent and trace
  OptTrace trace_;
  bool have_finite_ = false;
  bool last_eval_penalized_ = false;
  double fbest_ = -kInf, worst_finite_ = 0.0;
  VectorXd xbest_;
};

}  // namespace

OptTrace maximize(const std::function<double(std::span<const double>)>& objective,
                  const OptimizerConfig& config) {
  return Maximizer(objective, config).run();
}

}  // namespace tilegp
