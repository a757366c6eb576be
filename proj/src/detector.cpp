#include "boxguide/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/minima.hpp>

#include "boxguide/asymptotics.hpp"
#include "boxguide/errors.hpp"

namespace boxguide {

namespace {

bool two_channel(Variant v) { return channel_count(v) == 2; }

double coupling(Variant v, double l) { return ledge_coupling(v, l); }

ScatteringMatrix smatrix_at(double eps, double l, double mu, Variant v, int N) {
  ProblemConfig cfg;
  cfg.eps = eps;
  cfg.l = l;
  cfg.mu = mu;
  cfg.variant = v;
  cfg.N = N;
  return assemble_augmented_smatrix(cfg);
}

struct Evaluation {
  ScatteringMatrix S;
  cplx s11_hat;
  cplx s01_hat;
  double im_s11 = 0.0;
  double re_s01 = 0.0;
};

Evaluation evaluate(const FixedPointState& st, int N) {
  Evaluation e;
  const double l = st.l();
  const double mu = st.mu();
  if (!(mu > 0.0) || !(l > 0.0)) {
    throw DomainError("iterate left the admissible region (μ = " + std::to_string(mu) +
                      ", l = " + std::to_string(l) + ")");
  }
  e.S = smatrix_at(st.eps, l, mu, st.variant, N);
  const int x = e.S.size() - 1;
  const cplx s11 = e.S.S(x, x);
  e.im_s11 = s11.imag();
  if (two_channel(st.variant)) {
    e.s11_hat = s11 - s11_leading(mu, l);
    e.s01_hat = e.S.S(0, 1) - std::sqrt(st.eps) * s01_leading(mu, l);
    e.re_s01 = e.S.S(0, 1).real();
  } else {
    e.s11_hat = s11 - scalar_leading(mu, coupling(st.variant, l));
  }
  return e;
}

FixedPointState project(FixedPointState st, const DetectorOptions& opts) {
  const double r = scaled_radius(st, opts);
  if (r > opts.rho) {
    st.dmu *= opts.rho / r;
    st.dl *= opts.rho / r;
  }
  return st;
}

TrappedModeResult finalize(TrappedModeResult res, const FixedPointState& st,
                           const DetectorOptions& opts) {
  const Evaluation e = evaluate(st, opts.N);
  const int x = e.S.size() - 1;
  res.l = st.l();
  res.mu = st.mu();
  res.lambda = st.lambda();
  res.dmu = st.dmu;
  res.dl = st.dl;
  res.s11_residual = std::abs(e.S.S(x, x) + 1.0);
  res.s01_residual = two_channel(st.variant) ? std::abs(e.S.S(0, 1)) : 0.0;
  res.S = e.S;
  res.converged = res.converged && res.s11_residual <= 1e-6 && res.s01_residual <= 1e-6 &&
                  res.lambda > 0.0 && res.lambda < trapping_threshold(st.variant);
  if (!res.converged && res.message.empty()) res.message = "criterion residual above 1e-6";
  ProblemConfig cfg;
  cfg.eps = st.eps;
  cfg.l = res.l;
  cfg.mu = res.mu;
  cfg.variant = st.variant;
  cfg.N = opts.N;
  try {
    res.mode = solve_scattering(cfg, x, RadiationCondition::Artificial);
  } catch (const std::exception&) {
    res.mode.reset();
  }
  return res;
}

}  // namespace

CriterionResidual criterion_residual(double eps, double l, double mu, Variant v, int N) {
  // At ε = 0 every μ lands on the threshold itself. The straight-strip matrix in the
  // standard basis does not depend on λ below the threshold, so that branch is used.
  if (eps == 0.0) {
    ProblemConfig cfg;
    cfg.l = l;
    cfg.lambda = 0.5 * trapping_threshold(v);
    cfg.variant = v;
    cfg.N = N;
    const ScatteringMatrix S = assemble_augmented_smatrix(cfg);
    const int x = S.size() - 1;
    return {S.S(x, x) + 1.0, two_channel(v) ? S.S(0, 1) : cplx{}};
  }
  const ScatteringMatrix S = smatrix_at(eps, l, mu, v, N);
  const int x = S.size() - 1;
  return {S.S(x, x) + 1.0, two_channel(v) ? S.S(0, 1) : cplx{}};
}

double FixedPointState::mu() const {
  const double c = coupling(variant, l());
  return c * c + dmu;
}

double FixedPointState::lambda() const { return trapping_threshold(variant) - eps * eps * mu(); }

double mu_scale(const FixedPointState& st) {
  const double c = coupling(st.variant, st.l_star);
  return c * c;
}

double scaled_distance(const FixedPointState& a, const FixedPointState& b,
                       const DetectorOptions& opts) {
  return std::hypot((a.dmu - b.dmu) / mu_scale(a), (a.dl - b.dl) / opts.l_scale);
}

double scaled_radius(const FixedPointState& st, const DetectorOptions& opts) {
  return std::hypot(st.dmu / mu_scale(st), st.dl / opts.l_scale);
}

FixedPointState fixed_point_map(const FixedPointState& st, cplx s11_hat, cplx s01_hat,
                                const DetectorOptions& opts) {
  FixedPointState out = st;
  const double l = st.l();
  const double c = coupling(st.variant, l);
  out.dmu = -(2.0 * c * c + st.dmu) * s11_hat.imag();
  if (two_channel(st.variant)) {
    const double mu = st.mu();
    const double r = std::sqrt(mu);
    const double sign = std::lround(st.l_star) % 2 == 0 ? 1.0 : -1.0;
    const double arg = sign * std::pow(4.0 * mu, -0.25) / std::sqrt(2.0 * kPi) * (c * c + mu) /
                       (c + r) / std::sqrt(st.eps) * s01_hat.real();
    if (!(std::abs(arg) <= 1.0)) {
      throw StepError("arcsin argument " + std::to_string(arg) +
                      " outside [-1, 1]; reduce ε or the disk radius");
    }
    out.dl = std::asin(arg) / kPi;
  }
  out.iterations = st.iterations + 1;
  return project(out, opts);
}

FixedPointState fixed_point_step(const FixedPointState& st, const DetectorOptions& opts) {
  const Evaluation e = evaluate(st, opts.N);
  FixedPointState in = st;
  in.im_s11 = e.im_s11;
  in.re_s01 = e.re_s01;
  FixedPointState out = fixed_point_map(in, e.s11_hat, e.s01_hat, opts);
  out.im_s11 = e.im_s11;
  out.re_s01 = e.re_s01;
  return out;
}

TrappedModeResult find_trapped_from(double eps, int k, Variant v, double dmu0, double dl0,
                                    const DetectorOptions& opts) {
  if (!two_channel(v)) {
    throw DomainError("two-parameter search needs a two-channel variant; use find_trapped_scalar");
  }
  if (!(eps > 0.0)) throw DomainError("ε must be positive");
  if (k < 1) throw DomainError("base index k must be positive");
  ledge_coupling(v, 1.0);  // rejects odd truncation

  TrappedModeResult res;
  res.eps = eps;
  res.k = k;
  res.variant = v;
  FixedPointState st;
  st.eps = eps;
  st.k = k;
  st.variant = v;
  st.l_star = opts.base_point.value_or(static_cast<double>(k));
  st.dmu = dmu0;
  st.dl = dl0;
  st = project(st, opts);
  res.l_star = st.l_star;
  const double m = mu_scale(st);

  StepMethod method = StepMethod::FixedPoint;
  double best = std::numeric_limits<double>::infinity();
  int stalled = 0;
  Eigen::Matrix2d J;
  bool have_jacobian = false;
  Eigen::Vector2d y_prev, F_prev;

  auto residual_vector = [&](const FixedPointState& s) {
    const Evaluation e = evaluate(s, opts.N);
    return Eigen::Vector2d(e.im_s11, e.re_s01);
  };

  for (int it = 0; it < opts.max_iter; ++it) {
    const Evaluation e = evaluate(st, opts.N);
    const Eigen::Vector2d F(e.im_s11, e.re_s01);
    const double r = F.cwiseAbs().sum();
    if (r < best * (1.0 - 1e-12)) {
      best = r;
      stalled = 0;
    } else if (++stalled >= opts.stall_window) {
      method = StepMethod::QuasiNewton;
    }

    FixedPointState next = st;
    if (method == StepMethod::FixedPoint) {
      try {
        next = fixed_point_map(st, e.s11_hat, e.s01_hat, opts);
      } catch (const StepError&) {
        method = StepMethod::QuasiNewton;
      }
    }
    if (method == StepMethod::QuasiNewton) {
      const Eigen::Vector2d y(st.dmu / m, st.dl / opts.l_scale);
      if (!have_jacobian) {
        const double hm = opts.fd_step_mu;
        const double hl = opts.fd_step_l / opts.l_scale;
        FixedPointState a = st;
        a.dmu += hm * m;
        FixedPointState b = st;
        b.dl += opts.fd_step_l;
        J.col(0) = (residual_vector(a) - F) / hm;
        J.col(1) = (residual_vector(b) - F) / hl;
        have_jacobian = true;
      } else {
        const Eigen::Vector2d dy = y - y_prev;
        const Eigen::Vector2d dF = F - F_prev;
        const double n2 = dy.squaredNorm();
        if (n2 > 0.0) J += (dF - J * dy) * dy.transpose() / n2;
      }
      y_prev = y;
      F_prev = F;
      const Eigen::Vector2d step = J.fullPivLu().solve(-F);
      if (!step.allFinite()) {
        res.message = "singular quasi-Newton Jacobian";
        break;
      }
      next.dmu = (y(0) + step(0)) * m;
      next.dl = (y(1) + step(1)) * opts.l_scale;
      next = project(next, opts);
      next.iterations = st.iterations + 1;
    }

    const double step = std::max(std::abs(next.dmu - st.dmu), std::abs(next.dl - st.dl));
    res.history.push_back({st.dmu, st.dl, e.im_s11, e.re_s01, step, method});
    st = next;
    res.iterations = it + 1;
    if (step < opts.step_tol) {
      res.converged = true;
      break;
    }
  }
  if (!res.converged && res.message.empty()) {
    res.message = "no convergence within " + std::to_string(opts.max_iter) + " iterations";
  }
  return finalize(std::move(res), st, opts);
}

TrappedModeResult find_trapped(double eps, int k, Variant v, const DetectorOptions& opts) {
  if (!two_channel(v)) return find_trapped_scalar(eps, static_cast<double>(k), v, opts);
  return find_trapped_from(eps, k, v, 0.0, 0.0, opts);
}

TrappedModeResult find_trapped_scalar(double eps, double l, Variant v,
                                      const DetectorOptions& opts) {
  if (two_channel(v)) throw DomainError("scalar search needs a one-channel variant");
  if (!(eps > 0.0)) throw DomainError("ε must be positive");
  TrappedModeResult res;
  res.eps = eps;
  res.k = 0;
  res.variant = v;
  res.l_star = l;
  FixedPointState st;
  st.eps = eps;
  st.variant = v;
  st.l_star = l;
  const double c = coupling(v, l);
  // Keep λ inside the window: μ ∈ (0, Λ_c/ε²).
  const double mu_max = trapping_threshold(v) / (eps * eps);
  auto clamp = [&](double dmu) {
    return std::clamp(dmu, -c * c * (1.0 - 1e-9), mu_max * (1.0 - 1e-9) - c * c);
  };

  StepMethod method = StepMethod::FixedPoint;
  double best = std::numeric_limits<double>::infinity();
  int stalled = 0;
  double x_prev = 0.0, f_prev = 0.0;
  bool have_prev = false;
  for (int it = 0; it < opts.max_iter; ++it) {
    const Evaluation e = evaluate(st, opts.N);
    const double f = e.im_s11;
    if (std::abs(f) < best * (1.0 - 1e-12)) {
      best = std::abs(f);
      stalled = 0;
    } else if (++stalled >= opts.stall_window) {
      method = StepMethod::QuasiNewton;
    }
    double next;
    if (method == StepMethod::FixedPoint) {
      next = -(2.0 * c * c + st.dmu) * e.s11_hat.imag();
    } else {
      double slope;
      if (have_prev && st.dmu != x_prev) {
        slope = (f - f_prev) / (st.dmu - x_prev);
      } else {
        FixedPointState a = st;
        const double h = opts.fd_step_mu * c * c;
        a.dmu += h;
        slope = (evaluate(a, opts.N).im_s11 - f) / h;
      }
      next = slope != 0.0 ? st.dmu - f / slope : st.dmu;
    }
    x_prev = st.dmu;
    f_prev = f;
    have_prev = true;
    next = clamp(next);
    const double step = std::abs(next - st.dmu);
    res.history.push_back({st.dmu, 0.0, f, 0.0, step, method});
    st.dmu = next;
    res.iterations = it + 1;
    if (step < opts.step_tol) {
      res.converged = true;
      break;
    }
  }
  if (!res.converged) {
    res.message = "no convergence within " + std::to_string(opts.max_iter) + " iterations";
  }
  return finalize(std::move(res), st, opts);
}

std::pair<double, double> min_criterion_over_lambda(double eps, double l, Variant v, double lo,
                                                    double hi, int samples, int N) {
  if (!(hi > lo) || samples < 3) throw DomainError("invalid λ range for the criterion scan");
  const int x = channel_count(v) - 1;
  auto f = [&](double lambda) {
    ProblemConfig cfg;
    cfg.eps = eps;
    cfg.l = l;
    cfg.lambda = lambda;
    cfg.variant = v;
    cfg.N = N;
    const ScatteringMatrix S = assemble_augmented_smatrix(cfg);
    return std::abs(S.S(x, x) + 1.0);
  };
  int best = 0;
  double fbest = std::numeric_limits<double>::infinity();
  const double h = (hi - lo) / (samples - 1);
  for (int i = 0; i < samples; ++i) {
    const double fi = f(lo + i * h);
    if (fi < fbest) {
      fbest = fi;
      best = i;
    }
  }
  const double a = lo + std::max(0, best - 1) * h;
  const double b = lo + std::min(samples - 1, best + 1) * h;
  const auto [xmin, fmin] = boost::math::tools::brent_find_minima(f, a, b, 40);
  if (fmin < fbest) return {fmin, xmin};
  return {fbest, lo + best * h};
}

ScanReport scan_absence(double eps, int k, double delta, Variant v, const ScanOptions& opts) {
  if (!(delta > 0.0) || !(delta < 1.0)) throw DomainError("δ must lie in (0, 1)");
  if (opts.grid < 2) throw DomainError("scan grid needs at least two points");
  if (!two_channel(v)) throw DomainError("absence scan is defined for the two-channel variants");
  const double thr = trapping_threshold(v);
  ScanReport rep;
  rep.eps = eps;
  rep.k = k;
  rep.delta = delta;
  rep.lambda_lo = opts.lambda_lo.value_or(thr - 0.5);
  rep.lambda_hi = opts.lambda_hi.value_or(thr * (1.0 - 1e-9));
  rep.window = opts.window_factor * remainder_scale(eps);

  DetectorOptions dopts;
  dopts.N = opts.N;
  const TrappedModeResult root = find_trapped(eps, k, v, dopts);
  rep.l_root = root.l;

  std::vector<double> ls;
  const double a = k - 1 + delta;
  const double b = k + 1 - delta;
  for (int i = 0; i < opts.grid; ++i) ls.push_back(a + (b - a) * i / (opts.grid - 1));
  if (opts.include_root && root.converged) ls.push_back(root.l);
  std::sort(ls.begin(), ls.end());
  ls.erase(std::unique(ls.begin(), ls.end()), ls.end());

  for (double l : ls) {
    ScanRow row;
    row.l = l;
    row.in_window = std::abs(l - rep.l_root) <= rep.window;
    double lo = rep.lambda_lo;
    double hi = rep.lambda_hi;
    if (root.converged && l == root.l) {
      // The root is a point in λ; bracket it so sampling cannot miss it.
      lo = std::max(lo, root.lambda - 1e-3);
      hi = std::min(hi, root.lambda + 1e-3);
    }
    const auto [m, arg] = min_criterion_over_lambda(eps, l, v, lo, hi, opts.lambda_samples, opts.N);
    row.min_residual = m;
    row.argmin_lambda = arg;
    rep.rows.push_back(row);
  }
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    if (rep.rows[i].min_residual < opts.zero_tol) {
      const double lo = i > 0 ? rep.rows[i - 1].l : rep.rows[i].l;
      const double hi = i + 1 < rep.rows.size() ? rep.rows[i + 1].l : rep.rows[i].l;
      rep.zero_intervals.emplace_back(lo, hi);
    }
  }
  return rep;
}

}  // namespace boxguide
