#include "stochtaylor/convergence.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "stochtaylor/errors.hpp"
#include "stochtaylor/mserr.hpp"
#include "stochtaylor/oracle.hpp"
#include "stochtaylor/schemes.hpp"

namespace stochtaylor {

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ArgumentError("slope needs at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw ArgumentError("slope needs distinct abscissae");
  return sxy / sxx;
}

namespace {

struct Level {
  double delta = 0.0;
  long steps = 0;
  std::optional<Stepper> coarse, fine;
  std::optional<BasisTransfer> transfer;
  int fine_j_max = 0;
  int max_q = 0;
  int coarse_j_max = 0;
};

double path_error(const SdeModel& model, const ConvergenceConfig& cfg, const Level& lv, std::uint64_t path) {
  RngStream rng(cfg.seed, path);
  const int R = cfg.ref_ratio;
  const double fine_delta = lv.delta / R;
  Vec yc = model.x0, yr = model.x0;
  std::vector<NoiseBasis> fine(static_cast<size_t>(R));
  for (long p = 0; p < lv.steps; ++p) {
    for (int s = 0; s < R; ++s) {
      fine[s] = sample_basis(model.m, lv.fine_j_max, fine_delta, rng);
      const long idx = p * R + s;
      yr = cfg.scheme == SchemeKind::Taylor ? lv.fine->step(yr, idx, fine[s])
                                            : euler_maruyama_step(model, yr, idx, fine[s]);
      if (!yr.allFinite()) throw BlowUpError(idx, "reference state became non-finite at step " + std::to_string(idx));
    }
    const NoiseBasis coarse = lv.transfer->coarse(fine);
    yc = cfg.scheme == SchemeKind::Taylor ? lv.coarse->step(yc, p, coarse) : euler_maruyama_step(model, yc, p, coarse);
    if (!yc.allFinite()) throw BlowUpError(p, "state became non-finite at step " + std::to_string(p));
  }
  return (yc - yr).norm();
}

}  // namespace

ConvergenceReport run_convergence(const SdeModel& model, const ConvergenceConfig& cfg) {
  model.validate();
  if (cfg.deltas.size() < 2) throw ArgumentError("convergence needs at least two step sizes");
  if (cfg.paths < 2) throw ArgumentError("convergence needs at least two paths");
  if (cfg.ref_ratio < 2) throw ArgumentError("reference ratio must be at least 2");
  if (!(cfg.T > 0.0)) throw ArgumentError("time horizon must be positive");
  for (double d : cfg.deltas) {
    if (!(d > 0.0)) throw ArgumentError("step sizes must be positive");
    const double n = cfg.T / d;
    if (std::abs(n - std::round(n)) > 1e-9 * n) throw ArgumentError("every step size must divide T");
  }

  ConvergenceReport report;
  const bool taylor = cfg.scheme == SchemeKind::Taylor;
  if (taylor) {
    if (cfg.c_star) {
      report.c_star = *cfg.c_star;
    } else {
      const double need = min_c_star(cfg.gamma, cfg.deltas, cfg.q_limit, model.m);
      report.c_star = need <= 1.0 ? 1.0 : std::exp2(std::ceil(std::log2(need * (1.0 + 1e-9))));
    }
    report.c_star_relaxed = report.c_star > 1.0;
  }

  for (double delta : cfg.deltas) {
    Level lv;
    lv.delta = delta;
    lv.steps = std::lround(cfg.T / delta);
    if (taylor) {
      const StepPlan coarse = plan_truncation(cfg.gamma, delta, report.c_star, model.m);
      const StepPlan fine = make_plan(cfg.gamma, delta / cfg.ref_ratio, coarse.q_map);
      lv.coarse.emplace(model, SchemeSpec{cfg.kind, cfg.gamma, coarse});
      lv.fine.emplace(model, SchemeSpec{cfg.kind, cfg.gamma, fine});
      lv.transfer.emplace(coarse.j_max, cfg.ref_ratio);
      lv.fine_j_max = std::max(fine.j_max, lv.transfer->fine_j_needed());
      lv.max_q = coarse.max_q();
      lv.coarse_j_max = coarse.j_max;
    } else {
      lv.transfer.emplace(0, cfg.ref_ratio);
      lv.fine_j_max = lv.transfer->fine_j_needed();
    }

    std::vector<double> errors(static_cast<size_t>(cfg.paths));
    std::atomic<long> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto worker = [&]() {
      try {
        for (long i = next++; i < cfg.paths && !failed; i = next++)
          errors[static_cast<size_t>(i)] = path_error(model, cfg, lv, static_cast<std::uint64_t>(i));
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    };
    const int nt = std::max(1, std::min<int>(resolve_threads(cfg.threads), static_cast<int>(cfg.paths)));
    if (nt == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    ConvergenceRow row;
    row.delta = delta;
    row.steps = lv.steps;
    row.max_q = lv.max_q;
    row.j_max = lv.coarse_j_max;
    double s1 = 0, s2 = 0;
    for (double e : errors) {
      s1 += e;
      s2 += e * e;
    }
    const double n = static_cast<double>(cfg.paths);
    row.mean_error = s1 / n;
    row.std_error = std::sqrt(std::max(0.0, (s2 - n * row.mean_error * row.mean_error) / (n - 1.0)) / n);
    report.rows.push_back(row);
  }

  std::vector<double> lx, ly;
  for (size_t i = 0; i < report.rows.size(); ++i) {
    lx.push_back(std::log2(report.rows[i].delta));
    ly.push_back(std::log2(report.rows[i].mean_error));
    if (i + 1 < report.rows.size())
      report.log2_ratios.push_back(std::log2(report.rows[i].mean_error / report.rows[i + 1].mean_error) /
                                   std::log2(report.rows[i].delta / report.rows[i + 1].delta));
  }
  report.slope = least_squares_slope(lx, ly);
  return report;
}

}  // namespace stochtaylor
