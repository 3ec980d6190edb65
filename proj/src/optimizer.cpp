#include "nonstop/optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "nonstop/error.hpp"

namespace nonstop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Precomputes the x-independent parts of the margin: G^+ w, the external
// force rate and the load-point velocities.
class MarginEvaluator {
 public:
  explicit MarginEvaluator(const ControlSnapshot& snap) : snap_(snap) {
    const auto& fr = snap.frame;
    base_force_ = fr.grasp_pinv * snap.wrench;
    external_ = fr.grasp_pinv_dot * snap.wrench + fr.grasp_pinv * snap.wrench_rate;
    const int n = snap.geometry.count();
    point_velocity_.resize(n);
    for (int i = 0; i < n; ++i) point_velocity_[i] = attachment_velocity(snap.load, snap.geometry, i);
  }

  // Returns false on a tension-floor violation; `carrier` then names it.
  bool margins(const Oscillation& x, const VecX& phases, double t, VecX& out,
               int* carrier = nullptr, double* tension_out = nullptr) const {
    const auto lam = lambda_eval(x, phases, t);
    const auto& fr = snap_.frame;
    const VecX f = base_force_ + fr.nullspace * lam.value;
    const VecX fdot = external_ + fr.nullspace_dot * lam.value + fr.nullspace * lam.rate;
    const int n = snap_.geometry.count();
    out.resize(n);
    for (int i = 0; i < n; ++i) {
      const Vec3 fi = f.segment<3>(3 * i);
      const double tension = fi.norm();
      if (!(tension > snap_.lengths.tension_floor)) {
        if (carrier) *carrier = i;
        if (tension_out) *tension_out = tension;
        return false;
      }
      const Vec3 q = fi / tension;
      const Vec3 fd = fdot.segment<3>(3 * i);
      const Vec3 perp = fd - q * q.dot(fd);
      const double len = snap_.lengths.length(snap_.geometry.cable_lengths[i], tension);
      out(i) = (point_velocity_[i] + (len / tension) * perp).norm() - snap_.epsilon;
    }
    return true;
  }

  double worst(const Oscillation& x, const VecX& phases, int lookahead) const {
    VecX m;
    double w = kInf;
    const int samples = std::max(1, lookahead);
    const double period = 2.0 * std::numbers::pi / std::max(x.frequency, 1e-12);
    for (int s = 0; s < samples; ++s) {
      const double t = snap_.t + (lookahead > 0 ? period * s / samples : 0.0);
      if (!margins(x, phases, t, m)) return -kInf;
      w = std::min(w, m.minCoeff());
    }
    return w;
  }

 private:
  const ControlSnapshot& snap_;
  VecX base_force_;
  VecX external_;
  std::vector<Vec3> point_velocity_;
};

void check_phases(const VecX& phases, const ControlSnapshot& snap) {
  if (phases.size() != snap.frame.nullity()) {
    throw Error(ErrorCode::kInvalidArgument,
                "phase count does not match the number of nullspace directions");
  }
}

struct Vertex {
  Oscillation x;
  double value;
};

}  // namespace

VecX uniform_phases(int k) {
  VecX phi(k);
  for (int j = 0; j < k; ++j) phi(j) = -std::numbers::pi + 2.0 * std::numbers::pi * j / k;
  return phi;
}

LambdaSample lambda_eval(const Oscillation& x, const VecX& phases, double t) {
  LambdaSample s;
  s.value.resize(phases.size());
  s.rate.resize(phases.size());
  for (Eigen::Index j = 0; j < phases.size(); ++j) {
    const double arg = x.frequency * t + phases(j);
    s.value(j) = x.amplitude * std::cos(arg);
    s.rate(j) = -x.amplitude * x.frequency * std::sin(arg);
  }
  return s;
}

double objective(const Oscillation& x, const Oscillation& previous, double t,
                 const VecX& phases, const OptimizerWeights& weights) {
  const auto a = lambda_eval(x, phases, t);
  const auto b = lambda_eval(previous, phases, t);
  const double dxi = x.frequency - previous.frequency;
  const double da = x.amplitude - previous.amplitude;
  return dxi * dxi + da * da + weights.position * (a.value - b.value).squaredNorm() +
         weights.velocity * (a.rate - b.rate).squaredNorm();
}

VecX constraint_margins(const Oscillation& x, const VecX& phases, const ControlSnapshot& snap) {
  check_phases(phases, snap);
  MarginEvaluator eval(snap);
  VecX m;
  int carrier = -1;
  double tension = 0.0;
  if (!eval.margins(x, phases, snap.t, m, &carrier, &tension)) {
    throw LowTensionError(carrier, tension, snap.lengths.tension_floor);
  }
  return m;
}

double worst_margin(const Oscillation& x, const VecX& phases, const ControlSnapshot& snap,
                    int lookahead_samples) {
  check_phases(phases, snap);
  return MarginEvaluator(snap).worst(x, phases, lookahead_samples);
}

OptimizationOutcome optimize(const Oscillation& previous, const ControlSnapshot& snap,
                             const OptimizerWeights& weights, const InternalForceParams& params,
                             const OptimizerSettings& settings) {
  check_phases(params.phases, snap);
  const auto& bounds = params.bounds;
  if (!(bounds.frequency_min <= bounds.frequency_max) ||
      !(bounds.amplitude_min <= bounds.amplitude_max) || settings.grid < 2) {
    throw Error(ErrorCode::kInvalidArgument, "optimize: invalid bounds or grid size");
  }
  const MarginEvaluator eval(snap);
  const int look = settings.lookahead_samples;
  const VecX& phases = params.phases;

  OptimizationOutcome out;
  if (bounds.contains(previous)) {
    const double w = eval.worst(previous, phases, look);
    if (w >= 0.0) {
      out.x_star = previous;
      out.feasible = true;
      out.worst_margin = w;
      return out;
    }
  }

  const int g = settings.grid;
  const double dxi = (bounds.frequency_max - bounds.frequency_min) / (g - 1);
  const double da = (bounds.amplitude_max - bounds.amplitude_min) / (g - 1);
  auto grid_point = [&](int i, int j) {
    return Oscillation{bounds.frequency_min + i * dxi, bounds.amplitude_min + j * da};
  };

  bool any_feasible = false;
  Vertex best_feasible{{}, kInf};
  Vertex least_infeasible{{}, -kInf};
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      const Oscillation x = grid_point(i, j);
      const double w = eval.worst(x, phases, look);
      if (w >= 0.0) {
        const double cost = objective(x, previous, snap.t, phases, weights);
        if (!any_feasible || cost < best_feasible.value) best_feasible = {x, cost};
        any_feasible = true;
      } else if (!any_feasible && w > least_infeasible.value) {
        least_infeasible = {x, w};
      }
    }
  }

  if (!any_feasible) {
    out.x_star = least_infeasible.value > -kInf ? least_infeasible.x : grid_point(0, 0);
    out.feasible = false;
    out.fallback_used = true;
    out.worst_margin = least_infeasible.value;
    out.iterations = g * g;
    return out;
  }

  // Nelder-Mead polish of the objective with an extreme barrier on
  // infeasible or out-of-bounds points.
  auto penalized = [&](const Oscillation& x) {
    if (!bounds.contains(x)) return kInf;
    if (eval.worst(x, phases, look) < 0.0) return kInf;
    return objective(x, previous, snap.t, phases, weights);
  };
  auto step_inside = [&](double from, double step, double lo, double hi) {
    return (from + step <= hi || from - step < lo) ? from + step : from - step;
  };
  const Oscillation x0 = best_feasible.x;
  std::array<Vertex, 3> s{
      Vertex{x0, best_feasible.value},
      Vertex{{step_inside(x0.frequency, dxi, bounds.frequency_min, bounds.frequency_max),
              x0.amplitude}, 0.0},
      Vertex{{x0.frequency,
              step_inside(x0.amplitude, da, bounds.amplitude_min, bounds.amplitude_max)}, 0.0}};
  s[1].value = penalized(s[1].x);
  s[2].value = penalized(s[2].x);

  auto combine = [](const Oscillation& a, const Oscillation& b, double k) {
    // a + k (b - a)
    return Oscillation{a.frequency + k * (b.frequency - a.frequency),
                       a.amplitude + k * (b.amplitude - a.amplitude)};
  };
  const double tol = 1e-9 * (1.0 + std::max(dxi, da));
  int iter = 0;
  for (; iter < settings.polish_iterations; ++iter) {
    std::sort(s.begin(), s.end(), [](const Vertex& a, const Vertex& b) { return a.value < b.value; });
    const double size = std::max(std::abs(s[2].x.frequency - s[0].x.frequency) +
                                     std::abs(s[2].x.amplitude - s[0].x.amplitude),
                                 std::abs(s[1].x.frequency - s[0].x.frequency) +
                                     std::abs(s[1].x.amplitude - s[0].x.amplitude));
    if (size < tol) break;
    const Oscillation centroid = combine(s[0].x, s[1].x, 0.5);
    const Oscillation reflected = combine(centroid, s[2].x, -1.0);
    const double fr = penalized(reflected);
    if (fr < s[0].value) {
      const Oscillation expanded = combine(centroid, s[2].x, -2.0);
      const double fe = penalized(expanded);
      s[2] = fe < fr ? Vertex{expanded, fe} : Vertex{reflected, fr};
    } else if (fr < s[1].value) {
      s[2] = {reflected, fr};
    } else {
      const bool outside = fr < s[2].value;
      const Oscillation contracted =
          outside ? combine(centroid, reflected, 0.5) : combine(centroid, s[2].x, 0.5);
      const double fc = penalized(contracted);
      if (fc < std::min(fr, s[2].value)) {
        s[2] = {contracted, fc};
      } else {
        for (int v = 1; v < 3; ++v) {
          s[v].x = combine(s[0].x, s[v].x, 0.5);
          s[v].value = penalized(s[v].x);
        }
      }
    }
  }
  const auto best = *std::min_element(s.begin(), s.end(), [](const Vertex& a, const Vertex& b) {
    return a.value < b.value;
  });
  out.x_star = best.x;
  out.feasible = true;
  out.worst_margin = eval.worst(best.x, phases, look);
  out.iterations = iter;
  return out;
}

int step_schedule(double optimizer_period, double control_period) {
  if (!(control_period > 0.0) || !(optimizer_period >= control_period * (1.0 - 1e-12))) {
    throw Error(ErrorCode::kInvalidArgument,
                "step_schedule: optimizer period must be at least the control period");
  }
  return std::max(1, static_cast<int>(std::ceil(optimizer_period / control_period - 1e-9)));
}

}  // namespace nonstop
