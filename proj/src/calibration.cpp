#include "drivestyle/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "drivestyle/errors.hpp"
#include "drivestyle/parallel.hpp"
#include "drivestyle/rng.hpp"

namespace drivestyle {

namespace {
constexpr const char* kParamNames[kCalibratedParams] = {"v_star", "t_headway", "d_min", "a_max", "b_comf"};
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

const char* param_name(std::size_t i) { return kParamNames[i]; }

void ParamBounds::validate() const {
  for (std::size_t i = 0; i < kCalibratedParams; ++i) {
    if (!(lo[i] > 0.0) || !(hi[i] >= lo[i]) || !std::isfinite(hi[i])) {
      throw ConfigError(std::string("invalid bounds for ") + kParamNames[i]);
    }
  }
}

bool ParamBounds::contains(const IdmParams& p) const {
  const auto x = to_array(p);
  for (std::size_t i = 0; i < kCalibratedParams; ++i) {
    if (x[i] < lo[i] || x[i] > hi[i]) return false;
  }
  return true;
}

std::array<double, kCalibratedParams> to_array(const IdmParams& p) {
  return {p.v_star, p.t_headway, p.d_min, p.a_max, p.b_comf};
}

IdmParams from_array(const std::array<double, kCalibratedParams>& x, double delta) {
  return IdmParams{x[0], x[1], x[2], x[3], x[4], delta};
}

std::size_t evaluation_start(const CarFollowingPair& pair, std::size_t anchor_samples) {
  const std::size_t steps = samples_for(kPredictionHorizon);
  return anchor_samples + steps < pair.samples.size() ? anchor_samples : 0;
}

namespace {

std::vector<PredictionWindow> collect_windows(std::span<const CarFollowingPair> pairs, std::size_t anchor_samples,
                                              std::size_t& excluded) {
  const std::size_t steps = samples_for(kPredictionHorizon);
  std::vector<PredictionWindow> windows;
  windows.reserve(pairs.size());
  for (const auto& pair : pairs) {
    const std::size_t start = evaluation_start(pair, anchor_samples);
    if (start + steps >= pair.samples.size()) {
      ++excluded;
      continue;
    }
    windows.push_back(prediction_window(pair, start));
  }
  return windows;
}

}  // namespace

CalibrationProblem make_problem(std::span<const CarFollowingPair> pairs, const ParamBounds& bounds, RmseMode mode,
                                std::size_t anchor_samples) {
  bounds.validate();
  CalibrationProblem problem;
  problem.bounds = bounds;
  problem.mode = mode;
  problem.windows = collect_windows(pairs, anchor_samples, problem.excluded);
  if (problem.windows.empty()) throw DataError("no pair is long enough for a 5 s prediction window");
  return problem;
}

double mean_rmse(const IdmParams& p, std::span<const PredictionWindow> windows, RmseMode mode) {
  if (windows.empty()) throw DataError("mean RMSE over an empty set of windows");
  double sum = 0.0;
  for (const auto& w : windows) sum += score_prediction(p, w, mode).rmse;
  return sum / static_cast<double>(windows.size());
}

MeanRmse mean_rmse(const IdmParams& p, std::span<const CarFollowingPair> pairs, RmseMode mode,
                   std::size_t anchor_samples) {
  MeanRmse out;
  const auto windows = collect_windows(pairs, anchor_samples, out.excluded);
  out.used = windows.size();
  out.value = mean_rmse(p, windows, mode);
  return out;
}

namespace {

// Maps the unit cube onto the free (unpinned) parameters.
class Objective {
 public:
  Objective(const CalibrationProblem& problem, double delta) : problem_(problem), delta_(delta) {
    for (std::size_t i = 0; i < kCalibratedParams; ++i) {
      if (problem.bounds.hi[i] > problem.bounds.lo[i]) free_.push_back(i);
    }
  }

  std::size_t dims() const { return free_.size(); }

  std::array<double, kCalibratedParams> point(const std::vector<double>& u) const {
    std::array<double, kCalibratedParams> x = problem_.bounds.lo;
    for (std::size_t j = 0; j < free_.size(); ++j) {
      const std::size_t i = free_[j];
      const double t = std::clamp(u[j], 0.0, 1.0);
      x[i] = problem_.bounds.lo[i] + t * (problem_.bounds.hi[i] - problem_.bounds.lo[i]);
    }
    return x;
  }

  double operator()(const std::vector<double>& u) const {
    const double v = mean_rmse(from_array(point(u), delta_), problem_.windows, problem_.mode);
    return std::isfinite(v) ? v : kInf;
  }

 private:
  const CalibrationProblem& problem_;
  double delta_;
  std::vector<std::size_t> free_;
};

struct SearchResult {
  std::vector<double> best;
  double value = kInf;
  std::size_t evaluations = 0;
  bool converged = false;
};

SearchResult nelder_mead(const Objective& f, std::vector<double> x0, double f0, std::size_t budget) {
  const std::size_t n = x0.size();
  SearchResult out{x0, f0, 0, false};
  constexpr double kStep = 0.1, kFtol = 1e-10, kXtol = 1e-7;

  std::vector<std::vector<double>> simplex{x0};
  std::vector<double> values{f0};
  auto eval = [&](const std::vector<double>& u) {
    const double v = f(u);
    ++out.evaluations;
    if (v < out.value) {
      out.value = v;
      out.best = u;
    }
    return v;
  };
  auto clamp = [](std::vector<double> u) {
    for (auto& t : u) t = std::clamp(t, 0.0, 1.0);
    return u;
  };

  for (std::size_t i = 0; i < n && out.evaluations < budget; ++i) {
    std::vector<double> v = x0;
    v[i] = x0[i] + kStep <= 1.0 ? x0[i] + kStep : x0[i] - kStep;
    simplex.push_back(v);
    values.push_back(eval(v));
  }
  if (simplex.size() < n + 1) return out;

  std::vector<std::size_t> order(n + 1);
  while (out.evaluations < budget) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

    double spread = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t j = 0; j < n; ++j) spread = std::max(spread, std::abs(simplex[i][j] - simplex[best][j]));
    }
    if (values[worst] - values[best] <= kFtol * (1.0 + std::abs(values[best])) && spread <= kXtol) {
      out.converged = true;
      break;
    }
    if (spread <= 1e-12) {
      out.converged = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / static_cast<double>(n);
    }
    auto along = [&](double t) {
      std::vector<double> u(n);
      for (std::size_t j = 0; j < n; ++j) u[j] = centroid[j] + t * (simplex[worst][j] - centroid[j]);
      return clamp(u);
    };

    const auto reflected = along(-1.0);
    const double fr = eval(reflected);
    if (fr < values[best]) {
      if (out.evaluations >= budget) break;
      const auto expanded = along(-2.0);
      const double fe = eval(expanded);
      if (fe < fr) {
        simplex[worst] = expanded;
        values[worst] = fe;
      } else {
        simplex[worst] = reflected;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = reflected;
      values[worst] = fr;
      continue;
    }
    if (out.evaluations >= budget) break;
    const bool outside = fr < values[worst];
    const auto contracted = along(outside ? -0.5 : 0.5);
    const double fc = eval(contracted);
    if (fc < (outside ? fr : values[worst])) {
      simplex[worst] = contracted;
      values[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= n && out.evaluations < budget; ++i) {
      if (i == best) continue;
      for (std::size_t j = 0; j < n; ++j) simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
      values[i] = eval(simplex[i]);
    }
  }
  return out;
}

std::vector<std::vector<double>> latin_hypercube(std::size_t samples, std::size_t dims, Rng& rng) {
  std::vector<std::vector<double>> pts(samples, std::vector<double>(dims));
  std::vector<std::size_t> perm(samples);
  for (std::size_t d = 0; d < dims; ++d) {
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = samples - 1; i > 0; --i) std::swap(perm[i], perm[static_cast<std::size_t>(rng.below(i + 1))]);
    for (std::size_t i = 0; i < samples; ++i) {
      pts[i][d] = (static_cast<double>(perm[i]) + rng.uniform()) / static_cast<double>(samples);
    }
  }
  return pts;
}

}  // namespace

CalibrationResult calibrate(const CalibrationProblem& problem, const CalibrateOptions& options) {
  problem.bounds.validate();
  if (problem.windows.empty()) throw DataError("calibration problem has no usable pairs");
  if (options.budget < 100) throw ConfigError("calibration budget must be at least 100 evaluations");
  const Objective f(problem, options.delta);

  CalibrationResult result;
  result.pairs = problem.windows.size();
  result.excluded = problem.excluded;

  std::vector<double> best_u;
  double best_value = kInf;

  if (f.dims() == 0) {
    best_value = f({});
    result.evaluations = 1;
    result.converged = true;
  } else {
    const std::size_t starts = std::max<std::size_t>(1, options.starts);
    const std::size_t n_samples =
        std::min(options.budget / 2, std::max(starts, starts * std::max<std::size_t>(1, options.samples_per_start)));
    Rng rng(mix_seed(options.seed, 0xCA11));
    const auto samples = latin_hypercube(n_samples, f.dims(), rng);

    std::vector<double> sample_values(n_samples);
    parallel_for(n_samples, options.workers, [&](std::size_t i) { sample_values[i] = f(samples[i]); });
    result.evaluations = n_samples;

    std::vector<std::size_t> order(n_samples);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return sample_values[a] < sample_values[b]; });
    const std::size_t runs = std::min(starts, n_samples);
    const std::size_t share = (options.budget - n_samples) / runs;

    std::vector<SearchResult> searches(runs);
    parallel_for(runs, options.workers, [&](std::size_t r) {
      const std::size_t i = order[r];
      searches[r] = nelder_mead(f, samples[i], sample_values[i], share);
    });

    best_u = samples[order.front()];
    best_value = sample_values[order.front()];
    for (const auto& s : searches) {
      result.evaluations += s.evaluations;
      if (s.value < best_value) {
        best_value = s.value;
        best_u = s.best;
        result.converged = s.converged;
      }
    }
    if (best_u == samples[order.front()] && !searches.empty()) result.converged = searches.front().converged;
  }

  if (!std::isfinite(best_value)) throw NumericalError("every calibration evaluation was non-finite");
  const auto x = f.point(best_u);
  result.params = from_array(x, options.delta);
  result.objective_value = best_value;
  for (std::size_t i = 0; i < kCalibratedParams; ++i) {
    const double lo = problem.bounds.lo[i], hi = problem.bounds.hi[i];
    if (hi > lo && (x[i] <= lo + 1e-6 * (hi - lo) || x[i] >= hi - 1e-6 * (hi - lo))) {
      result.bounds_hit.emplace_back(kParamNames[i]);
    }
  }
  return result;
}

std::vector<ParamSensitivity> sensitivity(const CalibrationProblem& problem, const IdmParams& p, double rel) {
  std::vector<ParamSensitivity> out;
  const auto base = to_array(p);
  for (std::size_t i = 0; i < kCalibratedParams; ++i) {
    auto lo = base, hi = base;
    lo[i] = std::clamp(base[i] * (1.0 - rel), problem.bounds.lo[i], problem.bounds.hi[i]);
    hi[i] = std::clamp(base[i] * (1.0 + rel), problem.bounds.lo[i], problem.bounds.hi[i]);
    out.push_back({param_name(i), mean_rmse(from_array(lo, p.delta), problem.windows, problem.mode),
                   mean_rmse(from_array(hi, p.delta), problem.windows, problem.mode)});
  }
  return out;
}

nlohmann::json calibration_to_json(const CalibrationResult& r) {
  return nlohmann::json{{"params", params_to_json(r.params)}, {"objective_value", r.objective_value},
                        {"evaluations", r.evaluations},        {"converged", r.converged},
                        {"pairs", r.pairs},                    {"excluded", r.excluded},
                        {"bounds_hit", r.bounds_hit}};
}

CalibrationResult calibration_from_json(const nlohmann::json& j) {
  try {
    CalibrationResult r;
    r.params = params_from_json(j.at("params"));
    r.objective_value = j.at("objective_value").get<double>();
    r.evaluations = j.at("evaluations").get<std::size_t>();
    r.converged = j.at("converged").get<bool>();
    r.pairs = j.value("pairs", std::size_t{0});
    r.excluded = j.value("excluded", std::size_t{0});
    r.bounds_hit = j.value("bounds_hit", std::vector<std::string>{});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed calibration result: ") + e.what());
  }
}

namespace {

// Fractional ranks (ties share the mean rank), 0 = most timid.
std::vector<double> ranks(const std::vector<double>& key) {
  const std::size_t n = key.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && key[order[j + 1]] == key[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j);
    for (std::size_t m = i; m <= j; ++m) out[order[m]] = r;
    i = j + 1;
  }
  return out;
}

}  // namespace

std::vector<std::string> label_styles(std::span<const IdmParams> cluster_params) {
  const std::size_t k = cluster_params.size();
  if (k == 0) throw DataError("no clusters to label");
  if (k == 1) return {kStyleNeutral};

  std::vector<double> v_star, neg_t, neg_d;
  for (const auto& p : cluster_params) {
    v_star.push_back(p.v_star);
    neg_t.push_back(-p.t_headway);
    neg_d.push_back(-p.d_min);
  }
  const auto r1 = ranks(v_star), r2 = ranks(neg_t), r3 = ranks(neg_d);
  std::vector<double> score(k);
  for (std::size_t c = 0; c < k; ++c) score[c] = r1[c] + r2[c] + r3[c];

  const std::size_t timid = static_cast<std::size_t>(std::min_element(score.begin(), score.end()) - score.begin());
  if (std::count(score.begin(), score.end(), score[timid]) > 1) {
    throw DataError("style labelling is ambiguous (timid tie); set style labels manually");
  }

  std::size_t aggressive = k;
  for (std::size_t c = 0; c < k; ++c) {
    if (c == timid) continue;
    if (aggressive == k || cluster_params[c].d_min < cluster_params[aggressive].d_min) aggressive = c;
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (c != timid && c != aggressive && cluster_params[c].d_min == cluster_params[aggressive].d_min) {
      throw DataError("style labelling is ambiguous (d_min tie); set style labels manually");
    }
  }

  std::vector<std::string> names(k);
  names[timid] = kStyleTimid;
  names[aggressive] = kStyleAggressive;
  std::size_t neutral = 0;
  const std::size_t neutral_count = k - 2;
  for (std::size_t c = 0; c < k; ++c) {
    if (c == timid || c == aggressive) continue;
    ++neutral;
    names[c] = neutral_count > 1 ? std::string(kStyleNeutral) + "-" + std::to_string(neutral) : kStyleNeutral;
  }
  return names;
}

}  // namespace drivestyle
