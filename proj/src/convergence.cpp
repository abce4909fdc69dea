#include "bentwire/convergence.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>
#include <tuple>

namespace bentwire {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct TailFit {
  double v0 = 0.0;
  double p = 0.0;
  bool ok = false;
};

// v = v0 + c eps^p on the given points: p from the increments, v0 by least squares.
TailFit fit_tail(const std::vector<double>& eps, const std::vector<double>& v) {
  TailFit fit;
  const std::size_t m = eps.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t j = 0; j + 1 < m; ++j) {
    const double d = std::abs(v[j + 1] - v[j]);
    if (!(d > 0.0)) return fit;
    const double lx = std::log(eps[j]), ly = std::log(d);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(m - 1);
  const double denom = n * sxx - sx * sx;
  if (!(std::abs(denom) > 0.0)) return fit;
  fit.p = (n * sxy - sx * sy) / denom;
  if (!(fit.p > 1e-3)) return fit;

  double ax = 0, ay = 0, axx = 0, axy = 0;
  for (std::size_t j = 0; j < m; ++j) {
    const double x = std::pow(eps[j], fit.p);
    ax += x;
    ay += v[j];
    axx += x * x;
    axy += x * v[j];
  }
  const double mm = static_cast<double>(m);
  const double det = mm * axx - ax * ax;
  if (!(std::abs(det) > 0.0)) return fit;
  const double slope = (mm * axy - ax * ay) / det;
  fit.v0 = (ay - slope * ax) / mm;
  fit.ok = std::isfinite(fit.v0);
  return fit;
}

template <class F>
void parallel_for(std::size_t count, F&& body) {
  const std::size_t workers =
      std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace

RegularizationFamily SweepProblem::family(const std::vector<double>& epsilons) const {
  RegularizationFamily fam = make_family(base, epsilons);
  fam.defect = defect;
  return fam;
}

Spectrum solve_regularized(const SweepProblem& problem, const CurvatureSpec& member, double epsilon) {
  const Mesh mesh = problem.mesh();
  const PotentialModel potential = geometric_potential(member, problem.params, mesh);
  TridiagonalOperator T = assemble_regular(potential, problem.params, mesh, problem.bc);
  T.epsilon_tag = epsilon;
  return eigen_lowest(T, problem.k_states);
}

Spectrum solve_quasi(const SweepProblem& problem, int n_cells) {
  const Mesh mesh = Mesh::uniform(problem.params.a, problem.params.b, n_cells);
  const PotentialModel primitive = potential_primitive(problem.base.singular_limit(), problem.params, 0.0);
  const TridiagonalOperator T = assemble_quasi(primitive, problem.params, mesh, problem.bc);
  return eigen_lowest(T, problem.k_states);
}

double degeneracy_tolerance(double lambda) { return 1e-6 * (1.0 + std::abs(lambda)); }

std::vector<EigenTrack> pair_tracks(const std::vector<std::vector<double>>& columns) {
  const std::size_t n_cols = columns.size();
  std::vector<EigenTrack> tracks;
  std::size_t first = 0;
  while (first < n_cols && columns[first].empty()) ++first;
  if (first == n_cols) return tracks;

  const std::size_t width = columns[first].size();
  tracks.resize(width);
  for (std::size_t t = 0; t < width; ++t) {
    tracks[t].indices.assign(n_cols, -1);
    tracks[t].values.assign(n_cols, kNaN);
    tracks[t].indices[first] = static_cast<int>(t);
    tracks[t].values[first] = columns[first][t];
  }
  std::vector<double> last(width);
  for (std::size_t t = 0; t < width; ++t) last[t] = columns[first][t];

  for (std::size_t c = first + 1; c < n_cols; ++c) {
    const auto& col = columns[c];
    if (col.empty()) continue;
    std::vector<std::tuple<double, std::size_t, std::size_t>> candidates;
    for (std::size_t t = 0; t < width; ++t)
      for (std::size_t j = 0; j < col.size(); ++j) candidates.emplace_back(std::abs(col[j] - last[t]), t, j);
    std::sort(candidates.begin(), candidates.end());

    for (std::size_t t = 0; t < width; ++t) {
      std::vector<double> d;
      for (double v : col) d.push_back(std::abs(v - last[t]));
      std::sort(d.begin(), d.end());
      if (d.size() >= 2 && d[1] - d[0] <= degeneracy_tolerance(last[t])) tracks[t].ambiguous = true;
    }

    std::vector<bool> track_done(width, false), cand_used(col.size(), false);
    for (const auto& [dist, t, j] : candidates) {
      if (track_done[t] || cand_used[j]) continue;
      track_done[t] = true;
      cand_used[j] = true;
      tracks[t].indices[c] = static_cast<int>(j);
      tracks[t].values[c] = col[j];
      last[t] = col[j];
    }
  }

  // Group by final value.
  std::vector<std::size_t> order(width);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return last[l] < last[r]; });
  std::vector<EigenTrack> sorted;
  int n = -1;
  double group_value = 0.0;
  std::size_t group_size = 0;
  for (std::size_t idx : order) {
    EigenTrack tr = tracks[idx];
    const bool joins = n >= 0 && std::abs(last[idx] - group_value) <= degeneracy_tolerance(group_value);
    if (joins && group_size < 2) {
      ++group_size;
    } else {
      if (joins) tr.ambiguous = true;
      ++n;
      group_value = last[idx];
      group_size = 1;
    }
    tr.n = n;
    sorted.push_back(std::move(tr));
  }
  for (auto& tr : sorted) {
    for (const auto& other : sorted) {
      if (other.n != tr.n) continue;
      for (auto it = other.indices.rbegin(); it != other.indices.rend(); ++it)
        if (*it >= 0) {
          tr.members.push_back(*it);
          break;
        }
    }
    std::sort(tr.members.begin(), tr.members.end());
  }
  return sorted;
}

ExtrapolationResult extrapolate_track(const std::vector<double>& epsilons, const std::vector<double>& values) {
  if (epsilons.size() != values.size()) throw std::invalid_argument("extrapolate_track: size mismatch");
  std::vector<double> e, v;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (std::isfinite(values[i])) {
      e.push_back(epsilons[i]);
      v.push_back(values[i]);
    }
  ExtrapolationResult out;
  if (v.empty()) {
    out.limit = kNaN;
    out.uncertainty = kNaN;
    out.flagged = true;
    return out;
  }
  const std::size_t m = v.size();
  out.limit = v.back();
  if (m < 3) {
    out.uncertainty = m == 2 ? std::abs(v[1] - v[0]) : 0.0;
    out.flagged = true;
    return out;
  }
  const double d_last = v[m - 1] - v[m - 2];
  const double d_prev = v[m - 2] - v[m - 3];
  if (d_last == 0.0 && d_prev == 0.0) return out;
  if (!(std::abs(d_last) < std::abs(d_prev)) || d_last * d_prev < 0.0) {
    out.uncertainty = std::abs(d_last);
    out.flagged = true;
    return out;
  }

  const auto tail = [&](std::size_t k) {
    return fit_tail(std::vector<double>(e.end() - k, e.end()), std::vector<double>(v.end() - k, v.end()));
  };
  const TailFit f3 = tail(3);
  if (m == 3) {
    if (!f3.ok) {
      out.uncertainty = std::abs(d_last);
      out.flagged = true;
      return out;
    }
    out.limit = f3.v0;
    out.rate = f3.p;
    out.uncertainty = std::abs(f3.v0 - v.back());
    return out;
  }
  const TailFit f4 = tail(4);
  if (!f3.ok || !f4.ok) {
    out.uncertainty = std::abs(d_last);
    out.flagged = true;
    return out;
  }
  out.limit = f4.v0;
  out.rate = f4.p;
  out.uncertainty = std::abs(f3.v0 - f4.v0);
  return out;
}

SweepResult sweep(const SweepProblem& problem, const std::vector<double>& epsilons, const Spectrum* reference) {
  if (epsilons.size() < 4) throw std::invalid_argument("sweep needs at least four epsilons");
  const RegularizationFamily family = problem.family(epsilons);
  SweepResult result;
  result.epsilons = epsilons;
  result.points.resize(epsilons.size());
  parallel_for(epsilons.size(), [&](std::size_t i) {
    SweepPoint& point = result.points[i];
    point.epsilon = epsilons[i];
    try {
      point.spectrum = solve_regularized(problem, family.member(i), epsilons[i]);
    } catch (const std::exception& ex) {
      point.error = ex.what();
    }
  });

  std::vector<std::vector<double>> columns;
  for (const auto& p : result.points) columns.push_back(p.spectrum ? p.spectrum->eigenvalues : std::vector<double>{});
  result.tracks = pair_tracks(columns);
  for (auto& track : result.tracks) track.extrapolation = extrapolate_track(epsilons, track.values);

  if (reference) {
    for (std::size_t i = 0; i < result.points.size(); ++i) {
      const auto& p = result.points[i];
      if (!p.spectrum || result.tracks.empty() || result.tracks.front().indices[i] < 0) {
        result.overlaps.push_back(kNaN);
        continue;
      }
      result.overlaps.push_back(eigenspace_overlap(*p.spectrum, {result.tracks.front().indices[i]}, *reference, {0}));
    }
  }
  return result;
}

double eigenspace_overlap(const Spectrum& spectrum, const std::vector<int>& group, const Spectrum& reference,
                          const std::vector<int>& ref_group) {
  if (!(spectrum.mesh == reference.mesh)) throw std::invalid_argument("eigenspace_overlap: mesh mismatch");
  if (ref_group.empty()) throw std::invalid_argument("eigenspace_overlap: empty reference group");
  const bool same_nodes = spectrum.nodes == reference.nodes;
  const double h = spectrum.mesh.h;
  double total = 0.0;
  for (int j : ref_group) {
    const std::vector<double> ref = same_nodes ? reference.eigenfunctions.at(j)
                                               : resample(reference, static_cast<std::size_t>(j), spectrum.nodes, h);
    for (int i : group) {
      const auto& psi = spectrum.eigenfunctions.at(i);
      const double ip = h * std::inner_product(psi.begin(), psi.end(), ref.begin(), 0.0);
      total += ip * ip;
    }
  }
  return total / static_cast<double>(ref_group.size());
}

ConvergenceFit fit_convergence_constant(const std::vector<double>& deviations,
                                        const std::vector<double>& primitive_errors) {
  if (deviations.size() != primitive_errors.size() || deviations.empty())
    throw std::invalid_argument("fit_convergence_constant: size mismatch");
  const auto [lo, hi] = std::minmax_element(primitive_errors.begin(), primitive_errors.end());
  if (!(*hi - *lo > 1e-14 * std::max(1.0, std::abs(*hi))))
    throw std::invalid_argument("fit_convergence_constant: regressor is degenerate");
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < deviations.size(); ++i) {
    sxy += primitive_errors[i] * deviations[i];
    sxx += primitive_errors[i] * primitive_errors[i];
    syy += deviations[i] * deviations[i];
  }
  ConvergenceFit fit;
  fit.constant = sxy / sxx;
  double rss = 0.0;
  for (std::size_t i = 0; i < deviations.size(); ++i) {
    const double r = deviations[i] - fit.constant * primitive_errors[i];
    rss += r * r;
  }
  fit.relative_residual = syy > 0.0 ? std::sqrt(rss / syy) : 0.0;
  return fit;
}

std::vector<AngleScanPoint> angle_scan(const SweepProblem& problem_template, double alpha,
                                       const std::vector<double>& thetas, const std::vector<double>& epsilons) {
  std::vector<AngleScanPoint> out;
  for (double theta : thetas) {
    AngleScanPoint point;
    point.theta = theta;
    try {
      SweepProblem problem = problem_template;
      problem.k_states = 1;
      const double K = power_law_amplitude(alpha, theta, problem.params.a, problem.params.b);
      problem.base = CurvatureSpec::power_law(K, alpha);
      const SweepResult result = sweep(problem, epsilons);
      const auto& ground = result.tracks.at(0);
      point.ground_energy = ground.extrapolation.limit;
      point.uncertainty = ground.extrapolation.uncertainty;
      point.ok = std::isfinite(point.ground_energy);
      if (ground.extrapolation.flagged) point.error = "extrapolation tail not monotone";
    } catch (const std::exception& ex) {
      point.error = ex.what();
    }
    out.push_back(point);
  }
  return out;
}

std::vector<CrossCheck> cross_validate(const SweepProblem& problem, const SweepResult& result, int k) {
  const Spectrum fine = solve_quasi(problem, problem.n_cells);
  const Spectrum coarse = solve_quasi(problem, problem.n_cells / 2);
  std::vector<CrossCheck> out;
  for (int i = 0; i < k; ++i) {
    CrossCheck check;
    check.n = i;
    check.direct = fine.eigenvalues.at(i);
    check.coarse = coarse.eigenvalues.at(i);
    check.richardson = std::abs(check.direct - check.coarse) / 3.0;
    const auto it = std::find_if(result.tracks.begin(), result.tracks.end(),
                                 [&](const EigenTrack& t) { return t.n == i; });
    if (it == result.tracks.end()) throw std::invalid_argument("cross_validate: missing track");
    check.extrapolated = it->extrapolation.limit;
    check.uncertainty = it->extrapolation.uncertainty;
    check.tolerance = std::max(0.05, 3.0 * check.richardson);
    check.agrees = std::abs(check.direct - check.extrapolated) <= check.tolerance;
    out.push_back(check);
  }
  return out;
}

std::vector<double> default_epsilons() {
  std::vector<double> out;
  for (int j = 0; j <= 14; ++j) out.push_back(std::ldexp(1.0, -j));
  return out;
}

}  // namespace bentwire
