#include "bentwire/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>

namespace bentwire {

namespace {

GaussRule build_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = (n == 1) ? x : p1;
      const double pnm1 = (n == 1) ? 1.0 : p0;
      dp = n * (x * pn - pnm1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  std::reverse(rule.nodes.begin(), rule.nodes.end());
  std::reverse(rule.weights.begin(), rule.weights.end());
  return rule;
}

struct Piece {
  double lo, hi, value, error;
  bool operator<(const Piece& o) const { return error < o.error; }
};

constexpr int kCoarse = 10;

Piece evaluate_piece(const std::function<double(double)>& f, double lo, double hi) {
  const double mid = 0.5 * (lo + hi);
  const double whole = gauss_integrate(f, lo, hi, kCoarse);
  const double halves = gauss_integrate(f, lo, mid, kCoarse) + gauss_integrate(f, mid, hi, kCoarse);
  return {lo, hi, halves, std::abs(halves - whole)};
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
  return it->second;
}

double gauss_integrate(const std::function<double(double)>& f, double lo, double hi, int n) {
  const GaussRule& rule = gauss_legendre(n);
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return sum * half;
}

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                                    std::span<const double> breakpoints, const AdaptiveOptions& opts) {
  QuadratureResult result;
  if (hi == lo) {
    result.converged = true;
    return result;
  }
  double sign = 1.0;
  if (hi < lo) {
    std::swap(lo, hi);
    sign = -1.0;
  }
  std::vector<double> cuts{lo};
  for (double bp : breakpoints)
    if (bp > lo && bp < hi) cuts.push_back(bp);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<Piece> heap;
  double total = 0.0, error = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Piece p = evaluate_piece(f, cuts[i], cuts[i + 1]);
    total += p.value;
    error += p.error;
    heap.push(p);
  }
  int count = static_cast<int>(heap.size());
  while (error > std::max(opts.abs_tol, opts.rel_tol * std::abs(total)) && count < opts.max_intervals) {
    Piece worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) {
      heap.push(worst);
      break;  // interval exhausted in floating point
    }
    Piece left = evaluate_piece(f, worst.lo, mid);
    Piece right = evaluate_piece(f, mid, worst.hi);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++count;
  }
  // Re-sum to remove drift from the incremental updates.
  total = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  result.value = sign * total;
  result.error_estimate = error;
  result.intervals = count;
  result.converged = error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
  return result;
}

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 std::span<const double> breakpoints, const AdaptiveOptions& opts) {
  const QuadratureResult r = integrate_adaptive(f, lo, hi, breakpoints, opts);
  if (!r.converged)
    throw QuadratureError("adaptive quadrature did not converge; achieved " + std::to_string(r.error_estimate),
                          r.error_estimate);
  return r.value;
}

}  // namespace bentwire
