#include "bentwire/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bentwire/quadrature.hpp"

namespace bentwire {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kTraceGaussOrder = 8;

double sgn(double s) { return (s > 0.0) - (s < 0.0); }

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 0.75))
    throw std::invalid_argument("power-law exponent alpha must lie in (0, 3/4)");
}

// Integral of kappa over [lo, hi] split at the spec's breakpoints.
double integrate_kappa(const CurvatureSpec& spec, double lo, double hi) {
  const auto cuts = spec.breakpoints();
  return integrate([&](double s) { return spec(s); }, lo, hi, cuts);
}

}  // namespace

std::string to_string(CurvatureKind kind) {
  switch (kind) {
    case CurvatureKind::Zero: return "zero";
    case CurvatureKind::Constant: return "constant";
    case CurvatureKind::PowerLawSingular: return "power_law_singular";
    case CurvatureKind::PowerLawRegularized: return "power_law_regularized";
    case CurvatureKind::Tabulated: return "tabulated";
  }
  return "unknown";
}

double SquaredCurvatureBump::operator()(double s) const {
  const double x = (s - center) / width;
  if (std::abs(x) >= 1.0) return 0.0;
  return integrated_height / width * 0.5 * (1.0 + std::cos(kPi * x));
}

double SquaredCurvatureBump::cumulative(double s) const {
  const double x = (s - center) / width;
  if (x <= -1.0) return 0.0;
  if (x >= 1.0) return integrated_height;
  return integrated_height * (0.5 * (x + 1.0) + std::sin(kPi * x) / (2.0 * kPi));
}

CurvatureSpec CurvatureSpec::zero() { return CurvatureSpec{}; }

CurvatureSpec CurvatureSpec::constant(double value) {
  CurvatureSpec spec;
  spec.kind_ = CurvatureKind::Constant;
  spec.constant_ = value;
  return spec;
}

CurvatureSpec CurvatureSpec::power_law(double amplitude, double alpha) {
  check_alpha(alpha);
  if (!(amplitude >= 0.0)) throw std::invalid_argument("power-law amplitude must be non-negative");
  CurvatureSpec spec;
  spec.kind_ = CurvatureKind::PowerLawSingular;
  spec.amplitude_ = amplitude;
  spec.alpha_ = alpha;
  return spec;
}

CurvatureSpec CurvatureSpec::power_law_regularized(double amplitude, double alpha, double epsilon) {
  check_alpha(alpha);
  if (!(amplitude >= 0.0)) throw std::invalid_argument("power-law amplitude must be non-negative");
  if (!(epsilon > 0.0)) throw std::invalid_argument("regularization parameter epsilon must be positive");
  CurvatureSpec spec;
  spec.kind_ = CurvatureKind::PowerLawRegularized;
  spec.amplitude_ = amplitude;
  spec.alpha_ = alpha;
  spec.epsilon_ = epsilon;
  return spec;
}

CurvatureSpec CurvatureSpec::tabulated(std::vector<std::pair<double, double>> samples) {
  if (samples.size() < 2) throw std::invalid_argument("tabulated curvature needs at least two samples");
  for (std::size_t i = 1; i < samples.size(); ++i)
    if (!(samples[i].first > samples[i - 1].first))
      throw std::invalid_argument("tabulated curvature samples must be strictly increasing in s");
  CurvatureSpec spec;
  spec.kind_ = CurvatureKind::Tabulated;
  spec.samples_ = std::move(samples);
  return spec;
}

CurvatureSpec CurvatureSpec::with_bump(const SquaredCurvatureBump& bump) const {
  if (!(bump.width > 0.0)) throw std::invalid_argument("bump width must be positive");
  CurvatureSpec copy = *this;
  copy.bump_ = bump;
  return copy;
}

CurvatureSpec CurvatureSpec::without_bump() const {
  CurvatureSpec copy = *this;
  copy.bump_.reset();
  return copy;
}

double CurvatureSpec::operator()(double s) const {
  double base = 0.0;
  switch (kind_) {
    case CurvatureKind::Zero: base = 0.0; break;
    case CurvatureKind::Constant: base = constant_; break;
    case CurvatureKind::PowerLawSingular:
      if (s == 0.0) throw SingularPointError("singular curvature evaluated at s = 0");
      base = amplitude_ * std::pow(std::abs(s), -alpha_);
      break;
    case CurvatureKind::PowerLawRegularized:
      base = amplitude_ * std::pow(std::abs(s) + epsilon_, -alpha_);
      break;
    case CurvatureKind::Tabulated: {
      if (s < samples_.front().first || s > samples_.back().first)
        throw std::out_of_range("tabulated curvature evaluated outside its sample range");
      auto it = std::upper_bound(samples_.begin(), samples_.end(), s,
                                 [](double v, const auto& p) { return v < p.first; });
      if (it == samples_.end()) return samples_.back().second;
      const auto& hi = *it;
      const auto& lo = *(it - 1);
      const double t = (s - lo.first) / (hi.first - lo.first);
      base = lo.second + t * (hi.second - lo.second);
      break;
    }
  }
  if (!bump_) return base;
  const double sq = base * base + (*bump_)(s);
  return (base < 0.0 ? -1.0 : 1.0) * std::sqrt(std::max(sq, 0.0));
}

double CurvatureSpec::squared(double s) const {
  const double k = (*this).without_bump()(s);
  return k * k + (bump_ ? (*bump_)(s) : 0.0);
}

std::optional<double> CurvatureSpec::antiderivative(double s) const {
  if (bump_) return std::nullopt;
  switch (kind_) {
    case CurvatureKind::Zero: return 0.0;
    case CurvatureKind::Constant: return constant_ * s;
    case CurvatureKind::PowerLawSingular:
      return amplitude_ * sgn(s) * std::pow(std::abs(s), 1.0 - alpha_) / (1.0 - alpha_);
    case CurvatureKind::PowerLawRegularized:
      return amplitude_ * sgn(s) *
             (std::pow(std::abs(s) + epsilon_, 1.0 - alpha_) - std::pow(epsilon_, 1.0 - alpha_)) /
             (1.0 - alpha_);
    case CurvatureKind::Tabulated: {
      if (s < samples_.front().first || s > samples_.back().first)
        throw std::out_of_range("tabulated curvature integrated outside its sample range");
      double acc = 0.0;
      for (std::size_t i = 1; i < samples_.size(); ++i) {
        const auto& lo = samples_[i - 1];
        const auto& hi = samples_[i];
        if (s >= hi.first) {
          acc += 0.5 * (lo.second + hi.second) * (hi.first - lo.first);
          continue;
        }
        const double t = (s - lo.first) / (hi.first - lo.first);
        const double ks = lo.second + t * (hi.second - lo.second);
        acc += 0.5 * (lo.second + ks) * (s - lo.first);
        break;
      }
      return acc;
    }
  }
  return std::nullopt;
}

std::vector<double> CurvatureSpec::breakpoints() const {
  std::vector<double> cuts;
  if (is_power_law()) cuts.push_back(0.0);
  if (kind_ == CurvatureKind::Tabulated)
    for (const auto& [s, k] : samples_) cuts.push_back(s);
  if (bump_) {
    cuts.push_back(bump_->lo());
    cuts.push_back(bump_->center);
    cuts.push_back(bump_->hi());
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

CurvatureSpec CurvatureSpec::singular_limit() const {
  if (is_power_law()) return power_law(amplitude_, alpha_);
  return without_bump();
}

double power_law_amplitude(double alpha, double theta, double a, double b) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("alpha must lie in (0, 1)");
  if (!(theta >= 0.0 && theta <= kPi)) throw std::domain_error("opening angle theta must lie in [0, pi]");
  if (!(a < 0.0 && b > 0.0)) throw std::domain_error("power-law amplitude requires a < 0 < b");
  const double denom = std::pow(std::abs(a), 1.0 - alpha) + std::pow(std::abs(b), 1.0 - alpha);
  return (1.0 - alpha) * (kPi - theta) / denom;
}

double eval_curvature(const CurvatureSpec& spec, double s) { return spec(s); }

double turning_angle(const CurvatureSpec& spec, double lo, double hi) {
  const auto F_hi = spec.antiderivative(hi);
  if (F_hi) return *F_hi - *spec.antiderivative(lo);
  return integrate_kappa(spec, lo, hi);
}

double total_turn(const CurvatureSpec& spec, const PhysicalParams& params) {
  params.validate();
  return turning_angle(spec, params.a, params.b);
}

double curvature_l1_norm(const CurvatureSpec& spec, const PhysicalParams& params) {
  params.validate();
  if (!spec.bump()) {
    switch (spec.kind()) {
      case CurvatureKind::Zero: return 0.0;
      case CurvatureKind::Constant: return std::abs(spec.constant_value()) * params.length();
      case CurvatureKind::PowerLawSingular:
      case CurvatureKind::PowerLawRegularized: return turning_angle(spec, params.a, params.b);
      case CurvatureKind::Tabulated: break;
    }
  }
  return integrate([&](double s) { return std::abs(spec(s)); }, params.a, params.b, spec.breakpoints());
}

double curvature_l1_distance(const CurvatureSpec& lhs, const CurvatureSpec& rhs, const PhysicalParams& params) {
  params.validate();
  // Power laws with shared (K, alpha) are ordered pointwise: the regularized one
  // is smaller everywhere, so the L1 distance is a difference of turns.
  const bool same_law = lhs.is_power_law() && rhs.is_power_law() && !lhs.bump() && !rhs.bump() &&
                        lhs.amplitude() == rhs.amplitude() && lhs.alpha() == rhs.alpha();
  if (same_law) {
    return std::abs(turning_angle(lhs, params.a, params.b) - turning_angle(rhs, params.a, params.b));
  }
  auto cuts = lhs.breakpoints();
  const auto more = rhs.breakpoints();
  cuts.insert(cuts.end(), more.begin(), more.end());
  return integrate([&](double s) { return std::abs(lhs(s) - rhs(s)); }, params.a, params.b, cuts);
}

Pose symmetric_pose(const CurvatureSpec& spec, const PhysicalParams& params) {
  return Pose{{0.0, 0.0}, -0.5 * total_turn(spec, params)};
}

std::vector<double> staggered_grid(double a, double b, int n) {
  if (n < 1) throw std::invalid_argument("grid needs at least one point");
  const double h = (b - a) / n;
  std::vector<double> grid(n);
  for (int j = 0; j < n; ++j) grid[j] = a + (j + 0.5) * h;
  return grid;
}

std::vector<double> endpoint_grid(double a, double b, int n) {
  if (n < 2) throw std::invalid_argument("endpoint grid needs at least two points");
  const double h = (b - a) / (n - 1);
  std::vector<double> grid(n);
  for (int j = 0; j < n; ++j) grid[j] = a + j * h;
  grid.back() = b;
  return grid;
}

CurveTrace reconstruct_trace(const CurvatureSpec& spec, const PhysicalParams& params,
                             std::span<const double> s_grid, const Pose& initial_pose) {
  params.validate();
  if (s_grid.size() < 2) throw std::invalid_argument("trace grid needs at least two points");
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    if (s_grid[i] < params.a || s_grid[i] > params.b)
      throw std::invalid_argument("trace grid point outside the interval");
    if (i > 0 && !(s_grid[i] > s_grid[i - 1])) throw std::invalid_argument("trace grid must be strictly increasing");
    if (spec.is_singular() && s_grid[i] == 0.0)
      throw SingularPointError("trace grid contains the singular point s = 0");
  }

  const auto closed = spec.antiderivative(params.a).has_value();
  const double F_a = closed ? *spec.antiderivative(params.a) : 0.0;
  const auto cuts = spec.breakpoints();
  const GaussRule& rule = gauss_legendre(kTraceGaussOrder);

  // Sub-intervals [lo, hi] never straddle a breakpoint; gamma at the left end
  // of each is tracked so that non-closed-form specs integrate kappa piecewise.
  double gamma_left = initial_pose.angle;
  auto gamma_at = [&](double left, double t) {
    if (closed) return initial_pose.angle + *spec.antiderivative(t) - F_a;
    return gamma_left + gauss_integrate([&](double u) { return spec(u); }, left, t, kTraceGaussOrder);
  };

  CurveTrace trace;
  trace.s_grid.assign(s_grid.begin(), s_grid.end());
  trace.positions.reserve(s_grid.size());
  trace.angles.reserve(s_grid.size());

  Point2 pos = initial_pose.origin;
  double prev = params.a;
  for (double target : s_grid) {
    std::vector<double> pieces{prev};
    for (double c : cuts)
      if (c > prev && c < target) pieces.push_back(c);
    pieces.push_back(target);
    for (std::size_t p = 0; p + 1 < pieces.size(); ++p) {
      const double lo = pieces[p], hi = pieces[p + 1];
      if (hi <= lo) continue;
      const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
      double dx = 0.0, dy = 0.0;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double g = gamma_at(lo, mid + half * rule.nodes[q]);
        dx += rule.weights[q] * std::cos(g);
        dy += rule.weights[q] * std::sin(g);
      }
      pos.x += half * dx;
      pos.y += half * dy;
      if (!closed) gamma_left = gamma_at(lo, hi);
    }
    prev = target;
    trace.positions.push_back(pos);
    trace.angles.push_back(closed ? gamma_at(params.a, target) : gamma_left);
  }
  return trace;
}

CurveTrace reconstruct_trace(const CurvatureSpec& spec, const PhysicalParams& params, int n_points,
                             const Pose& initial_pose) {
  if (n_points < 2) throw std::invalid_argument("n_points must be at least 2");
  const auto grid = spec.is_singular() ? staggered_grid(params.a, params.b, n_points)
                                       : endpoint_grid(params.a, params.b, n_points);
  return reconstruct_trace(spec, params, grid, initial_pose);
}

GronwallBound gronwall_constants(const CurvatureSpec& spec, const PhysicalParams& params) {
  const auto bound = [](double l1) { return std::sqrt(2.0) * (1.0 + l1 * std::exp(l1)); };
  GronwallBound out;
  const CurvatureSpec limit = spec.singular_limit();
  out.kappa_l1 = curvature_l1_norm(limit, params);
  out.M = bound(out.kappa_l1);
  if (spec.kind() == CurvatureKind::PowerLawRegularized || spec.bump())
    out.M_eps = bound(curvature_l1_norm(spec, params));
  return out;
}

double trace_distance(const CurveTrace& lhs, const CurveTrace& rhs) {
  if (lhs.s_grid != rhs.s_grid) throw std::invalid_argument("trace_distance: traces live on different grids");
  double worst = 0.0;
  for (std::size_t i = 0; i < lhs.positions.size(); ++i)
    worst = std::max(worst, std::hypot(lhs.positions[i].x - rhs.positions[i].x,
                                       lhs.positions[i].y - rhs.positions[i].y));
  return worst;
}

}  // namespace bentwire
