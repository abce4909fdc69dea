#include "bentwire/regularization.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "bentwire/quadrature.hpp"

namespace bentwire {

namespace {

double sgn(double s) { return (s > 0.0) - (s < 0.0); }

// Odd power-law primitive of -|s|^(-2 alpha) (alpha = 1/2 gives the log).
double singular_profile(double s, double alpha) {
  if (s == 0.0) return 0.0;
  const double x = std::abs(s);
  if (alpha == 0.5) return -sgn(s) * std::log(x);
  const double p = 1.0 - 2.0 * alpha;
  return -sgn(s) * std::pow(x, p) / p;
}

double regularized_profile(double s, double alpha, double eps, PrimitiveConvention convention) {
  const double x = std::abs(s) + eps;
  double value = 0.0;
  if (alpha == 0.5) {
    value = convention == PrimitiveConvention::Classical ? std::log1p(std::abs(s) / eps) : std::log(x);
  } else {
    const double p = 1.0 - 2.0 * alpha;
    value = std::pow(x, p) / p;
    if (convention == PrimitiveConvention::Classical) value -= std::pow(eps, p) / p;
  }
  return -sgn(s) * value;
}

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  return denom == 0.0 ? 0.0 : (n * sxy - sx * sy) / denom;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

}  // namespace

CurvatureSpec regularize(const CurvatureSpec& base, double epsilon) {
  if (base.kind() != CurvatureKind::PowerLawSingular)
    throw std::invalid_argument("regularize: base must be a singular power-law curvature");
  if (!(epsilon > 0.0)) throw std::invalid_argument("regularize: epsilon must be positive");
  CurvatureSpec out = CurvatureSpec::power_law_regularized(base.amplitude(), base.alpha(), epsilon);
  if (base.bump()) out = out.with_bump(*base.bump());
  return out;
}

double geometric_potential_value(const CurvatureSpec& spec, const PhysicalParams& params, double s) {
  return -params.geometric_prefactor() * spec.squared(s);
}

PotentialModel geometric_potential(const CurvatureSpec& spec, const PhysicalParams& params, const Mesh& mesh) {
  params.validate();
  const double c4 = params.geometric_prefactor();
  const CurvatureSpec smooth = spec.without_bump();
  PotentialModel model;
  model.mesh = mesh;
  model.bounded = !spec.is_singular();
  if (spec.is_power_law()) model.amplitude_prefactor = c4 * spec.amplitude() * spec.amplitude();
  model.v_samples.resize(mesh.n_cells);
  for (int j = 0; j < mesh.n_cells; ++j) {
    const double s = mesh.midpoint(j);
    if (spec.is_singular() && s == 0.0)
      throw SingularPointError("geometric_potential: mesh node coincides with the singular point");
    const double k = smooth(s);
    double v = -c4 * k * k;
    if (spec.bump()) {
      const auto& bump = *spec.bump();
      v -= c4 * (bump.cumulative(mesh.cell_hi(j)) - bump.cumulative(mesh.cell_lo(j))) / mesh.h;
    }
    model.v_samples[j] = v;
  }
  return model;
}

PotentialModel potential_primitive(const CurvatureSpec& spec, const PhysicalParams& params, double C,
                                   PrimitiveConvention convention) {
  params.validate();
  const double c4 = params.geometric_prefactor();
  PotentialModel model;
  model.constant_C = C;
  model.bounded = !spec.is_singular();
  model.u_rule.breakpoints = spec.breakpoints();

  std::function<double(double)> smooth;
  switch (spec.kind()) {
    case CurvatureKind::Zero: smooth = [](double) { return 0.0; }; break;
    case CurvatureKind::Constant: {
      const double v0 = -c4 * spec.constant_value() * spec.constant_value();
      smooth = [v0](double s) { return v0 * s; };
      break;
    }
    case CurvatureKind::PowerLawSingular: {
      const double A = c4 * spec.amplitude() * spec.amplitude();
      model.amplitude_prefactor = A;
      const double alpha = spec.alpha();
      smooth = [A, alpha](double s) { return A * singular_profile(s, alpha); };
      break;
    }
    case CurvatureKind::PowerLawRegularized: {
      const double A = c4 * spec.amplitude() * spec.amplitude();
      model.amplitude_prefactor = A;
      const double alpha = spec.alpha(), eps = spec.epsilon();
      smooth = [A, alpha, eps, convention](double s) { return A * regularized_profile(s, alpha, eps, convention); };
      break;
    }
    case CurvatureKind::Tabulated: {
      // kappa^2 is piecewise quadratic, so a 3-point Gauss rule per segment is
      // exact; cumulative values are stored at the knots.
      auto knots = std::make_shared<std::vector<std::pair<double, double>>>(spec.samples());
      auto cumulative = std::make_shared<std::vector<double>>(knots->size(), 0.0);
      const CurvatureSpec plain = spec.without_bump();
      auto k2 = [plain](double s) {
        const double k = plain(s);
        return k * k;
      };
      for (std::size_t i = 1; i < knots->size(); ++i)
        (*cumulative)[i] = (*cumulative)[i - 1] - c4 * gauss_integrate(k2, (*knots)[i - 1].first, (*knots)[i].first, 3);
      smooth = [knots, cumulative, k2, c4](double s) {
        if (s < knots->front().first || s > knots->back().first)
          throw std::out_of_range("tabulated primitive evaluated outside its sample range");
        auto it = std::upper_bound(knots->begin(), knots->end(), s,
                                   [](double v, const auto& p) { return v < p.first; });
        const std::size_t i = static_cast<std::size_t>(std::distance(knots->begin(), it)) - 1;
        const double lo = (*knots)[i].first;
        if (s == lo) return (*cumulative)[i];
        return (*cumulative)[i] - c4 * gauss_integrate(k2, lo, s, 3);
      };
      break;
    }
  }

  if (spec.bump()) {
    const SquaredCurvatureBump bump = *spec.bump();
    model.primitive = [smooth, bump, c4, C](double s) { return smooth(s) - c4 * bump.cumulative(s) + C; };
  } else {
    model.primitive = [smooth, C](double s) { return smooth(s) + C; };
  }
  return model;
}

double WidthRule::operator()(double eps) const { return scale * std::pow(eps, exponent); }

CurvatureSpec RegularizationFamily::member(std::size_t index) const {
  if (index >= epsilons.size()) throw std::out_of_range("regularization family index out of range");
  const double eps = epsilons[index];
  CurvatureSpec spec = base.kind() == CurvatureKind::PowerLawSingular ? regularize(base.without_bump(), eps)
                                                                      : base.without_bump();
  if (defect && defect->integrated_height != 0.0)
    spec = spec.with_bump({defect->integrated_height, defect->center, defect->width(eps)});
  return spec;
}

void RegularizationFamily::validate() const {
  if (epsilons.empty()) throw std::invalid_argument("regularization family needs at least one epsilon");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0)) throw std::invalid_argument("epsilons must be positive");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
      throw std::invalid_argument("epsilons must be strictly decreasing");
  }
}

RegularizationFamily make_family(const CurvatureSpec& base, std::vector<double> epsilons) {
  RegularizationFamily family{base, std::move(epsilons), std::nullopt};
  family.validate();
  return family;
}

RegularizationFamily perturb_with_bump(const RegularizationFamily& family, double integrated_height,
                                       WidthRule width, double center) {
  family.validate();
  RegularizationFamily out = family;
  if (integrated_height == 0.0) return out;
  out.defect = BumpDefect{integrated_height, center, width};
  if (integrated_height < 0.0) {
    // kappa_eps^2 + Delta_eps must stay non-negative across the bump support.
    for (std::size_t i = 0; i < out.size(); ++i) {
      const CurvatureSpec m = out.member(i);
      const auto& bump = *m.bump();
      constexpr int kProbe = 401;
      for (int q = 0; q < kProbe; ++q) {
        const double s = bump.lo() + (bump.hi() - bump.lo()) * q / (kProbe - 1);
        if (m.singular_limit().is_singular() && s == 0.0) continue;
        const double k = m.without_bump()(s);
        if (k * k + bump(s) < 0.0)
          throw std::invalid_argument("perturb_with_bump: bump makes the squared curvature negative");
      }
    }
  }
  return out;
}

double l1_curvature_error(const RegularizationFamily& family, std::size_t index, const PhysicalParams& params) {
  return curvature_l1_distance(family.member(index), family.base.singular_limit(), params);
}

double l2_primitive_error(const RegularizationFamily& family, std::size_t index, const PhysicalParams& params,
                          PrimitiveConvention convention) {
  const CurvatureSpec member = family.member(index);
  const CurvatureSpec limit = family.base.singular_limit();
  const PotentialModel u_eps = potential_primitive(member, params, 0.0, convention);
  const PotentialModel u = potential_primitive(limit, params, 0.0, convention);
  auto cuts = member.breakpoints();
  const auto more = limit.breakpoints();
  cuts.insert(cuts.end(), more.begin(), more.end());
  // The difference lives on the scale eps around the origin; grade the cuts.
  if (member.kind() == CurvatureKind::PowerLawRegularized) {
    const double reach = std::max(std::abs(params.a), std::abs(params.b));
    for (double x = member.epsilon(); x < reach; x *= 4.0) {
      cuts.push_back(x);
      cuts.push_back(-x);
    }
  }
  auto diff = [&](double s) { return u_eps.U(s) - u.U(s); };
  const double L = params.length();
  const double mean = integrate(diff, params.a, params.b, cuts) / L;
  const double sq = integrate(
      [&](double s) {
        const double d = diff(s) - mean;
        return d * d;
      },
      params.a, params.b, cuts);
  return std::sqrt(std::max(sq, 0.0));
}

double step_primitive_norm(double integrated_height, double center, const PhysicalParams& params) {
  params.validate();
  const double height = params.geometric_prefactor() * std::abs(integrated_height);
  const double left = center - params.a, right = params.b - center;
  return height * std::sqrt(left * right / params.length());
}

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Admissible: return "Admissible";
    case Verdict::PreAdmissibleOnly: return "PreAdmissibleOnly";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

AdmissibilityReport assess_admissibility(const RegularizationFamily& family, const PhysicalParams& params,
                                         const AdmissibilityTolerances& tolerances) {
  family.validate();
  AdmissibilityReport report;
  report.epsilons = family.epsilons;
  for (std::size_t i = 0; i < family.size(); ++i) {
    report.l1_curvature_errors.push_back(l1_curvature_error(family, i, params));
    report.l2_primitive_errors.push_back(l2_primitive_error(family, i, params, PrimitiveConvention::Classical));
    report.l2_branchwise_errors.push_back(l2_primitive_error(family, i, params, PrimitiveConvention::Branchwise));
  }
  if (family.size() < 3) {
    report.verdict = Verdict::Inconclusive;
    return report;
  }

  const double kappa_l1 = curvature_l1_norm(family.base.singular_limit(), params);
  const auto is_zero = [&](const std::vector<double>& v, double scale) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x <= tolerances.zero_floor * (1.0 + scale); });
  };

  const auto& l1 = report.l1_curvature_errors;
  report.l1_converging =
      is_zero(l1, kappa_l1) || (strictly_decreasing(l1) && l1.back() < tolerances.l1_relative * kappa_l1);

  const auto& l2 = report.l2_primitive_errors;
  const double u_scale = potential_primitive(family.base.singular_limit(), params, 0.0).amplitude_prefactor;
  if (is_zero(l2, u_scale)) {
    report.l2_converging = true;
  } else if (std::all_of(l2.begin(), l2.end(), [](double x) { return x > 0.0; })) {
    const std::size_t tail = std::min<std::size_t>(5, l2.size());
    const std::vector<double> e(report.epsilons.end() - tail, report.epsilons.end());
    const std::vector<double> y(l2.end() - tail, l2.end());
    report.l2_slope = loglog_slope(e, y);
    report.l2_converging = strictly_decreasing(l2) && report.l2_slope > tolerances.l2_min_slope;
  }

  if (report.l1_converging && report.l2_converging)
    report.verdict = Verdict::Admissible;
  else if (report.l1_converging)
    report.verdict = Verdict::PreAdmissibleOnly;
  else
    report.verdict = Verdict::Inconclusive;
  return report;
}

}  // namespace bentwire
