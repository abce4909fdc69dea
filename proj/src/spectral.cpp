#include "bentwire/spectral.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "bentwire/quadrature.hpp"

namespace bentwire {

namespace {

constexpr double kSelfAdjointTol = 1e-12;

double frobenius(const Matrix2c& m) {
  double s = 0.0;
  for (const auto& row : m)
    for (const auto& v : row) s += std::norm(v);
  return std::sqrt(s);
}

// M E M^* with E = [[0, -1], [1, 0]].
Matrix2c twist(const Matrix2c& m) {
  Matrix2c out{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out[i][j] = -m[i][0] * std::conj(m[j][1]) + m[i][1] * std::conj(m[j][0]);
  return out;
}

int rank2(const Matrix2c& m) {
  const double n = frobenius(m);
  if (n <= kSelfAdjointTol) return 0;
  const Complex det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  return std::abs(det) <= kSelfAdjointTol * n * n ? 1 : 2;
}

// Row vector z with z M = 0 for a rank-one M.
std::array<Complex, 2> left_null(const Matrix2c& m) {
  const auto& r0 = m[0];
  const auto& r1 = m[1];
  if (std::abs(r0[0]) + std::abs(r0[1]) <= kSelfAdjointTol * frobenius(m)) return {Complex(1.0), Complex(0.0)};
  const int k = std::abs(r0[0]) >= std::abs(r0[1]) ? 0 : 1;
  return {r1[k], -r0[k]};
}

std::optional<EndCondition> end_condition(const std::array<Complex, 2>& z, const Matrix2c& m) {
  const Complex p0 = z[0] * m[0][0] + z[1] * m[1][0];
  const Complex p1 = z[0] * m[0][1] + z[1] * m[1][1];
  const double scale = std::abs(p0) + std::abs(p1);
  if (scale == 0.0) return std::nullopt;
  if (std::abs(p1) <= kSelfAdjointTol * scale) return EndCondition{true, 0.0};
  const Complex rho = p0 / p1;
  if (std::abs(rho.imag()) > 1e-10 * (1.0 + std::abs(rho))) return std::nullopt;
  return EndCondition{false, rho.real()};
}

std::string format_number(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(12);
  os << v;
  return os.str();
}

// Partial-pivoting LU of the tridiagonal T - shift I, in the layout of LAPACK's gttrf.
struct TridiagonalLU {
  std::vector<double> dl, d, du, du2;
  std::vector<int> ipiv;

  TridiagonalLU(const TridiagonalOperator& T, double shift, double pivot_floor) {
    const std::size_t n = T.size();
    d.resize(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = T.diag[i] - shift;
    dl = T.offdiag;
    du = T.offdiag;
    du2.assign(n > 2 ? n - 2 : 0, 0.0);
    ipiv.resize(n);
    std::iota(ipiv.begin(), ipiv.end(), 0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (std::abs(d[i]) >= std::abs(dl[i])) {
        if (d[i] == 0.0) d[i] = pivot_floor;
        const double f = dl[i] / d[i];
        dl[i] = f;
        d[i + 1] -= f * du[i];
      } else {
        const double f = d[i] / dl[i];
        d[i] = dl[i];
        dl[i] = f;
        const double t = du[i];
        du[i] = d[i + 1];
        d[i + 1] = t - f * d[i + 1];
        if (i + 2 < n) {
          du2[i] = du[i + 1];
          du[i + 1] = -f * du[i + 1];
        }
        ipiv[i] = static_cast<int>(i + 1);
      }
    }
    if (n > 0 && d[n - 1] == 0.0) d[n - 1] = pivot_floor;
    for (auto& v : d)
      if (v == 0.0) v = pivot_floor;
  }

  void solve(std::vector<double>& b) const {
    const std::size_t n = d.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (ipiv[i] == static_cast<int>(i)) {
        b[i + 1] -= dl[i] * b[i];
      } else {
        const double t = b[i];
        b[i] = b[i + 1];
        b[i + 1] = t - dl[i] * b[i];
      }
    }
    b[n - 1] /= d[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    for (std::size_t k = n - 2; k-- > 0;) b[k] = (b[k] - du[k] * b[k + 1] - du2[k] * b[k + 2]) / d[k];
  }
};

double dot(std::span<const double> x, std::span<const double> y) {
  return std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
}

void orthogonalize(std::vector<double>& x, const std::vector<std::vector<double>>& basis) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& q : basis) {
      const double c = dot(x, q);
      for (std::size_t i = 0; i < x.size(); ++i) x[i] -= c * q[i];
    }
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

}  // namespace

std::string to_string(BcPreset preset) {
  switch (preset) {
    case BcPreset::Dirichlet: return "dirichlet";
    case BcPreset::Neumann: return "neumann";
    case BcPreset::Robin: return "robin";
    case BcPreset::General: return "general";
  }
  return "general";
}

std::string BoundaryConditions::tag() const {
  if (preset == BcPreset::Robin) return "robin:" + format_number(rho_a) + "," + format_number(rho_b);
  return to_string(preset);
}

BoundaryConditions canonical_bc(BcPreset preset, double rho_a, double rho_b) {
  BoundaryConditions bc;
  bc.preset = preset;
  switch (preset) {
    case BcPreset::Dirichlet:
      bc.A[0][0] = 1.0;
      bc.B[1][0] = 1.0;
      break;
    case BcPreset::Neumann:
      bc.A[0][1] = 1.0;
      bc.B[1][1] = 1.0;
      break;
    case BcPreset::Robin:
      if (!std::isfinite(rho_a) || !std::isfinite(rho_b))
        throw std::invalid_argument("Robin coefficients must be finite reals");
      bc.A[0] = {Complex(rho_a), Complex(1.0)};
      bc.B[1] = {Complex(rho_b), Complex(1.0)};
      bc.rho_a = rho_a;
      bc.rho_b = rho_b;
      break;
    case BcPreset::General: break;
  }
  return bc;
}

BoundaryConditions parse_bc(const std::string& text) {
  if (text == "dirichlet") return canonical_bc(BcPreset::Dirichlet);
  if (text == "neumann") return canonical_bc(BcPreset::Neumann);
  if (text.rfind("robin:", 0) == 0) {
    const std::string rest = text.substr(6);
    const auto comma = rest.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("robin condition needs two coefficients: " + text);
    try {
      std::size_t used_a = 0, used_b = 0;
      const std::string sa = rest.substr(0, comma), sb = rest.substr(comma + 1);
      const double ra = std::stod(sa, &used_a);
      const double rb = std::stod(sb, &used_b);
      if (used_a != sa.size() || used_b != sb.size()) throw std::invalid_argument("trailing characters");
      return canonical_bc(BcPreset::Robin, ra, rb);
    } catch (const std::logic_error&) {
      throw std::invalid_argument("malformed robin coefficients: " + text);
    }
  }
  throw std::invalid_argument("unknown boundary condition: " + text);
}

SelfAdjointReport check_self_adjoint(const BoundaryConditions& bc) {
  SelfAdjointReport report;
  const double scale = std::sqrt(frobenius(bc.A) * frobenius(bc.A) + frobenius(bc.B) * frobenius(bc.B));
  if (scale == 0.0) return report;
  Matrix2c A = bc.A, B = bc.B;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      A[i][j] /= scale;
      B[i][j] /= scale;
    }
  const Matrix2c ta = twist(A), tb = twist(B);
  double res = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) res += std::norm(ta[i][j] - tb[i][j]);
  report.residual = std::sqrt(res);

  // Gram matrix G = (A|B)(A|B)^*; its eigenvalues give the rank.
  Complex g[2][2];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      g[i][j] = 0.0;
      for (int k = 0; k < 2; ++k) g[i][j] += A[i][k] * std::conj(A[j][k]) + B[i][k] * std::conj(B[j][k]);
    }
  const double tr = g[0][0].real() + g[1][1].real();
  const double det = (g[0][0] * g[1][1] - g[0][1] * g[1][0]).real();
  const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
  const double lmax = 0.5 * tr + disc, lmin = 0.5 * tr - disc;
  report.rank = (lmax > kSelfAdjointTol) + (lmin > kSelfAdjointTol);
  report.self_adjoint = report.residual < kSelfAdjointTol && report.rank == 2;
  return report;
}

std::optional<SeparatedConditions> separate(const BoundaryConditions& bc) {
  switch (bc.preset) {
    case BcPreset::Dirichlet: return SeparatedConditions{{true, 0.0}, {true, 0.0}};
    case BcPreset::Neumann: return SeparatedConditions{{false, 0.0}, {false, 0.0}};
    case BcPreset::Robin: return SeparatedConditions{{false, bc.rho_a}, {false, bc.rho_b}};
    case BcPreset::General: break;
  }
  if (rank2(bc.A) != 1 || rank2(bc.B) != 1) return std::nullopt;
  const auto left = end_condition(left_null(bc.B), bc.A);
  const auto right = end_condition(left_null(bc.A), bc.B);
  if (!left || !right) return std::nullopt;
  return SeparatedConditions{*left, *right};
}

std::string to_string(Formulation formulation) {
  return formulation == Formulation::Regular ? "regular" : "quasi";
}

double TridiagonalOperator::inf_norm() const {
  double out = 0.0;
  for (std::size_t i = 0; i < diag.size(); ++i) {
    double row = std::abs(diag[i]);
    if (i > 0) row += std::abs(offdiag[i - 1]);
    if (i < offdiag.size()) row += std::abs(offdiag[i]);
    out = std::max(out, row);
  }
  return out;
}

std::pair<double, double> TridiagonalOperator::gershgorin() const {
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t i = 0; i < diag.size(); ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(offdiag[i - 1]);
    if (i < offdiag.size()) r += std::abs(offdiag[i]);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
  }
  return {lo, hi};
}

std::vector<double> TridiagonalOperator::apply(std::span<const double> x) const {
  const std::size_t n = size();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = diag[i] * x[i];
    if (i > 0) v += offdiag[i - 1] * x[i - 1];
    if (i + 1 < n) v += offdiag[i] * x[i + 1];
    y[i] = v;
  }
  return y;
}

double TridiagonalOperator::quadratic_form(std::span<const double> x) const {
  const std::size_t n = size();
  std::vector<double> rows;
  const std::vector<double>* r = &potential_part;
  if (potential_part.size() != n) {
    rows.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      rows[i] = diag[i] + (i > 0 ? offdiag[i - 1] : 0.0) + (i + 1 < n ? offdiag[i] : 0.0);
    r = &rows;
  }
  double kinetic = 0.0, potential = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double d = x[i + 1] - x[i];
    kinetic += -offdiag[i] * d * d;
  }
  for (std::size_t i = 0; i < n; ++i) potential += (*r)[i] * x[i] * x[i];
  return kinetic + potential;
}

TridiagonalOperator assemble_regular(const PotentialModel& potential, const PhysicalParams& params, const Mesh& mesh,
                                     const BoundaryConditions& bc) {
  params.validate();
  const auto sep = separate(bc);
  if (!sep) throw BoundaryConditionError("regular formulation supports separated real boundary conditions only");
  if (potential.mesh && !(*potential.mesh == mesh))
    throw std::invalid_argument("potential samples were taken on a different mesh");
  const std::size_t n = static_cast<std::size_t>(mesh.n_cells);
  if (potential.v_samples.size() != n) throw std::invalid_argument("potential sample count does not match mesh");
  for (double v : potential.v_samples)
    if (!std::isfinite(v)) throw std::invalid_argument("potential samples must be finite");

  const double c = params.kinetic_prefactor();
  const double h = mesh.h;
  const double k = c / (h * h);
  const auto ghost = [h](const EndCondition& e, bool left) {
    if (e.dirichlet) return -1.0;
    const double rh = e.rho * h;
    if (rh == (left ? 2.0 : -2.0)) throw BoundaryConditionError("Robin coefficient makes the ghost-node fold singular");
    return left ? (2.0 + rh) / (2.0 - rh) : (2.0 - rh) / (2.0 + rh);
  };

  TridiagonalOperator T;
  T.mesh = mesh;
  T.nodes = mesh.nodes(NodeRule::Staggered);
  T.bc_tag = bc.tag();
  T.formulation = Formulation::Regular;
  T.diag.resize(n);
  T.potential_part.resize(n);
  T.offdiag.assign(n - 1, -k);
  for (std::size_t j = 0; j < n; ++j) {
    T.diag[j] = 2.0 * k + potential.v_samples[j];
    T.potential_part[j] = potential.v_samples[j];
  }
  const double gl = ghost(sep->left, true), gr = ghost(sep->right, false);
  T.diag.front() -= gl * k;
  T.potential_part.front() += (1.0 - gl) * k;
  T.diag.back() -= gr * k;
  T.potential_part.back() += (1.0 - gr) * k;
  return T;
}

TridiagonalOperator assemble_quasi(const PotentialModel& primitive, const PhysicalParams& params, const Mesh& mesh,
                                   const BoundaryConditions& bc) {
  params.validate();
  const auto sep = separate(bc);
  if (!sep || !sep->left.dirichlet || !sep->right.dirichlet)
    throw BoundaryConditionError("quasi-derivative formulation supports Dirichlet conditions only");
  if (!primitive.primitive) throw std::invalid_argument("quasi-derivative assembly needs a primitive");

  const int N = mesh.n_cells;
  const double h = mesh.h;
  const double c = params.kinetic_prefactor();
  const int order = primitive.u_rule.gauss_order;
  const auto& rule = gauss_legendre(order);
  const auto& cuts = primitive.u_rule.breakpoints;

  // Per cell: I0 = int U phi_left, I1 = int U phi_right.
  std::vector<double> I0(N, 0.0), I1(N, 0.0);
  double total = 0.0;
  for (int cell = 0; cell < N; ++cell) {
    const double lo = mesh.cell_lo(cell), hi = mesh.cell_hi(cell);
    std::vector<double> pieces{lo};
    for (double p : cuts)
      if (p > lo && p < hi) pieces.push_back(p);
    pieces.push_back(hi);
    std::sort(pieces.begin(), pieces.end());
    for (std::size_t q = 0; q + 1 < pieces.size(); ++q) {
      const double pl = pieces[q], ph = pieces[q + 1];
      const double mid = 0.5 * (pl + ph), half = 0.5 * (ph - pl);
      for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
        const double s = mid + half * rule.nodes[g];
        const double w = half * rule.weights[g] * primitive.U(s);
        I0[cell] += w * (hi - s) / h;
        I1[cell] += w * (s - lo) / h;
      }
    }
    total += I0[cell] + I1[cell];
  }
  // Remove the mean of U over J; the spectrum does not depend on it.
  const double mean = total / params.length();
  for (int cell = 0; cell < N; ++cell) {
    I0[cell] -= 0.5 * mean * h;
    I1[cell] -= 0.5 * mean * h;
  }

  const double h2 = h * h;
  const std::size_t n = static_cast<std::size_t>(N - 1);  // interior nodes 1..N-1
  TridiagonalOperator T;
  T.mesh = mesh;
  T.bc_tag = bc.tag();
  T.formulation = Formulation::QuasiDerivative;
  T.nodes.resize(n);
  T.diag.resize(n);
  T.potential_part.resize(n);
  T.offdiag.resize(n > 0 ? n - 1 : 0);
  for (std::size_t i = 0; i < n; ++i) {
    const int node = static_cast<int>(i) + 1;
    T.nodes[i] = mesh.cell_lo(node);
    // node is the right end of cell node-1 and the left end of cell node.
    T.diag[i] = 2.0 * c / h2 + (2.0 * I0[node] - 2.0 * I1[node - 1]) / h2;
    double r = (I0[node] + I1[node] - I0[node - 1] - I1[node - 1]) / h2;
    if (i == 0) r += c / h2 - (I1[0] - I0[0]) / h2;
    if (i + 1 == n) r += c / h2 - (I1[N - 1] - I0[N - 1]) / h2;
    T.potential_part[i] = r;
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const int cell = static_cast<int>(i) + 1;
    T.offdiag[i] = -c / h2 + (I1[cell] - I0[cell]) / h2;
  }
  return T;
}

int sturm_count(const TridiagonalOperator& T, double sigma) {
  const std::size_t n = T.size();
  if (n == 0) return 0;
  double bmax = 1.0;
  for (double b : T.offdiag) bmax = std::max(bmax, b * b);
  const double pivmin = DBL_MIN * bmax;
  int count = 0;
  double d = T.diag[0] - sigma;
  if (std::abs(d) < pivmin) d = -pivmin;
  if (d < 0.0) ++count;
  for (std::size_t i = 1; i < n; ++i) {
    d = (T.diag[i] - sigma) - T.offdiag[i - 1] * T.offdiag[i - 1] / d;
    if (std::abs(d) < pivmin) d = -pivmin;
    if (d < 0.0) ++count;
  }
  return count;
}

bool Spectrum::all_converged() const {
  return std::all_of(converged.begin(), converged.end(), [](bool b) { return b; });
}

double Spectrum::inner(std::size_t i, std::size_t j) const {
  return mesh.h * dot(eigenfunctions.at(i), eigenfunctions.at(j));
}

Spectrum eigen_lowest(const TridiagonalOperator& T, int k, const EigenOptions& opts) {
  const std::size_t n = T.size();
  if (k < 1 || static_cast<std::size_t>(k) > n) throw std::invalid_argument("eigen_lowest: k out of range");
  if (T.offdiag.size() + 1 != n) throw std::invalid_argument("eigen_lowest: offdiag size mismatch");

  const auto [glo, ghi] = T.gershgorin();
  const double tnorm = std::max(T.inf_norm(), DBL_MIN);
  const double abs_floor = 4.0 * DBL_EPSILON * tnorm;

  std::vector<double> values(k);
  double lo_start = glo - abs_floor;
  for (int i = 0; i < k; ++i) {
    double lo = lo_start, hi = ghi + abs_floor;
    while (true) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (hi - lo <= std::max(opts.relative_tolerance * std::max(std::abs(lo), std::abs(hi)), abs_floor)) break;
      if (sturm_count(T, mid) > i)
        hi = mid;
      else
        lo = mid;
    }
    values[i] = 0.5 * (lo + hi);
    lo_start = lo;
  }

  Spectrum out;
  out.mesh = T.mesh;
  out.nodes = T.nodes;
  out.bc_tag = T.bc_tag;
  out.epsilon_tag = T.epsilon_tag;
  out.formulation = T.formulation;

  std::vector<std::vector<double>> basis;
  std::vector<std::pair<double, std::size_t>> order;
  std::vector<double> residuals(k);
  std::vector<bool> converged(k);
  const double pivot_floor = DBL_EPSILON * tnorm;
  for (int i = 0; i < k; ++i) {
    const TridiagonalLU lu(T, values[i], pivot_floor);
    std::mt19937 rng(opts.seed + static_cast<unsigned>(i));
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> x(n);
    for (auto& v : x) v = dist(rng);
    orthogonalize(x, basis);
    double nx = norm2(x);
    for (auto& v : x) v /= nx;

    double lambda = values[i], residual = INFINITY;
    bool ok = false;
    for (int it = 0; it < opts.max_inverse_iterations; ++it) {
      lu.solve(x);
      orthogonalize(x, basis);
      nx = norm2(x);
      if (!(nx > 0.0) || !std::isfinite(nx)) break;
      for (auto& v : x) v /= nx;
      lambda = T.quadratic_form(x);
      const auto tx = T.apply(x);
      double r2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) r2 += (tx[j] - lambda * x[j]) * (tx[j] - lambda * x[j]);
      residual = std::sqrt(r2);
      if (it >= 1 && residual <= 1e-10 * (std::abs(lambda) + tnorm)) {
        ok = true;
        break;
      }
    }
    values[i] = lambda;
    residuals[i] = residual;
    converged[i] = ok;
    basis.push_back(x);
    order.emplace_back(lambda, static_cast<std::size_t>(i));
  }

  std::stable_sort(order.begin(), order.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
  const double h = T.mesh.h > 0.0 ? T.mesh.h : 1.0;
  for (const auto& [lambda, idx] : order) {
    std::vector<double> psi = basis[idx];
    const double scale = 1.0 / std::sqrt(h * dot(psi, psi));
    for (auto& v : psi) v *= scale;
    const auto first = std::find_if(psi.begin(), psi.end(), [](double v) { return std::abs(v) > 1e-8; });
    if (first != psi.end() && *first < 0.0)
      for (auto& v : psi) v = -v;
    out.eigenvalues.push_back(lambda);
    out.eigenfunctions.push_back(std::move(psi));
    out.residuals.push_back(residuals[idx]);
    out.converged.push_back(converged[idx]);
  }
  return out;
}

std::vector<double> resample(const Spectrum& spectrum, std::size_t n, std::span<const double> target_nodes,
                             double target_h) {
  const auto& psi = spectrum.eigenfunctions.at(n);
  std::vector<double> xs, ys;
  const bool dirichlet = spectrum.bc_tag == "dirichlet";
  if (dirichlet) {
    xs.push_back(spectrum.mesh.a);
    ys.push_back(0.0);
  }
  xs.insert(xs.end(), spectrum.nodes.begin(), spectrum.nodes.end());
  ys.insert(ys.end(), psi.begin(), psi.end());
  if (dirichlet) {
    xs.push_back(spectrum.mesh.b);
    ys.push_back(0.0);
  }
  std::vector<double> out(target_nodes.size());
  for (std::size_t i = 0; i < target_nodes.size(); ++i) {
    const double t = target_nodes[i];
    if (t <= xs.front()) {
      out[i] = ys.front();
    } else if (t >= xs.back()) {
      out[i] = ys.back();
    } else {
      const auto it = std::upper_bound(xs.begin(), xs.end(), t);
      const std::size_t j = static_cast<std::size_t>(it - xs.begin());
      const double w = (t - xs[j - 1]) / (xs[j] - xs[j - 1]);
      out[i] = (1.0 - w) * ys[j - 1] + w * ys[j];
    }
  }
  const double norm = std::sqrt(target_h * dot(out, out));
  if (norm > 0.0)
    for (auto& v : out) v /= norm;
  return out;
}

}  // namespace bentwire
