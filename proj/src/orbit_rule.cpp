#include "dflab/orbit_rule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dflab/error.hpp"
#include "dflab/parallel.hpp"
#include "dflab/quadrature.hpp"
#include "dflab/report_io.hpp"

namespace dflab {

namespace {

// Terms this far below the largest exponent contribute less than e^-40.
constexpr double kPrune = 40.0;
constexpr double kMaxStep = 50.0;

/// Eigenvalues (descending) and unit eigenvectors of a symmetric matrix of
/// size 1 or 2.
void eigen_sym(int n, const double (&h)[2][2], double (&lambda)[2], double (&vec)[2][2]) {
  if (n == 1) {
    lambda[0] = h[0][0];
    vec[0][0] = 1.0;
    vec[0][1] = 0.0;
    return;
  }
  const double a = h[0][0], b = h[0][1], c = h[1][1];
  const double mean = 0.5 * (a + c);
  const double d = std::hypot(0.5 * (a - c), b);
  lambda[0] = mean + d;
  lambda[1] = mean - d;
  double x = 1.0, y = 0.0;
  if (b != 0.0) {
    x = lambda[0] - c;
    y = b;
    if (std::abs(x) < std::abs(a - lambda[1])) {
      x = b;
      y = lambda[0] - a;
    }
    const double r = std::hypot(x, y);
    x /= r;
    y /= r;
  } else if (c > a) {
    x = 0.0;
    y = 1.0;
  }
  vec[0][0] = x;
  vec[0][1] = y;
  vec[1][0] = -y;
  vec[1][1] = x;
}

/// Convex objective G(rho) = log sum_a exp(k_a + <e_a, rho>) - <y, rho>
/// whose minimizer satisfies E_p[e] = y.
class MomentSolver {
 public:
  MomentSolver(int n, std::vector<double> konst, std::vector<double> exps, double tol)
      : n_(n), k_(std::move(konst)), e_(std::move(exps)), tol_(tol), tau_(k_.size()) {}

  struct State {
    double value = 0.0;
    double grad[2] = {0.0, 0.0};
    double hess[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  };

  /// Exponents are measured from `base` so that targets very close to a
  /// lattice point keep full relative precision.
  void set_base(const double* base) {
    for (int i = 0; i < n_; ++i) base_[i] = base[i];
  }

  /// G split as max exponent + remainder so that differences between nearby
  /// points keep their precision when one exponent dominates.
  struct Value {
    double top = 0.0;
    double rest = 0.0;
  };

  Value value(const double* rho, const double* y) {
    double mx = -INFINITY;
    std::size_t arg = 0;
    for (std::size_t a = 0; a < k_.size(); ++a) {
      double t = k_[a];
      for (int i = 0; i < n_; ++i) t += (e_[a * n_ + i] - base_[i]) * rho[i];
      tau_[a] = t;
      if (t > mx) {
        mx = t;
        arg = a;
      }
    }
    double others = 0.0;
    for (std::size_t a = 0; a < k_.size(); ++a)
      if (a != arg && tau_[a] > mx - kPrune) others += std::exp(tau_[a] - mx);
    Value v{mx, std::log1p(others)};
    for (int i = 0; i < n_; ++i) v.rest -= y[i] * rho[i];
    return v;
  }

  State state(const double* rho, const double* y) {
    State st;
    double mx = -INFINITY;
    for (std::size_t a = 0; a < k_.size(); ++a) {
      double t = k_[a];
      for (int i = 0; i < n_; ++i) t += (e_[a * n_ + i] - base_[i]) * rho[i];
      tau_[a] = t;
      mx = std::max(mx, t);
    }
    double s = 0.0, m1[2] = {0.0, 0.0}, m2[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    for (std::size_t a = 0; a < k_.size(); ++a) {
      if (tau_[a] <= mx - kPrune) continue;
      const double w = std::exp(tau_[a] - mx);
      s += w;
      for (int i = 0; i < n_; ++i) {
        const double ei = e_[a * n_ + i] - base_[i];
        m1[i] += w * ei;
        for (int j = 0; j <= i; ++j) m2[i][j] += w * ei * (e_[a * n_ + j] - base_[j]);
      }
    }
    st.value = mx + std::log(s);
    for (int i = 0; i < n_; ++i) {
      const double mean_i = m1[i] / s;
      st.value -= y[i] * rho[i];
      st.grad[i] = mean_i - y[i];
      for (int j = 0; j <= i; ++j) {
        st.hess[i][j] = m2[i][j] / s - mean_i * (m1[j] / s);
        st.hess[j][i] = st.hess[i][j];
      }
    }
    return st;
  }

  /// Minimizes G from the given start; returns false on stagnation.
  bool solve(double* rho, const double* y, double scale) {
    const double tol = tol_ * scale;
    for (int it = 0; it < 200; ++it) {
      State st = state(rho, y);
      double gmax = 0.0;
      for (int i = 0; i < n_; ++i) gmax = std::max(gmax, std::abs(st.grad[i]));
      if (gmax <= tol) return true;
      // Newton along each eigendirection of the Hessian with positive
      // curvature; along numerically flat directions (only terms sharing that
      // exponent survive) a long step down the gradient. Each component is
      // capped separately so a flat direction does not shrink the others.
      double lambda[2], vec[2][2];
      eigen_sym(n_, st.hess, lambda, vec);
      const double flat = 1e-14 * std::max(lambda[0], 0.0);
      double step[2] = {0.0, 0.0};
      bool newton = true;
      double smax = 0.0;
      for (int e = 0; e < n_; ++e) {
        double gv = 0.0;
        for (int i = 0; i < n_; ++i) gv += st.grad[i] * vec[e][i];
        double comp;
        if (lambda[e] > flat && lambda[e] > 0.0) {
          comp = -gv / lambda[e];
        } else {
          comp = gv > 0.0 ? -kMaxStep : gv < 0.0 ? kMaxStep : 0.0;
          newton = false;
        }
        if (std::abs(comp) > kMaxStep) {
          comp = comp > 0.0 ? kMaxStep : -kMaxStep;
          newton = false;
        }
        smax = std::max(smax, std::abs(comp));
        for (int i = 0; i < n_; ++i) step[i] += comp * vec[e][i];
      }
      if (newton && smax * scale <= 1e-2) {
        // Exponents move by at most 1e-2, so the Hessian is nearly constant
        // along the step and the full Newton step is safe. Objective values
        // would not resolve the remaining decrease anyway.
        for (int i = 0; i < n_; ++i) rho[i] += step[i];
        continue;
      }
      double slope = 0.0;
      for (int i = 0; i < n_; ++i) slope += st.grad[i] * step[i];
      const Value cur = value(rho, y);
      double t = 1.0;
      double trial[2] = {rho[0], rho[1]};
      bool accepted = false;
      for (int ls = 0; ls < 80; ++ls) {
        for (int i = 0; i < n_; ++i) trial[i] = rho[i] + t * step[i];
        const Value v = value(trial, y);
        if ((v.top - cur.top) + (v.rest - cur.rest) <= 1e-4 * t * slope) {
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      if (!accepted) {
        // The objective no longer resolves progress; accept a converged
        // gradient at a slightly looser level.
        return gmax <= 1e3 * tol;
      }
      for (int i = 0; i < n_; ++i) rho[i] = trial[i];
    }
    return false;
  }

 private:
  int n_;
  std::vector<double> k_;
  std::vector<double> e_;
  double tol_;
  std::vector<double> tau_;
  double base_[2] = {0.0, 0.0};
};

/// Moment-polytope point base + offset with its quadrature weight.
struct Target {
  double base[2];
  double off[2];
  double weight;
  double abs(int i) const { return base[i] + off[i]; }
};

/// Tanh-sinh nodes on [0, 1] as (distance to 0, distance to 1, weight),
/// truncated where the weights drop below 1e-20.
void tanh_sinh(int per_unit, std::vector<double>& left, std::vector<double>& right,
               std::vector<double>& weight) {
  const double h = 1.0 / per_unit;
  for (int k = -40 * per_unit; k <= 40 * per_unit; ++k) {
    const double x = k * h;
    const double u = 0.5 * std::numbers::pi * std::sinh(x);
    const double w = 0.5 * h * 0.5 * std::numbers::pi * std::cosh(x) / (std::cosh(u) * std::cosh(u));
    if (!(w > 1e-20)) continue;
    left.push_back(1.0 / (1.0 + std::exp(-2.0 * u)));
    right.push_back(1.0 / (1.0 + std::exp(2.0 * u)));
    weight.push_back(w);
  }
}

}  // namespace

OrbitRule orbit_adapted_rule(const OrthonormalBasis& onb, std::span<const double> shift,
                             const OrbitRuleOptions& options) {
  const int n = onb.basis.dimension();
  const int ell = onb.exponent();
  if (!onb.monomial_aligned())
    throw ConfigError("orbit-adapted rules need a monomial-aligned orthonormal basis");
  if (n > 2) throw ConfigError("orbit-adapted rules are implemented for n <= 2");
  if (!shift.empty() && shift.size() != onb.size())
    throw ConfigError("shift vector length does not match the section dimension");
  const int order = options.order > 0 ? options.order : (n == 1 ? 16 : 4);

  std::vector<double> konst(onb.size()), exps(onb.size() * n);
  for (std::size_t a = 0; a < onb.size(); ++a) {
    konst[a] = onb.log_abs2_coeff[a] + (shift.empty() ? 0.0 : 2.0 * shift[a]);
    const auto& m = onb.basis.monomial(onb.aligned[a]);
    for (int i = 0; i < n; ++i) exps[a * n + i] = m[i + 1];
  }

  // Rows of targets solved sequentially with warm starts; rows are independent.
  std::vector<std::vector<Target>> rows;
  if (n == 1) {
    // The integrand has fractional-power singularities at lattice points,
    // which tanh-sinh panels absorb.
    std::vector<double> left, right, wt;
    tanh_sinh(order, left, right, wt);
    for (int k = 0; k < ell; ++k) {
      std::vector<Target> row;
      for (std::size_t g = 0; g < wt.size(); ++g) {
        if (left[g] <= 0.5) {
          row.push_back({{double(k), 0.0}, {left[g], 0.0}, wt[g]});
        } else {
          row.push_back({{k + 1.0, 0.0}, {-right[g], 0.0}, wt[g]});
        }
      }
      rows.push_back(std::move(row));
    }
  } else {
    std::vector<double> t, w;
    gauss_legendre(order, t, w);
    // Collapsed map of [0,1]^2 onto the reference triangle: (a, (1-a) b).
    for (int j = 0; j < ell; ++j) {
      std::vector<Target> row;
      for (int i = 0; i + j < ell; ++i) {
        const double base[2][3][2] = {
            {{double(i), double(j)}, {i + 1.0, double(j)}, {double(i), j + 1.0}},
            {{i + 1.0, j + 1.0}, {double(i), j + 1.0}, {i + 1.0, double(j)}}};
        const int tris = (i + j <= ell - 2) ? 2 : 1;
        for (int tr = 0; tr < tris; ++tr) {
          const auto& v = base[tr];
          for (int ga = 0; ga < order; ++ga) {
            for (int gb = 0; gb < order; ++gb) {
              const double x = t[ga], yv = (1.0 - t[ga]) * t[gb];
              Target tg;
              for (int c = 0; c < 2; ++c) {
                tg.base[c] = v[0][c];
                tg.off[c] = x * (v[1][c] - v[0][c]) + yv * (v[2][c] - v[0][c]);
              }
              tg.weight = 2.0 * w[ga] * w[gb] * (1.0 - t[ga]);
              row.push_back(tg);
            }
          }
        }
      }
      rows.push_back(std::move(row));
    }
  }

  std::vector<std::vector<std::vector<double>>> row_log_u(rows.size());
  std::vector<std::vector<double>> row_weight(rows.size());
  parallel_for(rows.size(), [&](std::size_t r) {
    MomentSolver solver(n, konst, exps, options.newton_tolerance);
    const auto& row = rows[r];
    double rho[2] = {0.0, 0.0};
    auto cold_start = [&](const Target& tg) {
      // Fubini-Study inverse moment map of the target.
      double y0 = ell;
      for (int i = 0; i < n; ++i) y0 -= tg.base[i];
      for (int i = 0; i < n; ++i) y0 -= tg.off[i];
      for (int i = 0; i < n; ++i) rho[i] = std::log(tg.abs(i)) - std::log(y0);
    };
    cold_start(row[0]);
    for (const auto& tg : row) {
      solver.set_base(tg.base);
      if (!solver.solve(rho, tg.off, std::max(1, ell))) {
        cold_start(tg);
        if (!solver.solve(rho, tg.off, std::max(1, ell)))
          throw NumericalError("orbit rule: moment equation did not converge at target (" +
                               format_double(tg.abs(0)) +
                               (n == 2 ? ", " + format_double(tg.abs(1)) : "") + ")");
      }
      std::vector<double> lu(n + 1);
      double mx = 0.0;
      for (int i = 0; i < n; ++i) mx = std::max(mx, rho[i]);
      double s = std::exp(-mx);
      for (int i = 0; i < n; ++i) s += std::exp(rho[i] - mx);
      lu[0] = -(mx + std::log(s));
      for (int i = 0; i < n; ++i) lu[i + 1] = rho[i] + lu[0];
      row_log_u[r].push_back(std::move(lu));
      row_weight[r].push_back(tg.weight);
    }
  });

  OrbitRule rule;
  rule.dimension = n;
  rule.ell = ell;
  rule.order = order;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t i = 0; i < row_log_u[r].size(); ++i) {
      rule.log_u.push_back(std::move(row_log_u[r][i]));
      rule.weight.push_back(row_weight[r][i]);
    }
  }
  return rule;
}

}  // namespace dflab
