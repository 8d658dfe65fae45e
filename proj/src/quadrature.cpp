#include "spdc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace spdc {

namespace {

GaussLegendreRule compute_gauss_legendre(int n) {
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  // Roots come in +/- pairs; solve for the non-negative half.
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Tricomi-style initial guess, then Newton on the three-term recurrence.
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.weights[i] = w;
    rule.nodes[n - 1 - i] = x;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;  // exact midpoint for odd orders
  return rule;
}

std::vector<double> clipped_panels(double a, double b,
                                   const std::vector<double>& breakpoints) {
  std::vector<double> edges;
  edges.push_back(a);
  for (double p : breakpoints)
    if (p > a && p < b) edges.push_back(p);
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

}  // namespace

const GaussLegendreRule& gauss_legendre(int order) {
  detail::require(order >= 1 && order <= (1 << 16),
                  "gauss_legendre: order out of range");
  static std::mutex mu;
  static std::map<int, GaussLegendreRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it == cache.end())
    it = cache.emplace(order, compute_gauss_legendre(order)).first;
  return it->second;
}

Complex principal_sqrt(Complex w) {
  detail::require(w != Complex(0.0, 0.0), "principal_sqrt: argument is zero");
  return std::sqrt(w);  // std::sqrt is the principal branch, Re >= 0
}

Complex guarded_sqrt_det(Complex det, double z1, double z2) {
  const double re = det.real(), im = det.imag();
  const bool degenerate = !(std::abs(re) > 0.0 || std::abs(im) > 0.0);
  const bool on_cut = re < 0.0 && std::abs(im) <= 1e-12 * std::abs(re);
  if (degenerate || on_cut || !std::isfinite(re) || !std::isfinite(im)) {
    std::ostringstream os;
    os << "guarded_sqrt_det: kernel determinant " << re << (im < 0 ? "-" : "+")
       << std::abs(im) << "i at sample point (z1=" << z1 << ", z2=" << z2
       << ") mm is degenerate or lies on the branch cut; this configuration "
          "is outside the finite-filter regime (use the analytic amplitude "
          "or add finite filters)";
    throw std::runtime_error(os.str());
  }
  return std::sqrt(det);
}

Complex gl_sum_1d(const Integrand1D& f, double a, double b, int order,
                  const std::vector<double>& breakpoints) {
  if (!(b > a)) return {0.0, 0.0};
  const GaussLegendreRule& rule = gauss_legendre(order);
  const std::vector<double> edges = clipped_panels(a, b, breakpoints);
  Complex total{0.0, 0.0};
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double mid = 0.5 * (edges[p] + edges[p + 1]);
    const double half = 0.5 * (edges[p + 1] - edges[p]);
    Complex acc{0.0, 0.0};
    for (int i = 0; i < order; ++i)
      acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
    total += half * acc;
  }
  return total;
}

Complex gl_sum_rotated(const Integrand2D& f, double z_lo, double z_hi,
                       int order, const std::vector<double>& s_breakpoints) {
  detail::require(z_hi > z_lo, "gl_sum_rotated: empty square");
  const GaussLegendreRule& rule = gauss_legendre(order);
  const double s_lo = 2.0 * z_lo, s_hi = 2.0 * z_hi;
  const double s_mid = z_lo + z_hi;
  const double half_diag = z_hi - z_lo;  // w spans +/- (half_diag - |s - s_mid|)
  const auto outer = [&](double s) -> Complex {
    const double w_max = half_diag - std::abs(s - s_mid);
    if (!(w_max > 0.0)) return {0.0, 0.0};
    Complex acc{0.0, 0.0};
    for (int i = 0; i < order; ++i) {
      const double w = w_max * rule.nodes[i];
      acc += rule.weights[i] * f(0.5 * (s + w), 0.5 * (s - w));
    }
    return w_max * acc;
  };
  // Split at s_mid where the diamond width has a derivative kink (without
  // it the outer rule converges only algebraically).
  std::vector<double> panels = s_breakpoints;
  panels.push_back(s_mid);
  // Jacobian of (z1, z2) -> (s, w) is 1/2.
  return 0.5 * gl_sum_1d(outer, s_lo, s_hi, order, panels);
}

namespace {

template <typename Evaluate>
QuadratureResult refine(const Evaluate& eval, const QuadratureConfig& cfg,
                        double abs_scale) {
  cfg.validate();
  QuadratureResult res;
  int order = cfg.base_order;
  Complex prev = eval(order);
  res.value = prev;
  for (int k = 1; k <= cfg.max_refinements; ++k) {
    order *= 2;
    const Complex cur = eval(order);
    const double diff = std::abs(cur - prev);
    const double scale = std::max(std::abs(cur), abs_scale);
    res.value = cur;
    res.refinements_used = k;
    res.est_rel_error = scale > 0.0 ? diff / scale
                                    : (diff > 0.0 ? 1.0 : 0.0);
    if (res.est_rel_error <= cfg.rel_tol) {
      res.converged = true;
      return res;
    }
    prev = cur;
  }
  if (cfg.max_refinements == 0) {
    // No comparison possible; report the single estimate as unconverged
    // unless the caller asked for exactly that.
    res.est_rel_error = 0.0;
    res.converged = false;
  }
  return res;
}

}  // namespace

QuadratureResult integrate_1d(const Integrand1D& f, double a, double b,
                              const QuadratureConfig& cfg,
                              const std::vector<double>& breakpoints,
                              double abs_scale) {
  detail::require(std::isfinite(a) && std::isfinite(b),
                  "integrate_1d: bounds must be finite");
  return refine(
      [&](int order) { return gl_sum_1d(f, a, b, order, breakpoints); }, cfg,
      abs_scale);
}

QuadratureResult integrate_2d(const Integrand2D& f, double ax, double bx,
                              double ay, double by,
                              const QuadratureConfig& cfg) {
  detail::require(std::isfinite(ax) && std::isfinite(bx) &&
                      std::isfinite(ay) && std::isfinite(by),
                  "integrate_2d: bounds must be finite");
  const auto eval = [&](int order) -> Complex {
    const auto inner = [&](double x) -> Complex {
      return gl_sum_1d([&](double y) { return f(x, y); }, ay, by, order);
    };
    return gl_sum_1d(inner, ax, bx, order);
  };
  return refine(eval, cfg, 0.0);
}

QuadratureResult integrate_square_rotated(
    const Integrand2D& f, double z_lo, double z_hi,
    const QuadratureConfig& cfg, const std::vector<double>& s_breakpoints,
    double abs_scale) {
  return refine(
      [&](int order) {
        return gl_sum_rotated(f, z_lo, z_hi, order, s_breakpoints);
      },
      cfg, abs_scale);
}

}  // namespace spdc
