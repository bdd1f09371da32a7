#include "heatbound/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>
#include <thread>

#include "heatbound/errors.hpp"

namespace heatbound::numerics {

namespace {

double simpson(double h, double fa, double fm, double fb) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double b,
             double fa, double fm, double fb, double whole, double rel_tol,
             double abs_floor, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(m - a, fa, flm, fm);
  const double right = simpson(b - m, fm, frm, fb);
  const double err = left + right - whole;
  const double tol = std::max(rel_tol * std::abs(left + right), abs_floor);
  if (depth <= 0 || std::abs(err) <= 15.0 * tol)
    return left + right + err / 15.0;
  return adapt(f, a, m, fa, flm, fm, left, rel_tol, 0.5 * abs_floor, depth - 1) +
         adapt(f, m, b, fm, frm, fb, right, rel_tol, 0.5 * abs_floor, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double rel_tol, int max_depth) {
  if (!(rel_tol > 0)) throw DomainError("adaptive_simpson: tolerance must be positive");
  if (!(b >= a)) throw DomainError("adaptive_simpson: reversed interval");
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  const double whole = simpson(b - a, fa, fm, fb);
  const double abs_floor = std::abs(whole) * rel_tol * 1e-3 + 1e-300;
  return adapt(f, a, b, fa, fm, fb, whole, rel_tol, abs_floor, max_depth);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 std::span<const double> breakpoints, double rel_tol) {
  if (!(b >= a)) throw DomainError("integrate: reversed interval");
  std::vector<double> cuts(breakpoints.begin(), breakpoints.end());
  std::erase_if(cuts, [&](double c) { return !(c > a && c < b); });
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double total = 0.0;
  double lo = a;
  for (double c : cuts) {
    total += adaptive_simpson(f, lo, c, rel_tol);
    lo = c;
  }
  total += adaptive_simpson(f, lo, b, rel_tol);
  return total;
}

Quadrature gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: need at least one node");
  Quadrature q;
  q.nodes.assign(n, 0.0);
  q.weights.assign(n, 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Seed with the Chebyshev-like root estimate, polish by Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 64; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int l = 2; l <= n; ++l) {
        const double p2 = ((2.0 * l - 1.0) * x * p1 - (l - 1.0) * p0) / l;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    q.nodes[i] = -x;
    q.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    q.weights[i] = w;
    q.weights[n - 1 - i] = w;
  }
  return q;
}

Quadrature gauss_legendre(int n, double a, double b) {
  Quadrature q = gauss_legendre(n);
  const double mid = 0.5 * (a + b);
  const double rad = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    q.nodes[i] = mid + rad * q.nodes[i];
    q.weights[i] *= rad;
  }
  return q;
}

GoldenResult golden_min(const std::function<double(double)>& f, double a,
                        double b, double x_tol) {
  if (!(b > a)) throw DomainError("golden_min: empty interval");
  if (!(x_tol > 0)) throw DomainError("golden_min: tolerance must be positive");
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  int evals = 2;
  while (b - a > x_tol && evals < 400) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
    ++evals;
  }
  GoldenResult r;
  r.x = 0.5 * (a + b);
  r.fx = f(r.x);
  r.evals = evals + 1;
  return r;
}

double central_diff(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

double central_diff2(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

std::vector<double> logspace(double a, double b, int k) {
  if (!(a > 0) || !(b > 0)) throw DomainError("logspace: endpoints must be positive");
  if (k < 1) throw DomainError("logspace: need at least one point");
  std::vector<double> out(k);
  if (k == 1) {
    out[0] = a;
    return out;
  }
  const double la = std::log(a);
  const double lb = std::log(b);
  for (int i = 0; i < k; ++i) out[i] = std::exp(la + (lb - la) * i / (k - 1));
  out.front() = a;
  out.back() = b;
  return out;
}

int max_threads() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  int cap = std::min(hw, 4);
  if (const char* env = std::getenv("HEATBOUND_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1 && v <= 64) cap = static_cast<int>(v);
  }
  return cap;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(max_threads()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace heatbound::numerics
