#include <algorithm>
#include <cmath>
#include <string>

#include "bykov/attractors.hpp"

namespace bykov {

namespace {

// Cubic Lagrange weights for nodes at -1, 0, 1, 2 evaluated at s in [0, 1).
std::array<double, 4> uniform_weights(double s) {
  return {-s * (s - 1.0) * (s - 2.0) / 6.0, (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
          -(s + 1.0) * s * (s - 2.0) / 2.0, (s + 1.0) * s * (s - 1.0) / 6.0};
}

double lagrange4(const std::array<double, 4>& t, const std::array<double, 4>& v, double x) {
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) {
    double w = 1.0;
    for (int j = 0; j < 4; ++j) {
      if (j != i) w *= (x - t[j]) / (t[i] - t[j]);
    }
    sum += w * v[i];
  }
  return sum;
}

}  // namespace

FoldDetected::FoldDetected(int iteration, double x)
    : std::runtime_error("graph transform: image angle not monotone (fold) at iteration " +
                         std::to_string(iteration) + ", x = " + std::to_string(x)),
      iteration_(iteration),
      x_(x) {}

double CircleGraph::height_at(double x) const {
  const int n = N();
  const double t = wrap_angle(x) / kTwoPi * n;
  int i = static_cast<int>(std::floor(t));
  const double s = t - i;
  const auto w = uniform_weights(s);
  double sum = 0.0;
  for (int k = 0; k < 4; ++k) {
    const int idx = ((i - 1 + k) % n + n) % n;
    sum += w[k] * heights[idx];
  }
  return sum;
}

CircleGraph graph_transform(const ReturnMap& map, const AnnulusBand& band, int N, double tol,
                            int max_iter) {
  if (N < 8 || (N & (N - 1)) != 0) throw std::invalid_argument("graph_transform: N must be a power of two >= 8");
  if (!(tol > 0.0)) throw std::invalid_argument("graph_transform: tol must be positive");

  CircleGraph g;
  g.heights.assign(N, 0.5 * (band.y_lo + band.y_hi));
  std::vector<double> X(N), Y(N), next(N);

  for (int it = 1; it <= max_iter; ++it) {
    for (int i = 0; i < N; ++i) {
      const CoverPoint q = map.eval_lifted({g.node(i), g.heights[i]});
      X[i] = q.x;
      Y[i] = q.y;
    }
    for (int i = 0; i + 1 < N; ++i) {
      if (!(X[i + 1] > X[i])) throw FoldDetected(it, g.node(i));
    }
    if (!(X[0] + kTwoPi > X[N - 1])) throw FoldDetected(it, g.node(N - 1));

    // Image angles relative to X[0]: increasing in [0, 2pi), periodic with shift 2pi.
    const double base = X[0];
    auto t_at = [&](int k) {
      const int q = static_cast<int>(std::floor(static_cast<double>(k) / N));
      const int r = k - q * N;
      return X[r] - base + kTwoPi * q;
    };
    auto y_at = [&](int k) { return Y[((k % N) + N) % N]; };

    // Visit nodes in increasing t = wrap(x_j - base) so the bracket only moves forward.
    int j0 = 0;
    double t_min = kTwoPi;
    for (int j = 0; j < N; ++j) {
      const double t = wrap_angle(g.node(j) - base);
      if (t < t_min) {
        t_min = t;
        j0 = j;
      }
    }
    int k = 0;
    double change = 0.0;
    for (int m = 0; m < N; ++m) {
      const int j = (j0 + m) % N;
      const double t = wrap_angle(g.node(j) - base);
      while (t_at(k + 1) <= t) ++k;
      const std::array<double, 4> tt{t_at(k - 1), t_at(k), t_at(k + 1), t_at(k + 2)};
      const std::array<double, 4> vv{y_at(k - 1), y_at(k), y_at(k + 1), y_at(k + 2)};
      next[j] = lagrange4(tt, vv, t);
    }
    for (int j = 0; j < N; ++j) change = std::max(change, std::fabs(next[j] - g.heights[j]));
    g.heights.swap(next);
    g.iterations = it;
    g.last_change = change;
    if (change < tol) {
      g.residual = invariance_residual(map, g);
      return g;
    }
  }
  throw NoConvergence("graph transform: no convergence after " + std::to_string(max_iter) +
                      " iterations (last change " + std::to_string(g.last_change) + ")");
}

double invariance_residual(const ReturnMap& map, const CircleGraph& circle) {
  double r = 0.0;
  for (int i = 0; i < circle.N(); ++i) {
    const CylinderPoint q = map.eval({circle.node(i), circle.heights[i]});
    r = std::max(r, std::fabs(q.y() - circle.height_at(q.x())));
  }
  return r;
}

double RotationEstimate::rho_mod1() const { return rho - std::floor(rho); }

RotationEstimate rotation_number(const std::function<double(double)>& lifted_circle_map,
                                 double x0, long n) {
  if (n < 2) throw std::invalid_argument("rotation_number: n >= 2 required");
  const long half = n / 2;
  double x = wrap_angle(x0);
  // Compensated sum of the lifted increments.
  double total = 0.0, comp = 0.0, total_half = 0.0;
  for (long i = 0; i < n; ++i) {
    const double inc = lifted_circle_map(x) - x;
    const double yv = inc - comp;
    const double t = total + yv;
    comp = (t - total) - yv;
    total = t;
    x = wrap_angle(x + inc);
    if (i + 1 == half) total_half = total;
  }
  RotationEstimate est;
  est.rho = total / (kTwoPi * static_cast<double>(n));
  est.rho_half = total_half / (kTwoPi * static_cast<double>(half));
  est.converged = std::fabs(est.rho - est.rho_half) < 1e-6;
  return est;
}

RotationEstimate rotation_number(const ReturnMap& map, const CircleGraph& circle, long n) {
  return rotation_number(
      [&](double x) {
        const double u = map.log_argument(x, circle.height_at(x));
        if (!(u > 0.0)) throw DomainEscape(u);
        return x - map.K_omega() * std::log(u);
      },
      0.0, n);
}

}  // namespace bykov
