#include "qcvz/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <unsupported/Eigen/NonLinearOptimization>

#include "qcvz/errors.hpp"
#include "qcvz/signals.hpp"

namespace qcvz {

const char* to_string(FitModel model) {
  switch (model) {
    case FitModel::exp_decay: return "exp_decay";
    case FitModel::damped_cosine: return "damped_cosine";
    case FitModel::rabi_sinusoid: return "rabi_sinusoid";
  }
  return "?";
}

std::size_t parameter_count(FitModel model) {
  switch (model) {
    case FitModel::exp_decay: return 3;
    case FitModel::damped_cosine: return 5;
    case FitModel::rabi_sinusoid: return 4;
  }
  return 0;
}

const FitParam& FitResult::param(std::string_view name) const {
  for (const auto& p : params) {
    if (p.name == name) return p;
  }
  throw std::out_of_range("fit has no parameter " + std::string(name));
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Reported-parameter model, x in original units.
double reported_model(FitModel model, const VectorXd& p, double x) {
  switch (model) {
    case FitModel::exp_decay:
      return p[0] * std::exp(-x / p[1]) + p[2];
    case FitModel::damped_cosine:
      return p[0] * std::exp(-x / p[1]) * std::cos(kTwoPi * p[2] * x + p[3]) + p[4];
    case FitModel::rabi_sinusoid:
      return p[0] * std::cos(kTwoPi * p[1] * x + p[2]) + p[3];
  }
  return 0.0;
}

// Internal parametrizations on the scaled abscissa u = x / L:
//   exp_decay     [A, k, B]            A e^{-k u} + B
//   damped_cosine [a, b, k, nu, B]     e^{-k u}(a cos 2pi nu u + b sin 2pi nu u) + B
//   rabi_sinusoid [a, b, nu, B]        a cos 2pi nu u + b sin 2pi nu u + B
struct Scaled {
  FitModel model;
  const std::vector<double>& u;
  const std::vector<double>& y;

  double value(const VectorXd& p, double x) const {
    switch (model) {
      case FitModel::exp_decay:
        return p[0] * std::exp(-p[1] * x) + p[2];
      case FitModel::damped_cosine: {
        const double w = kTwoPi * p[3] * x;
        return std::exp(-p[2] * x) * (p[0] * std::cos(w) + p[1] * std::sin(w)) + p[4];
      }
      case FitModel::rabi_sinusoid: {
        const double w = kTwoPi * p[2] * x;
        return p[0] * std::cos(w) + p[1] * std::sin(w) + p[3];
      }
    }
    return 0.0;
  }

  void gradient(const VectorXd& p, double x, Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> g) const {
    switch (model) {
      case FitModel::exp_decay: {
        const double e = std::exp(-p[1] * x);
        g << e, -p[0] * x * e, 1.0;
        break;
      }
      case FitModel::damped_cosine: {
        const double e = std::exp(-p[2] * x);
        const double w = kTwoPi * p[3] * x;
        const double c = std::cos(w), s = std::sin(w);
        g << e * c, e * s, -x * e * (p[0] * c + p[1] * s), e * kTwoPi * x * (-p[0] * s + p[1] * c), 1.0;
        break;
      }
      case FitModel::rabi_sinusoid: {
        const double w = kTwoPi * p[2] * x;
        const double c = std::cos(w), s = std::sin(w);
        g << c, s, kTwoPi * x * (-p[0] * s + p[1] * c), 1.0;
        break;
      }
    }
  }
};

struct LmFunctor {
  const Scaled& problem;
  int n_params;

  int inputs() const { return n_params; }
  int values() const { return static_cast<int>(problem.u.size()); }

  int operator()(const VectorXd& p, VectorXd& fvec) const {
    for (std::size_t i = 0; i < problem.u.size(); ++i) {
      fvec[static_cast<Eigen::Index>(i)] = problem.value(p, problem.u[i]) - problem.y[i];
    }
    return 0;
  }

  int df(const VectorXd& p, MatrixXd& fjac) const {
    for (std::size_t i = 0; i < problem.u.size(); ++i) {
      problem.gradient(p, problem.u[i], fjac.row(static_cast<Eigen::Index>(i)));
    }
    return 0;
  }
};

double sum_sq(const Scaled& s, const VectorXd& p) {
  double acc = 0.0;
  for (std::size_t i = 0; i < s.u.size(); ++i) {
    const double r = s.value(p, s.u[i]) - s.y[i];
    acc += r * r;
  }
  return acc;
}

// Linear least squares for the amplitude-like parameters at fixed decay k and
// frequency nu. Returns the full internal parameter vector.
VectorXd linear_solve(FitModel model, const std::vector<double>& u, const std::vector<double>& y, double k,
                      double nu) {
  const auto m = static_cast<Eigen::Index>(u.size());
  const bool oscillating = model != FitModel::exp_decay;
  MatrixXd basis(m, oscillating ? 3 : 2);
  VectorXd rhs(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double x = u[static_cast<std::size_t>(i)];
    const double e = std::exp(-k * x);
    if (oscillating) {
      basis(i, 0) = e * std::cos(kTwoPi * nu * x);
      basis(i, 1) = e * std::sin(kTwoPi * nu * x);
      basis(i, 2) = 1.0;
    } else {
      basis(i, 0) = e;
      basis(i, 1) = 1.0;
    }
    rhs[i] = y[static_cast<std::size_t>(i)];
  }
  const VectorXd c = basis.colPivHouseholderQr().solve(rhs);
  switch (model) {
    case FitModel::exp_decay: return (VectorXd(3) << c[0], k, c[1]).finished();
    case FitModel::damped_cosine: return (VectorXd(5) << c[0], c[1], k, nu, c[2]).finished();
    case FitModel::rabi_sinusoid: return (VectorXd(4) << c[0], c[1], nu, c[2]).finished();
  }
  return {};
}

// Frequency (cycles per unit u) of the strongest periodogram peak, refined by
// golden-section search on the residual of the linear subproblem.
double frequency_guess(FitModel model, const std::vector<double>& u, const std::vector<double>& y, double k) {
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());

  double min_du = kInf;
  for (std::size_t i = 1; i < u.size(); ++i) min_du = std::min(min_du, u[i] - u[i - 1]);
  const double nu_max = std::min(0.5 / min_du, 0.5 * static_cast<double>(u.size()));
  const double step = 0.05;

  double best_nu = step;
  double best_power = -1.0;
  for (double nu = step; nu <= nu_max; nu += step) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      re += (y[i] - mean) * std::cos(kTwoPi * nu * u[i]);
      im += (y[i] - mean) * std::sin(kTwoPi * nu * u[i]);
    }
    const double power = re * re + im * im;
    if (power > best_power) {
      best_power = power;
      best_nu = nu;
    }
  }

  const std::vector<double>& uu = u;
  auto cost = [&](double nu) {
    const Scaled s{model, uu, y};
    return sum_sq(s, linear_solve(model, u, y, k, nu));
  };
  double lo = std::max(1e-6, best_nu - step), hi = best_nu + step;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
  double fc = cost(c), fd = cost(d);
  for (int it = 0; it < 60; ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - g * (hi - lo);
      fc = cost(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + g * (hi - lo);
      fd = cost(d);
    }
  }
  return 0.5 * (lo + hi);
}

VectorXd initial_guess(FitModel model, const std::vector<double>& u, const std::vector<double>& y) {
  static const double kDecayGrid[] = {0.0, 0.03, 0.1, 0.3, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0};
  const Scaled s{model, u, y};
  VectorXd best;
  double best_cost = kInf;
  for (double k : kDecayGrid) {
    if (model == FitModel::exp_decay && k == 0.0) continue;
    if (model == FitModel::rabi_sinusoid && k != 0.0) break;
    const double nu = model == FitModel::exp_decay ? 0.0 : frequency_guess(model, u, y, k);
    VectorXd p = linear_solve(model, u, y, k, nu);
    const double c = sum_sq(s, p);
    if (c < best_cost) {
      best_cost = c;
      best = p;
    }
  }
  return best;
}

// Convert internal (scaled) parameters to reported parameters in x units.
VectorXd to_reported(FitModel model, VectorXd p, double scale) {
  switch (model) {
    case FitModel::exp_decay:
      return (VectorXd(3) << p[0], p[1] == 0.0 ? kInf : scale / p[1], p[2]).finished();
    case FitModel::damped_cosine: {
      if (p[3] < 0.0) {
        p[3] = -p[3];
        p[1] = -p[1];
      }
      const double amp = std::hypot(p[0], p[1]);
      const double phase = std::atan2(-p[1], p[0]);
      return (VectorXd(5) << amp, p[2] == 0.0 ? kInf : scale / p[2], p[3] / scale, phase, p[4]).finished();
    }
    case FitModel::rabi_sinusoid: {
      if (p[2] < 0.0) {
        p[2] = -p[2];
        p[1] = -p[1];
      }
      const double amp = std::hypot(p[0], p[1]);
      const double phase = std::atan2(-p[1], p[0]);
      return (VectorXd(4) << amp, p[2] / scale, phase, p[3]).finished();
    }
  }
  return p;
}

std::vector<std::string> reported_names(FitModel model) {
  switch (model) {
    case FitModel::exp_decay: return {"amplitude", "tau", "offset"};
    case FitModel::damped_cosine: return {"amplitude", "tau", "frequency", "phase", "offset"};
    case FitModel::rabi_sinusoid: return {"amplitude", "frequency", "phase", "offset"};
  }
  return {};
}

}  // namespace

double FitResult::evaluate(double x) const {
  VectorXd p(static_cast<Eigen::Index>(params.size()));
  for (std::size_t i = 0; i < params.size(); ++i) p[static_cast<Eigen::Index>(i)] = params[i].value;
  return reported_model(model, p, x);
}

FitResult fit_curve(FitModel model, std::span<const double> x, std::span<const double> y) {
  const std::size_t n_params = parameter_count(model);
  if (x.size() != y.size()) throw std::invalid_argument("fit: x and y differ in length");
  if (x.size() < 4 * n_params) throw std::invalid_argument("fit: need at least 4 points per free parameter");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw std::invalid_argument("fit: non-finite data");
    if (i > 0 && !(x[i] > x[i - 1])) throw std::invalid_argument("fit: abscissa must be strictly increasing");
  }

  const double scale = std::max(std::abs(x.front()), std::abs(x.back()));
  if (!(scale > 0.0)) throw std::invalid_argument("fit: abscissa span is zero");
  std::vector<double> u(x.size());
  std::vector<double> yy(y.begin(), y.end());
  for (std::size_t i = 0; i < x.size(); ++i) u[i] = x[i] / scale;

  const Scaled problem{model, u, yy};
  VectorXd p = initial_guess(model, u, yy);
  LmFunctor functor{problem, static_cast<int>(n_params)};
  Eigen::LevenbergMarquardt<LmFunctor> lm(functor);
  lm.parameters.ftol = 1e-15;
  lm.parameters.xtol = 1e-15;
  lm.parameters.maxfev = 2000;
  const auto status = lm.minimize(p);
  using namespace Eigen::LevenbergMarquardtSpace;
  if (status == ImproperInputParameters || status == TooManyFunctionEvaluation || status == UserAsked ||
      !p.allFinite()) {
    throw NumericalError(std::string("fit did not converge (") + to_string(model) + ", status " +
                         std::to_string(static_cast<int>(status)) + ")");
  }

  // Decay rates must be positive. A vanishing rate within round-off of an
  // undamped signal is reported as tau = inf.
  if (model != FitModel::rabi_sinusoid) {
    const Eigen::Index ik = model == FitModel::exp_decay ? 1 : 2;
    if (p[ik] < 0.0 && p[ik] > -1e-9) p[ik] = 0.0;
    if (p[ik] < 0.0 || (model == FitModel::exp_decay && p[ik] == 0.0)) {
      throw NumericalError(std::string("fit returned a non-positive decay rate (") + to_string(model) + ")");
    }
  }

  const VectorXd reported = to_reported(model, p, scale);
  FitResult out{model, {}, 0.0, 0.0};

  const auto m = static_cast<Eigen::Index>(x.size());
  const auto n = static_cast<Eigen::Index>(n_params);
  double rss = 0.0;
  VectorXd resid(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    resid[i] = reported_model(model, reported, x[static_cast<std::size_t>(i)]) - y[static_cast<std::size_t>(i)];
    rss += resid[i] * resid[i];
    out.max_abs_residual = std::max(out.max_abs_residual, std::abs(resid[i]));
  }
  out.residual_norm = std::sqrt(rss);

  // Covariance from a central-difference Jacobian in reported parameters.
  MatrixXd jac(m, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    VectorXd hi = reported, lo = reported;
    const double h = std::isfinite(reported[j]) ? 1e-6 * std::max(std::abs(reported[j]), 1e-12) : 0.0;
    hi[j] += h;
    lo[j] -= h;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double xi = x[static_cast<std::size_t>(i)];
      jac(i, j) = h == 0.0 ? 0.0 : (reported_model(model, hi, xi) - reported_model(model, lo, xi)) / (2.0 * h);
    }
  }
  const double variance = m > n ? rss / static_cast<double>(m - n) : 0.0;
  const MatrixXd cov = (jac.transpose() * jac).completeOrthogonalDecomposition().pseudoInverse() * variance;

  const auto names = reported_names(model);
  for (Eigen::Index j = 0; j < n; ++j) {
    out.params.push_back({names[static_cast<std::size_t>(j)], reported[j], std::sqrt(std::max(0.0, cov(j, j)))});
  }
  return out;
}

}  // namespace qcvz
