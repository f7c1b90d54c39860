#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qcvz {

/// Models, with x in seconds:
///   exp_decay:     A exp(-x/tau) + B
///   damped_cosine: A exp(-x/tau) cos(2 pi f x + phi) + B
///   rabi_sinusoid: A cos(2 pi f x + phi) + B
enum class FitModel { exp_decay, damped_cosine, rabi_sinusoid };

const char* to_string(FitModel model);

struct FitParam {
  std::string name;
  double value = 0.0;
  double sigma = 0.0;  ///< 1-sigma from the residual variance and J^T J
};

struct FitResult {
  FitModel model;
  std::vector<FitParam> params;
  double residual_norm = 0.0;  ///< Euclidean norm of the residual vector
  double max_abs_residual = 0.0;

  const FitParam& param(std::string_view name) const;
  double value(std::string_view name) const { return param(name).value; }
  double evaluate(double x) const;
};

/// Number of free parameters of a model.
std::size_t parameter_count(FitModel model);

/// Least-squares fit (Levenberg-Marquardt) with data-driven starting values.
/// Requires at least 4 points per free parameter. Throws NumericalError when
/// the optimizer fails or returns a non-physical rate.
FitResult fit_curve(FitModel model, std::span<const double> x, std::span<const double> y);

}  // namespace qcvz
