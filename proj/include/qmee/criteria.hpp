#pragma once

#include <Eigen/Dense>

#include "qmee/quantizer.hpp"
#include "qmee/types.hpp"

namespace qmee {

/// Gaussian kernel G_sigma(x) = exp(-x^2 / (2 sigma^2)) / (sqrt(2 pi) sigma).
double gaussian_kernel(double x, KernelWidth sigma);

/// Parzen window density estimate (1/N) sum_j G_sigma(x - e_j).
double parzen_density(double x, const ErrorVector& errors, KernelWidth sigma);

/// Quadratic information potential (1/N^2) sum_i sum_j G_sigma(e_i - e_j).
/// O(N^2); the quantity maximized by minimum-error-entropy training.
double information_potential(const ErrorVector& errors, KernelWidth sigma);

/// Quantized information potential
/// (1/N^2) sum_i sum_m M_m G_sigma(e_i - c_m), O(M N).
/// The codebook must cover exactly these errors (counts sum to N).
double qmee_potential(const ErrorVector& errors, const Codebook& codebook,
                      KernelWidth sigma);

/// Same value computed as the occupancy-weighted average of the Parzen
/// estimate at the code words: sum_m (M_m / N) p_hat(c_m). Kept as a second
/// algebraic route for cross-checking qmee_potential.
double qmee_weighted_form(const ErrorVector& errors, const Codebook& codebook,
                          KernelWidth sigma);

/// Second-order expansion of the quantized potential, valid for large sigma:
/// 1/(sqrt(2 pi) sigma) - (1/(2 sqrt(2 pi) sigma^3)) sum_m alpha_m mu_m with
/// mu_m the mean squared error about word m. Asymptotic-regime checks only.
double qmee_large_sigma_approx(const ErrorVector& errors,
                               const Codebook& codebook, KernelWidth sigma);

/// Gradient of the quantized potential with respect to the weights of a
/// linear model e_i = y_i - w^T x_i, holding the codebook fixed:
/// (1/(N^2 sigma^2)) sum_i (s0_i e_i - s1_i) x_i where
/// s0_i = sum_m M_m G_sigma(e_i - c_m) and s1_i = sum_m M_m G_sigma(e_i - c_m) c_m.
/// Equals (P - R w) / (N^2 sigma^2) for the fixed-point normal system.
Eigen::VectorXd qmee_gradient_linear(const ErrorVector& errors,
                                     const Eigen::MatrixXd& inputs,
                                     const Eigen::VectorXd& targets,
                                     const Codebook& codebook,
                                     KernelWidth sigma);

/// Mean squared error (1/N) sum e_i^2.
double mse_cost(const ErrorVector& errors);

/// Empirical correntropy (1/N) sum_i G_sigma(e_i); the single-word {0}
/// special case of the quantized potential.
double correntropy_cost(const ErrorVector& errors, KernelWidth sigma);

}  // namespace qmee
