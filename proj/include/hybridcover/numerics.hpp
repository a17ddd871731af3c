#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace hc {

// Pairwise (cascade) summation with a fixed block size, so the result only
// depends on the input order.
double pairwise_sum(std::span<const double> values);
double pairwise_mean(std::span<const double> values);

// Inverted empirical CDF, right-continuous: the smallest order statistic x_(k)
// with k/n >= p. Throws DomainError for p outside (0, 1) or an empty input.
double empirical_quantile(std::span<const double> values, double p);

struct QuadratureResult {
    double value = 0.0;
    double abs_error = 0.0;
    int intervals = 0;
};

// Adaptive Gauss-Kronrod (7/15) integration on [a, b] with bisection of the
// worst interval until the summed error estimate falls below abs_tol.
QuadratureResult integrate_gk15(const std::function<double(double)>& f, double a, double b,
                                double abs_tol = 1e-10, int max_intervals = 2000);

// splitmix64-based stream with 53-bit uniforms; identical sequences on every
// platform, unlike std::uniform_real_distribution.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);
    std::uint64_t next_u64();
    // Uniform on the open interval (0, 1).
    double uniform();
    double normal();

private:
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

struct MinimizeResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

using ObjectiveFn = std::function<double(std::span<const double>)>;
using GradientFn = std::function<void(std::span<const double>, std::span<double>)>;

// Central-difference gradient with step h * max(1, |x_i|).
void numeric_gradient(const ObjectiveFn& f, std::span<const double> x, std::span<double> grad,
                      double h = 1e-6);

struct BfgsOptions {
    int max_iterations = 500;
    double rel_tolerance = 1e-8;
    double gradient_tolerance = 1e-9;
};

// Quasi-Newton minimization with backtracking Armijo line search. Non-finite
// objective values are treated as +infinity by the line search.
MinimizeResult minimize_bfgs(const ObjectiveFn& f, const GradientFn& grad, std::vector<double> x0,
                             const BfgsOptions& options = {});

}  // namespace hc
