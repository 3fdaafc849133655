#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mmlab/extended_real.hpp"
#include "mmlab/field.hpp"
#include "mmlab/multiplier_path.hpp"

namespace mmlab::spherical {

struct SphericalOptions {
    std::optional<double> a;        // default max(0, rho estimate)
    std::optional<ExtendedReal> b;  // default sigma estimate
    std::optional<double> fd_step;  // default 1e-3 * (1 + r)
    double a7_tol = 5e-4;           // |gamma' - g^{-1}|
    double euler_tol = 5e-4;
    double gamma_tol = 1e-5;        // relative, against dense sphere sampling
    std::size_t sphere_samples = 20000;
    std::uint64_t seed = 7;
    Tolerances tol;
};

// Maximise Psi on spheres |x|^2 = r through the path of unique minima of
// lambda |x|^2 - Psi(x).
class SphericalProblem {
public:
    SphericalProblem(ScalarField psi, SphericalOptions opts = {});

    const ScalarField& psi() const { return psi_; }
    const path::MultiplierProblem& path_problem() const { return *path_; }
    const SphericalOptions& options() const { return opts_; }
    double a() const { return a_; }
    ExtendedReal b() const { return b_; }
    double rho_estimate() const { return rho_; }
    double sigma_estimate() const { return sigma_; }
    // Psi vanishes identically; every check is vacuous.
    bool degenerate() const { return degenerate_; }
    double fd_step(double r) const;

private:
    ScalarField psi_;
    SphericalOptions opts_;
    std::optional<path::MultiplierProblem> path_;
    double a_ = 0.0;
    ExtendedReal b_;
    double rho_ = 0.0;
    double sigma_ = 0.0;
    bool degenerate_ = false;
};

struct GRow {
    double lambda = 0.0;
    double g = 0.0;
    Point y;
    std::string error;
};

std::vector<GRow> trace_g(const SphericalProblem& p, const std::vector<double>& lambdas);

struct GammaRow {
    double r = 0.0;
    double lambda_hat = 0.0;  // g^{-1}(r)
    Point x_hat;
    double gamma = 0.0;
    double gamma_prime = 0.0;
    double sphere_sup = 0.0;  // dense sampling of Psi on |x|^2 = r
    Point sphere_argmax;
    double euler_residual = 0.0;
    std::string error_kind;
    std::string error;
    bool ok() const { return error.empty(); }
};

std::vector<GammaRow> gamma_and_derivative(const SphericalProblem& p, const std::vector<double>& r_grid);

// sup of Psi over |x|^2 = r inside the grid box, by dense sampling.
std::pair<double, Point> sphere_sup(const ScalarField& psi, double r, std::size_t samples, std::uint64_t seed);

struct Check {
    bool passed = true;
    double margin = 0.0;
    std::string detail;
};

struct SphericalReport {
    double a = 0.0;
    ExtendedReal b;
    double rho_estimate = 0.0;
    double sigma_estimate = 0.0;
    ExtendedReal alpha;
    ExtendedReal beta;
    bool degenerate = false;
    std::vector<GRow> g_table;
    std::vector<GammaRow> gamma_table;
    std::map<std::string, Check> checks;  // "a1" .. "a7"
    double r_star_lo = 0.0;  // r* lies in ]r_star_lo, r_star_hi]
    double r_star_hi = 0.0;
    std::vector<std::string> notes;
    bool all_passed() const;
};

SphericalReport verify_relations(const SphericalProblem& p, const std::vector<double>& r_grid);

}  // namespace mmlab::spherical
