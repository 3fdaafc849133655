#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mmlab/field.hpp"
#include "mmlab/minima.hpp"

namespace mmlab::multiplicity {

struct B1Report {
    bool holds = false;
    double inf_J = 0.0;  // inf of J over {Phi <= rho}
    double lhs = 0.0;    // (J(u1) - inf_J) / (rho - Phi(u1))
    double rhs = 0.0;    // (J(u2) - inf_J) / (rho - Phi(u2))
};

B1Report check_b1(const ScalarField& J, const ScalarField& Phi, double rho, const Point& u1, const Point& u2);

struct RhoEvent {
    double rho = 0.0;
    MinimaCluster minima;
};

struct MultiplicityFinding {
    enum class Context { LambdaScan, RhoScan, ThreeSolutions };
    Context context = Context::LambdaScan;
    bool found = false;
    std::optional<double> lambda_star;
    std::optional<double> rho_star;
    MinimaCluster minima;  // at least two points when found
    // True when the tie was located by bisecting a change of argmin branch
    // rather than seen directly on a scan point.
    bool refined = false;
    std::vector<RhoEvent> events;  // every rho event when requested

    // Three-solution context.
    std::optional<double> y_mu;
    std::vector<double> roots;
    double theta = 0.0;
    double eta = 0.0;
    double eta_shell = 0.0;  // |x| >= eta_shell was used for eta
};

const char* to_string(MultiplicityFinding::Context c);

// First lambda on the scan where J + lambda Phi has two separated minima,
// refined by bisection on a change of leading branch between scan points.
MultiplicityFinding find_lambda_star(const ScalarField& J, const ScalarField& Phi, const std::vector<double>& lambda_scan,
                                     Tolerances tol = {});

// Global minima of F + Phi over {Phi <= rho}.
MinimaCluster restricted_minima(const ScalarField& F, const ScalarField& Phi, double rho, Tolerances tol = {});

// Minima of F + Phi restricted to {Phi <= rho}; the first rho where a second
// separated minimum appears. Every level of Phi between the first and last
// grid value is visited, so the reported rho is a level of Phi on the grid.
MultiplicityFinding scan_rho_star(const ScalarField& F, const ScalarField& Phi, const std::vector<double>& rho_grid,
                                  bool all_events = false, Tolerances tol = {});

struct FarthestTie {
    Point point;
    std::vector<std::size_t> tied;  // indices into the input
    std::vector<double> distances;  // to every input point
    double tie_gap = 0.0;           // farthest minus second farthest distance
    double tie_tol = 0.0;
    std::size_t lattice_n = 0;
};

FarthestTie farthest_tie_point(const std::vector<Point>& points, std::size_t hull_grid_n = 300);

// Solutions of J'(x) - mu x = y_mu for J on an interval.
MultiplicityFinding three_solutions_1d(const ScalarField& J, double mu, std::vector<double> y_scan = {},
                                       Tolerances tol = {});

// min of J(x)/|x|^2 over the outer 10% shell of the grid, and the shell radius.
std::pair<double, double> eta_estimate(const ScalarField& J);

}  // namespace mmlab::multiplicity
