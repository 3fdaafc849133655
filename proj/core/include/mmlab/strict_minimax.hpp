#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mmlab/extended_real.hpp"
#include "mmlab/field.hpp"
#include "mmlab/minima.hpp"

namespace mmlab::strict {

using PointFn = std::function<Point(std::span<const double>)>;

// J on X, phi >= 0 vanishing only at y0, Psi(x, lambda) with Psi(x, lambda_x) = y0.
struct ThetaProblem {
    ScalarField J;
    std::function<double(std::span<const double> y)> phi;
    std::function<Point(std::span<const double> x, std::span<const double> lambda)> psi;
    PointFn lambda_map;
    Point y0;
    Tolerances tol;             // extraction of M_J
    double lambda_sep = 1e-12;  // lambda_x != lambda_u means |lambda_x - lambda_u| > lambda_sep
    double phi_floor = 1e-14;   // pairs with phi(Psi) at or below this are skipped

    // Checks phi(y0) = 0, Psi(x, lambda_x) = y0 on the grid and that x -> lambda_x is not constant.
    void validate() const;
};

// phi = |y|^2, Psi(x, lambda) = Phi(x) - lambda, lambda_x = Phi(x), y0 = 0.
ThetaProblem quadratic_problem(ScalarField J, PointFn phi_map, Tolerances tol = {});

struct ThetaResult {
    ExtendedReal theta = ExtendedReal::pos_inf();
    std::optional<std::size_t> u_index;  // argmin pair
    std::optional<std::size_t> x_index;
    std::size_t pairs = 0;
    std::size_t skipped = 0;
    MinimaCluster minima;  // M_J
};

ThetaResult theta(const ThetaProblem& p);
ThetaResult theta_quadratic(const ScalarField& J, const PointFn& phi_map, Tolerances tol = {});

using Cover = std::vector<std::vector<std::size_t>>;

// Every pair of grid indices lies in a common member.
void validate_weakly_filtering(const Cover& cover, std::size_t universe);

struct MemberSides {
    std::size_t member = 0;
    double lhs = 0.0;  // sup over D of inf over A of J - mu phi(Psi(x, lambda))
    double rhs = 0.0;  // inf over A of sup over z in A of J - mu phi(Psi(x, lambda_z))
};

// Evaluates both sides on one member, with D = {lambda_x : x in A} plus midpoints.
MemberSides member_sides(const ThetaProblem& p, double mu, const std::vector<std::size_t>& A, std::size_t member = 0);

struct GapWitness {
    MemberSides sides;
    std::size_t u_index = 0;
    std::size_t x1_index = 0;
};

GapWitness strict_gap_witness(const ThetaProblem& p, double mu, const Cover& cover);

struct LowerBoundReport {
    bool holds = true;  // lhs >= rhs on every member, hence theta >= mu
    std::vector<MemberSides> members;
};

LowerBoundReport check_theta_lower_bound(const ThetaProblem& p, double mu, const Cover& cover);

Cover whole_cover(std::size_t n);

}  // namespace mmlab::strict
