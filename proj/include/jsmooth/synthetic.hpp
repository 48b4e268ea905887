#pragma once

#include "jsmooth/dataset.hpp"

#include <array>
#include <cstdint>

namespace jsmooth::synthetic {

using Point2 = std::array<double, 2>;
using Point3 = std::array<double, 3>;

// ---------------------------------------------------------------------------
// Spiral / torus views of a common variable z
// ---------------------------------------------------------------------------

/// Ribbon spiral: z shifts the radius, eps sets position along the ribbon.
Point2 spiral(double z, double eps);

/// Torus: z controls the small angle, eta the large one.
Point3 torus(double z, double eta);

/// Ground-truth variables; evaluation only, never fed to fitting.
struct ToyTruth {
    Vector z, eps, eta;
};

struct ToySample {
    Dataset spiral;  // N x 2
    Dataset torus;   // N x 3
    ToyTruth truth;
};

/// (z, eps, eta) ~ U[0,1]^3 i.i.d. from `seed`.
ToySample generate_toy(Index n, std::uint64_t seed);

/// Third view of z for multi-view runs: (cos 2 pi z, sin 2 pi z).
Dataset circle_view(const Vector& z);

/// Periodic variant: an annulus whose angle is z and radius eps, paired with
/// the torus. The common variable lives on a circle.
ToySample generate_ring_toy(Index n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Airplane dynamical system
// ---------------------------------------------------------------------------

using Params3 = std::array<double, 3>;

/// y = s(x) = (x1 + x1^4 + 2 x1^2 x2 + x2^2, x1^2 + x2).
Point2 s_transform(const Point2& x);

/// s^-1(y) = (y1 - y2^2, y2 - (y1 - y2^2)^2).
Point2 s_inverse(const Point2& y);

/// x' = J(s(x)) g_p(s(x)) with the damped linear field g.
Point2 airplane_rhs(const Point2& x, const Params3& p);

/// Closed-form steady state s^-1(p1 + p2^3, p3).
Point2 steady_state_closed_form(const Params3& p);

struct SteadyState {
    Point2 x;
    double t = 0.0;
    bool converged = false;
};

struct IntegratorOptions {
    double dt = 0.01;
    double t_max = 200.0;
    double tol = 1e-8;
    Point2 x0{0.0, 0.0};
};

/// Classical RK4 until |rhs| < tol; throws NumericalError (with the last
/// state in the message) when t_max is reached first.
SteadyState simulate_to_steady_state(const Params3& p, const IntegratorOptions& options = {});

struct AirplaneTruth {
    Vector effective;  // p1 + p2^3
    Vector p3;
};

struct AirplaneSample {
    Dataset parameters;     // N x 2: accessible (p1, p2)
    Dataset steady_states;  // N x 2: (x1, x2)
    Matrix all_parameters;  // N x 3
    AirplaneTruth truth;
};

/// p ~ U[-1,1]^3 from `seed`, each integrated to its steady state.
AirplaneSample generate_airplane(Index n, std::uint64_t seed, const IntegratorOptions& options = {});

}  // namespace jsmooth::synthetic
