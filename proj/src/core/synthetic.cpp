#include "jsmooth/synthetic.hpp"

#include "jsmooth/error.hpp"
#include "jsmooth/random.hpp"

#include <cmath>
#include <sstream>

namespace jsmooth::synthetic {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;
}

Point2 spiral(double z, double eps) {
    const double radius = 1.5 * eps + z / 3.0 + 2.0 / 3.0;
    const double angle = 4.0 * M_PI * eps;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

Point3 torus(double z, double eta) {
    const double ring = 1.0 + std::cos(kTwoPi * z) / 3.0;
    return {ring * std::cos(kTwoPi * eta), ring * std::sin(kTwoPi * eta), std::sin(kTwoPi * z) / 3.0};
}

namespace {

ToyTruth sample_triplets(Index n, std::uint64_t seed) {
    if (n < 2) throw UsageError("toy generator needs N >= 2");
    Rng rng(seed);
    ToyTruth t{Vector(n), Vector(n), Vector(n)};
    for (Index i = 0; i < n; ++i) {
        t.z(i) = rng.uniform();
        t.eps(i) = rng.uniform();
        t.eta(i) = rng.uniform();
    }
    return t;
}

Dataset torus_view(const ToyTruth& t) {
    Matrix y(t.z.size(), 3);
    for (Index i = 0; i < t.z.size(); ++i) {
        const auto p = torus(t.z(i), t.eta(i));
        y.row(i) << p[0], p[1], p[2];
    }
    return Dataset(std::move(y), "torus");
}

}  // namespace

ToySample generate_toy(Index n, std::uint64_t seed) {
    ToyTruth t = sample_triplets(n, seed);
    Matrix x(n, 2);
    for (Index i = 0; i < n; ++i) {
        const auto p = spiral(t.z(i), t.eps(i));
        x.row(i) << p[0], p[1];
    }
    Dataset y = torus_view(t);
    return ToySample{Dataset(std::move(x), "spiral"), std::move(y), std::move(t)};
}

Dataset circle_view(const Vector& z) {
    Matrix c(z.size(), 2);
    for (Index i = 0; i < z.size(); ++i) c.row(i) << std::cos(kTwoPi * z(i)), std::sin(kTwoPi * z(i));
    return Dataset(std::move(c), "circle");
}

ToySample generate_ring_toy(Index n, std::uint64_t seed) {
    ToyTruth t = sample_triplets(n, seed);
    Matrix x(n, 2);
    for (Index i = 0; i < n; ++i) {
        const double radius = 1.0 + 0.5 * t.eps(i);
        x.row(i) << radius * std::cos(kTwoPi * t.z(i)), radius * std::sin(kTwoPi * t.z(i));
    }
    Dataset y = torus_view(t);
    return ToySample{Dataset(std::move(x), "ring"), std::move(y), std::move(t)};
}

// ---------------------------------------------------------------------------

Point2 s_transform(const Point2& x) {
    const double x1 = x[0], x2 = x[1];
    return {x1 + x1 * x1 * x1 * x1 + 2.0 * x1 * x1 * x2 + x2 * x2, x1 * x1 + x2};
}

Point2 s_inverse(const Point2& y) {
    const double x1 = y[0] - y[1] * y[1];
    return {x1, y[1] - x1 * x1};
}

Point2 airplane_rhs(const Point2& x, const Params3& p) {
    const Point2 y = s_transform(x);
    const double y1 = y[0], y2 = y[1];
    // g = [-2 1; -1 -1] (y - (p1 + p2^3, p3))
    const double e1 = y1 - (p[0] + p[1] * p[1] * p[1]);
    const double e2 = y2 - p[2];
    const double g1 = -2.0 * e1 + e2;
    const double g2 = -e1 - e2;
    // J(y) = [1, -2 y2; -2 y1 + 2 y2^2, 1 + 4 y1 y2 - 4 y2^3]
    const double j11 = 1.0, j12 = -2.0 * y2;
    const double j21 = -2.0 * y1 + 2.0 * y2 * y2, j22 = 1.0 + 4.0 * y1 * y2 - 4.0 * y2 * y2 * y2;
    return {j11 * g1 + j12 * g2, j21 * g1 + j22 * g2};
}

Point2 steady_state_closed_form(const Params3& p) {
    return s_inverse({p[0] + p[1] * p[1] * p[1], p[2]});
}

SteadyState simulate_to_steady_state(const Params3& p, const IntegratorOptions& options) {
    if (!(options.tol > 0.0)) throw UsageError("integrator tolerance must be positive");
    if (!(options.dt > 0.0)) throw UsageError("integrator step must be positive");

    auto norm = [](const Point2& v) { return std::hypot(v[0], v[1]); };
    auto axpy = [](const Point2& x, double a, const Point2& k) { return Point2{x[0] + a * k[0], x[1] + a * k[1]}; };

    SteadyState state{options.x0, 0.0, false};
    const double h = options.dt;
    Point2 k1 = airplane_rhs(state.x, p);
    while (true) {
        if (norm(k1) < options.tol) {
            state.converged = true;
            return state;
        }
        if (state.t >= options.t_max) break;
        const Point2 k2 = airplane_rhs(axpy(state.x, 0.5 * h, k1), p);
        const Point2 k3 = airplane_rhs(axpy(state.x, 0.5 * h, k2), p);
        const Point2 k4 = airplane_rhs(axpy(state.x, h, k3), p);
        for (int c = 0; c < 2; ++c)
            state.x[static_cast<std::size_t>(c)] +=
                h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        state.t += h;
        if (!std::isfinite(state.x[0]) || !std::isfinite(state.x[1])) break;
        k1 = airplane_rhs(state.x, p);
    }
    std::ostringstream msg;
    msg.precision(17);
    msg << "steady state not reached by t=" << state.t << " for p=(" << p[0] << ", " << p[1] << ", " << p[2]
        << "); last state (" << state.x[0] << ", " << state.x[1] << ")";
    throw NumericalError(msg.str());
}

AirplaneSample generate_airplane(Index n, std::uint64_t seed, const IntegratorOptions& options) {
    if (n < 2) throw UsageError("airplane generator needs N >= 2");
    Rng rng(seed);
    Matrix params(n, 3);
    for (Index i = 0; i < n; ++i)
        for (Index c = 0; c < 3; ++c) params(i, c) = rng.uniform(-1.0, 1.0);

    Matrix states(n, 2);
#pragma omp parallel for schedule(dynamic, 32)
    for (Index i = 0; i < n; ++i) {
        const SteadyState s = simulate_to_steady_state({params(i, 0), params(i, 1), params(i, 2)}, options);
        states(i, 0) = s.x[0];
        states(i, 1) = s.x[1];
    }

    AirplaneTruth truth{Vector(n), params.col(2)};
    for (Index i = 0; i < n; ++i) truth.effective(i) = params(i, 0) + std::pow(params(i, 1), 3);
    return AirplaneSample{Dataset(params.leftCols(2), "parameters"), Dataset(std::move(states), "steady_states"),
                          std::move(params), std::move(truth)};
}

}  // namespace jsmooth::synthetic
