#ifndef RISKRESP_INTEGRATOR_HPP
#define RISKRESP_INTEGRATOR_HPP

#include <cmath>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "riskresp/model_spec.hpp"

namespace riskresp {

template <std::floating_point Scalar>
struct Grid {
    Scalar t0 = Scalar(0);
    Scalar tEnd = Scalar(730);
    Scalar dt = Scalar(0.05);
    int sampleEvery = 20;

    /// An empty horizon (tEnd == t0) is allowed and yields an empty series.
    void validate() const
    {
        if (!std::isfinite(t0) || !std::isfinite(tEnd)) throw ConfigError("grid.t0 and grid.tEnd must be finite");
        if (tEnd < t0) throw ConfigError("grid.tEnd must not precede grid.t0");
        if (!(dt > 0) || !std::isfinite(dt)) throw ConfigError("grid.dt must be finite and > 0");
        if (sampleEvery < 1) throw ConfigError("grid.sampleEvery must be >= 1");
    }

    long long steps() const { return std::llround((tEnd - t0) / dt); }
};

template <std::floating_point Scalar>
struct TimeSeries {
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    StateLayout layout;
    std::vector<Scalar> times;
    Matrix states; ///< one row per sample, columns in layout order
    std::vector<Scalar> betaEff;

    std::size_t size() const { return times.size(); }
    bool empty() const { return times.empty(); }

    std::vector<Scalar> column(Index c) const
    {
        std::vector<Scalar> out(size());
        for (std::size_t i = 0; i < size(); ++i) {
            out[i] = states(Index(i), c);
        }
        return out;
    }

    Vector<Scalar> state(std::size_t sample) const { return states.row(Index(sample)).transpose(); }
};

namespace detail {

template <std::floating_point Scalar>
void require_finite_derivative(const Vector<Scalar>& k, Scalar t, std::span<const std::string> names)
{
    for (Index i = 0; i < k.size(); ++i) {
        if (!std::isfinite(k(i))) {
            std::ostringstream msg;
            msg << "non-finite derivative of component '"
                << (std::size_t(i) < names.size() ? names[std::size_t(i)] : std::to_string(i)) << "' at t=" << t;
            throw IntegrationError(msg.str(), double(t));
        }
    }
}

} // namespace detail

/// One classical fourth-order Runge-Kutta step.
template <std::floating_point Scalar, typename Rhs>
Vector<Scalar> rk4_step(const Rhs& rhs, Scalar t, const Vector<Scalar>& y, Scalar dt,
                        std::span<const std::string> names = {})
{
    const Scalar half = dt / Scalar(2);
    const Vector<Scalar> k1 = rhs(t, y);
    detail::require_finite_derivative(k1, t, names);
    const Vector<Scalar> k2 = rhs(t + half, Vector<Scalar>(y + half * k1));
    detail::require_finite_derivative(k2, t + half, names);
    const Vector<Scalar> k3 = rhs(t + half, Vector<Scalar>(y + half * k2));
    detail::require_finite_derivative(k3, t + half, names);
    const Vector<Scalar> k4 = rhs(t + dt, Vector<Scalar>(y + dt * k3));
    detail::require_finite_derivative(k4, t + dt, names);
    return y + (dt / Scalar(6)) * (k1 + Scalar(2) * k2 + Scalar(2) * k3 + k4);
}

/// Tolerances checked after every step.
struct StateTolerance {
    double conservation = 1e-6; ///< |sum of persons - N| <= conservation * N
    double undershoot = 1e-6;   ///< compartments >= -undershoot * N
    double adherence = 1e-9;    ///< X in [-adherence, 1 + adherence]
};

namespace detail {

template <std::floating_point Scalar>
void check_state(const Vector<Scalar>& y, const StateLayout& layout, Scalar N, Scalar t,
                 const std::vector<std::string>& names, const StateTolerance& tol)
{
    for (Index i = 0; i < y.size(); ++i) {
        if (!std::isfinite(y(i))) {
            std::ostringstream msg;
            msg << "non-finite state component '" << names[std::size_t(i)] << "' at t=" << t;
            throw IntegrationError(msg.str(), double(t));
        }
    }
    for (Index i = 0; i < y.size(); ++i) {
        if (layout.has_adherence() && i == layout.adherence()) {
            continue;
        }
        if (y(i) < -Scalar(tol.undershoot) * N) {
            std::ostringstream msg;
            msg << "component '" << names[std::size_t(i)] << "' = " << y(i) << " below tolerance at t=" << t;
            throw IntegrationError(msg.str(), double(t));
        }
    }
    if (layout.has_adherence()) {
        const Scalar x = y(layout.adherence());
        if (x < -Scalar(tol.adherence) || x > Scalar(1) + Scalar(tol.adherence)) {
            std::ostringstream msg;
            msg << "adherence fraction X = " << x << " left [0, 1] at t=" << t;
            throw IntegrationError(msg.str(), double(t));
        }
    }
    const Scalar drift = std::abs(layout.persons(y) - N);
    if (drift > Scalar(tol.conservation) * N) {
        std::ostringstream msg;
        msg << "population drift " << drift << " exceeds tolerance at t=" << t;
        throw IntegrationError(msg.str(), double(t));
    }
}

} // namespace detail

/**
 * Fixed-step RK4 trajectory of a model from an initial state.
 *
 * Samples are taken at t0 and after every grid.sampleEvery steps; sample
 * times are computed as t0 + step * dt rather than accumulated. The run
 * fails with IntegrationError (carrying the time) on any invariant breach;
 * no clipping is applied.
 */
template <std::floating_point Scalar>
TimeSeries<Scalar> integrate(const ModelSpec<Scalar>& spec, const Vector<Scalar>& init, const Grid<Scalar>& grid,
                             const StateTolerance& tol = {})
{
    spec.validate();
    grid.validate();
    const StateLayout layout = spec.layout();
    const std::vector<std::string> names = layout.names();
    if (init.size() != layout.size()) {
        throw ShapeError("initial state has " + std::to_string(init.size()) + " components, family '" +
                         std::string(family_name(spec.family())) + "' expects " + std::to_string(layout.size()));
    }
    detail::check_state(init, layout, spec.core.N, grid.t0, names, tol);

    TimeSeries<Scalar> series;
    series.layout = layout;
    const long long steps = grid.steps();
    if (steps <= 0) {
        series.states.resize(0, layout.size());
        return series;
    }

    const auto rhs = assemble_rhs(spec);
    const long long samples = steps / grid.sampleEvery + 1;
    series.times.reserve(std::size_t(samples));
    series.betaEff.reserve(std::size_t(samples));
    series.states.resize(Index(samples), layout.size());

    Vector<Scalar> y = init;
    auto record = [&](long long step) {
        const Scalar t = grid.t0 + Scalar(step) * grid.dt;
        const Index row = Index(series.times.size());
        series.times.push_back(t);
        series.states.row(row) = y.transpose();
        series.betaEff.push_back(effective_beta(spec, layout, t, y));
    };

    record(0);
    for (long long step = 0; step < steps; ++step) {
        const Scalar t = grid.t0 + Scalar(step) * grid.dt;
        try {
            y = rk4_step(rhs, t, y, grid.dt, std::span<const std::string>(names));
        } catch (const std::domain_error& e) {
            std::ostringstream msg;
            msg << e.what() << " at t=" << t;
            throw IntegrationError(msg.str(), double(t));
        }
        detail::check_state(y, layout, spec.core.N, grid.t0 + Scalar(step + 1) * grid.dt, names, tol);
        if ((step + 1) % grid.sampleEvery == 0) {
            record(step + 1);
        }
    }
    return series;
}

} // namespace riskresp

#endif // RISKRESP_INTEGRATOR_HPP
