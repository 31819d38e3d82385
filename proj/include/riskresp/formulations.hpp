#ifndef RISKRESP_FORMULATIONS_HPP
#define RISKRESP_FORMULATIONS_HPP

#include <algorithm>
#include <cmath>

#include "riskresp/core_model.hpp"

namespace riskresp {

// Parameter records -----------------------------------------------------------

struct ConstantParams {
    void validate() const {}
};

template <std::floating_point Scalar>
struct TimeVaryingParams {
    Scalar kRamp = Scalar(3) / Scalar(500); ///< ramp-down rate, 1/day

    void validate() const
    {
        if (!(kRamp > 0) || !std::isfinite(kRamp)) throw ConfigError("time_varying.kRamp must be finite and > 0");
    }
};

template <std::floating_point Scalar>
struct FractionalParams {
    Scalar alpha = Scalar(1) / Scalar(30); ///< sensitivity to perceived cases, 1/person
    Scalar gamma = Scalar(2);

    void validate() const
    {
        if (!(alpha >= 0) || !std::isfinite(alpha)) throw ConfigError("fractional.alpha must be finite and >= 0");
        if (!(gamma >= 0) || !std::isfinite(gamma)) throw ConfigError("fractional.gamma must be finite and >= 0");
    }
};

template <std::floating_point Scalar>
struct ExponentialParams {
    Scalar kExp = Scalar(0.05); ///< 1/person

    void validate() const
    {
        if (!(kExp >= 0) || !std::isfinite(kExp)) throw ConfigError("exponential.k must be finite and >= 0");
    }
};

template <std::floating_point Scalar>
struct AdherenceParams {
    Scalar m = Scalar(0.5);   ///< adherence payoff per perceived case, 1/(person day)
    Scalar c = Scalar(0.4);   ///< cost of adhering, 1/day
    Scalar X0 = Scalar(0.01); ///< initial adhering fraction, strictly interior

    void validate() const
    {
        if (!(m >= 0) || !std::isfinite(m)) throw ConfigError("adherence.m must be finite and >= 0");
        if (!(c >= 0) || !std::isfinite(c)) throw ConfigError("adherence.c must be finite and >= 0");
        if (!(X0 > 0 && X0 < 1)) throw ConfigError("adherence.X0 must lie strictly inside (0, 1)");
    }
};

template <std::floating_point Scalar>
struct SplitSusceptibleParams {
    Scalar betaF = Scalar(0.5);    ///< fear transmission rate, 1/day
    Scalar delta = Scalar(1e-3);   ///< reciprocal of the reported caseload scale, 1/person
    Scalar muF = Scalar(0.05);     ///< fear relaxation rate, 1/day
    Scalar epsilonS = Scalar(0.3); ///< residual susceptibility of fearful individuals
    Scalar tauQ = Scalar(3);       ///< mean time from infectious to quarantined, days

    void validate() const
    {
        if (!(betaF >= 0) || !std::isfinite(betaF)) throw ConfigError("split.betaF must be finite and >= 0");
        if (!(delta >= 0) || !std::isfinite(delta)) throw ConfigError("split.delta must be finite and >= 0");
        if (!(muF >= 0) || !std::isfinite(muF)) throw ConfigError("split.muF must be finite and >= 0");
        if (!(epsilonS >= 0 && epsilonS <= 1)) throw ConfigError("split.epsilonS must lie in [0, 1]");
        if (!(tauQ > 0) || !std::isfinite(tauQ)) throw ConfigError("split.tauQ must be finite and > 0");
    }
};

// Transmission rates ----------------------------------------------------------

template <std::floating_point Scalar>
Scalar beta_constant(const CoreParams<Scalar>& core)
{
    return core.beta0;
}

/// Linear ramp to zero at t = 1/k, zero afterwards.
template <std::floating_point Scalar>
Scalar beta_time_varying(Scalar t, const CoreParams<Scalar>& core, const TimeVaryingParams<Scalar>& p)
{
    const Scalar cutoff = Scalar(1) / p.kRamp;
    if (t > cutoff) {
        return Scalar(0);
    }
    return std::max(Scalar(0), core.beta0 * (Scalar(1) - p.kRamp * t));
}

template <std::floating_point Scalar>
Scalar beta_fractional(Scalar perceived, const CoreParams<Scalar>& core, const FractionalParams<Scalar>& p)
{
    return core.beta0 / std::pow(Scalar(1) + p.alpha * perceived, p.gamma);
}

template <std::floating_point Scalar>
Scalar beta_exponential(Scalar perceived, const CoreParams<Scalar>& core, const ExponentialParams<Scalar>& p)
{
    return core.beta0 * std::exp(-p.kExp * perceived);
}

template <std::floating_point Scalar>
Scalar beta_adherence(Scalar adhering, const CoreParams<Scalar>& core)
{
    return core.beta0 * (Scalar(1) - adhering);
}

/// Replicator equation for the adhering fraction: X(1-X)(mF - c).
template <std::floating_point Scalar>
Scalar adherence_rhs(Scalar adhering, Scalar perceived, const AdherenceParams<Scalar>& p)
{
    return adhering * (Scalar(1) - adhering) * (p.m * perceived - p.c);
}

// Fear flows ------------------------------------------------------------------

/// S -> Sf flow, betaF * S * (1 - exp(-delta Q)); saturates at betaF * S.
template <std::floating_point Scalar>
Scalar fear_transfer_rate(Scalar susceptible, Scalar quarantined, const SplitSusceptibleParams<Scalar>& p)
{
    return p.betaF * susceptible * -std::expm1(-p.delta * quarantined);
}

/// Sf -> S flow, muF * Sf * (S + R) / N.
template <std::floating_point Scalar>
Scalar fear_relaxation_rate(Scalar fearful, Scalar susceptible, Scalar recovered, Scalar N,
                            const SplitSusceptibleParams<Scalar>& p)
{
    return p.muF * fearful * (susceptible + recovered) / N;
}

/**
 * Derivative of the S, Sf, I, Q, R system.
 *
 *   S  -> I   beta0 S I / N
 *   Sf -> I   eps beta0 Sf I / N
 *   S <-> Sf  fear transfer / fear relaxation
 *   I  -> Q   I / tauQ
 *   Q  -> R   Q / tauI
 *
 * The E slot is left at zero. Delay stages are not used by this family.
 */
template <std::floating_point Scalar>
Vector<Scalar> split_susceptible_rhs(const Vector<Scalar>& y, const StateLayout& layout,
                                     const CoreParams<Scalar>& core, const SplitSusceptibleParams<Scalar>& p)
{
    if (!layout.has_fear()) {
        throw ConfigError("split-susceptible derivative requested for a layout without Sf/Q compartments");
    }
    if (y.size() != layout.size()) {
        throw ShapeError("state has " + std::to_string(y.size()) + " components, layout expects " +
                         std::to_string(layout.size()));
    }
    detail::require_finite(y, layout);

    using L = StateLayout;
    const Index sf = layout.fear_susceptible();
    const Index q = layout.quarantined();

    const Scalar S = y(L::S);
    const Scalar I = y(L::I);
    const Scalar R = y(L::R);
    const Scalar fearful = y(sf);
    const Scalar Q = y(q);

    const Scalar infectS = core.beta0 * S * I / core.N;
    const Scalar infectF = p.epsilonS * core.beta0 * fearful * I / core.N;
    const Scalar toFear = fear_transfer_rate(S, Q, p);
    const Scalar relax = fear_relaxation_rate(fearful, S, R, core.N, p);
    const Scalar isolate = I / p.tauQ;
    const Scalar release = Q / core.tauI;

    Vector<Scalar> dy = Vector<Scalar>::Zero(layout.size());
    dy(L::S) = -infectS - toFear + relax;
    dy(sf) = toFear - relax - infectF;
    dy(L::I) = infectS + infectF - isolate;
    dy(q) = isolate - release;
    dy(L::R) = release;
    return dy;
}

} // namespace riskresp

#endif // RISKRESP_FORMULATIONS_HPP
