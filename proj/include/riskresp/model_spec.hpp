#ifndef RISKRESP_MODEL_SPEC_HPP
#define RISKRESP_MODEL_SPEC_HPP

#include <variant>

#include "riskresp/core_model.hpp"
#include "riskresp/delay.hpp"
#include "riskresp/formulations.hpp"

namespace riskresp {

template <std::floating_point Scalar>
using FamilyParams = std::variant<ConstantParams, TimeVaryingParams<Scalar>, FractionalParams<Scalar>,
                                  ExponentialParams<Scalar>, AdherenceParams<Scalar>,
                                  SplitSusceptibleParams<Scalar>>;

/// Active formulation, its parameters and the information-delay chain.
template <std::floating_point Scalar>
struct ModelSpec {
    CoreParams<Scalar> core;
    FamilyParams<Scalar> params = ConstantParams{};
    DelayChain<Scalar> delay;

    // Variant alternatives are declared in Family order.
    Family family() const { return static_cast<Family>(params.index()); }

    StateLayout layout() const { return StateLayout::for_family(family(), delay.order); }

    void validate() const
    {
        core.validate();
        delay.validate();
        std::visit([](const auto& p) { p.validate(); }, params);
        if (is_exogenous(family()) && delay.order != 0) {
            throw ConfigError("delay.n must be 0 for the exogenous family '" + std::string(family_name(family())) +
                              "'");
        }
        if (family() == Family::SplitSusceptible && delay.order != 0) {
            throw ConfigError("delay.n must be 0 for the split-susceptible family (its fear signal is Q)");
        }
    }
};

template <std::floating_point Scalar>
ModelSpec<Scalar> make_spec(const CoreParams<Scalar>& core, FamilyParams<Scalar> params, int delayOrder = 0,
                            Scalar tauF = Scalar(20))
{
    ModelSpec<Scalar> spec{core, std::move(params), DelayChain<Scalar>{delayOrder, tauF}};
    spec.validate();
    return spec;
}

/// Transmission rate the active formulation applies at (t, y).
template <std::floating_point Scalar>
Scalar effective_beta(const ModelSpec<Scalar>& spec, const StateLayout& layout, Scalar t, const Vector<Scalar>& y)
{
    const auto perceived = [&] {
        return perceived_signal<Scalar>(y(StateLayout::I), y.segment(layout.stage(0), spec.delay.order), spec.delay);
    };
    switch (spec.family()) {
    case Family::Constant:
    case Family::SplitSusceptible:
        return beta_constant(spec.core);
    case Family::TimeVarying:
        return beta_time_varying(t, spec.core, std::get<TimeVaryingParams<Scalar>>(spec.params));
    case Family::Fractional:
        return beta_fractional(perceived(), spec.core, std::get<FractionalParams<Scalar>>(spec.params));
    case Family::Exponential:
        return beta_exponential(perceived(), spec.core, std::get<ExponentialParams<Scalar>>(spec.params));
    case Family::Explicit:
        return beta_adherence(y(layout.adherence()), spec.core);
    }
    return spec.core.beta0;
}

/**
 * Full right-hand side for a ModelSpec.
 *
 * The returned callable owns a copy of the validated spec and maps
 * (t, y) -> dy/dt without side effects.
 */
template <std::floating_point Scalar>
auto assemble_rhs(const ModelSpec<Scalar>& spec)
{
    spec.validate();
    const StateLayout layout = spec.layout();
    return [spec, layout](Scalar t, const Vector<Scalar>& y) -> Vector<Scalar> {
        if (y.size() != layout.size()) {
            throw ShapeError("state has " + std::to_string(y.size()) + " components, family '" +
                             std::string(family_name(spec.family())) + "' expects " +
                             std::to_string(layout.size()));
        }
        if (spec.family() == Family::SplitSusceptible) {
            return split_susceptible_rhs(y, layout, spec.core, std::get<SplitSusceptibleParams<Scalar>>(spec.params));
        }

        Vector<Scalar> dy = seir_rhs(y, layout, spec.core, effective_beta(spec, layout, t, y));
        const int n = spec.delay.order;
        if (n > 0) {
            dy.segment(layout.stage(0), n) =
                delay_chain_rhs<Scalar>(y(StateLayout::I), y.segment(layout.stage(0), n), spec.delay);
        }
        if (spec.family() == Family::Explicit) {
            const Scalar perceived = perceived_signal<Scalar>(y(StateLayout::I), y.segment(layout.stage(0), n), spec.delay);
            dy(layout.adherence()) =
                adherence_rhs(y(layout.adherence()), perceived, std::get<AdherenceParams<Scalar>>(spec.params));
        }
        return dy;
    };
}

} // namespace riskresp

#endif // RISKRESP_MODEL_SPEC_HPP
