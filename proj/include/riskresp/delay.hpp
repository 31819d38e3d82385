#ifndef RISKRESP_DELAY_HPP
#define RISKRESP_DELAY_HPP

#include "riskresp/core_model.hpp"

namespace riskresp {

/**
 * Linear chain of n first-order lags with total mean delay tauF.
 *
 * Every stage uses the time constant tauF / n, so the impulse response is
 * Erlang(n, n / tauF) with mean tauF regardless of the order.
 */
template <std::floating_point Scalar>
struct DelayChain {
    int order = 0;
    Scalar tauF = Scalar(20);

    void validate() const
    {
        if (order < 0) throw ConfigError("delay.n must be >= 0");
        if (order >= 1 && (!(tauF > 0) || !std::isfinite(tauF))) {
            throw ConfigError("delay.tauF must be finite and > 0 when delay.n >= 1");
        }
    }

    Scalar stage_time_constant() const { return tauF / Scalar(order); }
};

/// dF_i/dt = (F_{i-1} - F_i) / (tauF / n), with F_0 = signal.
template <std::floating_point Scalar>
Vector<Scalar> delay_chain_rhs(Scalar signal, const Eigen::Ref<const Vector<Scalar>>& stages,
                               const DelayChain<Scalar>& chain)
{
    if (stages.size() != chain.order) {
        throw ShapeError("delay chain of order " + std::to_string(chain.order) + " given " +
                         std::to_string(stages.size()) + " stages");
    }
    Vector<Scalar> d(chain.order);
    if (chain.order == 0) {
        return d;
    }
    const Scalar tau = chain.stage_time_constant();
    Scalar upstream = signal;
    for (Index i = 0; i < chain.order; ++i) {
        d(i) = (upstream - stages(i)) / tau;
        upstream = stages(i);
    }
    return d;
}

/// F_n for a non-empty chain, the raw signal otherwise.
template <std::floating_point Scalar>
Scalar perceived_signal(Scalar signal, const Eigen::Ref<const Vector<Scalar>>& stages,
                        const DelayChain<Scalar>& chain)
{
    if (stages.size() != chain.order) {
        throw ShapeError("delay chain of order " + std::to_string(chain.order) + " given " +
                         std::to_string(stages.size()) + " stages");
    }
    return chain.order == 0 ? signal : stages(chain.order - 1);
}

} // namespace riskresp

#endif // RISKRESP_DELAY_HPP
