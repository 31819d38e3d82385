#ifndef RISKRESP_CORE_MODEL_HPP
#define RISKRESP_CORE_MODEL_HPP

#include <Eigen/Dense>

#include <cmath>
#include <concepts>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "riskresp/errors.hpp"

namespace riskresp {

template <std::floating_point Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

enum class Family { Constant, TimeVarying, Fractional, Exponential, Explicit, SplitSusceptible };

inline constexpr Family kAllFamilies[] = {Family::Constant,    Family::TimeVarying,
                                          Family::Fractional,  Family::Exponential,
                                          Family::Explicit,    Family::SplitSusceptible};

inline std::string_view family_name(Family f)
{
    switch (f) {
    case Family::Constant: return "constant";
    case Family::TimeVarying: return "time-varying";
    case Family::Fractional: return "fractional";
    case Family::Exponential: return "exponential";
    case Family::Explicit: return "explicit";
    case Family::SplitSusceptible: return "split-susceptible";
    }
    return "unknown";
}

inline std::optional<Family> parse_family(std::string_view name)
{
    for (Family f : kAllFamilies) {
        if (family_name(f) == name) {
            return f;
        }
    }
    return std::nullopt;
}

inline bool is_exogenous(Family f) { return f == Family::Constant || f == Family::TimeVarying; }

/**
 * Index map of the flat state vector shared by every family.
 *
 * Order is S, E, I, R, F1..Fn, [X], [Sf, Q]; the same order is used for CSV
 * columns. S, E, I, R are always present (E stays at zero for the
 * split-susceptible family, which has no latent stage).
 */
class StateLayout {
public:
    static constexpr Index S = 0;
    static constexpr Index E = 1;
    static constexpr Index I = 2;
    static constexpr Index R = 3;

    StateLayout() = default;
    StateLayout(int delayOrder, bool adherence, bool fear)
        : m_order(delayOrder), m_adherence(adherence), m_fear(fear)
    {
    }

    static StateLayout for_family(Family f, int delayOrder)
    {
        return {delayOrder, f == Family::Explicit, f == Family::SplitSusceptible};
    }

    int delay_order() const { return m_order; }
    bool has_adherence() const { return m_adherence; }
    bool has_fear() const { return m_fear; }

    /// 0-based stage index; stage(0) is F1.
    Index stage(int i) const { return 4 + i; }
    Index adherence() const { return 4 + m_order; }
    Index fear_susceptible() const { return 4 + m_order + (m_adherence ? 1 : 0); }
    Index quarantined() const { return fear_susceptible() + 1; }

    Index size() const { return 4 + m_order + (m_adherence ? 1 : 0) + (m_fear ? 2 : 0); }

    std::vector<std::string> names() const
    {
        std::vector<std::string> out{"S", "E", "I", "R"};
        for (int i = 1; i <= m_order; ++i) {
            out.push_back("F" + std::to_string(i));
        }
        if (m_adherence) {
            out.emplace_back("X");
        }
        if (m_fear) {
            out.emplace_back("Sf");
            out.emplace_back("Q");
        }
        return out;
    }

    /// Person-carrying slots; delay stages and X are information states.
    std::vector<Index> person_indices() const
    {
        std::vector<Index> idx{S, E, I, R};
        if (m_fear) {
            idx.push_back(fear_susceptible());
            idx.push_back(quarantined());
        }
        return idx;
    }

    template <typename Derived>
    typename Derived::Scalar persons(const Eigen::MatrixBase<Derived>& y) const
    {
        typename Derived::Scalar sum = y(S) + y(E) + y(I) + y(R);
        if (m_fear) {
            sum += y(fear_susceptible()) + y(quarantined());
        }
        return sum;
    }

    bool operator==(const StateLayout&) const = default;

private:
    int m_order = 0;
    bool m_adherence = false;
    bool m_fear = false;
};

template <std::floating_point Scalar>
struct CoreParams {
    Scalar beta0 = Scalar(0.7); ///< baseline infectivity, 1/day
    Scalar tauE = Scalar(5);    ///< mean latent period, days
    Scalar tauI = Scalar(10);   ///< mean infectious period, days
    Scalar N = Scalar(1e6);     ///< population size

    void validate() const
    {
        if (!(beta0 >= 0) || !std::isfinite(beta0)) throw ConfigError("core.beta0 must be finite and >= 0");
        if (!(tauE > 0) || !std::isfinite(tauE)) throw ConfigError("core.tauE must be finite and > 0");
        if (!(tauI > 0) || !std::isfinite(tauI)) throw ConfigError("core.tauI must be finite and > 0");
        if (!(N > 0) || !std::isfinite(N)) throw ConfigError("core.N must be finite and > 0");
    }
};

template <std::floating_point Scalar>
Scalar basic_reproduction_number(const CoreParams<Scalar>& core)
{
    core.validate();
    return core.beta0 * core.tauI;
}

namespace detail {

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& y, const StateLayout& layout)
{
    for (Index i = 0; i < y.size(); ++i) {
        if (!std::isfinite(y(i))) {
            throw std::domain_error("non-finite state component '" + layout.names()[std::size_t(i)] + "'");
        }
    }
}

} // namespace detail

/**
 * SEIR flows with a given effective transmission rate.
 *
 * Only the S, E, I, R slots of the result are filled; every other slot is 0.
 * Throws std::domain_error naming the first non-finite component.
 */
template <std::floating_point Scalar>
Vector<Scalar> seir_rhs(const Vector<Scalar>& y, const StateLayout& layout, const CoreParams<Scalar>& core,
                        Scalar betaEff)
{
    if (y.size() != layout.size()) {
        throw ShapeError("state has " + std::to_string(y.size()) + " components, layout expects " +
                         std::to_string(layout.size()));
    }
    detail::require_finite(y, layout);
    if (!std::isfinite(betaEff)) {
        throw std::domain_error("non-finite effective transmission rate 'beta_eff'");
    }

    using L = StateLayout;
    const Scalar infection = betaEff * y(L::S) * y(L::I) / core.N;
    const Scalar onset = y(L::E) / core.tauE;
    const Scalar recovery = y(L::I) / core.tauI;

    Vector<Scalar> dy = Vector<Scalar>::Zero(layout.size());
    dy(L::S) = -infection;
    dy(L::E) = infection - onset;
    dy(L::I) = onset - recovery;
    dy(L::R) = recovery;
    return dy;
}

} // namespace riskresp

#endif // RISKRESP_CORE_MODEL_HPP
