// Reflection amplitudes and d_perp on the imaginary frequency axis.
//
// Every quantity here is evaluated at omega = i zeta, where all normal
// wavenumbers become k = i kappa with kappa > 0 (decay into each half
// space) and the amplitudes are real. Inputs are in natural units:
// zeta in omega_p, q_par in omega_p / c, lengths in c / omega_p.

#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <variant>

#include "casimir/dperp_table.hpp"
#include "casimir/material.hpp"

namespace casimir {

struct ImagFreqPoint
{
    double zeta = 0.0;
    double q_par = 0.0;

    double kappa_vac() const { return std::hypot(zeta, q_par); }
};

// ---------------------------------------------------------------------------
// d_perp models
// ---------------------------------------------------------------------------

/// d_perp = -i / k_l of the hydrodynamic model, i.e. -1 / kappa_l on the imaginary axis.
struct HydroDynamicDPerp
{
};

/// Frequency-independent d_perp (natural length units).
struct StaticDPerp
{
    double value = 0.0;
};

struct TabulatedDPerp
{
    DPerpTable table;
};

using DPerpModel = std::variant<HydroDynamicDPerp, StaticDPerp, TabulatedDPerp>;

/**
 * Longitudinal decay constant inside a hydrodynamic metal,
 * kappa_l = sqrt((zeta^2 + zeta / (omega_p tau) + 1) / beta^2 + Q^2).
 * A Material always carries beta > 0, so the local limit never reaches here.
 */
inline double kappa_l(const Material& m, double zeta, double q_par)
{
    if (!(zeta >= 0.0))
        throw std::domain_error("kappa_l: zeta must be non-negative");
    const double beta = m.beta_natural();
    const double num = zeta * zeta + zeta * m.damping_natural() + 1.0;
    return std::sqrt(num / (beta * beta) + q_par * q_par);
}

inline double d_perp_eval(const DPerpModel& dm, const Material& m, double zeta, double q_par)
{
    if (!(zeta >= 0.0))
        throw std::domain_error("d_perp_eval: zeta must be non-negative");
    return std::visit(
        [&](const auto& model) -> double {
            using T = std::decay_t<decltype(model)>;
            if constexpr (std::is_same_v<T, HydroDynamicDPerp>)
                return -1.0 / kappa_l(m, zeta, q_par);
            else if constexpr (std::is_same_v<T, StaticDPerp>)
                return model.value;
            else
                return model.table(zeta);
        },
        dm);
}

/// Static hydrodynamic value d_perp(0) = -beta / omega_p (natural units).
inline double hydro_static_dperp(const Material& m) { return -m.beta_natural(); }

// ---------------------------------------------------------------------------
// Local (Fresnel) amplitudes
// ---------------------------------------------------------------------------

namespace detail {

struct LocalTerms
{
    double eps;      // eps(i zeta), may be +inf at zeta = 0
    double kappa;    // vacuum normal decay constant
    double kappa_m;  // transverse decay constant in the metal
};

inline LocalTerms local_terms(const Material& m, double zeta, double q_par)
{
    if (!(zeta >= 0.0) || !(q_par >= 0.0))
        throw std::domain_error("reflection: zeta and q_par must be non-negative");
    if (zeta == 0.0 && q_par == 0.0)
        throw std::domain_error("reflection: zeta and q_par cannot both vanish");
    const double gamma = m.damping_natural();
    // eps * zeta^2 written so that it stays finite as zeta -> 0.
    double eps_z2;
    if (zeta == 0.0)
        eps_z2 = gamma == 0.0 ? 1.0 : 0.0;
    else
        eps_z2 = zeta * zeta + zeta / (zeta + gamma);
    return {eps_drude_imag(m, zeta), std::hypot(zeta, q_par), std::sqrt(eps_z2 + q_par * q_par)};
}

inline double r_s_from(const LocalTerms& t) { return (t.kappa - t.kappa_m) / (t.kappa + t.kappa_m); }

inline double r_p_from(const LocalTerms& t)
{
    if (std::isinf(t.eps))
        return 1.0;
    const double ek = t.eps * t.kappa;
    return (ek - t.kappa_m) / (ek + t.kappa_m);
}

}  // namespace detail

inline double r_s_local(const Material& m, double zeta, double q_par)
{
    return detail::r_s_from(detail::local_terms(m, zeta, q_par));
}

inline double r_p_local(const Material& m, double zeta, double q_par)
{
    return detail::r_p_from(detail::local_terms(m, zeta, q_par));
}

/**
 * p amplitude of an abruptly terminated hydrodynamic metal with continuous
 * E_perp,
 *   r_p = (eps kappa - kappa_m - Q^2 (eps - 1) / kappa_l)
 *       / (eps kappa + kappa_m + Q^2 (eps - 1) / kappa_l).
 */
inline double r_p_hydro(const Material& m, double zeta, double q_par)
{
    const auto t = detail::local_terms(m, zeta, q_par);
    if (std::isinf(t.eps))
    {
        // eps -> inf: divide through by eps.
        const double l = q_par * q_par / kappa_l(m, zeta, q_par);
        return (t.kappa - l) / (t.kappa + l);
    }
    const double ek = t.eps * t.kappa;
    const double l = q_par * q_par * (t.eps - 1.0) / kappa_l(m, zeta, q_par);
    return (ek - t.kappa_m - l) / (ek + t.kappa_m + l);
}

/**
 * Relative first-order change of r_p produced by a surface dipole d_perp:
 * r_p = r_p0 (1 + g), g = 2 kappa eps Q^2 d_perp / (eps kappa^2 + Q^2).
 * The denominator is positive for every eps >= 1.
 */
inline double dperp_correction_factor(double eps, double kappa, double q_par, double d_perp)
{
    const double q2 = q_par * q_par;
    if (std::isinf(eps))
        return kappa > 0.0 ? 2.0 * q2 * d_perp / kappa : 0.0;
    return 2.0 * kappa * eps * q2 * d_perp / (eps * kappa * kappa + q2);
}

/// Magnitude of the correction factor above which r_p_dperp is flagged as non-perturbative.
inline constexpr double perturbative_limit = 0.5;

inline double r_p_dperp(const Material& m, const DPerpModel& dm, double zeta, double q_par)
{
    const auto t = detail::local_terms(m, zeta, q_par);
    const double d = d_perp_eval(dm, m, zeta, q_par);
    return detail::r_p_from(t) * (1.0 + dperp_correction_factor(t.eps, t.kappa, q_par, d));
}

// ---------------------------------------------------------------------------
// Surface models
// ---------------------------------------------------------------------------

struct IdealMirror
{
};

struct LocalDrude
{
    Material material;
};

struct Hydrodynamic
{
    Material material;
};

struct DPerpPerturbative
{
    Material material;
    DPerpModel dperp;
};

using SurfaceModel = std::variant<IdealMirror, LocalDrude, Hydrodynamic, DPerpPerturbative>;

struct ReflectionPair
{
    double r_s = 0.0;
    double r_p = 0.0;
    /// Correction factor |g| exceeded perturbative_limit (DPerpPerturbative only).
    bool outside_perturbative_regime = false;

    bool within_unit_bound() const { return std::abs(r_s) <= 1.0 && std::abs(r_p) <= 1.0; }
};

/// Both amplitudes for any surface model. Bound violations are reported, never clamped.
inline ReflectionPair reflection(const SurfaceModel& s, double zeta, double q_par)
{
    return std::visit(
        [&](const auto& model) -> ReflectionPair {
            using T = std::decay_t<decltype(model)>;
            if constexpr (std::is_same_v<T, IdealMirror>)
                return {-1.0, 1.0, false};
            else if constexpr (std::is_same_v<T, LocalDrude>)
            {
                const auto t = detail::local_terms(model.material, zeta, q_par);
                return {detail::r_s_from(t), detail::r_p_from(t), false};
            }
            else if constexpr (std::is_same_v<T, Hydrodynamic>)
                return {r_s_local(model.material, zeta, q_par), r_p_hydro(model.material, zeta, q_par), false};
            else
            {
                const Material& mat = model.material;
                const auto t = detail::local_terms(mat, zeta, q_par);
                const double g = dperp_correction_factor(t.eps, t.kappa, q_par,
                                                         d_perp_eval(model.dperp, mat, zeta, q_par));
                return {detail::r_s_from(t), detail::r_p_from(t) * (1.0 + g), std::abs(g) > perturbative_limit};
            }
        },
        s);
}

/// Material carried by a surface model, or nullptr for an ideal mirror.
inline const Material* material_of(const SurfaceModel& s)
{
    return std::visit(
        [](const auto& model) -> const Material* {
            if constexpr (std::is_same_v<std::decay_t<decltype(model)>, IdealMirror>)
                return nullptr;
            else
                return &model.material;
        },
        s);
}

}  // namespace casimir
