// Lifshitz force between parallel plates on the imaginary frequency axis,
// its nonlocal corrections, and the proximity-force sphere-plate layer.
//
// At zero temperature the force per area between plates a distance L apart is
//
//   F/A = 1/(2 pi^2) int_0^inf dzeta int_0^inf dQ Q kappa sum_{s,p} x / (1 - x),
//   x = r1 r2 exp(-2 kappa L),  kappa = sqrt(zeta^2 + Q^2),
//
// in natural units (hbar = c = omega_p = 1), attraction positive. The
// interaction energy per area, int_L^inf F dL', follows in closed form with
// kappa x / (1 - x) replaced by -ln(1 - x) / 2.

#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <variant>

#include "casimir/quadrature.hpp"
#include "casimir/surface.hpp"
#include "casimir/units.hpp"

namespace casimir {

struct ParallelPlates
{
    double L;
};

/// Sphere of radius R at closest distance L from a plate (PFA, valid for R >> L).
struct SpherePlate
{
    double L;
    double R;
};

using Geometry = std::variant<ParallelPlates, SpherePlate>;

inline double separation(const Geometry& g)
{
    return std::visit([](const auto& x) { return x.L; }, g);
}

/**
 * Outcome of one force evaluation, natural units unless suffixed _si.
 *
 * For parallel plates f_per_area is a pressure; for a sphere-plate geometry
 * it is the total PFA force 2 pi R E(L) and the ideal ratio is taken against
 * pi^3 R / (360 L^3). Correction routines put the local reference force in
 * f_per_area and the signed nonlocal change in delta_f, so the nonlocal force
 * is f_per_area + delta_f.
 */
struct ForceResult
{
    Geometry geometry = ParallelPlates{1.0};
    double f_per_area = 0.0;
    double f_ideal_ratio = 0.0;
    double delta_f = 0.0;
    double delta_rel = 0.0;
    /// delta_rel * L (L in c / omega_p).
    double delta_rel_scaled = 0.0;
    /// Relative error of f_per_area, or absolute error of delta_rel for corrections.
    double quadrature_error = 0.0;
    std::size_t evaluations = 0;
    double f_per_area_si = std::numeric_limits<double>::quiet_NaN();
    double delta_f_si = std::numeric_limits<double>::quiet_NaN();
    /// The d_perp correction factor left the perturbative regime somewhere.
    bool perturbative_warning = false;
    /// Sphere radius below 10 L: PFA is questionable.
    bool pfa_warning = false;

    bool is_sphere() const { return std::holds_alternative<SpherePlate>(geometry); }

    /// Fill the SI columns from a unit system.
    void fill_si(const UnitSystem& u)
    {
        const double scale = is_sphere() ? u.energy_per_area_unit() * u.length_unit() : u.pressure_unit();
        f_per_area_si = f_per_area * scale;
        delta_f_si = delta_f * scale;
    }
};

/// Plate shift equivalent to a relative correction: delta_L = -(L / 3) delta_rel.
inline double effective_displacement(double L, double delta_rel)
{
    if (!(L > 0.0))
        throw std::domain_error("effective_displacement: L must be positive");
    return -(L / 3.0) * delta_rel;
}

namespace detail {

enum class Observable
{
    Force,
    Energy,
};

inline constexpr double inv_two_pi2 = 1.0 / (2.0 * constants::pi * constants::pi);

inline void check_separation(double L)
{
    if (!(L > 0.0) || !std::isfinite(L))
        throw std::domain_error("separation L must be positive and finite");
}

/// Integration setup for kernels decaying like exp(-2 kappa L).
inline IntegrationConfig retarded_config(const IntegrationConfig& cfg, double L)
{
    if (cfg.temperature != Temperature::Zero)
        throw std::invalid_argument("only zero temperature is supported");
    return cfg.with_scale(1.0 / (2.0 * L));
}

/// Per-mode weight of the force or energy for x = R exp(-2 kappa L).
inline double mode_weight(Observable obs, double x, double kappa)
{
    return obs == Observable::Force ? kappa * x / (1.0 - x) : -0.5 * std::log1p(-x);
}

/// mode_weight(x_a) - mode_weight(x_b) without cancellation; dx = x_a - x_b.
inline double mode_weight_difference(Observable obs, double x_a, double x_b, double dx, double kappa)
{
    if (obs == Observable::Force)
        return kappa * dx / ((1.0 - x_a) * (1.0 - x_b));
    return 0.5 * std::log1p(dx / (1.0 - x_a));
}

/// First-order weight d(mode_weight)/dx * x, i.e. the response to x -> x (1 + G).
inline double mode_weight_linear(Observable obs, double x, double kappa)
{
    return obs == Observable::Force ? kappa * x / ((1.0 - x) * (1.0 - x)) : 0.5 * x / (1.0 - x);
}

inline const Material* first_material(const SurfaceModel& s1, const SurfaceModel& s2)
{
    if (const Material* m = material_of(s1))
        return m;
    return material_of(s2);
}

struct Integrated
{
    QuadResult quad;
    bool perturbative_warning = false;
};

/// Lifshitz integral of one observable for a pair of surfaces.
inline Integrated lifshitz_integral(const SurfaceModel& s1, const SurfaceModel& s2, double L,
                                    const IntegrationConfig& cfg, Observable obs)
{
    check_separation(L);
    bool warn = false;
    auto kernel = [&](double zeta, double q) {
        const double kappa = std::hypot(zeta, q);
        const ReflectionPair a = reflection(s1, zeta, q);
        const ReflectionPair b = reflection(s2, zeta, q);
        warn = warn || a.outside_perturbative_regime || b.outside_perturbative_regime;
        const double decay = std::exp(-2.0 * kappa * L);
        const double xs = a.r_s * b.r_s * decay;
        const double xp = a.r_p * b.r_p * decay;
        return inv_two_pi2 * q * (mode_weight(obs, xs, kappa) + mode_weight(obs, xp, kappa));
    };
    QuadResult q = integrate_2d_semi_inf(kernel, retarded_config(cfg, L), Layout2D::Polar);
    return {q, warn};
}

/// Integral of [observable(a1, a2) - observable(b1, b2)] evaluated mode by mode.
inline Integrated lifshitz_difference(const SurfaceModel& a1, const SurfaceModel& a2, const SurfaceModel& b1,
                                      const SurfaceModel& b2, double L, const IntegrationConfig& cfg,
                                      Observable obs)
{
    check_separation(L);
    bool warn = false;
    auto kernel = [&](double zeta, double q) {
        const double kappa = std::hypot(zeta, q);
        const ReflectionPair ra1 = reflection(a1, zeta, q), ra2 = reflection(a2, zeta, q);
        const ReflectionPair rb1 = reflection(b1, zeta, q), rb2 = reflection(b2, zeta, q);
        warn = warn || ra1.outside_perturbative_regime || ra2.outside_perturbative_regime ||
               rb1.outside_perturbative_regime || rb2.outside_perturbative_regime;
        const double decay = std::exp(-2.0 * kappa * L);
        double sum = 0.0;
        const double Ra[2] = {ra1.r_s * ra2.r_s, ra1.r_p * ra2.r_p};
        const double Rb[2] = {rb1.r_s * rb2.r_s, rb1.r_p * rb2.r_p};
        for (int pol = 0; pol < 2; ++pol)
        {
            if (Ra[pol] == Rb[pol])
                continue;
            sum += mode_weight_difference(obs, Ra[pol] * decay, Rb[pol] * decay, (Ra[pol] - Rb[pol]) * decay,
                                          kappa);
        }
        return inv_two_pi2 * q * sum;
    };
    QuadResult q = integrate_2d_semi_inf(kernel, retarded_config(cfg, L), Layout2D::Polar);
    return {q, warn};
}

/**
 * Linear d_perp correction for identical plates. Each plate changes r_p by
 * the factor (1 + g), so x_p -> x_p (1 + 2 g) to first order.
 */
inline Integrated linear_correction_integral(const Material& m, const DPerpModel& dm, double L,
                                             const IntegrationConfig& cfg, Observable obs)
{
    check_separation(L);
    bool warn = false;
    auto kernel = [&](double zeta, double q) {
        const auto t = local_terms(m, zeta, q);
        const double rp = r_p_from(t);
        const double g = dperp_correction_factor(t.eps, t.kappa, q, d_perp_eval(dm, m, zeta, q));
        warn = warn || std::abs(g) > perturbative_limit;
        const double x = rp * rp * std::exp(-2.0 * t.kappa * L);
        return inv_two_pi2 * q * 2.0 * g * mode_weight_linear(obs, x, t.kappa);
    };
    QuadResult q = integrate_2d_semi_inf(kernel, retarded_config(cfg, L), Layout2D::Polar);
    return {q, warn};
}

/**
 * Non-retarded limit of the linear correction: kappa -> Q throughout and
 * r_p0 -> (eps - 1) / (eps + 1), so x = [(eps - 1)/(eps + 1)]^2 exp(-2 Q L) and
 * g -> 2 eps Q d_perp / (eps + 1).
 */
inline Integrated nonretarded_correction_integral(const Material& m, const DPerpModel& dm, double L,
                                                  const IntegrationConfig& cfg, Observable obs)
{
    check_separation(L);
    if (cfg.temperature != Temperature::Zero)
        throw std::invalid_argument("only zero temperature is supported");
    // The zeta range is set by omega_p and the Q range by 1/(2L); rescale both
    // axes onto unit decay so a single transform scale fits.
    const double s_zeta = 1.0;
    const double s_q = 1.0 / (2.0 * L);
    bool warn = false;
    auto kernel = [&](double u, double v) {
        const double zeta = s_zeta * u;
        const double q = s_q * v;
        const double eps = eps_drude_imag(m, zeta);
        const double ratio = std::isinf(eps) ? 1.0 : (eps - 1.0) / (eps + 1.0);
        const double eps_frac = std::isinf(eps) ? 1.0 : eps / (eps + 1.0);
        const double g = 2.0 * eps_frac * q * d_perp_eval(dm, m, zeta, q);
        warn = warn || std::abs(g) > perturbative_limit;
        const double x = ratio * ratio * std::exp(-2.0 * q * L);
        return s_zeta * s_q * inv_two_pi2 * q * 2.0 * g * mode_weight_linear(obs, x, q);
    };
    QuadResult q = integrate_2d_semi_inf(kernel, cfg.with_scale(1.0), Layout2D::Cartesian);
    return {q, warn};
}

inline double ideal_reference(Observable obs, double L)
{
    return obs == Observable::Force ? ideal_casimir_pressure(L) : ideal_casimir_energy(L);
}

/// Convert an integrated observable into a ForceResult for the given geometry.
inline ForceResult make_force_result(const Geometry& geom, const Integrated& value)
{
    ForceResult r;
    r.geometry = geom;
    const double L = separation(geom);
    double prefactor = 1.0;
    if (const auto* sp = std::get_if<SpherePlate>(&geom))
        prefactor = 2.0 * constants::pi * sp->R;
    r.f_per_area = prefactor * value.quad.value;
    const Observable obs = r.is_sphere() ? Observable::Energy : Observable::Force;
    r.f_ideal_ratio = value.quad.value / ideal_reference(obs, L);
    r.quadrature_error = value.quad.value != 0.0 ? value.quad.abs_error_estimate / std::abs(value.quad.value) : 0.0;
    r.evaluations = value.quad.evaluations;
    r.perturbative_warning = value.perturbative_warning;
    return r;
}

inline ForceResult make_correction_result(const Geometry& geom, const Integrated& base, const Integrated& delta)
{
    ForceResult r = make_force_result(geom, base);
    const double L = separation(geom);
    const double prefactor = r.is_sphere() ? 2.0 * constants::pi * std::get<SpherePlate>(geom).R : 1.0;
    r.delta_f = prefactor * delta.quad.value;
    r.delta_rel = delta.quad.value / base.quad.value;
    r.delta_rel_scaled = r.delta_rel * L;
    r.quadrature_error = std::abs(delta.quad.abs_error_estimate / base.quad.value) +
                         std::abs(r.delta_rel) * base.quad.abs_error_estimate / std::abs(base.quad.value);
    r.evaluations = base.quad.evaluations + delta.quad.evaluations;
    r.perturbative_warning = base.perturbative_warning || delta.perturbative_warning;
    return r;
}

inline Observable observable_for(const Geometry& g)
{
    return std::holds_alternative<SpherePlate>(g) ? Observable::Energy : Observable::Force;
}

inline void check_geometry(const Geometry& g, ForceResult* r = nullptr)
{
    check_separation(separation(g));
    if (const auto* sp = std::get_if<SpherePlate>(&g))
    {
        if (!(sp->R > 0.0) || !std::isfinite(sp->R))
            throw std::domain_error("sphere radius R must be positive and finite");
        if (r && sp->R < 10.0 * sp->L)
            r->pfa_warning = true;
    }
}

inline ForceResult with_units(ForceResult r, const Material* m)
{
    if (m)
        r.fill_si(m->units());
    return r;
}

}  // namespace detail

/// Lifshitz force per area between two (possibly different) surfaces at separation L.
inline ForceResult force_per_area(const SurfaceModel& s1, const SurfaceModel& s2, double L,
                                  const IntegrationConfig& cfg)
{
    const Geometry g = ParallelPlates{L};
    const auto v = detail::lifshitz_integral(s1, s2, L, cfg, detail::Observable::Force);
    return detail::with_units(detail::make_force_result(g, v), detail::first_material(s1, s2));
}

/// Interaction energy per area E(L) = int_L^inf F/A dL' (natural units, attraction positive).
inline QuadResult energy_per_area(const SurfaceModel& s1, const SurfaceModel& s2, double L,
                                  const IntegrationConfig& cfg)
{
    return detail::lifshitz_integral(s1, s2, L, cfg, detail::Observable::Energy).quad;
}

/// Sphere-plate force in the proximity approximation, F = 2 pi R E_pp(L).
inline ForceResult pfa_sphere_force(const SurfaceModel& s1, const SurfaceModel& s2, double L, double R,
                                    const IntegrationConfig& cfg)
{
    const Geometry g = SpherePlate{L, R};
    ForceResult warn_probe;
    detail::check_geometry(g, &warn_probe);
    const auto v = detail::lifshitz_integral(s1, s2, L, cfg, detail::Observable::Energy);
    ForceResult r = detail::make_force_result(g, v);
    r.pfa_warning = warn_probe.pfa_warning;
    return detail::with_units(r, detail::first_material(s1, s2));
}

/**
 * Exact nonlocal correction: hydrodynamic minus local Drude plates of the
 * same metal, evaluated as a single integral of the mode-wise difference.
 */
inline ForceResult nonlocal_correction_exact(const Material& m, const Geometry& g, const IntegrationConfig& cfg)
{
    ForceResult probe;
    detail::check_geometry(g, &probe);
    const double L = separation(g);
    const auto obs = detail::observable_for(g);
    const SurfaceModel local = LocalDrude{m};
    const SurfaceModel hydro = Hydrodynamic{m};
    const auto base = detail::lifshitz_integral(local, local, L, cfg, obs);
    const auto delta = detail::lifshitz_difference(hydro, hydro, local, local, L, cfg, obs);
    ForceResult r = detail::make_correction_result(g, base, delta);
    r.pfa_warning = probe.pfa_warning;
    return detail::with_units(r, &m);
}

/// First-order d_perp correction (retarded) for identical plates or sphere-plate.
inline ForceResult delta_linear(const Material& m, const DPerpModel& dm, const Geometry& g,
                                const IntegrationConfig& cfg)
{
    ForceResult probe;
    detail::check_geometry(g, &probe);
    const double L = separation(g);
    const auto obs = detail::observable_for(g);
    const SurfaceModel local = LocalDrude{m};
    const auto base = detail::lifshitz_integral(local, local, L, cfg, obs);
    const auto delta = detail::linear_correction_integral(m, dm, L, cfg, obs);
    ForceResult r = detail::make_correction_result(g, base, delta);
    r.pfa_warning = probe.pfa_warning;
    return detail::with_units(r, &m);
}

/// Non-retarded first-order d_perp correction; the reference force stays fully retarded.
inline ForceResult delta_nonretarded(const Material& m, const DPerpModel& dm, const Geometry& g,
                                     const IntegrationConfig& cfg)
{
    ForceResult probe;
    detail::check_geometry(g, &probe);
    const double L = separation(g);
    const auto obs = detail::observable_for(g);
    const SurfaceModel local = LocalDrude{m};
    const auto base = detail::lifshitz_integral(local, local, L, cfg, obs);
    const auto delta = detail::nonretarded_correction_integral(m, dm, L, cfg, obs);
    ForceResult r = detail::make_correction_result(g, base, delta);
    r.pfa_warning = probe.pfa_warning;
    return detail::with_units(r, &m);
}

inline ForceResult delta_force_linear(const Material& m, const DPerpModel& dm, double L, const IntegrationConfig& cfg)
{
    return delta_linear(m, dm, ParallelPlates{L}, cfg);
}

inline ForceResult delta_force_nonret(const Material& m, const DPerpModel& dm, double L, const IntegrationConfig& cfg)
{
    return delta_nonretarded(m, dm, ParallelPlates{L}, cfg);
}

/// [F(a1, a2) - F(b1, b2)] per area, integrated mode by mode.
inline QuadResult force_difference(const SurfaceModel& a1, const SurfaceModel& a2, const SurfaceModel& b1,
                                   const SurfaceModel& b2, double L, const IntegrationConfig& cfg)
{
    return detail::lifshitz_difference(a1, a2, b1, b2, L, cfg, detail::Observable::Force).quad;
}

}  // namespace casimir
