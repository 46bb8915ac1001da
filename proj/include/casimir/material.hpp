// Free-electron metal parameterized by its density parameter rs.

#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "casimir/units.hpp"

namespace casimir {

/// Pass as tau_rel to request a dissipationless (tau = infinity) metal.
inline constexpr double dissipationless = std::numeric_limits<double>::infinity();

/**
 * Bulk parameters of a Drude / hydrodynamic metal.
 *
 * All fields are SI except tau_rel, which is the dimensionless product
 * omega_p * tau. A missing tau_rel is the dissipationless limit. The
 * hydrodynamic speed always satisfies beta_hydro^2 = 3 v_f^2 / 5.
 */
class Material
{
public:
    Material(double rs, double omega_p, std::optional<double> tau_rel, double v_f)
        : rs_(rs), omega_p_(omega_p), tau_rel_(tau_rel), v_f_(v_f),
          beta_hydro_(std::sqrt(0.6) * v_f)
    {
        if (!(omega_p > 0.0) || !std::isfinite(omega_p))
            throw std::domain_error("Material: omega_p must be positive");
        if (tau_rel && !(*tau_rel > 0.0 && std::isfinite(*tau_rel)))
            throw std::domain_error("Material: tau must be positive (use dissipationless for infinity)");
        if (!(beta_hydro_ > 0.0) || !(beta_hydro_ < constants::c))
            throw std::domain_error("Material: hydrodynamic speed must lie in (0, c)");
    }

    double rs() const { return rs_; }
    double omega_p() const { return omega_p_; }
    std::optional<double> tau_rel() const { return tau_rel_; }
    bool is_dissipationless() const { return !tau_rel_.has_value(); }
    /// Relaxation time in seconds (infinity when dissipationless).
    double tau() const { return tau_rel_ ? *tau_rel_ / omega_p_ : dissipationless; }
    double v_f() const { return v_f_; }
    double beta_hydro() const { return beta_hydro_; }

    /// 1 / (omega_p tau): damping rate in units of omega_p.
    double damping_natural() const { return tau_rel_ ? 1.0 / *tau_rel_ : 0.0; }
    /// beta_hydro / c.
    double beta_natural() const { return beta_hydro_ / constants::c; }

    UnitSystem units() const { return UnitSystem(omega_p_); }

    /// Same metal with the hydrodynamic speed replaced (v_f follows).
    Material with_beta(double beta_over_c) const
    {
        return Material(rs_, omega_p_, tau_rel_, beta_over_c * constants::c / std::sqrt(0.6));
    }

    Material with_omega_p(double omega_p) const { return Material(rs_, omega_p, tau_rel_, v_f_); }

private:
    double rs_;
    double omega_p_;
    std::optional<double> tau_rel_;
    double v_f_;
    double beta_hydro_;
};

/**
 * Build a Material from the electron-gas density parameter rs (metres).
 * n = 3 / (4 pi rs^3), omega_p^2 = n e^2 / (eps0 m), v_F = hbar (3 pi^2 n)^(1/3) / m.
 */
inline Material material_from_rs(double rs, double tau_rel)
{
    using namespace constants;
    if (!(rs > 0.0) || !std::isfinite(rs))
        throw std::domain_error("material_from_rs: rs must be positive");
    if (!(tau_rel > 0.0))
        throw std::domain_error("material_from_rs: tau_rel must be positive or infinite");

    const double n = 3.0 / (4.0 * pi * rs * rs * rs);
    const double omega_p = std::sqrt(n * e_charge * e_charge / (epsilon0 * m_electron));
    const double v_f = hbar * std::cbrt(3.0 * pi * pi * n) / m_electron;
    std::optional<double> tau;
    if (std::isfinite(tau_rel))
        tau = tau_rel;
    return Material(rs, omega_p, tau, v_f);
}

/**
 * Drude dielectric function on the imaginary frequency axis,
 * eps(i zeta) = 1 + 1 / (zeta^2 + zeta / (omega_p tau)), zeta in units of omega_p.
 * At zeta = 0 the function diverges; +infinity is returned.
 */
inline double eps_drude_imag(const Material& m, double zeta)
{
    if (!(zeta >= 0.0))
        throw std::domain_error("eps_drude_imag: zeta must be non-negative");
    if (zeta == 0.0)
        return std::numeric_limits<double>::infinity();
    return 1.0 + 1.0 / (zeta * (zeta + m.damping_natural()));
}

inline double parse_tau_rel(const std::string& text)
{
    if (text == "inf" || text == "infinity" || text == "none")
        return dissipationless;
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size())
        throw std::invalid_argument("bad tau_rel value '" + text + "'");
    return v;
}

/**
 * Material from a key/value tree with keys rs_angstrom, tau_rel and the
 * optional overrides omega_p_ev, v_f_si.
 */
inline Material material_from_tree(const boost::property_tree::ptree& tree)
{
    const auto rs_angstrom = tree.get_optional<double>("rs_angstrom");
    if (!rs_angstrom)
        throw std::invalid_argument("material config: missing key rs_angstrom");
    const double tau_rel = parse_tau_rel(tree.get<std::string>("tau_rel", "inf"));
    Material m = material_from_rs(*rs_angstrom * constants::angstrom, tau_rel);

    if (const auto ev = tree.get_optional<double>("omega_p_ev"))
    {
        if (!(*ev > 0.0))
            throw std::domain_error("material config: omega_p_ev must be positive");
        m = m.with_omega_p(*ev * constants::e_charge / constants::hbar);
    }
    if (const auto vf = tree.get_optional<double>("v_f_si"))
        m = Material(m.rs(), m.omega_p(), m.tau_rel(), *vf);
    return m;
}

inline Material load_material_config(const std::string& path)
{
    boost::property_tree::ptree tree;
    boost::property_tree::ini_parser::read_ini(path, tree);
    return material_from_tree(tree);
}

}  // namespace casimir
