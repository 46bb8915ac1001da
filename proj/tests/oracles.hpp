// Independent reference formulas written on the real frequency axis with
// complex arithmetic, evaluated at omega = i zeta.

#pragma once

#include <complex>

namespace oracle {

using cplx = std::complex<double>;

// Normal wavenumber with Im >= 0 (decaying away from the surface).
inline cplx normal_k(cplx k2)
{
    cplx k = std::sqrt(k2);
    if (k.imag() < 0.0 || (k.imag() == 0.0 && k.real() < 0.0))
        k = -k;
    return k;
}

struct Amplitudes
{
    cplx r_s, r_p0, r_p_hydro;
    cplx eps, k, k_m, k_l;
};

// Drude metal, hydrodynamic longitudinal branch; omega, gamma in omega_p units,
// q_par in omega_p / c, beta = hydrodynamic speed / c.
inline Amplitudes amplitudes(cplx omega, double q_par, double gamma, double beta)
{
    const cplx i(0.0, 1.0);
    Amplitudes a;
    a.eps = 1.0 - 1.0 / (omega * (omega + i * gamma));
    const double q2 = q_par * q_par;
    a.k = normal_k(omega * omega - q2);
    a.k_m = normal_k(a.eps * omega * omega - q2);
    a.k_l = normal_k((omega * (omega + i * gamma) - 1.0) / (beta * beta) - q2);
    a.r_s = (a.k - a.k_m) / (a.k + a.k_m);
    a.r_p0 = (a.eps * a.k - a.k_m) / (a.eps * a.k + a.k_m);
    const cplx l = q2 * (a.eps - 1.0) / a.k_l;
    a.r_p_hydro = (a.eps * a.k - a.k_m + l) / (a.eps * a.k + a.k_m - l);
    return a;
}

// First-order surface-dipole amplitude r_p0 (1 + 2 i eps k Q^2 d / (eps k^2 - Q^2)).
inline cplx r_p_dperp(const Amplitudes& a, double q_par, cplx d_perp)
{
    const cplx i(0.0, 1.0);
    const double q2 = q_par * q_par;
    return a.r_p0 * (1.0 + 2.0 * i * a.eps * a.k * q2 * d_perp / (a.eps * a.k * a.k - q2));
}

// Hydrodynamic surface-dipole parameter, d = -i / k_l.
inline cplx hydro_dperp(const Amplitudes& a)
{
    return cplx(0.0, -1.0) / a.k_l;
}

}  // namespace oracle
