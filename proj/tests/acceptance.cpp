// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "casimir/casimir.hpp"
#include "oracles.hpp"

using namespace casimir;
namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;

Material gold() { return material_from_rs(1.59 * constants::angstrom, 400.0); }

IntegrationConfig tol(double rel)
{
    IntegrationConfig c;
    c.rel_tol = rel;
    return c;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Outcome
{
    bool pass;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& check)
{
    Outcome o;
    try
    {
        o = check();
    }
    catch (const std::exception& e)
    {
        o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass)
        ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << id << " " << name << ": " << o.detail << std::endl;
}

std::string fmt(const char* f, double a)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

struct Curve
{
    std::vector<double> L, minus_rel;
};

Curve read_curve(const fs::path& p)
{
    std::ifstream in(p);
    if (!in)
        throw std::runtime_error("missing " + p.string());
    Curve c;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line))
    {
        std::stringstream ss(line);
        std::string a, b;
        std::getline(ss, a, ',');
        std::getline(ss, b, ',');
        c.L.push_back(std::stod(a));
        c.minus_rel.push_back(std::stod(b));
    }
    return c;
}

// Least-squares slope of log(-dF/F) against log L over [lo, hi].
double slope(const Curve& c, double lo, double hi)
{
    double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < c.L.size(); ++i)
    {
        if (c.L[i] < lo * (1 - 1e-9) || c.L[i] > hi * (1 + 1e-9))
            continue;
        const double x = std::log(c.L[i]), y = std::log(c.minus_rel[i]);
        n += 1;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

int run_cli(const std::string& args)
{
    const std::string cmd = std::string(CASIMIR_CLI_PATH) + " " + args;
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

int main(int argc, char** argv)
{
    const fs::path out = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "casimir_acceptance";
    fs::remove_all(out);
    fs::create_directories(out);
    const Material au = gold();

    report(1, "ideal-mirror law", [] {
        const auto t0 = std::chrono::steady_clock::now();
        double worst = 0.0;
        for (double L : {0.01, 1.0, 100.0})
        {
            const double f = force_per_area(IdealMirror{}, IdealMirror{}, L, tol(1e-8)).f_per_area;
            worst = std::max(worst, std::abs(f / (pi * pi / (240.0 * std::pow(L, 4))) - 1.0));
        }
        const double t = seconds_since(t0);
        return Outcome{worst <= 1e-6 && t < 1.0, "max rel err " + fmt("%.2e", worst) + ", " + fmt("%.3f", t) + " s"};
    });

    report(2, "PFA ideal law", [] {
        double worst = 0.0;
        for (double L : {0.01, 1.0, 100.0})
            for (double R : {1e2, 1e4})
            {
                const double f = pfa_sphere_force(IdealMirror{}, IdealMirror{}, L, R, tol(1e-8)).f_per_area;
                worst = std::max(worst, std::abs(f / (std::pow(pi, 3) * R / (360.0 * std::pow(L, 3))) - 1.0));
            }
        return Outcome{worst <= 1e-5, "max rel err " + fmt("%.2e", worst)};
    });

    report(3, "hydro Au at L = 3: -dF/F = 0.005 +- 0.002", [&] {
        const auto t0 = std::chrono::steady_clock::now();
        const double v = -nonlocal_correction_exact(au, ParallelPlates{3.0}, tol(1e-6)).delta_rel;
        const double t = seconds_since(t0);
        return Outcome{std::abs(v - 0.005) <= 0.002 && t < 10.0,
                       "-dF/F = " + fmt("%.5f", v) + ", " + fmt("%.3f", t) + " s"};
    });

    report(4, "perturbative fidelity at L = 0.1", [&] {
        const double exact = -nonlocal_correction_exact(au, ParallelPlates{0.1}, tol(1e-6)).delta_rel;
        const double pert = -delta_force_linear(au, HydroDynamicDPerp{}, 0.1, tol(1e-6)).delta_rel;
        const double gap = std::abs(pert - exact) / exact;
        const bool ok = std::abs(exact - 0.15) <= 0.03 && std::abs(gap - 0.12) <= 0.05;
        return Outcome{ok, "exact " + fmt("%.4f", exact) + ", d_perp " + fmt("%.4f", pert) + ", gap " +
                               fmt("%.1f%%", 100 * gap)};
    });

    // Figure 1 through the command line; reused by criteria 5, 8 and 11.
    const auto t_fig1 = std::chrono::steady_clock::now();
    const int fig1_status = run_cli("figures fig1 --out " + (out / "fig1").string());
    const double fig1_seconds = seconds_since(t_fig1);
    const int fig2_status = run_cli("figures fig2 --out " + (out / "fig2").string() + " --jellium-table " +
                                    std::string(CASIMIR_DATA_DIR) + "/jellium_dperp0.csv");
    std::map<char, Curve> fig1;
    if (fig1_status == 0)
        for (char c : std::string("abcde"))
            fig1[c] = read_curve(out / "fig1" / (std::string("fig1_") + c + ".csv"));

    report(5, "static d_perp overestimate <= 20% for L > 0.1", [&] {
        if (fig1_status != 0)
            return Outcome{false, "figures fig1 failed"};
        double worst = 0.0, at = 0.0;
        for (std::size_t i = 0; i < fig1['b'].L.size(); ++i)
        {
            if (!(fig1['b'].L[i] > 0.1))
                continue;
            const double over = fig1['c'].minus_rel[i] / fig1['b'].minus_rel[i] - 1.0;
            if (over > worst)
                worst = over, at = fig1['b'].L[i];
        }
        return Outcome{worst <= 0.20, "max overestimate " + fmt("%.1f%%", 100 * worst) + " at L = " + fmt("%.3g", at)};
    });

    report(6, "non-retarded overestimate at L = 10 <= 25% and |dF/F| < 0.1%", [&] {
        const double ret = delta_force_linear(au, HydroDynamicDPerp{}, 10.0, tol(1e-6)).delta_rel;
        const double nonret = delta_force_nonret(au, HydroDynamicDPerp{}, 10.0, tol(1e-6)).delta_rel;
        const double exact = nonlocal_correction_exact(au, ParallelPlates{10.0}, tol(1e-6)).delta_rel;
        const double over = nonret / ret - 1.0;
        const bool ok = over <= 0.25 && std::abs(ret) < 1e-3 && std::abs(exact) < 1e-3;
        return Outcome{ok, "overestimate " + fmt("%.0f%%", 100 * over) + ", |dF/F| retarded " +
                               fmt("%.4f%%", 100 * std::abs(ret)) + ", exact " + fmt("%.4f%%", 100 * std::abs(exact))};
    });

    report(7, "effective displacement |dL| = 0.006 +- 20%", [&] {
        // Fit dF/F = -3 dL / L over L in [0.1, 1] on the exact hydrodynamic correction.
        double num = 0.0, den = 0.0;
        for (double L = 0.1; L <= 1.0 + 1e-12; L *= std::pow(10.0, 0.125))
        {
            const double rel = nonlocal_correction_exact(au, ParallelPlates{L}, tol(1e-6)).delta_rel;
            num += rel / L;
            den += 1.0 / (L * L);
        }
        const double dl = -num / (3.0 * den);
        // With dL = -(L / 3) dF/F a force reduction gives dL > 0.
        const bool ok = std::abs(std::abs(dl) - 0.006) <= 0.2 * 0.006 && dl > 0.0;
        return Outcome{ok, "dL = " + fmt("%+.5f", dl) + " c/omega_p"};
    });

    report(8, "sign dichotomy over L in [0.01, 100]", [&] {
        if (fig1_status != 0 || fig2_status != 0)
            return Outcome{false, "figure generation failed"};
        std::size_t n = 0;
        for (char c : std::string("abcde"))
            for (double v : fig1[c].minus_rel)
            {
                if (!(v > 0.0))
                    return Outcome{false, std::string("hydro curve ") + c + " has dF >= 0"};
                ++n;
            }
        for (int rs = 2; rs <= 5; ++rs)
            for (double v : read_curve(out / "fig2" / ("fig2_rs" + std::to_string(rs) + ".csv")).minus_rel)
            {
                if (!(v < 0.0))
                    return Outcome{false, "jellium rs = " + std::to_string(rs) + " has dF <= 0"};
                ++n;
            }
        return Outcome{true, std::to_string(n) + " points with the expected sign"};
    });

    report(9, "density ordering rs = 2 .. 5", [&] {
        if (fig2_status != 0)
            return Outcome{false, "figures fig2 failed"};
        std::vector<Curve> c;
        for (int rs = 2; rs <= 5; ++rs)
            c.push_back(read_curve(out / "fig2" / ("fig2_rs" + std::to_string(rs) + ".csv")));
        for (std::size_t i = 0; i < c[0].L.size(); ++i)
            for (std::size_t k = 0; k + 1 < c.size(); ++k)
                if (!(-c[k].minus_rel[i] > -c[k + 1].minus_rel[i]))
                    return Outcome{false, "order broken at L = " + fmt("%.3g", c[0].L[i])};
        return Outcome{true, "dF/F strictly decreasing in rs at all " + std::to_string(c[0].L.size()) + " L"};
    });

    report(10, "property suite", [&] {
        std::string detail;
        bool ok = true;
        // Linearization oracle.
        const double d0 = au.units().length_to_natural(constants::angstrom);
        std::vector<double> mismatch;
        for (double eta : {1e-3, 1e-4})
        {
            const DPerpModel dm = StaticDPerp{eta * d0};
            const double lin = delta_force_linear(au, dm, 0.1, tol(1e-7)).delta_f;
            const double full = force_difference(DPerpPerturbative{au, dm}, DPerpPerturbative{au, dm},
                                                 LocalDrude{au}, LocalDrude{au}, 0.1, tol(1e-7))
                                    .value;
            mismatch.push_back(std::abs(lin - full) / std::abs(lin));
        }
        const double order = std::log10(mismatch[0] / mismatch[1]);
        ok = ok && std::abs(order - 1.0) <= 0.15 && mismatch[0] <= 1e-2;
        detail += "linearization order " + fmt("%.3f", order);

        // Rotated formulas against the complex real-axis forms at omega = i zeta.
        std::mt19937_64 rng(2024);
        std::uniform_real_distribution<double> lu(-3.0, 2.0);
        double worst = 0.0;
        for (int k = 0; k < 100; ++k)
        {
            const double z = std::pow(10.0, lu(rng)), q = std::pow(10.0, lu(rng));
            const auto a = oracle::amplitudes({0.0, z}, q, au.damping_natural(), au.beta_natural());
            worst = std::max({worst, std::abs(r_s_local(au, z, q) - a.r_s.real()),
                              std::abs(r_p_local(au, z, q) - a.r_p0.real()),
                              std::abs(r_p_hydro(au, z, q) - a.r_p_hydro.real()),
                              std::abs(r_p_dperp(au, HydroDynamicDPerp{}, z, q) -
                                       oracle::r_p_dperp(a, q, oracle::hydro_dperp(a)).real())});
        }
        ok = ok && worst <= 1e-12;
        detail += ", complex-literal max diff " + fmt("%.1e", worst);

        // Local-limit degeneracy of the hydrodynamic amplitude.
        const double gap = std::abs(r_p_hydro(au.with_beta(1e-9), 0.3, 2.0) - r_p_local(au, 0.3, 2.0));
        ok = ok && gap <= 1e-7;
        detail += ", beta -> 0 gap " + fmt("%.1e", gap);

        // Bose integral.
        const double bose =
            integrate_semi_inf([](double x) { return x * x * x / std::expm1(x); }, tol(1e-12)).value;
        const double bose_err = std::abs(bose / (std::pow(pi, 4) / 15.0) - 1.0);
        ok = ok && bose_err <= 1e-10;
        detail += ", Bose rel err " + fmt("%.1e", bose_err);
        return Outcome{ok, detail};
    });

    report(11, "figures fig1 end to end, small-L slopes -1 +- 0.1", [&] {
        if (fig1_status != 0)
            return Outcome{false, "figures fig1 exit status " + std::to_string(fig1_status)};
        std::size_t files = 0;
        for (char c : std::string("abcde"))
            files += fs::exists(out / "fig1" / (std::string("fig1_") + c + ".csv"));
        bool ok = files == 5 && fig1_seconds < 300.0;
        std::string detail = std::to_string(files) + " CSVs in " + fmt("%.1f", fig1_seconds) + " s, slopes";
        for (char c : std::string("abcde"))
        {
            const double s = slope(fig1[c], 0.1, 1.0);
            ok = ok && std::abs(s + 1.0) <= 0.1;
            detail += std::string(" ") + c + "=" + fmt("%.3f", s);
        }
        return Outcome{ok, detail};
    });

    return failures == 0 ? 0 : 1;
}
