#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "casimir/lifshitz.hpp"
#include "casimir/quadrature.hpp"

using namespace casimir;

namespace {

constexpr double pi = std::numbers::pi;

IntegrationConfig tight(double rel = 1e-12)
{
    IntegrationConfig c;
    c.rel_tol = rel;
    return c;
}

}  // namespace

TEST(Quadrature, ExponentialOnHalfLine)
{
    for (auto kind : {TransformKind::ExpDecay, TransformKind::Algebraic})
    {
        IntegrationConfig c = tight();
        c.transform = kind;
        const auto r = integrate_semi_inf([](double x) { return std::exp(-x); }, c);
        EXPECT_NEAR(r.value, 1.0, 1e-12);
        EXPECT_GT(r.evaluations, 0u);
    }
}

TEST(Quadrature, BoseIntegral)
{
    // int_0^inf x^3 / (e^x - 1) dx = pi^4 / 15; with the 1/16 of the Casimir energy, pi^4 / 240.
    const auto r = integrate_semi_inf([](double x) { return x * x * x / std::expm1(x) / 16.0; }, tight());
    EXPECT_NEAR(r.value / (std::pow(pi, 4) / 240.0), 1.0, 1e-10);
}

TEST(Quadrature, FiniteInterval)
{
    const auto r = integrate_finite([](double x) { return std::sin(x); }, 0.0, pi, tight());
    EXPECT_NEAR(r.value, 2.0, 1e-13);
    EXPECT_THROW(integrate_finite([](double) { return 1.0; }, 1.0, 0.0, tight()), std::invalid_argument);
}

TEST(Quadrature, ProductExponentialInTwoD)
{
    for (auto layout : {Layout2D::Cartesian, Layout2D::Polar})
    {
        const auto r = integrate_2d_semi_inf([](double x, double y) { return std::exp(-x - y); }, tight(1e-10),
                                             layout);
        EXPECT_NEAR(r.value, 1.0, 1e-9);
    }
}

TEST(Quadrature, CartesianAndPolarAgree)
{
    auto f = [](double x, double y) { return x * y / (std::exp(2.0 * std::hypot(x, y)) - 0.5); };
    const auto a = integrate_2d_semi_inf(f, tight(1e-10), Layout2D::Cartesian);
    const auto b = integrate_2d_semi_inf(f, tight(1e-10), Layout2D::Polar);
    EXPECT_NEAR(a.value / b.value, 1.0, 1e-9);
}

TEST(Quadrature, DrudeKernelAgainstMidpointGrid)
{
    // Independent evaluation of the Lifshitz pressure: polar midpoint rule with
    // r = s u / (1 - u), s = 1 / (2L), on a 4096 x 4096 grid.
    const Material m = material_from_rs(1.59 * constants::angstrom, 400.0);
    const double L = 1.0, s = 1.0 / (2.0 * L);
    const int n = 4096;
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
    {
        const double u = (i + 0.5) / n;
        const double r = s * u / (1.0 - u);
        const double jac = s / ((1.0 - u) * (1.0 - u));
        const double damp = std::exp(-2.0 * r * L);
        double row = 0.0;
        for (int j = 0; j < n; ++j)
        {
            const double th = (j + 0.5) / n * (pi / 2.0);
            const double zeta = r * std::sin(th), q = r * std::cos(th);
            const double eps = 1.0 + 1.0 / (zeta * (zeta + 1.0 / 400.0));
            const double km = std::sqrt(eps * zeta * zeta + q * q);
            const double rs = (r - km) / (r + km), rp = (eps * r - km) / (eps * r + km);
            const double xs = rs * rs * damp, xp = rp * rp * damp;
            row += q * r * (xs / (1.0 - xs) + xp / (1.0 - xp)) * r;
        }
        sum += row * jac;
    }
    const double oracle = sum * (1.0 / n) * (pi / 2.0 / n) / (2.0 * pi * pi);
    const auto f = force_per_area(LocalDrude{m}, LocalDrude{m}, L, tight(1e-9));
    EXPECT_NEAR(f.f_per_area / oracle, 1.0, 1e-6);
}

TEST(Quadrature, TransformInvariance)
{
    auto f = [](double x) { return x * x * std::exp(-0.7 * x) / (1.0 + x); };
    double ref = 0.0;
    bool first = true;
    for (auto kind : {TransformKind::ExpDecay, TransformKind::Algebraic})
        for (double scale : {1.5, 3.0, 6.0})
        {
            IntegrationConfig c = tight(1e-11);
            c.transform = kind;
            c.scale = scale;
            const double v = integrate_semi_inf(f, c).value;
            if (first)
                ref = v;
            first = false;
            EXPECT_NEAR(v / ref, 1.0, 1e-10);
        }
}

TEST(Quadrature, Deterministic)
{
    const Material m = material_from_rs(1.59 * constants::angstrom, 400.0);
    const auto a = force_per_area(LocalDrude{m}, LocalDrude{m}, 0.7, tight(1e-8));
    const auto b = force_per_area(LocalDrude{m}, LocalDrude{m}, 0.7, tight(1e-8));
    EXPECT_EQ(a.f_per_area, b.f_per_area);
    EXPECT_EQ(a.evaluations, b.evaluations);
}

TEST(Quadrature, ErrorEstimateIsHonest)
{
    // x^a e^{-b x} on [0, inf) has the value Gamma(a + 1) / b^(a + 1).
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> ua(0.0, 4.0), ub(0.3, 6.0);
    int cases = 0, honest = 0;
    for (double tol : {1e-5, 1e-7, 1e-9})
        for (int k = 0; k < 100; ++k)
        {
            const double a = ua(rng), b = ub(rng);
            IntegrationConfig c = tight(tol);
            c.scale = 1.0 / b;
            const auto r = integrate_semi_inf([&](double x) { return std::pow(x, a) * std::exp(-b * x); }, c);
            const double exact = std::tgamma(a + 1.0) / std::pow(b, a + 1.0);
            const double err = std::abs(r.value - exact);
            ++cases;
            if (err <= 10.0 * r.abs_error_estimate + 1e-15 * exact)
                ++honest;
            EXPECT_LE(err, 10.0 * tol * exact);
        }
    EXPECT_GE(honest, static_cast<int>(0.99 * cases));
}

TEST(Quadrature, BudgetExhaustionThrowsWithPartial)
{
    IntegrationConfig c = tight(1e-13);
    c.max_subdivisions = 2;
    try
    {
        integrate_finite([](double x) { return std::sqrt(x) * std::sin(50.0 * x); }, 0.0, 3.0, c);
        FAIL() << "expected ConvergenceError";
    }
    catch (const ConvergenceError& e)
    {
        EXPECT_TRUE(std::isfinite(e.partial().value));
        EXPECT_GT(e.partial().evaluations, 0u);
    }
    EXPECT_THROW(integrate_2d_semi_inf([](double x, double y) { return std::exp(-x - y) * std::sin(40 * x * y); },
                                       c),
                 ConvergenceError);
}

TEST(Quadrature, RejectsBadConfig)
{
    IntegrationConfig c;
    c.rel_tol = 0.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c.rel_tol = 1e-16;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = IntegrationConfig{};
    c.scale = -1.0;
    EXPECT_THROW(integrate_semi_inf([](double) { return 0.0; }, c), std::invalid_argument);
}
