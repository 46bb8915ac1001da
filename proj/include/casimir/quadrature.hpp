// Adaptive Gauss-Kronrod integration on finite and semi-infinite domains.
//
// The core is a globally adaptive 10/21-point Gauss-Kronrod scheme in the
// spirit of QUADPACK's QAG: the interval with the largest error estimate is
// bisected until the summed estimate meets max(abs_tol, rel_tol |I|).
// Semi-infinite ranges are mapped onto [0, 1) by a variable transform;
// Kronrod nodes are interior, so neither endpoint is ever sampled.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace casimir {

enum class TransformKind
{
    ExpDecay,   // x = -s ln(1 - t)
    Algebraic,  // x = s t / (1 - t)
};

/// Only the zero-temperature occupation f = 1/2 is supported.
enum class Temperature
{
    Zero,
};

struct IntegrationConfig
{
    static constexpr double min_rel_tol = 50.0 * std::numeric_limits<double>::epsilon();

    double rel_tol = 1e-8;
    double abs_tol = 0.0;
    std::size_t max_subdivisions = 2000;
    TransformKind transform = TransformKind::ExpDecay;
    /// Length scale of the semi-infinite map (decay length of the integrand).
    /// With ExpDecay an integrand decaying slower than exp(-x / scale) becomes
    /// singular at the far end of the map; pick scale at or above its decay length.
    double scale = 1.0;
    Temperature temperature = Temperature::Zero;

    void validate() const
    {
        if (!(rel_tol > 0.0))
            throw std::invalid_argument("IntegrationConfig: rel_tol must be positive");
        if (abs_tol == 0.0 && rel_tol < min_rel_tol)
            throw std::invalid_argument("IntegrationConfig: rel_tol below 50 machine epsilons");
        if (!(abs_tol >= 0.0))
            throw std::invalid_argument("IntegrationConfig: abs_tol must be non-negative");
        if (!(scale > 0.0) || !std::isfinite(scale))
            throw std::invalid_argument("IntegrationConfig: scale must be positive");
        if (max_subdivisions == 0)
            throw std::invalid_argument("IntegrationConfig: max_subdivisions must be positive");
    }

    IntegrationConfig with_scale(double s) const
    {
        IntegrationConfig c = *this;
        c.scale = s;
        return c;
    }

    IntegrationConfig with_rel_tol(double r) const
    {
        IntegrationConfig c = *this;
        c.rel_tol = r;
        return c;
    }
};

struct QuadResult
{
    double value = 0.0;
    double abs_error_estimate = 0.0;
    std::size_t evaluations = 0;
};

/// Thrown when the subdivision budget runs out; carries the best estimate.
class ConvergenceError : public std::runtime_error
{
public:
    ConvergenceError(const std::string& what, QuadResult partial)
        : std::runtime_error(what), partial_(partial)
    {
    }

    const QuadResult& partial() const { return partial_; }

private:
    QuadResult partial_;
};

namespace detail {

// QUADPACK qk21 abscissae and weights.
inline constexpr std::array<double, 11> gk21_x = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr std::array<double, 11> gk21_wk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
// Gauss weights for gk21_x[1], [3], [5], [7], [9].
inline constexpr std::array<double, 5> g10_w = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651146};

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
struct Segment
{
    double a, b;
    Vec<N> value;
    double error;  // estimate for component 0
    Vec<N> aux_abs_error;
};

/// One 21-point Kronrod evaluation with the embedded 10-point Gauss error estimate.
template <std::size_t N, class F>
Segment<N> gk21(F& f, double a, double b)
{
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    Vec<N> fc = f(centre);
    Vec<N> rk{}, rg{}, rabs{}, rasc{};
    std::array<Vec<N>, 10> f1{}, f2{};
    for (std::size_t c = 0; c < N; ++c)
    {
        rk[c] = fc[c] * gk21_wk[10];
        rabs[c] = std::abs(rk[c]);
    }
    for (std::size_t j = 0; j < 10; ++j)
    {
        const double dx = half * gk21_x[j];
        f1[j] = f(centre - dx);
        f2[j] = f(centre + dx);
        for (std::size_t c = 0; c < N; ++c)
        {
            const double s = f1[j][c] + f2[j][c];
            rk[c] += gk21_wk[j] * s;
            rabs[c] += gk21_wk[j] * (std::abs(f1[j][c]) + std::abs(f2[j][c]));
            if (j % 2 == 1)
                rg[c] += g10_w[j / 2] * s;
        }
    }
    Segment<N> seg{a, b, {}, 0.0, {}};
    for (std::size_t c = 0; c < N; ++c)
    {
        const double mean = 0.5 * rk[c];
        rasc[c] = gk21_wk[10] * std::abs(fc[c] - mean);
        for (std::size_t j = 0; j < 10; ++j)
            rasc[c] += gk21_wk[j] * (std::abs(f1[j][c] - mean) + std::abs(f2[j][c] - mean));
        double err = std::abs((rk[c] - rg[c]) * half);
        const double resasc = rasc[c] * std::abs(half);
        const double resabs = rabs[c] * std::abs(half);
        if (resasc != 0.0 && err != 0.0)
            err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
        const double roundoff = 50.0 * std::numeric_limits<double>::epsilon() * resabs;
        if (resabs > std::numeric_limits<double>::min() / (50.0 * std::numeric_limits<double>::epsilon()))
            err = std::max(err, roundoff);
        seg.value[c] = rk[c] * half;
        if (c == 0)
            seg.error = err;
        seg.aux_abs_error[c] = err;
    }
    return seg;
}

template <std::size_t N>
struct AdaptiveResult
{
    Vec<N> value{};
    Vec<N> abs_error{};
    std::size_t evaluations = 0;
    bool converged = false;
};

/**
 * Globally adaptive integration of an N-component integrand on [a, b].
 * Component 0 drives the refinement; the others are integrated on the same
 * partition. Deterministic: no floating-point result depends on timing.
 */
template <std::size_t N, class F>
AdaptiveResult<N> adaptive_gk(F&& f, double a, double b, double rel_tol, double abs_tol,
                              std::size_t max_subdivisions)
{
    using Seg = Segment<N>;
    auto by_error = [](const Seg& x, const Seg& y) { return x.error < y.error; };

    std::vector<Seg> heap;
    heap.reserve(std::min<std::size_t>(max_subdivisions + 1, 4096));
    heap.push_back(gk21<N>(f, a, b));
    std::size_t evaluations = 21;
    double total = heap.front().value[0];
    double total_err = heap.front().error;
    bool converged = total_err <= std::max(abs_tol, rel_tol * std::abs(total));

    while (!converged && heap.size() < max_subdivisions)
    {
        std::pop_heap(heap.begin(), heap.end(), by_error);
        const Seg worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b))
        {
            // Interval cannot be bisected further in double precision.
            heap.push_back(worst);
            std::push_heap(heap.begin(), heap.end(), by_error);
            break;
        }
        Seg left = gk21<N>(f, worst.a, mid);
        Seg right = gk21<N>(f, mid, worst.b);
        evaluations += 42;
        total += left.value[0] + right.value[0] - worst.value[0];
        total_err += left.error + right.error - worst.error;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end(), by_error);
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end(), by_error);
        converged = total_err <= std::max(abs_tol, rel_tol * std::abs(total));
    }

    // Final sums in left-to-right order so the result does not inherit
    // the incremental update's cancellation.
    std::sort(heap.begin(), heap.end(), [](const Seg& x, const Seg& y) { return x.a < y.a; });
    AdaptiveResult<N> out;
    for (const auto& s : heap)
        for (std::size_t c = 0; c < N; ++c)
        {
            out.value[c] += s.value[c];
            out.abs_error[c] += s.aux_abs_error[c];
        }
    out.evaluations = evaluations;
    out.converged = out.abs_error[0] <= std::max(abs_tol, rel_tol * std::abs(out.value[0]));
    return out;
}

struct SemiInfiniteMap
{
    TransformKind kind;
    double scale;

    double x(double t) const
    {
        return kind == TransformKind::ExpDecay ? -scale * std::log1p(-t) : scale * t / (1.0 - t);
    }
    double jacobian(double t) const
    {
        const double u = 1.0 - t;
        return kind == TransformKind::ExpDecay ? scale / u : scale / (u * u);
    }
};

inline QuadResult finish_1d(const AdaptiveResult<1>& r, const char* who)
{
    QuadResult q{r.value[0], r.abs_error[0], r.evaluations};
    if (!r.converged)
        throw ConvergenceError(std::string(who) + ": subdivision budget exhausted before tolerance", q);
    return q;
}

}  // namespace detail

/// Integrate f over [a, b] (a < b, finite).
template <class F>
QuadResult integrate_finite(F&& f, double a, double b, const IntegrationConfig& cfg)
{
    cfg.validate();
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
        throw std::invalid_argument("integrate_finite: need finite a < b");
    auto g = [&](double x) { return detail::Vec<1>{f(x)}; };
    const auto r = detail::adaptive_gk<1>(g, a, b, cfg.rel_tol, cfg.abs_tol, cfg.max_subdivisions);
    return detail::finish_1d(r, "integrate_finite");
}

/// Integrate f over [0, inf) through the transform selected in cfg.
template <class F>
QuadResult integrate_semi_inf(F&& f, const IntegrationConfig& cfg)
{
    cfg.validate();
    const detail::SemiInfiniteMap map{cfg.transform, cfg.scale};
    auto g = [&](double t) {
        const double x = map.x(t);
        if (!std::isfinite(x))
            return detail::Vec<1>{0.0};
        return detail::Vec<1>{f(x) * map.jacobian(t)};
    };
    const auto r = detail::adaptive_gk<1>(g, 0.0, 1.0, cfg.rel_tol, cfg.abs_tol, cfg.max_subdivisions);
    return detail::finish_1d(r, "integrate_semi_inf");
}

enum class Layout2D
{
    Cartesian,  // outer x in [0, inf), inner y in [0, inf)
    Polar,      // x = r sin(theta), y = r cos(theta); outer r, inner theta in [0, pi/2]
};

/**
 * Integrate f(x, y) over the quarter plane [0, inf)^2 as nested adaptive 1D
 * rules. The inner tolerance is a tenth of the outer one. The reported error
 * is the outer estimate plus the outer integral of the inner estimates.
 */
template <class F>
QuadResult integrate_2d_semi_inf(F&& f, const IntegrationConfig& cfg, Layout2D layout = Layout2D::Cartesian)
{
    cfg.validate();
    const detail::SemiInfiniteMap map{cfg.transform, cfg.scale};
    const double inner_rel = cfg.rel_tol / 10.0;
    const double inner_abs = cfg.abs_tol / 10.0;
    std::size_t evaluations = 0;
    bool inner_failed = false;

    auto inner = [&](double x) -> detail::Vec<2> {
        detail::AdaptiveResult<1> r;
        if (layout == Layout2D::Cartesian)
        {
            auto g = [&](double t) {
                const double y = map.x(t);
                if (!std::isfinite(y))
                    return detail::Vec<1>{0.0};
                return detail::Vec<1>{f(x, y) * map.jacobian(t)};
            };
            r = detail::adaptive_gk<1>(g, 0.0, 1.0, inner_rel, inner_abs, cfg.max_subdivisions);
        }
        else
        {
            auto g = [&](double theta) {
                return detail::Vec<1>{x * f(x * std::sin(theta), x * std::cos(theta))};
            };
            r = detail::adaptive_gk<1>(g, 0.0, std::numbers::pi / 2.0, inner_rel, inner_abs,
                                       cfg.max_subdivisions);
        }
        evaluations += r.evaluations;
        inner_failed = inner_failed || !r.converged;
        return {r.value[0], r.abs_error[0]};
    };

    auto outer = [&](double t) -> detail::Vec<2> {
        const double x = map.x(t);
        if (!std::isfinite(x))
            return {0.0, 0.0};
        const double jac = map.jacobian(t);
        const auto v = inner(x);
        return {v[0] * jac, v[1] * jac};
    };
    const auto r = detail::adaptive_gk<2>(outer, 0.0, 1.0, cfg.rel_tol, cfg.abs_tol, cfg.max_subdivisions);
    QuadResult q{r.value[0], r.abs_error[0] + std::abs(r.value[1]), evaluations};
    if (!r.converged || inner_failed)
        throw ConvergenceError("integrate_2d_semi_inf: subdivision budget exhausted before tolerance", q);
    return q;
}

}  // namespace casimir
