// Separation sweeps over one model, evaluated in parallel with ordered output.

#pragma once

#include <atomic>
#include <cstdlib>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "casimir/lifshitz.hpp"

namespace casimir {

enum class Method
{
    Ideal,             // perfect mirrors
    LocalDrude,        // local Drude metal, no correction
    ExactHydro,        // hydrodynamic minus local amplitudes
    DPerpLinear,       // retarded first-order d_perp theory
    DPerpNonRetarded,  // non-retarded first-order d_perp theory
};

struct ModelSpec
{
    Method method = Method::LocalDrude;
    Material material = material_from_rs(1.59 * constants::angstrom, 400.0);
    DPerpModel dperp = HydroDynamicDPerp{};
    /// Sphere radius (natural units); absent for parallel plates.
    std::optional<double> sphere_radius;

    Geometry geometry(double L) const
    {
        if (sphere_radius)
            return SpherePlate{L, *sphere_radius};
        return ParallelPlates{L};
    }
};

/// Evaluate one model at separation L (natural units).
inline ForceResult evaluate(const ModelSpec& spec, double L, const IntegrationConfig& cfg)
{
    const Geometry g = spec.geometry(L);
    switch (spec.method)
    {
    case Method::Ideal:
    case Method::LocalDrude: {
        const SurfaceModel s = spec.method == Method::Ideal ? SurfaceModel{IdealMirror{}}
                                                            : SurfaceModel{LocalDrude{spec.material}};
        ForceResult r = spec.sphere_radius ? pfa_sphere_force(s, s, L, *spec.sphere_radius, cfg)
                                           : force_per_area(s, s, L, cfg);
        r.fill_si(spec.material.units());
        return r;
    }
    case Method::ExactHydro:
        return nonlocal_correction_exact(spec.material, g, cfg);
    case Method::DPerpLinear:
        return delta_linear(spec.material, spec.dperp, g, cfg);
    case Method::DPerpNonRetarded:
        return delta_nonretarded(spec.material, spec.dperp, g, cfg);
    }
    throw std::logic_error("evaluate: unknown method");
}

struct SweepPoint
{
    double L = 0.0;
    ForceResult result;
    bool converged = true;
    std::string error;
};

/// Worker count from CASIMIR_SCREEN_THREADS, else the hardware concurrency.
inline unsigned default_thread_count()
{
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("CASIMIR_SCREEN_THREADS"))
    {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0)
            return static_cast<unsigned>(std::min<long>(v, 1024));
    }
    return hw;
}

/**
 * Evaluate the model at every separation. Failures are recorded per point
 * (ConvergenceError keeps its partial value) and the sweep continues. The
 * output order matches the input regardless of the number of threads.
 */
inline std::vector<SweepPoint> sweep(std::span<const double> separations, const ModelSpec& spec,
                                     const IntegrationConfig& cfg, unsigned threads = 0)
{
    std::vector<SweepPoint> out(separations.size());
    if (separations.empty())
        return out;
    for (std::size_t i = 0; i < separations.size(); ++i)
    {
        if (!(separations[i] > 0.0))
            throw std::domain_error("sweep: separations must be positive");
        if (i > 0 && !(separations[i] > separations[i - 1]))
            throw std::invalid_argument("sweep: separations must be strictly increasing");
    }

    auto run_one = [&](std::size_t i) {
        SweepPoint& p = out[i];
        p.L = separations[i];
        try
        {
            p.result = evaluate(spec, p.L, cfg);
        }
        catch (const ConvergenceError& e)
        {
            p.converged = false;
            p.error = e.what();
            p.result.geometry = spec.geometry(p.L);
            p.result.f_per_area = e.partial().value;
        }
        catch (const std::exception& e)
        {
            p.converged = false;
            p.error = e.what();
            p.result.geometry = spec.geometry(p.L);
        }
    };

    if (threads == 0)
        threads = default_thread_count();
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, separations.size()));
    if (threads <= 1)
    {
        for (std::size_t i = 0; i < separations.size(); ++i)
            run_one(i);
        return out;
    }

    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < separations.size(); i = next++)
                run_one(i);
        });
    pool.clear();
    return out;
}

}  // namespace casimir
