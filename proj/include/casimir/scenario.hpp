// Command-line front end: config ingestion, sweeps, figure reproduction and
// CSV / JSON emission. The executable in tools/ is a thin wrapper around run().

#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "CLI11.hpp"
#include "json.hpp"

#include "casimir/dperp_table.hpp"
#include "casimir/lifshitz.hpp"
#include "casimir/material.hpp"
#include "casimir/sweep.hpp"

namespace casimir::scenario {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 2;
inline constexpr int exit_convergence = 3;

/// Bad flags or configuration; maps to exit status 2.
class ConfigError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

enum class Units
{
    Natural,
    SI,
};

inline Units parse_units(const std::string& s)
{
    if (s == "natural")
        return Units::Natural;
    if (s == "si" || s == "SI")
        return Units::SI;
    throw ConfigError("units must be 'natural' or 'si', got '" + s + "'");
}

// ---------------------------------------------------------------------------
// Quantities with unit suffixes
// ---------------------------------------------------------------------------

namespace detail {

struct NumberWithSuffix
{
    double value;
    std::string suffix;
};

inline NumberWithSuffix split_number(std::string_view text)
{
    text = casimir::detail::trim(text);
    std::size_t i = 0;
    while (i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.' ||
                               text[i] == '-' || text[i] == '+' ||
                               ((text[i] == 'e' || text[i] == 'E') && i + 1 < text.size() &&
                                (std::isdigit(static_cast<unsigned char>(text[i + 1])) || text[i + 1] == '-' ||
                                 text[i + 1] == '+'))))
        ++i;
    double v = 0.0;
    if (i == 0 || !casimir::detail::parse_double(text.substr(0, i), v))
        throw ConfigError("expected a number in '" + std::string(text) + "'");
    return {v, std::string(casimir::detail::trim(text.substr(i)))};
}

inline std::optional<double> si_length_factor(const std::string& suffix)
{
    if (suffix == "m")
        return 1.0;
    if (suffix == "mm")
        return 1e-3;
    if (suffix == "um" || suffix == "µm")
        return 1e-6;
    if (suffix == "nm")
        return 1e-9;
    if (suffix == "A" || suffix == "Å")
        return constants::angstrom;
    if (suffix == "a0" || suffix == "aB" || suffix == "bohr")
        return constants::bohr_radius;
    return std::nullopt;
}

}  // namespace detail

/// Length in c / omega_p. A bare number is already natural; nm, um, A, a0, m are SI.
inline double parse_length(std::string_view text, const UnitSystem& units)
{
    const auto [v, suffix] = detail::split_number(text);
    if (suffix.empty() || suffix == "c/wp")
        return v;
    if (const auto f = detail::si_length_factor(suffix))
        return units.length_to_natural(v * *f);
    throw ConfigError("unknown length unit '" + suffix + "'");
}

/// Density parameter in metres. A bare number is read as angstrom.
inline double parse_rs(std::string_view text)
{
    const auto [v, suffix] = detail::split_number(text);
    if (suffix.empty())
        return v * constants::angstrom;
    if (const auto f = detail::si_length_factor(suffix))
        return v * *f;
    throw ConfigError("unknown rs unit '" + suffix + "'");
}

// ---------------------------------------------------------------------------
// Model selection
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& model_names()
{
    static const std::vector<std::string> names = {"ideal",       "drude",        "hydro",
                                                    "dperp-hydro", "dperp-static", "dperp-table"};
    return names;
}

/// Default relative tolerance: 1e-8 for forces, 1e-6 for corrections.
inline double default_rel_tol(Method m)
{
    return m == Method::Ideal || m == Method::LocalDrude ? 1e-8 : 1e-6;
}

struct ModelOptions
{
    std::string name = "hydro";
    bool nonretarded = false;
    std::optional<std::string> dperp0;  // length text; default is the hydrodynamic d_perp(0)
    std::optional<std::string> dperp_table;
    bool extrapolate = false;
    std::optional<std::string> sphere_radius;  // length text
};

inline ModelSpec build_model(const ModelOptions& o, const Material& m)
{
    ModelSpec spec;
    spec.material = m;
    const UnitSystem u = m.units();
    if (o.sphere_radius)
        spec.sphere_radius = parse_length(*o.sphere_radius, u);

    const bool dperp_model = o.name.rfind("dperp-", 0) == 0;
    if (o.nonretarded && !dperp_model)
        throw ConfigError("--nonretarded applies only to dperp-* models");
    if (o.name == "ideal")
        spec.method = Method::Ideal;
    else if (o.name == "drude")
        spec.method = Method::LocalDrude;
    else if (o.name == "hydro")
        spec.method = Method::ExactHydro;
    else if (dperp_model)
    {
        spec.method = o.nonretarded ? Method::DPerpNonRetarded : Method::DPerpLinear;
        if (o.name == "dperp-hydro")
            spec.dperp = HydroDynamicDPerp{};
        else if (o.name == "dperp-static")
            spec.dperp = StaticDPerp{o.dperp0 ? parse_length(*o.dperp0, u) : hydro_static_dperp(m)};
        else if (o.name == "dperp-table")
        {
            if (!o.dperp_table)
                throw ConfigError("model dperp-table needs a d_perp table file");
            try
            {
                spec.dperp = TabulatedDPerp{load_dperp_csv(*o.dperp_table, m, o.extrapolate)};
            }
            catch (const std::invalid_argument& e)
            {
                throw ConfigError(e.what());
            }
            catch (const std::runtime_error& e)
            {
                throw ConfigError(e.what());
            }
        }
        else
            throw ConfigError("unknown model '" + o.name + "'");
    }
    else
        throw ConfigError("unknown model '" + o.name + "'");
    return spec;
}

// ---------------------------------------------------------------------------
// Sweep configuration
// ---------------------------------------------------------------------------

struct GridSpec
{
    double min = 0.01;
    double max = 100.0;
    std::size_t points = 97;
    bool log = true;

    void validate() const
    {
        if (!(min > 0.0) || !std::isfinite(max))
            throw ConfigError("grid: min must be positive and max finite");
        if (!(min < max))
            throw ConfigError("grid: min must be below max");
        if (points < 2)
            throw ConfigError("grid: need at least two points");
    }

    std::vector<double> values() const
    {
        validate();
        std::vector<double> v(points);
        for (std::size_t i = 0; i < points; ++i)
        {
            const double t = static_cast<double>(i) / static_cast<double>(points - 1);
            v[i] = log ? std::exp(std::log(min) + t * (std::log(max) - std::log(min))) : min + t * (max - min);
        }
        v.front() = min;
        v.back() = max;
        return v;
    }
};

struct ScenarioConfig
{
    boost::property_tree::ptree material_tree;
    ModelOptions model;
    GridSpec grid;
    std::optional<double> rel_tol;
    Units units = Units::Natural;
    std::optional<std::string> output;

    Material material() const { return material_from_tree(material_tree); }
};

namespace detail {

inline void reject_unknown_keys(const boost::property_tree::ptree& section, const std::string& name,
                                const std::set<std::string>& allowed)
{
    for (const auto& [key, child] : section)
    {
        if (!child.empty())
            throw ConfigError("config: nested section '" + name + "." + key + "' not allowed");
        if (!allowed.count(key))
            throw ConfigError("config: unknown key '" + key + "' in [" + name + "]");
    }
}

inline bool parse_bool(const std::string& s)
{
    if (s == "true" || s == "1" || s == "yes" || s == "on")
        return true;
    if (s == "false" || s == "0" || s == "no" || s == "off")
        return false;
    throw ConfigError("expected a boolean, got '" + s + "'");
}

template <class T>
T get_number(const boost::property_tree::ptree& t, const std::string& key, T fallback)
{
    const auto text = t.get_optional<std::string>(key);
    if (!text)
        return fallback;
    double v = 0.0;
    if (!casimir::detail::parse_double(*text, v))
        throw ConfigError("config: key '" + key + "' must be numeric, got '" + *text + "'");
    if constexpr (std::is_integral_v<T>)
    {
        if (v < 0 || v != std::floor(v))
            throw ConfigError("config: key '" + key + "' must be a non-negative integer");
    }
    return static_cast<T>(v);
}

}  // namespace detail

/**
 * Parse an INI-style scenario:
 *
 *   [material]    rs_angstrom, tau_rel, omega_p_ev, v_f_si
 *   [model]       name, nonretarded, dperp0, dperp_table, extrapolate, sphere_radius
 *   [grid]        min, max, points, spacing (log | linear); lengths natural unless suffixed
 *   [integration] rel_tol
 *   [output]      csv, units (natural | si)
 *
 * Relative file paths resolve against base_dir. Referenced files must exist.
 */
inline ScenarioConfig parse_scenario(const boost::property_tree::ptree& tree,
                                     const std::filesystem::path& base_dir = {})
{
    using boost::property_tree::ptree;
    static const std::set<std::string> sections = {"material", "model", "grid", "integration", "output"};
    for (const auto& [key, child] : tree)
        if (!sections.count(key) || child.empty())
            throw ConfigError("config: unexpected top-level entry '" + key + "'");

    ScenarioConfig cfg;
    const ptree empty;
    const ptree& mat = tree.get_child("material", empty);
    const ptree& model = tree.get_child("model", empty);
    const ptree& grid = tree.get_child("grid", empty);
    const ptree& integ = tree.get_child("integration", empty);
    const ptree& out = tree.get_child("output", empty);
    detail::reject_unknown_keys(mat, "material", {"rs_angstrom", "tau_rel", "omega_p_ev", "v_f_si"});
    detail::reject_unknown_keys(model, "model",
                                {"name", "nonretarded", "dperp0", "dperp_table", "extrapolate", "sphere_radius"});
    detail::reject_unknown_keys(grid, "grid", {"min", "max", "points", "spacing"});
    detail::reject_unknown_keys(integ, "integration", {"rel_tol"});
    detail::reject_unknown_keys(out, "output", {"csv", "units"});

    cfg.material_tree = mat;
    if (!cfg.material_tree.get_optional<std::string>("rs_angstrom"))
        cfg.material_tree.put("rs_angstrom", "1.59");
    if (!cfg.material_tree.get_optional<std::string>("tau_rel"))
        cfg.material_tree.put("tau_rel", "400");
    try
    {
        (void)cfg.material();
    }
    catch (const ConfigError&)
    {
        throw;
    }
    catch (const std::exception& e)
    {
        throw ConfigError(std::string("config: material: ") + e.what());
    }

    auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        if (path.is_relative() && !base_dir.empty())
            path = base_dir / path;
        if (!std::filesystem::exists(path))
            throw ConfigError("config: file '" + path.string() + "' does not exist");
        return path.string();
    };

    cfg.model.name = model.get<std::string>("name", "hydro");
    cfg.model.nonretarded = detail::parse_bool(model.get<std::string>("nonretarded", "false"));
    cfg.model.extrapolate = detail::parse_bool(model.get<std::string>("extrapolate", "false"));
    if (auto v = model.get_optional<std::string>("dperp0"))
        cfg.model.dperp0 = *v;
    if (auto v = model.get_optional<std::string>("dperp_table"))
        cfg.model.dperp_table = resolve(*v);
    if (auto v = model.get_optional<std::string>("sphere_radius"))
        cfg.model.sphere_radius = *v;

    const UnitSystem units = cfg.material().units();
    if (auto v = grid.get_optional<std::string>("min"))
        cfg.grid.min = parse_length(*v, units);
    if (auto v = grid.get_optional<std::string>("max"))
        cfg.grid.max = parse_length(*v, units);
    cfg.grid.points = detail::get_number<std::size_t>(grid, "points", cfg.grid.points);
    const std::string spacing = grid.get<std::string>("spacing", "log");
    if (spacing != "log" && spacing != "linear")
        throw ConfigError("config: grid spacing must be 'log' or 'linear'");
    cfg.grid.log = spacing == "log";
    cfg.grid.validate();

    if (integ.get_optional<std::string>("rel_tol"))
    {
        cfg.rel_tol = detail::get_number<double>(integ, "rel_tol", 0.0);
        if (!(*cfg.rel_tol > 0.0))
            throw ConfigError("config: rel_tol must be positive");
    }
    cfg.units = parse_units(out.get<std::string>("units", "natural"));
    if (auto v = out.get_optional<std::string>("csv"))
    {
        std::filesystem::path p(*v);
        if (p.is_relative() && !base_dir.empty())
            p = base_dir / p;
        cfg.output = p.string();
    }

    // Builds the model once so that bad names, lengths and tables fail at parse time.
    (void)build_model(cfg.model, cfg.material());
    return cfg;
}

inline ScenarioConfig load_scenario(const std::string& path)
{
    boost::property_tree::ptree tree;
    try
    {
        boost::property_tree::ini_parser::read_ini(path, tree);
    }
    catch (const boost::property_tree::ini_parser_error& e)
    {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return parse_scenario(tree, std::filesystem::path(path).parent_path());
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

inline std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10e", v);
    return buf;
}

/// RFC 4180 field quoting.
inline std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char ch : s)
    {
        if (ch == '"')
            out += '"';
        out += ch;
    }
    return out + "\"";
}

inline const char* sweep_header =
    "L_natural,L_nm,F_per_area,F_ideal_ratio,delta_F,delta_rel,delta_rel_scaled,delta_L_eff,quad_err,status";

/// Force columns are natural units or SI (Pa, or N for a sphere) per `units`.
inline std::string sweep_csv(const std::vector<SweepPoint>& points, const UnitSystem& u, Units units)
{
    std::ostringstream os;
    os << sweep_header << "\r\n";
    for (const auto& p : points)
    {
        const ForceResult& r = p.result;
        ForceResult si = r;
        si.fill_si(u);
        const double f = units == Units::SI ? si.f_per_area_si : r.f_per_area;
        const double df = units == Units::SI ? si.delta_f_si : r.delta_f;
        const std::string status = p.converged ? "ok" : "failed: " + p.error;
        os << format_number(p.L) << ',' << format_number(u.length_to_si(p.L) / constants::nanometer) << ','
           << format_number(f) << ',' << format_number(r.f_ideal_ratio) << ',' << format_number(df) << ','
           << format_number(r.delta_rel) << ',' << format_number(r.delta_rel_scaled) << ','
           << format_number(effective_displacement(p.L, r.delta_rel)) << ',' << format_number(r.quadrature_error)
           << ',' << csv_field(status) << "\r\n";
    }
    return os.str();
}

inline std::uint64_t fnv1a64(std::string_view data)
{
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : data)
    {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline void write_file(const std::filesystem::path& path, const std::string& contents)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    f << contents;
    if (!f)
        throw std::runtime_error("write failed for '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// Figures
// ---------------------------------------------------------------------------

struct JelliumEntry
{
    double rs_bohr;
    double dperp0_bohr;
};

struct JelliumTable
{
    std::vector<JelliumEntry> rows;
    std::string provenance;
};

/**
 * Static jellium d_perp(0) per density: CSV (rs_bohr, dperp0_bohr) with a
 * mandatory "# provenance: ..." comment naming the source of the numbers.
 */
inline JelliumTable load_jellium_table(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open jellium table '" + path + "'");
    JelliumTable t;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line))
    {
        auto s = casimir::detail::trim(line);
        if (s.empty())
            continue;
        if (s.front() == '#')
        {
            s.remove_prefix(1);
            s = casimir::detail::trim(s);
            constexpr std::string_view tag = "provenance:";
            if (s.substr(0, tag.size()) == tag)
            {
                if (!t.provenance.empty())
                    t.provenance += ' ';
                t.provenance += std::string(casimir::detail::trim(s.substr(tag.size())));
            }
            continue;
        }
        const auto f = casimir::detail::split_csv(s);
        JelliumEntry e{};
        if (f.size() != 2 || !casimir::detail::parse_double(f[0], e.rs_bohr) ||
            !casimir::detail::parse_double(f[1], e.dperp0_bohr))
        {
            if (!header_seen && t.rows.empty())
            {
                header_seen = true;
                continue;
            }
            throw ConfigError("jellium table '" + path + "': malformed row '" + std::string(s) + "'");
        }
        if (!(e.rs_bohr > 0.0))
            throw ConfigError("jellium table '" + path + "': rs must be positive");
        t.rows.push_back(e);
    }
    if (t.rows.empty())
        throw ConfigError("jellium table '" + path + "' has no rows");
    if (t.provenance.empty())
        throw ConfigError("jellium table '" + path + "' lacks a '# provenance:' line");
    return t;
}

struct FigureRequest
{
    std::string figure = "fig1";  // fig1 | fig2
    double rs_angstrom = 1.59;
    double tau_rel = 400.0;
    GridSpec grid;
    double rel_tol = 1e-6;
    /// Sphere radius for curve e, natural units.
    double sphere_radius = 1e4;
    std::string jellium_table;
    unsigned threads = 0;

    nlohmann::json parameters() const
    {
        nlohmann::json j;
        j["figure"] = figure;
        j["rs_angstrom"] = rs_angstrom;
        j["tau_rel"] = std::isfinite(tau_rel) ? nlohmann::json(tau_rel) : nlohmann::json("inf");
        j["grid"] = {{"min", grid.min}, {"max", grid.max}, {"points", grid.points},
                     {"spacing", grid.log ? "log" : "linear"}};
        j["rel_tol"] = rel_tol;
        if (figure == "fig1")
            j["sphere_radius"] = sphere_radius;
        if (figure == "fig2")
            j["jellium_table"] = jellium_table;
        return j;
    }

    static FigureRequest from_parameters(const nlohmann::json& j)
    {
        FigureRequest r;
        try
        {
            r.figure = j.at("figure").get<std::string>();
            r.rs_angstrom = j.at("rs_angstrom").get<double>();
            const auto& tau = j.at("tau_rel");
            r.tau_rel = tau.is_string() ? parse_tau_rel(tau.get<std::string>()) : tau.get<double>();
            const auto& g = j.at("grid");
            r.grid.min = g.at("min").get<double>();
            r.grid.max = g.at("max").get<double>();
            r.grid.points = g.at("points").get<std::size_t>();
            r.grid.log = g.at("spacing").get<std::string>() == "log";
            r.rel_tol = j.at("rel_tol").get<double>();
            if (j.contains("sphere_radius"))
                r.sphere_radius = j.at("sphere_radius").get<double>();
            if (j.contains("jellium_table"))
                r.jellium_table = j.at("jellium_table").get<std::string>();
        }
        catch (const nlohmann::json::exception& e)
        {
            throw ConfigError(std::string("manifest: ") + e.what());
        }
        return r;
    }
};

struct Curve
{
    std::string file;
    std::string label;
    ModelSpec spec;
};

inline std::vector<Curve> figure_curves(const FigureRequest& req, std::string* provenance = nullptr)
{
    std::vector<Curve> curves;
    if (req.figure == "fig1")
    {
        const Material au = material_from_rs(req.rs_angstrom * constants::angstrom, req.tau_rel);
        auto make = [&](Method method, DPerpModel d, std::optional<double> R) {
            ModelSpec s;
            s.method = method;
            s.material = au;
            s.dperp = std::move(d);
            s.sphere_radius = R;
            return s;
        };
        curves.push_back({"fig1_a.csv", "exact hydrodynamic amplitudes", make(Method::ExactHydro, {}, {})});
        curves.push_back({"fig1_b.csv", "retarded d_perp, dynamic", make(Method::DPerpLinear, HydroDynamicDPerp{}, {})});
        curves.push_back({"fig1_c.csv", "retarded d_perp, static",
                          make(Method::DPerpLinear, StaticDPerp{hydro_static_dperp(au)}, {})});
        curves.push_back({"fig1_d.csv", "non-retarded d_perp, dynamic",
                          make(Method::DPerpNonRetarded, HydroDynamicDPerp{}, {})});
        curves.push_back({"fig1_e.csv", "sphere-plate (PFA), retarded d_perp, dynamic",
                          make(Method::DPerpLinear, HydroDynamicDPerp{}, req.sphere_radius)});
    }
    else if (req.figure == "fig2")
    {
        if (req.jellium_table.empty())
            throw ConfigError("fig2 needs a jellium d_perp(0) table (--jellium-table)");
        const JelliumTable table = load_jellium_table(req.jellium_table);
        if (provenance)
            *provenance = table.provenance;
        for (const auto& row : table.rows)
        {
            ModelSpec s;
            s.method = Method::DPerpLinear;
            s.material = material_from_rs(row.rs_bohr * constants::bohr_radius, req.tau_rel);
            const double d = s.material.units().length_to_natural(row.dperp0_bohr * constants::bohr_radius);
            s.dperp = StaticDPerp{d};
            std::ostringstream name;
            name << "fig2_rs" << row.rs_bohr << ".csv";
            std::ostringstream label;
            label << "jellium rs = " << row.rs_bohr << " a_B, d_perp(0) = " << row.dperp0_bohr << " a_B";
            curves.push_back({name.str(), label.str(), s});
        }
    }
    else
        throw ConfigError("unknown figure '" + req.figure + "' (expected fig1 or fig2)");
    return curves;
}

inline std::string figure_csv(const std::vector<SweepPoint>& points)
{
    std::ostringstream os;
    os << "L_natural,minus_delta_rel,delta_rel_scaled\r\n";
    for (const auto& p : points)
        os << format_number(p.L) << ',' << format_number(-p.result.delta_rel) << ','
           << format_number(p.result.delta_rel_scaled) << "\r\n";
    return os.str();
}

/// Compute every curve of a figure into out_dir and write manifest.json. Returns an exit status.
inline int run_figures(const FigureRequest& req, const std::filesystem::path& out_dir, std::ostream& log)
{
    const auto start = std::chrono::steady_clock::now();
    req.grid.validate();
    if (!(req.rel_tol > 0.0))
        throw ConfigError("rel_tol must be positive");
    std::string provenance;
    const auto curves = figure_curves(req, &provenance);
    const auto grid = req.grid.values();
    IntegrationConfig cfg;
    cfg.rel_tol = req.rel_tol;

    std::vector<std::pair<std::string, std::string>> outputs;
    std::size_t failed = 0, total = 0;
    for (const auto& c : curves)
    {
        const auto points = sweep(grid, c.spec, cfg, req.threads);
        for (const auto& p : points)
        {
            ++total;
            if (!p.converged)
            {
                ++failed;
                log << c.file << ": L = " << p.L << ": " << p.error << "\n";
            }
        }
        outputs.emplace_back(c.file, figure_csv(points));
    }

    std::filesystem::create_directories(out_dir);
    nlohmann::json manifest;
    const nlohmann::json params = req.parameters();
    manifest["parameters"] = params;
    manifest["config_hash"] = hex64(fnv1a64(params.dump()));
    manifest["tolerances"] = {{"rel_tol", req.rel_tol}, {"inner_rel_tol", req.rel_tol / 10.0}};
    manifest["curves"] = nlohmann::json::array();
    for (std::size_t i = 0; i < curves.size(); ++i)
        manifest["curves"].push_back({{"file", curves[i].file}, {"label", curves[i].label}});
    if (!provenance.empty())
        manifest["jellium_provenance"] = provenance;
    manifest["failed_points"] = failed;
    for (const auto& [file, text] : outputs)
        write_file(out_dir / file, text);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    manifest["runtime_seconds"] = seconds;
    write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
    log << "wrote " << outputs.size() << " curves to " << out_dir.string() << " in " << seconds << " s\n";
    return 10 * failed > total ? exit_convergence : exit_ok;
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

inline void print_report(std::ostream& out, const ModelOptions& model, const ModelSpec& spec, double L,
                         const ForceResult& r, Units units)
{
    const UnitSystem u = spec.material.units();
    ForceResult si = r;
    si.fill_si(u);
    const bool sphere = r.is_sphere();
    const bool correction = spec.method != Method::Ideal && spec.method != Method::LocalDrude;
    auto line = [&](const std::string& key, const std::string& value) {
        out << key << std::string(key.size() < 20 ? 20 - key.size() : 1, ' ') << value << "\n";
    };
    line("model", model.name + (model.nonretarded ? " (non-retarded)" : ""));
    line("geometry", sphere ? "sphere-plate (PFA)" : "parallel plates");
    line("L_natural", format_number(L));
    line("L_nm", format_number(u.length_to_si(L) / constants::nanometer));
    if (sphere)
        line("R_natural", format_number(std::get<SpherePlate>(r.geometry).R));
    const std::string fkey = sphere ? "F" : "F_per_area";
    const std::string unit = units == Units::SI ? (sphere ? " N" : " Pa") : " (natural)";
    const double f = units == Units::SI ? si.f_per_area_si : r.f_per_area;
    const double df = units == Units::SI ? si.delta_f_si : r.delta_f;
    if (correction)
    {
        line(fkey + "_local", format_number(f) + unit);
        line(fkey + "_nonlocal", format_number(f + df) + unit);
    }
    else
        line(fkey, format_number(f) + unit);
    line("F_ideal_ratio", format_number(r.f_ideal_ratio));
    if (correction)
    {
        line("delta_F", format_number(df) + unit);
        line("delta_rel", format_number(r.delta_rel));
        line("minus_delta_rel", format_number(-r.delta_rel));
        line("delta_rel_scaled", format_number(r.delta_rel_scaled));
        const double dl = effective_displacement(L, r.delta_rel);
        line("delta_L_eff", units == Units::SI ? format_number(u.length_to_si(dl) / constants::nanometer) + " nm"
                                               : format_number(dl) + " (natural)");
    }
    line("quad_err", format_number(r.quadrature_error));
    line("evaluations", std::to_string(r.evaluations));
    if (r.perturbative_warning)
        line("warning", "d_perp correction factor exceeded the perturbative limit");
    if (r.pfa_warning)
        line("warning", "sphere radius below 10 L; proximity approximation questionable");
}

namespace detail {

inline void add_model_flags(CLI::App& app, ModelOptions& o)
{
    app.add_option("--model", o.name, "ideal | drude | hydro | dperp-hydro | dperp-static | dperp-table")
        ->check(CLI::IsMember(model_names()));
    app.add_flag("--nonretarded", o.nonretarded, "non-retarded d_perp theory (dperp-* models)");
    app.add_option("--dperp0", o.dperp0, "static d_perp (natural, or with unit suffix such as 0.5A)");
    app.add_option("--dperp-table", o.dperp_table, "CSV of (zeta_over_omega_p, d_perp_angstrom)")
        ->check(CLI::ExistingFile);
    app.add_flag("--extrapolate", o.extrapolate, "hold tabulated d_perp constant outside its range");
    app.add_option("--sphere-radius", o.sphere_radius, "sphere-plate geometry with this radius (PFA)");
}

}  // namespace detail

/**
 * Entry point shared by the executable and the tests. Exit status: 0 on
 * success, 2 for usage or configuration errors, 3 for convergence failures.
 */
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Casimir force between metal plates with nonlocal surface corrections", "casimir"};
    app.require_subcommand(1);

    ModelOptions force_model;
    std::string rs_text = "1.59A", tau_text = "400", L_text, units_text = "si", material_config;
    std::optional<double> tol;
    bool partial = false;
    std::size_t max_subdivisions = IntegrationConfig{}.max_subdivisions;
    auto* force = app.add_subcommand("force", "evaluate the force at one separation");
    detail::add_model_flags(*force, force_model);
    force->add_option("--rs", rs_text, "density parameter (1.59A, 3a0; bare numbers are angstrom)");
    force->add_option("--tau", tau_text, "omega_p * tau, or 'inf'");
    force->add_option("--material", material_config, "material key/value file (overrides --rs/--tau)")
        ->check(CLI::ExistingFile);
    force->add_option("--L", L_text, "separation (natural c/omega_p, or 60nm, 1um, ...)")->required();
    force->add_option("--tol", tol, "relative quadrature tolerance (default 1e-8 forces, 1e-6 corrections)");
    force->add_option("--units", units_text, "report units: si | natural");
    force->add_option("--max-subdivisions", max_subdivisions, "adaptive subdivision budget per 1D integral")
        ->check(CLI::PositiveNumber);
    force->add_flag("--partial", partial, "print the partial estimate when quadrature does not converge");

    std::string sweep_config, sweep_output;
    auto* sweep_cmd = app.add_subcommand("sweep", "evaluate a separation grid from a config file");
    sweep_cmd->add_option("config", sweep_config, "INI scenario file")->required()->check(CLI::ExistingFile);
    sweep_cmd->add_option("-o,--output", sweep_output, "CSV path (default: config [output] csv, else stdout)");

    FigureRequest fig;
    std::string fig_out = "figures", manifest_path;
    bool linear_grid = false;
    auto* figures = app.add_subcommand("figures", "reproduce the nonlocal-correction figures as CSV");
    figures->add_option("which", fig.figure, "fig1 | fig2")->check(CLI::IsMember({"fig1", "fig2"}));
    figures->add_option("-o,--out", fig_out, "output directory");
    figures->add_option("--jellium-table", fig.jellium_table, "CSV of (rs_bohr, dperp0_bohr) with provenance");
    figures->add_option("--rs", fig.rs_angstrom, "fig1 density parameter in angstrom");
    figures->add_option("--tau", fig.tau_rel, "omega_p * tau");
    figures->add_option("--min", fig.grid.min, "smallest L omega_p / c");
    figures->add_option("--max", fig.grid.max, "largest L omega_p / c");
    figures->add_option("--points", fig.grid.points, "grid points");
    figures->add_flag("--linear", linear_grid, "linear instead of logarithmic grid");
    figures->add_option("--tol", fig.rel_tol, "relative quadrature tolerance");
    figures->add_option("--sphere-radius", fig.sphere_radius, "sphere radius of curve e, natural units");
    figures->add_option("--threads", fig.threads, "worker threads (default CASIMIR_SCREEN_THREADS or all cores)");
    figures->add_option("--from-manifest", manifest_path, "re-run the parameters recorded in a manifest")
        ->check(CLI::ExistingFile);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try
    {
        app.parse(reversed);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try
    {
        if (*force)
        {
            const Units units = parse_units(units_text);
            Material m = material_config.empty() ? material_from_rs(parse_rs(rs_text), parse_tau_rel(tau_text))
                                                 : load_material_config(material_config);
            const ModelSpec spec = build_model(force_model, m);
            const double L = parse_length(L_text, m.units());
            if (!(L > 0.0))
                throw ConfigError("--L must be positive");
            IntegrationConfig cfg;
            cfg.rel_tol = tol.value_or(default_rel_tol(spec.method));
            cfg.max_subdivisions = max_subdivisions;
            try
            {
                cfg.validate();
            }
            catch (const std::invalid_argument& e)
            {
                throw ConfigError(std::string("--tol: ") + e.what());
            }
            try
            {
                print_report(out, force_model, spec, L, evaluate(spec, L, cfg), units);
            }
            catch (const ConvergenceError& e)
            {
                err << "error: " << e.what() << "\n";
                if (partial)
                    out << "partial_estimate    " << format_number(e.partial().value) << " (natural)\n"
                        << "partial_abs_error   " << format_number(e.partial().abs_error_estimate) << "\n";
                return exit_convergence;
            }
            return exit_ok;
        }
        if (*sweep_cmd)
        {
            const ScenarioConfig sc = load_scenario(sweep_config);
            const Material m = sc.material();
            const ModelSpec spec = build_model(sc.model, m);
            IntegrationConfig cfg;
            cfg.rel_tol = sc.rel_tol.value_or(default_rel_tol(spec.method));
            const auto points = sweep(sc.grid.values(), spec, cfg);
            const std::string csv = sweep_csv(points, m.units(), sc.units);
            std::size_t failed = 0;
            for (const auto& p : points)
                failed += p.converged ? 0 : 1;
            const std::string target = !sweep_output.empty() ? sweep_output : sc.output.value_or("");
            if (target.empty())
                out << csv;
            else
                write_file(target, csv);
            if (failed)
                err << failed << " of " << points.size() << " points did not converge\n";
            return 10 * failed > points.size() ? exit_convergence : exit_ok;
        }
        if (*figures)
        {
            FigureRequest req = fig;
            if (!manifest_path.empty())
            {
                std::ifstream in(manifest_path);
                nlohmann::json j;
                try
                {
                    in >> j;
                }
                catch (const nlohmann::json::exception& e)
                {
                    throw ConfigError(std::string("manifest: ") + e.what());
                }
                req = FigureRequest::from_parameters(j.at("parameters"));
                req.threads = fig.threads;
            }
            else
                req.grid.log = !linear_grid;
            return run_figures(req, fig_out, err);
        }
    }
    catch (const ConfigError& e)
    {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }
    catch (const std::domain_error& e)
    {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }
    catch (const std::invalid_argument& e)
    {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }
    catch (const std::exception& e)
    {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_usage;
}

}  // namespace casimir::scenario
