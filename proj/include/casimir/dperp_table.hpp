// Tabulated d_perp(i zeta) data and its CSV ingestion.

#pragma once

#include <algorithm>
#include <charconv>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "casimir/material.hpp"

namespace casimir {

/**
 * d_perp sampled on the imaginary frequency axis. zeta is in units of
 * omega_p and d_perp in units of c / omega_p. Interpolation is monotone
 * piecewise cubic Hermite (PCHIP slopes), which reduces to linear
 * for two nodes. Outside the grid the table either throws std::out_of_range
 * (default) or holds the end value constant.
 */
class DPerpTable
{
public:
    DPerpTable(std::vector<double> zeta, std::vector<double> d_perp, bool extrapolate = false)
        : zeta_(std::move(zeta)), d_perp_(std::move(d_perp)), extrapolate_(extrapolate)
    {
        if (zeta_.size() != d_perp_.size())
            throw std::invalid_argument("DPerpTable: column length mismatch");
        if (zeta_.size() < 2)
            throw std::invalid_argument("DPerpTable: need at least two rows");
        for (std::size_t i = 0; i < zeta_.size(); ++i)
        {
            if (!std::isfinite(zeta_[i]) || !std::isfinite(d_perp_[i]) || zeta_[i] < 0.0)
                throw std::invalid_argument("DPerpTable: non-finite or negative entry");
            if (i > 0 && !(zeta_[i] > zeta_[i - 1]))
                throw std::invalid_argument("DPerpTable: zeta grid must be strictly increasing");
        }
        slopes_ = fritsch_carlson_slopes(zeta_, d_perp_);
    }

    bool extrapolates() const { return extrapolate_; }
    DPerpTable with_extrapolation(bool on) const { return DPerpTable(zeta_, d_perp_, on); }

    const std::vector<double>& zeta() const { return zeta_; }
    const std::vector<double>& d_perp() const { return d_perp_; }

    double operator()(double zeta) const
    {
        if (zeta < zeta_.front() || zeta > zeta_.back())
        {
            if (!extrapolate_)
                throw std::out_of_range("DPerpTable: zeta outside tabulated range");
            return zeta < zeta_.front() ? d_perp_.front() : d_perp_.back();
        }
        const auto hi = std::upper_bound(zeta_.begin(), zeta_.end(), zeta);
        const std::size_t j = std::min<std::size_t>(hi - zeta_.begin(), zeta_.size() - 1);
        const std::size_t i = j - 1;
        const double h = zeta_[j] - zeta_[i];
        const double t = (zeta - zeta_[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * d_perp_[i] + (t3 - 2 * t2 + t) * h * slopes_[i] +
               (-2 * t3 + 3 * t2) * d_perp_[j] + (t3 - t2) * h * slopes_[j];
    }

private:
    static std::vector<double> fritsch_carlson_slopes(const std::vector<double>& x, const std::vector<double>& y)
    {
        const std::size_t n = x.size();
        std::vector<double> delta(n - 1), m(n);
        for (std::size_t k = 0; k + 1 < n; ++k)
            delta[k] = (y[k + 1] - y[k]) / (x[k + 1] - x[k]);
        m.front() = delta.front();
        m.back() = delta.back();
        for (std::size_t k = 1; k + 1 < n; ++k)
        {
            if (delta[k - 1] * delta[k] <= 0.0)
            {
                m[k] = 0.0;
                continue;
            }
            // Weighted harmonic mean keeps each cubic piece monotone.
            const double h0 = x[k] - x[k - 1], h1 = x[k + 1] - x[k];
            const double w1 = 2 * h1 + h0, w2 = h1 + 2 * h0;
            m[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
        }
        return m;
    }

    std::vector<double> zeta_;
    std::vector<double> d_perp_;
    bool extrapolate_;
    std::vector<double> slopes_;
};

namespace detail {

inline std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline bool parse_double(std::string_view s, double& out)
{
    s = trim(s);
    if (!s.empty() && s.front() == '+')
        s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

/// Split one CSV record on commas; supports double-quoted fields.
inline std::vector<std::string> split_csv(std::string_view line)
{
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i)
    {
        const char ch = line[i];
        if (quoted)
        {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"')
            {
                field += '"';
                ++i;
            }
            else if (ch == '"')
                quoted = false;
            else
                field += ch;
        }
        else if (ch == '"')
            quoted = true;
        else if (ch == ',')
        {
            out.push_back(std::string(trim(field)));
            field.clear();
        }
        else
            field += ch;
    }
    out.push_back(std::string(trim(field)));
    return out;
}

}  // namespace detail

/**
 * Read a two-column CSV (zeta_over_omega_p, d_perp_angstrom). Lines starting
 * with '#' and blank lines are skipped, as is a single non-numeric header
 * row. Lengths are converted to c / omega_p of the given material.
 */
inline DPerpTable load_dperp_csv(const std::string& path, const Material& m, bool extrapolate = false)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open d_perp table '" + path + "'");

    const double angstrom_natural = m.units().length_to_natural(constants::angstrom);
    std::vector<double> zeta, d;
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line))
    {
        ++lineno;
        const auto t = detail::trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        const auto fields = detail::split_csv(t);
        double z = 0.0, v = 0.0;
        if (fields.size() != 2 || !detail::parse_double(fields[0], z) || !detail::parse_double(fields[1], v))
        {
            if (!header_seen && zeta.empty() && fields.size() == 2)
            {
                header_seen = true;
                continue;
            }
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected two numeric columns");
        }
        zeta.push_back(z);
        d.push_back(v * angstrom_natural);
    }
    return DPerpTable(std::move(zeta), std::move(d), extrapolate);
}

}  // namespace casimir
