#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "spdc/errors.hpp"
#include "spdc/grid.hpp"
#include "spdc/jsa.hpp"

namespace spdc {

/// One frequency-resolved coincidence measurement.
struct JsiRecord {
    double signal_detuning_ghz = 0.0;
    double idler_detuning_ghz = 0.0;
    std::uint64_t counts = 0;
};

/// Complete grid of coincidence counts; rows are signal bins, columns idler bins.
struct JsiGrid {
    FrequencyGrid grid;
    RealMatrix counts;
    double total_counts = 0.0;
    double background = 0.0;  // counts per bin removed so far
};

struct JsiParseOptions {
    double signal_center_nm = 1555.1;
    double idler_center_nm = 1547.1;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

inline double parse_double_field(std::string_view field, std::size_t row, const char* name) {
    double value = 0.0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (field.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw ParseError(row, std::string("malformed ") + name + " '" + std::string(field) + "'");
    }
    return value;
}

inline std::uint64_t parse_counts_field(std::string_view field, std::size_t row) {
    if (!field.empty() && field.front() == '-') {
        throw ParseError(row, "negative counts '" + std::string(field) + "'");
    }
    std::uint64_t value = 0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (field.empty() || ec != std::errc() || ptr != end) {
        throw ParseError(row, "counts must be a non-negative integer, got '" + std::string(field) + "'");
    }
    return value;
}

inline std::string format_pair(double s, double i) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "(%.12g, %.12g)", s, i);
    return buf;
}

}  // namespace detail

/// Parses long-format CSV with the mandatory header `nu_s_GHz,nu_i_GHz,counts`.
///
/// Blank lines are skipped. Every (nu_s, nu_i) combination of the two axes must appear exactly
/// once and both axes must be uniformly spaced.
inline JsiGrid parse_jsi(std::istream& in, const JsiParseOptions& options = {}) {
    std::string line;
    std::size_t row = 0;
    bool have_header = false;
    std::vector<JsiRecord> records;
    std::vector<std::size_t> record_rows;
    while (std::getline(in, line)) {
        ++row;
        std::string_view view = line;
        if (row == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
        if (detail::trim(view).empty()) continue;
        const auto fields = detail::split_commas(view);
        if (!have_header) {
            if (fields.size() != 3 || fields[0] != "nu_s_GHz" || fields[1] != "nu_i_GHz" ||
                fields[2] != "counts") {
                throw ParseError(row, "expected header 'nu_s_GHz,nu_i_GHz,counts'");
            }
            have_header = true;
            continue;
        }
        if (fields.size() != 3) {
            throw ParseError(row, "expected 3 fields, found " + std::to_string(fields.size()));
        }
        records.push_back({detail::parse_double_field(fields[0], row, "nu_s_GHz"),
                           detail::parse_double_field(fields[1], row, "nu_i_GHz"),
                           detail::parse_counts_field(fields[2], row)});
        record_rows.push_back(row);
    }
    if (!have_header && records.empty()) throw ParseError(0, "no records");
    if (records.empty()) throw ParseError(0, "no records");

    std::vector<double> s_axis, i_axis;
    for (const auto& r : records) {
        s_axis.push_back(r.signal_detuning_ghz);
        i_axis.push_back(r.idler_detuning_ghz);
    }
    for (auto* axis : {&s_axis, &i_axis}) {
        std::sort(axis->begin(), axis->end());
        axis->erase(std::unique(axis->begin(), axis->end()), axis->end());
    }

    std::optional<FrequencyGrid> grid;
    try {
        grid.emplace(options.signal_center_nm, options.idler_center_nm, s_axis, i_axis);
    } catch (const Error& e) {
        throw ParseError(0, std::string("ragged axes: ") + e.what());
    }

    const auto index_of = [](const std::vector<double>& axis, double v) {
        return static_cast<Eigen::Index>(std::lower_bound(axis.begin(), axis.end(), v) - axis.begin());
    };
    RealMatrix counts = RealMatrix::Constant(static_cast<Eigen::Index>(s_axis.size()),
                                             static_cast<Eigen::Index>(i_axis.size()), -1.0);
    double total = 0.0;
    for (std::size_t k = 0; k < records.size(); ++k) {
        const auto& r = records[k];
        const auto si = index_of(s_axis, r.signal_detuning_ghz);
        const auto ii = index_of(i_axis, r.idler_detuning_ghz);
        if (counts(si, ii) >= 0.0) {
            throw ParseError(record_rows[k], "duplicate cell " +
                                                 detail::format_pair(r.signal_detuning_ghz,
                                                                     r.idler_detuning_ghz));
        }
        counts(si, ii) = static_cast<double>(r.counts);
        total += static_cast<double>(r.counts);
    }
    std::vector<std::string> gaps;
    for (Eigen::Index a = 0; a < counts.rows(); ++a) {
        for (Eigen::Index b = 0; b < counts.cols(); ++b) {
            if (counts(a, b) < 0.0) {
                gaps.push_back(detail::format_pair(s_axis[static_cast<std::size_t>(a)],
                                                   i_axis[static_cast<std::size_t>(b)]));
            }
        }
    }
    if (!gaps.empty()) {
        std::string msg = std::to_string(gaps.size()) + " missing cell(s):";
        for (std::size_t k = 0; k < gaps.size() && k < 10; ++k) msg += " " + gaps[k];
        if (gaps.size() > 10) msg += " ...";
        throw ParseError(0, msg);
    }
    return JsiGrid{std::move(*grid), std::move(counts), total, 0.0};
}

inline JsiGrid parse_jsi(std::string_view text, const JsiParseOptions& options = {}) {
    std::istringstream in{std::string(text)};
    return parse_jsi(in, options);
}

inline void write_jsi_csv(std::ostream& os, const JsiGrid& g) {
    os << "nu_s_GHz,nu_i_GHz,counts\n";
    char line[96];
    for (std::size_t r = 0; r < g.grid.signal_size(); ++r) {
        for (std::size_t c = 0; c < g.grid.idler_size(); ++c) {
            std::snprintf(line, sizeof line, "%.12g,%.12g,%.0f\n", g.grid.signal()[r],
                          g.grid.idler()[c],
                          g.counts(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
            os << line;
        }
    }
}

struct BorderMedian {};
struct FixedBackground {
    double value = 0.0;
};
using BackgroundMethod = std::variant<BorderMedian, FixedBackground>;

/// Median of the cells on the outer edge of the grid.
inline double border_median(const RealMatrix& counts) {
    std::vector<double> edge;
    const auto rows = counts.rows(), cols = counts.cols();
    for (Eigen::Index c = 0; c < cols; ++c) {
        edge.push_back(counts(0, c));
        edge.push_back(counts(rows - 1, c));
    }
    for (Eigen::Index r = 1; r + 1 < rows; ++r) {
        edge.push_back(counts(r, 0));
        edge.push_back(counts(r, cols - 1));
    }
    std::sort(edge.begin(), edge.end());
    const std::size_t n = edge.size();
    return n % 2 == 1 ? edge[n / 2] : 0.5 * (edge[n / 2 - 1] + edge[n / 2]);
}

/// counts' = max(counts - b, 0); b accumulates into `background`.
inline JsiGrid subtract_background(const JsiGrid& g, const BackgroundMethod& method) {
    const double b = std::holds_alternative<BorderMedian>(method)
                         ? border_median(g.counts)
                         : std::get<FixedBackground>(method).value;
    if (!std::isfinite(b) || b < 0.0) throw InvalidParameter("background must be non-negative");
    JsiGrid out = g;
    out.counts = (g.counts.array() - b).cwiseMax(0.0).matrix();
    out.total_counts = out.counts.sum();
    out.background = g.background + b;
    return out;
}

/// S_ij = sqrt(counts_ij) with flat phase, normalized; provenance data (phase-blind).
inline JointSpectralAmplitude jsi_to_amplitude(const JsiGrid& g) {
    if (!(g.counts.maxCoeff() > 0.0)) throw DegenerateInput("JSI has no positive counts");
    if (g.counts.minCoeff() < 0.0) throw InvalidInput("JSI counts must be non-negative");
    ComplexMatrix values = g.counts.cwiseSqrt().cast<std::complex<double>>();
    return normalize(JointSpectralAmplitude(g.grid, std::move(values), Provenance::data));
}

/// Coincidence counts expected from `jsa`, scaled to `total_counts` in expectation, plus a flat
/// `background` per bin. With `seed` set, each bin is a Poisson draw; otherwise the expectation
/// is rounded.
inline JsiGrid synthesize_jsi(const JointSpectralAmplitude& jsa, double total_counts,
                              std::optional<std::uint64_t> seed, double background = 0.0) {
    if (!(total_counts > 0.0)) throw InvalidParameter("total counts must be positive");
    if (!(background >= 0.0)) throw InvalidParameter("background must be non-negative");
    const RealMatrix intensity = jsa.values().cwiseAbs2();
    const double sum = intensity.sum();
    if (!(sum > 0.0)) throw DegenerateInput("cannot synthesize counts from an all-zero amplitude");
    const RealMatrix expected = (intensity * (total_counts / sum)).array() + background;

    RealMatrix counts(expected.rows(), expected.cols());
    std::mt19937_64 rng(seed.value_or(0));
    for (Eigen::Index r = 0; r < counts.rows(); ++r) {
        for (Eigen::Index c = 0; c < counts.cols(); ++c) {
            const double mean = expected(r, c);
            if (!seed) {
                counts(r, c) = std::round(mean);
            } else if (mean > 0.0) {
                std::poisson_distribution<std::uint64_t> draw(mean);
                counts(r, c) = static_cast<double>(draw(rng));
            } else {
                counts(r, c) = 0.0;
            }
        }
    }
    const double total = counts.sum();
    return JsiGrid{jsa.grid(), std::move(counts), total, 0.0};
}

}  // namespace spdc
