#include <charconv>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "pauliflow/cli.hpp"

namespace pauliflow {

namespace {

void put(std::ostream& out, const std::optional<double>& value)
{
    out << ',';
    if (value) {
        out << format_double(*value);
    }
}

std::optional<double> read_cell(std::string_view cell, std::size_t line)
{
    if (cell.empty()) {
        return std::nullopt;
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw IoError("csv line " + std::to_string(line) + ": bad number '" + std::string(cell) + "'");
    }
    return value;
}

} // namespace

std::string format_double(double value)
{
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

void write_sweep_csv(const SweepResult& result, std::ostream& out)
{
    out << kSweepHeader << '\n';
    for (const auto& row : result.rows) {
        out << format_double(row.abscissa);
        put(out, row.values.v_exact);
        put(out, row.values.v_factorized);
        put(out, row.values.v_independent);
        put(out, row.values.density);
        put(out, row.values.principal);
        put(out, row.values.spurious);
        out << '\n';
    }
}

void emit_csv(const SweepResult& result, const std::filesystem::path& destination)
{
    std::ofstream file(destination, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw IoError("cannot open " + destination.string() + " for writing");
    }
    write_sweep_csv(result, file);
    file.flush();
    if (!file) {
        throw IoError("write failed: " + destination.string());
    }
}

std::vector<SweepRow> parse_sweep_csv(std::string_view text)
{
    std::vector<SweepRow> rows;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        const std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (line_no == 1) {
            if (line != kSweepHeader) {
                throw IoError("csv line 1: unexpected header");
            }
            continue;
        }
        std::vector<std::string_view> cells;
        std::size_t from = 0;
        while (true) {
            const std::size_t comma = line.find(',', from);
            cells.push_back(line.substr(from, comma == std::string_view::npos ? std::string_view::npos : comma - from));
            if (comma == std::string_view::npos) {
                break;
            }
            from = comma + 1;
        }
        if (cells.size() != 7) {
            throw IoError("csv line " + std::to_string(line_no) + ": expected 7 cells");
        }
        const auto abscissa = read_cell(cells[0], line_no);
        if (!abscissa) {
            throw IoError("csv line " + std::to_string(line_no) + ": empty abscissa");
        }
        SweepRow row;
        row.abscissa = *abscissa;
        row.values.v_exact = read_cell(cells[1], line_no);
        row.values.v_factorized = read_cell(cells[2], line_no);
        row.values.v_independent = read_cell(cells[3], line_no);
        row.values.density = read_cell(cells[4], line_no);
        row.values.principal = read_cell(cells[5], line_no);
        row.values.spurious = read_cell(cells[6], line_no);
        rows.push_back(row);
    }
    if (line_no == 0) {
        throw IoError("csv: empty input");
    }
    return rows;
}

void write_trajectory_csv(const TrajectorySet& set, std::ostream& out)
{
    out << "t_s";
    for (std::size_t i = 0; i < set.paths.size(); ++i) {
        out << ",x" << i + 1 << "_m";
    }
    out << '\n';
    for (std::size_t k = 0; k < set.times.size(); ++k) {
        out << format_double(set.times[k]);
        for (const auto& path : set.paths) {
            out << ',' << format_double(path[k]);
        }
        out << '\n';
    }
}

} // namespace pauliflow
