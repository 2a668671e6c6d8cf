#pragma once

#include <string>
#include <utility>
#include <vector>

namespace neqt {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

using Manifest = std::vector<std::pair<std::string, std::string>>;

/// "%.17g"
std::string format_number(double x);

std::string render_csv(const Table& table, const Manifest& manifest);

/// Writes the CSV and a gnuplot stub `<path minus .csv>.gp` next to it.
void emit_csv(const Table& table, const std::string& path, const Manifest& manifest = {});

/// Parses a file written by emit_csv; '#' lines are skipped.
Table read_csv(const std::string& path);

} // namespace neqt
