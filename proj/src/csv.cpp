#include "neqt/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace neqt {

std::string format_number(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

std::string quote(const std::string& field)
{
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string stem(const std::string& path)
{
    const auto dot = path.rfind('.');
    const auto slash = path.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path;
    return path.substr(0, dot);
}

std::string basename(const std::string& path)
{
    const auto slash = path.find_last_of('/');
    return slash == std::string::npos ? path : path.substr(slash + 1);
}

std::vector<std::string> split_fields(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace

std::string render_csv(const Table& table, const Manifest& manifest)
{
    std::ostringstream os;
    for (const auto& [key, value] : manifest) os << "# " << key << ": " << value << "\n";
    for (std::size_t i = 0; i < table.header.size(); ++i) os << (i ? "," : "") << quote(table.header[i]);
    os << "\n";
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size()) throw std::invalid_argument("table is not rectangular");
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
        os << "\n";
    }
    return os.str();
}

void emit_csv(const Table& table, const std::string& path, const Manifest& manifest)
{
    const std::string text = render_csv(table, manifest);
    {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path);
        out << text;
        if (!out) throw std::runtime_error("write failed for " + path);
    }
    const std::string gp = stem(path) + ".gp";
    std::ofstream script(gp);
    if (!script) throw std::runtime_error("cannot write " + gp);
    script << "set datafile separator \",\"\n"
           << "set datafile commentschars \"#\"\n"
           << "set key autotitle columnhead\n";
    if (table.header.size() >= 2) {
        script << "set xlabel \"" << table.header[0] << "\"\n";
        script << "plot ";
        for (std::size_t i = 1; i < table.header.size(); ++i)
            script << (i > 1 ? ", \\\n     " : "") << "\"" << basename(path) << "\" using 1:" << i + 1 << " with lines";
        script << "\n";
    }
}

Table read_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    Table t;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_fields(line);
        if (header) {
            t.header = fields;
            header = false;
            continue;
        }
        std::vector<double> row;
        for (const auto& f : fields) {
            double x = 0.0;
            auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), x);
            if (ec != std::errc()) throw std::runtime_error("bad number '" + f + "' in " + path);
            row.push_back(x);
        }
        t.rows.push_back(row);
    }
    return t;
}

} // namespace neqt
