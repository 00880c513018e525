#include "nsmp/io.hpp"

#include <cerrno>
#include <cstdlib>
#include <sstream>

#include <fmt/format.h>

namespace nsmp {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(s);
    while (std::getline(in, cell, sep)) out.push_back(trim(cell));
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

}  // namespace

std::string format_real(double x) { return fmt::format("{:.17g}", x); }

double parse_real(const std::string& text, const std::string& what) {
    const std::string t = trim(text);
    if (t.empty()) throw InputError(fmt::format("{}: expected a number, got an empty value", what));
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || errno == ERANGE)
        throw InputError(fmt::format("{}: '{}' is not a number", what, t));
    return v;
}

int parse_int(const std::string& text, const std::string& what) {
    const std::string t = trim(text);
    char* end = nullptr;
    errno = 0;
    const long v = std::strtol(t.c_str(), &end, 10);
    if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || v < -2147483647L || v > 2147483647L)
        throw InputError(fmt::format("{}: '{}' is not an integer", what, t));
    return static_cast<int>(v);
}

std::vector<double> parse_reals(const std::string& text, const std::string& what) {
    std::vector<double> out;
    for (const std::string& cell : split(text, ',')) out.push_back(parse_real(cell, what));
    if (out.empty()) throw InputError(fmt::format("{}: empty list", what));
    return out;
}

KeyValues KeyValues::parse(std::istream& in, const std::string& source) {
    KeyValues kv;
    kv.source_ = source;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InputError(fmt::format("{}:{}: expected key = value", source, lineno));
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw InputError(fmt::format("{}:{}: empty key", source, lineno));
        if (kv.entries_.count(key)) throw InputError(fmt::format("{}:{}: duplicate key '{}'", source, lineno, key));
        kv.entries_[key] = trim(line.substr(eq + 1));
    }
    return kv;
}

KeyValues KeyValues::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError(fmt::format("cannot open '{}'", path.string()));
    return parse(in, path.string());
}

const std::string& KeyValues::text(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw InputError(fmt::format("{}: missing key '{}'", source_, key));
    return it->second;
}

double KeyValues::real(const std::string& key) const { return parse_real(text(key), source_ + ": " + key); }
double KeyValues::real(const std::string& key, double fallback) const { return has(key) ? real(key) : fallback; }
int KeyValues::integer(const std::string& key) const { return parse_int(text(key), source_ + ": " + key); }
int KeyValues::integer(const std::string& key, int fallback) const { return has(key) ? integer(key) : fallback; }
std::vector<double> KeyValues::reals(const std::string& key) const { return parse_reals(text(key), source_ + ": " + key); }

void KeyValues::require_known(const std::vector<std::string>& allowed) const {
    for (const auto& [key, value] : entries_) {
        bool ok = false;
        for (const auto& a : allowed) ok = ok || a == key;
        if (!ok) throw InputError(fmt::format("{}: unknown key '{}'", source_, key));
    }
}

void KeyValues::write(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw InputError(fmt::format("cannot write '{}'", path.string()));
    for (const auto& [key, value] : entries_) out << key << " = " << value << '\n';
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> header)
    : out_(path), columns_(header.size()) {
    if (!out_) throw InputError(fmt::format("cannot write '{}'", path.string()));
    out_ << fmt::format("{}\n", fmt::join(header, ","));
}

void CsvWriter::row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_real(v));
    row(cells);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_)
        throw std::logic_error(fmt::format("CsvWriter: {} cells for {} columns", cells.size(), columns_));
    out_ << fmt::format("{}\n", fmt::join(cells, ","));
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw InputError(fmt::format("missing CSV column '{}'", name));
}

double CsvTable::real(std::size_t row, const std::string& name) const {
    return parse_real(rows.at(row).at(column(name)), name);
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError(fmt::format("cannot open '{}'", path.string()));
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw InputError(fmt::format("'{}' is empty", path.string()));
    t.header = split(line, ',');
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        auto cells = split(line, ',');
        if (cells.size() != t.header.size())
            throw InputError(fmt::format("'{}': row with {} cells for {} columns", path.string(), cells.size(),
                                         t.header.size()));
        t.rows.push_back(std::move(cells));
    }
    return t;
}

}  // namespace nsmp
