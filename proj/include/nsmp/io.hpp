#ifndef NSMP_IO_HPP
#define NSMP_IO_HPP

#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace nsmp {

/// Malformed or missing input (problem files, stored runs, flags).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest text that parses back to the same double ("%.17g").
std::string format_real(double x);
/// Parses a whole string as a double; throws InputError naming what.
double parse_real(const std::string& text, const std::string& what);
int parse_int(const std::string& text, const std::string& what);
/// Comma-separated reals.
std::vector<double> parse_reals(const std::string& text, const std::string& what);

/**
 * Plain key = value file. '#' starts a comment; blank lines are skipped;
 * keys are unique.
 */
class KeyValues {
public:
    static KeyValues parse(std::istream& in, const std::string& source);
    static KeyValues load(const std::filesystem::path& path);

    bool has(const std::string& key) const { return entries_.count(key) > 0; }
    const std::string& text(const std::string& key) const;
    double real(const std::string& key) const;
    double real(const std::string& key, double fallback) const;
    int integer(const std::string& key) const;
    int integer(const std::string& key, int fallback) const;
    std::vector<double> reals(const std::string& key) const;

    void set(const std::string& key, const std::string& value) { entries_[key] = value; }
    void set(const std::string& key, double value) { entries_[key] = format_real(value); }
    /// Throws InputError on any key outside the allowed list.
    void require_known(const std::vector<std::string>& allowed) const;
    void write(const std::filesystem::path& path) const;

    const std::map<std::string, std::string>& entries() const { return entries_; }
    const std::string& source() const { return source_; }

private:
    std::map<std::string, std::string> entries_;
    std::string source_;
};

/// CSV with a fixed header; numbers are written with format_real.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);
    void row(const std::vector<double>& values);
    void row(const std::vector<std::string>& cells);

private:
    std::ofstream out_;
    std::size_t columns_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a header column; throws InputError when absent.
    std::size_t column(const std::string& name) const;
    double real(std::size_t row, const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace nsmp

#endif
