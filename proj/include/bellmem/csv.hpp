// csv.hpp - shortest round-trip number formatting and a small CSV table with
// '#' comment header and footer blocks.

#pragma once

#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

namespace bellmem {

// Shortest decimal string that parses back to the same double.
inline std::string fmt_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) return std::signbit(x) ? "-0" : "0";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    if (res.ec != std::errc()) throw std::runtime_error("fmt_double: conversion failed");
    return std::string(buf, res.ptr);
}

struct CsvTable {
    std::vector<std::string> header;  // comment lines, without the leading '#'
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> footer;

    void add_row(const std::vector<double>& values) {
        std::vector<std::string> r;
        r.reserve(values.size());
        for (double v : values) r.push_back(fmt_double(v));
        add_row(std::move(r));
    }

    void add_row(std::vector<std::string> cells) {
        if (cells.size() != columns.size()) throw std::logic_error("CsvTable: row width differs from header");
        rows.push_back(std::move(cells));
    }

    void write(std::ostream& os) const {
        auto comment = [&](const std::string& s) { os << (s.empty() ? "#" : "# " + s) << '\n'; };
        for (const auto& h : header) comment(h);
        for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
        os << '\n';
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
            os << '\n';
        }
        for (const auto& f : footer) comment(f);
    }

    std::string str() const {
        std::ostringstream os;
        write(os);
        return os.str();
    }
};

}  // namespace bellmem
