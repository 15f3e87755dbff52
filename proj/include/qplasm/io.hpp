#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qplasm/errors.hpp"

namespace qplasm::cli {

// A rectangular table destined for CSV. Numbers are rendered with 17
// significant digits so emitted files round-trip bit-exactly.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    // optional per-row leading string cell (e.g. catalog entry names)
    std::vector<std::string> row_labels;
    std::string label_header;

    bool labeled() const { return !label_header.empty(); }
};

inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline std::string to_csv(const Table& t) {
    std::ostringstream out;
    bool first = true;
    if (t.labeled()) {
        out << t.label_header;
        first = false;
    }
    for (const auto& h : t.header) {
        if (!first) out << ',';
        out << h;
        first = false;
    }
    out << '\n';
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        first = true;
        if (t.labeled()) {
            out << t.row_labels[r];
            first = false;
        }
        for (double v : t.rows[r]) {
            if (!first) out << ',';
            out << format_double(v);
            first = false;
        }
        out << '\n';
    }
    return out.str();
}

// Write-temp-then-rename so readers never observe a partial file.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw error("cannot open for writing: " + tmp.string());
        out << content;
        if (!out) throw error("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw error("rename failed: " + path.string() + ": " + ec.message());
}

struct CsvData {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> cells;
};

inline CsvData read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw error("cannot open CSV: " + path.string());
    CsvData data;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ss(line);
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (line.empty()) continue;
        if (first) {
            data.header = cells;
            first = false;
        } else {
            data.cells.push_back(cells);
        }
    }
    return data;
}

}  // namespace qplasm::cli
