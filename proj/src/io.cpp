#include "qbm/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "qbm/config.hpp"
#include "qbm/core.hpp"

namespace qbm {

CsvWriter::CsvWriter(const std::string& path) {
    FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw ValidationError("out", "cannot open for writing: " + path);
    file_ = f;
}

CsvWriter::~CsvWriter() {
    if (file_) std::fclose(static_cast<FILE*>(file_));
}

void CsvWriter::meta(const std::vector<std::pair<std::string, std::string>>& kv) {
    FILE* f = static_cast<FILE*>(file_);
    std::fputs("# meta:", f);
    for (const auto& [k, v] : kv) std::fprintf(f, " %s=%s", k.c_str(), v.c_str());
    std::fputc('\n', f);
}

void CsvWriter::header(const std::vector<std::string>& columns) {
    FILE* f = static_cast<FILE*>(file_);
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) std::fputc(',', f);
        std::fputs(columns[i].c_str(), f);
    }
    std::fputc('\n', f);
}

void CsvWriter::row(const std::vector<double>& values) {
    FILE* f = static_cast<FILE*>(file_);
    char buf[40];
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) std::fputc(',', f);
        std::snprintf(buf, sizeof(buf), "%.17g", values[i]);
        std::fputs(buf, f);
    }
    std::fputc('\n', f);
}

void CsvWriter::raw_line(const std::string& line) {
    FILE* f = static_cast<FILE*>(file_);
    std::fputs(line.c_str(), f);
    std::fputc('\n', f);
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("file", "cannot open: " + path);
    CsvTable table;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.rfind("# meta:", 0) == 0) {
            std::istringstream ms(line.substr(7));
            std::string tok;
            while (ms >> tok) {
                const auto eq = tok.find('=');
                if (eq != std::string::npos)
                    table.meta.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
            }
            continue;
        }
        if (line[0] == '#') continue;
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!have_header) {
            table.columns = cells;
            have_header = true;
            continue;
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) row.push_back(std::strtod(c.c_str(), nullptr));
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace qbm
