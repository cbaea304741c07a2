#pragma once

#include <string>
#include <utility>
#include <vector>

namespace qbm {

/// Deterministic CSV writer. Every file starts with a single
/// "# meta: key=value ..." line so outputs are self-describing and replayable.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void meta(const std::vector<std::pair<std::string, std::string>>& kv);
    void header(const std::vector<std::string>& columns);
    void row(const std::vector<double>& values);
    void raw_line(const std::string& line);

private:
    void* file_;
};

struct CsvTable {
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

CsvTable read_csv(const std::string& path);

}  // namespace qbm
