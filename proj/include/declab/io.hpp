// io.hpp — deterministic text output helpers
#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace declab {

// shortest round-trip decimal representation; stable across runs
std::string format_double(double v);

// write-to-temporary then rename, so readers never observe partial files
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(const std::vector<std::string>& cells);
    void add_row(const std::vector<double>& values);
    std::string str() const;
    void write(const std::filesystem::path& path) const { write_text_atomic(path, str()); }

private:
    std::vector<std::string> header_;
    std::vector<std::string> rows_;
};

} // namespace declab
