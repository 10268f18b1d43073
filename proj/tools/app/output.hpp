#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace kgds::app {

// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

// Header plus rows of numbers; '.' decimal, '\n' line ends.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);
    void add(const std::vector<double>& row);
    std::size_t rows() const { return rows_; }
    std::string str() const { return text_; }

private:
    std::size_t columns_;
    std::size_t rows_ = 0;
    std::string text_;
};

// Throws IoError when the file cannot be written completely.
void write_text_file(const std::string& path, const std::string& text);

std::string sha256_hex(const std::string& data);

struct Manifest {
    std::string command;
    std::string config_hash;
    std::uint64_t rng_seed = 0;
    double wall_time_s = 0.0;
    std::vector<std::string> artifacts;
};

void write_manifest(const std::string& path, const Manifest& m);

}  // namespace kgds::app
