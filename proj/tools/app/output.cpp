#include "output.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <openssl/evp.h>

#include <json.hpp>

#include <kgds/error.hpp>
#include <kgds/version.hpp>

namespace kgds::app {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : columns_(header.size()) {
    for (std::size_t k = 0; k < header.size(); ++k) text_ += (k ? "," : "") + header[k];
    text_ += '\n';
}

void CsvTable::add(const std::vector<double>& row) {
    if (row.size() != columns_) fail(ErrorKind::InvalidParams, "CSV row width does not match the header");
    for (std::size_t k = 0; k < row.size(); ++k) {
        if (k) text_ += ',';
        text_ += format_double(row[k]);
    }
    text_ += '\n';
    ++rows_;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::IoError, "cannot open '" + path + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.close();
    if (!out) fail(ErrorKind::IoError, "write to '" + path + "' failed");
}

std::string sha256_hex(const std::string& data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
        fail(ErrorKind::IoError, "SHA-256 digest failed");
    std::string hex;
    char byte[3];
    for (unsigned int k = 0; k < len; ++k) {
        std::snprintf(byte, sizeof byte, "%02x", md[k]);
        hex += byte;
    }
    return hex;
}

void write_manifest(const std::string& path, const Manifest& m) {
    nlohmann::ordered_json j;
    j["command"] = m.command;
    j["config_hash"] = m.config_hash;
    j["version"] = kVersion;
    j["rng_seed"] = m.rng_seed;
    j["wall_time_s"] = m.wall_time_s;
    j["artifacts"] = m.artifacts;
    write_text_file(path, j.dump(2) + "\n");
}

}  // namespace kgds::app
