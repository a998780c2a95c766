#pragma once

#include <charconv>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "hedgelab/errors.hpp"

namespace hedgelab::report {

/// Decimal rendering with 17 significant digits: enough to round-trip any
/// double, so downstream analysis never re-loses precision.
inline std::string fmt17(double v) {
    char buf[64];
    const auto res =
        std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

/// Row-oriented CSV assembly with an arity check per row. The body uses "\n"
/// separators and no trailing padding, so identical inputs give identical
/// bytes.
class CsvBuilder {
public:
    explicit CsvBuilder(const std::vector<std::string>& header)
        : columns_(header.size()) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i) body_ += ',';
            body_ += header[i];
        }
        body_ += '\n';
    }

    CsvBuilder& cell(double v) { return raw(fmt17(v)); }

    template <class T, std::enable_if_t<std::is_integral_v<T>, int> = 0>
    CsvBuilder& cell(T v) {
        return raw(std::to_string(v));
    }

    void end_row() {
        if (in_row_ != columns_)
            throw numeric_failure("csv row arity mismatch: got " +
                                  std::to_string(in_row_) + " cells, expected " +
                                  std::to_string(columns_));
        body_ += '\n';
        in_row_ = 0;
    }

    const std::string& body() const {
        if (in_row_ != 0) throw numeric_failure("csv body read mid-row");
        return body_;
    }

private:
    CsvBuilder& raw(const std::string& s) {
        if (in_row_) body_ += ',';
        body_ += s;
        ++in_row_;
        return *this;
    }

    std::size_t columns_;
    std::size_t in_row_ = 0;
    std::string body_;
};

inline std::filesystem::path write_file(const std::filesystem::path& dir,
                                        const std::string& name,
                                        const std::string& body) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw invalid_input("output: cannot create directory '" + dir.string() +
                            "': " + ec.message());
    const std::filesystem::path full = dir / name;
    std::ofstream out(full, std::ios::binary | std::ios::trunc);
    if (!out) throw invalid_input("output: cannot open '" + full.string() + "'");
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    out.flush();
    if (!out) throw invalid_input("output: short write to '" + full.string() + "'");
    return full;
}

inline std::filesystem::path write_json(const std::filesystem::path& dir,
                                        const std::string& name,
                                        const nlohmann::json& doc) {
    return write_file(dir, name, doc.dump(2) + "\n");
}

inline std::string iso8601_utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(
        std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Wall-clock metadata lives only in this sidecar; every other output byte is
/// a deterministic function of (config, master_seed).
inline void write_meta_sidecar(const std::filesystem::path& dir,
                               const std::string& stem,
                               const std::vector<std::string>& artifacts) {
    nlohmann::json meta;
    meta["written_at"] = iso8601_utc_now();
    meta["artifacts"] = artifacts;
    write_json(dir, stem + ".meta.json", meta);
}

} // namespace hedgelab::report
