#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nsc/field.hpp"

namespace nsc::io {

/// Shortest round-trip-safe text for a double: 17 significant digits.
std::string fmt17(double x);

/// Creates the directory tree; throws IoError on failure.
void ensure_directory(const std::filesystem::path& dir);

/// CSV file whose first line is `# config_hash: <hash>`, then the header.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::string& config_hash, const std::vector<std::string>& columns);
    CsvWriter& cell(double x);
    CsvWriter& cell(long long x);
    CsvWriter& cell(int x) { return cell(static_cast<long long>(x)); }
    CsvWriter& cell(std::size_t x) { return cell(static_cast<long long>(x)); }
    CsvWriter& cell(bool x);
    CsvWriter& cell(const std::string& x);
    CsvWriter& cell(const char* x) { return cell(std::string(x)); }
    /// Terminates the row; throws IoError when the column count is wrong or the stream failed.
    void end_row();

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t columns_ = 0;
    std::size_t filled_ = 0;
};

/// Pretty-printed JSON; doubles use the shortest text that round-trips.
void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc);

/// Binary snapshot: "NSCSNAP1", n (u32), L (f64), components (u32), time (f64),
/// config hash (16 bytes), then the spectrum as interleaved re/im f64 in
/// storage order, component-major. Little endian.
void write_snapshot(const std::filesystem::path& path, const SpectralField& f, double time,
                    const std::string& config_hash);

struct Snapshot {
    SpectralField field;
    double time = 0.0;
    std::string config_hash;
};
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace nsc::io
