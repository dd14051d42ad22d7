#include "nsc/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>

#include "nsc/errors.hpp"

namespace nsc::io {

namespace {

constexpr char kMagic[8] = {'N', 'S', 'C', 'S', 'N', 'A', 'P', '1'};

static_assert(std::endian::native == std::endian::little, "snapshot format assumes a little-endian host");

template <class T>
void put(std::ofstream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string fmt17(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void ensure_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& config_hash,
                     const std::vector<std::string>& columns)
    : path_(path), out_(path, std::ios::binary), columns_(columns.size()) {
    if (!out_) throw IoError("cannot open " + path.string() + " for writing");
    out_ << "# config_hash: " << config_hash << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << csv_escape(columns[i]);
    out_ << '\n';
}

CsvWriter& CsvWriter::cell(const std::string& x) {
    out_ << (filled_++ ? "," : "") << csv_escape(x);
    return *this;
}

CsvWriter& CsvWriter::cell(double x) { return cell(fmt17(x)); }
CsvWriter& CsvWriter::cell(long long x) { return cell(std::to_string(x)); }
CsvWriter& CsvWriter::cell(bool x) { return cell(std::string(x ? "1" : "0")); }

void CsvWriter::end_row() {
    if (filled_ != columns_)
        throw IoError(path_.string() + ": row has " + std::to_string(filled_) + " cells, expected " +
                      std::to_string(columns_));
    out_ << '\n';
    filled_ = 0;
    if (!out_) throw IoError("write failed on " + path_.string());
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("write failed on " + path.string());
}

void write_snapshot(const std::filesystem::path& path, const SpectralField& f, double time,
                    const std::string& config_hash) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(kMagic, sizeof kMagic);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(f.grid().n()));
    put<double>(out, f.grid().length());
    put<std::uint32_t>(out, static_cast<std::uint32_t>(f.components()));
    put<double>(out, time);
    char hash[16] = {};
    std::memcpy(hash, config_hash.data(), std::min<std::size_t>(16, config_hash.size()));
    out.write(hash, sizeof hash);
    for (const cplx& c : f.data()) {
        put<double>(out, c.real());
        put<double>(out, c.imag());
    }
    if (!out) throw IoError("write failed on " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw IoError(path.string() + " is not a snapshot file");
    const auto n = get<std::uint32_t>(in);
    const auto L = get<double>(in);
    const auto comps = get<std::uint32_t>(in);
    const auto time = get<double>(in);
    char hash[16];
    in.read(hash, sizeof hash);
    if (!in || comps == 0 || comps > 64) throw IoError(path.string() + ": corrupt header");
    Snapshot s{SpectralField(TorusGrid(static_cast<int>(n), L), static_cast<int>(comps)), time,
               std::string(hash, strnlen(hash, sizeof hash))};
    for (cplx& c : s.field.data()) {
        const double re = get<double>(in);
        const double im = get<double>(in);
        c = cplx(re, im);
    }
    if (!in) throw IoError(path.string() + ": truncated spectrum");
    return s;
}

}  // namespace nsc::io
