#include "sle/archive.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace sle {

namespace {

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
public:
    explicit Reader(const std::string& b) : bytes_(b) {}

    std::uint64_t u64() { return take_le(8); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(take_le(4)); }
    std::uint8_t u8() { return static_cast<std::uint8_t>(take_le(1)); }
    double f64() { return std::bit_cast<double>(u64()); }
    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    std::uint64_t take_le(std::size_t n) {
        if (remaining() < n) throw FormatError("archive truncated at byte " + std::to_string(pos_));
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < n; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += n;
        return v;
    }

    const std::string& bytes_;
    std::size_t pos_ = 0;
};

template <class T>
void encode_path(std::string& out, const SampledPath<T>& p) {
    constexpr bool is_complex = std::is_same_v<T, Complex>;
    put_f64(out, p.dt);
    put_u64(out, p.values.size());
    out.push_back(is_complex ? 1 : 0);
    out.push_back(p.terminal_limit ? 1 : 0);
    auto put_value = [&](const T& v) {
        if constexpr (is_complex) {
            put_f64(out, v.real());
            put_f64(out, v.imag());
        } else {
            put_f64(out, v);
        }
    };
    if (p.terminal_limit) put_value(*p.terminal_limit);
    for (const T& v : p.values) put_value(v);
}

template <class T>
SampledPath<T> decode_path(Reader& r, double dt, std::uint64_t count, bool has_limit) {
    constexpr bool is_complex = std::is_same_v<T, Complex>;
    auto get_value = [&]() -> T {
        if constexpr (is_complex) {
            const double re = r.f64();
            const double im = r.f64();
            return {re, im};
        } else {
            return r.f64();
        }
    };
    const std::size_t width = is_complex ? 16 : 8;
    if (count > r.remaining() / width) throw FormatError("archive sample count exceeds file size");
    std::optional<T> limit;
    if (has_limit) limit = get_value();
    std::vector<T> values(count);
    for (auto& v : values) v = get_value();
    SampledPath<T> p;
    p.dt = dt;
    p.values = std::move(values);
    const double span = static_cast<double>(count) * dt;
    if (has_limit) {
        p.lifetime = span;
        p.horizon = span;
        p.terminal_limit = limit;
    } else {
        p.lifetime = kInf;
        p.horizon = span;
    }
    return p;
}

}  // namespace

std::string encode_archive(const std::vector<AnyPath>& paths) {
    std::string out = "SLEP";
    put_u32(out, kArchiveVersion);
    put_u64(out, paths.size());
    for (const auto& p : paths) std::visit([&](const auto& q) { encode_path(out, q); }, p);
    return out;
}

std::vector<AnyPath> decode_archive(const std::string& bytes) {
    if (bytes.size() < 4 || bytes.compare(0, 4, "SLEP") != 0)
        throw FormatError("not a path archive: bad magic bytes");
    const std::string body = bytes.substr(4);
    Reader r(body);
    const std::uint32_t version = r.u32();
    if (version != kArchiveVersion)
        throw FormatError("unsupported archive version " + std::to_string(version));
    const std::uint64_t n = r.u64();
    std::vector<AnyPath> paths;
    for (std::uint64_t i = 0; i < n; ++i) {
        const double dt = r.f64();
        const std::uint64_t count = r.u64();
        const std::uint8_t cflag = r.u8();
        const std::uint8_t lflag = r.u8();
        if (cflag > 1 || lflag > 1) throw FormatError("bad flag byte in path " + std::to_string(i));
        if (!(dt > 0.0) || !std::isfinite(dt)) throw FormatError("non-positive dt in path " + std::to_string(i));
        if (count == 0) throw FormatError("empty path " + std::to_string(i));
        if (cflag)
            paths.emplace_back(decode_path<Complex>(r, dt, count, lflag != 0));
        else
            paths.emplace_back(decode_path<double>(r, dt, count, lflag != 0));
    }
    if (r.remaining() != 0) throw FormatError("trailing bytes after last path");
    return paths;
}

void write_file_atomic(const std::filesystem::path& file, const std::string& contents) {
    std::filesystem::path tmp = file;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        os.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!os) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, file);
}

std::string read_file(const std::filesystem::path& file) {
    std::ifstream is(file, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + file.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_archive(const std::filesystem::path& file, const std::vector<AnyPath>& paths) {
    write_file_atomic(file, encode_archive(paths));
}

std::vector<AnyPath> read_archive(const std::filesystem::path& file) { return decode_archive(read_file(file)); }

}  // namespace sle
