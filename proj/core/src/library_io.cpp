#include "tis/reach.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace tis {

namespace {

constexpr char kMagic[4] = {'T', 'I', 'R', 'L'};
constexpr std::size_t kHeaderBytes = 4 + 4 + 4 + 8 + 8 + 4;

class Writer {
public:
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) {
            bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }
    void f64(double v) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        for (int i = 0; i < 8; ++i) {
            bytes.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
        }
    }
    std::vector<std::uint8_t> bytes;
};

class Reader {
public:
    explicit Reader(const std::vector<std::uint8_t>& b) : bytes_(b) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * i);
        }
        return v;
    }
    double f64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
        }
        return std::bit_cast<double>(v);
    }
    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    void need(std::size_t k) const {
        if (remaining() < k) {
            throw LibraryFormatError(LibraryFormatError::Kind::truncated,
                                     "reach library: file is truncated");
        }
    }
    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
};

void write_ellipsoid(Writer& w, const Ellipsoid& e) {
    const auto n = e.dim();
    for (int i = 0; i < n; ++i) {
        w.f64(e.center()[i]);
    }
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            w.f64(e.shape()(r, c));
        }
    }
}

Ellipsoid read_ellipsoid(Reader& rd, int n, std::size_t index) {
    Vector center(n);
    for (int i = 0; i < n; ++i) {
        center[i] = rd.f64();
    }
    Matrix shape(n, n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            shape(r, c) = rd.f64();
        }
    }
    try {
        return Ellipsoid(std::move(center), std::move(shape));
    } catch (const NotPositiveDefinite& e) {
        throw LibraryFormatError(LibraryFormatError::Kind::not_positive_definite,
                                 "reach library: ellipsoid " + std::to_string(index) + ": " +
                                     e.what());
    } catch (const std::invalid_argument& e) {
        throw LibraryFormatError(LibraryFormatError::Kind::invalid,
                                 "reach library: ellipsoid " + std::to_string(index) + ": " +
                                     e.what());
    }
}

}  // namespace

std::vector<std::uint8_t> serialize_library(const ReachLibrary& lib) {
    Writer w;
    for (char c : kMagic) {
        w.bytes.push_back(static_cast<std::uint8_t>(c));
    }
    w.u32(kLibraryFormatVersion);
    w.u32(static_cast<std::uint32_t>(lib.dim()));
    w.f64(lib.horizon());
    w.f64(lib.step());
    w.u32(static_cast<std::uint32_t>(lib.size()));
    for (const auto& e : lib.forward()) {
        write_ellipsoid(w, e);
    }
    for (const auto& e : lib.backward()) {
        write_ellipsoid(w, e);
    }
    return std::move(w.bytes);
}

ReachLibrary deserialize_library(const std::vector<std::uint8_t>& bytes, std::string system_id) {
    using Kind = LibraryFormatError::Kind;
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw LibraryFormatError(Kind::bad_magic, "reach library: bad magic bytes");
    }
    if (bytes.size() < kHeaderBytes) {
        throw LibraryFormatError(Kind::truncated, "reach library: truncated header");
    }
    Reader header(bytes);
    (void)header.u32();  // magic
    const std::uint32_t version = header.u32();
    if (version != kLibraryFormatVersion) {
        throw LibraryFormatError(Kind::version_mismatch,
                                 "reach library: unsupported version " + std::to_string(version));
    }
    const std::uint32_t n = header.u32();
    const double horizon = header.f64();
    const double step = header.f64();
    const std::uint32_t count = header.u32();
    if (n < 1 || count < 1 || !(step > 0.0) || !std::isfinite(step) || !std::isfinite(horizon)) {
        throw LibraryFormatError(Kind::invalid, "reach library: invalid header fields");
    }
    const double expected_horizon = step * static_cast<double>(count - 1);
    if (std::abs(expected_horizon - horizon) > 1e-9 * std::max(1.0, horizon)) {
        throw LibraryFormatError(Kind::invalid,
                                 "reach library: horizon does not match step and count");
    }
    const std::size_t per = static_cast<std::size_t>(n) * (static_cast<std::size_t>(n) + 1) * 8;
    const std::size_t body = 2 * static_cast<std::size_t>(count) * per;
    if (header.remaining() < body) {
        throw LibraryFormatError(Kind::truncated, "reach library: file is truncated");
    }
    if (header.remaining() > body) {
        throw LibraryFormatError(Kind::invalid, "reach library: trailing bytes after payload");
    }

    std::vector<Ellipsoid> forward;
    std::vector<Ellipsoid> backward;
    forward.reserve(count);
    backward.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        forward.push_back(read_ellipsoid(header, static_cast<int>(n), i));
    }
    for (std::uint32_t i = 0; i < count; ++i) {
        backward.push_back(read_ellipsoid(header, static_cast<int>(n), count + i));
    }
    return ReachLibrary(std::move(system_id), step, std::move(forward), std::move(backward));
}

void save_library(const ReachLibrary& lib, const std::filesystem::path& path) {
    const auto bytes = serialize_library(lib);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw LibraryFormatError(LibraryFormatError::Kind::io,
                                 "reach library: cannot open " + path.string() + " for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw LibraryFormatError(LibraryFormatError::Kind::io,
                                 "reach library: write failed for " + path.string());
    }
}

ReachLibrary load_library(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw LibraryFormatError(LibraryFormatError::Kind::io,
                                 "reach library: cannot open " + path.string());
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return deserialize_library(bytes, path.stem().string());
}

}  // namespace tis
