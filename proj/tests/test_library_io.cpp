#include "tis/reach.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>

using namespace tis;

namespace {

ReachLibrary small_library() {
    Matrix A(2, 2);
    A << 0.0, 0.5, -0.1, 0.2;
    Matrix B(2, 1);
    B << 0.0, 1.0;
    const auto sys = LtiSystem::unbounded(A, B, Vector::Constant(1, -0.5), Vector::Constant(1, 0.5));
    Vector xs(2), xg(2);
    xs << -3.0, 0.0;
    xg << 3.0, 0.0;
    return build_library(sys, xs, Ellipsoid(xg, 0.25 * Matrix::Identity(2, 2)), 1.0, 0.1);
}

LibraryFormatError::Kind kind_of(const std::vector<std::uint8_t>& bytes) {
    try {
        deserialize_library(bytes);
    } catch (const LibraryFormatError& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error raised";
    return LibraryFormatError::Kind::io;
}

void put_f64(std::vector<std::uint8_t>& bytes, std::size_t offset, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) bytes[offset + i] = static_cast<std::uint8_t>(bits >> (8 * i));
}

}  // namespace

TEST(LibraryIo, RoundTripIsExact) {
    const ReachLibrary lib = small_library();
    const auto bytes = serialize_library(lib);
    const ReachLibrary back = deserialize_library(bytes);
    ASSERT_EQ(back.size(), lib.size());
    EXPECT_EQ(back.step(), lib.step());
    for (std::size_t k = 0; k < lib.size(); ++k) {
        EXPECT_EQ(back.forward()[k].center(), lib.forward()[k].center());
        EXPECT_EQ(back.forward()[k].shape(), lib.forward()[k].shape());
        EXPECT_EQ(back.backward()[k].shape(), lib.backward()[k].shape());
    }
    EXPECT_EQ(serialize_library(back), bytes);
}

TEST(LibraryIo, HeaderLayout) {
    const auto bytes = serialize_library(small_library());
    ASSERT_GE(bytes.size(), 32u);
    EXPECT_EQ(std::memcmp(bytes.data(), "TIRL", 4), 0);
    EXPECT_EQ(bytes[4], 1);  // version, little endian
    EXPECT_EQ(bytes[8], 2);  // n
    // 32-byte header, then 2 * 11 ellipsoids of 2 + 4 doubles.
    EXPECT_EQ(bytes.size(), 32u + 2u * 11u * 6u * 8u);
}

TEST(LibraryIo, DetectsCorruption) {
    const auto good = serialize_library(small_library());

    auto bad_magic = good;
    bad_magic[0] = 'X';
    EXPECT_EQ(kind_of(bad_magic), LibraryFormatError::Kind::bad_magic);

    auto bad_version = good;
    bad_version[4] = 7;
    EXPECT_EQ(kind_of(bad_version), LibraryFormatError::Kind::version_mismatch);

    auto truncated = good;
    truncated.resize(truncated.size() - 5);
    EXPECT_EQ(kind_of(truncated), LibraryFormatError::Kind::truncated);

    auto trailing = good;
    trailing.push_back(0);
    EXPECT_EQ(kind_of(trailing), LibraryFormatError::Kind::invalid);

    // Negate the (0,0) entry of the first forward shape.
    auto not_spd = good;
    put_f64(not_spd, 32 + 2 * 8, -1.0);
    EXPECT_EQ(kind_of(not_spd), LibraryFormatError::Kind::not_positive_definite);
}

TEST(LibraryIo, FileRoundTrip) {
    const auto dir = std::filesystem::temp_directory_path() / "tis_library_io_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "toy.tirl";
    const ReachLibrary lib = small_library();
    save_library(lib, path);
    const ReachLibrary back = load_library(path);
    EXPECT_EQ(back.system_id(), "toy");
    EXPECT_EQ(serialize_library(back), serialize_library(lib));
    EXPECT_THROW(load_library(dir / "missing.tirl"), LibraryFormatError);
    std::filesystem::remove_all(dir);
}
