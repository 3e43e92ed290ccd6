#include <gtest/gtest.h>

#include <bit>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <random>

#include "gapspec/error.hpp"
#include "gapspec/series_io.hpp"

using namespace gapspec;

namespace {

void expect_bit_identical(const GappySeries& a, const GappySeries& b) {
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(std::bit_cast<std::uint64_t>(a.values()[i]), std::bit_cast<std::uint64_t>(b.values()[i])) << i;
        EXPECT_EQ(std::bit_cast<std::uint64_t>(a.weights()[i]), std::bit_cast<std::uint64_t>(b.weights()[i])) << i;
    }
}

Errc parse_code(std::string_view text, std::string* message = nullptr) {
    try {
        deserialize_series(text);
    } catch (const Error& e) {
        if (message) *message = e.what();
        return e.code();
    }
    ADD_FAILURE() << "parsed without error";
    return Errc::invalid_argument;
}

}  // namespace

TEST(SeriesIo, SingleRowRoundTrip) {
    const GappySeries s({1.0}, {1.0});
    const auto text = serialize_series(s);
    EXPECT_EQ(text, "index,value,weight\n0,1,1\n");
    expect_bit_identical(s, deserialize_series(text));
}

TEST(SeriesIo, RandomRoundTripIsBitExact) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::uint64_t> bits;
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> v;
        std::vector<double> w;
        for (int i = 0; i < 200; ++i) {
            double x;
            do {
                x = std::bit_cast<double>(bits(rng));
            } while (!std::isfinite(x));
            v.push_back(x);
            w.push_back(i % 3 == 0 ? 0.0 : u(rng));
        }
        v[0] = std::numeric_limits<double>::denorm_min();
        v[1] = -0.0;
        v[2] = std::numeric_limits<double>::max();
        const GappySeries s(v, w, 0.25);
        const auto back = deserialize_series(serialize_series(s), 0.25);
        expect_bit_identical(s, back);
        EXPECT_EQ(back.dt(), 0.25);
    }
}

TEST(SeriesIo, HeaderIsOptional) {
    const auto a = deserialize_series("index,value,weight\n0,1.5,1\n1,2.5,0\n");
    const auto b = deserialize_series("0,1.5,1\n1,2.5,0\n");
    expect_bit_identical(a, b);
    EXPECT_EQ(a.valid_count(), 1u);
}

TEST(SeriesIo, WrongFieldCountNamesLine) {
    std::string msg;
    EXPECT_EQ(parse_code("index,value,weight\n0,1,1\n1,2\n", &msg), Errc::parse_error);
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
}

TEST(SeriesIo, NonNumericTokenNamesLine) {
    std::string msg;
    EXPECT_EQ(parse_code("0,1,1\n1,abc,1\n", &msg), Errc::parse_error);
    EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
    EXPECT_EQ(parse_code("0,1,1\n1,2,1e\n"), Errc::parse_error);
    EXPECT_EQ(parse_code("0,1,1\n1,1 000,1\n"), Errc::parse_error);
}

TEST(SeriesIo, IndexMustCountUp) {
    EXPECT_EQ(parse_code("0,1,1\n2,1,1\n"), Errc::parse_error);
    EXPECT_EQ(parse_code(""), Errc::parse_error);
}

TEST(SeriesIo, InvalidWeightsSurfaceAsTypeErrors) {
    try {
        deserialize_series("0,1,-1\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::negative_weight);
    }
}

TEST(SeriesIo, WeightFiles) {
    EXPECT_EQ(deserialize_weights("1\n0\n1\n"), (std::vector<double>{1, 0, 1}));
    EXPECT_EQ(deserialize_weights("index,value,weight\n0,5,1\n1,6,0\n"), (std::vector<double>{1, 0}));
    EXPECT_THROW(deserialize_weights("1,2\n"), Error);
}

TEST(SeriesIo, FileHelpers) {
    const auto dir = std::filesystem::temp_directory_path() / "gapspec_series_io_test";
    std::filesystem::create_directories(dir);
    const GappySeries s({1.0, -2.0, 3.25}, {1.0, 0.0, 1.0});
    write_series_csv(dir / "s.csv", s);
    expect_bit_identical(s, read_series_csv(dir / "s.csv"));
    try {
        read_series_csv(dir / "missing.csv");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::io_error);
    }
    std::filesystem::remove_all(dir);
}
