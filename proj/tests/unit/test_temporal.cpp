#include <doctest.h>

#include <ddm/errors.hpp>
#include <ddm/temporal.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

using namespace ddm;

namespace {

std::vector<std::complex<double>> random_sequence(std::int64_t n, unsigned seed)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<std::complex<double>> seq(static_cast<std::size_t>(n));
    for (auto& v : seq)
        v = {dist(rng), dist(rng)};
    return seq;
}

double peak_abs(const std::vector<double>& v)
{
    double peak = 0.0;
    for (const double x : v)
        peak = std::max(peak, std::abs(x));
    return peak;
}

} // namespace

TEST_CASE("pad length jumps to twice the next power of two")
{
    CHECK_EQ(pad_length(1), 2);
    CHECK_EQ(pad_length(2), 4);
    CHECK_EQ(pad_length(3), 8);
    CHECK_EQ(pad_length(100), 256);
    CHECK_EQ(pad_length(1000), 2048);
    CHECK_EQ(pad_length(16384), 32768);
}

TEST_CASE("pad length bounds, monotonicity and doubling")
{
    std::int64_t prev = 0;
    for (std::int64_t n = 1; n <= 1024; ++n) {
        const std::int64_t p = pad_length(n);
        CHECK_GE(p, 2 * n);
        CHECK_EQ(p & (p - 1), 0);
        CHECK_GE(p, prev);
        CHECK_EQ(pad_length(2 * n), 2 * p);
        prev = p;
    }
    CHECK_THROWS_AS(pad_length(0), InputError);
}

TEST_CASE("averages term of the short ramp")
{
    // [1,2,3]: hand evaluation gives [28/3, 9, 10]
    const std::vector<std::complex<double>> seq{{1, 0}, {2, 0}, {3, 0}};
    const auto d_a = averages_term<double>(seq);
    REQUIRE_EQ(d_a.size(), 3);
    CHECK(d_a[0] == doctest::Approx(28.0 / 3.0).epsilon(1e-14));
    CHECK(d_a[1] == doctest::Approx(9.0).epsilon(1e-14));
    CHECK(d_a[2] == doctest::Approx(10.0).epsilon(1e-14));
}

TEST_CASE("correlation of the short ramp")
{
    const std::vector<std::complex<double>> seq{{1, 0}, {2, 0}, {3, 0}};
    const auto corr = correlation_term<double>(seq);
    REQUIRE_EQ(corr.size(), 3);
    CHECK(corr[0] == doctest::Approx(14.0).epsilon(1e-12));
    CHECK(corr[1] == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(corr[2] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("correlation can go negative")
{
    const std::vector<std::complex<double>> seq{{1, 0}, {-1, 0}};
    const auto corr = correlation_term<double>(seq);
    REQUIRE_EQ(corr.size(), 2);
    CHECK(corr[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(corr[1] == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("full pipeline on the short ramp")
{
    const std::vector<std::complex<double>> seq{{1, 0}, {2, 0}, {3, 0}};
    const auto p = with_ft_sequence<double>(seq);
    REQUIRE_EQ(p.lags(), 3);
    CHECK_LT(std::abs(p.d[0]), 1e-9);
    CHECK(p.d[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.d[2] == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("full pipeline on the alternating pair")
{
    const std::vector<std::complex<double>> seq{{1, 0}, {-1, 0}};
    const auto p = with_ft_sequence<double>(seq);
    REQUIRE_EQ(p.lags(), 2);
    CHECK(p.d_a[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(p.d_a[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_LT(std::abs(p.d[0]), 1e-9);
    CHECK(p.d[1] == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("single element sequence has only the zero lag")
{
    const std::vector<std::complex<double>> seq{{3, 4}};
    const auto p = with_ft_sequence<double>(seq);
    REQUIRE_EQ(p.lags(), 1);
    CHECK(p.corr[0] == doctest::Approx(25.0).epsilon(1e-12));
    CHECK_LT(std::abs(p.d[0]), 1e-9);
}

TEST_CASE("fft path matches the defining double loop")
{
    for (const std::int64_t n : {1, 2, 3, 5, 16, 100}) {
        const auto seq = random_sequence(n, static_cast<unsigned>(40 + n));
        const auto fast = with_ft_sequence<double>(seq);
        const auto slow = direct_sequence_oracle(seq);
        const double scale = std::max(peak_abs(slow.d), 1.0);
        for (std::int64_t m = 0; m < n; ++m)
            CHECK_LE(std::abs(fast.d[static_cast<std::size_t>(m)] -
                              slow.d[static_cast<std::size_t>(m)]),
                     1e-9 * scale);
    }
}

TEST_CASE("non power of two length correlates without wrap")
{
    SequenceEngine<double> engine(100);
    CHECK_EQ(engine.padded_length(), 256);
    for (unsigned seed = 0; seed < 4; ++seed) {
        const auto seq = random_sequence(100, 70 + seed);
        const auto fast = engine.correlation(seq);
        const auto slow = direct_sequence_oracle(seq);
        const double scale = peak_abs(slow.corr);
        for (std::size_t m = 0; m < 100; ++m)
            CHECK_LE(std::abs(fast[m] - slow.corr[m]), 1e-10 * scale);
    }
}

TEST_CASE("structure function ignores a constant offset")
{
    const auto seq = random_sequence(64, 11);
    auto shifted = seq;
    for (auto& v : shifted)
        v += std::complex<double>(5.0, -3.0);
    const auto a = with_ft_sequence<double>(seq);
    const auto b = with_ft_sequence<double>(shifted);
    const double scale = std::max(peak_abs(a.d), 1.0);
    for (std::size_t m = 1; m < 64; ++m)
        CHECK_LE(std::abs(a.d[m] - b.d[m]), 1e-9 * scale);
}

TEST_CASE("structure function scales with the squared amplitude")
{
    const auto seq = random_sequence(32, 13);
    auto scaled = seq;
    for (auto& v : scaled)
        v *= 2.5;
    const auto a = with_ft_sequence<double>(seq);
    const auto b = with_ft_sequence<double>(scaled);
    for (std::size_t m = 1; m < 32; ++m)
        CHECK(b.d[m] == doctest::Approx(6.25 * a.d[m]).epsilon(1e-9));
}

TEST_CASE("engine reuse matches one shot evaluation")
{
    SequenceEngine<double> engine(48);
    const auto s1 = random_sequence(48, 17);
    const auto s2 = random_sequence(48, 18);
    const auto a1 = engine.with_ft(s1);
    const auto a2 = engine.with_ft(s2);
    CHECK(a1.d == with_ft_sequence<double>(s1).d);
    CHECK(a2.d == with_ft_sequence<double>(s2).d);
    CHECK_EQ(engine.temporal_fft_count(), 4);
}

TEST_CASE("transform counter advances two per correlation")
{
    RunCounters counters;
    const auto seq = random_sequence(8, 19);
    (void)correlation_term<double>(seq, &counters);
    CHECK_EQ(counters.temporal_ffts, 2);
    (void)with_ft_sequence<double>(seq, &counters);
    CHECK_EQ(counters.temporal_ffts, 4);
}

TEST_CASE("combine rejects mismatched term lengths")
{
    CHECK_THROWS_AS(combine({1.0, 2.0}, {1.0}), InputError);
}

TEST_CASE("float engine stays near the double result")
{
    const auto seq = random_sequence(64, 23);
    std::vector<std::complex<float>> seqf(seq.size());
    for (std::size_t i = 0; i < seq.size(); ++i)
        seqf[i] = {static_cast<float>(seq[i].real()), static_cast<float>(seq[i].imag())};
    const auto a = with_ft_sequence<double>(seq);
    const auto b = with_ft_sequence<float>(seqf);
    const double scale = std::max(peak_abs(a.d), 1.0);
    for (std::size_t m = 1; m < 64; ++m)
        CHECK_LE(std::abs(a.d[m] - b.d[m]), 1e-4 * scale);
}
