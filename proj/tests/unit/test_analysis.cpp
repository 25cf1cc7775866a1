#include <doctest.h>

#include "test_helpers.hpp"

#include <ddm/analysis.hpp>
#include <ddm/errors.hpp>
#include <ddm/spectrum.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace ddm;
using ddmtest::TempDir;

namespace {

ResultMap map_of(int width, int height, std::vector<std::int64_t> lags)
{
    ResultMap map;
    map.width = width;
    map.height = height;
    map.lags = std::move(lags);
    map.values.assign(map.lags.size() * static_cast<std::size_t>(map.plane_size()), 0.0);
    return map;
}

/// Single-bin profile following d = A (1 - exp(-t / tau)) + B.
RadialProfile model_profile(double amplitude, double baseline, double tau, double dt,
                            std::int64_t lags)
{
    RadialProfile profile;
    profile.bin_count = 1;
    profile.frame_interval = dt;
    profile.lags.resize(static_cast<std::size_t>(lags));
    std::iota(profile.lags.begin(), profile.lags.end(), 0);
    profile.counts = {4};
    profile.means.resize(static_cast<std::size_t>(lags));
    for (std::int64_t m = 0; m < lags; ++m) {
        const double t = static_cast<double>(m) * dt;
        profile.means[static_cast<std::size_t>(m)] =
            amplitude * (1.0 - std::exp(-t / tau)) + baseline;
    }
    return profile;
}

std::size_t line_count(const std::filesystem::path& path)
{
    std::ifstream in(path);
    std::size_t lines = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty())
            ++lines;
    return lines;
}

} // namespace

TEST_CASE("constant map averages to itself in every bin")
{
    auto map = map_of(8, 8, {0, 1, 2});
    for (auto& v : map.values)
        v = 5.25;
    const auto set = cutoff_set(8, 8, std::nullopt);
    const auto profile = azimuthal_average(map, set);

    std::int64_t total = 0;
    for (std::int64_t b = 0; b < profile.bin_count; ++b) {
        total += profile.counts[static_cast<std::size_t>(b)];
        if (profile.counts[static_cast<std::size_t>(b)] > 0)
            for (std::size_t li = 0; li < 3; ++li)
                CHECK(profile.mean(static_cast<std::int64_t>(li), b) ==
                      doctest::Approx(5.25).epsilon(1e-14));
    }
    CHECK_EQ(total, set.count());
}

TEST_CASE("radius valued map recovers its own bin index")
{
    auto map = map_of(8, 8, {1});
    const auto set = cutoff_set(8, 8, std::nullopt);
    auto plane = map.lag_plane(0);
    for (std::int64_t k = 0; k < set.count(); ++k) {
        const auto& v = set.indices[static_cast<std::size_t>(k)];
        plane[static_cast<std::size_t>(set.flat(k))] = q_magnitude(v.row, v.col, 8);
    }
    const auto profile = azimuthal_average(map, set);
    for (std::int64_t b = 0; b < profile.bin_count; ++b)
        if (profile.counts[static_cast<std::size_t>(b)] > 0)
            CHECK_LE(std::abs(profile.mean(0, b) - static_cast<double>(b)), 0.5);
}

TEST_CASE("zero cutoff collapses to the dc bin")
{
    auto map = map_of(8, 8, {1});
    map.lag_plane(0)[0] = 42.0;
    const auto set = cutoff_set(8, 8, 0.0);
    const auto profile = azimuthal_average(map, set);
    CHECK_EQ(profile.bin_count, 1);
    CHECK_EQ(profile.counts[0], 1);
    CHECK_EQ(profile.mean(0, 0), 42.0);
}

TEST_CASE("averaging commutes with scaling")
{
    auto map = map_of(16, 16, {1, 2});
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(0.0, 10.0);
    for (auto& v : map.values)
        v = dist(rng);
    auto doubled = map;
    for (auto& v : doubled.values)
        v *= 2.0;

    const auto set = cutoff_set(16, 16, std::nullopt);
    const auto p1 = azimuthal_average(map, set);
    const auto p2 = azimuthal_average(doubled, set);
    for (std::size_t i = 0; i < p1.means.size(); ++i)
        CHECK(p2.means[i] == doctest::Approx(2.0 * p1.means[i]).epsilon(1e-12));
}

TEST_CASE("mismatched wave vector geometry is rejected")
{
    const auto map = map_of(8, 8, {1});
    const auto set = cutoff_set(16, 16, std::nullopt);
    CHECK_THROWS_AS(azimuthal_average(map, set), InputError);
}

TEST_CASE("exact exponential data is recovered")
{
    const auto profile = model_profile(2.0, 0.5, 5.0, 0.5, 64);
    const auto fit = fit_exponential(profile, 0);
    CHECK(fit.flag == ExponentialFit::Flag::Ok);
    CHECK(fit.amplitude == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(fit.baseline == doctest::Approx(0.5).epsilon(1e-5));
    CHECK(fit.tau == doctest::Approx(5.0).epsilon(1e-6));
    CHECK_LE(fit.residual, 1e-8);
}

TEST_CASE("slow and fast relaxations both converge")
{
    for (const double tau : {0.8, 3.0, 40.0}) {
        const auto profile = model_profile(1.5, 0.1, tau, 1.0, 128);
        const auto fit = fit_exponential(profile, 0);
        CHECK(fit.flag == ExponentialFit::Flag::Ok);
        CHECK(fit.tau == doctest::Approx(tau).epsilon(1e-4));
    }
}

TEST_CASE("flat data is flagged degenerate")
{
    auto profile = model_profile(0.0, 3.0, 5.0, 1.0, 32);
    const auto fit = fit_exponential(profile, 0);
    CHECK(fit.flag == ExponentialFit::Flag::Degenerate);
    CHECK(fit.amplitude == doctest::Approx(0.0));
    CHECK_GT(fit.tau, 0.0);
}

TEST_CASE("mild noise does not derail the fit")
{
    std::mt19937 rng(11);
    std::normal_distribution<double> noise(0.0, 0.02);
    auto profile = model_profile(2.0, 0.5, 8.0, 1.0, 128);
    for (std::size_t m = 1; m < profile.means.size(); ++m)
        profile.means[m] += noise(rng);
    const auto fit = fit_exponential(profile, 0);
    CHECK(fit.flag == ExponentialFit::Flag::Ok);
    CHECK(fit.tau == doctest::Approx(8.0).epsilon(0.05));
}

TEST_CASE("too few lags cannot be fit")
{
    const auto profile = model_profile(1.0, 0.0, 2.0, 1.0, 3);
    CHECK_THROWS_AS(fit_exponential(profile, 0), InputError);
    CHECK(fit_all_bins(profile).empty());
}

TEST_CASE("fit_all_bins skips empty bins and labels the rest")
{
    // two populated bins with different relaxation times
    RadialProfile profile;
    profile.bin_count = 3;
    profile.frame_interval = 1.0;
    profile.lags.resize(64);
    std::iota(profile.lags.begin(), profile.lags.end(), 0);
    profile.counts = {4, 0, 2};
    profile.means.assign(3 * 64, 0.0);
    for (std::int64_t m = 0; m < 64; ++m) {
        const double t = static_cast<double>(m);
        profile.means[static_cast<std::size_t>(m * 3 + 0)] =
            2.0 * (1.0 - std::exp(-t / 4.0));
        profile.means[static_cast<std::size_t>(m * 3 + 2)] =
            1.0 * (1.0 - std::exp(-t / 9.0));
    }
    const auto fits = fit_all_bins(profile);
    REQUIRE_EQ(fits.size(), 2);
    CHECK_EQ(fits[0].q_bin, 0);
    CHECK_EQ(fits[1].q_bin, 2);
    CHECK(fits[0].tau == doctest::Approx(4.0).epsilon(1e-4));
    CHECK(fits[1].tau == doctest::Approx(9.0).epsilon(1e-4));
}

TEST_CASE("diffusion slope from ideal relaxation rates")
{
    const double diffusion = 0.7;
    const std::int64_t width = 64;
    std::vector<ExponentialFit> fits;
    for (std::int64_t bin = 1; bin <= 12; ++bin) {
        ExponentialFit fit;
        fit.q_bin = bin;
        const double q_phys = 2.0 * M_PI * static_cast<double>(bin) / 64.0;
        fit.tau = 1.0 / (diffusion * q_phys * q_phys);
        fit.flag = ExponentialFit::Flag::Ok;
        fits.push_back(fit);
    }
    const auto estimate = estimate_diffusion(fits, width, 2, 10);
    CHECK_EQ(estimate.bins_used, 9);
    CHECK(estimate.coefficient == doctest::Approx(diffusion).epsilon(1e-12));

    fits[3].flag = ExponentialFit::Flag::Degenerate; // bin 4 dropped
    const auto thinned = estimate_diffusion(fits, width, 2, 10);
    CHECK_EQ(thinned.bins_used, 8);
    CHECK(thinned.coefficient == doctest::Approx(diffusion).epsilon(1e-12));
}

TEST_CASE("csv writers emit the documented tables")
{
    TempDir dir;
    auto map = map_of(8, 8, {0, 1});
    for (auto& v : map.values)
        v = 1.0;
    const auto set = cutoff_set(8, 8, std::nullopt);
    const auto profile = azimuthal_average(map, set);

    const auto radial = dir.path() / "radial.csv";
    write_radial_csv(profile, radial);
    std::ifstream in(radial);
    std::string header;
    std::getline(in, header);
    CHECK_EQ(header, "lag,q_bin,mean,count");

    std::int64_t populated = 0;
    for (std::int64_t b = 0; b < profile.bin_count; ++b)
        if (profile.counts[static_cast<std::size_t>(b)] > 0)
            ++populated;
    CHECK_EQ(line_count(radial), 1 + 2 * static_cast<std::size_t>(populated));

    const auto model = model_profile(2.0, 0.5, 5.0, 0.5, 64);
    std::vector<ExponentialFit> fits{fit_exponential(model, 0)};
    const auto fits_path = dir.path() / "fits.csv";
    write_fits_csv(fits, fits_path);
    std::ifstream fin(fits_path);
    std::getline(fin, header);
    CHECK_EQ(header, "q_bin,A,B,tau_seconds,residual,flag");
    CHECK_EQ(line_count(fits_path), 2);
}

TEST_CASE("flag names are stable")
{
    CHECK_EQ(to_string(ExponentialFit::Flag::Ok), "ok");
    CHECK_EQ(to_string(ExponentialFit::Flag::Degenerate), "degenerate");
    CHECK_EQ(to_string(ExponentialFit::Flag::NoConverge), "no_converge");
}
