#include "ddm/analysis.hpp"

#include "ddm/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>

namespace ddm {

namespace {

constexpr int kMaxIterations = 200;

struct Model {
    std::vector<double> t; // seconds
    std::vector<double> y;

    double cost(double a, double b, double tau) const {
        double sum = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double r = a * (1.0 - std::exp(-t[i] / tau)) + b - y[i];
            sum += r * r;
        }
        return sum;
    }
};

/// Solves the 3x3 system M x = rhs by Gaussian elimination with partial
/// pivoting. Returns false when M is singular.
bool solve3(std::array<std::array<double, 3>, 3> m, std::array<double, 3> rhs,
            std::array<double, 3>& x) {
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int row = col + 1; row < 3; ++row)
            if (std::abs(m[row][col]) > std::abs(m[pivot][col]))
                pivot = row;
        if (std::abs(m[pivot][col]) < 1e-300)
            return false;
        std::swap(m[col], m[pivot]);
        std::swap(rhs[col], rhs[pivot]);
        for (int row = col + 1; row < 3; ++row) {
            const double f = m[row][col] / m[col][col];
            for (int k = col; k < 3; ++k)
                m[row][k] -= f * m[col][k];
            rhs[row] -= f * rhs[col];
        }
    }
    for (int row = 2; row >= 0; --row) {
        double v = rhs[row];
        for (int k = row + 1; k < 3; ++k)
            v -= m[row][k] * x[k];
        x[row] = v / m[row][row];
    }
    return true;
}

} // namespace

RadialProfile azimuthal_average(const ResultMap& map, const WaveVectorSet& wave_vectors) {
    if (wave_vectors.width != map.width || wave_vectors.height != map.height)
        throw InputError("azimuthal_average: wave-vector set does not match maps");

    const std::int64_t q_count = wave_vectors.count();
    std::vector<std::int64_t> bin_of(static_cast<std::size_t>(q_count));
    std::int64_t bin_max = 0;
    for (std::int64_t k = 0; k < q_count; ++k) {
        const auto& v = wave_vectors.indices[static_cast<std::size_t>(k)];
        const auto bin = static_cast<std::int64_t>(std::llround(
            q_magnitude(v.row, v.col, static_cast<int>(map.height))));
        bin_of[static_cast<std::size_t>(k)] = bin;
        bin_max = std::max(bin_max, bin);
    }

    RadialProfile profile;
    profile.bin_count = bin_max + 1;
    profile.frame_interval = map.frame_interval;
    profile.lags = map.lags;
    profile.counts.assign(static_cast<std::size_t>(profile.bin_count), 0);
    for (const auto bin : bin_of)
        ++profile.counts[static_cast<std::size_t>(bin)];

    profile.means.assign(map.lags.size() * static_cast<std::size_t>(profile.bin_count),
                         0.0);
    for (std::size_t li = 0; li < map.lags.size(); ++li) {
        const auto plane = map.lag_plane(static_cast<std::int64_t>(li));
        double* row = profile.means.data() + li * static_cast<std::size_t>(profile.bin_count);
        for (std::int64_t k = 0; k < q_count; ++k)
            row[bin_of[static_cast<std::size_t>(k)]] +=
                plane[static_cast<std::size_t>(wave_vectors.flat(k))];
        for (std::int64_t bin = 0; bin < profile.bin_count; ++bin)
            if (profile.counts[static_cast<std::size_t>(bin)] > 0)
                row[bin] /= static_cast<double>(profile.counts[static_cast<std::size_t>(bin)]);
    }
    return profile;
}

std::string to_string(ExponentialFit::Flag flag) {
    switch (flag) {
    case ExponentialFit::Flag::Ok: return "ok";
    case ExponentialFit::Flag::Degenerate: return "degenerate";
    case ExponentialFit::Flag::NoConverge: return "no_converge";
    }
    return "?";
}

ExponentialFit fit_exponential(const RadialProfile& profile, std::int64_t q_bin) {
    if (q_bin < 0 || q_bin >= profile.bin_count)
        throw InputError("fit_exponential: bin out of range");
    if (profile.counts[static_cast<std::size_t>(q_bin)] < 1)
        throw InputError("fit_exponential: empty bin");

    Model model;
    for (std::size_t li = 0; li < profile.lags.size(); ++li) {
        const std::int64_t m = profile.lags[li];
        if (m < 1)
            continue; // d(q, 0) = 0 sits outside the relaxation model
        const double v = profile.mean(static_cast<std::int64_t>(li), q_bin);
        if (!std::isfinite(v))
            continue;
        model.t.push_back(static_cast<double>(m) * profile.frame_interval);
        model.y.push_back(v);
    }
    if (model.t.size() < 4)
        throw InputError("fit_exponential: need at least 4 usable lags");

    ExponentialFit fit;
    fit.q_bin = q_bin;

    const double y_max = *std::max_element(model.y.begin(), model.y.end());
    const double y_min = *std::min_element(model.y.begin(), model.y.end());
    const double scale = std::max({std::abs(y_max), std::abs(y_min), 1e-300});

    if ((y_max - y_min) <= 1e-12 * scale) {
        // no dynamics to fit
        double mean = 0.0;
        for (const double v : model.y)
            mean += v;
        fit.amplitude = 0.0;
        fit.baseline = mean / static_cast<double>(model.y.size());
        fit.tau = profile.frame_interval;
        fit.residual = 0.0;
        fit.flag = ExponentialFit::Flag::Degenerate;
        return fit;
    }

    // deterministic start: zero baseline, amplitude at the plateau, tau at
    // the sample closest to the 1 - 1/e level
    double a = y_max;
    double b = 0.0;
    const double knee = a * (1.0 - std::exp(-1.0));
    std::size_t knee_i = 0;
    double knee_err = std::abs(model.y[0] - knee);
    for (std::size_t i = 1; i < model.y.size(); ++i) {
        const double err = std::abs(model.y[i] - knee);
        if (err < knee_err) {
            knee_err = err;
            knee_i = i;
        }
    }
    double tau = model.t[knee_i];

    double lambda = 1e-3;
    double cost = model.cost(a, b, tau);
    bool converged = false;

    for (int iter = 0; iter < kMaxIterations; ++iter) {
        // normal equations in (A, B, u = ln tau)
        std::array<std::array<double, 3>, 3> jtj{};
        std::array<double, 3> jtr{};
        for (std::size_t i = 0; i < model.t.size(); ++i) {
            const double e = std::exp(-model.t[i] / tau);
            const double r = a * (1.0 - e) + b - model.y[i];
            const std::array<double, 3> j = {1.0 - e, 1.0, -a * e * model.t[i] / tau};
            for (int p = 0; p < 3; ++p) {
                for (int q = 0; q < 3; ++q)
                    jtj[p][q] += j[p] * j[q];
                jtr[p] += j[p] * r;
            }
        }

        std::array<std::array<double, 3>, 3> damped = jtj;
        for (int p = 0; p < 3; ++p)
            damped[p][p] += lambda * std::max(jtj[p][p], 1e-300);

        std::array<double, 3> step{};
        if (!solve3(damped, {-jtr[0], -jtr[1], -jtr[2]}, step)) {
            lambda *= 5.0;
            continue;
        }

        const double a_new = a + step[0];
        const double b_new = b + step[1];
        const double tau_new = tau * std::exp(std::clamp(step[2], -5.0, 5.0));
        const double cost_new = model.cost(a_new, b_new, tau_new);

        if (cost_new <= cost) {
            const double improvement = cost - cost_new;
            a = a_new;
            b = b_new;
            tau = tau_new;
            cost = cost_new;
            lambda = std::max(lambda / 3.0, 1e-12);
            if (improvement <= 1e-14 * (cost + 1e-300)) {
                converged = true;
                break;
            }
        } else {
            lambda *= 5.0;
            if (lambda > 1e12) {
                converged = true; // stuck in a flat basin; accept
                break;
            }
        }
    }

    fit.amplitude = a;
    fit.baseline = b;
    fit.tau = tau;
    fit.residual = std::sqrt(cost / static_cast<double>(model.t.size()));
    fit.flag = converged ? ExponentialFit::Flag::Ok : ExponentialFit::Flag::NoConverge;
    return fit;
}

std::vector<ExponentialFit> fit_all_bins(const RadialProfile& profile) {
    std::vector<ExponentialFit> fits;
    std::int64_t usable = 0;
    for (const std::int64_t m : profile.lags)
        if (m >= 1)
            ++usable;
    if (usable < 4)
        return fits;
    for (std::int64_t bin = 0; bin < profile.bin_count; ++bin) {
        if (profile.counts[static_cast<std::size_t>(bin)] < 1)
            continue;
        fits.push_back(fit_exponential(profile, bin));
    }
    return fits;
}

DiffusionEstimate estimate_diffusion(std::span<const ExponentialFit> fits,
                                     std::int64_t width, std::int64_t q_lo,
                                     std::int64_t q_hi) {
    if (width < 1)
        throw InputError("estimate_diffusion: bad width");
    const double two_pi = 2.0 * std::acos(-1.0);

    double sxx = 0.0;
    double sxy = 0.0;
    std::int64_t used = 0;
    for (const ExponentialFit& fit : fits) {
        if (fit.flag != ExponentialFit::Flag::Ok)
            continue;
        if (fit.q_bin < q_lo || fit.q_bin > q_hi)
            continue;
        const double q_phys = two_pi * static_cast<double>(fit.q_bin) /
                              static_cast<double>(width);
        const double x = q_phys * q_phys;
        const double y = 1.0 / fit.tau;
        sxx += x * x;
        sxy += x * y;
        ++used;
    }

    DiffusionEstimate estimate;
    estimate.bins_used = used;
    if (used > 0 && sxx > 0.0)
        estimate.coefficient = sxy / sxx;
    return estimate;
}

void write_radial_csv(const RadialProfile& profile, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out << "lag,q_bin,mean,count\n";
    out.precision(17);
    for (std::size_t li = 0; li < profile.lags.size(); ++li)
        for (std::int64_t bin = 0; bin < profile.bin_count; ++bin) {
            const auto count = profile.counts[static_cast<std::size_t>(bin)];
            if (count < 1)
                continue;
            out << profile.lags[li] << ',' << bin << ','
                << profile.mean(static_cast<std::int64_t>(li), bin) << ',' << count
                << '\n';
        }
    if (!out)
        throw IoError("write failed for " + path.string());
}

void write_fits_csv(std::span<const ExponentialFit> fits,
                    const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out << "q_bin,A,B,tau_seconds,residual,flag\n";
    out.precision(17);
    for (const ExponentialFit& fit : fits)
        out << fit.q_bin << ',' << fit.amplitude << ',' << fit.baseline << ','
            << fit.tau << ',' << fit.residual << ',' << to_string(fit.flag) << '\n';
    if (!out)
        throw IoError("write failed for " + path.string());
}

} // namespace ddm
