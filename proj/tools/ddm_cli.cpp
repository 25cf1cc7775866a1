// ddm: structure-function analysis of image stacks under a memory budget.
// Subcommands: analyze, compare, synth, bench. Exit codes are a contract:
// 0 success, 1 malformed input, 2 planning/memory failure, 3 I/O failure.

#include <ddm/analysis.hpp>
#include <ddm/archive.hpp>
#include <ddm/bench.hpp>
#include <ddm/errors.hpp>
#include <ddm/frame_source.hpp>
#include <ddm/image_stack.hpp>
#include <ddm/result_map.hpp>
#include <ddm/scheduler.hpp>
#include <ddm/spectrum.hpp>
#include <ddm/synth.hpp>
#include <ddm/version.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

namespace {

using nlohmann::json;

std::int64_t physical_memory_bytes() {
    const long pages = ::sysconf(_SC_PHYS_PAGES);
    const long page_size = ::sysconf(_SC_PAGE_SIZE);
    if (pages <= 0 || page_size <= 0)
        return std::int64_t{4} << 30;
    return static_cast<std::int64_t>(pages) * static_cast<std::int64_t>(page_size);
}

/// "512M" -> bytes; suffixes K/M/G are powers of 1024, case-insensitive.
std::int64_t parse_memory_limit(std::string text) {
    if (text.empty())
        throw ddm::InputError("empty memory limit");
    std::int64_t multiplier = 1;
    switch (std::toupper(static_cast<unsigned char>(text.back()))) {
    case 'K': multiplier = std::int64_t{1} << 10; text.pop_back(); break;
    case 'M': multiplier = std::int64_t{1} << 20; text.pop_back(); break;
    case 'G': multiplier = std::int64_t{1} << 30; text.pop_back(); break;
    default: break;
    }
    std::size_t used = 0;
    std::int64_t value = 0;
    try {
        value = std::stoll(text, &used);
    } catch (const std::exception&) {
        throw ddm::InputError("bad memory limit '" + text + "'");
    }
    if (used != text.size() || value <= 0)
        throw ddm::InputError("bad memory limit '" + text + "'");
    if (value > std::numeric_limits<std::int64_t>::max() / multiplier)
        throw ddm::InputError("memory limit overflows");
    return value * multiplier;
}

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ','))
        if (!item.empty())
            parts.push_back(item);
    return parts;
}

std::vector<std::int64_t> parse_lag_spec(const std::string& spec, std::int64_t frames) {
    if (spec == "all")
        return ddm::all_lags(frames);
    if (spec == "log")
        return ddm::log_lags(frames);
    std::vector<std::int64_t> lags;
    for (const auto& part : split_commas(spec)) {
        try {
            std::size_t used = 0;
            lags.push_back(std::stoll(part, &used));
            if (used != part.size())
                throw std::invalid_argument(part);
        } catch (const std::exception&) {
            throw ddm::InputError("bad lag '" + part + "' in --lags");
        }
    }
    if (lags.empty())
        throw ddm::InputError("empty lag list");
    return ddm::normalize_lags(std::move(lags), frames);
}

ddm::StackFormat resolve_format(const std::string& name,
                                const std::filesystem::path& input) {
    if (name == "auto")
        return std::filesystem::is_directory(input) ? ddm::StackFormat::PgmDir
                                                    : ddm::StackFormat::RawStack;
    return ddm::parse_stack_format(name);
}

void write_json_file(const json& value, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw ddm::IoError("cannot open " + path.string() + " for writing");
    out << value.dump(2) << '\n';
    if (!out)
        throw ddm::IoError("write failed for " + path.string());
}

/// Test seam: truncates the first partial file so the merge step trips
/// over a corrupt input.
void corrupt_first_partial(const std::filesystem::path& workspace) {
    const auto files = ddm::list_partials(workspace);
    if (files.empty())
        return;
    std::error_code ec;
    std::filesystem::resize_file(files.front(), 10, ec);
    if (ec)
        throw ddm::IoError("cannot truncate " + files.front().string());
}

double relative_deviation(const ddm::ResultMap& a, const ddm::ResultMap& b) {
    double peak = 0.0;
    for (const double v : a.values)
        peak = std::max(peak, std::abs(v));
    for (const double v : b.values)
        peak = std::max(peak, std::abs(v));
    if (peak == 0.0)
        return 0.0;
    return ddm::max_abs_difference(a, b) / peak;
}

struct AnalyzeOptions {
    std::string input;
    std::string format = "auto";
    std::string algorithm = "with_ft";
    std::string lag_spec = "all";
    double q_max = -1.0; // negative = unset
    std::string memory_limit;
    int workers = 2;
    std::string precision = "f64";
    std::string out;
    bool corrupt_partial = false;
};

void add_engine_flags(CLI::App* cmd, AnalyzeOptions& opt, bool with_algorithm) {
    cmd->add_option("--input", opt.input, "stack path (file or directory)")
        ->required();
    cmd->add_option("--format", opt.format,
                    "input format: pgm_dir, raw_stack or auto (default auto)");
    if (with_algorithm)
        cmd->add_option("--algorithm", opt.algorithm,
                        "with_ft, without_ft or direct (default with_ft)");
    cmd->add_option("--lags", opt.lag_spec,
                    "lag selection: all, log, or a comma list (default all)");
    cmd->add_option("--q-max", opt.q_max,
                    "radial wave-vector cutoff (default: keep everything)");
    cmd->add_option("--memory-limit", opt.memory_limit,
                    "bulk buffer budget, K/M/G suffixes (default: half of RAM)");
    cmd->add_option("--workers", opt.workers, "worker threads (default 2)");
    cmd->add_option("--precision", opt.precision, "f32 or f64 (default f64)");
    cmd->add_flag("--corrupt-partial", opt.corrupt_partial)->group("");
}

ddm::RunConfig make_run_config(const AnalyzeOptions& opt, ddm::Algorithm algorithm,
                               std::int64_t frames) {
    ddm::RunConfig config;
    config.algorithm = algorithm;
    config.precision = ddm::parse_precision(opt.precision);
    config.lags = parse_lag_spec(opt.lag_spec, frames);
    if (opt.q_max >= 0.0)
        config.q_max = opt.q_max;
    config.memory_bytes = opt.memory_limit.empty() ? physical_memory_bytes() / 2
                                                   : parse_memory_limit(opt.memory_limit);
    config.workers = opt.workers;
    if (opt.corrupt_partial)
        config.before_merge = corrupt_first_partial;
    return config;
}

json echo_config(const AnalyzeOptions& opt, const ddm::RunConfig& config,
                 ddm::StackFormat format) {
    json echo;
    echo["tool_version"] = ddm::kVersion;
    echo["input"] = opt.input;
    echo["format"] = ddm::to_string(format);
    echo["lags"] = opt.lag_spec;
    echo["q_max"] = config.q_max ? json(*config.q_max) : json(nullptr);
    echo["memory_limit_bytes"] = config.memory_bytes;
    echo["workers"] = config.workers;
    echo["precision"] = ddm::to_string(config.precision);
    echo["out"] = opt.out;
    return echo;
}

int run_analyze(const AnalyzeOptions& opt) {
    const ddm::StackFormat format = resolve_format(opt.format, opt.input);
    const auto source = ddm::open_frame_source(opt.input, format);
    const ddm::Algorithm algorithm = ddm::parse_algorithm(opt.algorithm);
    if (algorithm == ddm::Algorithm::Direct && source->frames() > 1024)
        std::cerr << "warning: direct evaluates O(N^2) spatial transforms; "
                     "this will be slow for N = "
                  << source->frames() << "\n";

    ddm::RunConfig config = make_run_config(opt, algorithm, source->frames());
    config.out_dir = opt.out;

    const ddm::ResultArchive archive = ddm::run(*source, config);
    ddm::write_results(archive, opt.out);

    const auto wv = ddm::cutoff_set(static_cast<int>(archive.map.width),
                                    static_cast<int>(archive.map.height),
                                    archive.q_max);
    const ddm::RadialProfile profile = ddm::azimuthal_average(archive.map, wv);
    ddm::write_radial_csv(profile, std::filesystem::path(opt.out) / "radial.csv");
    const auto fits = ddm::fit_all_bins(profile);
    if (!fits.empty())
        ddm::write_fits_csv(fits, std::filesystem::path(opt.out) / "fits.csv");

    json echo = echo_config(opt, config, format);
    echo["subcommand"] = "analyze";
    echo["algorithm"] = archive.algorithm;
    write_json_file(echo, std::filesystem::path(opt.out) / "run.json");

    std::cout << archive.algorithm << ": N=" << archive.frames << " "
              << archive.map.width << "x" << archive.map.height << ", "
              << archive.map.lags.size() << " lags, total "
              << archive.timing.total << " s\n";
    return 0;
}

struct CompareOptions {
    AnalyzeOptions base;
    std::string algorithms = "with_ft,without_ft";
};

int run_compare(const CompareOptions& opt) {
    const auto names = split_commas(opt.algorithms);
    if (names.size() != 2)
        throw ddm::InputError("--algorithms needs exactly two names");

    const ddm::StackFormat format = resolve_format(opt.base.format, opt.base.input);
    const auto source = ddm::open_frame_source(opt.base.input, format);

    std::vector<ddm::ResultArchive> archives;
    for (const auto& name : names) {
        ddm::RunConfig config =
            make_run_config(opt.base, ddm::parse_algorithm(name), source->frames());
        archives.push_back(ddm::run(*source, config));
    }

    const double deviation = relative_deviation(archives[0].map, archives[1].map);
    const double tolerance =
        ddm::parse_precision(opt.base.precision) == ddm::Precision::F32 ? 1e-4 : 1e-9;
    const bool pass = deviation <= tolerance;

    for (const auto& archive : archives)
        std::cout << archive.algorithm << ": total " << archive.timing.total
                  << " s (disk " << archive.timing.disk << ", step1 "
                  << archive.timing.step1 << ", step2 " << archive.timing.step2
                  << ", merge " << archive.timing.merge << ")\n";
    std::cout << "max relative deviation: " << deviation << " (tolerance "
              << tolerance << ") -> " << (pass ? "OK" : "MISMATCH") << "\n";

    if (!opt.base.out.empty()) {
        std::filesystem::create_directories(opt.base.out);
        json report;
        report["subcommand"] = "compare";
        report["tool_version"] = ddm::kVersion;
        report["input"] = opt.base.input;
        report["format"] = ddm::to_string(format);
        report["algorithms"] = names;
        report["precision"] = opt.base.precision;
        report["deviation"] = deviation;
        report["tolerance"] = tolerance;
        report["pass"] = pass;
        write_json_file(report, std::filesystem::path(opt.base.out) / "compare.json");
    }
    return pass ? 0 : 1;
}

struct SynthOptions {
    std::int64_t particles = 100;
    double diffusion = 0.5;
    double psf_sigma = 1.0;
    double amplitude = 1000.0;
    double background = 100.0;
    int frames = 256;
    int size = 64;
    double frame_interval = 1.0;
    std::uint64_t seed = 0;
    std::string out;
};

int run_synth(const SynthOptions& opt) {
    ddm::SynthConfig config;
    config.particles = opt.particles;
    config.diffusion = opt.diffusion;
    config.psf_sigma = opt.psf_sigma;
    config.amplitude = opt.amplitude;
    config.background = opt.background;
    config.width = opt.size;
    config.height = opt.size;
    config.frames = opt.frames;
    config.frame_interval = opt.frame_interval;
    config.seed = opt.seed;

    const ddm::ImageStack stack = ddm::generate(config);
    std::filesystem::create_directories(opt.out);
    ddm::write_raw_stack(stack, std::filesystem::path(opt.out) / "stack.raw");
    ddm::write_synth_manifest(config, std::filesystem::path(opt.out) / "synth.json");
    std::cout << "wrote " << opt.out << "/stack.raw (" << config.frames << " frames, "
              << config.width << "x" << config.height << ")\n";
    return 0;
}

struct BenchOptions {
    std::string sweep_spec;
    std::string sizes = "32";
    std::string algorithms = "with_ft,without_ft";
    std::string workers = "2";
    std::string budgets;
    int repetitions = 3;
    int warmup = 1;
    std::string out;
};

int run_bench(const BenchOptions& opt) {
    ddm::SweepSpec spec;

    std::string frames_text = opt.sweep_spec;
    if (frames_text.rfind("N=", 0) == 0)
        frames_text = frames_text.substr(2);
    for (const auto& part : split_commas(frames_text))
        spec.frame_counts.push_back(std::stoi(part));
    for (const auto& part : split_commas(opt.sizes))
        spec.sizes.push_back(std::stoi(part));
    for (const auto& part : split_commas(opt.algorithms))
        spec.algorithms.push_back(ddm::parse_algorithm(part));
    spec.worker_counts.clear();
    for (const auto& part : split_commas(opt.workers))
        spec.worker_counts.push_back(std::stoi(part));
    for (const auto& part : split_commas(opt.budgets))
        spec.budgets.push_back(parse_memory_limit(part));
    spec.repetitions = opt.repetitions;
    spec.warmup = opt.warmup;

    const auto table = ddm::sweep(spec, ddm::synthetic_stack_factory());

    std::filesystem::create_directories(opt.out);
    ddm::write_bench_csv(table, std::filesystem::path(opt.out) / "bench.csv");

    json echo;
    echo["subcommand"] = "bench";
    echo["tool_version"] = ddm::kVersion;
    echo["sweep"] = opt.sweep_spec;
    echo["sizes"] = opt.sizes;
    echo["algorithms"] = opt.algorithms;
    echo["workers"] = opt.workers;
    echo["budgets"] = opt.budgets.empty() ? "default" : opt.budgets;
    echo["repetitions"] = spec.repetitions;
    echo["warmup"] = spec.warmup;
    echo["out"] = opt.out;
    write_json_file(echo, std::filesystem::path(opt.out) / "run.json");

    for (const auto& result : ddm::crossover(table)) {
        std::cout << "size " << result.size << ": crossover N* = ";
        if (result.n_star)
            std::cout << *result.n_star << "\n";
        else
            std::cout << "none\n";
    }
    std::cout << "wrote " << opt.out << "/bench.csv (" << table.size() << " rows)\n";
    return 0;
}

int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ddm::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ddm::PlanError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ddm::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::bad_alloc&) {
        std::cerr << "error: out of memory\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"differential dynamic microscopy under a memory budget"};
    app.set_version_flag("--version", std::string(ddm::kVersion));
    app.require_subcommand(1);

    AnalyzeOptions analyze_opt;
    auto* analyze_cmd =
        app.add_subcommand("analyze", "compute structure function maps");
    add_engine_flags(analyze_cmd, analyze_opt, true);
    analyze_cmd->add_option("--out", analyze_opt.out, "output directory")->required();

    CompareOptions compare_opt;
    auto* compare_cmd =
        app.add_subcommand("compare", "run two algorithms and compare maps");
    add_engine_flags(compare_cmd, compare_opt.base, false);
    compare_cmd->add_option("--algorithms", compare_opt.algorithms,
                            "two comma-separated algorithm names");
    compare_cmd->add_option("--out", compare_opt.base.out,
                            "optional directory for compare.json");

    SynthOptions synth_opt;
    auto* synth_cmd =
        app.add_subcommand("synth", "generate a synthetic Brownian stack");
    synth_cmd->add_option("--particles", synth_opt.particles, "particle count");
    synth_cmd->add_option("--diffusion", synth_opt.diffusion,
                          "diffusion coefficient, pixel^2/frame");
    synth_cmd->add_option("--psf-sigma", synth_opt.psf_sigma, "blob sigma, pixels");
    synth_cmd->add_option("--amplitude", synth_opt.amplitude, "blob peak intensity");
    synth_cmd->add_option("--background", synth_opt.background, "background level");
    synth_cmd->add_option("--frames", synth_opt.frames, "frame count");
    synth_cmd->add_option("--size", synth_opt.size, "square image size");
    synth_cmd->add_option("--frame-interval", synth_opt.frame_interval,
                          "seconds between frames");
    synth_cmd->add_option("--seed", synth_opt.seed, "PRNG seed");
    synth_cmd->add_option("--out", synth_opt.out, "output directory")->required();

    BenchOptions bench_opt;
    auto* bench_cmd = app.add_subcommand("bench", "timing and counter sweeps");
    bench_cmd->add_option("--sweep", bench_opt.sweep_spec, "frame counts, e.g. N=256,512")
        ->required();
    bench_cmd->add_option("--size", bench_opt.sizes, "square sizes, comma list");
    bench_cmd->add_option("--algorithms", bench_opt.algorithms, "comma list");
    bench_cmd->add_option("--workers", bench_opt.workers, "comma list");
    bench_cmd->add_option("--budgets", bench_opt.budgets,
                          "comma list with K/M/G suffixes");
    bench_cmd->add_option("--reps", bench_opt.repetitions, "repetitions (default 3)");
    bench_cmd->add_option("--warmup", bench_opt.warmup, "warmup runs (default 1)");
    bench_cmd->add_option("--out", bench_opt.out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (analyze_cmd->parsed())
        return guarded([&] { return run_analyze(analyze_opt); });
    if (compare_cmd->parsed())
        return guarded([&] { return run_compare(compare_opt); });
    if (synth_cmd->parsed())
        return guarded([&] { return run_synth(synth_opt); });
    if (bench_cmd->parsed())
        return guarded([&] { return run_bench(bench_opt); });
    return 1;
}
