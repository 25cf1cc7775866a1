#include "ddm/archive.hpp"

#include "ddm/errors.hpp"
#include "ddm/version.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace ddm {

namespace {

using nlohmann::json;

void write_doubles(std::ofstream& out, std::span<const double> values) {
    // this build targets little-endian hosts, so raw doubles are f64le
    static_assert(sizeof(double) == 8);
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(double)));
}

void read_doubles(std::ifstream& in, std::span<double> values) {
    in.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(double)));
    if (!in)
        throw IoError("short read of binary map data");
}

std::string map_filename(std::int64_t lag) { return "d_m" + std::to_string(lag) + ".bin"; }

json parse_json(const std::string& text, const std::string& what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded())
        throw InputError("malformed JSON in " + what);
    return j;
}

} // namespace

void ResultArchive::validate() const {
    double peak = 0.0;
    for (const double v : map.values) {
        if (!std::isfinite(v))
            throw InputError("result map contains non-finite values");
        peak = std::max(peak, v);
    }
    // the negativity floor absorbs round-off from the subtraction form of the
    // estimator; single precision rounds five orders of magnitude coarser
    const double epsilon = precision == "f32" ? 1e-4 : 1e-9;
    const double floor = -epsilon * std::max(peak, 1.0);
    for (const double v : map.values)
        if (v < floor)
            throw InputError("result map contains negative values beyond tolerance");
}

std::filesystem::path write_results(const ResultArchive& archive,
                                    const std::filesystem::path& out_dir) {
    if (archive.map.lags.empty())
        throw InputError("no lags");
    archive.validate();

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw IoError("cannot create output directory " + out_dir.string());

    for (std::size_t i = 0; i < archive.map.lags.size(); ++i) {
        const auto path = out_dir / map_filename(archive.map.lags[i]);
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot open " + path.string() + " for writing");
        write_doubles(out, archive.map.lag_plane(static_cast<std::int64_t>(i)));
        if (!out)
            throw IoError("write failed for " + path.string());
    }

    json manifest;
    manifest["format_version"] = kFormatVersion;
    manifest["tool_version"] = kVersion;
    manifest["width"] = archive.map.width;
    manifest["height"] = archive.map.height;
    manifest["half_cols"] = half_cols(archive.map.width);
    manifest["frames"] = archive.frames;
    manifest["frame_interval"] = archive.map.frame_interval;
    manifest["algorithm"] = archive.algorithm;
    manifest["precision"] = archive.precision;
    manifest["q_max"] = archive.q_max ? json(*archive.q_max) : json(nullptr);
    manifest["workers"] = archive.workers;
    manifest["lags"] = archive.map.lags;
    json files = json::array();
    for (const auto lag : archive.map.lags)
        files.push_back({{"lag", lag}, {"file", map_filename(lag)}});
    manifest["maps"] = files;
    manifest["counters"] = {{"spatial_ffts", archive.counters.spatial_ffts},
                            {"temporal_ffts", archive.counters.temporal_ffts},
                            {"pairs", archive.counters.pairs}};
    // wall-clock values are isolated here so everything else is reproducible
    manifest["timing"] = {{"disk", archive.timing.disk},     {"step1", archive.timing.step1},
                          {"step2", archive.timing.step2},   {"merge", archive.timing.merge},
                          {"other", archive.timing.other},   {"total", archive.timing.total}};

    const auto manifest_path = out_dir / "index.json";
    std::ofstream out(manifest_path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + manifest_path.string() + " for writing");
    out << manifest.dump(2) << '\n';
    if (!out)
        throw IoError("write failed for " + manifest_path.string());
    return manifest_path;
}

ResultArchive read_results(const std::filesystem::path& dir) {
    const auto manifest_path = dir / "index.json";
    std::ifstream in(manifest_path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + manifest_path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const json manifest = parse_json(text, manifest_path.string());

    ResultArchive archive;
    try {
        archive.map.width = manifest.at("width").get<std::int64_t>();
        archive.map.height = manifest.at("height").get<std::int64_t>();
        archive.map.frame_interval = manifest.at("frame_interval").get<double>();
        archive.frames = manifest.at("frames").get<std::int64_t>();
        archive.algorithm = manifest.at("algorithm").get<std::string>();
        archive.precision = manifest.at("precision").get<std::string>();
        if (!manifest.at("q_max").is_null())
            archive.q_max = manifest.at("q_max").get<double>();
        archive.workers = manifest.at("workers").get<int>();
        archive.map.lags = manifest.at("lags").get<std::vector<std::int64_t>>();
        const auto& counters = manifest.at("counters");
        archive.counters.spatial_ffts = counters.at("spatial_ffts").get<std::uint64_t>();
        archive.counters.temporal_ffts = counters.at("temporal_ffts").get<std::uint64_t>();
        archive.counters.pairs = counters.at("pairs").get<std::uint64_t>();
        const auto& timing = manifest.at("timing");
        archive.timing.disk = timing.at("disk").get<double>();
        archive.timing.step1 = timing.at("step1").get<double>();
        archive.timing.step2 = timing.at("step2").get<double>();
        archive.timing.merge = timing.at("merge").get<double>();
        archive.timing.other = timing.at("other").get<double>();
        archive.timing.total = timing.at("total").get<double>();
    } catch (const json::exception& e) {
        throw InputError("bad manifest " + manifest_path.string() + ": " + e.what());
    }

    if (archive.map.width < 1 || archive.map.height < 1 || archive.map.lags.empty())
        throw InputError("bad manifest " + manifest_path.string() + ": degenerate shape");

    const auto plane = static_cast<std::size_t>(archive.map.plane_size());
    archive.map.values.resize(plane * archive.map.lags.size());
    for (std::size_t i = 0; i < archive.map.lags.size(); ++i) {
        const auto path = dir / map_filename(archive.map.lags[i]);
        std::ifstream map_in(path, std::ios::binary);
        if (!map_in)
            throw IoError("cannot open " + path.string());
        read_doubles(map_in, archive.map.lag_plane(static_cast<std::int64_t>(i)));
    }
    return archive;
}

std::filesystem::path write_partial(const PartialResult& partial,
                                    const std::filesystem::path& out_dir) {
    if (partial.wv_begin < 0 || partial.wv_end <= partial.wv_begin)
        throw InputError("partial has empty wave-vector range");
    if (partial.values.size() !=
        partial.lags.size() * static_cast<std::size_t>(partial.wv_count()))
        throw InputError("partial value count does not match header");

    const auto dir = out_dir / "partials";
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create " + dir.string());

    json header;
    header["group"] = partial.group;
    header["wv_begin"] = partial.wv_begin;
    header["wv_end"] = partial.wv_end;
    header["width"] = partial.width;
    header["height"] = partial.height;
    header["frames"] = partial.frames;
    header["frame_interval"] = partial.frame_interval;
    header["q_max"] = partial.q_max ? json(*partial.q_max) : json(nullptr);
    header["lags"] = partial.lags;
    header["dtype"] = "f64le";

    const auto path = dir / ("group" + std::to_string(partial.group) + ".bin");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out << header.dump() << '\n';
    write_doubles(out, partial.values);
    if (!out)
        throw IoError("write failed for " + path.string());
    return path;
}

PartialResult read_partial(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + file.string());
    std::string line;
    if (!std::getline(in, line))
        throw InputError("missing header in " + file.string());
    const json header = parse_json(line, file.string());

    PartialResult partial;
    try {
        partial.group = header.at("group").get<std::int64_t>();
        partial.wv_begin = header.at("wv_begin").get<std::int64_t>();
        partial.wv_end = header.at("wv_end").get<std::int64_t>();
        partial.width = header.at("width").get<std::int64_t>();
        partial.height = header.at("height").get<std::int64_t>();
        partial.frames = header.at("frames").get<std::int64_t>();
        partial.frame_interval = header.at("frame_interval").get<double>();
        if (!header.at("q_max").is_null())
            partial.q_max = header.at("q_max").get<double>();
        partial.lags = header.at("lags").get<std::vector<std::int64_t>>();
        if (header.at("dtype").get<std::string>() != "f64le")
            throw InputError("unsupported partial dtype in " + file.string());
    } catch (const json::exception& e) {
        throw InputError("bad partial header " + file.string() + ": " + e.what());
    }

    if (partial.wv_begin < 0 || partial.wv_end <= partial.wv_begin || partial.lags.empty())
        throw InputError("bad partial header " + file.string() + ": degenerate range");

    partial.values.resize(partial.lags.size() * static_cast<std::size_t>(partial.wv_count()));
    read_doubles(in, partial.values);
    return partial;
}

std::vector<std::filesystem::path> list_partials(const std::filesystem::path& out_dir) {
    const auto dir = out_dir / "partials";
    std::vector<std::pair<long long, std::filesystem::path>> found;
    if (!std::filesystem::exists(dir))
        return {};
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file())
            continue;
        const auto name = entry.path().filename().string();
        if (name.rfind("group", 0) != 0 || entry.path().extension() != ".bin")
            continue;
        const auto digits = name.substr(5, name.size() - 5 - 4);
        try {
            found.emplace_back(std::stoll(digits), entry.path());
        } catch (const std::exception&) {
            continue; // not one of ours
        }
    }
    std::sort(found.begin(), found.end());
    std::vector<std::filesystem::path> paths;
    paths.reserve(found.size());
    for (auto& [num, path] : found)
        paths.push_back(std::move(path));
    return paths;
}

} // namespace ddm
