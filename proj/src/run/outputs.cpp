#include "run/outputs.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "bhchain/kernels.hpp"
#include "bhchain/params.hpp"

namespace bhchain::run {

namespace fs = std::filesystem;

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    return buf;
}

void CsvWriter::comment(const std::string& text) {
    buf_ += "# ";
    buf_ += text;
    buf_ += "\n";
}

void CsvWriter::header(const std::vector<std::string>& cols) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) buf_ += ",";
        buf_ += cols[i];
    }
    buf_ += "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) buf_ += ",";
        buf_ += format_number(values[i]);
    }
    buf_ += "\n";
}

void CsvWriter::raw_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) buf_ += ",";
        buf_ += cells[i];
    }
    buf_ += "\n";
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string fnv1a64_hex(const std::string& data) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(data)));
    return buf;
}

std::string iso8601_utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

namespace {

void write_file(const fs::path& p, const std::string& content) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << content;
}

nlohmann::ordered_json platform_json() {
    nlohmann::ordered_json p;
#if defined(__linux__)
    p["os"] = "linux";
#elif defined(__APPLE__)
    p["os"] = "darwin";
#else
    p["os"] = "other";
#endif
#if defined(__x86_64__)
    p["arch"] = "x86_64";
#elif defined(__aarch64__)
    p["arch"] = "aarch64";
#else
    p["arch"] = "other";
#endif
    p["kernel_backend"] = kernels::backend_name();
    return p;
}

}  // namespace

RunManifest::RunManifest(std::string out_dir, nlohmann::ordered_json resolved_config)
    : out_dir_(std::move(out_dir)), config_(std::move(resolved_config)),
      started_at_(iso8601_utc_now()) {}

nlohmann::ordered_json RunManifest::base_json(const std::string& status) const {
    nlohmann::ordered_json m;
    m["tool"] = "bhchain";
    m["version"] = kVersion;
    m["platform"] = platform_json();
    m["started_at"] = started_at_;
    m["finished_at"] = status == "running" ? "" : iso8601_utc_now();
    m["status"] = status;
    m["config"] = config_;
    m["tasks"] = tasks_;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& o : outputs_)
        arr.push_back({{"path", o.path}, {"bytes", o.bytes}, {"fnv1a64", o.fnv1a64}});
    m["outputs"] = arr;
    return m;
}

void RunManifest::write_running() {
    write_file(fs::path(out_dir_) / "run_manifest.json", base_json("running").dump(2) + "\n");
}

void RunManifest::add_task(const std::string& id, bool ok, const std::string& message) {
    tasks_.push_back({{"id", id}, {"status", ok ? "ok" : "failed"}, {"message", message}});
    if (!ok) failed_ = true;
}

void RunManifest::write_output(const std::string& name, const std::string& content) {
    write_file(fs::path(out_dir_) / name, content);
    outputs_.push_back({name, content.size(), fnv1a64_hex(content)});
}

void RunManifest::finish(const std::string& status) {
    write_file(fs::path(out_dir_) / "run_manifest.json", base_json(status).dump(2) + "\n");
}

void write_failure_manifest(const std::string& out_dir, const std::string& message) {
    nlohmann::ordered_json m;
    m["tool"] = "bhchain";
    m["version"] = kVersion;
    m["platform"] = platform_json();
    m["started_at"] = iso8601_utc_now();
    m["finished_at"] = iso8601_utc_now();
    m["status"] = "failed";
    m["error"] = message;
    write_file(fs::path(out_dir) / "run_manifest.json", m.dump(2) + "\n");
}

}  // namespace bhchain::run
