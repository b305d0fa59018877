#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace bhchain::run {

/// Fixed numeric formatting shared by every CSV and JSON table: scientific,
/// 17 significant digits, '.' decimal, so goldens are byte-stable.
std::string format_number(double v);

/// CSV with a '#' units comment line, a header row, comma separators and
/// Unix newlines. The whole file is built in memory and written at once.
class CsvWriter {
public:
    void comment(const std::string& text);
    void header(const std::vector<std::string>& cols);
    void row(const std::vector<double>& values);
    void raw_row(const std::vector<std::string>& cells);
    const std::string& str() const { return buf_; }

private:
    std::string buf_;
};

std::uint64_t fnv1a64(const std::string& data);
std::string fnv1a64_hex(const std::string& data);

/// Writes a file and records it in the manifest inventory.
struct OutputRecord {
    std::string path;   // relative to the run directory
    std::size_t bytes = 0;
    std::string fnv1a64;
};

class RunManifest {
public:
    RunManifest(std::string out_dir, nlohmann::ordered_json resolved_config);

    /// Persist with status "running"; call before any long work starts so an
    /// interrupted run still leaves a manifest marking incompleteness.
    void write_running();

    void add_task(const std::string& id, bool ok, const std::string& message = "");
    bool any_task_failed() const { return failed_; }

    /// Writes `content` to out_dir/name and adds it to the inventory.
    void write_output(const std::string& name, const std::string& content);

    /// Final manifest write; status is completed / partial / failed.
    void finish(const std::string& status);

    const std::string& dir() const { return out_dir_; }

private:
    nlohmann::ordered_json base_json(const std::string& status) const;

    std::string out_dir_;
    nlohmann::ordered_json config_;
    nlohmann::ordered_json tasks_ = nlohmann::ordered_json::array();
    std::vector<OutputRecord> outputs_;
    std::string started_at_;
    bool failed_ = false;
};

/// Writes a minimal failure manifest (used when the config itself is bad).
void write_failure_manifest(const std::string& out_dir, const std::string& message);

std::string iso8601_utc_now();

}  // namespace bhchain::run
