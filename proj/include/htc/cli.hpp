#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "htc/params.hpp"
#include "htc/spectra.hpp"

namespace htc {

inline constexpr const char* program_version = "1.0.0";

enum class Task { dispersion, spectra, find_critical, dark_report, validate };
const char* to_string(Task t);
Task task_from_string(const std::string& s);

enum class OutputFormat { csv, json };

struct RunConfig {
    ModelParams params;
    Task task = Task::find_critical;
    std::vector<double> k_grid;
    std::vector<double> omega_grid;
    std::vector<double> omega_p_grid;
    double drive_amplitude = 1e-3;
    double k_par = 0.0;
    PopulationModel population;
    std::vector<int> scan_n;            // find-critical scan
    std::vector<double> scan_huang_rhys;
    nlohmann::json validate = nlohmann::json::object();
    double omega_v_ev = 0.0;            // > 0 converts frequency columns to eV
    std::filesystem::path out_dir = ".";
    OutputFormat format = OutputFormat::csv;
    int threads = 1;
};

// Throws std::invalid_argument naming the offending field, or carrying the
// line and column of a JSON syntax error.
RunConfig parse_config(const std::string& text, Task task);
RunConfig load_config(const std::filesystem::path& path, Task task);

// Returns the process exit status: 0 success, 1 failed validation.
// Errors are thrown.
int run(const RunConfig& config, std::ostream& log);

// Oracle comparisons used by the validate task.
nlohmann::json run_validation(const RunConfig& config, bool& all_passed);

// Command-line entry point: 0 success, 1 failed validation, 2 usage or
// configuration error, 3 runtime failure.
int cli_main(int argc, char** argv);

}  // namespace htc
