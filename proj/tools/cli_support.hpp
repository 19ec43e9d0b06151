#pragma once

#include <array>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dicke3.h"

namespace cli {

// Input problems the user can fix (bad file, bad config): exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Library failure carrying its status.
struct ApiError : std::runtime_error {
    dicke3_status status;
    ApiError(dicke3_status s, const std::string& what) : std::runtime_error(what), status(s) {}
};

void check(dicke3_status status, const std::string& context);

// ---- CSV ------------------------------------------------------------------

std::string format_number(double v); // %.12g

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    int column(const std::string& name) const; // -1 when absent
};

void write_csv(std::FILE* out, const CsvTable& table);
void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);

// ---- run configuration -----------------------------------------------------

struct GRange {
    double start{0.0};
    double stop{0.0};
    double step{0.0};

    std::vector<double> values() const;
};

struct RunConfig {
    double delta{1.0};
    double omega{1.0};
    double g{0.1};
    int nmax{40};
    std::vector<std::string> methods; // empty: subcommand default
    double tmax_scaled{3.0};
    int steps{400};
    int gme_stride{4};
    double tol{1e-8};
    int levels{8};
    std::optional<GRange> g_range;
    std::string out;
    std::string plot_script;

    void validate() const;
};

// Overwrites fields present in the JSON file; unknown keys are rejected.
void apply_config_file(const std::string& path, RunConfig& config);

GRange parse_g_range(const std::string& text); // "start:stop:step"

std::vector<dicke3_method> parse_methods(const std::vector<std::string>& names, bool force_exact);

// DICKE3_THREADS caps the worker count (hardware concurrency otherwise).
unsigned worker_threads();

// ---- density files ---------------------------------------------------------

// "dim 8" followed by 64 row-major "re,im" tokens separated by whitespace.
// Returns interleaved re/im doubles; errors name the line and column.
std::vector<double> read_density_file(const std::string& path, int& dim);
std::vector<double> parse_density(const std::string& text, const std::string& source, int& dim);
void write_density_file(const std::string& path, const double* rho, int dim);

// ---- plot scripts ----------------------------------------------------------

enum class PlotKind { spectrum, dynamics };

// gnuplot script for `csv_path`; the CSV header must carry the needed columns.
std::string plot_script(const std::string& csv_path, PlotKind kind);
void write_plot_script(const std::string& script_path, const std::string& csv_path, PlotKind kind);

// ---- column names ----------------------------------------------------------

std::string population_column(int spin_index, const std::string& method);
extern const std::array<const char*, 4> population_labels;

} // namespace cli
