#include "cli_support.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace cli {

void check(dicke3_status status, const std::string& context) {
    if (status == DICKE3_OK) return;
    throw ApiError(status, context + ": " + dicke3_last_error());
}

// ---- CSV ------------------------------------------------------------------

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

int CsvTable::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

void write_csv(std::FILE* out, const CsvTable& table) {
    for (std::size_t j = 0; j < table.header.size(); ++j)
        std::fprintf(out, "%s%s", j ? "," : "", table.header[j].c_str());
    std::fputc('\n', out);
    for (const auto& row : table.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) std::fprintf(out, "%s%s", j ? "," : "", format_number(row[j]).c_str());
        std::fputc('\n', out);
    }
}

void write_csv(const std::string& path, const CsvTable& table) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    write_csv(f, table);
    if (std::fclose(f) != 0) throw std::runtime_error("error writing " + path);
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

bool parse_double(const std::string& s, double& v) {
    if (s.empty()) return false;
    char* end = nullptr;
    errno = 0;
    v = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && errno != ERANGE;
}

} // namespace

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open " + path);
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw UsageError(path + ": empty file");
    t.header = split(line, ',');
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != t.header.size())
            throw UsageError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                             " fields, found " + std::to_string(cells.size()));
        std::vector<double> row(cells.size());
        for (std::size_t j = 0; j < cells.size(); ++j)
            if (!parse_double(cells[j], row[j]) && cells[j] != "nan")
                throw UsageError(path + ":" + std::to_string(lineno) + ": field '" + t.header[j] + "' is not a number");
        t.rows.push_back(std::move(row));
    }
    return t;
}

// ---- run configuration -----------------------------------------------------

std::vector<double> GRange::values() const {
    std::vector<double> out;
    const long n = std::lround((stop - start) / step);
    for (long i = 0; i <= n; ++i) out.push_back(start + static_cast<double>(i) * step);
    return out;
}

GRange parse_g_range(const std::string& text) {
    const auto parts = split(text, ':');
    GRange r;
    if (parts.size() != 3 || !parse_double(parts[0], r.start) || !parse_double(parts[1], r.stop) ||
        !parse_double(parts[2], r.step))
        throw UsageError("--g-range expects start:stop:step, got '" + text + "'");
    return r;
}

void RunConfig::validate() const {
    auto finite_nonneg = [](double v, const char* name) {
        if (!std::isfinite(v) || v < 0.0) throw UsageError(std::string(name) + " must be finite and >= 0");
    };
    auto positive = [](double v, const char* name) {
        if (!std::isfinite(v) || v <= 0.0) throw UsageError(std::string(name) + " must be finite and > 0");
    };
    finite_nonneg(delta, "delta");
    positive(omega, "omega");
    finite_nonneg(g, "g");
    positive(tmax_scaled, "tmax-scaled");
    positive(tol, "tol");
    if (nmax < 3) throw UsageError("nmax must be at least 3");
    if (steps < 1) throw UsageError("steps must be at least 1");
    if (gme_stride < 1) throw UsageError("gme-stride must be at least 1");
    if (levels < 1 || levels > 4 * (nmax + 1)) throw UsageError("levels must be in 1..4(nmax+1)");
    if (g_range) {
        finite_nonneg(g_range->start, "g-range start");
        finite_nonneg(g_range->stop, "g-range stop");
        positive(g_range->step, "g-range step");
        if (g_range->stop < g_range->start) throw UsageError("g-range stop must not be below start");
        if ((g_range->stop - g_range->start) / g_range->step > 1e5) throw UsageError("g-range has too many points");
    }
}

void apply_config_file(const std::string& path, RunConfig& c) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw UsageError("config " + path + ": " + e.what());
    }
    if (!j.is_object()) throw UsageError("config " + path + ": top level must be an object");
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "delta") c.delta = v.get<double>();
            else if (key == "omega") c.omega = v.get<double>();
            else if (key == "g") c.g = v.get<double>();
            else if (key == "nmax") c.nmax = v.get<int>();
            else if (key == "method") c.methods = v.is_array() ? v.get<std::vector<std::string>>()
                                                                : std::vector<std::string>{v.get<std::string>()};
            else if (key == "tmax_scaled") c.tmax_scaled = v.get<double>();
            else if (key == "steps") c.steps = v.get<int>();
            else if (key == "gme_stride") c.gme_stride = v.get<int>();
            else if (key == "tol") c.tol = v.get<double>();
            else if (key == "levels") c.levels = v.get<int>();
            else if (key == "g_range") c.g_range = parse_g_range(v.get<std::string>());
            else if (key == "out") c.out = v.get<std::string>();
            else if (key == "plot_script") c.plot_script = v.get<std::string>();
            else throw UsageError("config " + path + ": unknown key '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("config " + path + ": " + e.what());
    }
}

std::vector<dicke3_method> parse_methods(const std::vector<std::string>& names, bool force_exact) {
    std::vector<dicke3_method> out;
    if (force_exact) out.push_back(DICKE3_METHOD_EXACT);
    for (const auto& n : names) {
        dicke3_method m;
        if (dicke3_method_parse(n.c_str(), &m) != DICKE3_OK)
            throw UsageError("unknown method '" + n + "' (expected exact, rwa, zeroth or grwa)");
        if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    }
    return out;
}

unsigned worker_threads() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("DICKE3_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || cap < 1) throw UsageError("DICKE3_THREADS must be a positive integer");
        n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return n;
}

// ---- density files ---------------------------------------------------------

std::vector<double> parse_density(const std::string& text, const std::string& source, int& dim) {
    auto where = [&](int line, int col) { return source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": "; };
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    dim = 0;
    std::vector<double> out;
    std::size_t expected = 0;
    int last_line = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::size_t pos = 0;
        while (true) {
            pos = line.find_first_not_of(" \t\r", pos);
            if (pos == std::string::npos) break;
            const std::size_t end = std::min(line.find_first_of(" \t\r", pos), line.size());
            const std::string tok = line.substr(pos, end - pos);
            const int col = static_cast<int>(pos) + 1;
            if (dim == 0) {
                if (tok != "dim") throw UsageError(where(lineno, col) + "expected 'dim N' header, found '" + tok + "'");
                const std::size_t p2 = line.find_first_not_of(" \t\r", end);
                if (p2 == std::string::npos) throw UsageError(where(lineno, static_cast<int>(end) + 1) + "missing dimension after 'dim'");
                const std::size_t e2 = std::min(line.find_first_of(" \t\r", p2), line.size());
                const std::string num = line.substr(p2, e2 - p2);
                double d = 0.0;
                if (!parse_double(num, d) || d != std::floor(d) || d != 8.0)
                    throw UsageError(where(lineno, static_cast<int>(p2) + 1) + "dimension must be 8, found '" + num + "'");
                dim = static_cast<int>(d);
                expected = static_cast<std::size_t>(2 * dim * dim);
                if (line.find_first_not_of(" \t\r", e2) != std::string::npos)
                    throw UsageError(where(lineno, static_cast<int>(e2) + 1) + "unexpected text after the header");
                break;
            }
            const auto comma = tok.find(',');
            double re = 0.0, im = 0.0;
            if (comma == std::string::npos)
                throw UsageError(where(lineno, col) + "expected 're,im', found '" + tok + "'");
            if (!parse_double(tok.substr(0, comma), re))
                throw UsageError(where(lineno, col) + "bad real part in '" + tok + "'");
            if (!parse_double(tok.substr(comma + 1), im))
                throw UsageError(where(lineno, col + static_cast<int>(comma) + 1) + "bad imaginary part in '" + tok + "'");
            if (!std::isfinite(re) || !std::isfinite(im)) throw UsageError(where(lineno, col) + "entry is not finite");
            if (out.size() == expected)
                throw UsageError(where(lineno, col) + "more than " + std::to_string(dim * dim) + " entries");
            out.push_back(re);
            out.push_back(im);
            last_line = lineno;
            pos = end;
        }
    }
    if (dim == 0) throw UsageError(source + ": missing 'dim N' header");
    if (out.size() != expected)
        throw UsageError(source + ":" + std::to_string(std::max(last_line, lineno)) + ": expected " +
                         std::to_string(dim * dim) + " entries, found " + std::to_string(out.size() / 2));
    return out;
}

std::vector<double> read_density_file(const std::string& path, int& dim) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_density(ss.str(), path, dim);
}

void write_density_file(const std::string& path, const double* rho, int dim) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "dim " << dim << '\n';
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            const double* z = rho + 2 * (i * dim + j);
            out << (j ? " " : "") << format_number(z[0]) << ',' << format_number(z[1]);
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("error writing " + path);
}

// ---- plot scripts ----------------------------------------------------------

const std::array<const char*, 4> population_labels{"p3_2", "p1_2", "m1_2", "m3_2"};

std::string population_column(int spin_index, const std::string& method) {
    return std::string("P_") + population_labels[spin_index] + "_" + method;
}

namespace {

const char* method_names[] = {"exact", "rwa", "zeroth", "grwa"};

void require_column(const CsvTable& t, const std::string& csv, const std::string& name) {
    if (t.column(name) < 0) throw UsageError(csv + ": missing column '" + name + "'");
}

} // namespace

std::string plot_script(const std::string& csv_path, PlotKind kind) {
    const CsvTable t = read_csv(csv_path);
    std::ostringstream s;
    s << "# gnuplot >= 5.4\n"
      << "set datafile separator ','\n"
      << "set datafile columnheaders\n";
    if (kind == PlotKind::spectrum) {
        require_column(t, csv_path, "g_over_omega");
        require_column(t, csv_path, "level_index");
        require_column(t, csv_path, "exact");
        int levels = 0;
        const int li = t.column("level_index");
        for (const auto& r : t.rows) levels = std::max(levels, static_cast<int>(r[li]) + 1);
        s << "set terminal pngcairo size 900,650\n"
          << "set output '" << csv_path << ".png'\n"
          << "set xlabel 'g/ω'\nset ylabel 'E/ω'\nset key top left\n"
          << "plot \\\n";
        bool first = true;
        int style = 1;
        for (const char* m : method_names) {
            if (t.column(m) < 0) continue;
            if (!first) s << ", \\\n";
            first = false;
            // rows are g-major with `levels` rows per grid point
            s << "  for [l=0:" << levels - 1 << "] '" << csv_path << "' every " << levels << "::l using 'g_over_omega':'"
              << m << "' with lines lt " << style << " title (l == 0 ? '" << m << "' : '')";
            ++style;
        }
        s << "\n";
    } else {
        require_column(t, csv_path, "t_scaled");
        std::vector<std::string> methods;
        for (const char* m : method_names)
            if (t.column(std::string("concurrence_") + m) >= 0) methods.push_back(m);
        if (methods.empty()) throw UsageError(csv_path + ": missing column 'concurrence_<method>'");
        for (const auto& m : methods) {
            require_column(t, csv_path, "gme_" + m);
            require_column(t, csv_path, "negativity_AB_C_" + m);
        }
        s << "set terminal pngcairo size 900,1100\n"
          << "set output '" << csv_path << ".png'\n"
          << "set multiplot layout 3,1\n"
          << "set xlabel 'Δt/2π'\n";
        const std::pair<const char*, const char*> panels[] = {
            {"gme_", "E(ρ)"}, {"concurrence_", "C"}, {"negativity_AB_C_", "N_{AB|C}"}};
        for (const auto& [prefix, label] : panels) {
            s << "set ylabel '" << label << "'\nplot ";
            for (std::size_t k = 0; k < methods.size(); ++k)
                s << (k ? ", \\\n     " : "") << "'" << csv_path << "' using 't_scaled':'" << prefix << methods[k]
                  << "' with lines title '" << methods[k] << "'";
            s << "\n";
        }
        s << "unset multiplot\n";
    }
    return s.str();
}

void write_plot_script(const std::string& script_path, const std::string& csv_path, PlotKind kind) {
    const std::string text = plot_script(csv_path, kind);
    std::ofstream out(script_path);
    if (!out) throw std::runtime_error("cannot open " + script_path + " for writing");
    out << text;
    if (!out) throw std::runtime_error("error writing " + script_path);
}

} // namespace cli
