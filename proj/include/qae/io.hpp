// io.hpp — file formats: matrix text files, trace CSV, config files, and
// artifact checksums.
#pragma once

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qae/linalg.hpp"
#include "qae/trainer.hpp"

namespace qae {

// distinguishes filesystem trouble (CLI exit 2) from bad input (exit 1)
class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---- matrix text format ----------------------------------------------------
// One matrix row per line, each entry a "re im" pair, row-major; a blank
// line ends a matrix; '#' starts a comment line. Written with 17 significant
// digits so values round-trip exactly.

inline void write_matrices(std::ostream& os, const std::vector<CMat>& mats) {
    os << std::setprecision(17);
    bool first = true;
    for (const CMat& m : mats) {
        if (!first) os << "\n";
        first = false;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            for (std::size_t j = 0; j < m.cols(); ++j) {
                if (j) os << ' ';
                os << m(i, j).real() << ' ' << m(i, j).imag();
            }
            os << '\n';
        }
    }
}

inline std::vector<CMat> read_matrices(std::istream& is) {
    std::vector<CMat> mats;
    std::vector<std::vector<cplx>> rows;
    std::string line;
    std::size_t line_no = 0;

    const auto flush = [&]() {
        if (rows.empty()) return;
        const std::size_t cols = rows.front().size();
        for (const auto& r : rows)
            if (r.size() != cols)
                throw std::runtime_error(
                    "matrix file: ragged rows before line " +
                    std::to_string(line_no));
        CMat m(rows.size(), cols);
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
        mats.push_back(std::move(m));
        rows.clear();
    };

    while (std::getline(is, line)) {
        ++line_no;
        const auto start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos) {
            flush();
            continue;
        }
        if (line[start] == '#') continue;
        std::istringstream ss(line);
        std::vector<double> nums;
        double v;
        while (ss >> v) nums.push_back(v);
        std::string trailing;
        if (!ss.eof() && ss.fail()) {
            throw std::runtime_error("matrix file: bad number at line " +
                                     std::to_string(line_no));
        }
        if (nums.empty() || nums.size() % 2 != 0)
            throw std::runtime_error(
                "matrix file: expected re/im pairs at line " +
                std::to_string(line_no));
        std::vector<cplx> row;
        for (std::size_t k = 0; k < nums.size(); k += 2)
            row.emplace_back(nums[k], nums[k + 1]);
        rows.push_back(std::move(row));
    }
    flush();
    if (mats.empty())
        throw std::runtime_error("matrix file: no matrices found");
    return mats;
}

inline std::vector<CMat> read_matrix_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw io_error("cannot open matrix file: " + path);
    return read_matrices(f);
}

// ---- trace CSV -------------------------------------------------------------
// eval_index, iteration, phase, cost, one angle column per parameter
// (degrees, 6 decimals as recorded), events as semicolon-joined tokens.

inline std::string phase_label(const TraceRecord& r) {
    if (r.phase == TracePhase::move) return "move";
    return "probe(" + std::to_string(r.probe_param + 1) + ")";
}

inline std::string event_labels(unsigned events) {
    std::string s;
    const auto add = [&](const char* tok) {
        if (!s.empty()) s += ';';
        s += tok;
    };
    if (events & trace_event::kick) add("kick");
    if (events & trace_event::drift) add("drift");
    if (events & trace_event::phase_switch) add("phase_switch");
    return s;
}

inline void write_trace_csv(std::ostream& os, const TrainingTrace& trace,
                            std::size_t param_count) {
    os << "eval_index,iteration,phase,cost";
    for (std::size_t k = 1; k <= param_count; ++k) os << ",x" << k;
    os << ",events\n";
    for (const TraceRecord& r : trace.records) {
        os << r.eval_index << ',' << r.iteration << ',' << phase_label(r)
           << ',' << std::setprecision(17) << r.cost_measured;
        os << std::fixed << std::setprecision(6);
        for (std::size_t k = 0; k < param_count; ++k)
            os << ',' << r.angles[k];
        os.unsetf(std::ios_base::fixed);
        os << ',' << event_labels(r.events) << '\n';
    }
}

// ---- checksums -------------------------------------------------------------

inline std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string fnv1a64_hex(const std::string& bytes) {
    std::ostringstream ss;
    ss << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(bytes);
    return ss.str();
}

// ---- config files ----------------------------------------------------------
/// INI-style: [section] headers, key = value lines, '#' or ';' comments.
// Lookups use "section.key" paths.

class ConfigMap {
public:
    void set(const std::string& path, const std::string& value) {
        values_[path] = value;
    }

    bool has(const std::string& path) const { return values_.count(path) > 0; }

    std::optional<std::string> get(const std::string& path) const {
        const auto it = values_.find(path);
        if (it == values_.end()) return std::nullopt;
        return it->second;
    }

    std::string get_string(const std::string& path,
                           const std::string& fallback) const {
        return get(path).value_or(fallback);
    }

    double get_double(const std::string& path, double fallback) const {
        const auto v = get(path);
        if (!v) return fallback;
        try {
            std::size_t used = 0;
            const double d = std::stod(*v, &used);
            if (used != v->size()) throw std::invalid_argument("trailing");
            return d;
        } catch (const std::exception&) {
            throw std::invalid_argument("config: '" + path +
                                        "' is not a number: " + *v);
        }
    }

    long get_long(const std::string& path, long fallback) const {
        const auto v = get(path);
        if (!v) return fallback;
        try {
            std::size_t used = 0;
            const long n = std::stol(*v, &used);
            if (used != v->size()) throw std::invalid_argument("trailing");
            return n;
        } catch (const std::exception&) {
            throw std::invalid_argument("config: '" + path +
                                        "' is not an integer: " + *v);
        }
    }

    std::uint64_t get_u64(const std::string& path,
                          std::uint64_t fallback) const {
        const auto v = get(path);
        if (!v) return fallback;
        try {
            std::size_t used = 0;
            const std::uint64_t n = std::stoull(*v, &used);
            if (used != v->size()) throw std::invalid_argument("trailing");
            return n;
        } catch (const std::exception&) {
            throw std::invalid_argument("config: '" + path +
                                        "' is not an unsigned integer: " + *v);
        }
    }

    const std::map<std::string, std::string>& entries() const {
        return values_;
    }

private:
    std::map<std::string, std::string> values_;
};

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline ConfigMap parse_config(std::istream& is) {
    ConfigMap cfg;
    std::string line, section;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw std::invalid_argument(
                    "config: unterminated section at line " +
                    std::to_string(line_no));
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected key = value at line " +
                                        std::to_string(line_no));
        const std::string key = trim(t.substr(0, eq));
        std::string value = t.substr(eq + 1);
        if (const auto cut = value.find_first_of("#;"); cut != std::string::npos)
            value = value.substr(0, cut);  // inline comments
        value = trim(value);
        if (key.empty())
            throw std::invalid_argument("config: empty key at line " +
                                        std::to_string(line_no));
        cfg.set(section.empty() ? key : section + "." + key, value);
    }
    return cfg;
}

inline ConfigMap parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw io_error("cannot open config file: " + path);
    return parse_config(f);
}

}  // namespace qae
