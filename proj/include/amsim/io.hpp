#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "amsim/errors.hpp"
#include "amsim/stiffness.hpp"

namespace amsim {

/// Floats are logged at 9 significant digits; together with the fixed
/// column order this keeps CSV output byte-stable across runs.
inline std::string format_double(double v) {
    if (v == 0.0) v = 0.0;  // normalize -0
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

/// Reads a stiffness characterization CSV with header z,delta_z,f_z.
inline std::vector<StiffnessSample> read_stiffness_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
    std::vector<StiffnessSample> out;
    std::string line;
    bool first = true;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line.find("z") != std::string::npos && line.find("delta") != std::string::npos)
                continue;  // header row
        }
        std::istringstream ss(line);
        std::string field;
        StiffnessSample s;
        double* slots[3] = {&s.z, &s.delta_z, &s.f_z};
        for (int i = 0; i < 3; ++i) {
            if (!std::getline(ss, field, ','))
                throw Error(ErrorCode::IoError,
                            path + ":" + std::to_string(lineno) + ": expected 3 columns");
            try {
                *slots[i] = std::stod(field);
            } catch (const std::exception&) {
                throw Error(ErrorCode::IoError,
                            path + ":" + std::to_string(lineno) + ": bad number '" + field + "'");
            }
        }
        out.push_back(s);
    }
    if (out.empty()) throw Error(ErrorCode::IoError, path + ": no samples");
    return out;
}

inline void write_stiffness_csv(const std::string& path,
                                const std::vector<StiffnessSample>& samples) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
    out << "z,delta_z,f_z\n";
    for (const auto& s : samples)
        out << format_double(s.z) << ',' << format_double(s.delta_z) << ','
            << format_double(s.f_z) << '\n';
}

}  // namespace amsim
