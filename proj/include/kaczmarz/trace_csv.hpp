#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "kaczmarz/solve.hpp"

namespace kaczmarz {

namespace detail {

inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

/// One record per traced step, header `k,row,rse,res_fro,wall_s`; missing
/// metrics stay empty. 17 significant digits so values parse back exactly.
inline void write_trace_csv(const SolveReport& report, const std::string& path) {
    if (report.trace.empty())
        throw std::invalid_argument("write_trace_csv: empty trace");
    std::ofstream out(path, std::ios::binary);  // binary keeps LF endings everywhere
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "k,row,rse,res_fro,wall_s\n";
    for (const TraceRecord& t : report.trace) {
        out << t.k << ',' << t.row << ',';
        if (t.rse) out << detail::format_g17(*t.rse);
        out << ',';
        if (t.res_fro) out << detail::format_g17(*t.res_fro);
        out << ',';
        if (t.wall_s) out << detail::format_g17(*t.wall_s);
        out << '\n';
    }
    if (!out) throw std::runtime_error("short write to " + path);
}

}  // namespace kaczmarz
