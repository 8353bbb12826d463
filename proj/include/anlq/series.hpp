// SPDX-License-Identifier: Apache-2.0
//
// Time-series CSV emission (%.17g, exact f64 round trip), CSV ingestion for
// the fit scenario, and the companion plot-script generator.

#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "anlq/diagnostics.hpp"

namespace anlq {

struct SeriesError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Column order is fixed by the Sobolev index s:
//   t, normQ0..normQ{s+1}, normU0..normU{s}, maxQ, maxU,
//   E, D, N, Mw, Hq, trace_res, div_res, mean_u
inline std::vector<std::string> series_columns(int s) {
    std::vector<std::string> cols{"t"};
    for (int k = 0; k <= s + 1; ++k) cols.push_back("normQ" + std::to_string(k));
    for (int k = 0; k <= s; ++k) cols.push_back("normU" + std::to_string(k));
    for (const char* c : {"maxQ", "maxU", "E", "D", "N", "Mw", "Hq", "trace_res", "div_res",
                          "mean_u"})
        cols.push_back(c);
    return cols;
}

class SeriesWriter {
  public:
    SeriesWriter(const std::string& path, int s) : s_(s), out_(path, std::ios::trunc) {
        if (!out_) throw SeriesError("series: cannot open '" + path + "' for writing");
        const auto cols = series_columns(s);
        for (std::size_t i = 0; i < cols.size(); ++i)
            out_ << (i ? "," : "") << cols[i];
        out_ << "\n";
    }

    void write_row(const EnergyReport& rep) {
        std::vector<double> vals;
        vals.push_back(rep.t);
        for (double v : rep.q_norms) vals.push_back(v);
        for (double v : rep.u_norms) vals.push_back(v);
        const double mean_mag = std::sqrt(rep.mean_u[0] * rep.mean_u[0] +
                                          rep.mean_u[1] * rep.mean_u[1] +
                                          rep.mean_u[2] * rep.mean_u[2]);
        for (double v : {rep.max_q, rep.max_u, rep.E, rep.D, rep.N, rep.Mw, rep.Hq,
                         rep.trace_res, rep.div_res, mean_mag})
            vals.push_back(v);
        if (vals.size() != series_columns(s_).size())
            throw SeriesError("series: row does not match the schema (wrong s?)");
        for (std::size_t i = 0; i < vals.size(); ++i)
            out_ << (i ? "," : "") << format_g17(vals[i]);
        out_ << "\n";
        out_.flush(); // partial output survives an aborted run
    }

  private:
    int s_;
    std::ofstream out_;
};

struct SeriesTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> data; // column-major

    const std::vector<double>& column(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return data[i];
        throw SeriesError("series: no column named '" + name + "'");
    }
    bool has_column(const std::string& name) const {
        for (const auto& c : columns)
            if (c == name) return true;
        return false;
    }
};

inline SeriesTable read_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SeriesError("series: cannot open '" + path + "'");
    SeriesTable table;
    std::string line;
    if (!std::getline(in, line)) throw SeriesError("series: empty file '" + path + "'");
    {
        std::istringstream hs(line);
        std::string col;
        while (std::getline(hs, col, ',')) table.columns.push_back(col);
    }
    table.data.resize(table.columns.size());
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::size_t col = 0;
        while (std::getline(ls, cell, ',')) {
            if (col >= table.columns.size())
                throw SeriesError("series line " + std::to_string(lineno) + ": too many cells");
            try {
                table.data[col].push_back(std::stod(cell));
            } catch (...) {
                throw SeriesError("series line " + std::to_string(lineno) +
                                  ": bad number '" + cell + "'");
            }
            ++col;
        }
        if (col != table.columns.size())
            throw SeriesError("series line " + std::to_string(lineno) + ": missing cells");
    }
    return table;
}

// A small self-contained matplotlib script; references only columns that are
// present in the CSV it is generated for.
inline void emit_plot_script(const std::string& csv_path, const std::string& script_path, int s) {
    std::ofstream out(script_path, std::ios::trunc);
    if (!out) throw SeriesError("series: cannot open '" + script_path + "'");
    const auto cols = series_columns(s);
    out << "#!/usr/bin/env python3\n"
        << "# Renders decay plots from the series CSV next to it.\n"
        << "import csv, math\n"
        << "import matplotlib\n"
        << "matplotlib.use('Agg')\n"
        << "import matplotlib.pyplot as plt\n\n"
        << "path = " << '"' << csv_path << '"' << "\n"
        << "cols = {}\n"
        << "with open(path) as f:\n"
        << "    reader = csv.DictReader(f)\n"
        << "    rows = list(reader)\n"
        << "for name in [";
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? ", " : "") << '"' << cols[i] << '"';
    out << "]:\n"
        << "    cols[name] = [float(r[name]) for r in rows]\n\n"
        << "t = cols['t']\n"
        << "fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4))\n"
        << "for name in ['normQ0', 'normU0']:\n"
        << "    ax1.semilogy(t, cols[name], label=name)\n"
        << "ax1.set_xlabel('t'); ax1.set_ylabel('L2 norm'); ax1.legend()\n"
        << "tp = [1.0 + x for x in t]\n"
        << "for name in ['normQ0', 'normU0']:\n"
        << "    ax2.loglog(tp, cols[name], label=name)\n"
        << "ax2.set_xlabel('1+t'); ax2.set_ylabel('L2 norm'); ax2.legend()\n"
        << "fig.tight_layout()\n"
        << "fig.savefig(path.replace('.csv', '') + '_decay.png', dpi=150)\n"
        << "\n"
        << "fig2, ax = plt.subplots(figsize=(6, 4))\n"
        << "for name in ['E', 'D']:\n"
        << "    ax.semilogy(t, [max(v, 1e-300) for v in cols[name]], label=name)\n"
        << "ax.set_xlabel('t'); ax.legend()\n"
        << "fig2.tight_layout()\n"
        << "fig2.savefig(path.replace('.csv', '') + '_energy.png', dpi=150)\n";
}

} // namespace anlq
