#include "covertlim/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <limits>
#include <mutex>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "covertlim/bounds.hpp"
#include "covertlim/covert_opt.hpp"
#include "covertlim/fock.hpp"
#include "covertlim/gaussian.hpp"
#include "covertlim/probes.hpp"
#include "covertlim/sweep.hpp"

namespace covertlim {

namespace {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

class WarningLog {
  public:
    void add(nlohmann::json j) {
        std::lock_guard<std::mutex> lock(mtx_);
        entries_.push_back(std::move(j));
    }
    void flush(std::ostream& os, const std::string& command) {
        for (auto& e : entries_) {
            e["command"] = command;
            os << e.dump() << "\n";
        }
    }
    bool any() const { return !entries_.empty(); }

  private:
    std::mutex mtx_;
    std::vector<nlohmann::json> entries_;
};

void emit(const Table& t, const RunConfig& cfg, std::ostream& out) {
    if (cfg.format == "json") {
        out << "[";
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            out << (r ? ",\n" : "\n");
            out << " {";
            for (std::size_t c = 0; c < t.header.size(); ++c) {
                out << (c ? "," : "") << '"' << t.header[c] << "\":"
                    << t.rows[r][c];
            }
            out << "}";
        }
        out << "\n]\n";
        return;
    }
    for (std::size_t c = 0; c < t.header.size(); ++c) {
        out << (c ? "," : "") << t.header[c];
    }
    out << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            out << (c ? "," : "") << row[c];
        }
        out << "\n";
    }
}

std::string fmt_int(std::int64_t v) { return std::to_string(v); }

int cmd_energy_limits(const RunConfig& cfg, Table& t, WarningLog& log) {
    t.header = {"m", "ns_min", "ns_max"};
    const auto& grid = cfg.m_grid;
    t.rows.resize(grid.size());
    std::vector<int> flags(grid.size(), 0);
    parallel_for_index(
        static_cast<std::int64_t>(grid.size()),
        [&](std::int64_t i) {
            ScenarioParams p = cfg.scenario;
            p.m_modes = grid[i];
            double ns_min = std::numeric_limits<double>::quiet_NaN();
            double ns_max = ns_min;
            try {
                const EnergyLimits el = energy_limits(p);
                ns_min = el.ns_min;
                ns_max = el.ns_max;
                if (!el.min_solution.converged || !el.max_solution.converged) {
                    flags[i] = 1;
                    log.add({{"flag", "non-converged"}, {"m", grid[i]}});
                }
            } catch (const std::exception& e) {
                flags[i] = 1;
                log.add({{"flag", "error"}, {"m", grid[i]}, {"what", e.what()}});
            }
            t.rows[i] = {fmt_int(grid[i]), format_double(ns_min),
                         format_double(ns_max)};
        },
        cfg.threads);
    for (int f : flags) {
        if (f) return 2;
    }
    return 0;
}

int cmd_covert_bound(const RunConfig& cfg, Table& t, WarningLog& log) {
    t.header = {"eta",         "nb", "eps", "m", "fidelity_lb",
                "pe_lb",       "exponent", "log10_pe_lb"};
    ScenarioParams p = cfg.scenario;
    try {
        const BoundReport rep = covert_pe_lb(p);
        t.rows.push_back({format_double(p.eta), format_double(p.n_b),
                          format_double(p.epsilon), fmt_int(p.m_modes),
                          format_double(rep.fidelity_lb),
                          format_double(rep.pe_lb),
                          format_double(rep.exponent),
                          format_double(rep.log_pe_lb / std::log(10.0))});
    } catch (const std::exception& e) {
        log.add({{"flag", "error"}, {"what", e.what()}});
        return 1;
    }
    return 0;
}

int cmd_covert_curves(const RunConfig& cfg, Table& t, WarningLog& log) {
    t.header = {"m", "log10_pe_bound", "log10_pe_tmsv", "log10_pe_gcs"};
    const auto rows = covert_curves(cfg.scenario, cfg.m_grid, cfg.threads);
    int status = 0;
    for (const auto& r : rows) {
        t.rows.push_back({fmt_int(r.m), format_double(r.log10_pe_bound),
                          format_double(r.log10_pe_tmsv),
                          format_double(r.log10_pe_gcs)});
        if (r.flagged) {
            log.add({{"flag", "non-converged"}, {"m", r.m}});
            status = 2;
        }
    }
    return status;
}

int cmd_perfect_covert(const RunConfig& cfg, Table& t, WarningLog& log) {
    t.header = {"nb",         "chi_tmsv_qc", "chi_tmsv_qb",
                "chi_gcs_qc", "chi_gcs_qb",  "ratio"};
    const auto rows =
        perfect_covert_sweep(cfg.scenario.eta, cfg.nb_grid, cfg.threads);
    int status = 0;
    for (const auto& r : rows) {
        t.rows.push_back(
            {format_double(r.n_b), format_double(r.chi_tmsv_qc),
             format_double(r.chi_tmsv_qb), format_double(r.chi_gcs_qc),
             format_double(r.chi_gcs_qb), format_double(r.ratio)});
        if (r.flagged) {
            log.add({{"flag", "non-converged"}, {"nb", r.n_b}});
            status = 2;
        }
    }
    return status;
}

int cmd_heatmap(const RunConfig& cfg, Table& t, WarningLog& log) {
    t.header = {"nb", "eps", "fid_ratio", "flag"};
    struct Cell {
        double nb, eps, ratio;
        int flag;
    };
    std::vector<Cell> cells;
    for (double nb : cfg.nb_grid) {
        for (double eps : cfg.eps_grid) {
            cells.push_back({nb, eps, 0.0, 0});
        }
    }
    parallel_for_index(
        static_cast<std::int64_t>(cells.size()),
        [&](std::int64_t i) {
            Cell& c = cells[i];
            ScenarioParams p = cfg.scenario;
            p.n_b = c.nb;
            p.epsilon = c.eps;
            try {
                const KktSolution sol = min_fidelity_numeric(p);
                const CovertGeometry g = covert_geometry(p.eta, p.n_b);
                const double t_thr = covert_threshold(p);
                const double log_bound =
                    2.0 * std::log(t_thr) +
                    static_cast<double>(p.m_modes) * g.log_f;
                c.ratio = std::exp(sol.log_objective - log_bound);
                c.flag = sol.converged ? 0 : 1;
            } catch (const std::exception& e) {
                c.flag = 1;
                c.ratio = std::numeric_limits<double>::quiet_NaN();
                log.add({{"flag", "error"},
                         {"nb", c.nb},
                         {"eps", c.eps},
                         {"what", e.what()}});
            }
        },
        cfg.threads);
    int status = 0;
    for (const auto& c : cells) {
        t.rows.push_back({format_double(c.nb), format_double(c.eps),
                          format_double(c.ratio), fmt_int(c.flag)});
        if (c.flag) {
            log.add({{"flag", "non-converged"}, {"nb", c.nb}, {"eps", c.eps}});
            status = 2;
        }
    }
    return status;
}

int cmd_oracle_check(const RunConfig& cfg, Table& t, WarningLog& log) {
    t.header = {"case", "s", "q_gaussian", "q_fock", "rel_err"};
    const ScenarioParams& p = cfg.scenario;
    const double ns = cfg.ns >= 0.0 ? cfg.ns : p.n_b;
    const double s_grid[] = {0.1, 0.3, 0.5, 0.7, 0.9};
    int status = 0;
    auto add_case = [&](const std::string& name, const GaussianState& g0,
                        const GaussianState& g1, const FockDensity& f0,
                        const FockDensity& f1) {
        const auto qf = q_s_fock_many(f0, f1, s_grid);
        for (std::size_t i = 0; i < std::size(s_grid); ++i) {
            const double qg = q_s_gaussian(g0, g1, s_grid[i]);
            const double rel = std::abs(qg / qf[i] - 1.0);
            t.rows.push_back({"\"" + name + "\"", format_double(s_grid[i]),
                              format_double(qg), format_double(qf[i]),
                              format_double(rel)});
            if (rel >= 1e-6) {
                log.add({{"flag", "oracle-mismatch"},
                         {"case", name},
                         {"s", s_grid[i]},
                         {"rel_err", rel}});
                status = 2;
            }
        }
    };
    try {
        const CoherentProbe vac{{0.0, 0.0}};
        add_case("thermal", alice_received(vac, 0, p), alice_received(vac, 1, p),
                 fock_from_channel(vac, 0, p), fock_from_channel(vac, 1, p));
        const CoherentProbe coh{{std::sqrt(ns), 0.0}};
        add_case("displaced-thermal", alice_received(coh, 0, p),
                 alice_received(coh, 1, p), fock_from_channel(coh, 0, p),
                 fock_from_channel(coh, 1, p));
        const TmsvProbe tmsv{ns};
        add_case("tmsv", alice_received(tmsv, 0, p), alice_received(tmsv, 1, p),
                 fock_from_channel(tmsv, 0, p), fock_from_channel(tmsv, 1, p));
    } catch (const std::exception& e) {
        log.add({{"flag", "error"}, {"what", e.what()}});
        return 1;
    }
    return status;
}

}  // namespace

std::vector<double> parse_grid(const std::string& spec) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : spec) {
        if (ch == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    parts.push_back(cur);
    if (parts.size() != 4) {
        throw std::invalid_argument("grid spec must be lo:hi:log|lin:count");
    }
    double lo = 0.0, hi = 0.0;
    long count = 0;
    try {
        lo = std::stod(parts[0]);
        hi = std::stod(parts[1]);
        count = std::stol(parts[3]);
    } catch (...) {
        throw std::invalid_argument("grid spec: bad numeric field in '" +
                                    spec + "'");
    }
    const std::string& mode = parts[2];
    if (mode != "log" && mode != "lin") {
        throw std::invalid_argument("grid spec: mode must be log or lin");
    }
    if (count < 1) throw std::invalid_argument("grid spec: count must be >= 1");
    if (mode == "log" && !(lo > 0.0 && hi > 0.0)) {
        throw std::invalid_argument("grid spec: log grid needs positive bounds");
    }
    std::vector<double> out;
    out.reserve(count);
    if (count == 1) {
        out.push_back(lo);
        return out;
    }
    for (long i = 0; i < count; ++i) {
        const double f = static_cast<double>(i) / (count - 1);
        out.push_back(mode == "log"
                          ? std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo)))
                          : lo + f * (hi - lo));
    }
    return out;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& warn) {
    WarningLog log;
    Table t;
    int status = 0;
    const bool needs_m_grid = cfg.command == "energy-limits" ||
                              cfg.command == "covert-curves";
    const bool needs_nb_grid =
        cfg.command == "perfect-covert" || cfg.command == "heatmap";
    const bool needs_eps_grid = cfg.command == "heatmap";
    try {
        cfg.scenario.validate();
        if (needs_m_grid && cfg.m_grid.empty()) {
            throw std::invalid_argument("empty m grid");
        }
        if (needs_nb_grid && cfg.nb_grid.empty()) {
            throw std::invalid_argument("empty nb grid");
        }
        if (needs_eps_grid && cfg.eps_grid.empty()) {
            throw std::invalid_argument("empty eps grid");
        }
        if (cfg.format != "csv" && cfg.format != "json") {
            throw std::invalid_argument("format must be csv or json");
        }
        if (cfg.command == "energy-limits") {
            status = cmd_energy_limits(cfg, t, log);
        } else if (cfg.command == "covert-bound") {
            status = cmd_covert_bound(cfg, t, log);
        } else if (cfg.command == "covert-curves") {
            status = cmd_covert_curves(cfg, t, log);
        } else if (cfg.command == "perfect-covert") {
            status = cmd_perfect_covert(cfg, t, log);
        } else if (cfg.command == "heatmap") {
            status = cmd_heatmap(cfg, t, log);
        } else if (cfg.command == "oracle-check") {
            status = cmd_oracle_check(cfg, t, log);
        } else {
            throw std::invalid_argument("unknown command '" + cfg.command + "'");
        }
    } catch (const std::exception& e) {
        log.add({{"flag", "config-error"}, {"what", e.what()}});
        log.flush(warn, cfg.command);
        return 1;
    }
    if (status != 1) {
        emit(t, cfg, out);  // exit 2 still writes the partial table
    }
    log.flush(warn, cfg.command);
    return status;
}

int run_to_path(const RunConfig& cfg, std::ostream& warn) {
    if (cfg.output_path == "-" || cfg.output_path.empty()) {
        return run(cfg, std::cout, warn);
    }
    std::ofstream out(cfg.output_path, std::ios::binary);
    if (!out) {
        warn << nlohmann::json{{"flag", "config-error"},
                               {"what", "cannot open output path '" +
                                            cfg.output_path + "'"}}
                    .dump()
             << "\n";
        return 1;
    }
    return run(cfg, out, warn);
}

}  // namespace covertlim
