#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "covertlim/cli.hpp"

// covertlim <command> [flags]: grid sweeps and bound evaluations emitted as
// deterministic CSV (or JSON) tables. See README for examples.

int main(int argc, char** argv) {
    CLI::App app{"Covert target detection performance limits"};
    app.set_config("--config", "", "Declarative key=value config file; "
                                   "flags take precedence");
    app.allow_config_extras(CLI::config_extras_mode::error);

    covertlim::RunConfig cfg;
    std::string m_grid_spec, nb_grid_spec, eps_grid_spec;

    app.add_option("command", cfg.command,
                   "One of: energy-limits, covert-bound, covert-curves, "
                   "perfect-covert, heatmap, oracle-check")
        ->required();
    app.add_option("--eta", cfg.scenario.eta, "Target reflectivity");
    app.add_option("--nb", cfg.scenario.n_b, "Background brightness N_B");
    app.add_option("--eps", cfg.scenario.epsilon, "Covertness level epsilon");
    app.add_option("--m", cfg.scenario.m_modes, "Mode count M");
    app.add_option("--prior0", cfg.scenario.prior0,
                   "Adversary prior for H0' (prior1 = 1 - prior0)");
    app.add_option("--ns", cfg.ns, "Probe per-mode energy override");
    app.add_option("--m-grid", m_grid_spec, "M grid, lo:hi:log|lin:count");
    app.add_option("--nb-grid", nb_grid_spec, "N_B grid, lo:hi:log|lin:count");
    app.add_option("--eps-grid", eps_grid_spec,
                   "epsilon grid, lo:hi:log|lin:count");
    app.add_option("--threads", cfg.threads,
                   "Worker threads (0 = runtime default)")
        ->envname("COVERTLIM_THREADS");
    app.add_option("--out", cfg.output_path, "Output path ('-' = stdout)");
    app.add_option("--format", cfg.format, "csv | json");

    try {
        app.parse(argc, argv);
        cfg.scenario.prior1 = 1.0 - cfg.scenario.prior0;
        if (!m_grid_spec.empty()) {
            for (double v : covertlim::parse_grid(m_grid_spec)) {
                cfg.m_grid.push_back(static_cast<std::int64_t>(std::llround(v)));
            }
        } else {
            cfg.m_grid.push_back(cfg.scenario.m_modes);
        }
        if (!nb_grid_spec.empty()) {
            cfg.nb_grid = covertlim::parse_grid(nb_grid_spec);
        } else {
            cfg.nb_grid.push_back(cfg.scenario.n_b);
        }
        if (!eps_grid_spec.empty()) {
            cfg.eps_grid = covertlim::parse_grid(eps_grid_spec);
        } else {
            cfg.eps_grid.push_back(cfg.scenario.epsilon);
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "{\"flag\":\"config-error\",\"what\":\"" << e.what()
                  << "\"}\n";
        return 1;
    }
    return covertlim::run_to_path(cfg, std::cerr);
}
