#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "disclin/pairlab.hpp"
#include "disclin/scenario.hpp"
#include "disclin/verify.hpp"

// Command-line front end. Exit codes: 0 success, 1 validation/usage error,
// 2 runtime or I/O failure, 3 selfcheck failure.

namespace {

using namespace disclin;

Scenario load_entry(const std::string& entry) {
    namespace fs = std::filesystem;
    const bool pathlike =
        entry.find('/') != std::string::npos || entry.find('.') != std::string::npos;
    if (fs::exists(entry) || pathlike) {
        std::ifstream in(entry, std::ios::binary);
        if (!in) throw ValidationError("cannot read config file '" + entry + "'");
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        return parse_config(text);
    }
    return find_builtin(entry);
}

struct RunOptions {
    std::vector<std::string> entries;
    std::string out;
    std::string out_dir = ".";
    bool parallel = false;
    std::uint64_t seed = 0;
    std::optional<double> t_end, rel_tol, abs_tol, eps_c, sample_interval;
    std::optional<std::string> glide_set;
};

int do_run(const RunOptions& opt) {
    std::vector<Scenario> scens;
    for (const std::string& entry : opt.entries) {
        Scenario sc = load_entry(entry);
        if (opt.t_end) sc.settings.t_end = *opt.t_end;
        if (opt.rel_tol) sc.settings.rel_tol = *opt.rel_tol;
        if (opt.abs_tol) sc.settings.abs_tol = *opt.abs_tol;
        if (opt.eps_c) sc.settings.collision_distance = *opt.eps_c;
        if (opt.sample_interval) sc.settings.sample_interval = *opt.sample_interval;
        if (opt.glide_set) {
            sc.glide_set = (*opt.glide_set == "axes") ? axes_glide_set() : hexagonal_glide_set();
            sc.glide_set_name = *opt.glide_set;
        }
        scens.push_back(std::move(sc));
    }
    if (!opt.out.empty() && scens.size() != 1) {
        throw ValidationError("--out requires exactly one scenario; use --out-dir for several");
    }
    std::vector<std::string> paths;
    for (const Scenario& sc : scens) {
        paths.push_back(opt.out.empty()
                            ? (std::filesystem::path(opt.out_dir) / (sc.name + ".csv")).string()
                            : opt.out);
    }

    const std::size_t n = scens.size();
    std::vector<std::string> summaries(n);
    std::vector<std::exception_ptr> errors(n);
    const auto work = [&](std::size_t i) {
        try {
            const TraceFile tf = run_scenario(scens[i], paths[i], opt.seed);
            char buf[512];
            std::snprintf(buf, sizeof buf, "wrote %s (%zu rows, %zu events)", paths[i].c_str(),
                          tf.rows.size(), tf.events.size());
            summaries[i] = buf;
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    if (opt.parallel && n > 1) {
        std::vector<std::thread> threads;
        threads.reserve(n);
        for (std::size_t i = 0; i < n; ++i) threads.emplace_back(work, i);
        for (std::thread& t : threads) t.join();
    } else {
        for (std::size_t i = 0; i < n; ++i) work(i);
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (errors[i]) std::rethrow_exception(errors[i]);
        std::printf("%s\n", summaries[i].c_str());
    }
    return 0;
}

int do_list() {
    for (const Scenario& sc : builtin_scenarios()) {
        std::string charges;
        for (const Disclination& d : sc.disclinations) {
            if (!charges.empty()) charges += ',';
            char b[32];
            std::snprintf(b, sizeof b, "%+g", d.s);
            charges += b;
        }
        std::printf("%-20s mode=%-5s N=%zu t_end=%-4g s=[%s]\n", sc.name.c_str(),
                    to_string(sc.mode), sc.disclinations.size(), sc.settings.t_end,
                    charges.c_str());
    }
    return 0;
}

int do_selfcheck(std::uint64_t seed) {
    const std::vector<OracleReport> reports = run_invariant_suite(seed);
    std::fputs(format_reports(reports).c_str(), stdout);
    if (all_pass(reports)) {
        std::printf("selfcheck: all %zu reports pass\n", reports.size());
        return 0;
    }
    std::printf("selfcheck: FAILURES present\n");
    return 3;
}

int do_dipole(double delta0, double s, double t_end) {
    const ScalarTrace tr = simulate_dipole(delta0, s, t_end);
    std::printf("# columns: T,delta\n");
    for (const ScalarSample& smp : tr.samples) {
        std::printf("%.17g,%.17g\n", smp.time, smp.delta);
    }
    std::printf("# events: %zu\n", tr.events.size());
    for (const Event& ev : tr.events) {
        std::printf("# event: %s,%.17g,%d,%d\n", to_string(ev.kind), ev.time, ev.a, ev.b);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dissipative dynamics of wedge disclinations in the unit disk"};
    app.require_subcommand(1);

    RunOptions ropt;
    CLI::App* cmd_run = app.add_subcommand("run", "run scenarios and write trace files");
    cmd_run->add_option("scenario", ropt.entries, "built-in scenario name or config file path")
        ->required();
    cmd_run->add_option("--out", ropt.out, "output CSV path (single scenario only)");
    cmd_run->add_option("--out-dir", ropt.out_dir, "output directory for <name>.csv files");
    cmd_run->add_flag("--parallel", ropt.parallel, "run independent scenarios concurrently");
    cmd_run->add_option("--seed", ropt.seed, "seed echoed into the trace header");
    cmd_run->add_option("--t-end", ropt.t_end, "override final time");
    cmd_run->add_option("--rel-tol", ropt.rel_tol, "override relative tolerance");
    cmd_run->add_option("--abs-tol", ropt.abs_tol, "override absolute tolerance");
    cmd_run->add_option("--eps-c", ropt.eps_c, "override collision distance");
    cmd_run->add_option("--sample-interval", ropt.sample_interval, "override sample interval");
    cmd_run->add_option("--glide-set", ropt.glide_set, "override glide set (glide mode)")
        ->check(CLI::IsMember({"axes", "hex"}));

    CLI::App* cmd_list = app.add_subcommand("list", "list built-in scenarios");

    std::uint64_t check_seed = 0;
    CLI::App* cmd_check = app.add_subcommand("selfcheck", "run the invariant suite");
    cmd_check->add_option("--seed", check_seed, "suite seed");

    double dip_delta0 = 0.0, dip_s = 1.0, dip_t_end = 1.0;
    CLI::App* cmd_dip = app.add_subcommand("dipole", "integrate the scalar dipole separation");
    cmd_dip->add_option("--delta0", dip_delta0, "initial separation in (0, 2)")->required();
    cmd_dip->add_option("--s", dip_s, "Frank angle magnitude")->required();
    cmd_dip->add_option("--t-end", dip_t_end, "final time");

    CLI::App* cmd_eq = app.add_subcommand("equilibrium", "print the dipole equilibrium separation");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*cmd_run) return do_run(ropt);
        if (*cmd_list) return do_list();
        if (*cmd_check) return do_selfcheck(check_seed);
        if (*cmd_dip) return do_dipole(dip_delta0, dip_s, dip_t_end);
        if (*cmd_eq) {
            std::printf("%.12f\n", find_dipole_equilibrium(1.0));
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
