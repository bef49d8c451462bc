#include "disclin/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <numbers>

#include "disclin/pairlab.hpp"
#include "json.hpp"

namespace disclin {

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%.17g", v);
    return b;
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const char* where) {
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* a : allowed) {
            if (item.key() == a) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw ValidationError("unknown key '" + item.key() + "' in " + where);
        }
    }
}

ScenarioMode mode_from_string(const std::string& m) {
    if (m == "free") return ScenarioMode::free_flow;
    if (m == "glide") return ScenarioMode::glide;
    if (m == "dipole") return ScenarioMode::dipole;
    if (m == "constrained-pair") return ScenarioMode::constrained_pair;
    throw ValidationError("unknown mode '" + m + "' (expected free, glide, dipole, or constrained-pair)");
}

json scenario_to_json(const Scenario& sc) {
    json ds = json::array();
    for (const Disclination& d : sc.disclinations) {
        ds.push_back({{"s", d.s}, {"x", d.pos.x}, {"y", d.pos.y}});
    }
    json j{
        {"name", sc.name},
        {"mode", to_string(sc.mode)},
        {"disclinations", ds},
        {"settings",
         {{"rel_tol", sc.settings.rel_tol},
          {"abs_tol", sc.settings.abs_tol},
          {"max_step", sc.settings.max_step},
          {"t_end", sc.settings.t_end},
          {"sample_interval", sc.settings.sample_interval},
          {"collision_distance", sc.settings.collision_distance},
          {"boundary_margin", sc.settings.boundary_margin}}},
        {"eps", {sc.eps.x, sc.eps.y}},
        {"note", sc.note},
    };
    if (sc.glide_set) {
        if (sc.glide_set_name == "axes" || sc.glide_set_name == "hex") {
            j["glide_set"] = sc.glide_set_name;
        } else {
            json dirs = json::array();
            for (const Vec2& g : sc.glide_set->directions) dirs.push_back({g.x, g.y});
            j["glide_set"] = dirs;
        }
    }
    return j;
}

std::vector<double> pack_row(double t, const Configuration& cfg, double h,
                             const std::vector<double>& force_norms) {
    std::vector<double> row;
    row.reserve(3 * cfg.size() + 2);
    row.push_back(t);
    for (const Disclination& d : cfg) {
        row.push_back(d.pos.x);
        row.push_back(d.pos.y);
    }
    row.push_back(h);
    row.insert(row.end(), force_norms.begin(), force_norms.end());
    return row;
}

void fill_from_trace(TraceFile& tf, const Trace& tr) {
    for (const Sample& smp : tr.samples) {
        std::vector<double> fn;
        fn.reserve(smp.forces.size());
        for (const Vec2& f : smp.forces) fn.push_back(norm(f));
        tf.rows.push_back(pack_row(smp.time, smp.cfg, smp.energy, fn));
    }
    tf.events = tr.events;
}

void write_outputs(const TraceFile& tf, const Scenario& sc, const std::string& out_path,
                   std::uint64_t seed) {
    std::string text;
    for (const std::string& line : tf.header) {
        text += line;
        text += '\n';
    }
    for (const std::vector<double>& row : tf.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) text += ',';
            text += fmt(row[i]);
        }
        text += '\n';
    }
    text += "# events: " + std::to_string(tf.events.size()) + '\n';
    for (const Event& ev : tf.events) {
        text += std::string("# event: ") + to_string(ev.kind) + ',' + fmt(ev.time) + ',' +
                std::to_string(ev.a) + ',' + std::to_string(ev.b) + '\n';
    }
    {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open output file: " + out_path);
        out << text;
        if (!out) throw std::runtime_error("failed writing output file: " + out_path);
    }

    json side{
        {"columns", tf.columns},
        {"n_rows", tf.rows.size()},
        {"scenario", scenario_to_json(sc)},
        {"seed", seed},
        {"tool_version", kToolVersion},
    };
    json evs = json::array();
    for (const Event& ev : tf.events) {
        evs.push_back({{"kind", to_string(ev.kind)}, {"time", ev.time}, {"a", ev.a}, {"b", ev.b}});
    }
    side["events"] = evs;
    std::filesystem::path sp(out_path);
    sp.replace_extension(".json");
    if (sp == std::filesystem::path(out_path)) sp += ".sidecar.json";
    std::ofstream out(sp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open sidecar file: " + sp.string());
    out << side.dump(2) << '\n';
    if (!out) throw std::runtime_error("failed writing sidecar file: " + sp.string());
}

}  // namespace

const char* to_string(ScenarioMode m) {
    switch (m) {
        case ScenarioMode::free_flow: return "free";
        case ScenarioMode::glide: return "glide";
        case ScenarioMode::dipole: return "dipole";
        case ScenarioMode::constrained_pair: return "constrained-pair";
    }
    return "?";
}

std::vector<Scenario> builtin_scenarios() {
    std::vector<Scenario> out;
    {
        Scenario sc;
        sc.name = "b1_unequal_pair";
        sc.disclinations = {{1.0, {0.3, 0.0}}, {-2.0, {-0.3, 0.0}}};
        sc.settings.t_end = 1.6;
        sc.note = "unequal pair, reciprocal distance 0.6";
        out.push_back(sc);
    }
    {
        Scenario sc;
        sc.name = "b2_superposed_pair";
        sc.disclinations = {{1.0, {0.3 - 1e-8, 0.0}}, {-2.0, {0.3 + 1e-8, 0.0}}};
        sc.settings.t_end = 1.0;
        sc.note = "superposed start at (0.3, 0) regularized by +-1e-8 along x, the axis to the origin";
        out.push_back(sc);
    }
    {
        Scenario sc;
        sc.name = "b3_splitting";
        sc.disclinations = {{1.0, {0.3 + 1e-8, 0.0}}, {-1.0, {0.3 - 1e-8, 0.0}}, {1.0, {-0.3, 0.0}}};
        sc.settings.t_end = 1.0;
        sc.note =
            "superposed start at (0.3, 0) regularized by +-1e-8 along x, the axis to the third "
            "disclination; the negative charge is seeded toward it";
        out.push_back(sc);
    }
    {
        Scenario sc;
        sc.name = "b4_triangle";
        const double r = 0.48 / std::sqrt(3.0);  // circumradius for side 0.48
        sc.disclinations = {{1.0, {0.0, r}}, {-1.0, {-0.24, -0.5 * r}}, {1.0, {0.24, -0.5 * r}}};
        sc.settings.t_end = 8.0;
        sc.note = "equilateral triangle of side 0.48 centered at the origin, apex up";
        out.push_back(sc);
    }
    {
        Scenario sc;
        sc.name = "b5_heptagon";
        for (int k = 0; k < 7; ++k) {
            const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / 7.0;
            const double s = (k % 2 == 0) ? 1.0 : -1.0;
            sc.disclinations.push_back({s, {0.5 * std::cos(a), 0.5 * std::sin(a)}});
        }
        sc.settings.t_end = 4.0;
        sc.note = "regular heptagon, alternating charges; circumradius 0.5 is this tool's choice";
        out.push_back(sc);
    }
    return out;
}

Scenario find_builtin(const std::string& name) {
    for (Scenario& sc : builtin_scenarios()) {
        if (sc.name == name) return std::move(sc);
    }
    throw ValidationError("unknown built-in scenario '" + name + "'");
}

void validate_scenario(const Scenario& sc) {
    if (sc.name.empty()) throw ValidationError("scenario name must be nonempty");
    validate_settings(sc.settings);
    validate_configuration(sc.disclinations);
    switch (sc.mode) {
        case ScenarioMode::free_flow:
            break;
        case ScenarioMode::glide:
            if (!sc.glide_set) throw ValidationError("glide mode requires a glide set");
            validate_glide_set(*sc.glide_set);
            break;
        case ScenarioMode::dipole: {
            if (sc.disclinations.size() != 2) {
                throw ValidationError("dipole mode requires exactly two disclinations");
            }
            const auto& d1 = sc.disclinations[0];
            const auto& d2 = sc.disclinations[1];
            if (d1.s + d2.s != 0.0) {
                throw ValidationError("dipole mode requires opposite Frank angles");
            }
            if (norm(d1.pos + d2.pos) > 1e-12) {
                throw ValidationError("dipole mode requires positions symmetric about the origin");
            }
            break;
        }
        case ScenarioMode::constrained_pair: {
            if (sc.disclinations.size() != 2) {
                throw ValidationError("constrained-pair mode requires exactly two disclinations");
            }
            if (norm(sc.eps) < kMinSeparation) {
                throw ValidationError("constrained-pair offset must exceed the separation guard");
            }
            const Vec2 diff = sc.disclinations[0].pos - sc.disclinations[1].pos;
            if (norm(diff - sc.eps) > 1e-12) {
                throw ValidationError("constrained-pair offset eps must equal xi1 - xi2");
            }
            break;
        }
    }
}

TraceFile run_scenario(const Scenario& sc, const std::string& out_path, std::uint64_t seed) {
    validate_scenario(sc);
    TraceFile tf;
    const std::size_t n = sc.disclinations.size();
    tf.columns.push_back("T");
    for (std::size_t i = 1; i <= n; ++i) {
        tf.columns.push_back("x" + std::to_string(i));
        tf.columns.push_back("y" + std::to_string(i));
    }
    tf.columns.push_back("H");
    for (std::size_t i = 1; i <= n; ++i) tf.columns.push_back("F" + std::to_string(i));

    switch (sc.mode) {
        case ScenarioMode::free_flow:
            fill_from_trace(tf, simulate(sc.disclinations, sc.settings));
            break;
        case ScenarioMode::glide:
            fill_from_trace(tf, integrate_inclusion(sc.disclinations, *sc.glide_set, sc.settings));
            break;
        case ScenarioMode::dipole: {
            const auto& d1 = sc.disclinations[0];
            const auto& d2 = sc.disclinations[1];
            const Vec2 diff = d1.pos - d2.pos;
            const double delta0 = norm(diff);
            const Vec2 u = diff / delta0;
            const ScalarTrace str = simulate_dipole(delta0, d1.s, sc.settings.t_end, sc.settings);
            for (const ScalarSample& smp : str.samples) {
                const Configuration cfg{{d1.s, 0.5 * smp.delta * u}, {d2.s, -0.5 * smp.delta * u}};
                std::vector<double> fn;
                for (const Vec2& f : total_forces(cfg)) fn.push_back(norm(f));
                tf.rows.push_back(pack_row(smp.time, cfg, energy(cfg), fn));
            }
            tf.events = str.events;
            break;
        }
        case ScenarioMode::constrained_pair: {
            const double s1 = sc.disclinations[0].s;
            const double s2 = sc.disclinations[1].s;
            const ConstrainedTrace ctr = simulate_constrained_eps(
                s1, s2, sc.disclinations[0].pos, sc.eps, sc.settings.t_end, sc.settings);
            for (const ConstrainedSample& smp : ctr.samples) {
                const Configuration cfg{{s1, smp.xi1}, {s2, smp.xi2}};
                const std::vector<Vec2> f = total_forces(cfg);
                // Both members share the constrained velocity; the trace
                // reports its magnitude as the driving force so the
                // dissipation identity dH/dT = -sum F_k^2 holds exactly.
                const double v = norm(0.5 * (f[0] + f[1]));
                tf.rows.push_back(pack_row(smp.time, cfg, energy(cfg), {v, v}));
            }
            tf.events = ctr.events;
            break;
        }
    }

    tf.header.push_back(std::string("# disclin trace ") + kToolVersion);
    tf.header.push_back("# scenario: " + sc.name);
    tf.header.push_back(std::string("# mode: ") + to_string(sc.mode));
    tf.header.push_back("# seed: " + std::to_string(seed));
    if (!sc.note.empty()) tf.header.push_back("# note: " + sc.note);
    tf.header.push_back("# config: " + scenario_to_json(sc).dump());
    std::string cols = "# columns: ";
    for (std::size_t i = 0; i < tf.columns.size(); ++i) {
        if (i) cols += ',';
        cols += tf.columns[i];
    }
    tf.header.push_back(cols);

    write_outputs(tf, sc, out_path, seed);
    return tf;
}

std::string serialize(const Scenario& sc) { return scenario_to_json(sc).dump(2) + "\n"; }

Scenario parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config parse error: ") + e.what());
    }
    Scenario sc;
    try {
        if (!j.is_object()) throw ValidationError("config root must be an object");
        reject_unknown(j, {"name", "mode", "disclinations", "glide_set", "settings", "eps", "note"},
                       "config root");
        sc.name = j.at("name").get<std::string>();
        sc.mode = mode_from_string(j.at("mode").get<std::string>());
        for (const json& dj : j.at("disclinations")) {
            reject_unknown(dj, {"s", "x", "y"}, "disclination");
            sc.disclinations.push_back(
                {dj.at("s").get<double>(), {dj.at("x").get<double>(), dj.at("y").get<double>()}});
        }
        if (j.contains("settings")) {
            const json& sj = j["settings"];
            reject_unknown(sj,
                           {"rel_tol", "abs_tol", "max_step", "t_end", "sample_interval",
                            "collision_distance", "boundary_margin"},
                           "settings");
            IntegratorSettings& st = sc.settings;
            if (sj.contains("rel_tol")) st.rel_tol = sj["rel_tol"].get<double>();
            if (sj.contains("abs_tol")) st.abs_tol = sj["abs_tol"].get<double>();
            if (sj.contains("max_step")) st.max_step = sj["max_step"].get<double>();
            if (sj.contains("t_end")) st.t_end = sj["t_end"].get<double>();
            if (sj.contains("sample_interval")) st.sample_interval = sj["sample_interval"].get<double>();
            if (sj.contains("collision_distance")) st.collision_distance = sj["collision_distance"].get<double>();
            if (sj.contains("boundary_margin")) st.boundary_margin = sj["boundary_margin"].get<double>();
        }
        if (j.contains("eps")) {
            const json& ej = j["eps"];
            if (!ej.is_array() || ej.size() != 2) {
                throw ValidationError("eps must be a two-element array");
            }
            sc.eps = {ej[0].get<double>(), ej[1].get<double>()};
        }
        if (j.contains("note")) sc.note = j["note"].get<std::string>();
        if (j.contains("glide_set")) {
            const json& gj = j["glide_set"];
            if (gj.is_string()) {
                const std::string gname = gj.get<std::string>();
                if (gname == "axes") {
                    sc.glide_set = axes_glide_set();
                } else if (gname == "hex") {
                    sc.glide_set = hexagonal_glide_set();
                } else {
                    throw ValidationError("unknown glide set '" + gname + "' (expected axes or hex)");
                }
                sc.glide_set_name = gname;
            } else {
                GlideSet gs;
                for (const json& dj : gj) {
                    if (!dj.is_array() || dj.size() != 2) {
                        throw ValidationError("custom glide directions must be [x, y] pairs");
                    }
                    gs.directions.push_back({dj[0].get<double>(), dj[1].get<double>()});
                }
                sc.glide_set = std::move(gs);
                sc.glide_set_name = "custom";
            }
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config field error: ") + e.what());
    }
    validate_scenario(sc);
    return sc;
}

}  // namespace disclin
