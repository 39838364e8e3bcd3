// hmk: simulate, distance, perturb-study, kl-check, viability
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hmk/analysis.hpp"
#include "hmk/arc_io.hpp"
#include "hmk/examples.hpp"
#include "hmk/metrics.hpp"

using nlohmann::json;
using namespace hmk;

namespace {

constexpr const char* kSchema = "hmk-report/1";

struct Common {
    std::string system = "dde";
    std::string history;
    double x0 = 1.0;
    double h = 0.01;
    double T = 5.0;
    int J = 20;
    std::string priority = "jump-first";
    std::string integrator = "euler";
    std::string selector = "first";
    std::uint64_t seed = 0;
};

void add_common(CLI::App* app, Common& c)
{
    app->add_option("--system", c.system, "dde|etc|decay[:k=v,...] or a JSON system spec file");
    app->add_option("--history", c.history, "memory arc JSON; default is the canonical history");
    app->add_option("--x0", c.x0, "initial value for the canonical history");
    app->add_option("--h", c.h, "step size")->check(CLI::PositiveNumber);
    app->add_option("--T", c.T, "time horizon");
    app->add_option("--J", c.J, "jump cap")->check(CLI::NonNegativeNumber);
    app->add_option("--priority", c.priority)->check(CLI::IsMember({"jump-first", "flow-first"}));
    app->add_option("--integrator", c.integrator)->check(CLI::IsMember({"euler", "rk4"}));
    app->add_option("--selector", c.selector)->check(CLI::IsMember({"first", "random"}));
    app->add_option("--seed", c.seed);
}

SystemData load_system(const std::string& spec)
{
    if (spec.size() > 5 && spec.substr(spec.size() - 5) == ".json") return system_from_json_file(spec);
    return make_system(spec);
}

HybridArc load_history(const Common& c, const SystemData& s)
{
    if (c.history.empty()) return canonical_history(s, c.x0);
    return load_arc(c.history);
}

SolveOptions solve_options(const Common& c)
{
    SolveOptions o;
    o.h = c.h;
    o.T = c.T;
    o.J = c.J;
    o.priority = c.priority == "flow-first" ? Priority::FlowFirst : Priority::JumpFirst;
    o.integrator = c.integrator == "rk4" ? Integrator::RK4 : Integrator::Euler;
    o.selector = c.selector == "random" ? Selector::Random : Selector::First;
    o.seed = c.seed;
    return o;
}

std::vector<double> parse_list(const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (item.empty() || used != item.size()) throw Error(Errc::UsageError, "bad number '" + item + "'");
        out.push_back(v);
    }
    return out;
}

Radius parse_rho(const std::string& text)
{
    if (text.rfind("const:", 0) != 0) throw Error(Errc::UsageError, "rho must look like const:VALUE");
    auto v = parse_list(text.substr(6));
    if (v.size() != 1 || !(v[0] >= 0.0)) throw Error(Errc::UsageError, "rho must be a nonnegative constant");
    return constant_radius(v[0]);
}

json solution_json(const Solution& sol)
{
    json j;
    j["status"] = status_name(sol.status);
    j["t_end"] = sol.t_end;
    j["j_end"] = sol.j_end;
    j["note"] = sol.note;
    json jumps = json::array();
    for (const auto& r : sol.jumps) jumps.push_back({{"t", r.t}, {"j", r.j}, {"pre", r.pre}, {"post", r.post}});
    j["jumps"] = jumps;
    return j;
}

void emit(const json& report)
{
    json out = report;
    out["schema"] = kSchema;
    std::cout << out.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"hybrid systems with memory: simulation and graphical-distance tools"};
    // --h is the step size, so help is long-form only
    app.set_help_flag("--help", "print help and exit");
    app.require_subcommand(1);

    Common sim_c;
    std::string out_path, csv_path;
    auto* sim = app.add_subcommand("simulate", "solve a built-in or user system");
    add_common(sim, sim_c);
    sim->add_option("--out", out_path, "trajectory arc JSON");
    sim->add_option("--csv", csv_path, "trajectory CSV");

    std::string a_path, b_path, metric = "graphical";
    double tau = 1.0, rho = 1.0;
    auto* dist = app.add_subcommand("distance", "distance between two arcs");
    dist->add_option("--a", a_path)->required();
    dist->add_option("--b", b_path)->required();
    dist->add_option("--metric", metric)->check(CLI::IsMember({"graphical", "uniform", "taueps", "rhoeps"}));
    dist->add_option("--tau", tau)->check(CLI::NonNegativeNumber);
    dist->add_option("--rho", rho)->check(CLI::NonNegativeNumber);

    Common ps_c;
    std::string rho_spec = "const:1", deltas_spec = "0.5,0.25,0.125";
    auto* ps = app.add_subcommand("perturb-study", "well-posedness experiment over shrinking perturbations");
    add_common(ps, ps_c);
    ps->add_option("--rho", rho_spec, "const:VALUE");
    ps->add_option("--deltas", deltas_spec, "comma-separated scales in [0,1]");

    Common kl_c;
    std::string w_spec = "origin", beta_spec = "1,0.69", kl_deltas, kl_rho = "const:1";
    double kl_eps = 0.0;
    auto* kl = app.add_subcommand("kl-check", "check a KL bound along a solution");
    add_common(kl, kl_c);
    kl->add_option("--W", w_spec)->check(CLI::IsMember({"origin"}));
    kl->add_option("--beta", beta_spec, "C,mu for beta(r,s) = C r exp(-mu s)");
    kl->add_option("--eps", kl_eps)->check(CLI::NonNegativeNumber);
    kl->add_option("--deltas", kl_deltas, "also run the robustness experiment for these scales");
    kl->add_option("--rho", kl_rho, "const:VALUE");

    Common via_c;
    double via_eps = 1e-2;
    auto* via = app.add_subcommand("viability", "tangent-cone probe at the initial memory arc");
    add_common(via, via_c);
    via->add_option("--eps", via_eps)->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (const char* th = std::getenv("HMK_THREADS")) {
            std::string v = th;
            size_t used = 0;
            long n = 0;
            try {
                n = std::stol(v, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (v.empty() || used != v.size() || n < 1) throw Error(Errc::UsageError, "HMK_THREADS must be a positive integer");
        }

        if (*sim) {
            SystemData s = load_system(sim_c.system);
            Solution sol = solve(s, load_history(sim_c, s), solve_options(sim_c));
            if (!out_path.empty()) save_arc(out_path, sol.arc);
            if (!csv_path.empty()) write_file(csv_path, arc_to_csv(sol.arc));
            json r = solution_json(sol);
            r["command"] = "simulate";
            r["system"] = sim_c.system;
            emit(r);
        } else if (*dist) {
            HybridArc a = load_arc(a_path), b = load_arc(b_path);
            json r;
            r["command"] = "distance";
            r["metric"] = metric;
            if (metric == "graphical") {
                DistanceReport d = integrated_distance(a, b);
                r["d"] = d.d;
                r["rho_max"] = d.rho_max;
                r["tail_bound"] = d.tail_bound;
                r["hausdorff"] = d.hausdorff;
                json samples = json::array();
                for (size_t i = 0; i < d.d_rho_samples.size(); i += 10)
                    samples.push_back({d.d_rho_samples[i].first, d.d_rho_samples[i].second});
                r["d_rho_samples"] = samples;
            } else if (metric == "uniform") {
                r["d"] = uniform_distance(a, b);
            } else if (metric == "taueps") {
                r["tau"] = tau;
                r["d"] = tau_eps_closeness(a, b, tau);
            } else {
                r["rho"] = rho;
                r["d"] = graph_closeness(a, b, rho);
            }
            emit(r);
        } else if (*ps) {
            SystemData s = load_system(ps_c.system);
            ExperimentOptions o;
            o.solve = solve_options(ps_c);
            o.perturb.seed = ps_c.seed;
            auto deltas = parse_list(deltas_spec);
            ConvergenceReport c = wellposedness_experiment(s, parse_rho(rho_spec), deltas, load_history(ps_c, s), o);
            json r;
            r["command"] = "perturb-study";
            r["system"] = ps_c.system;
            r["nominal_status"] = c.nominal_status;
            json runs = json::array();
            for (size_t i = 0; i < c.deltas.size(); ++i)
                runs.push_back({{"delta", c.deltas[i]},
                                {"distance", c.distances[i]},
                                {"status", c.statuses[i]},
                                {"view_distances", c.view_distances[i]},
                                {"error", c.errors[i]}});
            r["runs"] = runs;
            r["nonincreasing"] = c.nonincreasing;
            r["bounded"] = c.bounded;
            r["limit_flow_residual"] = c.limit_flow_residual;
            r["limit_jump_gap"] = c.limit_jump_gap;
            r["limit_residual_ok"] = c.limit_residual_ok;
            emit(r);
        } else if (*kl) {
            SystemData s = load_system(kl_c.system);
            auto bv = parse_list(beta_spec);
            if (bv.size() != 2) throw Error(Errc::UsageError, "--beta expects C,mu");
            KLBound b{bv[0], bv[1], kl_eps};
            Target W = origin_target(s);
            HybridArc hist = load_history(kl_c, s);
            Solution sol = solve(s, hist, solve_options(kl_c));
            KLReport k = check_kl(sol, W, b);
            json r;
            r["command"] = "kl-check";
            r["system"] = kl_c.system;
            r["status"] = status_name(sol.status);
            r["r0"] = k.r0;
            r["worst_margin"] = k.worst_margin;
            r["pass"] = k.pass;
            r["first_violation"] = k.first_violation ? json{k.first_violation->first, k.first_violation->second}
                                                     : json(nullptr);
            if (!kl_deltas.empty()) {
                ExperimentOptions o;
                o.solve = solve_options(kl_c);
                o.perturb.seed = kl_c.seed;
                RobustnessReport rr =
                    robustness_experiment(s, W, b, parse_rho(kl_rho), parse_list(kl_deltas), {hist}, o);
                json runs = json::array();
                for (const auto& run : rr.runs)
                    runs.push_back({{"delta", run.delta},
                                    {"status", run.status},
                                    {"pass", run.kl.pass},
                                    {"worst_margin", run.kl.worst_margin}});
                r["robustness"] = {{"runs", runs},
                                   {"largest_passing_delta",
                                    rr.largest_passing_delta ? json(*rr.largest_passing_delta) : json(nullptr)},
                                   {"monotone_in_eps", rr.monotone_in_eps}};
            }
            emit(r);
        } else if (*via) {
            SystemData s = load_system(via_c.system);
            HybridArc hist = load_history(via_c, s);
            MemoryArc phi = memory_view(hist, 0.0, 0, s.delta);
            auto res = viability_probe(s, phi, via_eps);
            json r;
            r["command"] = "viability";
            r["system"] = via_c.system;
            r["found"] = res.has_value();
            if (res) {
                r["v"] = res->v;
                r["h"] = res->h;
                r["tangent_conditions"] = tangent_conditions_hold(s, phi, res->v, res->h, via_eps);
            }
            emit(r);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == Errc::IoError ? 3 : 2;
    }
    return 0;
}
