// Command-line front end: certify the worked models and user-supplied
// covering chains, emitting deterministic reports and CSV files.
#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>

#include "chainshadow/chain.hpp"
#include "chainshadow/config.hpp"
#include "chainshadow/linmodel.hpp"
#include "chainshadow/report.hpp"
#include "chainshadow/toymodel.hpp"
#include "chainshadow/triangular.hpp"

namespace fs = std::filesystem;
using namespace chainshadow;

namespace {

constexpr const char* kVersion = "0.1.0";

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 12345;
    int threads = 1;
    int grid = 3;
};

Config load_config(const CommonOpts& o) {
    if (o.config_path.empty()) return Config::parse_text("", "<defaults>");
    return Config::parse_file(o.config_path);
}

std::string out_path(const CommonOpts& o, const std::string& name) {
    fs::create_directories(o.out_dir);
    return (fs::path(o.out_dir) / name).string();
}

Manifest make_manifest(const CommonOpts& o, const std::string& command, const Config& cfg) {
    Manifest m;
    m.tool_version = kVersion;
    m.command = command;
    m.seed = o.seed;
    m.config_snapshot = cfg.snapshot();
    return m;
}

int cmd_linmodel(const CommonOpts& o) {
    const auto t0 = std::chrono::steady_clock::now();
    Config raw = load_config(o);
    linmodel::LinearModelConfig cfg = linmodel::LinearModelConfig::from_config(raw);

    auto certs = linmodel::verify_model(cfg);
    bool all_pass = true;
    Report rep;
    for (const auto& c : certs) {
        all_pass = all_pass && c.cert.pass;
        rep.raw(certificate_report(c.cert, c.kind + "_" + std::to_string(c.index)));
    }
    auto orbit = linmodel::shadow_orbit(cfg);
    rep.line("solver.converged", orbit.solution.converged);
    rep.line("solver.residual", orbit.solution.residual);
    rep.line("solver.interior", orbit.solution.interior);

    Csv visits({"i", "k", "distance"});
    bool close = true;
    for (std::size_t i = 0; i < orbit.visit_distance.size(); ++i) {
        visits.row({static_cast<double>(i), static_cast<double>(orbit.visit_index[i]),
                    orbit.visit_distance[i]});
        close = close && orbit.visit_distance[i] < cfg.eps;
    }
    rep.line("visits.within_eps", close);

    Manifest man = make_manifest(o, "linmodel", raw);
    man.tolerances = {{"solve", 1e-10}, {"margin_deflation", 1e-10}};
    man.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    man.artifacts = {"report.txt", "visits.csv"};
    rep.write(out_path(o, "report.txt"));
    visits.write(out_path(o, "visits.csv"));
    man.write(out_path(o, "manifest.txt"));

    const bool ok = all_pass && orbit.solution.converged && orbit.solution.interior && close;
    std::cout << (ok ? "linmodel: all certificates pass, orbit within eps\n"
                     : "linmodel: FAILED\n");
    return ok ? 0 : 1;
}

int cmd_triangular(const CommonOpts& o, double threshold) {
    const auto t0 = std::chrono::steady_clock::now();
    Config raw = load_config(o);
    triangular::TriangularConfig cfg = triangular::TriangularConfig::from_config(raw);

    auto traj = triangular::integrate(cfg);
    Csv csv([&] {
        std::vector<std::string> h{"t"};
        for (int i = 1; i <= cfg.n; ++i) h.push_back("x" + std::to_string(i));
        return h;
    }());
    bool in_box = true;
    for (std::size_t s = 0; s < traj.size(); ++s) {
        std::vector<double> row{traj.times[s]};
        for (int i = 0; i < cfg.n; ++i) row.push_back(traj.states[s][i]);
        csv.row(row);
        in_box = in_box && traj.states[s].minCoeff() >= 0.0 &&
                 traj.states[s].maxCoeff() <= 1.0 + 1e-6;
    }
    auto times = triangular::transition_times(traj, threshold);
    Csv trans({"i", "t_cross"});
    Report rep;
    rep.line("threshold", threshold);
    for (int i = 0; i < cfg.n; ++i) {
        trans.row_mixed({std::to_string(i + 1),
                         times[i] ? format_g17(*times[i]) : std::string("none")});
        rep.line("t_cross.x" + std::to_string(i + 1),
                 times[i] ? format_g17(*times[i]) : std::string("none"));
    }
    rep.line("states_in_unit_box", in_box);

    Manifest man = make_manifest(o, "triangular", raw);
    man.tolerances = {{"rtol", cfg.rtol}, {"atol", cfg.atol}};
    man.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    man.artifacts = {"trajectory.csv", "transitions.csv", "report.txt"};
    csv.write(out_path(o, "trajectory.csv"));
    trans.write(out_path(o, "transitions.csv"));
    rep.write(out_path(o, "report.txt"));
    man.write(out_path(o, "manifest.txt"));

    std::cout << (in_box ? "triangular: trajectory stayed in the unit box\n"
                         : "triangular: FAILED (left the unit box)\n");
    return in_box ? 0 : 1;
}

int cmd_toymodel(const CommonOpts& o) {
    const auto t0 = std::chrono::steady_clock::now();
    Config raw = load_config(o);
    toymodel::ToyConfig cfg = toymodel::ToyConfig::from_config(raw);

    auto params = toymodel::covering_params(cfg);
    Csv pcsv({"j", "gamma_in_cp", "gamma_in_ym", "gamma_in_xm", "r_in_xp", "r_in_yp", "r_in_cf",
              "gamma_out_ym", "gamma_out_xm", "gamma_out_cp", "r_out_xp", "r_out_yp", "r_out_cf"});
    for (int j = 0; j <= cfg.N; ++j)
        pcsv.row({static_cast<double>(j), params.gamma_in_cp[j], params.gamma_in_ym,
                  params.gamma_in_xm, params.r_in_xp, params.r_in_yp, params.r_in_cf[j],
                  params.gamma_out_ym, params.gamma_out_xm, params.gamma_out_cp[j],
                  params.r_out_xp, params.r_out_yp, params.r_out_cf[j]});

    Report rep;
    rep.line("T", params.T);
    rep.line("A", params.A);
    rep.line("min_slack", params.min_slack);
    for (const auto& s : params.slacks)
        rep.line("slack." + s.name + (s.j >= 0 ? "." + std::to_string(s.j) : ""), s.slack);

    bool all_pass = true;
    SampleOptions so;
    so.grid_density = o.grid;
    so.extra_random = 64;
    so.seed = o.seed;
    so.threads = o.threads;
    for (int j = 0; j <= cfg.N; ++j) {
        auto cert = toymodel::verify_flow_covering(cfg, params, j, so);
        all_pass = all_pass && cert.pass;
        rep.raw(certificate_report(cert, "flow_" + std::to_string(j)));
    }
    for (int j = 0; j < cfg.N; ++j) {
        auto cert = toymodel::verify_jump_covering(cfg, params, j);
        all_pass = all_pass && cert.pass;
        rep.raw(certificate_report(cert, "jump_" + std::to_string(j)));
    }

    auto rundiff = toymodel::diffuse(cfg, params);
    Csv itin({"chart", "time", "distance"});
    bool bounded = rundiff.solution.converged && rundiff.solution.interior;
    const double dist_bound = 10.0 * params.T * std::exp(-params.T);
    for (const auto& v : rundiff.visits) {
        itin.row({static_cast<double>(v.chart), v.t_min, v.min_distance});
        bounded = bounded && v.min_distance <= dist_bound;
    }
    rep.line("diffusion.converged", rundiff.solution.converged);
    rep.line("diffusion.residual", rundiff.solution.residual);
    rep.line("diffusion.c_dist", rundiff.c_dist);
    rep.line("diffusion.distance_bound", dist_bound);
    rep.line("diffusion.within_bound", bounded);

    Manifest man = make_manifest(o, "toymodel", raw);
    man.tolerances = {{"flow_rtol", cfg.rtol}, {"flow_atol", cfg.atol}, {"solve", 1e-8}};
    man.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    man.artifacts = {"params.csv", "report.txt", "itinerary.csv"};
    pcsv.write(out_path(o, "params.csv"));
    itin.write(out_path(o, "itinerary.csv"));
    rep.write(out_path(o, "report.txt"));
    man.write(out_path(o, "manifest.txt"));

    const bool ok = all_pass && bounded;
    std::cout << (ok ? "toymodel: all certificates pass, diffusion within bound\n"
                     : "toymodel: FAILED\n");
    return ok ? 0 : 1;
}

ChainParseContext model_builders(const Config& raw) {
    ChainParseContext ctx;
    ctx.register_builder("linmodel", [&raw](const std::vector<std::string>& args) {
        if (args.size() < 2) throw std::runtime_error("map linmodel <local|transition> <i> [k]");
        auto cfg = linmodel::LinearModelConfig::from_config(raw);
        auto inst = linmodel::build_model(cfg);
        const int i = std::stoi(args[1]);
        if (args[0] == "local") {
            const int k = args.size() > 2 ? std::stoi(args[2]) : inst.iterates.at(i);
            return MapHandle::from_affine(inst.local.at(i).affine->power(k),
                                          "linmodel.local." + std::to_string(i));
        }
        if (args[0] == "transition") return inst.transition.at(i);
        throw std::runtime_error("unknown linmodel map kind '" + args[0] + "'");
    });
    ctx.register_builder("toymodel", [&raw](const std::vector<std::string>& args) {
        if (args.size() < 2) throw std::runtime_error("map toymodel <flow|jump> <j>");
        auto cfg = toymodel::ToyConfig::from_config(raw);
        auto params = toymodel::covering_params(cfg);
        const int j = std::stoi(args[1]);
        if (args[0] == "flow") return toymodel::flow_handle(cfg, params, j);
        if (args[0] == "jump") return toymodel::jump_handle(cfg, j);
        throw std::runtime_error("unknown toymodel map kind '" + args[0] + "'");
    });
    return ctx;
}

int cmd_verify(const CommonOpts& o, const std::string& chain_path) {
    const auto t0 = std::chrono::steady_clock::now();
    Config raw = load_config(o);
    ChainParseContext ctx = model_builders(raw);
    ChainSpec spec = parse_chain_file(chain_path, ctx);

    SampleOptions so;
    so.grid_density = o.grid;
    so.seed = o.seed;
    so.threads = o.threads;
    auto certs = certify_chain(spec, so);
    Report rep;
    bool all_pass = true;
    for (std::size_t i = 0; i < certs.size(); ++i) {
        all_pass = all_pass && certs[i].pass;
        rep.raw(certificate_report(certs[i], "link_" + std::to_string(i)));
    }
    auto endpoint = endpoint_nonsingularity(spec);
    rep.line("endpoint.nonsingular", endpoint.nonsingular);
    rep.line("endpoint.abs_det", endpoint.abs_det);

    auto sol = solve_chain(spec);
    rep.line("solver.converged", sol.converged);
    rep.line("solver.residual", sol.residual);
    rep.line("solver.interior", sol.interior);
    if (!sol.diagnostic.empty()) rep.line("solver.diagnostic", sol.diagnostic);
    if (sol.converged) {
        std::string q0;
        for (int i = 0; i < sol.q0.size(); ++i) q0 += (i ? " " : "") + format_g17(sol.q0[i]);
        rep.line("solution.q0", q0);
        for (std::size_t i = 0; i < sol.itinerary.size(); ++i) {
            std::string pt;
            for (int d = 0; d < sol.itinerary[i].size(); ++d)
                pt += (d ? " " : "") + format_g17(sol.itinerary[i][d]);
            rep.line("solution.q" + std::to_string(i), pt);
        }
    }

    Manifest man = make_manifest(o, "verify " + chain_path, raw);
    man.tolerances = {{"solve", 1e-10}};
    man.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    man.artifacts = {"report.txt"};
    rep.write(out_path(o, "report.txt"));
    man.write(out_path(o, "manifest.txt"));

    const bool ok = all_pass && endpoint.nonsingular && sol.converged && sol.interior;
    std::cout << (ok ? "verify: chain certified and solved\n" : "verify: FAILED\n");
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"covering-relation chains with dropped exit directions"};
    app.set_version_flag("--version", std::string("chainshadow ") + kVersion);
    app.require_subcommand(1);

    CommonOpts opts;
    double threshold = 0.9;
    std::string chain_path;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config_path, "sectioned key = value config file");
        sub->add_option("--out", opts.out_dir, "output directory");
        sub->add_option("--seed", opts.seed, "random seed for boundary sampling");
        sub->add_option("--threads", opts.threads, "worker threads for sampling");
        sub->add_option("--grid", opts.grid, "samples per block axis in sampled checks");
    };

    CLI::App* lin = app.add_subcommand("linmodel", "certify the linear chain model");
    add_common(lin);
    CLI::App* tri = app.add_subcommand("triangular", "integrate the triangular cascade system");
    add_common(tri);
    tri->add_option("--threshold", threshold, "crossing threshold for transition times");
    CLI::App* toy = app.add_subcommand("toymodel", "certify the simplified lattice toy model");
    add_common(toy);
    CLI::App* ver = app.add_subcommand("verify", "certify and solve a chain file");
    ver->add_option("chain", chain_path, "chain description file")->required();
    add_common(ver);

    CLI11_PARSE(app, argc, argv);

    try {
        if (lin->parsed()) return cmd_linmodel(opts);
        if (tri->parsed()) return cmd_triangular(opts, threshold);
        if (toy->parsed()) return cmd_toymodel(opts);
        if (ver->parsed()) return cmd_verify(opts, chain_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
