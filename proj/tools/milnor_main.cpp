#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "milnor/pipeline.hpp"
#include "milnor/version.hpp"

namespace {

struct CommonOpts {
    std::string poly;
    std::vector<std::string> vars;
    double delta = 1.0;
    std::vector<double> t;
    bool has_t = false;
    double epsilon = 0.0;
    bool has_epsilon = false;
    std::uint64_t seed = 0;
    std::string format = "text";
    double resolution = 0.0;
    int num_starts = 0;
    int max_attempts = 32;
    double magnitude = 0.0;
    bool serial = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("-p,--poly", o.poly, "polynomial text, e.g. \"x^3 - y^2\"")->required();
    cmd->add_option("-v,--vars", o.vars, "ordered variable names, comma separated")
        ->required()
        ->delimiter(',');
    cmd->add_option("--delta", o.delta, "Milnor sphere radius")->default_val(1.0);
    cmd->add_option("--t", o.t, "explicit perturbation vector, comma separated")->delimiter(',');
    cmd->add_option("--epsilon", o.epsilon, "explicit fibre level (default: selected automatically)");
    cmd->add_option("--seed", o.seed, "random seed")->default_val(0);
    cmd->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"text", "json"}))
        ->default_val("text");
    cmd->add_option("--resolution", o.resolution, "mesh grid spacing (default per dimension)");
    cmd->add_option("--num-starts", o.num_starts, "Newton multi-start count (default 200*2^n)");
    cmd->add_option("--max-attempts", o.max_attempts, "morsification attempts")->default_val(32);
    cmd->add_option("--magnitude", o.magnitude, "initial perturbation magnitude (default auto)");
    cmd->add_flag("--serial", o.serial, "run data-parallel kernels on the serial reference path");
}

milnor::AnalysisConfig to_config(const CommonOpts& o, CLI::App* cmd) {
    milnor::AnalysisConfig cfg;
    cfg.poly_text = o.poly;
    cfg.variables = o.vars;
    cfg.delta = o.delta;
    if (cmd->count("--t")) cfg.t = o.t;
    if (cmd->count("--epsilon")) cfg.epsilon = o.epsilon;
    if (cmd->count("--resolution")) cfg.resolution = o.resolution;
    cfg.seed = o.seed;
    cfg.format = o.format;
    cfg.max_attempts = o.max_attempts;
    cfg.magnitude = o.magnitude;
    if (o.num_starts > 0) cfg.solver.num_starts = o.num_starts;
    cfg.exec = o.serial ? milnor::ExecMode::serial : milnor::ExecMode::parallel;
    cfg.solver.exec = cfg.exec;
    return cfg;
}

milnor::Polynomial perturbed_input(const CommonOpts& o, CLI::App* cmd) {
    milnor::Polynomial f = milnor::parse_polynomial(o.poly, o.vars);
    if (cmd->count("--t")) {
        Eigen::VectorXd t(static_cast<Eigen::Index>(o.t.size()));
        for (std::size_t i = 0; i < o.t.size(); ++i) t[static_cast<Eigen::Index>(i)] = o.t[i];
        f = milnor::perturb(f, t);
    }
    return f;
}

int run_analyze(const CommonOpts& o, CLI::App* cmd, bool oracle, const std::string& sign,
                const std::string& export_path) {
    milnor::AnalysisConfig cfg = to_config(o, cmd);
    cfg.run_oracle = oracle;
    if (sign == "+")
        cfg.sign = milnor::SignChoice::positive;
    else if (sign == "-")
        cfg.sign = milnor::SignChoice::negative;
    else
        cfg.sign = milnor::SignChoice::both;
    if (!export_path.empty()) cfg.export_mesh_path = export_path;

    milnor::ReportEnvelope envelope = milnor::analyze(cfg);
    if (cfg.format == "json")
        std::cout << milnor::report_json(envelope);
    else
        std::cout << milnor::report_text(envelope);
    return envelope.exit_code();
}

int run_critical_points(const CommonOpts& o, CLI::App* cmd) {
    milnor::Polynomial f_t = perturbed_input(o, cmd);
    milnor::SolverConfig sc;
    if (o.num_starts > 0) sc.num_starts = o.num_starts;
    sc.seed = o.seed;
    sc.exec = o.serial ? milnor::ExecMode::serial : milnor::ExecMode::parallel;
    auto points = milnor::find_critical_points(f_t, o.delta, sc);
    if (o.format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& p : points) {
            nlohmann::json j;
            j["value"] = p.value;
            j["multiplier"] = p.multiplier;
            j["morse_index"] = p.morse_index;
            j["degenerate"] = p.degenerate;
            j["residual"] = p.residual;
            nlohmann::json loc = nlohmann::json::array();
            for (Eigen::Index i = 0; i < p.location.size(); ++i) loc.push_back(p.location[i]);
            j["location"] = loc;
            nlohmann::json spectrum = nlohmann::json::array();
            for (Eigen::Index i = 0; i < p.tangent_spectrum.size(); ++i)
                spectrum.push_back(p.tangent_spectrum[i]);
            j["tangent_spectrum"] = spectrum;
            arr.push_back(j);
        }
        std::cout << milnor::canonical_json(arr) << "\n";
    } else {
        std::cout << points.size() << " critical points on the " << o.delta << "-sphere\n";
        for (const auto& p : points) {
            std::cout << "  value " << p.value << "  multiplier " << p.multiplier << "  index "
                      << p.morse_index << (p.degenerate ? " (degenerate)" : "") << "  at [";
            for (Eigen::Index i = 0; i < p.location.size(); ++i)
                std::cout << (i ? ", " : "") << p.location[i];
            std::cout << "]\n";
        }
    }
    return 0;
}

int run_oracle(const CommonOpts& o, CLI::App* cmd, const std::string& out_path) {
    if (!cmd->count("--epsilon"))
        throw CLI::ValidationError("--epsilon", "oracle requires an explicit epsilon");
    milnor::Polynomial f_t = perturbed_input(o, cmd);
    milnor::MeshConfig mc;
    if (cmd->count("--resolution")) mc.resolution = o.resolution;
    mc.exec = o.serial ? milnor::ExecMode::serial : milnor::ExecMode::parallel;
    milnor::MeshComplex mesh = milnor::extract_fibre(f_t, o.epsilon, o.delta, mc);
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot open output path: " + out_path);
        milnor::write_off(mesh, out);
        std::cout << "wrote " << out_path << " (" << mesh.vertices.size() << " vertices)\n";
        return 0;
    }
    milnor::HomologyReport report = milnor::relative_homology_mesh(mesh);
    if (o.format == "json") {
        nlohmann::json j;
        nlohmann::json ranks = nlohmann::json::object();
        for (const auto& [k, r] : report.ranks) ranks[std::to_string(k)] = r;
        j["ranks"] = ranks;
        nlohmann::json torsion = nlohmann::json::object();
        for (const auto& [k, list] : report.torsion) torsion[std::to_string(k)] = list;
        j["torsion"] = torsion;
        j["euler_rel"] = report.euler_rel;
        j["cells"] = {{"vertices", mesh.vertices.size()},
                      {"segments", mesh.segments.size()},
                      {"triangles", mesh.triangles.size()}};
        std::cout << milnor::canonical_json(j) << "\n";
    } else {
        std::cout << "mesh: " << mesh.vertices.size() << " vertices, "
                  << (mesh.n == 1 ? mesh.segments.size() : mesh.triangles.size())
                  << (mesh.n == 1 ? " segments" : " triangles") << "\n";
        std::cout << "H_*(Phi, dPhi; Z):\n";
        if (report.ranks.empty()) std::cout << "  (all homology groups vanish)\n";
        for (const auto& [k, r] : report.ranks) {
            std::cout << "  H_" << k << " = Z";
            if (r > 1) std::cout << "^" << r;
            std::cout << "\n";
        }
        std::cout << "euler characteristic (rel): " << report.euler_rel << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"relative homology of real Milnor fibres via sphere Morse data"};
    app.set_version_flag("--version", milnor::kVersion);
    app.require_subcommand(1);

    CommonOpts oa, oc, oo, oe;

    CLI::App* analyze = app.add_subcommand("analyze", "run the full pipeline");
    add_common(analyze, oa);
    bool oracle_flag = false;
    std::string sign = "+";
    std::string export_path;
    analyze->add_flag("--oracle", oracle_flag, "verify with the mesh homology oracle");
    analyze->add_option("--sign", sign, "fibre sign")->check(CLI::IsMember({"+", "-", "both"}))
        ->default_val("+");
    analyze->add_option("--export-mesh", export_path, "write the fibre mesh as an OFF file");

    CLI::App* crit = app.add_subcommand("critical-points", "enumerate sphere critical points");
    add_common(crit, oc);

    CLI::App* oracle = app.add_subcommand("oracle", "mesh the fibre and compute homology directly");
    add_common(oracle, oo);

    CLI::App* exportm = app.add_subcommand("export-mesh", "mesh the fibre and write an OFF file");
    add_common(exportm, oe);
    std::string out_path;
    exportm->add_option("--out", out_path, "output OFF path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(analyze)) return run_analyze(oa, analyze, oracle_flag, sign, export_path);
        if (app.got_subcommand(crit)) return run_critical_points(oc, crit);
        if (app.got_subcommand(oracle)) return run_oracle(oo, oracle, "");
        if (app.got_subcommand(exportm)) return run_oracle(oe, exportm, out_path);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
