#include "milnor/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "milnor/sampling.hpp"
#include "milnor/version.hpp"

namespace milnor {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

GermCheck germ_hypothesis_check(const Polynomial& f, double delta, const SolverConfig& cfg) {
    GermCheck check;
    const int d = static_cast<int>(f.num_variables());
    const CompiledPoly fc(f);
    const double scale = 1.0 + f.coefficient_scale();

    // Zero locus near the origin: a valid germ takes both signs on every
    // small sphere (the zero locus is a cone-like set of regular points off
    // the origin). Sample several radii; a positive and a negative sample on
    // the same sphere bracket a zero along the connecting great-circle arc.
    const int sample_count = 512 << std::min(d - 1, 4);
    bool all_radii_change_sign = true;
    for (double radius : {delta, delta / 2, delta / 4, delta / 8}) {
        std::vector<Eigen::VectorXd> pts =
            sphere_starts(d, radius, sample_count, cfg.seed ^ 0x6b43a9b5ULL);
        double best_pos = 0.0, best_neg = 0.0;
        Eigen::VectorXd arg_pos, arg_neg;
        for (const auto& p : pts) {
            double v = fc(p);
            if (v > best_pos) {
                best_pos = v;
                arg_pos = p;
            }
            if (v < best_neg) {
                best_neg = v;
                arg_neg = p;
            }
        }
        if (!(best_pos > 0.0 && best_neg < 0.0)) {
            all_radii_change_sign = false;
            break;
        }
        if (!check.zero_locus_witness) {
            // bisect the great-circle arc between the two samples
            Eigen::VectorXd a = arg_pos, b = arg_neg;
            for (int it = 0; it < 80; ++it) {
                Eigen::VectorXd mid = (a + b);
                double n = mid.norm();
                if (n < 1e-14) break;  // antipodal; perturb by restarting from b
                mid *= radius / n;
                double fm = fc(mid);
                if (fm == 0.0) {
                    a = b = mid;
                    break;
                }
                (fm > 0 ? a : b) = mid;
            }
            if (std::abs(fc(a)) < 1e-7 * scale) check.zero_locus_witness = a;
        }
    }
    check.link_nonempty = all_radii_change_sign;

    // Isolated singular point of the zero locus: search for grad f = 0 on
    // {f = 0} away from the origin.
    for (const auto& x : ambient_critical_points(f, delta, cfg)) {
        if (x.norm() < 1e-4 * delta) continue;
        if (std::abs(fc(x)) < 1e-8 * scale) {
            check.isolated_singularity = false;
            check.singular_witness = x;
            break;
        }
    }
    return check;
}

bool ReportEnvelope::has_caveats() const {
    if (!global_caveats.empty()) return true;
    for (const auto& r : results)
        if (!r.caveats.empty()) return true;
    return false;
}

namespace {

// Mesh level inside the validated band: the geometric mean of
// (max(a, b/64), b). Fibres over the open band are pairwise homeomorphic, so
// the oracle may mesh at a grid-resolvable level even when the reported
// epsilon is tiny.
double mesh_level_for(double bracket_lo, double bracket_hi) {
    double a = std::max(bracket_lo, bracket_hi / 64.0);
    return std::sqrt(a * bracket_hi);
}

SideResult analyze_side(const Polynomial& f_signed, const std::string& label,
                        const AnalysisConfig& config, const RadiusVerdict& delta_check) {
    SideResult side;
    side.label = label;

    MorsifyConfig mc;
    mc.seed = config.seed;
    mc.max_attempts = config.max_attempts;
    mc.magnitude = config.magnitude;
    mc.solver = config.solver;
    mc.solver.exec = config.exec;

    MorsifyResult morse;
    if (config.t) {
        Eigen::VectorXd t(static_cast<Eigen::Index>(config.t->size()));
        for (std::size_t i = 0; i < config.t->size(); ++i) t[static_cast<Eigen::Index>(i)] = (*config.t)[i];
        morse = morsify_with_fixed_t(f_signed, config.delta, t, mc);
        if (!morse.report.passed())
            throw MorsifyExhaustedError("explicit perturbation fails Morse validation", morse.report);
    } else {
        morse = morsify(f_signed, config.delta, mc);
    }
    side.validation = morse.report;
    side.sphere_points = morse.points;
    side.attempts_used = morse.attempts_used;

    side.milnor.delta = config.delta;
    side.milnor.t = morse.params;
    side.milnor.delta_check = delta_check;
    side.milnor.epsilon_rationale.ambient_values = morse.ambient_values;
    side.milnor.epsilon_rationale.bracket_lo = morse.epsilon_bracket_lo;
    side.milnor.epsilon_rationale.bracket_hi = morse.epsilon_bracket_hi;

    if (!delta_check.pass) side.caveats.push_back("delta_check_failed");
    if (f_signed.num_variables() >= 3) side.caveats.push_back("completeness_heuristic");

    double epsilon;
    if (config.epsilon) {
        epsilon = *config.epsilon;
        if (epsilon <= 0) throw std::invalid_argument("explicit epsilon must be positive");
        side.milnor.epsilon_rationale.bracket_lo = 0.0;
        side.milnor.epsilon_rationale.bracket_hi = epsilon;
    } else if (morse.empty_positive_fibre) {
        side.empty_fibre = true;
        side.caveats.push_back("empty_" + label + "_fibre");
        side.milnor.epsilon = std::numeric_limits<double>::quiet_NaN();
        side.handles = handle_decomposition({}, static_cast<int>(f_signed.num_variables()));
        side.homology_morse = relative_homology(side.handles);
        return side;
    } else {
        epsilon = morse.epsilon;
    }
    side.milnor.epsilon = epsilon;

    side.fibre_points = filter_fibre(side.sphere_points, epsilon, FibreSign::positive);
    side.handles = handle_decomposition(side.fibre_points, static_cast<int>(f_signed.num_variables()));
    side.homology_morse = relative_homology(side.handles);
    for (const auto& c : side.homology_morse.caveats) side.caveats.push_back(c);

    GreatCircleConfig gc = config.great_circle;
    gc.seed = config.seed;
    gc.exec = config.exec;
    side.great_circle = great_circle_check(morse.f_t, config.delta, epsilon, gc);
    if (side.great_circle.violation_found()) side.caveats.push_back("great_circle_violation");

    const bool want_mesh = config.run_oracle || config.export_mesh_path.has_value();
    if (want_mesh && f_signed.num_variables() <= 3) {
        double level = config.epsilon
                           ? epsilon
                           : mesh_level_for(std::max(morse.epsilon_bracket_lo, 1e-12),
                                            morse.epsilon_bracket_hi);
        side.mesh_level = level;
        MeshConfig mesh_cfg = config.mesh;
        if (config.resolution) mesh_cfg.resolution = *config.resolution;
        mesh_cfg.exec = config.exec;
        MeshComplex mesh = extract_fibre(morse.f_t, level, config.delta, mesh_cfg);
        if (config.run_oracle) {
            side.homology_mesh = relative_homology_mesh(mesh);
            side.oracle_compare = compare(side.homology_morse, *side.homology_mesh);
            if (!side.oracle_compare->agree) side.caveats.push_back("oracle_disagreement");
        }
        if (config.export_mesh_path) {
            std::string path = *config.export_mesh_path;
            if (config.sign == SignChoice::both) path += "." + label;
            std::ofstream out(path);
            if (!out) throw std::runtime_error("cannot open mesh export path: " + path);
            write_off(mesh, out);
        }
    } else if (want_mesh) {
        side.caveats.push_back("oracle_unavailable_for_dimension");
    }
    return side;
}

}  // namespace

ReportEnvelope analyze(const AnalysisConfig& config) {
    ReportEnvelope envelope;
    envelope.config = config;
    auto t_total = Clock::now();

    Polynomial f = parse_polynomial(config.poly_text, config.variables);
    if (f.is_constant()) throw GermHypothesisError("polynomial is constant");
    if (f.constant_term() != 0)
        throw GermHypothesisError("germ does not vanish at the origin: f(0) != 0");
    if (config.t && config.t->size() != f.num_variables())
        throw DimensionError("explicit t length must equal the variable count");

    SolverConfig probe = config.solver;
    probe.exec = config.exec;
    probe.seed = config.seed;

    auto t0 = Clock::now();
    envelope.germ = germ_hypothesis_check(f, config.delta, probe);
    envelope.timings_ms["germ_check"] = ms_since(t0);
    if (!envelope.germ.link_nonempty)
        throw GermHypothesisError(
            "zero-locus-dimension error: no point of {f = 0} found near the origin; the link "
            "appears empty (hypothesis: (f^{-1}(0), 0) of positive dimension)");
    if (!envelope.germ.isolated_singularity)
        envelope.global_caveats.push_back("isolated_singularity_check_failed");

    t0 = Clock::now();
    RadiusVerdict delta_check = check_milnor_radius(f, config.delta, probe);
    envelope.timings_ms["delta_check"] = ms_since(t0);

    auto run_side = [&](const Polynomial& g, const std::string& label) {
        auto ts = Clock::now();
        envelope.results.push_back(analyze_side(g, label, config, delta_check));
        envelope.timings_ms["side_" + label] = ms_since(ts);
    };

    if (config.sign == SignChoice::positive || config.sign == SignChoice::both)
        run_side(f, "positive");
    if (config.sign == SignChoice::negative || config.sign == SignChoice::both)
        run_side(-f, "negative");

    envelope.timings_ms["total"] = ms_since(t_total);
    return envelope;
}

// ------------------------------------------------------------ serialization

namespace {

nlohmann::json vec_to_json(const Eigen::VectorXd& v) {
    nlohmann::json a = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

nlohmann::json point_to_json(const CriticalPoint& p) {
    nlohmann::json j;
    j["location"] = vec_to_json(p.location);
    j["value"] = p.value;
    j["multiplier"] = p.multiplier;
    j["tangent_spectrum"] = vec_to_json(p.tangent_spectrum);
    j["morse_index"] = p.morse_index;
    j["residual"] = p.residual;
    j["degenerate"] = p.degenerate;
    return j;
}

nlohmann::json ranks_to_json(const HomologyReport& r) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, rank] : r.ranks) j[std::to_string(k)] = rank;
    return j;
}

nlohmann::json homology_to_json(const HomologyReport& r) {
    nlohmann::json j;
    j["ranks"] = ranks_to_json(r);
    nlohmann::json torsion = nlohmann::json::object();
    for (const auto& [k, list] : r.torsion) torsion[std::to_string(k)] = list;
    j["torsion"] = torsion;
    j["euler_rel"] = r.euler_rel;
    j["caveats"] = r.caveats;
    return j;
}

const char* sign_name(SignChoice s) {
    switch (s) {
        case SignChoice::positive: return "+";
        case SignChoice::negative: return "-";
        default: return "both";
    }
}

}  // namespace

nlohmann::json envelope_to_json(const ReportEnvelope& e) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["version"] = kVersion;
    j["exit_code"] = e.exit_code();

    nlohmann::json cfg;
    cfg["poly"] = e.config.poly_text;
    cfg["variables"] = e.config.variables;
    cfg["delta"] = e.config.delta;
    cfg["sign"] = sign_name(e.config.sign);
    cfg["seed"] = e.config.seed;
    cfg["oracle"] = e.config.run_oracle;
    cfg["max_attempts"] = e.config.max_attempts;
    if (e.config.epsilon) cfg["epsilon"] = *e.config.epsilon;
    if (e.config.t) cfg["t"] = *e.config.t;
    if (e.config.resolution) cfg["resolution"] = *e.config.resolution;
    j["config"] = cfg;

    nlohmann::json germ;
    germ["link_nonempty"] = e.germ.link_nonempty;
    germ["isolated_singularity"] = e.germ.isolated_singularity;
    if (e.germ.zero_locus_witness) germ["zero_locus_witness"] = vec_to_json(*e.germ.zero_locus_witness);
    if (e.germ.singular_witness) germ["singular_witness"] = vec_to_json(*e.germ.singular_witness);
    j["germ_check"] = germ;

    j["global_caveats"] = e.global_caveats;

    nlohmann::json sides = nlohmann::json::object();
    for (const auto& side : e.results) {
        nlohmann::json s;
        nlohmann::json milnor;
        milnor["delta"] = side.milnor.delta;
        milnor["epsilon"] = side.milnor.epsilon;
        milnor["t"] = vec_to_json(side.milnor.t.t);
        milnor["t_magnitude"] = side.milnor.t.magnitude;
        milnor["t_seed"] = side.milnor.t.seed;
        milnor["delta_check_pass"] = side.milnor.delta_check.pass;
        if (side.milnor.delta_check.witness)
            milnor["delta_check_witness"] = vec_to_json(*side.milnor.delta_check.witness);
        nlohmann::json rationale;
        rationale["bracket_lo"] = side.milnor.epsilon_rationale.bracket_lo;
        rationale["bracket_hi"] = side.milnor.epsilon_rationale.bracket_hi;
        rationale["ambient_values"] = side.milnor.epsilon_rationale.ambient_values;
        milnor["epsilon_rationale"] = rationale;
        s["milnor_data"] = milnor;

        nlohmann::json val;
        val["nondegenerate"] = side.validation.nondegenerate;
        val["min_abs_restricted_hessian_det"] = side.validation.min_abs_restricted_hessian_det;
        val["distinct_values"] = side.validation.distinct_values;
        val["min_value_gap"] = side.validation.min_value_gap;
        val["values_in_band"] = side.validation.values_in_band;
        val["num_points"] = side.validation.num_points;
        val["num_ambient_critical_points"] = side.validation.num_ambient_critical_points;
        s["morse_validation"] = val;

        nlohmann::json pts = nlohmann::json::array();
        for (const auto& p : side.sphere_points) pts.push_back(point_to_json(p));
        s["critical_points"] = pts;

        nlohmann::json fib = nlohmann::json::array();
        for (const auto& p : side.fibre_points) fib.push_back(point_to_json(p));
        s["fibre_critical_points"] = fib;

        nlohmann::json gc;
        gc["violation_found"] = side.great_circle.violation_found();
        gc["samples_used"] = side.great_circle.samples_used;
        gc["automatic"] = side.great_circle.automatic;
        if (side.great_circle.violation) {
            gc["violation_point"] = vec_to_json(side.great_circle.violation->point);
            gc["violation_direction"] = vec_to_json(side.great_circle.violation->direction);
            gc["min_value_on_circle"] = side.great_circle.violation->min_value_on_circle;
        }
        s["great_circle"] = gc;

        nlohmann::json handles;
        handles["m"] = side.handles.m;
        handles["indices"] = side.handles.indices;
        handles["description"] = side.handles.describe();
        s["handle_decomposition"] = handles;

        s["homology"] = homology_to_json(side.homology_morse);
        if (side.homology_mesh) {
            s["oracle_homology"] = homology_to_json(*side.homology_mesh);
            s["oracle_mesh_level"] = side.mesh_level ? nlohmann::json(*side.mesh_level) : nlohmann::json();
        }
        if (side.oracle_compare) {
            nlohmann::json cmp;
            cmp["agree"] = side.oracle_compare->agree;
            cmp["ranks_equal"] = side.oracle_compare->ranks_equal;
            cmp["mesh_torsion_free"] = side.oracle_compare->mesh_torsion_free;
            cmp["euler_equal"] = side.oracle_compare->euler_equal;
            if (side.oracle_compare->first_mismatch_degree)
                cmp["first_mismatch_degree"] = *side.oracle_compare->first_mismatch_degree;
            cmp["note"] = side.oracle_compare->note;
            s["oracle_compare"] = cmp;
        }
        s["caveats"] = side.caveats;
        s["empty_fibre"] = side.empty_fibre;
        s["attempts_used"] = side.attempts_used;
        sides[side.label] = s;
    }
    j["results"] = sides;
    j["timings"] = e.timings_ms;
    return j;
}

namespace {

void dump_canonical(const nlohmann::json& j, std::string& out) {
    switch (j.type()) {
        case nlohmann::json::value_t::object: {
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {  // nlohmann objects are key-sorted
                if (!first) out += ',';
                first = false;
                out += nlohmann::json(it.key()).dump();
                out += ':';
                dump_canonical(it.value(), out);
            }
            out += '}';
            break;
        }
        case nlohmann::json::value_t::array: {
            out += '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ',';
                dump_canonical(j[i], out);
            }
            out += ']';
            break;
        }
        case nlohmann::json::value_t::number_float: {
            double v = j.get<double>();
            if (!std::isfinite(v)) {
                out += "null";
            } else {
                char buf[64];
                std::snprintf(buf, sizeof(buf), "%.17g", v);
                out += buf;
            }
            break;
        }
        default:
            out += j.dump();
            break;
    }
}

}  // namespace

std::string canonical_json(const nlohmann::json& j) {
    std::string out;
    dump_canonical(j, out);
    return out;
}

std::string report_json(const ReportEnvelope& e) { return canonical_json(envelope_to_json(e)) + "\n"; }

namespace {

std::string format_ranks(const HomologyReport& r) {
    if (r.ranks.empty()) return "  (all homology groups vanish)\n";
    std::ostringstream out;
    for (const auto& [k, rank] : r.ranks) {
        out << "  H_" << k << " = Z";
        if (rank > 1) out << "^" << rank;
        auto it = r.torsion.find(k);
        if (it != r.torsion.end())
            for (const auto& t : it->second) out << " + Z/" << t;
        out << "\n";
    }
    return out.str();
}

}  // namespace

std::string report_text(const ReportEnvelope& e) {
    std::ostringstream out;
    out << "milnor " << kVersion << "\n";
    out << "f = " << e.config.poly_text << "   variables:";
    for (const auto& v : e.config.variables) out << " " << v;
    out << "   delta = " << e.config.delta << "\n";
    out << "germ check: link " << (e.germ.link_nonempty ? "nonempty" : "EMPTY")
        << ", isolated singularity " << (e.germ.isolated_singularity ? "plausible" : "VIOLATED (witness found)")
        << "\n";

    for (const auto& side : e.results) {
        out << "\n== " << side.label << " fibre ==\n";
        const auto& md = side.milnor;
        out << "delta check: " << (md.delta_check.pass ? "pass" : "FAIL") << "\n";
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.6g", md.epsilon);
        out << "epsilon = " << buf << "  (bracket " << md.epsilon_rationale.bracket_lo << " .. "
            << md.epsilon_rationale.bracket_hi << ")\n";
        out << "perturbation t = [";
        for (Eigen::Index i = 0; i < md.t.t.size(); ++i) out << (i ? ", " : "") << md.t.t[i];
        out << "]  seed " << md.t.seed << "\n";
        out << "sphere critical points: " << side.sphere_points.size() << " (validation "
            << (side.validation.passed() ? "pass" : "FAIL") << ")\n";
        for (const auto& p : side.fibre_points) {
            out << "  value " << p.value << "  index " << p.morse_index << "  at [";
            for (Eigen::Index i = 0; i < p.location.size(); ++i) out << (i ? ", " : "") << p.location[i];
            out << "]\n";
        }
        if (side.empty_fibre) {
            out << "fibre region empty; all relative homology groups vanish\n";
            continue;
        }
        out << "great circle check: "
            << (side.great_circle.violation_found() ? "VIOLATION FOUND" : "no violation found")
            << " (" << side.great_circle.samples_used << " circles"
            << (side.great_circle.automatic ? ", automatic for this dimension" : "") << ")\n";
        out << "Phi ~ " << side.handles.describe() << "   (m = " << side.handles.m << ")\n";
        out << "H_*(Phi, dPhi; Z):\n" << format_ranks(side.homology_morse);
        out << "euler characteristic (rel): " << side.homology_morse.euler_rel << "\n";
        if (side.homology_mesh) {
            out << "oracle (mesh at level " << *side.mesh_level << "):\n"
                << format_ranks(*side.homology_mesh);
            out << "oracle verdict: " << (side.oracle_compare->agree ? "agree" : "DISAGREE") << " — "
                << side.oracle_compare->note << "\n";
        }
        if (!side.caveats.empty()) {
            out << "caveats:";
            for (const auto& c : side.caveats) out << " " << c;
            out << "\n";
        }
    }
    if (!e.global_caveats.empty()) {
        out << "\nglobal caveats:";
        for (const auto& c : e.global_caveats) out << " " << c;
        out << "\n";
    }
    out << "\nexit code " << e.exit_code() << "\n";
    return out.str();
}

}  // namespace milnor
