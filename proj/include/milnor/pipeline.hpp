#ifndef MILNOR_PIPELINE_HPP
#define MILNOR_PIPELINE_HPP

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "milnor/fibre.hpp"
#include "milnor/homology.hpp"
#include "milnor/mesh_oracle.hpp"
#include "milnor/morsify.hpp"
#include "milnor/polynomial.hpp"

namespace milnor {

struct GermHypothesisError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class SignChoice { positive, negative, both };

struct AnalysisConfig {
    std::string poly_text;
    std::vector<std::string> variables;
    double delta = 1.0;
    std::optional<double> epsilon;             // explicit epsilon override
    std::optional<std::vector<double>> t;      // explicit perturbation
    SignChoice sign = SignChoice::positive;
    std::uint64_t seed = 0;
    bool run_oracle = false;
    std::optional<double> resolution;
    std::string format = "text";  // "json" | "text"
    std::optional<std::string> export_mesh_path;
    int max_attempts = 32;
    double magnitude = 0.0;  // 0: auto
    SolverConfig solver;
    GreatCircleConfig great_circle;
    MeshConfig mesh;
    ExecMode exec = ExecMode::parallel;
};

// Sampled checks of the germ hypotheses: f(0) = 0, zero locus of positive
// dimension, isolated singular point of the zero locus.
struct GermCheck {
    bool link_nonempty = false;
    std::optional<Eigen::VectorXd> zero_locus_witness;
    bool isolated_singularity = true;
    std::optional<Eigen::VectorXd> singular_witness;
};

// One fibre sign processed end to end.
struct SideResult {
    std::string label;  // "positive" | "negative"
    MilnorData milnor;
    MorseValidationReport validation;
    std::vector<CriticalPoint> sphere_points;
    std::vector<CriticalPoint> fibre_points;
    GreatCircleVerdict great_circle;
    HandleDecomposition handles;
    HomologyReport homology_morse;
    std::optional<double> mesh_level;
    std::optional<HomologyReport> homology_mesh;
    std::optional<CompareVerdict> oracle_compare;
    std::vector<std::string> caveats;
    bool empty_fibre = false;
    int attempts_used = 0;
};

struct ReportEnvelope {
    AnalysisConfig config;
    GermCheck germ;
    std::vector<SideResult> results;
    std::vector<std::string> global_caveats;
    std::map<std::string, double> timings_ms;

    bool has_caveats() const;
    int exit_code() const { return has_caveats() ? 2 : 0; }
};

GermCheck germ_hypothesis_check(const Polynomial& f, double delta, const SolverConfig& cfg);

// Full pipeline: hypothesis checks, morsification, critical points, fibre
// filtering, homology, optional mesh oracle. Throws on hard errors
// (parse, germ hypothesis, morsification exhaustion, band-empty).
ReportEnvelope analyze(const AnalysisConfig& config);

nlohmann::json envelope_to_json(const ReportEnvelope& e);

// Canonical JSON: sorted keys, floats at 17 significant digits, non-finite
// numbers as null. Deterministic for identical configs apart from "timings".
std::string canonical_json(const nlohmann::json& j);

std::string report_json(const ReportEnvelope& e);
std::string report_text(const ReportEnvelope& e);

}  // namespace milnor

#endif
