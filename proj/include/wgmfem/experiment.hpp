#pragma once

#include "wgmfem/analysis.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>

namespace wgmfem {

struct ExperimentConfig {
    std::string example = "example1"; ///< example1, example2, patch or custom
    int k = 1;
    std::array<double, 2> kappa{1.0, 10.0};
    /// Mesh levels L; the grid spacing is h = 1/L.
    std::vector<int> levels{8, 16, 32, 64};
    bool correction = true;
    int quad_bump = 0;
    std::string output;                 ///< CSV path, empty for none
    std::optional<std::uint64_t> seed;  ///< random interior vertex perturbation
    bool deep = false;                  ///< allow k = 3 beyond level 32
    TaylorMode taylor = TaylorMode::Fast;
    /// custom example only
    std::optional<Box> domain;
    std::optional<InterfaceCurve> curve;
    std::string mesh_type = "auto";     ///< auto, tri or quad

    void validate() const;
    bool operator==(const ExperimentConfig& o) const;
};

nlohmann::json to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json curve_to_json(const InterfaceCurve& c);
InterfaceCurve curve_from_json(const nlohmann::json& j);

ManufacturedCase make_case(const ExperimentConfig& c);
/// Fitted mesh of the case domain at level L (cells per unit length).
PolyMesh make_mesh(const ExperimentConfig& c, const ManufacturedCase& mc, int level);

struct LevelResult {
    int level = 0;
    double h = 0.0;
    int cells = 0;
    int dofs = 0;
    double e_u = 0.0;
    double e_p = 0.0;
    double p_integral = 0.0;
    SolveReport report;
    double seconds = 0.0;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<LevelResult> levels;
    ConvergenceRecord record;
    std::vector<std::string> notes;
};

struct RunHooks {
    std::ostream* log = nullptr;
    std::string dump_system; ///< Matrix Market path prefix, empty for none
    std::string dump_mesh;   ///< mesh file path prefix, empty for none
};

/// Levels actually run: k = 3 levels above 32 are dropped unless deep is set.
std::vector<int> effective_levels(const ExperimentConfig& c, std::vector<std::string>* notes = nullptr);

/// Error with the level that failed.
class ExperimentError : public Error {
public:
    ExperimentError(int level, const std::string& what);
    int level() const { return level_; }

private:
    int level_;
};

ExperimentResult run_experiment(const ExperimentConfig& config, const RunHooks& hooks = {});

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct SelfcheckOptions {
    /// Replace the projection by the identity in the fast Taylor path (foot := x_h).
    bool disable_pullback = false;
};

std::vector<CheckResult> selfcheck(const SelfcheckOptions& options = {});

} // namespace wgmfem
