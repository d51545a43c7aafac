#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mindet/operators.hpp"
#include "mindet/stieltjes.hpp"
#include "mindet/verify.hpp"

namespace mindet {

// one batch run: build a family on x_grid, verify it, write the requested
// artifacts. The JSON schema mirrors this struct field for field; unknown
// keys are rejected, not ignored.
struct ExperimentConfig {
    std::string name = "experiment";
    FamilyKind kind = FamilyKind::stieltjes;
    Grid x_grid = Grid::centered(4.0, 4096);
    int n_max = 8;
    StieltjesFamilySpec stieltjes;      // active when kind == stieltjes
    OperatorFamilySpec operator_family; // active when kind == operator_flow
    std::string output_dir;             // empty means out/<name>
    std::vector<std::string> emit = {"densities", "charfuns", "moments",
                                     "report"};
};

// strict parse: type errors, unknown fields and out-of-range values all
// throw ConfigInvalid naming the offending field
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);
void validate_config(const ExperimentConfig& cfg);

// the generate-* subcommands funnel their flags through these so that flag
// input obeys exactly the same domain checks as config-file input
ExperimentConfig stieltjes_config_from_flags(double half_width, double lambda,
                                             double phi,
                                             std::vector<double> epsilons,
                                             int n_max,
                                             const std::string& out_dir);
ExperimentConfig operator_config_from_flags(const std::string& op_kind,
                                            double c, int power, double gap,
                                            std::vector<double> betas,
                                            const std::string& out_dir);

struct RunResult {
    VerificationReport report;
    std::vector<std::string> written; // artifact paths, in emit order
    int exit_code = 0;                // 0 confirmed, 2 verification failed
};

RunResult run_experiment(const ExperimentConfig& cfg);

// CSV artifacts: first column is the axis, then one column per member
// labelled param=<value>; all floats shortest-round-trip
void write_density_csv(const std::string& path,
                       const std::vector<double>& params,
                       const std::vector<DensityFunction>& members);
void write_charfun_csv(const std::string& path,
                       const std::vector<double>& params,
                       const std::vector<CharFn>& charfuns);
void write_moments_csv(const std::string& path,
                       const std::vector<double>& params,
                       const std::vector<MomentVector>& table);
void write_report_json(const std::string& path, const std::string& name,
                       const VerificationReport& report, const Grid& r_grid);

struct StoredReport {
    std::string name;
    VerificationReport report;
    Grid r_grid;
};
StoredReport read_report_json(const std::string& path);

struct StoredDensities {
    std::vector<double> params;
    std::vector<DensityFunction> members;
};
StoredDensities read_density_csv(const std::string& path, const Grid& r_grid);

// re-run the verification gates on artifacts written earlier; prints the
// fresh report JSON to `out` and returns 0 (confirmed) or 2 (failed)
int verify_directory(const std::string& dir, std::ostream& out);

} // namespace mindet
