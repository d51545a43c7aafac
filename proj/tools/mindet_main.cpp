#include <cstdio>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "mindet/acceptance.hpp"
#include "mindet/errors.hpp"
#include "mindet/io.hpp"

namespace {

int report_run(const mindet::RunResult& result) {
    const mindet::VerificationReport& rep = result.report;
    std::printf("verdict %s\n", mindet::to_string(rep.verdict));
    if (rep.verdict != mindet::Verdict::m_indeterminate_confirmed)
        std::printf("reason  %s: %s\n", mindet::to_string(rep.fail_reason),
                    rep.fail_detail.c_str());
    for (const std::string& path : result.written)
        std::printf("wrote   %s\n", path.c_str());
    return result.exit_code;
}

int run_selftest() {
    int failures = 0;
    for (const auto& r : mindet::run_acceptance()) {
        if (!r.pass) ++failures;
        std::printf("criterion %2d %-4s %-66s [%6.1fs] %s\n", r.number,
                    r.pass ? "PASS" : "FAIL", r.title.c_str(), r.seconds,
                    r.detail.c_str());
    }
    if (failures > 0) std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"builds families of distinct probability densities that "
                 "share a moment sequence, and verifies the construction"};
    app.require_subcommand(1);

    std::string config_path;
    CLI::App* cmd_run =
        app.add_subcommand("run", "run an experiment from a JSON config");
    cmd_run->add_option("config", config_path, "path to the config file")
        ->required();

    double half_width = 1.0, lambda = 2.5, phi = 0.0;
    std::vector<double> epsilons = {-1.0, -0.5, 0.0, 0.5, 1.0};
    int n_max = 8;
    std::string st_out = "out/stieltjes";
    CLI::App* cmd_st = app.add_subcommand(
        "generate-stieltjes", "build and verify a cosine-perturbed family");
    cmd_st->add_option("--half-width", half_width, "generator half width");
    cmd_st->add_option("--lambda", lambda, "perturbation frequency");
    cmd_st->add_option("--phi", phi, "perturbation phase");
    cmd_st->add_option("--epsilons", epsilons, "member amplitudes")
        ->delimiter(',');
    cmd_st->add_option("--n-max", n_max, "highest moment order checked");
    cmd_st->add_option("--out", st_out, "output directory");

    std::string op_kind = "translation";
    double c = 0.0, gap = 3.0;
    int power = 1;
    std::vector<double> betas;
    std::string op_out = "out/operator";
    CLI::App* cmd_op = app.add_subcommand(
        "generate-operator",
        "build and verify a phase family over a disjoint pair");
    cmd_op->add_option("--operator", op_kind, "flow generator")
        ->check(CLI::IsMember({"translation", "gauged"}));
    cmd_op->add_option("--c", c, "gauge strength");
    cmd_op->add_option("--n", power, "gauge exponent");
    cmd_op->add_option("--gap", gap, "distance between the bump centers");
    cmd_op->add_option("--betas", betas, "relative phases")->delimiter(',');
    cmd_op->add_option("--out", op_out, "output directory");

    std::string in_dir;
    CLI::App* cmd_verify = app.add_subcommand(
        "verify", "re-run the verification gates on stored artifacts");
    cmd_verify->add_option("--in", in_dir, "artifact directory")->required();

    CLI::App* cmd_self =
        app.add_subcommand("selftest", "run the built-in acceptance checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (cmd_run->parsed())
            return report_run(
                mindet::run_experiment(mindet::load_config_file(config_path)));
        if (cmd_st->parsed())
            return report_run(
                mindet::run_experiment(mindet::stieltjes_config_from_flags(
                    half_width, lambda, phi, epsilons, n_max, st_out)));
        if (cmd_op->parsed())
            return report_run(
                mindet::run_experiment(mindet::operator_config_from_flags(
                    op_kind, c, power, gap, betas, op_out)));
        if (cmd_verify->parsed())
            return mindet::verify_directory(in_dir, std::cout);
        if (cmd_self->parsed()) return run_selftest();
    } catch (const mindet::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
