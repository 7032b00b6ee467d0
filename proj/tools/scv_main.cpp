// Command-line front end: integrand evaluation, check suites, and the
// scripted reproduction registry. JSON is the canonical output; table and
// csv are rendered views of the same data.
//
// Exit codes: 0 pass, 1 check failed, 2 usage or parse error, 3 domain or
// quadrature error.

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "scv/errors.hpp"
#include "scv/integrands.hpp"
#include "scv/matrix.hpp"
#include "scv/radial.hpp"
#include "scv/report.hpp"
#include "scv/reproduce.hpp"
#include "scv/semiconvexity.hpp"

namespace {

struct CliOptions {
    scv::RunConfig cfg;
    bool seed_given = false;
    std::string output = "json";
    std::string at;
    double p = 0.0;
    int n = 0;
};

scv::SquareMatrix parse_matrix_arg(const std::string& text, int n) {
    if (text.empty() || text == "Id" || text == "id") return scv::SquareMatrix::identity(n);
    if (text == "Id-bar" || text == "id-bar") return scv::SquareMatrix::reflected_identity(n);

    std::vector<double> entries;
    std::string token;
    std::istringstream in(text);
    while (std::getline(in, token, ',')) {
        std::istringstream part(token);
        double v = 0.0;
        while (part >> v) entries.push_back(v);
        if (!part.eof()) throw scv::ParseError("bad matrix entry: " + token);
    }
    const int dim = static_cast<int>(std::lround(std::sqrt(static_cast<double>(entries.size()))));
    if (dim * dim != static_cast<int>(entries.size()))
        throw scv::ParseError("matrix needs a square number of entries, got " +
                              std::to_string(entries.size()));
    if (n != 0 && dim != n)
        throw scv::ParseError("matrix has dimension " + std::to_string(dim) +
                              " but n=" + std::to_string(n) + " was requested");
    return scv::SquareMatrix(dim, std::move(entries));
}

void apply_env_seed(CliOptions& opt) {
    if (opt.seed_given) return;
    if (const char* env = std::getenv("SEMICONVEXITY_SEED")) {
        try {
            opt.cfg.seed = std::stoull(env);
        } catch (const std::exception&) {
            throw scv::ParseError("SEMICONVEXITY_SEED is not an unsigned integer");
        }
    }
}

void print_report(const scv::CheckReport& report, const CliOptions& opt) {
    if (opt.output == "json") {
        std::cout << report.to_json(opt.cfg.timings).dump(2) << "\n";
    } else if (opt.output == "csv") {
        std::cout << report.to_csv();
    } else {
        std::cout << report.name << ": " << (report.passed ? "pass" : "FAIL")
                  << "  worst_residual=" << report.worst_residual
                  << "  samples=" << report.samples << "  seed=" << report.seed << "\n";
        if (!report.passed && !report.witness.is_null())
            std::cout << "witness: " << report.witness.dump(2) << "\n";
    }
}

int run_eval(const std::string& descriptor, const CliOptions& opt, bool decompose) {
    const scv::Integrand F = scv::parse_integrand(descriptor);
    const scv::SquareMatrix A = parse_matrix_arg(opt.at, opt.n == 0 ? F.dim() : opt.n);
    const double value = F(A);

    if (opt.output == "table") {
        std::cout << value << "\n";
        if (decompose) {
            const scv::ConformalCoordinates cc = scv::conformal_coordinates(A);
            const scv::SignedSpectrum sp = scv::signed_singular_values(A);
            std::cout << "plus_norm=" << cc.plus_norm << " minus_norm=" << cc.minus_norm
                      << " det=" << cc.d << "\nlambda=";
            for (double v : sp.lambda) std::cout << " " << v;
            std::cout << "\n";
        }
        return 0;
    }
    nlohmann::json out{{"integrand", F.name()}, {"matrix", scv::matrix_to_json(A)},
                       {"value", value}};
    if (decompose) {
        const scv::ConformalCoordinates cc = scv::conformal_coordinates(A);
        const scv::SignedSpectrum sp = scv::signed_singular_values(A);
        out["conformal"] = {{"plus_norm", cc.plus_norm},
                            {"minus_norm", cc.minus_norm},
                            {"t", cc.t},
                            {"d", cc.d}};
        out["signed_singular_values"] = sp.lambda;
        out["partial_products"] = sp.sigma;
    }
    if (opt.output == "csv") {
        std::cout << "integrand,value\n" << F.name() << "," << value << "\n";
    } else {
        std::cout << out.dump(2) << "\n";
    }
    return 0;
}

int run_check(const std::string& suite, const std::string& descriptor, const CliOptions& opt) {
    const scv::Integrand F = scv::parse_integrand(descriptor);
    const scv::RunConfig& cfg = opt.cfg;
    scv::CheckReport report;

    if (suite == "roc") {
        report = scv::rank_one_convexity_scan(F, 5.0, cfg.samples, cfg.seed, cfg.tol,
                                              cfg.threads);
    } else if (suite == "be") {
        report = scv::baker_ericksen_sweep(F, cfg.samples, cfg.seed, cfg.tol, cfg.threads);
    } else if (suite == "mono") {
        report = scv::monotonicity_sweep(F, cfg.samples, cfg.seed, cfg.tol, cfg.threads);
    } else if (suite == "pc-point") {
        const scv::SquareMatrix A = parse_matrix_arg(opt.at, opt.n == 0 ? F.dim() : opt.n);
        scv::ViolationSearchConfig vcfg;
        vcfg.seed = cfg.seed;
        vcfg.tol = cfg.tol;
        const auto dec = scv::polyconvexity_violation_search(F, A, vcfg);
        report.name = "pc_point(" + F.name() + ")";
        report.seed = cfg.seed;
        report.samples = 1;
        report.passed = !dec.has_value();
        if (dec) {
            report.worst_residual = scv::jensen_gap(F, *dec);
            nlohmann::json points = nlohmann::json::array();
            for (const auto& P : dec->points) points.push_back(scv::matrix_to_json(P));
            report.witness = {{"weights", dec->weights},
                              {"points", std::move(points)},
                              {"center", scv::matrix_to_json(dec->center)},
                              {"relation_residual", scv::minors_relation_residual(*dec)},
                              {"jensen_gap", report.worst_residual}};
        }
    } else if (suite == "radial-qc") {
        scv::RadialSearchConfig rcfg;
        rcfg.seed = cfg.seed;
        rcfg.tol = cfg.tol;
        rcfg.threads = cfg.threads;
        rcfg.quad.abs_tol = cfg.quad_tol;
        rcfg.at_reflected = (opt.at == "Id-bar" || opt.at == "id-bar");
        report = scv::radial_quasiconvexity_search(F, rcfg);
    } else if (suite == "symmetry") {
        report = scv::symmetry_probe(F, cfg.samples, cfg.seed, cfg.tol, cfg.threads);
    } else {
        throw CLI::ValidationError("suite", "unknown suite: " + suite);
    }

    print_report(report, opt);
    return report.passed ? 0 : 1;
}

int run_reproduce(const std::string& id, const CliOptions& opt) {
    std::vector<std::string> ids;
    if (id == "all") {
        ids = scv::reproduction_ids();
    } else {
        ids.push_back(id);
    }

    nlohmann::json bundles = nlohmann::json::array();
    bool all_passed = true;
    for (const auto& one : ids) {
        nlohmann::json bundle = scv::run_reproduction(one, opt.cfg, opt.p);
        all_passed = all_passed && scv::bundle_passed(bundle);
        bundles.push_back(std::move(bundle));
    }

    if (opt.output == "table") {
        for (const auto& bundle : bundles) std::cout << scv::render_bundle_table(bundle);
    } else if (opt.output == "csv") {
        for (const auto& bundle : bundles) std::cout << scv::render_bundle_csv(bundle);
    } else if (bundles.size() == 1) {
        std::cout << bundles.front().dump(2) << "\n";
    } else {
        std::cout << nlohmann::json{{"bundles", std::move(bundles)},
                                    {"passed", all_passed}}
                         .dump(2)
                  << "\n";
    }
    return all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical verification toolkit for semiconvexity of "
                 "isotropic matrix integrands"};
    app.require_subcommand(1);

    CliOptions opt;
    auto add_common = [&opt](CLI::App* cmd) {
        cmd->add_option("--seed", opt.cfg.seed, "Deterministic sampling seed");
        cmd->add_option("--samples", opt.cfg.samples, "Sample count for sweeps");
        cmd->add_option("--tol", opt.cfg.tol, "Pass/fail tolerance");
        cmd->add_option("--quad-tol", opt.cfg.quad_tol, "Quadrature absolute tolerance");
        cmd->add_option("--threads", opt.cfg.threads, "Worker thread count");
        cmd->add_option("--output", opt.output, "Output format: json, csv, or table")
            ->check(CLI::IsMember({"json", "csv", "table"}));
        cmd->add_flag("--timings", opt.cfg.timings, "Include wall-clock timing in JSON");
        cmd->add_option("--at", opt.at, "Matrix: Id, Id-bar, or n*n comma-separated entries");
        cmd->add_option("--p", opt.p, "Exponent override where a scenario accepts one");
        cmd->add_option("--n", opt.n, "Matrix dimension for --at when ambiguous");
    };

    std::string descriptor;
    std::string suite;
    std::string repro_id;
    bool decompose = false;

    CLI::App* eval = app.add_subcommand("eval", "Evaluate an integrand at a matrix");
    eval->add_option("integrand", descriptor, "Integrand descriptor")->required();
    eval->add_flag("--decompose", decompose,
                   "Also print conformal coordinates and the signed spectrum");
    add_common(eval);

    CLI::App* check = app.add_subcommand("check", "Run a check suite against an integrand");
    check->add_option("suite", suite, "One of roc, be, mono, pc-point, radial-qc, symmetry")
        ->required()
        ->check(CLI::IsMember({"roc", "be", "mono", "pc-point", "radial-qc", "symmetry"}));
    check->add_option("integrand", descriptor, "Integrand descriptor")->required();
    add_common(check);

    CLI::App* repro = app.add_subcommand("reproduce", "Run a scripted reproduction scenario");
    repro->add_option("id", repro_id, "Registry id or 'all'")->required();
    add_common(repro);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        for (auto* cmd : {eval, check, repro})
            if (cmd->parsed() && cmd->count("--seed") > 0) opt.seed_given = true;
        apply_env_seed(opt);
        if (opt.cfg.samples <= 0 || opt.cfg.threads <= 0 || !(opt.cfg.tol > 0.0) ||
            !(opt.cfg.quad_tol > 0.0))
            throw scv::ParseError("samples, threads, tol, and quad-tol must be positive");

        if (eval->parsed()) return run_eval(descriptor, opt, decompose);
        if (check->parsed()) return run_check(suite, descriptor, opt);
        return run_reproduce(repro_id, opt);
    } catch (const scv::EvalDomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 3;
    } catch (const scv::QuadratureError& e) {
        std::cerr << "quadrature error: " << e.what() << "\n";
        return 3;
    } catch (const scv::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const scv::PreconditionError& e) {
        std::cerr << "precondition error: " << e.what() << "\n";
        return 2;
    } catch (const CLI::Error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    }
}
