#pragma once

// Command-line front end: verify | complete | example | search.
// Exit codes: 0 success, 2 input error, 3 constructor validation failure.

#include <iostream>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "corners/corners.hpp"

namespace corners::cli {

enum ExitCode : int { kOk = 0, kInputError = 2, kValidationFailure = 3 };

struct Options {
    std::string format = "json";
    // verify
    std::string input;
    double tol = 1e-10;
    // complete
    std::string mode;
    std::string b_path;
    std::string c_path;
    std::string params_path;
    bool unchecked = false;
    std::string out_path;
    bool witness = false;
    // example / search
    int n = 0;
    std::string kind;
    int restarts = 20;
    std::uint64_t seed = 0;
    int iters = 400;
    bool no_known_seed = false;
    int threads = 1;
    bool verbose = false;
};

namespace detail {

inline void emit(const ReportDocument& report, const Options& opt, std::ostream& out) {
    if (opt.format == "text") {
        out << report.to_text();
    } else {
        out << serialize(report.to_json());
    }
}

inline ComplexMatrix param_or_zero(const Json& doc, std::initializer_list<const char*> keys, Index n,
                                   const std::string& path) {
    for (const char* key : keys) {
        if (doc.contains(key)) return matrix_from_json(doc.at(key), path + "." + key);
    }
    return ComplexMatrix::Zero(n, n);
}

inline HermitianCornerParams load_params(const std::string& path, Index n) {
    if (path.empty()) return HermitianCornerParams::zero(n);
    const Json doc = parse_json(read_file(path), path);
    if (!doc.is_object()) throw InputError(path + ": expected a JSON object of parameter matrices");
    return {param_or_zero(doc, {"K0"}, n, path), param_or_zero(doc, {"K2"}, n, path),
            param_or_zero(doc, {"Hfirst", "H0", "H1"}, n, path), param_or_zero(doc, {"H2"}, n, path)};
}

inline int run_verify(const Options& opt, std::ostream& out) {
    const ComplexMatrix m = load_matrix(opt.input);
    if (m.rows() != m.cols() || m.rows() % 2 != 0) {
        throw InputError(opt.input + ": expected a square matrix of even dimension, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
    const CornerVerdict v = check_normal_corner_conditions(m, opt.tol);
    const CornerReport& r = v.report;
    ReportDocument rep;
    rep.command = "verify";
    rep.inputs["input"] = matrix_digest(m);
    rep.metrics = {{"block_size", static_cast<double>(r.block_size)},
                   {"normality_residual", r.normality_residual},
                   {"frobenius_b", r.frobenius_b},
                   {"frobenius_c", r.frobenius_c},
                   {"frobenius_gap", r.frobenius_gap},
                   {"frobenius_slack", v.slack},
                   {"norm_b", r.norm_b},
                   {"norm_c", r.norm_c},
                   {"ratio", r.ratio},
                   {"ratio_bound", r.ratio_bound},
                   {"singular_value_gap", r.singular_value_gap}};
    rep.verdicts = {{"normal", v.normal},
                    {"frobenius_equality", v.frobenius_equality},
                    {"ratio_bound", v.ratio_bound},
                    {"necessary_conditions_hold", v.necessary_conditions_hold}};
    rep.tolerances = {{"tol", opt.tol}};
    emit(rep, opt, out);
    return kOk;
}

inline int run_complete(const Options& opt, std::ostream& out) {
    const ComplexMatrix b = load_matrix(opt.b_path);
    if (b.rows() != b.cols()) throw InputError(opt.b_path + ": B must be square");
    Tolerances tol;
    tol.decomposition_tol = tol.residual_tol = tol.commutation_tol = opt.tol;

    ReportDocument rep;
    rep.command = "complete";
    rep.inputs["b"] = matrix_digest(b);
    CompletionResult result;
    if (opt.mode == "symmetric") {
        result = symmetric_completion(b);
    } else if (opt.mode == "unitary") {
        result = symmetric_unitary_completion(b, tol);
    } else if (opt.mode == "least-norm") {
        result = least_norm_symmetric_completion(b, tol);
    } else if (opt.mode == "equal-sv") {
        if (opt.c_path.empty()) throw InputError("--c: required for mode equal-sv");
        const ComplexMatrix c = load_matrix(opt.c_path);
        rep.inputs["c"] = matrix_digest(c);
        result = equal_singular_value_completion(b, c, tol);
    } else {
        const HermitianCornerParams params = load_params(opt.params_path, b.rows());
        if (!opt.params_path.empty()) {
            rep.inputs["params"] = "fnv1a64:" + fnv1a_digest(read_file(opt.params_path));
        }
        if (opt.mode == "hermitian") {
            result = hermitian_corner_completion(b, params, tol);
        } else {
            result = hermitian_corner_unitary_completion(
                b, params, tol, opt.unchecked ? ConstraintMode::unchecked : ConstraintMode::checked);
        }
    }
    const ComplexMatrix n = result.matrix();
    const Certificate& cert = result.certificate;
    rep.metrics = {{"normality_residual", cert.normality_residual},
                   {"corner_b_residual", cert.corner_b_residual},
                   {"corner_c_residual", cert.corner_c_residual},
                   {"norm_b", operator_norm(b)},
                   {"witness_norm", operator_norm(n)}};
    rep.verdicts = {{"normal", cert.normality_residual <= opt.tol}};
    if (cert.unitarity_residual) {
        rep.metrics["unitarity_residual"] = *cert.unitarity_residual;
        rep.metrics["scale"] = cert.scale;
        rep.verdicts["scaled_unitary"] = *cert.unitarity_residual <= opt.tol;
    }
    rep.tolerances = {{"tol", opt.tol}};
    if (opt.witness) rep.witness["N"] = n;
    if (!opt.out_path.empty()) write_file(opt.out_path, serialize(matrix_to_json(n)));
    emit(rep, opt, out);
    return kOk;
}

inline int run_example(const Options& opt, std::ostream& out) {
    if (opt.n != 2 && opt.n != 3) {
        throw InputError("--n: examples exist only for n = 2 and n = 3; for n >= 4 no normal "
                         "matrix has ||B|| = sqrt(n) ||C||");
    }
    const ComplexMatrix m = (opt.n == 2 ? example_n2() : example_n3()).full();
    if (!opt.out_path.empty()) write_file(opt.out_path, serialize(matrix_to_json(m)));
    if (opt.format == "text") {
        std::ostringstream os;
        os.precision(17);
        for (Index i = 0; i < m.rows(); ++i) {
            for (Index j = 0; j < m.cols(); ++j) os << (j ? " " : "") << m(i, j).real();
            os << "\n";
        }
        out << os.str();
    } else {
        out << serialize(matrix_to_json(m));
    }
    return kOk;
}

inline SearchConfig search_config(const Options& opt) {
    SearchConfig config;
    config.restarts = opt.restarts;
    config.seed = opt.seed;
    config.max_iterations = opt.iters;
    config.convergence_tol = opt.tol;
    config.include_known_seed = !opt.no_known_seed;
    config.threads = opt.threads;
    config.validate();
    return config;
}

inline int run_search(const Options& opt, std::ostream& out, std::ostream& err) {
    const SearchConfig config = search_config(opt);
    ReportDocument rep;
    rep.command = "search";
    rep.tolerances = {{"convergence_tol", config.convergence_tol}};
    rep.inputs["kind"] = opt.kind;
    rep.inputs["config"] = "restarts=" + std::to_string(config.restarts) +
                           " seed=" + std::to_string(config.seed) +
                           " iters=" + std::to_string(config.max_iterations) +
                           " known_seed=" + (config.include_known_seed ? "on" : "off");
    if (opt.kind == "alpha") {
        if (opt.n < 1) throw InputError("--n: required and must be at least 1 for kind alpha");
        if (opt.verbose) err << "alpha search: n=" << opt.n << ", " << config.restarts << " restarts\n";
        const SearchResult r = alpha_lower_bound_search(opt.n, config);
        int feasible = 0;
        for (const RestartRecord& h : r.per_restart_history) feasible += h.feasible ? 1 : 0;
        if (opt.verbose) {
            for (const RestartRecord& h : r.per_restart_history) {
                err << "  restart " << h.restart << ": ratio " << h.objective << ", residual "
                    << h.normality_residual << "\n";
            }
        }
        rep.metrics = {{"n", static_cast<double>(opt.n)},
                       {"best_ratio", r.best_ratio},
                       {"sqrt_n", std::sqrt(static_cast<double>(opt.n))},
                       {"witness_normality_residual", r.witness_normality_residual},
                       {"best_restart", static_cast<double>(r.best_restart)},
                       {"feasible_restarts", static_cast<double>(feasible)},
                       {"restarts", static_cast<double>(config.restarts)}};
        rep.verdicts = {{"found", r.found}};
        if (r.found) {
            const ComplexMatrix w = r.witness.full();
            if (opt.witness) rep.witness["N"] = w;
            if (!opt.out_path.empty()) write_file(opt.out_path, serialize(matrix_to_json(w)));
        }
    } else {
        if (opt.b_path.empty() || opt.c_path.empty()) {
            throw InputError("--b/--c: both corner files are required for kind feasibility");
        }
        const ComplexMatrix b = load_matrix(opt.b_path);
        const ComplexMatrix c = load_matrix(opt.c_path);
        if (b.rows() != b.cols() || c.rows() != b.rows() || c.cols() != b.cols()) {
            throw InputError("--b/--c: corners must be square matrices of equal size");
        }
        rep.inputs["b"] = matrix_digest(b);
        rep.inputs["c"] = matrix_digest(c);
        if (opt.verbose) err << "feasibility search: " << config.restarts << " restarts\n";
        const FeasibilityReport r = feasibility_search(b, c, config);
        rep.metrics = {{"min_residual", r.min_residual},
                       {"restarts_below_tol", static_cast<double>(r.restarts_below_tol)},
                       {"gradient_check_error", r.gradient_check_error},
                       {"best_restart", static_cast<double>(r.best_restart)},
                       {"restarts", static_cast<double>(config.restarts)}};
        rep.verdicts = {{"below_tol", r.min_residual <= config.convergence_tol}};
        const ComplexMatrix n = assemble(r.witness_a, b, c, r.witness_d).full();
        if (opt.witness) {
            rep.witness["A"] = r.witness_a;
            rep.witness["D"] = r.witness_d;
        }
        if (!opt.out_path.empty()) write_file(opt.out_path, serialize(matrix_to_json(n)));
    }
    emit(rep, opt, out);
    return kOk;
}

inline void add_format(CLI::App* sub, Options& opt) {
    sub->add_option("--format", opt.format, "Output format")
        ->check(CLI::IsMember({"json", "text"}))
        ->capture_default_str();
}

}  // namespace detail

/// Parses `args` (without the program name) and runs one subcommand.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options opt;
    CLI::App app{"Normal-matrix corner toolkit: verify corner conditions, build completions, "
                 "print extremal examples and run seeded searches.",
                 "corners"};
    app.require_subcommand(1);

    CLI::App* verify = app.add_subcommand("verify", "Check a 2n x 2n matrix against the necessary corner conditions");
    verify->add_option("--input", opt.input, "MatrixDocument JSON file")->required();
    verify->add_option("--tol", opt.tol, "Scaled normality tolerance")->capture_default_str();
    detail::add_format(verify, opt);
    verify->footer(
        "Metrics: block_size, normality_residual, frobenius_b, frobenius_c, frobenius_gap,\n"
        "frobenius_slack, norm_b, norm_c, ratio (||B||/||C||, null when only C vanishes),\n"
        "ratio_bound (sqrt n), singular_value_gap.\n"
        "Verdicts: normal, frobenius_equality, ratio_bound, necessary_conditions_hold.");

    CLI::App* complete = app.add_subcommand("complete", "Construct a completion of [[?, B], [C, ?]]");
    complete->add_option("--mode", opt.mode, "Construction")
        ->required()
        ->check(CLI::IsMember({"symmetric", "unitary", "least-norm", "equal-sv", "hermitian",
                               "hermitian-unitary"}));
    complete->add_option("--b", opt.b_path, "MatrixDocument for B")->required();
    complete->add_option("--c", opt.c_path, "MatrixDocument for C (equal-sv)");
    complete->add_option("--params", opt.params_path,
                         "JSON object with K0, K2, Hfirst (or H0), H2 MatrixDocuments; missing ones are zero");
    complete->add_flag("--unchecked", opt.unchecked,
                       "hermitian-unitary: skip the (K0-K2)P = 0 and (H0+H2)P = 0 constraints");
    complete->add_option("--tol", opt.tol, "Validation tolerance")->capture_default_str();
    complete->add_option("--out", opt.out_path, "Write the completed matrix to this file");
    complete->add_flag("--witness", opt.witness, "Embed the completed matrix in the report");
    detail::add_format(complete, opt);
    complete->footer(
        "Metrics: normality_residual, corner_b_residual, corner_c_residual, norm_b,\n"
        "witness_norm (operator norm of N); for scaled-unitary constructions also\n"
        "unitarity_residual (||N*N - scale^2 I||_F / max(1, scale^2)) and scale.\n"
        "Verdicts: normal, scaled_unitary.");

    CLI::App* example = app.add_subcommand("example", "Print the extremal normal matrix for n = 2 or 3");
    example->add_option("--n", opt.n, "Block size")->required();
    example->add_option("--out", opt.out_path, "Also write the MatrixDocument to this file");
    detail::add_format(example, opt);

    CLI::App* search = app.add_subcommand("search", "Seeded multistart search");
    search->add_option("--kind", opt.kind, "alpha: lower bound for sup ||B||/||C||; "
                                           "feasibility: normal completion of given corners")
        ->required()
        ->check(CLI::IsMember({"alpha", "feasibility"}));
    search->add_option("--n", opt.n, "Block size (alpha)");
    search->add_option("--b", opt.b_path, "MatrixDocument for B (feasibility)");
    search->add_option("--c", opt.c_path, "MatrixDocument for C (feasibility)");
    search->add_option("--restarts", opt.restarts, "Number of restarts")->capture_default_str();
    search->add_option("--seed", opt.seed, "Base seed")->capture_default_str();
    search->add_option("--iters", opt.iters, "Iterations per epoch")->capture_default_str();
    search->add_option("--tol", opt.tol, "Normality residual accepted as feasible")->capture_default_str();
    search->add_flag("--no-known-seed", opt.no_known_seed, "Do not seed n = 2, 3 with the known examples");
    search->add_option("--threads", opt.threads, "Worker threads (results do not depend on it)")
        ->capture_default_str();
    search->add_flag("--witness", opt.witness, "Embed the witness in the report");
    search->add_option("--out", opt.out_path, "Write the witness matrix to this file");
    search->add_flag("--verbose", opt.verbose, "Progress on standard error");
    detail::add_format(search, opt);
    search->footer(
        "alpha metrics: n, best_ratio, sqrt_n, witness_normality_residual, best_restart,\n"
        "feasible_restarts, restarts; verdict: found.\n"
        "feasibility metrics: min_residual, restarts_below_tol, gradient_check_error,\n"
        "best_restart, restarts; verdict: below_tol.");

    std::vector<std::string> argv_storage{"corners"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const std::string& a : argv_storage) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kInputError;
    }

    try {
        if (verify->parsed()) return detail::run_verify(opt, out);
        if (complete->parsed()) return detail::run_complete(opt, out);
        if (example->parsed()) return detail::run_example(opt, out);
        return detail::run_search(opt, out, err);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kValidationFailure;
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const NonFiniteError& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    }
}

}  // namespace corners::cli
