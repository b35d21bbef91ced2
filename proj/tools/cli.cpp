#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>

#include "CLI11.hpp"

#include "rsqd/bijections.hpp"
#include "rsqd/io.hpp"
#include "rsqd/oracle.hpp"
#include "rsqd/resummation.hpp"
#include "rsqd/series.hpp"
#include "rsqd/tree.hpp"

namespace rsqd::cli {

namespace {

std::size_t enumeration_cap() {
    const char* env = std::getenv("RS_TREES_MAX_ORDER");
    if (!env || !*env) return kDefaultEnumerationCap;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 0) throw ValidationError(std::string("RS_TREES_MAX_ORDER must be a non-negative integer, got \"") + env + "\"");
    return static_cast<std::size_t>(v);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

void heff_header(std::ostream& out, int n) {
    for (int k = 1; k <= n; ++k) out << ",heff_re_" << k << ",heff_im_" << k;
}

void heff_values(std::ostream& out, const ComplexVector& ev) {
    for (Eigen::Index k = 0; k < ev.size(); ++k) out << ',' << format_number(ev(k).real()) << ',' << format_number(ev(k).imag());
}

// One CSV row per cumulative truncation order.
void emit_orders(std::ostream& out, const char* first, const WaveOperatorTruncation& trunc, const ProblemInstance& inst,
                 std::size_t from, bool with_heff) {
    out << first << ",chi_norm,lindgren_residual";
    if (with_heff) heff_header(out, inst.model_size());
    out << '\n';
    Matrix chi = Matrix::Zero(inst.dim(), inst.dim());
    for (std::size_t n = 0; n < trunc.per_order.size(); ++n) {
        chi += trunc.per_order[n].matrix;
        if (n < from) continue;
        out << n << ',' << format_number(chi.norm()) << ',' << format_number(lindgren_residual(chi, inst));
        if (with_heff) heff_values(out, effective_hamiltonian(chi, inst).eigenvalues);
        out << '\n';
    }
}

struct Options {
    std::size_t order = 0;
    bool right_normalized = false;
    std::string instance;
    std::optional<double> lambda;
    std::vector<double> lambdas;
    std::string emit = "per-order";
    std::string scheme;
    std::string variant = "barred";
    std::optional<std::size_t> cutoff;
    std::size_t max_iter = 50;
    double tol = 1e-10;
    int parent = 1;
    std::string summary;
};

ProblemInstance load(const Options& o) {
    ProblemInstance inst = load_instance(o.instance);
    return o.lambda ? inst.with_lambda(*o.lambda) : inst;
}

void check_order(std::size_t order) {
    const std::size_t cap = enumeration_cap();
    if (order > cap)
        throw ValidationError("order " + std::to_string(order) + " exceeds the enumeration cap " + std::to_string(cap) +
                              " (raise RS_TREES_MAX_ORDER)");
}

int cmd_trees(const Options& o, std::ostream& out, std::ostream& err) {
    const auto trees = enumerate(o.order, o.right_normalized ? TreeFilter::RightNormalized : TreeFilter::All,
                                 enumeration_cap());
    for (const Tree& t : trees) out << encode(t) << '\n';
    err << trees.size() << '\n';
    return kExitOk;
}

int cmd_bijections(const Options& o, std::ostream& out) {
    out << "tree,bloch,dyck,bracketing,partition\n";
    for (const Tree& t : enumerate(o.order, TreeFilter::All, enumeration_cap())) {
        if (t.is_leaf()) continue;
        const auto b = tree_to_bloch(t);
        out << encode(t) << ',' << csv_field(bloch_to_string(b)) << ',' << dyck_to_string(bloch_to_dyck(b)) << ','
            << tree_to_bracketing(t).str() << ',' << partition_to_string(tree_to_partition(t)) << '\n';
    }
    return kExitOk;
}

int cmd_series(const Options& o, std::ostream& out) {
    check_order(o.order);
    const ProblemInstance inst = load(o);
    const auto trunc = wave_operator(inst, o.order, enumeration_cap());
    if (o.emit == "per-order") {
        emit_orders(out, "order", trunc, inst, 0, true);
    } else if (o.emit == "chi-norm") {
        emit_orders(out, "order", trunc, inst, o.order, false);
    } else {
        out << "order";
        heff_header(out, inst.model_size());
        out << '\n' << o.order;
        heff_values(out, effective_hamiltonian(trunc, inst).eigenvalues);
        out << '\n';
    }
    return kExitOk;
}

void emit_iterates(std::ostream& out, std::ostream& err, const IterativeSolution& sol, const ProblemInstance& inst) {
    out << "step,chi_norm,lindgren_residual";
    heff_header(out, inst.model_size());
    out << '\n';
    for (std::size_t k = 0; k < sol.iterations(); ++k) {
        const Matrix& chi = sol.iterates[k].matrix;
        out << k + 1 << ',' << format_number(chi.norm()) << ',' << format_number(sol.residuals[k]);
        heff_values(out, effective_hamiltonian(chi, inst).eigenvalues);
        out << '\n';
    }
    if (sol.converged)
        err << to_string(sol.scheme) << ": converged after " << sol.iterations() << " iterations\n";
    else
        err << to_string(sol.scheme) << ": not converged after " << sol.iterations() << " iterations\n";
}

int cmd_resum(const Options& o, std::ostream& out, std::ostream& err) {
    const ProblemInstance inst = load(o);
    const IterationOptions it{o.max_iter, o.tol};
    const std::size_t cap = enumeration_cap();
    const std::string& s = o.scheme;
    if (s == "leftcomb" || s == "accelerated" || s == "alternative" || s == "shift") check_order(o.order);

    if (s == "leftcomb") {
        emit_orders(out, "order", left_comb_wave_operator(inst, o.order, cap), inst, 0, true);
    } else if (s == "accelerated") {
        emit_orders(out, "order", accelerated_wave_operator(inst, o.order, cap), inst, 0, true);
    } else if (s == "alternative") {
        emit_orders(out, "order", alternative_wave_operator(inst, o.order, cap), inst, 0, true);
    } else if (s == "shift") {
        const auto sh = shifted_degenerate_expansion(inst, o.parent - 1, o.order, cap);
        emit_orders(out, "order", sh.truncation, sh.shifted, 0, true);
        err << "shift: min denominator " << format_number(sh.min_denominator) << '\n';
    } else if (s == "lk") {
        const auto variant = o.variant == "bare" ? LkVariant::Bare : LkVariant::Barred;
        emit_iterates(out, err, lk_fixed_point(inst, variant, o.cutoff, it), inst);
    } else if (s == "slcf") {
        emit_iterates(out, err, suzuki_lee_cf(inst, it), inst);
    } else {
        emit_iterates(out, err, generalized_cf(inst, it), inst);
    }
    return kExitOk;
}

int cmd_compare(const Options& o, std::ostream& out, std::ostream& err) {
    check_order(o.order);
    const ProblemInstance base = load_instance(o.instance);
    std::vector<double> lambdas = o.lambdas;
    if (lambdas.empty()) lambdas.push_back(base.lambda());

    const ScanMethod methods[] = {ScanMethod::Exact,      ScanMethod::Series,    ScanMethod::LeftComb,
                                  ScanMethod::Accelerated, ScanMethod::Alternative, ScanMethod::LkBarred,
                                  ScanMethod::LkBare,     ScanMethod::SuzukiLee, ScanMethod::GeneralizedCF};
    nlohmann::json summary = nlohmann::json::array();
    out << "method,lambda,order_or_iter,err_vs_exact,lindgren_residual\n";
    for (ScanMethod method : methods) {
        ConvergenceReport report{method, {}, {}};
        std::string status = "ok";
        for (double lambda : lambdas) {
            const ProblemInstance inst = base.with_lambda(lambda);
            std::optional<Matrix> exact;
            try {
                exact = exact_wave_operator(inst).chi.matrix;
            } catch (const NumericalError& e) {
                err << "compare: exact oracle unavailable at lambda " << format_number(lambda) << ": " << e.what() << '\n';
            }
            std::size_t k = o.order;
            double err_exact = std::numeric_limits<double>::quiet_NaN();
            double residual = std::numeric_limits<double>::quiet_NaN();
            try {
                Matrix chi;
                if (is_iterative(method)) {
                    const IterationOptions it{o.max_iter, o.tol};
                    IterativeSolution sol = method == ScanMethod::LkBarred ? lk_fixed_point(inst, LkVariant::Barred, o.cutoff, it)
                                          : method == ScanMethod::LkBare   ? lk_fixed_point(inst, LkVariant::Bare, o.cutoff, it)
                                          : method == ScanMethod::SuzukiLee ? suzuki_lee_cf(inst, it)
                                                                            : generalized_cf(inst, it);
                    k = sol.iterations();
                    chi = sol.iterations() ? sol.chi().matrix : Matrix::Zero(inst.dim(), inst.dim()).eval();
                    if (!sol.converged) status = "not converged";
                } else if (method == ScanMethod::Exact) {
                    if (!exact) throw ModelSpaceDetached("exact oracle unavailable");
                    k = 0;
                    chi = *exact;
                } else {
                    chi = method_chi(inst, method, o.order);
                }
                residual = lindgren_residual(chi, inst);
                if (exact) err_exact = (chi - *exact).norm();
            } catch (const std::runtime_error& e) {
                status = e.what();
                err << "compare: " << to_string(method) << " skipped at lambda " << format_number(lambda) << ": "
                    << e.what() << '\n';
            }
            report.rows.push_back({lambda, k, err_exact, residual});
        }
        report.fits = fit_slopes(report.rows);
        write_report_csv(out, report, false, true);
        auto js = report_summary(report);
        js["status"] = status;
        summary.push_back(js);
    }
    if (!o.summary.empty()) {
        std::ofstream f(o.summary);
        if (!f) throw ValidationError("cannot write summary file " + o.summary);
        f << summary.dump(2) << '\n';
    }
    return kExitOk;
}

int cmd_validate(const Options& o, std::ostream& out) {
    const ProblemInstance inst = load_instance(o.instance);
    out << "dim: " << inst.dim() << '\n';
    out << "model:";
    for (int k : inst.model()) out << ' ' << k + 1;
    out << '\n';
    out << "lambda: " << format_number(inst.lambda()) << '\n';
    out << "hermiticity_defect: " << format_number((inst.v() - inst.v().adjoint()).cwiseAbs().maxCoeff()) << '\n';
    out << "gap: " << format_number(inst.gap()) << '\n';
    out << "php_qhq_gap: " << format_number(php_qhq_gap(inst)) << '\n';
    out << "degenerate: " << (inst.is_degenerate() ? "yes" : "no") << '\n';
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Rayleigh-Schroedinger series on planar binary trees", "rsqd"};
    app.require_subcommand(1);
    Options o;

    auto* trees = app.add_subcommand("trees", "list planar binary trees of one order");
    trees->add_option("--order", o.order, "number of inner vertices")->required();
    trees->add_flag("--right-normalized", o.right_normalized, "only right-normalized trees");

    auto* bij = app.add_subcommand("bijections", "Bloch/Dyck/bracketing/partition table as CSV");
    bij->add_option("--order", o.order, "number of inner vertices")->required();

    auto add_instance = [&](CLI::App* sub) {
        sub->add_option("--instance", o.instance, "instance JSON file")->required()->check(CLI::ExistingFile);
    };

    auto* series = app.add_subcommand("series", "truncated wave operator");
    add_instance(series);
    series->add_option("--order", o.order, "truncation order")->default_val(6);
    series->add_option("--lambda", o.lambda, "override the instance coupling");
    series->add_option("--emit", o.emit, "per-order, chi-norm or heff")
        ->default_val("per-order")
        ->check(CLI::IsMember({"per-order", "chi-norm", "heff"}));

    auto* resum = app.add_subcommand("resum", "resummed and iterative schemes");
    add_instance(resum);
    resum->add_option("--scheme", o.scheme, "scheme")
        ->required()
        ->check(CLI::IsMember({"leftcomb", "accelerated", "alternative", "lk", "slcf", "gcf", "shift"}));
    resum->add_option("--order", o.order, "truncation order")->default_val(6);
    resum->add_option("--max-iter", o.max_iter, "iteration limit")->default_val(50);
    resum->add_option("--tol", o.tol, "convergence tolerance")->default_val(1e-10);
    resum->add_option("--lambda", o.lambda, "override the instance coupling");
    resum->add_option("--variant", o.variant, "comb equation variant for lk")
        ->default_val("barred")
        ->check(CLI::IsMember({"barred", "bare"}));
    resum->add_option("--cutoff", o.cutoff, "comb cutoff K for lk (default: sum to convergence)")
        ->check(CLI::PositiveNumber);
    resum->add_option("--parent", o.parent, "parent state for shift, 1-based in ascending PVP order")->default_val(1);

    auto* compare = app.add_subcommand("compare", "all schemes against the exact oracle");
    add_instance(compare);
    compare->add_option("--lambda", o.lambdas, "couplings to scan (repeatable; default: the instance's)");
    compare->add_option("--order", o.order, "truncation order of the series-type schemes")->default_val(10);
    compare->add_option("--max-iter", o.max_iter, "iteration limit")->default_val(50);
    compare->add_option("--tol", o.tol, "convergence tolerance")->default_val(1e-10);
    compare->add_option("--cutoff", o.cutoff, "comb cutoff K for lk")->check(CLI::PositiveNumber);
    compare->add_option("--summary", o.summary, "write a JSON summary with fitted slopes");

    auto* validate = app.add_subcommand("validate", "check an instance file");
    add_instance(validate);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        if (trees->parsed()) return cmd_trees(o, out, err);
        if (bij->parsed()) return cmd_bijections(o, out);
        if (series->parsed()) return cmd_series(o, out);
        if (resum->parsed()) return cmd_resum(o, out, err);
        if (compare->parsed()) return cmd_compare(o, out, err);
        return cmd_validate(o, out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
}

} // namespace rsqd::cli
