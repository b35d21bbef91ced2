#include "rsqd/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "rsqd/resummation.hpp"
#include "rsqd/series.hpp"

namespace rsqd {

namespace {

// Column of the eigenvector assigned to each model basis state.
std::vector<Eigen::Index> assign_by_overlap(const Eigen::MatrixXd& w) {
    const Eigen::Index n_model = w.rows();
    const Eigen::Index n_states = w.cols();
    struct Pair {
        double weight;
        Eigen::Index row, col;
    };
    std::vector<Pair> pairs;
    for (Eigen::Index r = 0; r < n_model; ++r)
        for (Eigen::Index c = 0; c < n_states; ++c) pairs.push_back({w(r, c), r, c});
    std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.weight > b.weight; });

    std::vector<Eigen::Index> col_of(static_cast<std::size_t>(n_model), -1);
    std::vector<bool> taken(static_cast<std::size_t>(n_states), false);
    for (const auto& p : pairs) {
        auto& slot = col_of[static_cast<std::size_t>(p.row)];
        if (slot >= 0 || taken[static_cast<std::size_t>(p.col)]) continue;
        slot = p.col;
        taken[static_cast<std::size_t>(p.col)] = true;
    }

    constexpr double eps = 1e-14;
    for (int sweep = 0; sweep < 100; ++sweep) {
        bool changed = false;
        for (Eigen::Index a = 0; a < n_model; ++a) {
            for (Eigen::Index b = a + 1; b < n_model; ++b) {
                auto& ca = col_of[static_cast<std::size_t>(a)];
                auto& cb = col_of[static_cast<std::size_t>(b)];
                if (w(a, cb) + w(b, ca) > w(a, ca) + w(b, cb) + eps) {
                    std::swap(ca, cb);
                    changed = true;
                }
            }
            for (Eigen::Index c = 0; c < n_states; ++c) {
                auto& ca = col_of[static_cast<std::size_t>(a)];
                if (!taken[static_cast<std::size_t>(c)] && w(a, c) > w(a, ca) + eps) {
                    taken[static_cast<std::size_t>(ca)] = false;
                    taken[static_cast<std::size_t>(c)] = true;
                    ca = c;
                    changed = true;
                }
            }
        }
        if (!changed) break;
    }
    return col_of;
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

} // namespace

ExactWaveOperator exact_wave_operator(const ProblemInstance& inst) {
    const auto& m = inst.model();
    const int n = inst.dim();
    const Matrix h = inst.hamiltonian();
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    const Matrix& phi = es.eigenvectors();
    const RealVector& ev = es.eigenvalues();

    Eigen::MatrixXd w(static_cast<Eigen::Index>(m.size()), n);
    for (std::size_t a = 0; a < m.size(); ++a) w.row(static_cast<Eigen::Index>(a)) = phi.row(m[a]).cwiseAbs2();
    auto cols = assign_by_overlap(w);
    std::sort(cols.begin(), cols.end());

    ExactWaveOperator out;
    const auto nm = static_cast<Eigen::Index>(m.size());
    out.states.resize(n, nm);
    out.energies.resize(nm);
    for (Eigen::Index k = 0; k < nm; ++k) {
        out.states.col(k) = phi.col(cols[static_cast<std::size_t>(k)]);
        out.energies(k) = ev(cols[static_cast<std::size_t>(k)]);
    }

    const Matrix a = restrict(out.states, m, [&] {
        std::vector<int> all(static_cast<std::size_t>(nm));
        std::iota(all.begin(), all.end(), 0);
        return all;
    }());
    Eigen::JacobiSVD<Matrix> svd(a);
    out.min_singular = svd.singularValues()(nm - 1);
    if (out.min_singular < kDetachedThreshold)
        throw ModelSpaceDetached("exact eigenvectors lose the model space (smallest singular value " +
                                 std::to_string(out.min_singular) + ")");

    const Matrix cols_m = out.states * a.inverse();
    Matrix omega = Matrix::Zero(n, n);
    for (std::size_t b = 0; b < m.size(); ++b) omega.col(m[b]) = cols_m.col(static_cast<Eigen::Index>(b));
    for (int r : m)
        for (int c : m) omega(r, c) = r == c ? 1.0 : 0.0;

    Matrix chi = chi_part(omega, inst);
    const Matrix p = projectors(inst).p.matrix;
    out.heff = restrict(p * h * omega, m, m);
    out.omega = {std::move(omega), Subspace::Full, Subspace::Full};
    out.chi = {std::move(chi), Subspace::P, Subspace::Q};
    return out;
}

ExactWaveOperator exact_wave_operator(const ProblemInstance& inst, double lambda) {
    return exact_wave_operator(inst.with_lambda(lambda));
}

OperatorBlock series_coefficient(const ProblemInstance& inst, int n, CoefficientOptions options) {
    if (n < 0 || n > 6) throw ValidationError("series coefficients are available for 0 <= n <= 6");
    const int dim = inst.dim();
    const double vn = v_norm(inst);
    if (n == 0 || vn == 0.0) return {Matrix::Zero(dim, dim), Subspace::P, Subspace::Q};

    const double h = options.step_fraction * inst.gap() / vn;
    const int depth = options.depth;
    std::map<double, Matrix> cache;
    auto f = [&](double lambda) -> const Matrix& {
        auto it = cache.find(lambda);
        if (it == cache.end()) it = cache.emplace(lambda, exact_wave_operator(inst, lambda).chi.matrix).first;
        return it->second;
    };

    std::vector<std::vector<Matrix>> t(static_cast<std::size_t>(depth + 1));
    double fmax = 0.0;
    for (int k = 0; k <= depth; ++k) {
        const double hk = h / std::pow(2.0, k);
        Matrix d = Matrix::Zero(dim, dim);
        for (int s = 0; s <= n; ++s) {
            const Matrix& fs = f((0.5 * n - s) * hk);
            fmax = std::max(fmax, fs.norm());
            d += ((s % 2 == 0) ? 1.0 : -1.0) * binomial(n, s) * fs;
        }
        t[static_cast<std::size_t>(k)].push_back(d / (std::pow(hk, n) * factorial(n)));
        for (int j = 1; j <= k; ++j) {
            const double c = std::pow(4.0, j);
            const Matrix& fine = t[static_cast<std::size_t>(k)][static_cast<std::size_t>(j - 1)];
            const Matrix& coarse = t[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(j - 1)];
            t[static_cast<std::size_t>(k)].push_back((c * fine - coarse) / (c - 1.0));
        }
    }

    // The finest levels are roundoff-limited for larger n, so the diagonal
    // entry with the smallest change from its predecessor is returned.
    if (depth == 0) return {chi_part(t[0][0], inst), Subspace::P, Subspace::Q};
    int best = 1;
    double best_diff = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= depth; ++k) {
        const double d = (t[static_cast<std::size_t>(k)].back() - t[static_cast<std::size_t>(k - 1)].back()).norm();
        if (d < best_diff) {
            best_diff = d;
            best = k;
        }
    }
    const Matrix& value = t[static_cast<std::size_t>(best)].back();
    const double hb = h / std::pow(2.0, best);
    const double roundoff = 1e3 * std::numeric_limits<double>::epsilon() * fmax * std::pow(2.0, n) /
                            (std::pow(hb, n) * factorial(n));
    if (!(best_diff <= options.rel_tol * value.norm() + roundoff)) {
        throw ExtrapolationError("Richardson tableau for order " + std::to_string(n) +
                                 " did not settle (smallest change " + std::to_string(best_diff) + ")");
    }
    return {chi_part(value, inst), Subspace::P, Subspace::Q};
}

std::string to_string(ScanMethod method) {
    switch (method) {
    case ScanMethod::Exact: return "exact";
    case ScanMethod::Series: return "series";
    case ScanMethod::LeftComb: return "leftcomb";
    case ScanMethod::Accelerated: return "accelerated";
    case ScanMethod::Alternative: return "alternative";
    case ScanMethod::LkBarred: return "lk-barred";
    case ScanMethod::LkBare: return "lk-bare";
    case ScanMethod::SuzukiLee: return "slcf";
    case ScanMethod::GeneralizedCF: return "gcf";
    }
    return "?";
}

ScanMethod scan_method_from_string(const std::string& name) {
    for (ScanMethod m : {ScanMethod::Exact, ScanMethod::Series, ScanMethod::LeftComb, ScanMethod::Accelerated,
                         ScanMethod::Alternative, ScanMethod::LkBarred, ScanMethod::LkBare, ScanMethod::SuzukiLee,
                         ScanMethod::GeneralizedCF})
        if (to_string(m) == name) return m;
    throw ValidationError("unknown method \"" + name + "\"");
}

bool is_iterative(ScanMethod method) {
    return method == ScanMethod::LkBarred || method == ScanMethod::LkBare || method == ScanMethod::SuzukiLee ||
           method == ScanMethod::GeneralizedCF;
}

Matrix method_chi(const ProblemInstance& inst, ScanMethod method, std::size_t k) {
    const auto last = [&](const IterativeSolution& s) {
        return s.iterates.empty() ? Matrix::Zero(inst.dim(), inst.dim()).eval() : s.chi().matrix;
    };
    const IterationOptions fixed_steps{k, 0.0};
    switch (method) {
    case ScanMethod::Exact: return exact_wave_operator(inst).chi.matrix;
    case ScanMethod::Series: return wave_operator(inst, k).chi.matrix;
    case ScanMethod::LeftComb: return left_comb_wave_operator(inst, k).chi.matrix;
    case ScanMethod::Accelerated: return accelerated_wave_operator(inst, k).chi.matrix;
    case ScanMethod::Alternative: return alternative_wave_operator(inst, k).chi.matrix;
    case ScanMethod::LkBarred: return last(lk_fixed_point(inst, LkVariant::Barred, std::nullopt, fixed_steps));
    case ScanMethod::LkBare: return last(lk_fixed_point(inst, LkVariant::Bare, std::nullopt, fixed_steps));
    case ScanMethod::SuzukiLee: return last(suzuki_lee_cf(inst, fixed_steps));
    case ScanMethod::GeneralizedCF: return last(generalized_cf(inst, fixed_steps));
    }
    throw ValidationError("unknown method");
}

std::vector<SlopeFit> fit_slopes(const std::vector<ConvergenceRow>& rows) {
    std::map<std::size_t, std::vector<std::pair<double, double>>> by_order;
    for (const auto& r : rows)
        if (r.lambda > 0 && r.err_vs_exact > 0 && std::isfinite(r.err_vs_exact))
            by_order[r.order_or_iter].emplace_back(std::log(r.lambda), std::log(r.err_vs_exact));

    std::vector<SlopeFit> fits;
    for (const auto& [order, pts] : by_order) {
        if (pts.size() < 2) continue;
        Eigen::MatrixXd a(static_cast<Eigen::Index>(pts.size()), 2);
        Eigen::VectorXd b(static_cast<Eigen::Index>(pts.size()));
        for (std::size_t i = 0; i < pts.size(); ++i) {
            a(static_cast<Eigen::Index>(i), 0) = pts[i].first;
            a(static_cast<Eigen::Index>(i), 1) = 1.0;
            b(static_cast<Eigen::Index>(i)) = pts[i].second;
        }
        const Eigen::Vector2d x = a.colPivHouseholderQr().solve(b);
        const double rms = std::sqrt((a * x - b).squaredNorm() / static_cast<double>(pts.size()));
        fits.push_back({order, x(0), x(1), rms, pts.size()});
    }
    return fits;
}

ConvergenceReport convergence_scan(const ProblemInstance& inst, ScanMethod method,
                                   const std::vector<std::size_t>& orders, const std::vector<double>& lambdas) {
    ConvergenceReport report{method, {}, {}};
    for (double lambda : lambdas) {
        const ProblemInstance at = inst.with_lambda(lambda);
        const Matrix exact = exact_wave_operator(at).chi.matrix;
        for (std::size_t k : orders) {
            const Matrix chi = method_chi(at, method, k);
            report.rows.push_back({lambda, k, (chi - exact).norm(), lindgren_residual(chi, at)});
        }
    }
    report.fits = fit_slopes(report.rows);
    return report;
}

} // namespace rsqd
