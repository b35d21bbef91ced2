#include "rsqd/resummation.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace rsqd {

std::string to_string(ResummationScheme scheme) {
    switch (scheme) {
    case ResummationScheme::LeftComb: return "leftcomb";
    case ResummationScheme::Accelerated: return "accelerated";
    case ResummationScheme::Alternative: return "alternative";
    }
    return "?";
}

std::string to_string(IterativeScheme scheme) {
    switch (scheme) {
    case IterativeScheme::LkFixedPoint: return "lk";
    case IterativeScheme::SuzukiLeeCF: return "slcf";
    case IterativeScheme::GeneralizedCF: return "gcf";
    }
    return "?";
}

namespace {

Matrix zero(const ProblemInstance& inst) { return Matrix::Zero(inst.dim(), inst.dim()); }

// G_P(e_i) restricted to M x M for every i outside M, in complement order.
std::vector<Matrix> gp_at_complement(const ProblemInstance& inst) {
    std::vector<Matrix> out;
    for (int i : inst.complement())
        out.push_back(restrict(resolvent(inst, ResolventKind::GP, inst.h0()[i]).matrix, inst.model(), inst.model()));
    return out;
}

// sum_i Q_i X G_i with one N x N matrix G_i per row i outside M.
Matrix rowwise(const Matrix& x, const ProblemInstance& inst, const std::vector<Matrix>& g) {
    const auto& m = inst.model();
    const auto& c = inst.complement();
    Matrix out = zero(inst);
    Eigen::RowVectorXcd row(static_cast<Eigen::Index>(m.size()));
    for (std::size_t a = 0; a < c.size(); ++a) {
        for (std::size_t b = 0; b < m.size(); ++b) row(static_cast<Eigen::Index>(b)) = x(c[a], m[b]);
        const Eigen::RowVectorXcd r = row * g[a];
        for (std::size_t b = 0; b < m.size(); ++b) out(c[a], m[b]) = r(static_cast<Eigen::Index>(b));
    }
    return out;
}

// S(ē_j) and P̄_j for every PHP eigenvalue.
struct BarredResolvents {
    std::vector<Matrix> s;
    std::vector<Matrix> pbar;

    explicit BarredResolvents(const ProblemInstance& inst) {
        const auto eig = php_eigensystem(inst);
        for (Eigen::Index j = 0; j < eig.energies.size(); ++j) {
            s.push_back(resolvent(inst, ResolventKind::S, eig.energies(j)).matrix);
            pbar.push_back(eig.projectors[static_cast<std::size_t>(j)]);
        }
    }

    // sum_j S(ē_j) X P̄_j
    Matrix apply(const Matrix& x) const {
        Matrix out = Matrix::Zero(x.rows(), x.cols());
        for (std::size_t j = 0; j < s.size(); ++j) out += s[j] * x * pbar[j];
        return out;
    }
};

class AcceleratedEvaluator {
public:
    explicit AcceleratedEvaluator(const ProblemInstance& inst)
        : inst_(inst), v_(inst.scaled_v()), gp_(gp_at_complement(inst)) {}

    const Matrix& term(const Tree& t) {
        if (t.is_leaf()) throw ValidationError("accelerated terms need at least one inner vertex");
        if (auto it = memo_.find(t.id()); it != memo_.end()) return it->second.value;
        const Tree& t1 = t.left();
        const Tree& t2 = t.right();
        Matrix x;
        if (t1.is_leaf() && t2.is_leaf()) {
            x = rowwise(v_, inst_, gp_);
        } else if (t1.is_leaf()) {
            x = rowwise(v_ * term(t2), inst_, gp_);
        } else if (t2.is_leaf()) {
            throw ValidationError("tree " + encode(t) + " is not right-normalized");
        } else {
            x = -rowwise(term(t1) * v_ * term(t2), inst_, gp_);
        }
        return memo_.emplace(t.id(), Entry{t, std::move(x)}).first->second.value;
    }

private:
    struct Entry {
        Tree tree;
        Matrix value;
    };
    const ProblemInstance& inst_;
    Matrix v_;
    std::vector<Matrix> gp_;
    std::unordered_map<const void*, Entry> memo_;
};

class AlternativeEvaluator {
public:
    explicit AlternativeEvaluator(const ProblemInstance& inst)
        : v_(inst.scaled_v()), bar_(inst) {
        base_ = bar_.apply(projectors(inst).q.matrix * v_);
    }

    const Matrix& term(const Tree& t) {
        if (t.is_leaf()) return base_;
        if (auto it = memo_.find(t.id()); it != memo_.end()) return it->second.value;
        Matrix x = -bar_.apply(term(t.left()) * v_ * term(t.right()));
        return memo_.emplace(t.id(), Entry{t, std::move(x)}).first->second.value;
    }

private:
    struct Entry {
        Tree tree;
        Matrix value;
    };
    Matrix v_;
    BarredResolvents bar_;
    Matrix base_;
    std::unordered_map<const void*, Entry> memo_;
};

// Closed-form comb sum for t with the plain terms supplied by `plain`.
Matrix left_comb_block(const Tree& t, const ProblemInstance& inst, RecursiveEvaluator& plain,
                       const std::vector<Matrix>& gp) {
    if (t.is_leaf()) throw ValidationError("left-comb resummation needs at least one inner vertex");
    const Matrix v = inst.scaled_v();
    const Tree& u = t.left();
    const Tree& w = t.right();
    if (u.is_leaf() && w.is_leaf()) return rowwise(v, inst, gp);
    if (u.is_leaf()) return rowwise(v * plain.term(w), inst, gp);
    if (!w.is_leaf()) return -rowwise(plain.term(u) * v * plain.term(w), inst, gp);

    // t = u v |: row i of Omega_t times (PH0P - e_i P) G_P(e_i).
    const auto& m = inst.model();
    const auto& c = inst.complement();
    std::vector<Matrix> scaled(gp.size());
    for (std::size_t a = 0; a < c.size(); ++a) {
        RealVector d(static_cast<Eigen::Index>(m.size()));
        for (std::size_t b = 0; b < m.size(); ++b) d(static_cast<Eigen::Index>(b)) = inst.h0()[m[b]] - inst.h0()[c[a]];
        scaled[a] = d.cast<Complex>().asDiagonal() * gp[a];
    }
    return rowwise(plain.term(t), inst, scaled);
}

template <class Step>
IterativeSolution iterate(const ProblemInstance& inst, IterativeScheme scheme, const IterationOptions& options,
                          Step&& step) {
    IterativeSolution sol{scheme, {}, {}, {}, false};
    Matrix chi = zero(inst);
    for (std::size_t it = 0; it < options.max_iter; ++it) {
        Matrix next = chi_part(step(chi), inst);
        const double d = (next - chi).norm();
        const double r = lindgren_residual(next, inst);
        sol.iterates.push_back({next, Subspace::P, Subspace::Q});
        sol.steps.push_back(d);
        sol.residuals.push_back(r);
        chi = std::move(next);
        if (d <= options.tol && r <= options.tol) {
            sol.converged = true;
            break;
        }
    }
    return sol;
}

bool sum_settled(double term_norm, double sum_norm) { return term_norm <= 1e-17 * sum_norm; }

void require_finite(const Matrix& m) {
    if (!m.allFinite()) throw NumericalError("comb sum diverged");
}

} // namespace

ResummedTerm left_comb_resummed(const Tree& t, const ProblemInstance& inst) {
    RecursiveEvaluator plain(inst);
    const auto gp = gp_at_complement(inst);
    return {ResummationScheme::LeftComb, t, {left_comb_block(t, inst, plain, gp), Subspace::P, Subspace::Q}};
}

LeftCombPartialSum left_comb_partial_sum(const Tree& t, const ProblemInstance& inst, std::size_t n_max) {
    if (t.is_leaf()) throw ValidationError("left-comb partial sums need at least one inner vertex");
    RecursiveEvaluator plain(inst);
    LeftCombPartialSum out;
    out.sum = zero(inst);
    std::vector<double> norms;
    Tree tn = t;
    for (std::size_t n = 0; n <= n_max; ++n) {
        const Matrix& term = plain.term(tn);
        out.sum += term;
        norms.push_back(term.norm());
        tn = graft(tn, Tree::leaf());
    }
    out.terms = norms.size();
    out.last_term_norm = norms.back();
    const std::size_t window = std::min<std::size_t>(3, norms.size() - 1);
    for (std::size_t k = norms.size() - window; k < norms.size(); ++k)
        if (norms[k - 1] > 0) out.ratio = std::max(out.ratio, norms[k] / norms[k - 1]);
    if (out.last_term_norm == 0.0)
        out.tail_estimate = 0.0;
    else if (out.ratio < 1.0)
        out.tail_estimate = out.last_term_norm * out.ratio / (1.0 - out.ratio);
    else
        out.tail_estimate = std::numeric_limits<double>::infinity();
    return out;
}

WaveOperatorTruncation left_comb_wave_operator(const ProblemInstance& inst, std::size_t order, std::size_t cap) {
    RecursiveEvaluator plain(inst);
    const auto gp = gp_at_complement(inst);
    const auto trees = enumerate_up_to(order, TreeFilter::All, cap);
    std::vector<Matrix> per_order(order + 1, zero(inst));
    for (std::size_t n = 1; n <= order; ++n) {
        for (const Tree& t : trees[n]) {
            const bool comb_of_root = t.left().is_leaf() && t.right().is_leaf();
            if (comb_of_root || !t.right().is_leaf()) per_order[n] += left_comb_block(t, inst, plain, gp);
        }
    }
    return make_truncation(inst, std::move(per_order));
}

ResummedTerm accelerated_term(const Tree& t, const ProblemInstance& inst) {
    if (!is_right_normalized(t)) throw ValidationError("tree " + encode(t) + " is not right-normalized");
    AcceleratedEvaluator eval(inst);
    return {ResummationScheme::Accelerated, t, {eval.term(t), Subspace::P, Subspace::Q}};
}

WaveOperatorTruncation accelerated_wave_operator(const ProblemInstance& inst, std::size_t order, std::size_t cap) {
    AcceleratedEvaluator eval(inst);
    const auto trees = enumerate_up_to(order, TreeFilter::RightNormalized, cap);
    std::vector<Matrix> per_order(order + 1, zero(inst));
    for (std::size_t n = 1; n <= order; ++n)
        for (const Tree& t : trees[n]) per_order[n] += eval.term(t);
    return make_truncation(inst, std::move(per_order));
}

ResummedTerm alternative_term(const Tree& t, const ProblemInstance& inst) {
    AlternativeEvaluator eval(inst);
    return {ResummationScheme::Alternative, t, {eval.term(t), Subspace::P, Subspace::Q}};
}

WaveOperatorTruncation alternative_wave_operator(const ProblemInstance& inst, std::size_t order, std::size_t cap) {
    AlternativeEvaluator eval(inst);
    const auto trees = enumerate_up_to(order, TreeFilter::All, cap);
    std::vector<Matrix> per_order(order + 1, zero(inst));
    for (std::size_t n = 0; n <= order; ++n)
        for (const Tree& t : trees[n]) per_order[n] += eval.term(t);
    return make_truncation(inst, std::move(per_order));
}

Matrix lk_rhs(const ProblemInstance& inst, LkVariant variant, const Matrix& chi, std::optional<std::size_t> cutoff) {
    if (cutoff && *cutoff < 1) throw ValidationError("comb cutoff must be at least 1");
    const std::size_t limit = cutoff.value_or(kLkMaxCombTerms);
    const Matrix v = inst.scaled_v();

    if (variant == LkVariant::Barred) {
        const BarredResolvents bar(inst);
        Matrix a = bar.apply(projectors(inst).q.matrix * v);
        Matrix sum = a;
        const Matrix v_chi = v * chi;
        for (std::size_t m = 1; m <= limit; ++m) {
            a = -bar.apply(a * v_chi);
            sum += a;
            require_finite(sum);
            if (!cutoff && sum_settled(a.norm(), sum.norm())) break;
        }
        return sum;
    }

    const auto& mod = inst.model();
    const auto& c = inst.complement();
    const Matrix v_omega = v * (projectors(inst).p.matrix + chi);
    const Matrix v_omega_mm = restrict(v_omega, mod, mod);
    Matrix out = zero(inst);
    for (int i : c) {
        RealVector g0(static_cast<Eigen::Index>(mod.size()));
        for (std::size_t b = 0; b < mod.size(); ++b) g0(static_cast<Eigen::Index>(b)) = 1.0 / (inst.h0()[mod[b]] - inst.h0()[i]);
        const Matrix k_i = v_omega_mm * g0.cast<Complex>().asDiagonal();
        Eigen::RowVectorXcd term = restrict(v_omega, {i}, mod) * g0.cast<Complex>().asDiagonal();
        Eigen::RowVectorXcd sum = term;
        for (std::size_t k = 2; k <= limit; ++k) {
            term = -(term * k_i).eval();
            sum += term;
            if (!sum.allFinite()) throw NumericalError("comb sum diverged");
            if (!cutoff && sum_settled(term.norm(), sum.norm())) break;
        }
        for (std::size_t b = 0; b < mod.size(); ++b) out(i, mod[b]) = sum(static_cast<Eigen::Index>(b));
    }
    return out;
}

IterativeSolution lk_fixed_point(const ProblemInstance& inst, LkVariant variant, std::optional<std::size_t> cutoff,
                                 IterationOptions options) {
    return iterate(inst, IterativeScheme::LkFixedPoint, options,
                   [&](const Matrix& chi) { return lk_rhs(inst, variant, chi, cutoff); });
}

IterativeSolution suzuki_lee_cf(const ProblemInstance& inst, IterationOptions options) {
    if (!inst.is_degenerate()) throw NotDegenerate("Suzuki-Lee iteration needs equal model energies");
    const auto& m = inst.model();
    const auto& c = inst.complement();
    const double e0 = inst.h0()[m.front()];
    const Matrix v = inst.scaled_v();
    const Matrix qhq = restrict(inst.hamiltonian(), c, c);
    const Matrix p = projectors(inst).p.matrix;
    return iterate(inst, IterativeScheme::SuzukiLeeCF, options, [&](const Matrix& chi) {
        const Matrix chi_v = chi * v;
        const Matrix a = e0 * Matrix::Identity(qhq.rows(), qhq.cols()) - qhq + restrict(chi_v, c, c);
        const Matrix b = restrict(v - chi_v, c, m);
        return embed(checked_inverse(a, qhq, ResolventKind::S, e0) * b, inst.dim(), c, m);
    });
}

IterativeSolution generalized_cf(const ProblemInstance& inst, IterationOptions options) {
    const auto& m = inst.model();
    const auto& c = inst.complement();
    const Matrix v = inst.scaled_v();
    const Matrix php = restrict(inst.hamiltonian(), m, m);
    const Matrix p = projectors(inst).p.matrix;
    const Matrix id = Matrix::Identity(php.rows(), php.cols());
    return iterate(inst, IterativeScheme::GeneralizedCF, options, [&](const Matrix& chi) {
        const Matrix v_omega = v * (p + chi);
        const Matrix v_chi_mm = restrict(v * chi, m, m);
        Matrix out = Matrix::Zero(inst.dim(), inst.dim());
        for (int i : c) {
            const double ei = inst.h0()[i];
            const Matrix bracket = php - ei * id + v_chi_mm;
            const Matrix row = restrict(v_omega, {i}, m) * checked_inverse(bracket, php, ResolventKind::GP, ei);
            for (std::size_t b = 0; b < m.size(); ++b) out(i, m[b]) = row(0, static_cast<Eigen::Index>(b));
        }
        return out;
    });
}

namespace {

// Four-case recursion of the shifted series, column p only.
class ShiftedEvaluator {
public:
    ShiftedEvaluator(const ProblemInstance& shifted, std::vector<int> q, std::vector<int> q0, int p)
        : e_(shifted.h0()), v_(shifted.scaled_v()), q_(std::move(q)), q0_(std::move(q0)), p_(p), dim_(shifted.dim()) {
        q_all_ = q_;
        q_all_.insert(q_all_.end(), q0_.begin(), q0_.end());
        std::sort(q_all_.begin(), q_all_.end());
    }

    double min_denominator() const noexcept { return min_den_; }

    const Matrix& term(const Tree& t) {
        if (auto it = memo_.find(t.id()); it != memo_.end()) return it->second.value;
        const Tree& t1 = t.left();
        const Tree& t2 = t.right();
        Matrix x = Matrix::Zero(dim_, dim_);
        if (t1.is_leaf() && t2.is_leaf()) {
            for (int i : q_) x(i, p_) = v_(i, p_) / den(i);
        } else if (t1.is_leaf()) {
            const Matrix& w = term(t2);
            for (int i : q_) x(i, p_) = sum_over(q_all_, i, w) / den(i);
            for (int i : q0_) x(i, p_) = sum_over(q_, i, w) / den(i);
        } else if (!t2.is_leaf()) {
            const Matrix& w1 = term(t1);
            const Complex s = sum_over(q_, p_, term(t2));
            for (int i : q_all_) x(i, p_) = -w1(i, p_) * s / den(i);
        }
        return memo_.emplace(t.id(), Entry{t, std::move(x)}).first->second.value;
    }

private:
    struct Entry {
        Tree tree;
        Matrix value;
    };

    // e'_0 - e'_i, recording the smallest magnitude met.
    double den(int i) {
        const double d = e_[p_] - e_[i];
        min_den_ = std::min(min_den_, std::abs(d));
        return d;
    }

    // sum_{k in set} lambda V'(row, k) w(k, p)
    Complex sum_over(const std::vector<int>& set, int row, const Matrix& w) const {
        Complex s = 0.0;
        for (int k : set) s += v_(row, k) * w(k, p_);
        return s;
    }

    RealVector e_;
    Matrix v_;
    std::vector<int> q_;
    std::vector<int> q0_;
    std::vector<int> q_all_;
    int p_;
    int dim_;
    double min_den_ = std::numeric_limits<double>::infinity();
    std::unordered_map<const void*, Entry> memo_;
};

} // namespace

ShiftedExpansion shifted_degenerate_expansion(const ProblemInstance& inst, int parent, std::size_t order,
                                              std::size_t cap) {
    if (!inst.is_degenerate()) throw NotDegenerate("the shifted expansion needs equal model energies");
    const auto& m = inst.model();
    if (parent < 0 || parent >= inst.model_size())
        throw ValidationError("parent index " + std::to_string(parent) + " outside the model space");

    const int n = inst.dim();
    Eigen::SelfAdjointEigenSolver<Matrix> es(restrict(inst.v(), m, m));
    Matrix vecs = es.eigenvectors();
    for (Eigen::Index k = 0; k < vecs.cols(); ++k) {
        Eigen::Index imax = 0;
        vecs.col(k).cwiseAbs().maxCoeff(&imax);
        const Complex a = vecs(imax, k);
        vecs.col(k) *= std::conj(a) / std::abs(a);
    }
    Matrix u = Matrix::Identity(n, n);
    for (std::size_t a = 0; a < m.size(); ++a)
        for (std::size_t b = 0; b < m.size(); ++b) u(m[a], m[b]) = vecs(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));

    Matrix v_rot = u.adjoint() * inst.v() * u;
    const double e0 = inst.h0()[m.front()];
    RealVector h0s = inst.h0();
    for (int j : m) h0s[j] = e0 + inst.lambda() * v_rot(j, j).real();
    for (int a : m)
        for (int b : m) v_rot(a, b) = 0.0;

    const double scale = std::max(1.0, h0s.cwiseAbs().maxCoeff());
    const int p = m[static_cast<std::size_t>(parent)];
    for (std::size_t a = 0; a < m.size(); ++a)
        for (std::size_t b = a + 1; b < m.size(); ++b)
            if (std::abs(h0s[m[a]] - h0s[m[b]]) <= kShiftSeparation * scale)
                throw ShiftDegenerate("shifted model energies coincide at states " + std::to_string(m[a] + 1) +
                                      " and " + std::to_string(m[b] + 1));
    for (int i : inst.complement())
        if (std::abs(h0s[p] - h0s[i]) <= kShiftSeparation * scale)
            throw ShiftDegenerate("shifted parent energy meets the energy of state " + std::to_string(i + 1));

    ProblemInstance shifted(h0s, v_rot, {p}, inst.lambda());
    std::vector<int> q0;
    for (int j : m)
        if (j != p) q0.push_back(j);

    ShiftedEvaluator eval(shifted, inst.complement(), q0, p);
    const auto trees = enumerate_up_to(order, TreeFilter::All, cap);
    std::vector<Matrix> per_order(order + 1, Matrix::Zero(n, n));
    for (std::size_t k = 1; k <= order; ++k)
        for (const Tree& t : trees[k]) per_order[k] += eval.term(t);
    auto trunc = make_truncation(shifted, std::move(per_order));
    const Complex heff = effective_hamiltonian(trunc, shifted).matrix(0, 0);
    return {parent, std::move(u), std::move(h0s), std::move(shifted), std::move(trunc), heff,
            order == 0 ? std::numeric_limits<double>::infinity() : eval.min_denominator()};
}

} // namespace rsqd
