#include "rsqd/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace rsqd {

WaveOperatorTruncation make_truncation(const ProblemInstance& inst, std::vector<Matrix> per_order) {
    const int n = inst.dim();
    WaveOperatorTruncation out;
    out.order = per_order.empty() ? 0 : per_order.size() - 1;
    Matrix chi = Matrix::Zero(n, n);
    for (auto& m : per_order) {
        chi += m;
        out.per_order.push_back({std::move(m), Subspace::P, Subspace::Q});
    }
    out.omega = {projectors(inst).p.matrix + chi, Subspace::Full, Subspace::Full};
    out.chi = {std::move(chi), Subspace::P, Subspace::Q};
    return out;
}

RecursiveEvaluator::RecursiveEvaluator(const ProblemInstance& inst)
    : inst_(inst), v_(inst.scaled_v()) {
    auto pq = projectors(inst_);
    p_ = std::move(pq.p.matrix);
    q_ = std::move(pq.q.matrix);
    inv_denominators_ = Matrix::Zero(inst_.dim(), inst_.dim());
    for (int i : inst_.complement())
        for (int j : inst_.model()) inv_denominators_(i, j) = 1.0 / (inst_.h0()[j] - inst_.h0()[i]);
}

const Matrix& RecursiveEvaluator::term(const Tree& t) {
    if (t.is_leaf()) throw ValidationError("Omega_t is defined for trees with at least one inner vertex");
    if (auto it = memo_.find(t.id()); it != memo_.end()) return it->second.value;

    const Tree& t1 = t.left();
    const Tree& t2 = t.right();
    Matrix numerator;
    if (t1.is_leaf() && t2.is_leaf()) {
        numerator = q_ * v_ * p_;
    } else if (t1.is_leaf()) {
        numerator = q_ * v_ * q_ * term(t2);
    } else if (t2.is_leaf()) {
        numerator = -term(t1) * p_ * v_ * p_;
    } else {
        // Omega_{t1} P V Q Omega_{t2}; the P is redundant since Omega_{t1} P = Omega_{t1}.
        numerator = -term(t1) * p_ * v_ * q_ * term(t2);
    }
    Matrix value = numerator.cwiseProduct(inv_denominators_);
    auto [it, inserted] = memo_.emplace(t.id(), Entry{t, std::move(value)});
    return it->second.value;
}

SeriesTerm omega_term_recursive(const Tree& t, const ProblemInstance& inst) {
    RecursiveEvaluator eval(inst);
    const int d = static_cast<int>(right_leaf_count(t));
    return {t, {eval.term(t), Subspace::P, Subspace::Q}, d % 2 == 1 ? 1 : -1};
}

SeriesTerm omega_term_direct(const Tree& t, const ProblemInstance& inst, std::size_t cap, double* min_denominator) {
    if (t.is_leaf()) throw ValidationError("Omega_t is defined for trees with at least one inner vertex");
    if (t.order() > cap) {
        throw ValidationError("direct evaluation capped at order " + std::to_string(cap) + ", got " +
                              std::to_string(t.order()));
    }
    const auto orientation = leaf_orientations(t);
    const auto spans = subtree_spans(t);
    const std::size_t leaves = orientation.size();
    const int d = static_cast<int>(std::count(orientation.begin(), orientation.end(), Orientation::Right));
    const double sign = d % 2 == 1 ? 1.0 : -1.0;
    const Matrix v = inst.scaled_v();
    const RealVector& e = inst.h0();
    const double gap = inst.gap();

    Matrix result = Matrix::Zero(inst.dim(), inst.dim());
    std::vector<int> idx(leaves);
    double min_den = std::numeric_limits<double>::infinity();

    auto walk = [&](auto&& self, std::size_t k, Complex numerator) -> void {
        const auto& choices = orientation[k] == Orientation::Right ? inst.model() : inst.complement();
        for (int i : choices) {
            Complex num = numerator;
            if (k > 0) {
                num *= v(idx[k - 1], i);
                if (num == Complex(0.0)) continue;
            }
            idx[k] = i;
            if (k + 1 < leaves) {
                self(self, k + 1, num);
                continue;
            }
            double den = 1.0;
            for (const auto& s : spans) {
                const double factor = e[idx[s.r - 1]] - e[idx[s.l - 1]];
                // l(v) is always a left leaf and r(v) a right leaf, so the
                // factor crosses the gap.
                if (std::abs(factor) < gap * (1.0 - 1e-12))
                    throw std::logic_error("direct evaluation met a denominator inside the gap");
                min_den = std::min(min_den, std::abs(factor));
                den *= factor;
            }
            result(idx.front(), idx.back()) += sign * num / den;
        }
    };
    walk(walk, 0, Complex(1.0));
    if (min_denominator) *min_denominator = min_den;
    return {t, {std::move(result), Subspace::P, Subspace::Q}, d % 2 == 1 ? 1 : -1};
}

WaveOperatorTruncation wave_operator(const ProblemInstance& inst, std::size_t order, std::size_t cap) {
    if (order > cap) {
        throw ValidationError("series order " + std::to_string(order) + " exceeds enumeration cap " +
                              std::to_string(cap));
    }
    RecursiveEvaluator eval(inst);
    std::vector<Matrix> per_order(order + 1, Matrix::Zero(inst.dim(), inst.dim()));
    const auto trees = enumerate_up_to(order, TreeFilter::All, cap);
    for (std::size_t n = 1; n <= order; ++n)
        for (const Tree& t : trees[n]) per_order[n] += eval.term(t);
    return make_truncation(inst, std::move(per_order));
}

Matrix evaluate_operator_word(const std::vector<WordToken>& word, const ProblemInstance& inst) {
    if (!inst.is_degenerate()) throw NotDegenerate("operator words need equal model energies");
    const Matrix r = resolvent(inst, ResolventKind::R, inst.h0()[inst.model().front()]).matrix;
    const Matrix p = projectors(inst).p.matrix;
    const Matrix v = inst.scaled_v();
    Matrix out = Matrix::Identity(inst.dim(), inst.dim());
    for (const auto& tok : word) {
        switch (tok.kind) {
        case WordToken::Kind::ResolventPower:
            for (int k = 0; k < tok.power; ++k) out = out * r;
            break;
        case WordToken::Kind::NegativeP: out = -out * p; break;
        case WordToken::Kind::V: out = out * v; break;
        case WordToken::Kind::P: out = out * p; break;
        }
    }
    return out;
}

EffectiveHamiltonian effective_hamiltonian(const Matrix& chi, const ProblemInstance& inst) {
    const auto& m = inst.model();
    const Matrix p = projectors(inst).p.matrix;
    const Matrix full = p * inst.hamiltonian() * (p + chi);
    EffectiveHamiltonian out;
    out.matrix = restrict(full, m, m);
    Eigen::ComplexEigenSolver<Matrix> es(out.matrix, false);
    const ComplexVector ev = es.eigenvalues();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(ev.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return ev(a).real() < ev(b).real(); });
    out.eigenvalues.resize(ev.size());
    for (std::size_t k = 0; k < order.size(); ++k) out.eigenvalues(static_cast<Eigen::Index>(k)) = ev(order[k]);
    return out;
}

EffectiveHamiltonian effective_hamiltonian(const WaveOperatorTruncation& omega, const ProblemInstance& inst) {
    return effective_hamiltonian(omega.chi.matrix, inst);
}

double lindgren_residual(const Matrix& chi, const ProblemInstance& inst) {
    const auto pq = projectors(inst);
    const Matrix& p = pq.p.matrix;
    const Matrix& q = pq.q.matrix;
    const Matrix v = inst.scaled_v();
    const Matrix rhs = q * v * p + q * v * chi - chi * v * p - chi * v * chi;
    return (commutator_with_h0(chi, inst) - rhs).norm();
}

std::vector<double> lindgren_order_residuals(const WaveOperatorTruncation& omega, const ProblemInstance& inst) {
    const auto pq = projectors(inst);
    const Matrix& p = pq.p.matrix;
    const Matrix& q = pq.q.matrix;
    const Matrix v = inst.scaled_v();
    const auto& chi = omega.per_order;
    std::vector<double> out;
    for (std::size_t n = 1; n < chi.size(); ++n) {
        Matrix rhs = Matrix::Zero(inst.dim(), inst.dim());
        if (n == 1) rhs += q * v * p;
        rhs += q * v * chi[n - 1].matrix - chi[n - 1].matrix * v * p;
        for (std::size_t k = 1; k + 1 < n; ++k) rhs -= chi[k].matrix * v * chi[n - 1 - k].matrix;
        out.push_back((commutator_with_h0(chi[n].matrix, inst) - rhs).norm());
    }
    return out;
}

} // namespace rsqd
