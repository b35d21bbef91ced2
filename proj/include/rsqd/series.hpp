#pragma once

#include <cstddef>
#include <unordered_map>
#include <vector>

#include "rsqd/bijections.hpp"
#include "rsqd/operators.hpp"
#include "rsqd/tree.hpp"

namespace rsqd {

/// Omega_t for one tree: chi-shaped block with |t| factors of lambda*V.
struct SeriesTerm {
    Tree tree;
    OperatorBlock block;
    int sign = 1; ///< (-1)^(d-1), d = number of right leaves
};

/// Truncated wave operator. per_order[n] is the order-n contribution to
/// chi (per_order[0] is zero for the plain series), omega = P + chi and
/// chi = sum of per_order.
struct WaveOperatorTruncation {
    std::size_t order = 0;
    OperatorBlock omega;
    OperatorBlock chi;
    std::vector<OperatorBlock> per_order;
};

/// Builds a truncation from order contributions (index = order).
WaveOperatorTruncation make_truncation(const ProblemInstance& inst, std::vector<Matrix> per_order);

/// Evaluates Omega_t by the recursive rule
///   w_t^{ij} = - sum_{kl} w_{t1}^{ik} <k|V|l> w_{t2}^{lj} / (e_j - e_i)
/// with w_| = -delta in the left slot and +delta in the right slot.
/// Results are memoized on tree node identity, so evaluating every tree of
/// an enumeration costs one matrix product per tree.
class RecursiveEvaluator {
public:
    explicit RecursiveEvaluator(const ProblemInstance& inst);

    const Matrix& term(const Tree& t);
    const ProblemInstance& instance() const noexcept { return inst_; }

private:
    struct Entry {
        Tree tree; // keeps the node alive while its address is a key
        Matrix value;
    };

    ProblemInstance inst_;
    Matrix p_;
    Matrix q_;
    Matrix v_;
    Matrix inv_denominators_; // 1/(e_j - e_i) on Q x P, zero elsewhere
    std::unordered_map<const void*, Entry> memo_;
};

SeriesTerm omega_term_recursive(const Tree& t, const ProblemInstance& inst);

inline constexpr std::size_t kDefaultDirectCap = 6;

/// Evaluates Omega_t from the leaf orientations and subtree spans of t by
/// explicit index sums. If `min_denominator` is given it receives the
/// smallest |e_{i_r(v)} - e_{i_l(v)}| that occurred. Throws ValidationError
/// when |t| exceeds cap.
SeriesTerm omega_term_direct(const Tree& t, const ProblemInstance& inst,
                             std::size_t cap = kDefaultDirectCap, double* min_denominator = nullptr);

/// Omega = P + sum_{1<=|t|<=order} Omega_t, summed in enumeration order.
WaveOperatorTruncation wave_operator(const ProblemInstance& inst, std::size_t order,
                                     std::size_t cap = kDefaultEnumerationCap);

/// Product of a word from bloch_to_operator_word with R = Q (e0 - H0)^-1 Q,
/// S^(0) = -P and V = lambda V. Throws NotDegenerate unless all model
/// energies equal e0.
Matrix evaluate_operator_word(const std::vector<WordToken>& word, const ProblemInstance& inst);

struct EffectiveHamiltonian {
    Matrix matrix;             ///< N x N, rows/cols in model order
    ComplexVector eigenvalues; ///< ascending real part, ties by index
};

/// H_eff = P (H0 + lambda V)(P + chi) restricted to M.
EffectiveHamiltonian effective_hamiltonian(const Matrix& chi, const ProblemInstance& inst);
EffectiveHamiltonian effective_hamiltonian(const WaveOperatorTruncation& omega, const ProblemInstance& inst);

/// || [chi,H0] - (QVP + QV chi - chi VP - chi V chi) ||_F with lambda V.
double lindgren_residual(const Matrix& chi, const ProblemInstance& inst);

/// Per order n = 1..N of a plain series truncation:
///   || [chi_n,H0] - (d_{n1} QVP + QV chi_{n-1} - chi_{n-1} VP
///                     - sum_{k=1}^{n-2} chi_k V chi_{n-1-k}) ||_F.
/// Entry 0 of the result is for n = 1.
std::vector<double> lindgren_order_residuals(const WaveOperatorTruncation& omega, const ProblemInstance& inst);

} // namespace rsqd
