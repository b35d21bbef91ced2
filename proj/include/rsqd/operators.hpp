#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "rsqd/errors.hpp"

namespace rsqd {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermiticityTolerance = 1e-10;
inline constexpr double kSingularityThreshold = 1e-12;

/// Unperturbed energies (H0 diagonal in the working basis), perturbation V,
/// model space M and coupling lambda. Validated on construction and
/// immutable afterwards; every formula uses lambda * V.
class ProblemInstance {
public:
    /// `model` holds 0-based indices; duplicates are rejected, order is
    /// normalized to ascending. Throws ValidationError if V is not
    /// Hermitian within 1e-10, the model space is empty or the whole
    /// space, or an energy inside M coincides with one outside.
    ProblemInstance(RealVector h0, Matrix v, std::vector<int> model, double lambda = 1.0);

    int dim() const noexcept { return static_cast<int>(h0_.size()); }
    int model_size() const noexcept { return static_cast<int>(model_.size()); }
    double lambda() const noexcept { return lambda_; }

    const RealVector& h0() const noexcept { return h0_; }
    const Matrix& v() const noexcept { return v_; }
    const std::vector<int>& model() const noexcept { return model_; }
    const std::vector<int>& complement() const noexcept { return complement_; }
    bool in_model(int i) const noexcept { return in_model_[static_cast<std::size_t>(i)]; }

    /// min |e_j - e_i| over j in M, i outside M.
    double gap() const noexcept { return gap_; }

    Matrix h0_matrix() const;
    /// lambda * V
    Matrix scaled_v() const { return lambda_ * v_; }
    /// H0 + lambda * V
    Matrix hamiltonian() const;

    ProblemInstance with_lambda(double lambda) const;
    ProblemInstance with_v(Matrix v) const;

    /// All model energies equal within tol.
    bool is_degenerate(double tol = 1e-12) const;

private:
    RealVector h0_;
    Matrix v_;
    std::vector<int> model_;
    std::vector<int> complement_;
    std::vector<bool> in_model_;
    double lambda_;
    double gap_;
};

/// Brute-force gap, independent of the cached one.
double brute_force_gap(const RealVector& h0, const std::vector<int>& model);

enum class Subspace { Full, P, Q };

/// dim x dim matrix tagged with the subspaces it maps between. A block
/// tagged P -> Q is chi-shaped: rows outside Q and columns outside P vanish.
struct OperatorBlock {
    Matrix matrix;
    Subspace domain = Subspace::Full;
    Subspace codomain = Subspace::Full;
};

/// Largest entry outside the Q-rows x P-columns block, relative to 1.
double chi_shape_defect(const Matrix& m, const ProblemInstance& inst);
bool is_chi_shaped(const Matrix& m, const ProblemInstance& inst, double tol = 0.0);
/// Q m P
Matrix chi_part(const Matrix& m, const ProblemInstance& inst);

struct Projectors {
    OperatorBlock p;
    OperatorBlock q;
};

Projectors projectors(const ProblemInstance& inst);

/// Resolvents, each acting on its subspace and zero elsewhere:
///   G0P(z) = P (H0 - z)^-1 P       GP(z) = (PHP - zP)^-1 on M
///   S0(z)  = (zQ - QH0Q)^-1 on Q   S(z)  = (zQ - QHQ)^-1 on Q
///   R(e0)  = Q (e0 - H0)^-1 Q
/// Throws NearSingular when the restricted operator's smallest singular
/// value is below 1e-12 times its scale.
OperatorBlock resolvent(const ProblemInstance& inst, ResolventKind kind, Complex z);

/// Inverse of a square matrix, throwing NearSingular(kind, z) when its
/// smallest singular value is below 1e-12 of max(||a||, ||reference||, |z|).
Matrix checked_inverse(const Matrix& a, const Matrix& reference, ResolventKind kind, Complex z);

/// PHP spectral data, eigenvalues ascending.
struct PHPEigensystem {
    RealVector energies;                 ///< length N
    Matrix states;                       ///< dim x N, columns |j̄>
    std::vector<Matrix> projectors;      ///< dim x dim, P̄_j = |j̄><j̄|
};

PHPEigensystem php_eigensystem(const ProblemInstance& inst);

/// Eigenvalues of QHQ restricted to the complement, ascending.
RealVector qhq_eigenvalues(const ProblemInstance& inst);

/// min |ē_j - q_i| between spectra of PHP and QHQ.
double php_qhq_gap(const ProblemInstance& inst);

/// Solves [X, H0] = C for chi-shaped C: X_ij = C_ij / (e_j - e_i),
/// i outside M, j in M.
OperatorBlock sylvester_solve(const ProblemInstance& inst, const OperatorBlock& c);

/// X H0 - H0 X
Matrix commutator_with_h0(const Matrix& x, const ProblemInstance& inst);

/// Rows/columns of `m` at the given indices.
Matrix restrict(const Matrix& m, const std::vector<int>& rows, const std::vector<int>& cols);
/// Embed a rows.size() x cols.size() block into a dim x dim zero matrix.
Matrix embed(const Matrix& block, int dim, const std::vector<int>& rows, const std::vector<int>& cols);

/// Operator 2-norm of V (not scaled by lambda).
double v_norm(const ProblemInstance& inst);

} // namespace rsqd
