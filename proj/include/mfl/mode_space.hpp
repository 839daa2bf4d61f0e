#pragma once

// Finite mode space: the data (M, h, W [, V]) defining both the quantum
// N-body problem and its classical (Hartree) limit.
//
//  * h is the Hermitian one-body energy (M x M).
//  * W is the pair interaction represented on the symmetric 2-sector
//    (dimension M(M+1)/2).  Representing W on the symmetric sector makes
//    exchange symmetry automatic.
//  * V is an optional external one-body potential (M x M Hermitian).  For
//    dynamics it is folded into the one-body part; the expansion machinery
//    can alternatively treat it as explicit potential vertices.
//
// A pair table w(i,j) = w(j,i) (the mode-space analogue of a multiplication
// operator w(x - y)) produces a W that is diagonal in the 2-sector occupation
// basis with entry w(i,j) on the pair state {i, j}.

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "mfl/sector_operator.hpp"

namespace mfl {

struct ModeSpace {
    int modes = 0;
    Eigen::MatrixXcd h;                  // M x M Hermitian
    Eigen::MatrixXcd W;                  // 2-sector Hermitian
    std::optional<Eigen::MatrixXcd> V;   // optional M x M Hermitian
    // sup-norm of the pair table when constructed from one, else the spectral
    // norm of W; used by the convergence-radius bookkeeping.
    double w_sup = 0.0;

    SectorOperator h_op() const { return SectorOperator(modes, 1, h); }
    SectorOperator W_op() const { return SectorOperator(modes, 2, W); }
    SectorOperator V_op() const;
    // one-body part used by dynamics: h + V (V folded in when present)
    Eigen::MatrixXcd one_body() const;
};

// Validating constructors; Hermiticity is checked to 1e-12 (max abs entry).
ModeSpace make_mode_space(const Eigen::MatrixXcd& h, const Eigen::MatrixXcd& W_sector,
                          std::optional<Eigen::MatrixXcd> V = std::nullopt);
ModeSpace make_mode_space_pair(const Eigen::MatrixXcd& h, const Eigen::MatrixXd& pair_table,
                               std::optional<Eigen::MatrixXcd> V = std::nullopt);

// Scaling parameters: N is the (real, positive) mean-field parameter, n the
// particle sector; nu = n/N is the density.
struct QuantizationParams {
    double N = 1.0;
    int n = 0;
    double nu() const { return static_cast<double>(n) / N; }
};

QuantizationParams make_params(double N, int n);

// JSON (de)serialization.  Complex numbers are [re, im] pairs; matrices are
// row-major.  Accepted keys: M, h, and either w_pair (M x M real table) or W
// (2-sector matrix), plus optional v.  Parsing errors carry field paths.
std::string serialize_mode_space(const ModeSpace& ms);
ModeSpace parse_mode_space(const std::string& json_text);

} // namespace mfl
