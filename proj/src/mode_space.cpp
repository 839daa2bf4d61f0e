#include "mfl/mode_space.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "mfl/errors.hpp"

using nlohmann::json;

namespace mfl {

namespace {

constexpr double kHermTol = 1e-12;

void require_hermitian(const Eigen::MatrixXcd& m, const char* name) {
    if (m.rows() != m.cols())
        throw std::invalid_argument(std::string(name) + ": matrix must be square");
    if (hermiticity_residue(m) > kHermTol)
        throw std::invalid_argument(std::string(name) + ": matrix is not Hermitian (residue above 1e-12)");
}

} // namespace

SectorOperator ModeSpace::V_op() const {
    if (!V) throw std::invalid_argument("ModeSpace: no external potential configured");
    return SectorOperator(modes, 1, *V);
}

Eigen::MatrixXcd ModeSpace::one_body() const {
    if (V) return h + *V;
    return h;
}

ModeSpace make_mode_space(const Eigen::MatrixXcd& h, const Eigen::MatrixXcd& W_sector,
                          std::optional<Eigen::MatrixXcd> V) {
    ModeSpace ms;
    ms.modes = static_cast<int>(h.rows());
    require_hermitian(h, "h");
    require_hermitian(W_sector, "W");
    const Eigen::Index d2 = sector_dim(ms.modes, 2);
    if (W_sector.rows() != d2)
        throw std::invalid_argument("W: expected the symmetric 2-sector dimension M(M+1)/2");
    if (V) {
        require_hermitian(*V, "v");
        if (V->rows() != h.rows()) throw std::invalid_argument("v: dimension mismatch with h");
    }
    ms.h = h;
    ms.W = W_sector;
    ms.V = std::move(V);
    ms.w_sup = spectral_norm(W_sector);
    return ms;
}

ModeSpace make_mode_space_pair(const Eigen::MatrixXcd& h, const Eigen::MatrixXd& pair_table,
                               std::optional<Eigen::MatrixXcd> V) {
    const int modes = static_cast<int>(h.rows());
    if (pair_table.rows() != modes || pair_table.cols() != modes)
        throw std::invalid_argument("w_pair: table must be M x M");
    if ((pair_table - pair_table.transpose()).cwiseAbs().maxCoeff() > kHermTol)
        throw std::invalid_argument("w_pair: table must be symmetric");
    SectorBasis b2(modes, 2);
    Eigen::MatrixXcd W = Eigen::MatrixXcd::Zero(b2.dim(), b2.dim());
    for (Eigen::Index i = 0; i < b2.dim(); ++i) {
        const Occupation& m = b2.occupation(i);
        int first = -1, second = -1;
        for (int mode = 0; mode < modes; ++mode) {
            for (int c = 0; c < m[static_cast<std::size_t>(mode)]; ++c) {
                if (first < 0) first = mode; else second = mode;
            }
        }
        W(i, i) = pair_table(first, second);
    }
    ModeSpace ms = make_mode_space(h, W, std::move(V));
    ms.w_sup = pair_table.cwiseAbs().maxCoeff();
    return ms;
}

QuantizationParams make_params(double N, int n) {
    if (!(N > 0.0)) throw std::invalid_argument("QuantizationParams: N must be positive");
    if (n < 0) throw std::invalid_argument("QuantizationParams: n must be nonnegative");
    return QuantizationParams{N, n};
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

json complex_matrix_to_json(const Eigen::MatrixXcd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            rows.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    return rows;
}

Eigen::MatrixXcd complex_matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols,
                                          const std::string& path) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows * cols)
        throw config_error(path + ": expected " + std::to_string(rows * cols) +
                           " [re, im] entries (row-major)");
    Eigen::MatrixXcd m(rows, cols);
    for (Eigen::Index k = 0; k < rows * cols; ++k) {
        const json& e = j[static_cast<std::size_t>(k)];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            throw config_error(path + "[" + std::to_string(k) + "]: expected [re, im]");
        m(k / cols, k % cols) = std::complex<double>(e[0].get<double>(), e[1].get<double>());
    }
    return m;
}

} // namespace

std::string serialize_mode_space(const ModeSpace& ms) {
    json j;
    j["M"] = ms.modes;
    j["h"] = complex_matrix_to_json(ms.h);
    j["W"] = complex_matrix_to_json(ms.W);
    if (ms.V) j["v"] = complex_matrix_to_json(*ms.V);
    return j.dump();
}

ModeSpace parse_mode_space_json(const json& j, const std::string& path) {
    if (!j.is_object()) throw config_error(path + ": expected an object");
    if (!j.contains("M") || !j["M"].is_number_integer())
        throw config_error(path + ".M: expected an integer mode count");
    const int modes = j["M"].get<int>();
    if (modes < 1 || modes > 16) throw config_error(path + ".M: out of range [1, 16]");
    if (!j.contains("h")) throw config_error(path + ".h: missing");
    Eigen::MatrixXcd h = complex_matrix_from_json(j["h"], modes, modes, path + ".h");

    std::optional<Eigen::MatrixXcd> V;
    if (j.contains("v"))
        V = complex_matrix_from_json(j["v"], modes, modes, path + ".v");

    try {
        if (j.contains("w_pair")) {
            const json& wp = j["w_pair"];
            if (!wp.is_array() || static_cast<int>(wp.size()) != modes * modes)
                throw config_error(path + ".w_pair: expected M*M reals (row-major)");
            Eigen::MatrixXd table(modes, modes);
            for (int k = 0; k < modes * modes; ++k) {
                if (!wp[static_cast<std::size_t>(k)].is_number())
                    throw config_error(path + ".w_pair[" + std::to_string(k) + "]: expected a real number");
                table(k / modes, k % modes) = wp[static_cast<std::size_t>(k)].get<double>();
            }
            return make_mode_space_pair(h, table, std::move(V));
        }
        if (j.contains("W")) {
            const Eigen::Index d2 = sector_dim(modes, 2);
            Eigen::MatrixXcd W = complex_matrix_from_json(j["W"], d2, d2, path + ".W");
            return make_mode_space(h, W, std::move(V));
        }
    } catch (const std::invalid_argument& e) {
        throw config_error(path + ": " + e.what());
    }
    throw config_error(path + ": expected one of w_pair or W");
}

ModeSpace parse_mode_space(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("mode_space: JSON parse error: ") + e.what());
    }
    return parse_mode_space_json(j, "mode_space");
}

} // namespace mfl
