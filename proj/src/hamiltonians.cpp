#include "hamiltonians.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace dicke3 {

namespace {

const double sqrt3 = std::sqrt(3.0);

double sign_of(double x) { return x < 0.0 ? -1.0 : 1.0; }

void require_grwa_cutoff(const FockSpace& fock) {
    if (fock.n_max < 3)
        fail(ErrorCode::invalid_argument, "n_max must be at least 3 (got " + std::to_string(fock.n_max) + ")");
}

// <m+1| J+ |m>
double jplus_element(double m) { return std::sqrt(3.75 - m * (m + 1.0)); }

} // namespace

RMatrix build_full(const ModelParams& params, const FockSpace& fock, Frame frame) {
    params.validate();
    const SpinMatrices s = spin_matrices();
    const BosonMatrices b = boson_matrices(fock);
    const RMatrix id_spin = RMatrix::Identity(spin_dim, spin_dim);
    const RMatrix id_fock = RMatrix::Identity(fock.size(), fock.size());
    const RMatrix x = b.a + b.a_dagger;

    RMatrix h = params.omega * tensor_lift(id_spin, b.number);
    if (frame == Frame::rotated) {
        h += params.delta * tensor_lift(s.jx, id_fock);
        h += params.g * tensor_lift(s.jz, x);
    } else {
        h -= params.delta * tensor_lift(s.jz, id_fock);
        h += params.g * tensor_lift(s.jx, x);
    }
    return h;
}

double coeff_G0(int n, const ModelParams& params) {
    const double x = (params.g / params.omega) * (params.g / params.omega);
    return std::exp(-0.5 * x) * laguerre_assoc(n, 0, x);
}

double coeff_R(int n, const ModelParams& params) {
    const double r = params.g / params.omega;
    return r * std::exp(-0.5 * r * r) * laguerre_assoc(n, 1, r * r) / (n + 1.0);
}

ZerothCoefficients zeroth_coefficients(int n, const ModelParams& params) {
    if (n < 0) fail(ErrorCode::invalid_argument, "manifold index must be non-negative");
    ZerothCoefficients z;
    const double x = params.g * params.g / params.omega;
    const double B = params.delta * coeff_G0(n, params);
    z.B = B;
    z.chi[0] = std::sqrt(x * x / 4.0 - x * B / 4.0 + B * B / 4.0);
    z.chi[1] = std::sqrt(x * x / 4.0 + x * B / 4.0 + B * B / 4.0);

    const double base = params.omega * n - 1.25 * x;
    z.epsilon = {base - B / 2.0 - 2.0 * z.chi[0], base + B / 2.0 - 2.0 * z.chi[1],
                 base - B / 2.0 + 2.0 * z.chi[0], base + B / 2.0 + 2.0 * z.chi[1]};

    // Rationalized K_1, K_2; the direct form divides by sqrt(3) B and cancels
    // catastrophically as B -> 0. Both denominators vanish only when g = B = 0.
    const double d1 = 4.0 * z.chi[0] + 2.0 * x - B;
    const double d2 = 4.0 * z.chi[1] + 2.0 * x + B;
    const double k1 = d1 > 0.0 ? sqrt3 * B / d1 : 0.0;
    const double k2 = d2 > 0.0 ? sqrt3 * B / d2 : 0.0;
    z.K = {k1, k2, -1.0 / k1, -1.0 / k2};

    const double c1 = std::sqrt(2.0 + 2.0 * k1 * k1);
    const double c2 = std::sqrt(2.0 + 2.0 * k2 * k2);
    z.vectors[0] = Eigen::Vector4d(-1.0, k1, -k1, 1.0) / c1;
    z.vectors[1] = Eigen::Vector4d(1.0, -k2, -k2, 1.0) / c2;
    // (-1, K3, -K3, 1) and (1, -K4, -K4, 1) rescaled by K1, K2
    z.vectors[2] = sign_of(k1) * Eigen::Vector4d(-k1, -1.0, 1.0, k1) / c1;
    z.vectors[3] = sign_of(k2) * Eigen::Vector4d(k2, 1.0, 1.0, k2) / c2;
    return z;
}

std::pair<BlockHamiltonian, ZerothCoefficients> zeroth_block(int n, const ModelParams& params) {
    params.validate();
    ZerothCoefficients z = zeroth_coefficients(n, params);
    const double x = params.g * params.g / params.omega;
    const double off = 0.5 * sqrt3 * z.B;

    BlockHamiltonian block;
    block.method = Method::zeroth;
    block.labels = {{-3, n}, {-1, n}, {1, n}, {3, n}};
    block.matrix = RMatrix::Zero(4, 4);
    block.matrix.diagonal() << params.omega * n - 2.25 * x, params.omega * n - 0.25 * x,
        params.omega * n - 0.25 * x, params.omega * n - 2.25 * x;
    block.matrix(0, 1) = block.matrix(1, 0) = off;
    block.matrix(1, 2) = block.matrix(2, 1) = z.B;
    block.matrix(2, 3) = block.matrix(3, 2) = off;
    return {std::move(block), std::move(z)};
}

GrwaCoefficients grwa_coefficients(const ModelParams& params) {
    params.validate();
    const ZerothCoefficients z = zeroth_coefficients(0, params);
    GrwaCoefficients c;
    const double r = params.g / params.omega;
    c.beta = std::exp(-0.5 * r * r);
    c.K = z.K;
    c.epsilon0 = z.epsilon;
    const double k1 = z.K[0], k2 = z.K[1];
    const double c1 = std::sqrt(2.0 + 2.0 * k1 * k1);
    const double c2 = std::sqrt(2.0 + 2.0 * k2 * k2);
    c.C = {c1, c2, c1 / std::abs(k1), c2 / std::abs(k2)};
    for (int i = 0; i < 4; ++i) c.S.col(i) = z.vectors[i];

    // Coupling factors with K3 = -1/K1, K4 = -1/K2 substituted so they
    // stay finite at B = 0.
    const double s1 = sign_of(k1), s2 = sign_of(k2);
    c.coupling[0] = (-sqrt3 * k2 + k1 * (sqrt3 + 2.0 * k2)) / (c1 * c2);
    c.coupling[1] = s1 * (sqrt3 + sqrt3 * k1 * k2 + 2.0 * k2) / (c1 * c2);
    c.coupling[2] = s1 * s2 * (sqrt3 * k1 - sqrt3 * k2 + 2.0) / (c1 * c2);
    return c;
}

double GrwaCoefficients::mu(int level, int n, const ModelParams& params) const {
    const double k1 = K[0], k2 = K[1];
    const double c1sq = C[0] * C[0], c2sq = C[1] * C[1];
    double f = 0.0;
    switch (level) {
    case 1: f = 2.0 * k1 * (sqrt3 + k1) / c1sq; break;
    case 2: f = 2.0 * k2 * (sqrt3 - k2) / c2sq; break;
    case 3: f = (2.0 - 2.0 * sqrt3 * k1) / c1sq; break;
    case 4: f = (-2.0 - 2.0 * sqrt3 * k2) / c2sq; break;
    default: fail(ErrorCode::invalid_argument, "GRWA level must be 1..4");
    }
    return epsilon0[level - 1] - params.delta * (coeff_G0(n, params) - beta) * f;
}

double GrwaCoefficients::r_prime(int level, int q, const ModelParams& params) const {
    if (level < 1 || level > 3) fail(ErrorCode::invalid_argument, "GRWA hop level must be 1..3");
    return coupling[level - 1] * coeff_R(q, params) * std::sqrt(q + 1.0);
}

std::pair<std::vector<BlockHamiltonian>, GrwaCoefficients> grwa_blocks(const ModelParams& params,
                                                                       const FockSpace& fock) {
    require_grwa_cutoff(fock);
    GrwaCoefficients coeffs = grwa_coefficients(params);
    std::vector<BlockHamiltonian> blocks;
    // Block b holds |i>|b - i + 1>, i = 1..4; b = n + 2 in the generic 4x4 form.
    for (int b = 0; b <= fock.n_max + 3; ++b) {
        BlockHamiltonian block;
        block.method = Method::grwa;
        std::vector<int> levels;
        for (int i = 1; i <= 4; ++i) {
            const int p = b - i + 1;
            if (p < 0 || p > fock.n_max) continue;
            block.labels.push_back({2 * i - 5, p});
            levels.push_back(i);
        }
        const int d = block.size();
        block.matrix = RMatrix::Zero(d, d);
        for (int r = 0; r < d; ++r) {
            const int p = block.labels[r].n;
            block.matrix(r, r) = params.omega * p + coeffs.mu(levels[r], p, params);
            if (r + 1 < d) {
                const double hop = params.delta * coeffs.r_prime(levels[r], p - 1, params);
                block.matrix(r, r + 1) = block.matrix(r + 1, r) = hop;
            }
        }
        blocks.push_back(std::move(block));
    }
    return {std::move(blocks), std::move(coeffs)};
}

std::vector<BlockHamiltonian> zeroth_blocks(const ModelParams& params, const FockSpace& fock) {
    std::vector<BlockHamiltonian> blocks;
    blocks.reserve(fock.size());
    for (int n = 0; n <= fock.n_max; ++n) blocks.push_back(zeroth_block(n, params).first);
    return blocks;
}

std::vector<BlockHamiltonian> rwa_blocks(const ModelParams& params, const FockSpace& fock) {
    params.validate();
    require_grwa_cutoff(fock);
    std::vector<BlockHamiltonian> blocks;
    // Block b holds |m = k - 3/2>|b - k>, k = 0..3.
    for (int b = 0; b <= fock.n_max + 3; ++b) {
        BlockHamiltonian block;
        block.method = Method::rwa;
        for (int k = 0; k <= 3; ++k) {
            const int p = b - k;
            if (p < 0 || p > fock.n_max) continue;
            block.labels.push_back({2 * k - 3, p});
        }
        const int d = block.size();
        block.matrix = RMatrix::Zero(d, d);
        for (int r = 0; r < d; ++r) {
            const double m = 0.5 * block.labels[r].twice_m;
            const int p = block.labels[r].n;
            block.matrix(r, r) = params.omega * p - params.delta * m;
            if (r + 1 < d) {
                // (g/2) a J+ takes |m>|p> to |m+1>|p-1>
                const double t = 0.5 * params.g * std::sqrt(double(p)) * jplus_element(m);
                block.matrix(r, r + 1) = block.matrix(r + 1, r) = t;
            }
        }
        blocks.push_back(std::move(block));
    }
    return blocks;
}

RMatrix assemble(const std::vector<BlockHamiltonian>& blocks, const FockSpace& fock) {
    RMatrix h = RMatrix::Zero(fock.composite_dim(), fock.composite_dim());
    for (const auto& block : blocks) {
        for (int r = 0; r < block.size(); ++r) {
            const int i = composite_index(fock, spin_index(block.labels[r].twice_m), block.labels[r].n);
            for (int c = 0; c < block.size(); ++c) {
                const int j = composite_index(fock, spin_index(block.labels[c].twice_m), block.labels[c].n);
                h(i, j) += block.matrix(r, c);
            }
        }
    }
    return h;
}

void check_partition(const std::vector<BlockHamiltonian>& blocks, const FockSpace& fock) {
    std::vector<int> seen(fock.composite_dim(), 0);
    for (const auto& block : blocks) {
        for (const auto& label : block.labels) {
            if (label.n < 0 || label.n > fock.n_max || std::abs(label.twice_m) > 3 || label.twice_m % 2 == 0)
                fail(ErrorCode::invalid_state, "block label outside the composite basis");
            ++seen[composite_index(fock, spin_index(label.twice_m), label.n)];
        }
    }
    for (int v : seen)
        if (v != 1) fail(ErrorCode::invalid_state, "block labels do not partition the composite basis");
}

} // namespace dicke3
