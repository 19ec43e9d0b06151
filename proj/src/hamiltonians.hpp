#pragma once

// Hamiltonian representations of the three-qubit Dicke model.
//
//   original frame:  H = -Δ Jz + ω a†a + (g/2)(a† + a)(J+ + J-)
//   rotated frame:   H = Δ Jx + ω a†a + g (a† + a) Jz
//
// The zeroth-order and GRWA Hamiltonians live in the displaced frame
// H' = U H_rotated U†, U = exp[(g/ω) Jz (a† - a)].  Their block matrices use
// the conventional ascending row order |-3/2>, |-1/2>, |1/2>, |3/2>; each row
// carries an explicit (2m, n) label. For GRWA the "m" of a label names the
// dressed qubit level i = m + 5/2 (a column of S), not a Jz eigenstate.

#include <array>
#include <compare>
#include <utility>
#include <vector>

#include "hilbert.hpp"

namespace dicke3 {

enum class Frame { original, rotated };

RMatrix build_full(const ModelParams& params, const FockSpace& fock, Frame frame);

// G0(n) = <n| cosh[(g/ω)(a† - a)] |n> = e^{-g²/2ω²} L_n(g²/ω²)
double coeff_G0(int n, const ModelParams& params);

// R_{n+1,n} = <n+1| sinh[(g/ω)(a† - a)] |n> / sqrt(n+1)
double coeff_R(int n, const ModelParams& params);

struct BasisLabel {
    int twice_m;
    int n;

    auto operator<=>(const BasisLabel&) const = default;
};

struct BlockHamiltonian {
    Method method;
    std::vector<BasisLabel> labels;
    RMatrix matrix;

    int size() const { return static_cast<int>(labels.size()); }
};

// Analytic eigen-solution of one zeroth-order manifold. Index i = 0..3 holds
// label i+1. K[2], K[3] are -1/K[0], -1/K[1] and become infinite when B = 0;
// `vectors` stay finite (the analytic limit).
struct ZerothCoefficients {
    double B{0.0};
    std::array<double, 2> chi{};
    std::array<double, 4> K{};
    std::array<double, 4> epsilon{};
    std::array<Eigen::Vector4d, 4> vectors; // normalized, ascending-m rows
};

ZerothCoefficients zeroth_coefficients(int n, const ModelParams& params);
std::pair<BlockHamiltonian, ZerothCoefficients> zeroth_block(int n, const ModelParams& params);

struct GrwaCoefficients {
    double beta{1.0};
    std::array<double, 4> K{};
    std::array<double, 4> C{};
    std::array<double, 4> epsilon0{};
    Eigen::Matrix4d S;                 // columns: dressed levels 1..4, rows ascending m
    std::array<double, 3> coupling{};  // renormalized factors for the (1,2), (2,3), (3,4) hops

    // mu_i(n) for level = 1..4
    double mu(int level, int n, const ModelParams& params) const;
    // R' between |level>|q+1> and |level+1>|q>, level = 1..3 (excludes the Δ factor)
    double r_prime(int level, int q, const ModelParams& params) const;
};

GrwaCoefficients grwa_coefficients(const ModelParams& params);

std::pair<std::vector<BlockHamiltonian>, GrwaCoefficients> grwa_blocks(const ModelParams& params,
                                                                       const FockSpace& fock);

std::vector<BlockHamiltonian> zeroth_blocks(const ModelParams& params, const FockSpace& fock);

// Blocks of H_RWA = -Δ Jz + ω a†a + (g/2)(a† J- + a J+) in the original frame.
std::vector<BlockHamiltonian> rwa_blocks(const ModelParams& params, const FockSpace& fock);

// Dense matrix of a block family on the composite basis of its own frame.
RMatrix assemble(const std::vector<BlockHamiltonian>& blocks, const FockSpace& fock);

// Throws unless every composite label occurs in exactly one block.
void check_partition(const std::vector<BlockHamiltonian>& blocks, const FockSpace& fock);

} // namespace dicke3
