#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hamiltonians.hpp"

namespace dicke3 {

// Complete eigen-solution of one method. Vectors are columns expressed in the
// rotated-frame composite basis, paired with `energies` (ascending).
struct EigenSystem {
    Method method{Method::exact};
    ModelParams params;
    FockSpace fock;
    RVector energies;
    CMatrix vectors;
    // Weight each vector lost beyond n_max when mapped back from the displaced
    // frame (zero for exact and rwa).
    RVector tail_mass;

    int size() const { return static_cast<int>(energies.size()); }
};

struct HermitianEig {
    RVector values;  // ascending
    CMatrix vectors; // orthonormal columns
};

HermitianEig dense_hermitian_eig(const CMatrix& m);

EigenSystem solve(Method method, const ModelParams& params, const FockSpace& fock);

// Sorted energies only; skips the eigenvector frame mapping.
RVector solve_energies(Method method, const ModelParams& params, const FockSpace& fock);

struct LevelTable {
    std::vector<double> g_values;
    std::vector<Method> methods; // methods[0] is always exact
    int k_levels{0};
    // energies[(gi * methods.size() + mi) * k_levels + level]
    std::vector<double> energies;
    // per grid point: empty on success, otherwise the failure message
    std::vector<std::string> failures;

    double at(std::size_t gi, std::size_t mi, int level) const {
        return energies[(gi * methods.size() + mi) * k_levels + level];
    }
    bool ok() const;
};

// Lowest k_levels energies per grid point and method. A failing point is
// recorded in `failures` (with its g value) rather than aborting the sweep.
LevelTable level_sweep(const std::vector<Method>& methods, const ModelParams& params_template,
                       const std::vector<double>& g_grid, int k_levels, const FockSpace& fock,
                       unsigned threads = 1);

} // namespace dicke3
