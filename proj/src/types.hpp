#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dicke3 {

using cplx = std::complex<double>;
using RMatrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;

enum class ErrorCode {
    invalid_argument,
    invalid_state,
    solver_failure,
    io,
};

// Single exception type for the core; the C API maps `code` onto status values.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

// Physical parameters of H = -Δ Jz + ω a†a + (g/2)(a† + a)(J+ + J-).
struct ModelParams {
    double delta{1.0};
    double omega{1.0};
    double g{0.0};

    void validate() const;
};

// Truncated cavity space {|0>, ..., |n_max>}.
struct FockSpace {
    int n_max{40};

    int size() const { return n_max + 1; }
    // spin (4) x Fock, m-major
    int composite_dim() const { return 4 * (n_max + 1); }
};

enum class Method { exact, rwa, zeroth, grwa };

const char* to_string(Method method);
Method method_from_string(const std::string& name);

} // namespace dicke3
