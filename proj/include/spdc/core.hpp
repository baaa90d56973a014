#pragma once

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace spdc {

template <typename Scalar> using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar> using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Complex = std::complex<double>;
using MatrixXd = MatrixX<double>;
using MatrixXc = MatrixX<Complex>;
using VectorXd = VectorX<double>;

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double wavelength_to_omega(double lambda_m) { return kTwoPi * kSpeedOfLight / lambda_m; }
inline double omega_to_wavelength(double omega) { return kTwoPi * kSpeedOfLight / omega; }

// Error taxonomy. Every domain failure derives from spdc::Error so callers
// (notably the CLI) can map categories onto exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OutOfRange : public Error {
public:
    using Error::Error;
};

class ModeCutoff : public Error {
public:
    using Error::Error;
};

class DegenerateMismatch : public Error {
public:
    using Error::Error;
};

class DegenerateKernel : public Error {
public:
    using Error::Error;
};

class ZeroVariance : public Error {
public:
    using Error::Error;
};

/// Raised when a delay is too large for the frequency grid to resolve the
/// interferometer fringes without aliasing.
class AliasRisk : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

}  // namespace spdc
