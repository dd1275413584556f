#pragma once

#include <stdexcept>
#include <string>

namespace nldiff
{
    class Error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    /// Invalid caller-supplied parameter (odd M, non-positive tolerance, ...).
    class ParameterError : public Error
    {
    public:
        using Error::Error;
    };

    /// Argument outside the mathematical domain of a function.
    class DomainError : public Error
    {
    public:
        using Error::Error;
    };

    class QuadratureError : public Error
    {
    public:
        QuadratureError(const std::string &what, double estimate, double error_estimate, double tolerance)
            : Error(what), estimate_(estimate), error_estimate_(error_estimate), tolerance_(tolerance)
        {
        }

        double estimate() const { return estimate_; }
        double error_estimate() const { return error_estimate_; }
        double tolerance() const { return tolerance_; }

    private:
        double estimate_;
        double error_estimate_;
        double tolerance_;
    };

    class SingularMatrixError : public Error
    {
    public:
        SingularMatrixError(const std::string &what, double condition_estimate)
            : Error(what), condition_estimate_(condition_estimate)
        {
        }

        double condition_estimate() const { return condition_estimate_; }

    private:
        double condition_estimate_;
    };

    class EigenSolverError : public Error
    {
    public:
        using Error::Error;
    };
} // namespace nldiff
