#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fpprop/coefficients.hpp"
#include "fpprop/gaussian.hpp"
#include "fpprop/propagator.hpp"

namespace fpprop {

/// Parse failure with the 1-based line of the offending node (-1 when the
/// location is unknown).
class spec_parse_error : public std::runtime_error {
public:
    spec_parse_error(const std::string& msg, int line)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

struct OutputSpec {
    std::vector<double> times;
    std::optional<RegularGrid> grid;
    std::vector<Eigen::VectorXd> points;

    std::vector<Eigen::VectorXd> evaluation_points() const;
};

/// A problem file: dimension, horizon, coefficients in exactly one of the
/// two forms, initial data, and the requested outputs.
struct ProblemSpec {
    int spec_version = 1;
    int dim = 1;
    double horizon = 1.0;
    std::optional<CoefficientSet> paper;
    std::optional<FpeCoefficients> fpe;
    InitialData initial;
    OutputSpec output;

    bool is_fpe_form() const { return fpe.has_value(); }
    /// The four-coefficient set, adapting the drift/diffusion form if needed.
    CoefficientSet coefficient_set() const;
    /// Cross-field validation; throws std::invalid_argument on violation.
    void validate() const;
};

ProblemSpec parse_problem_string(const std::string& text);
ProblemSpec parse_problem_file(const std::string& path);
std::string serialize_problem(const ProblemSpec& spec);

}  // namespace fpprop
