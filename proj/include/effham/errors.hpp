#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace effham {

/// Base of every library error. `code()` is a stable machine-readable tag
/// used by the CLI error JSON.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> violations)
        : Error("ConfigError", join(violations)), violations_(std::move(violations)) {}
    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out;
        for (const auto& s : v) out += (out.empty() ? "" : "; ") + s;
        return out;
    }
    std::vector<std::string> violations_;
};

class UnknownName : public Error {
public:
    explicit UnknownName(const std::string& what) : Error("UnknownName", what) {}
};

class MissingLipschitzConstant : public Error {
public:
    explicit MissingLipschitzConstant(const std::string& what)
        : Error("MissingLipschitzConstant", what) {}
};

class NumericalLimitUnstable : public Error {
public:
    explicit NumericalLimitUnstable(const std::string& what)
        : Error("NumericalLimitUnstable", what) {}
};

class NonCoercive : public Error {
public:
    explicit NonCoercive(const std::string& what) : Error("NonCoercive", what) {}
};

class InnerIterationDiverged : public Error {
public:
    InnerIterationDiverged(const std::string& what, double defect)
        : Error("InnerIterationDiverged", what), defect_(defect) {}
    double defect() const noexcept { return defect_; }

private:
    double defect_;
};

class IrrationalSlope : public Error {
public:
    explicit IrrationalSlope(const std::string& what) : Error("IrrationalSlope", what) {}
};

class GridTooCoarse : public Error {
public:
    explicit GridTooCoarse(const std::string& what) : Error("GridTooCoarse", what) {}
};

class OutOfHull : public Error {
public:
    OutOfHull(const std::string& what, std::size_t nearest_vertex)
        : Error("OutOfHull", what), nearest_(nearest_vertex) {}
    std::size_t nearest_vertex() const noexcept { return nearest_; }

private:
    std::size_t nearest_;
};

class GradientOutOfHull : public Error {
public:
    GradientOutOfHull(const std::string& what, std::vector<double> slope)
        : Error("GradientOutOfHull", what), slope_(std::move(slope)) {}
    const std::vector<double>& slope() const noexcept { return slope_; }

private:
    std::vector<double> slope_;
};

class IncompatiblePeriods : public Error {
public:
    explicit IncompatiblePeriods(const std::string& what) : Error("IncompatiblePeriods", what) {}
};

/// Malformed table/grid file. `line()` is 0 when no line is attributable.
class FormatError : public Error {
public:
    FormatError(const std::string& what, std::size_t line)
        : Error("FormatError", what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error("IoError", what) {}
};

}  // namespace effham
