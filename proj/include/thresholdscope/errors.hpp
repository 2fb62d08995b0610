#pragma once

#include <stdexcept>
#include <string>

namespace ts {

// Bad input: parameters outside the documented domain of an operation.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A numerical stage did not converge or could not produce a result.
struct SolverError : std::runtime_error {
    SolverError(const std::string& stage, const std::string& what)
        : std::runtime_error(stage + ": " + what), stage_(stage) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

}  // namespace ts
