#pragma once

#include <stdexcept>
#include <string>

namespace slowq {

/// Numerical failure inside a solver stage. The stage name is kept separate
/// so front ends can report which step of the pipeline broke down.
class NumericalError : public std::runtime_error {
public:
    NumericalError(std::string stage, const std::string& what)
        : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace slowq
