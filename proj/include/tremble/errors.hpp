#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tremble {

/// Coarse classification used by the command-line front end to pick exit codes.
enum class ErrorKind {
    Input,     // malformed or inconsistent user input
    Internal,  // broken invariant inside the pipeline
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class InputError : public Error {
public:
    explicit InputError(const std::string& what) : Error(ErrorKind::Input, what) {}
};

class InternalError : public Error {
public:
    explicit InternalError(const std::string& what) : Error(ErrorKind::Internal, what) {}
};

// ---- formulas -------------------------------------------------------------

class SyntaxError : public InputError {
public:
    SyntaxError(std::size_t offset, std::vector<std::string> expected, const std::string& found)
        : InputError(format(offset, expected, found)), offset_(offset), expected_(std::move(expected)) {}

    std::size_t offset() const noexcept { return offset_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    static std::string format(std::size_t offset, const std::vector<std::string>& expected,
                              const std::string& found) {
        std::string msg = "syntax error at byte " + std::to_string(offset) + ": found " + found + ", expected one of {";
        for (std::size_t i = 0; i < expected.size(); ++i) {
            msg += (i ? ", " : "") + expected[i];
        }
        return msg + "}";
    }

    std::size_t offset_;
    std::vector<std::string> expected_;
};

class UnknownAtom : public InputError {
public:
    explicit UnknownAtom(std::string name)
        : InputError("unknown atom '" + name + "'"), name_(std::move(name)) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class EmptyTrace : public InputError {
public:
    EmptyTrace() : InputError("trace must be nonempty") {}
};

class AlphabetTooLarge : public InputError {
public:
    AlphabetTooLarge(std::size_t props, std::size_t limit)
        : InputError("alphabet over " + std::to_string(props) + " propositions exceeds the limit of " +
                     std::to_string(limit)) {}
};

class StateLimitExceeded : public InputError {
public:
    explicit StateLimitExceeded(std::size_t limit)
        : InputError("automaton exceeds the state limit of " + std::to_string(limit)) {}
};

// ---- domains --------------------------------------------------------------

class SchemaError : public InputError {
public:
    SchemaError(const std::string& field, const std::string& location)
        : InputError("schema error: field '" + field + "' at " + location) {}
};

class DanglingStateRef : public InputError {
public:
    DanglingStateRef(long id, std::size_t count)
        : InputError("state id " + std::to_string(id) + " out of range (" + std::to_string(count) + " states)") {}
};

class EmptyApplicableSet : public InputError {
public:
    explicit EmptyApplicableSet(std::size_t state)
        : InputError("state " + std::to_string(state) + " has no applicable action") {}
};

class EmptySuccessorSet : public InputError {
public:
    EmptySuccessorSet(std::size_t state, std::size_t action)
        : InputError("empty successor set at (" + std::to_string(state) + ", " + std::to_string(action) + ")") {}
};

class MissingRow : public InputError {
public:
    MissingRow(std::size_t state, std::size_t action)
        : InputError("error model has no row for (" + std::to_string(state) + ", " + std::to_string(action) + ")") {}
};

class InvalidModel : public InputError {
public:
    explicit InvalidModel(const std::string& what) : InputError(what) {}
};

// ---- solver / simulator ---------------------------------------------------

class EmptyRelevantRegion : public InputError {
public:
    EmptyRelevantRegion() : InputError("initial product state cannot reach the goal") {}
};

class InstanceTooLarge : public InputError {
public:
    explicit InstanceTooLarge(const std::string& what) : InputError("instance too large for brute force: " + what) {}
};

class IllegalObservation : public InputError {
public:
    IllegalObservation(std::size_t state, std::size_t observed)
        : InputError("state " + std::to_string(observed) + " is not a possible successor of " +
                     std::to_string(state)) {}
    explicit IllegalObservation(const std::string& what) : InputError(what) {}
};

class StrategyGap : public InternalError {
public:
    StrategyGap(std::size_t state, const std::string& q)
        : InternalError("strategy has no entry for product state (" + std::to_string(state) + ", " + q + ")") {}
};

}  // namespace tremble
