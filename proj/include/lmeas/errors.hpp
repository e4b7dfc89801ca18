#pragma once

#include <stdexcept>
#include <string>

namespace lmeas {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatchError : Error {
    using Error::Error;
};

struct NotMeasurableError : Error {
    using Error::Error;
};

struct NotStationaryError : Error {
    using Error::Error;
};

struct NoSuchMapError : Error {
    using Error::Error;
};

struct NoClosedFormTailError : Error {
    using Error::Error;
};

struct UnsupportedCombinationError : Error {
    using Error::Error;
};

struct SelectionError : Error {
    SelectionError(const std::string& msg, unsigned long long blocking)
        : Error(msg), blocking_index(blocking) {}
    unsigned long long blocking_index;
};

struct HypothesisError : Error {
    HypothesisError(const std::string& hypothesis, const std::string& detail)
        : Error("hypothesis failed: " + hypothesis + (detail.empty() ? "" : " (" + detail + ")")),
          name(hypothesis) {}
    std::string name;
};

struct ConstructionError : Error {
    using Error::Error;
};

struct ParseError : Error {
    ParseError(const std::string& msg, std::size_t offset)
        : Error(msg + " at offset " + std::to_string(offset)), where(offset) {}
    std::size_t where;
};

} // namespace lmeas
