#pragma once

#include <stdexcept>
#include <string>

namespace gsp {

// Base class for every error raised by the library.
class GspError : public std::runtime_error {
public:
    explicit GspError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed arguments: negative bids, relevance outside (0,1], bad grids.
class InvalidInput : public GspError {
public:
    explicit InvalidInput(const std::string& what) : GspError("invalid input: " + what) {}
};

// Ranking rule cannot price a bidder, e.g. zero score slope at this relevance.
class DegenerateRanking : public GspError {
public:
    explicit DegenerateRanking(const std::string& what)
        : GspError("degenerate ranking: " + what) {}
};

// Operation requires a score of the form (g(w)b - h(w))+, which this spec lacks.
class UnsupportedRanking : public GspError {
public:
    explicit UnsupportedRanking(const std::string& what)
        : GspError("unsupported ranking: " + what) {}
};

// Virtual value is undefined at the requested point.
class UndefinedVirtualValue : public GspError {
public:
    explicit UndefinedVirtualValue(const std::string& what)
        : GspError("undefined virtual value: " + what) {}
};

// The virtual value has no usable root on the support.
class NoRoot : public GspError {
public:
    explicit NoRoot(const std::string& what) : GspError("no root: " + what) {}
};

// The dominance side condition cannot be evaluated for this distribution.
class ConditionInapplicable : public GspError {
public:
    explicit ConditionInapplicable(const std::string& what)
        : GspError("condition inapplicable: " + what) {}
};

// The revenue bound is not defined for this distribution.
class BoundUnavailable : public GspError {
public:
    explicit BoundUnavailable(const std::string& what)
        : GspError("bound unavailable: " + what) {}
};

// An operation precondition does not hold for the given instance.
class PreconditionViolated : public GspError {
public:
    explicit PreconditionViolated(const std::string& what)
        : GspError("precondition violated: " + what) {}
};

// Bad experiment or CLI configuration.
class ConfigError : public GspError {
public:
    explicit ConfigError(const std::string& what) : GspError("config error: " + what) {}
};

}  // namespace gsp
