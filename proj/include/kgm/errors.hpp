#pragma once
// Error taxonomy shared by every solver layer.
//
// Two failure classes matter at process level:
//   PhysicsError   - the requested object does not exist or left its domain
//                    of validity (no ground state, iteration stall, box too
//                    small, ...).  CLI maps these to exit code 2.
//   UsageError     - bad configuration, malformed files, inconsistent
//                    arguments.  CLI maps these to exit code 1.
// Everything else (std::runtime_error from I/O etc.) also maps to 1.

#include <stdexcept>
#include <string>

namespace kgm {

struct PhysicsError : std::runtime_error {
    std::string kind; // stable machine-readable tag, e.g. "NoGroundState"
    PhysicsError(std::string k, const std::string& msg)
        : std::runtime_error(msg), kind(std::move(k)) {}
};

struct UsageError : std::runtime_error {
    std::string key; // offending config key, empty if not key-specific
    explicit UsageError(const std::string& msg, std::string k = "")
        : std::runtime_error(msg), key(std::move(k)) {}
};

inline PhysicsError no_ground_state(const std::string& m)  { return {"NoGroundState", m}; }
inline PhysicsError no_convergence(const std::string& m)   { return {"NoConvergence", m}; }
inline PhysicsError singular_operator(const std::string& m){ return {"SingularOperator", m}; }
inline PhysicsError tail_underflow(const std::string& m)   { return {"TailUnderflow", m}; }
inline PhysicsError box_too_small(const std::string& m)    { return {"BoxTooSmall", m}; }
inline PhysicsError left_stable_set(const std::string& m)  { return {"LeftStableSet", m}; }
inline PhysicsError path_not_monotone(const std::string& m){ return {"PathNotMonotone", m}; }
inline PhysicsError time_range_mismatch(const std::string& m){ return {"TimeRangeMismatch", m}; }

} // namespace kgm
