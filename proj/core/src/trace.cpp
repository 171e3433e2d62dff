#include "lsopt/trace.hpp"

#include <stdexcept>

namespace lsopt {

const char* to_string(TerminationReason reason) {
    switch (reason) {
        case TerminationReason::MaxIterations: return "max_iterations";
        case TerminationReason::Precision: return "precision";
        case TerminationReason::Stationary: return "stationary";
        case TerminationReason::CapExceeded: return "cap_exceeded";
        case TerminationReason::Diverged: return "diverged";
    }
    return "?";
}

TerminationReason termination_from_string(const std::string& text) {
    if (text == "max_iterations") return TerminationReason::MaxIterations;
    if (text == "precision") return TerminationReason::Precision;
    if (text == "stationary") return TerminationReason::Stationary;
    if (text == "cap_exceeded") return TerminationReason::CapExceeded;
    if (text == "diverged") return TerminationReason::Diverged;
    throw std::invalid_argument("unknown termination reason: " + text);
}

const std::string* RunTrace::annotation(const std::string& key) const {
    for (const auto& [k, v] : annotations)
        if (k == key) return &v;
    return nullptr;
}

void RunTrace::annotate(std::string key, std::string value) {
    for (auto& [k, v] : annotations)
        if (k == key) {
            v = std::move(value);
            return;
        }
    annotations.emplace_back(std::move(key), std::move(value));
}

} // namespace lsopt
