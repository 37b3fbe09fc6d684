#include "rcs/error.hpp"

#include <sstream>

namespace rcs {

namespace {

std::string summarize(const std::vector<ValidationIssue>& issues) {
    std::ostringstream os;
    os << issues.size() << " validation issue(s)";
    for (const auto& i : issues) {
        os << "\n  ";
        if (!i.band.empty()) {
            os << "(band " << i.band << ", theta " << i.theta_deg << ", phi " << i.phi_deg;
            if (!i.scenario.empty()) os << ", " << i.scenario;
            os << ") ";
        }
        os << i.message;
    }
    return os.str();
}

}  // namespace

ValidationError::ValidationError(std::vector<ValidationIssue> issues)
    : Error(summarize(issues)), issues_(std::move(issues)) {}

}  // namespace rcs
