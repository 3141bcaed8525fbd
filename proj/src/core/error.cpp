#include "core/error.hpp"

namespace nowcast {

std::string Issue::str() const {
    std::string out = source;
    if (row > 0) {
        out += ":" + std::to_string(row);
    }
    if (!column.empty()) {
        out += " [" + column + "]";
    }
    if (!out.empty()) {
        out += ": ";
    }
    return out + message;
}

namespace {

std::string join_issues(const std::vector<Issue> &issues) {
    std::string out;
    for (const auto &issue : issues) {
        if (!out.empty()) {
            out += '\n';
        }
        out += issue.str();
    }
    return out;
}

} // namespace

ValidationError::ValidationError(std::vector<Issue> issues)
    : Error(join_issues(issues)), issues_(std::move(issues)) {}

ValidationError::ValidationError(const std::string &message)
    : Error(message), issues_{Issue{"", 0, "", message}} {}

} // namespace nowcast
