#include "ciph/errors.hpp"

#include <sstream>

namespace ciph {

namespace {

std::string join_checks(const std::vector<std::string>& checks) {
    std::ostringstream out;
    out << "device integrity checks failed:";
    for (const auto& c : checks) out << ' ' << c;
    return out.str();
}

}  // namespace

AuthBlocked::AuthBlocked(std::vector<std::string> checks)
    : Error(join_checks(checks)), failed(std::move(checks)) {}

}  // namespace ciph
