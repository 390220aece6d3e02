#include "apiguard/api_spec.hpp"

#include <sstream>

#include "apiguard/errors.hpp"

namespace apiguard {

bool ApiSpec::matches(const std::string& label) const {
    std::size_t dot = label.find('.');
    if (dot == std::string::npos) return false;
    std::string type = label.substr(0, dot);
    if (!types.count(type)) return false;
    if (methods.empty() || methods.count(label)) return true;
    // a type listed without explicit members keeps all of them
    auto it = methods.lower_bound(type + ".");
    bool narrowed = it != methods.end() && it->rfind(type + ".", 0) == 0;
    return !narrowed;
}

ApiSpec parse_api_spec(const std::string& text, const std::string& name) {
    ApiSpec spec;
    spec.name = name;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        std::size_t e = line.find_last_not_of(" \t\r");
        std::string entry = line.substr(b, e - b + 1);
        std::size_t dot = entry.find('.');
        if (dot == std::string::npos) {
            spec.types.insert(entry);
        } else {
            spec.types.insert(entry.substr(0, dot));
            spec.methods.insert(entry);
        }
    }
    if (spec.types.empty()) throw ConfigError("API spec '" + name + "' lists no types");
    return spec;
}

std::string render_api_spec(const ApiSpec& spec) {
    std::ostringstream out;
    if (spec.methods.empty()) {
        for (const std::string& t : spec.types) out << t << "\n";
    } else {
        for (const std::string& m : spec.methods) out << m << "\n";
        // types without an explicit member entry keep all members
        for (const std::string& t : spec.types) {
            bool hasMember = false;
            for (const std::string& m : spec.methods)
                if (m.rfind(t + ".", 0) == 0) hasMember = true;
            if (!hasMember) out << t << "\n";
        }
    }
    return out.str();
}

} // namespace apiguard
