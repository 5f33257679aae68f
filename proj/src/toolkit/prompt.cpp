#include <algorithm>

#include "climagent/core/error.hpp"
#include "climagent/toolkit/observation.hpp"

namespace climagent::toolkit {

std::string render_tool_prompt(const ToolRegistry& registry) {
    if (registry.empty()) throw Error(ErrorCode::InvalidArgument, "cannot render an empty registry");
    auto sigs = registry.signatures();  // already name-ordered
    std::string out = "Available tools, grouped by category.\n";
    for (auto category : kCategoryOrder) {
        bool header = false;
        for (const auto* sig : sigs) {
            if (sig->category != category) continue;
            if (!header) {
                out += "\n## ";
                out += category_title(category);
                out += "\n";
                header = true;
            }
            out += "- " + sig->name + "(";
            for (std::size_t k = 0; k < sig->params.size(); ++k) {
                const auto& p = sig->params[k];
                if (k) out += ", ";
                out += p.name;
                if (!p.required) out += "?";
                out += ": ";
                out += to_string(p.type);
            }
            out += ") -> ";
            out += to_string(sig->returns);
            out += "\n  " + sig->description + "\n";
        }
    }
    return out;
}

}  // namespace climagent::toolkit
