#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "climagent/core/time.hpp"
#include "climagent/core/types.hpp"
#include "climagent/toolkit/call.hpp"
#include "climagent/toolkit/signature.hpp"

namespace climagent::toolkit {

/// Validated, typed view of a call's arguments handed to executors.
class ArgView {
public:
    ArgView(const ToolSignature& sig, const ToolCall& call) : sig_(&sig), call_(&call) {}

    bool has(std::string_view name) const;
    double real(std::string_view name) const;
    long long integer(std::string_view name) const;
    long long integer_or(std::string_view name, long long fallback) const;
    const std::string& string(std::string_view name) const;
    core::Date date(std::string_view name) const;
    core::GeoPoint geopoint(std::string_view name) const;
    /// GeoPoint from the conventional lat/lon parameter pair.
    core::GeoPoint lat_lon() const;

private:
    const std::string& raw(std::string_view name) const;
    const ToolSignature* sig_;
    const ToolCall* call_;
};

/// What an executor hands back before envelope construction. Quantities in
/// the payload may be in source units; `execute` normalizes them.
struct ToolOutput {
    nlohmann::json payload;
    std::optional<std::pair<std::string, std::string>> timespan;  // ISO start/end
    std::optional<core::GeoPoint> location;
    std::optional<double> uncertainty;
};

using Executor = std::function<ToolOutput(const ArgView&)>;

struct ToolBinding {
    ToolSignature signature;
    Executor executor;
    std::chrono::milliseconds timeout{30000};
    /// Executor cannot tolerate concurrent invocation.
    bool serialized = false;
};

/// Immutable set of signatures, each bound to exactly one executor.
class ToolRegistry {
public:
    class Builder {
    public:
        Builder& add(ToolBinding binding);
        Builder& set_timeout(std::string_view tool, std::chrono::milliseconds timeout);
        ToolRegistry build();

    private:
        std::vector<ToolBinding> bindings_;
    };

    ToolRegistry() = default;

    const ToolSignature* find(std::string_view name) const;
    const ToolBinding* binding(std::string_view name) const;
    std::vector<const ToolSignature*> signatures() const;  // name order
    std::size_t size() const noexcept;
    bool empty() const noexcept { return size() == 0; }

    /// Registry view holding only the named tools (unknown names ignored).
    ToolRegistry subset(const std::set<std::string>& names) const;
    ToolRegistry restricted_to(const std::set<Category>& categories) const;

    /// Lock guarding a serialized executor; null for concurrent-safe ones.
    std::shared_ptr<std::mutex> serialization_lock(std::string_view name) const;

private:
    struct Entry {
        ToolBinding binding;
        std::shared_ptr<std::mutex> lock;
    };
    using EntryMap = std::map<std::string, std::shared_ptr<const Entry>, std::less<>>;
    explicit ToolRegistry(std::shared_ptr<const EntryMap> entries) : entries_(std::move(entries)) {}

    std::shared_ptr<const EntryMap> entries_;
};

}  // namespace climagent::toolkit
