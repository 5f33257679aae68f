#include "climagent/toolkit/registry.hpp"

#include <charconv>

#include "climagent/core/error.hpp"

namespace climagent::toolkit {

const std::string& ArgView::raw(std::string_view name) const {
    auto it = call_->args.find(std::string(name));
    if (it == call_->args.end())
        throw Error(ErrorCode::InvalidArgument, "missing argument '" + std::string(name) + "'");
    return it->second;
}

bool ArgView::has(std::string_view name) const { return call_->args.count(std::string(name)) != 0; }

double ArgView::real(std::string_view name) const {
    const auto& s = raw(name);
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw Error(ErrorCode::InvalidArgument, "argument '" + std::string(name) + "' is not a real");
    return v;
}

long long ArgView::integer(std::string_view name) const {
    const auto& s = raw(name);
    long long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw Error(ErrorCode::InvalidArgument, "argument '" + std::string(name) + "' is not an integer");
    return v;
}

long long ArgView::integer_or(std::string_view name, long long fallback) const {
    return has(name) ? integer(name) : fallback;
}

const std::string& ArgView::string(std::string_view name) const { return raw(name); }

core::Date ArgView::date(std::string_view name) const { return core::parse_date(raw(name)); }

core::GeoPoint ArgView::geopoint(std::string_view name) const {
    const auto& s = raw(name);
    auto comma = s.find(',');
    if (comma == std::string::npos)
        throw Error(ErrorCode::InvalidArgument, "argument '" + std::string(name) + "' is not lat,lon");
    double lat = 0, lon = 0;
    auto r1 = std::from_chars(s.data(), s.data() + comma, lat);
    auto r2 = std::from_chars(s.data() + comma + 1, s.data() + s.size(), lon);
    if (r1.ec != std::errc{} || r2.ec != std::errc{})
        throw Error(ErrorCode::InvalidArgument, "argument '" + std::string(name) + "' is not lat,lon");
    return core::GeoPoint(lat, lon);
}

core::GeoPoint ArgView::lat_lon() const { return core::GeoPoint(real("lat"), real("lon")); }

ToolRegistry::Builder& ToolRegistry::Builder::add(ToolBinding binding) {
    binding.signature.validate();
    if (!binding.executor)
        throw Error(ErrorCode::InvalidArgument, "tool " + binding.signature.name + " has no executor");
    for (const auto& b : bindings_)
        if (b.signature.name == binding.signature.name)
            throw Error(ErrorCode::InvalidArgument, "duplicate tool name '" + binding.signature.name + "'");
    bindings_.push_back(std::move(binding));
    return *this;
}

ToolRegistry::Builder& ToolRegistry::Builder::set_timeout(std::string_view tool, std::chrono::milliseconds timeout) {
    for (auto& b : bindings_)
        if (b.signature.name == tool) {
            b.timeout = timeout;
            return *this;
        }
    throw Error(ErrorCode::InvalidArgument, "no tool named '" + std::string(tool) + "'");
}

ToolRegistry ToolRegistry::Builder::build() {
    auto map = std::make_shared<EntryMap>();
    for (auto& b : bindings_) {
        auto lock = b.serialized ? std::make_shared<std::mutex>() : nullptr;
        auto name = b.signature.name;
        map->emplace(std::move(name), std::make_shared<const Entry>(Entry{std::move(b), std::move(lock)}));
    }
    bindings_.clear();
    return ToolRegistry(std::move(map));
}

const ToolBinding* ToolRegistry::binding(std::string_view name) const {
    if (!entries_) return nullptr;
    auto it = entries_->find(name);
    return it == entries_->end() ? nullptr : &it->second->binding;
}

const ToolSignature* ToolRegistry::find(std::string_view name) const {
    const auto* b = binding(name);
    return b ? &b->signature : nullptr;
}

std::shared_ptr<std::mutex> ToolRegistry::serialization_lock(std::string_view name) const {
    if (!entries_) return nullptr;
    auto it = entries_->find(name);
    return it == entries_->end() ? nullptr : it->second->lock;
}

std::vector<const ToolSignature*> ToolRegistry::signatures() const {
    std::vector<const ToolSignature*> out;
    if (entries_)
        for (const auto& [_, e] : *entries_) out.push_back(&e->binding.signature);
    return out;
}

std::size_t ToolRegistry::size() const noexcept { return entries_ ? entries_->size() : 0; }

ToolRegistry ToolRegistry::subset(const std::set<std::string>& names) const {
    auto map = std::make_shared<EntryMap>();
    if (entries_)
        for (const auto& [name, e] : *entries_)
            if (names.count(name)) map->emplace(name, e);
    return ToolRegistry(std::move(map));
}

ToolRegistry ToolRegistry::restricted_to(const std::set<Category>& categories) const {
    auto map = std::make_shared<EntryMap>();
    if (entries_)
        for (const auto& [name, e] : *entries_)
            if (categories.count(e->binding.signature.category)) map->emplace(name, e);
    return ToolRegistry(std::move(map));
}

}  // namespace climagent::toolkit
