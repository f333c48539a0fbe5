#include "cavityw/basis.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "cavityw/errors.hpp"

namespace cavityw {

namespace {

// Dense full-space lookup table bound; beyond this the product space is too
// large to enumerate anyway.
constexpr std::size_t kMaxFullDimension = std::size_t{1} << 26;

}  // namespace

CompositeBasis::CompositeBasis(std::vector<ModeSpec> modes, std::optional<int> max_excitation)
    : modes_(std::move(modes)), max_excitation_(max_excitation) {
    if (modes_.empty()) throw ConfigError("basis needs at least one mode");
    std::set<std::string> seen;
    for (const auto& m : modes_) {
        if (m.levels < 2)
            throw ConfigError("mode '" + m.label + "' needs at least 2 levels");
        if (m.levels > 255) throw ConfigError("mode '" + m.label + "' has too many levels");
        if (m.label.empty()) throw ConfigError("mode labels must be non-empty");
        if (!seen.insert(m.label).second) throw ConfigError("duplicate mode label '" + m.label + "'");
    }
    if (max_excitation_ && *max_excitation_ < 0)
        throw ConfigError("maximum excitation must be non-negative");

    const std::size_t nm = modes_.size();
    radix_.assign(nm, 1);
    std::size_t full = 1;
    for (std::size_t i = nm; i-- > 0;) {
        radix_[i] = full;
        full *= static_cast<std::size_t>(modes_[i].levels);
        if (full > kMaxFullDimension) throw ConfigError("product space too large to enumerate");
    }
    full_to_index_.assign(full, -1);

    std::vector<std::uint8_t> occ(nm, 0);
    for (std::size_t flat = 0; flat < full; ++flat) {
        std::size_t rem = flat;
        int w = 0;
        for (std::size_t i = 0; i < nm; ++i) {
            occ[i] = static_cast<std::uint8_t>(rem / radix_[i]);
            rem %= radix_[i];
            w += occ[i];
        }
        if (max_excitation_ && w > *max_excitation_) continue;
        full_to_index_[flat] = static_cast<std::int64_t>(dimension_++);
        occupations_.insert(occupations_.end(), occ.begin(), occ.end());
    }
    if (dimension_ == 0) throw ConfigError("basis is empty");
}

std::size_t CompositeBasis::mode_index(const std::string& label) const {
    for (std::size_t i = 0; i < modes_.size(); ++i)
        if (modes_[i].label == label) return i;
    throw LookupError("no mode labelled '" + label + "'");
}

bool CompositeBasis::has_mode(const std::string& label) const noexcept {
    return std::any_of(modes_.begin(), modes_.end(), [&](const ModeSpec& m) { return m.label == label; });
}

std::span<const std::uint8_t> CompositeBasis::occupation(std::size_t index) const {
    if (index >= dimension_) throw LookupError("basis index out of range");
    return {occupations_.data() + index * modes_.size(), modes_.size()};
}

std::optional<std::size_t> CompositeBasis::index_of(std::span<const std::uint8_t> occupation) const {
    if (occupation.size() != modes_.size()) return std::nullopt;
    std::size_t flat = 0;
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        if (occupation[i] >= modes_[i].levels) return std::nullopt;
        flat += occupation[i] * radix_[i];
    }
    const auto idx = full_to_index_[flat];
    if (idx < 0) return std::nullopt;
    return static_cast<std::size_t>(idx);
}

int CompositeBasis::weight(std::size_t index) const {
    const auto occ = occupation(index);
    return std::accumulate(occ.begin(), occ.end(), 0);
}

std::optional<std::size_t> CompositeBasis::index_with(
    std::span<const std::pair<std::string, int>> excitations) const {
    std::vector<std::uint8_t> occ(modes_.size(), 0);
    for (const auto& [label, level] : excitations) {
        const auto i = mode_index(label);
        if (level < 0 || level >= modes_[i].levels) return std::nullopt;
        occ[i] = static_cast<std::uint8_t>(level);
    }
    return index_of(occ);
}

bool CompositeBasis::same_as(const CompositeBasis& other) const noexcept {
    return this == &other || (modes_ == other.modes_ && max_excitation_ == other.max_excitation_);
}

BasisPtr build_basis(std::vector<ModeSpec> modes, std::optional<int> max_excitation) {
    return std::make_shared<const CompositeBasis>(std::move(modes), max_excitation);
}

std::string TransferLayout::site_suffix(int n, int k) {
    if (k < n) return std::to_string(k + 1);
    return std::to_string(k - n + 1) + "'";
}

std::vector<ModeSpec> TransferLayout::modes() const {
    if (n < 1) throw ConfigError("number of cavity pairs must be at least 1");
    std::vector<ModeSpec> out;
    for (int k = 0; k < sites(); ++k) out.push_back({ModeKind::Qutrit, qutrit_levels, qutrit(k)});
    out.push_back({ModeKind::Qutrit, coupler_levels, coupler()});
    for (int k = 0; k < sites(); ++k) out.push_back({ModeKind::Cavity, cavity_levels, cavity(k)});
    return out;
}

BasisPtr build_transfer_basis(const TransferLayout& layout, std::optional<int> max_excitation) {
    return build_basis(layout.modes(), max_excitation);
}

}  // namespace cavityw
