#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cavityw {

enum class ModeKind { Qutrit, Cavity };

/// One tensor factor of the composite system. For a qutrit `levels` is the
/// number of retained energy levels (2 or 3); for a cavity it is the photon
/// truncation N_ph + 1.
struct ModeSpec {
    ModeKind kind = ModeKind::Qutrit;
    int levels = 3;
    std::string label;

    bool operator==(const ModeSpec&) const = default;
};

/// Enumerated tensor-product basis, optionally restricted to the states whose
/// excitation weight (photons plus qutrit level index) is at most `E_max`.
///
/// States are ordered lexicographically over occupation tuples with the first
/// declared mode most significant.
class CompositeBasis {
public:
    CompositeBasis(std::vector<ModeSpec> modes, std::optional<int> max_excitation);

    std::size_t dimension() const noexcept { return dimension_; }
    std::size_t mode_count() const noexcept { return modes_.size(); }
    const std::vector<ModeSpec>& modes() const noexcept { return modes_; }
    const ModeSpec& mode(std::size_t i) const { return modes_.at(i); }
    std::optional<int> max_excitation() const noexcept { return max_excitation_; }
    bool restricted() const noexcept { return max_excitation_.has_value(); }

    /// Position of `label` in the mode list; throws LookupError.
    std::size_t mode_index(const std::string& label) const;
    bool has_mode(const std::string& label) const noexcept;

    std::span<const std::uint8_t> occupation(std::size_t index) const;
    /// Flat index of an occupation tuple, or nullopt when the tuple is not a
    /// retained state (outside the sector or out of range).
    std::optional<std::size_t> index_of(std::span<const std::uint8_t> occupation) const;
    int weight(std::size_t index) const;

    /// Index of the state with every mode in the given level; all others ground.
    std::optional<std::size_t> index_with(
        std::span<const std::pair<std::string, int>> excitations) const;

    bool same_as(const CompositeBasis& other) const noexcept;

private:
    std::vector<ModeSpec> modes_;
    std::optional<int> max_excitation_;
    std::size_t dimension_ = 0;
    std::vector<std::uint8_t> occupations_;  // dimension_ x mode_count row-major
    std::vector<std::size_t> radix_;         // mixed-radix place values
    std::vector<std::int64_t> full_to_index_;
};

using BasisPtr = std::shared_ptr<const CompositeBasis>;

/// Validates the mode list and enumerates the basis.
BasisPtr build_basis(std::vector<ModeSpec> modes, std::optional<int> max_excitation = std::nullopt);

/// Mode labels for the 2n-cavity transfer device, in canonical declared order
/// (q1..qn, q1'..qn', qA, c1..cn, c1'..cn').
struct TransferLayout {
    int n = 3;
    int qutrit_levels = 3;
    int coupler_levels = 3;
    int cavity_levels = 2;

    /// Site index k in [0, 2n): k < n is unprimed j = k+1, otherwise primed.
    static std::string site_suffix(int n, int k);
    std::string qutrit(int k) const { return "q" + site_suffix(n, k); }
    std::string cavity(int k) const { return "c" + site_suffix(n, k); }
    static std::string coupler() { return "qA"; }
    int sites() const noexcept { return 2 * n; }

    std::vector<ModeSpec> modes() const;
};

BasisPtr build_transfer_basis(const TransferLayout& layout, std::optional<int> max_excitation = 1);

}  // namespace cavityw
