#ifndef CM2PA_MODEL_HPP
#define CM2PA_MODEL_HPP

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cm2pa/errors.hpp"
#include "cm2pa/machine.hpp"

namespace cm2pa::model {

using Nat = std::uint64_t;

/// Start position of chunk i in the growing layout: d * 4^i.
/// Throws Error on overflow of the index type.
Nat chunk_start(Nat i, Nat d);

struct GrowingLayout {
    Nat d = 0;
    Nat n_chunks = 0;
};

struct FixedWidthLayout {
    Nat d = 0;
    Nat n_chunks = 0;
    Nat e = 0;
};

/// Finite 0/1 string interpreting P on an initial segment of N.
///
/// A growing-layout model is a strict prefix of an infinite model: reading a
/// bit at or beyond length() throws AccessError. A fixed-width model has
/// finite support, so bits beyond the stored region are genuinely 0.
class BitModel {
public:
    using Layout = std::variant<GrowingLayout, FixedWidthLayout>;

    BitModel(std::vector<bool> bits, Layout layout)
        : bits_(std::move(bits)), layout_(std::move(layout)) {}

    Nat length() const { return bits_.size(); }
    bool finite_support() const {
        return std::holds_alternative<FixedWidthLayout>(layout_);
    }

    int bit(Nat i) const {
        if (i >= bits_.size()) {
            if (finite_support()) return 0;
            throw AccessError("P-access at " + std::to_string(i) +
                              " beyond model length " + std::to_string(bits_.size()));
        }
        return bits_[i] ? 1 : 0;
    }

    const Layout& layout() const { return layout_; }

    /// First line: "d=<n> layout=<growing|fixed> chunks=<k> [e=<n>]",
    /// second line the ASCII 0/1 string.
    std::string dump() const;

private:
    std::vector<bool> bits_;
    Layout layout_;
};

/// Canonical growing-layout model of a configuration sequence: chunk i at
/// d*4^i with delimiters 001011/0011 and unary digits, plus the bare
/// delimiter of the next chunk. Throws CapacityError when a value does not
/// fit its subchunk.
BitModel build_canonical(std::span<const machine::Configuration> configs, Nat d);

/// Fixed-width model with stride 3*d_val; the last configuration must sit on
/// line K. e = 3*d_val*(len-1) marks the final chunk.
BitModel build_fixed_width(std::span<const machine::Configuration> configs,
                           Nat d_val, std::size_t K);

/// Recovers the configuration sequence from a built model.
/// Throws MalformedModel on layout violations.
std::vector<machine::Configuration> decode(const BitModel& m);

/// Exhaustive-scan checks of the structural facts that hold in every built
/// growing model: chunk delimiters exactly at 4^i*d, breaks exactly at
/// 2*4^i*d and 3*4^i*d, start patterns only at the known offsets, and exactly
/// one end marker per subchunk. Returns violation descriptions (empty = ok).
std::vector<std::string> layout_observations(const BitModel& m);

} // namespace cm2pa::model

#endif
