#pragma once

#include <bit>
#include <cstdint>
#include <string>

#include "seqmodel/errors.hpp"

namespace seqmodel {

// Fixed-length bitstring packed into one 64-bit word. Position p (0-based,
// the leftmost character of the text form) lives at word bit p; bits above
// position length-1 are zero.
struct Bitstring {
    int length = 0;
    std::uint64_t bits = 0;

    Bitstring() = default;
    Bitstring(int n, std::uint64_t packed);

    static Bitstring from_string(const std::string& s);
    // n-bit string whose text form, read as a binary number (first character
    // most significant), equals `index`.
    static Bitstring from_index(int n, std::uint64_t index);

    int bit(int pos) const { return static_cast<int>((bits >> pos) & 1u); }
    void set_bit(int pos, int value);

    // Packed bits for positions cut..length-1 (0-based cut).
    std::uint64_t suffix_key(int cut) const { return bits >> cut; }

    std::uint64_t index() const;  // first character most significant
    std::string to_string() const;

    friend bool operator==(const Bitstring&, const Bitstring&) = default;
};

inline int parity(const Bitstring& s) { return std::popcount(s.bits) & 1; }

}  // namespace seqmodel
