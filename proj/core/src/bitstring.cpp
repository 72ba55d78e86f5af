#include "seqmodel/bitstring.hpp"

namespace seqmodel {

Bitstring::Bitstring(int n, std::uint64_t packed) : length(n), bits(packed) {
    if (n < 1 || n > 64) throw contract_error("Bitstring: length must be in [1, 64]");
    if (n < 64 && (packed >> n) != 0)
        throw contract_error("Bitstring: bits set beyond position " + std::to_string(n));
}

Bitstring Bitstring::from_string(const std::string& s) {
    if (s.empty() || s.size() > 64) throw contract_error("Bitstring: text length must be in [1, 64]");
    Bitstring b;
    b.length = static_cast<int>(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '1')
            b.bits |= std::uint64_t(1) << i;
        else if (s[i] != '0')
            throw contract_error("Bitstring: invalid character '" + std::string(1, s[i]) + "'");
    }
    return b;
}

Bitstring Bitstring::from_index(int n, std::uint64_t index) {
    if (n < 1 || n > 64) throw contract_error("Bitstring: length must be in [1, 64]");
    if (n < 64 && (index >> n) != 0) throw contract_error("Bitstring: index out of range");
    Bitstring b;
    b.length = n;
    for (int p = 0; p < n; ++p)
        if ((index >> (n - 1 - p)) & 1u) b.bits |= std::uint64_t(1) << p;
    return b;
}

void Bitstring::set_bit(int pos, int value) {
    if (pos < 0 || pos >= length) throw contract_error("Bitstring: position out of range");
    if (value)
        bits |= std::uint64_t(1) << pos;
    else
        bits &= ~(std::uint64_t(1) << pos);
}

std::uint64_t Bitstring::index() const {
    std::uint64_t idx = 0;
    for (int p = 0; p < length; ++p) idx |= std::uint64_t(bit(p)) << (length - 1 - p);
    return idx;
}

std::string Bitstring::to_string() const {
    std::string s(static_cast<std::size_t>(length), '0');
    for (int p = 0; p < length; ++p)
        if (bit(p)) s[static_cast<std::size_t>(p)] = '1';
    return s;
}

}  // namespace seqmodel
