#ifndef WCS_SRC_BITSET_HPP
#define WCS_SRC_BITSET_HPP

#include <bit>
#include <cstdint>
#include <vector>

namespace wcs::detail {

/// Fixed-size bit set over node ids; rows of an adjacency matrix.
class Bits {
public:
    Bits() = default;
    explicit Bits(std::size_t n) : words_((n + 63) / 64, 0) {}

    void set(int i) { words_[static_cast<std::size_t>(i) >> 6] |= bit(i); }
    void reset(int i) { words_[static_cast<std::size_t>(i) >> 6] &= ~bit(i); }
    bool test(int i) const { return (words_[static_cast<std::size_t>(i) >> 6] & bit(i)) != 0; }
    std::size_t words() const { return words_.size(); }
    std::uint64_t word(std::size_t k) const { return words_[k]; }
    std::uint64_t& word(std::size_t k) { return words_[k]; }

    int count() const {
        int c = 0;
        for (auto w : words_) c += std::popcount(w);
        return c;
    }

    template <class F>
    void for_each(F&& f) const {
        for (std::size_t k = 0; k < words_.size(); ++k) {
            std::uint64_t w = words_[k];
            while (w) {
                int b = std::countr_zero(w);
                f(static_cast<int>(k * 64 + static_cast<std::size_t>(b)));
                w &= w - 1;
            }
        }
    }

    Bits operator&(const Bits& o) const {
        Bits r = *this;
        for (std::size_t k = 0; k < words_.size(); ++k) r.words_[k] &= o.words_[k];
        return r;
    }
    Bits& operator|=(const Bits& o) {
        for (std::size_t k = 0; k < words_.size(); ++k) words_[k] |= o.words_[k];
        return *this;
    }

private:
    static std::uint64_t bit(int i) { return std::uint64_t{1} << (static_cast<unsigned>(i) & 63u); }
    std::vector<std::uint64_t> words_;
};

}  // namespace wcs::detail

#endif
