#pragma once

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace ggm {

/// Fixed-capacity bitset over 64-bit words, sized at construction.
/// Used for vertex subsets; all binary operations require equal capacity.
class VertexSet {
public:
    VertexSet() = default;
    explicit VertexSet(int nbits) : nbits_(nbits), w_((nbits + 63) / 64, 0) {}

    int capacity() const { return nbits_; }

    void set(int i) { w_[static_cast<std::size_t>(i) >> 6] |= word_bit(i); }
    void reset(int i) { w_[static_cast<std::size_t>(i) >> 6] &= ~word_bit(i); }
    bool test(int i) const { return (w_[static_cast<std::size_t>(i) >> 6] & word_bit(i)) != 0; }

    void clear() {
        for (auto& w : w_) w = 0;
    }

    int count() const {
        int c = 0;
        for (auto w : w_) c += std::popcount(w);
        return c;
    }

    bool none() const {
        for (auto w : w_)
            if (w) return false;
        return true;
    }

    VertexSet& operator|=(const VertexSet& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
        return *this;
    }
    VertexSet& operator&=(const VertexSet& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
        return *this;
    }
    /// this := this \ o
    VertexSet& subtract(const VertexSet& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= ~o.w_[i];
        return *this;
    }

    friend VertexSet operator|(VertexSet a, const VertexSet& b) { return a |= b; }
    friend VertexSet operator&(VertexSet a, const VertexSet& b) { return a &= b; }

    bool is_subset_of(const VertexSet& o) const {
        for (std::size_t i = 0; i < w_.size(); ++i)
            if (w_[i] & ~o.w_[i]) return false;
        return true;
    }

    bool intersects(const VertexSet& o) const {
        for (std::size_t i = 0; i < w_.size(); ++i)
            if (w_[i] & o.w_[i]) return true;
        return false;
    }

    /// Index of the lowest set bit, or -1 when empty.
    int first() const {
        for (std::size_t i = 0; i < w_.size(); ++i)
            if (w_[i]) return static_cast<int>(i * 64 + std::countr_zero(w_[i]));
        return -1;
    }

    /// Next set bit strictly after `i`, or -1.
    int next(int i) const {
        std::size_t wi = static_cast<std::size_t>(i + 1) >> 6;
        if (wi >= w_.size()) return -1;
        std::uint64_t w = w_[wi] & (~std::uint64_t{0} << ((i + 1) & 63));
        while (true) {
            if (w) return static_cast<int>(wi * 64 + std::countr_zero(w));
            if (++wi >= w_.size()) return -1;
            w = w_[wi];
        }
    }

    template <typename Fn>
    void for_each(Fn&& fn) const {
        for (std::size_t i = 0; i < w_.size(); ++i) {
            std::uint64_t w = w_[i];
            while (w) {
                fn(static_cast<int>(i * 64 + std::countr_zero(w)));
                w &= w - 1;
            }
        }
    }

    std::vector<int> to_vector() const {
        std::vector<int> out;
        out.reserve(static_cast<std::size_t>(count()));
        for_each([&](int v) { out.push_back(v); });
        return out;
    }

    const std::vector<std::uint64_t>& words() const { return w_; }

    friend bool operator==(const VertexSet& a, const VertexSet& b) {
        return a.nbits_ == b.nbits_ && a.w_ == b.w_;
    }
    friend std::strong_ordering operator<=>(const VertexSet& a, const VertexSet& b) {
        if (auto c = a.nbits_ <=> b.nbits_; c != 0) return c;
        return a.w_ <=> b.w_;
    }

private:
    static std::uint64_t word_bit(int i) { return std::uint64_t{1} << (i & 63); }

    int nbits_ = 0;
    std::vector<std::uint64_t> w_;
};

inline std::uint64_t hash_words(const std::vector<std::uint64_t>& ws, std::uint64_t seed) {
    // FNV-1a style mix over the words, then a finalizer.
    std::uint64_t h = seed ^ 0xcbf29ce484222325ULL;
    for (auto w : ws) {
        h ^= w;
        h *= 0x100000001b3ULL;
        h ^= h >> 29;
    }
    h *= 0xbf58476d1ce4e5b9ULL;
    h ^= h >> 32;
    return h;
}

struct VertexSetHash {
    std::size_t operator()(const VertexSet& s) const {
        return static_cast<std::size_t>(hash_words(s.words(), static_cast<std::uint64_t>(s.capacity())));
    }
};

}  // namespace ggm
