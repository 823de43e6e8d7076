#pragma once

#include <array>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>

namespace spreadout {

inline constexpr int kMaxDim = 8;

/// Lattice site in dimension d (d <= 8), l-infinity geometry.
struct Point {
    std::array<int32_t, kMaxDim> c{};
    int dim = 0;

    Point() = default;
    explicit Point(int d) : dim(d) {
        if (d < 1 || d > kMaxDim) throw std::invalid_argument("Point: dimension out of range");
    }
    Point(std::initializer_list<int32_t> xs) : dim(static_cast<int>(xs.size())) {
        if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("Point: dimension out of range");
        int i = 0;
        for (int32_t v : xs) c[i++] = v;
    }

    static Point zero(int d) { return Point(d); }
    static Point axis(int d, int i, int32_t v) {
        Point p(d);
        p.c[i] = v;
        return p;
    }

    int32_t operator[](int i) const { return c[i]; }
    int32_t& operator[](int i) { return c[i]; }

    Point operator+(const Point& o) const {
        Point r(dim);
        for (int i = 0; i < dim; ++i) r.c[i] = c[i] + o.c[i];
        return r;
    }
    Point operator-(const Point& o) const {
        Point r(dim);
        for (int i = 0; i < dim; ++i) r.c[i] = c[i] - o.c[i];
        return r;
    }
    Point operator-() const {
        Point r(dim);
        for (int i = 0; i < dim; ++i) r.c[i] = -c[i];
        return r;
    }

    int32_t linf() const {
        int32_t m = 0;
        for (int i = 0; i < dim; ++i) {
            int32_t a = c[i] < 0 ? -c[i] : c[i];
            if (a > m) m = a;
        }
        return m;
    }

    bool is_zero() const {
        for (int i = 0; i < dim; ++i)
            if (c[i] != 0) return false;
        return true;
    }

    bool operator==(const Point& o) const {
        if (dim != o.dim) return false;
        for (int i = 0; i < dim; ++i)
            if (c[i] != o.c[i]) return false;
        return true;
    }
    bool operator!=(const Point& o) const { return !(*this == o); }
};

inline int32_t linf(const Point& p) { return p.linf(); }

/// Coordinates packed into 16 bits each (biased), 8 coords max -> 128-bit key.
/// Requires |coord| <= 32767; radii at desk scale stay far below that.
struct PackedKey {
    uint64_t hi = 0, lo = 0;
    bool operator==(const PackedKey& o) const { return hi == o.hi && lo == o.lo; }
};

inline PackedKey pack(const Point& p) {
    PackedKey k;
    for (int i = 0; i < p.dim; ++i) {
        int32_t v = p.c[i];
        if (v < -32768 || v > 32767) throw std::overflow_error("pack: coordinate exceeds 16-bit range");
        uint64_t u = static_cast<uint16_t>(v);
        if (i < 4)
            k.lo |= u << (16 * i);
        else
            k.hi |= u << (16 * (i - 4));
    }
    return k;
}

inline uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct PackedKeyHash {
    size_t operator()(const PackedKey& k) const { return mix64(k.lo ^ mix64(k.hi)); }
};

inline std::string to_string(const Point& p) {
    std::string s = "(";
    for (int i = 0; i < p.dim; ++i) {
        if (i) s += ",";
        s += std::to_string(p.c[i]);
    }
    return s + ")";
}

}  // namespace spreadout
