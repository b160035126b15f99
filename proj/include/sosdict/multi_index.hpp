#pragma once
//
// sosdict/multi_index.hpp
//
// Multi-indices over a fixed variable count and the graded-lex monomial
// order used throughout the library (total degree first, then lex with
// earlier variables ranked higher).
//

#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

namespace sosdict {

class MultiIndex {
public:
    MultiIndex() = default;

    explicit MultiIndex(std::vector<int> exponents)
        : exps_(std::move(exponents)) {
        for (int e : exps_) {
            if (e < 0) throw std::invalid_argument("MultiIndex: negative exponent");
        }
        degree_ = std::accumulate(exps_.begin(), exps_.end(), 0);
    }

    static MultiIndex zero(int nvars) { return MultiIndex(std::vector<int>(nvars, 0)); }

    static MultiIndex unit(int nvars, int var, int power = 1) {
        std::vector<int> e(nvars, 0);
        e.at(var) = power;
        return MultiIndex(std::move(e));
    }

    int nvars() const { return static_cast<int>(exps_.size()); }
    int degree() const { return degree_; }
    int operator[](int i) const { return exps_[i]; }
    const std::vector<int>& exponents() const { return exps_; }

    bool is_constant() const { return degree_ == 0; }

    // true iff every exponent is even, i.e. the monomial is a square
    bool all_even() const {
        for (int e : exps_)
            if (e % 2 != 0) return false;
        return true;
    }

    MultiIndex half() const {
        std::vector<int> e(exps_);
        for (int& v : e) {
            if (v % 2 != 0) throw std::logic_error("MultiIndex::half on non-square index");
            v /= 2;
        }
        return MultiIndex(std::move(e));
    }

    MultiIndex scaled(int factor) const {
        std::vector<int> e(exps_);
        for (int& v : e) v *= factor;
        return MultiIndex(std::move(e));
    }

    MultiIndex operator+(const MultiIndex& o) const {
        check_same_vars(o);
        std::vector<int> e(exps_);
        for (size_t i = 0; i < e.size(); ++i) e[i] += o.exps_[i];
        return MultiIndex(std::move(e));
    }

    // component-wise difference, or nullopt if any exponent would go negative
    std::optional<MultiIndex> minus(const MultiIndex& o) const {
        check_same_vars(o);
        std::vector<int> e(exps_);
        for (size_t i = 0; i < e.size(); ++i) {
            e[i] -= o.exps_[i];
            if (e[i] < 0) return std::nullopt;
        }
        return MultiIndex(std::move(e));
    }

    bool operator==(const MultiIndex& o) const {
        return degree_ == o.degree_ && exps_ == o.exps_;
    }
    bool operator!=(const MultiIndex& o) const { return !(*this == o); }

    // graded lex: lower total degree first; within a degree, higher power on
    // earlier variables first (so u1^2 < u1*u2 < u2^2 reads left to right as
    // the usual graded-lex listing)
    bool operator<(const MultiIndex& o) const {
        if (degree_ != o.degree_) return degree_ < o.degree_;
        return exps_ > o.exps_;  // reversed lex within a degree class
    }
    bool operator>(const MultiIndex& o) const { return o < *this; }
    bool operator<=(const MultiIndex& o) const { return !(o < *this); }
    bool operator>=(const MultiIndex& o) const { return !(*this < o); }

private:
    void check_same_vars(const MultiIndex& o) const {
        if (nvars() != o.nvars())
            throw std::invalid_argument("MultiIndex: variable count mismatch");
    }

    std::vector<int> exps_;
    int degree_ = 0;
};

// All multi-indices of degree exactly k over n variables, in canonical order.
inline std::vector<MultiIndex> monomials_of_degree(int n, int k) {
    if (n < 1) throw std::invalid_argument("monomials_of_degree: n >= 1 required");
    if (k < 0) throw std::invalid_argument("monomials_of_degree: k >= 0 required");
    std::vector<MultiIndex> out;
    std::vector<int> cur(n, 0);
    // lexicographic descent: place the remaining degree greedily on the
    // leftmost variable, then backtrack
    auto rec = [&](auto&& self, int var, int remaining) -> void {
        if (var == n - 1) {
            cur[var] = remaining;
            out.emplace_back(cur);
            cur[var] = 0;
            return;
        }
        for (int e = remaining; e >= 0; --e) {
            cur[var] = e;
            self(self, var + 1, remaining - e);
        }
        cur[var] = 0;
    };
    rec(rec, 0, k);
    return out;
}

// All multi-indices of degree <= k over n variables, in canonical order
// (length C(n+k, k)).
inline std::vector<MultiIndex> monomials_up_to(int n, int k) {
    if (n < 1) throw std::invalid_argument("monomials_up_to: n >= 1 required");
    if (k < 0) throw std::invalid_argument("monomials_up_to: k >= 0 required");
    std::vector<MultiIndex> out;
    for (int d = 0; d <= k; ++d) {
        auto layer = monomials_of_degree(n, d);
        out.insert(out.end(), layer.begin(), layer.end());
    }
    return out;
}

// n! / (a_1! ... a_n!) as a 64-bit integer; valid at the desk scales used here
inline std::int64_t multinomial(const MultiIndex& alpha) {
    std::int64_t result = 1;
    int placed = 0;
    for (int i = 0; i < alpha.nvars(); ++i) {
        for (int j = 1; j <= alpha[i]; ++j) {
            ++placed;
            result = result * placed / j;
        }
    }
    return result;
}

}  // namespace sosdict
