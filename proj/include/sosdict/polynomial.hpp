#pragma once
//
// sosdict/polynomial.hpp
//
// Sparse multivariate polynomials over a scalar K (double for the numeric
// pipeline, Rational for certificate work). Terms live in a std::map keyed
// by MultiIndex, so iteration order is the canonical monomial order and
// serialization is deterministic for free.
//

#include <cmath>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "sosdict/multi_index.hpp"
#include "sosdict/rational.hpp"

namespace sosdict {

template <class K>
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(int nvars) : nvars_(nvars) {
        if (nvars < 1) throw std::invalid_argument("Polynomial: nvars >= 1 required");
    }

    static Polynomial zero(int nvars) { return Polynomial(nvars); }

    static Polynomial constant(int nvars, const K& c) {
        Polynomial p(nvars);
        p.add_term(MultiIndex::zero(nvars), c);
        return p;
    }

    static Polynomial variable(int nvars, int var) {
        Polynomial p(nvars);
        p.add_term(MultiIndex::unit(nvars, var), scalar_traits<K>::one());
        return p;
    }

    static Polynomial monomial(const MultiIndex& alpha, const K& c) {
        Polynomial p(alpha.nvars());
        p.add_term(alpha, c);
        return p;
    }

    int nvars() const { return nvars_; }

    int degree() const {
        if (terms_.empty()) return 0;
        return terms_.rbegin()->first.degree();
    }

    bool is_zero() const { return terms_.empty(); }

    bool is_homogeneous() const {
        if (terms_.empty()) return true;
        int d = terms_.begin()->first.degree();
        for (const auto& [alpha, c] : terms_)
            if (alpha.degree() != d) return false;
        return true;
    }

    const std::map<MultiIndex, K>& terms() const { return terms_; }
    size_t term_count() const { return terms_.size(); }

    K coeff(const MultiIndex& alpha) const {
        auto it = terms_.find(alpha);
        return it == terms_.end() ? scalar_traits<K>::zero() : it->second;
    }

    // merge a term in; zero coefficients are never stored
    void add_term(const MultiIndex& alpha, const K& c) {
        if (alpha.nvars() != nvars_)
            throw std::invalid_argument("Polynomial::add_term: variable count mismatch");
        if (scalar_traits<K>::is_zero(c)) return;
        auto [it, inserted] = terms_.emplace(alpha, c);
        if (!inserted) {
            it->second += c;
            if (scalar_traits<K>::is_zero(it->second)) terms_.erase(it);
        }
    }

    Polynomial& operator+=(const Polynomial& o) {
        check_same_vars(o);
        for (const auto& [alpha, c] : o.terms_) add_term(alpha, c);
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) {
        check_same_vars(o);
        for (const auto& [alpha, c] : o.terms_) add_term(alpha, -c);
        return *this;
    }
    Polynomial& operator*=(const K& s) {
        if (scalar_traits<K>::is_zero(s)) {
            terms_.clear();
            return *this;
        }
        for (auto& [alpha, c] : terms_) c *= s;
        return *this;
    }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, const K& s) { return a *= s; }
    friend Polynomial operator*(const K& s, Polynomial a) { return a *= s; }
    friend Polynomial operator-(Polynomial a) {
        for (auto& [alpha, c] : a.terms_) c = -c;
        return a;
    }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        a.check_same_vars(b);
        Polynomial out(a.nvars_);
        for (const auto& [al, ca] : a.terms_)
            for (const auto& [be, cb] : b.terms_) out.add_term(al + be, ca * cb);
        return out;
    }

    Polynomial pow(int e) const {
        if (e < 0) throw std::invalid_argument("Polynomial::pow: negative exponent");
        Polynomial out = constant(nvars_, scalar_traits<K>::one());
        Polynomial base = *this;
        while (e > 0) {
            if (e & 1) out = out * base;
            base = base * base;
            e >>= 1;
        }
        return out;
    }

    K evaluate(std::span<const K> x) const {
        if (static_cast<int>(x.size()) != nvars_)
            throw std::invalid_argument("Polynomial::evaluate: point dimension mismatch");
        K total = scalar_traits<K>::zero();
        for (const auto& [alpha, c] : terms_) {
            K mono = c;
            for (int i = 0; i < nvars_; ++i)
                for (int e = 0; e < alpha[i]; ++e) mono *= x[i];
            total += mono;
        }
        return total;
    }

    K evaluate(const std::vector<K>& x) const { return evaluate(std::span<const K>(x)); }

    // general composition: variable i is replaced by images[i]
    Polynomial substitute(std::span<const Polynomial> images) const {
        if (static_cast<int>(images.size()) != nvars_)
            throw std::invalid_argument("Polynomial::substitute: need one image per variable");
        int out_vars = images.empty() ? nvars_ : images[0].nvars();
        for (const auto& im : images)
            if (im.nvars() != out_vars)
                throw std::invalid_argument("Polynomial::substitute: image variable counts differ");

        // memoize image powers; exponents are small at the scales we run
        std::vector<std::vector<Polynomial>> powers(nvars_);
        auto image_pow = [&](int var, int e) -> const Polynomial& {
            auto& cache = powers[var];
            if (cache.empty()) cache.push_back(constant(out_vars, scalar_traits<K>::one()));
            while (static_cast<int>(cache.size()) <= e) cache.push_back(cache.back() * images[var]);
            return cache[e];
        };

        Polynomial out(out_vars);
        for (const auto& [alpha, c] : terms_) {
            Polynomial term = constant(out_vars, c);
            for (int i = 0; i < nvars_; ++i)
                if (alpha[i] > 0) term = term * image_pow(i, alpha[i]);
            out += term;
        }
        return out;
    }

    // largest absolute coefficient (monitoring / test tolerances)
    double max_abs_coeff() const {
        double m = 0.0;
        for (const auto& [alpha, c] : terms_) {
            double v = std::abs(static_cast<double>(to_double(c)));
            if (v > m) m = v;
        }
        return m;
    }

private:
    static double to_double(double v) { return v; }
    static double to_double(const Rational& v) { return v.get_d(); }

    void check_same_vars(const Polynomial& o) const {
        if (nvars_ != o.nvars_)
            throw std::invalid_argument("Polynomial: variable count mismatch");
    }

    int nvars_ = 1;
    std::map<MultiIndex, K> terms_;
};

// <a, u>^d expanded by the multinomial theorem
template <class K>
Polynomial<K> linear_form_power(const std::vector<K>& a, int d) {
    if (a.empty()) throw std::invalid_argument("linear_form_power: empty coefficient vector");
    if (d < 0) throw std::invalid_argument("linear_form_power: d >= 0 required");
    int n = static_cast<int>(a.size());
    Polynomial<K> out(n);
    for (const auto& alpha : monomials_of_degree(n, d)) {
        K c = K(static_cast<long>(multinomial(alpha)));
        bool skip = false;
        for (int i = 0; i < n && !skip; ++i) {
            for (int e = 0; e < alpha[i]; ++e) c *= a[i];
            if (scalar_traits<K>::is_zero(c)) skip = true;
        }
        if (!skip) out.add_term(alpha, c);
    }
    return out;
}

// sum_i u_i^d
template <class K>
Polynomial<K> power_sum(int n, int d) {
    Polynomial<K> out(n);
    for (int i = 0; i < n; ++i)
        out.add_term(MultiIndex::unit(n, i, d), scalar_traits<K>::one());
    return out;
}

using PolyF = Polynomial<double>;
using PolyQ = Polynomial<Rational>;

}  // namespace sosdict
