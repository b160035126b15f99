#include "sosdict/certcheck.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace sosdict::certs {

PolyQ expand(const SosCertificate& cert) {
    PolyQ sum(cert.target.nvars());
    for (const auto& t : cert.terms) sum += t.multiplier * t.root * t.root;
    return sum;
}

bool verify(const SosCertificate& cert) {
    for (const auto& t : cert.terms)
        for (const auto& [alpha, c] : t.multiplier.terms())
            if (c < 0) return false;
    PolyQ diff = expand(cert) - cert.target;
    return diff.is_zero();
}

namespace {

long factorial(int n) {
    long f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// the symmetrized average R_k = (1/n!) sum_sigma w_{sigma(1)}^{n-k}
// prod_{j=2}^{k+1} w_{sigma(j)}
PolyQ chain_average(int n, int k, const std::vector<std::vector<int>>& perms) {
    PolyQ sum(n);
    for (const auto& sigma : perms) {
        std::vector<int> exps(n, 0);
        exps[sigma[0]] = n - k;
        for (int j = 1; j <= k; ++j) exps[sigma[j]] += 1;
        sum.add_term(MultiIndex(exps), Rational(1));
    }
    return sum * Rational(1, factorial(n));
}

}  // namespace

AmgmChain amgm_chain(int n) {
    if (n < 1 || n > kMaxAmgmVars)
        throw std::invalid_argument("amgm_chain: need 1 <= n <= 6");

    std::vector<std::vector<int>> perms;
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    do {
        perms.push_back(idx);
    } while (std::next_permutation(idx.begin(), idx.end()));

    AmgmChain chain;
    for (int k = 0; k < n; ++k) chain.averages.push_back(chain_average(n, k, perms));

    Rational inv_nfact(1, factorial(n));
    for (int k = 1; k < n; ++k) {
        SosCertificate cert;
        cert.label = "amgm step " + std::to_string(k) + " of n=" + std::to_string(n);
        cert.target = chain.averages[k - 1] - chain.averages[k];

        // middle-segment sums, bucketed by the (first, (k+1)-th) entries of
        // the permutation; symmetric in the bucket pair
        std::map<std::pair<int, int>, PolyQ> brace;
        for (const auto& sigma : perms) {
            int a = sigma[0];
            int b = sigma[k];
            std::vector<int> exps(n, 0);
            for (int j = 1; j < k; ++j) exps[sigma[j]] += 1;
            auto it = brace.try_emplace({a, b}, n).first;
            it->second.add_term(MultiIndex(exps), Rational(1));
        }

        for (int a = 0; a < n; ++a) {
            for (int b = a + 1; b < n; ++b) {
                auto it = brace.find({a, b});
                if (it == brace.end()) continue;
                // telescoped factor (w_a^{n-k} - w_b^{n-k}) / (w_a - w_b)
                PolyQ geom(n);
                for (int l = 0; l <= n - k - 1; ++l) {
                    std::vector<int> exps(n, 0);
                    exps[a] = n - k - 1 - l;
                    exps[b] = l;
                    geom.add_term(MultiIndex(exps), Rational(1));
                }
                PolyQ root = PolyQ::variable(n, a) - PolyQ::variable(n, b);
                SosTerm term{it->second * geom * inv_nfact, root};
                if (!term.multiplier.is_zero()) cert.terms.push_back(std::move(term));
            }
        }
        chain.steps.push_back(std::move(cert));
    }
    return chain;
}

SosCertificate monomial_certificate(const MultiIndex& alpha) {
    int n = alpha.nvars();
    int s = alpha.degree();
    if (s < 1) throw std::invalid_argument("monomial_certificate: |alpha| >= 1 required");
    if (s > kMaxAmgmVars)
        throw std::invalid_argument("monomial_certificate: |alpha| exceeds the chain cap");

    SosCertificate cert;
    cert.label = "monomial domination |alpha|=" + std::to_string(s);
    cert.target = power_sum<Rational>(n, s) - PolyQ::monomial(alpha, Rational(1));

    if (s >= 2) {
        // run the chain in s formal variables, then identify variable j with
        // w_{i_j} where (i_1..i_s) lists alpha with repetition
        std::vector<PolyQ> images;
        for (int i = 0; i < n; ++i)
            for (int r = 0; r < alpha[i]; ++r) images.push_back(PolyQ::variable(n, i));

        AmgmChain chain = amgm_chain(s);
        for (const auto& step : chain.steps) {
            for (const auto& t : step.terms) {
                SosTerm sub{t.multiplier.substitute(images), t.root.substitute(images)};
                if (!sub.multiplier.is_zero() && !sub.root.is_zero())
                    cert.terms.push_back(std::move(sub));
            }
        }
    }

    // the chain head is sum_i (alpha_i / s) w_i^s; pad the remaining mass
    for (int i = 0; i < n; ++i) {
        Rational c = rat(s - alpha[i], s);
        if (c == 0) continue;
        SosTerm slack;
        if (s % 2 == 0) {
            slack.multiplier = PolyQ::constant(n, c);
            slack.root = PolyQ::monomial(MultiIndex::unit(n, i, s / 2), Rational(1));
        } else {
            slack.multiplier = PolyQ::monomial(MultiIndex::unit(n, i), c);
            slack.root = PolyQ::monomial(MultiIndex::unit(n, i, (s - 1) / 2), Rational(1));
        }
        cert.terms.push_back(std::move(slack));
    }
    return cert;
}

HolderLift holder_lift_certificate(int n, int d, int s) {
    if (n < 1) throw std::invalid_argument("holder_lift_certificate: n >= 1 required");
    if (d < 4 || d % 2 != 0)
        throw std::invalid_argument("holder_lift_certificate: even d >= 4 required");
    if (s < 1) throw std::invalid_argument("holder_lift_certificate: s >= 1 required");
    if (s > kMaxAmgmVars)
        throw std::invalid_argument("holder_lift_certificate: s exceeds the chain cap");

    HolderLift lift;
    lift.nvars = n;
    lift.d = d;
    lift.s = s;

    // w_i -> v_i^{d-2}
    std::vector<PolyQ> images;
    for (int i = 0; i < n; ++i)
        images.push_back(PolyQ::monomial(MultiIndex::unit(n, i, d - 2), Rational(1)));

    PolyQ lhs = power_sum<Rational>(n, (d - 2) * s) * power_sum<Rational>(n, 2).pow(s);
    PolyQ rhs = power_sum<Rational>(n, d).pow(s);

    lift.total.label = "holder lift d=" + std::to_string(d) + " s=" + std::to_string(s);
    lift.total.target = lhs - rhs;

    for (const auto& alpha : monomials_of_degree(n, s)) {
        SosCertificate mono = monomial_certificate(alpha);

        SosCertificate part;
        part.label = "holder lift part";
        PolyQ square = PolyQ::monomial(alpha.scaled(2), Rational(1));
        part.target = mono.target.substitute(images) * square;
        PolyQ half_root = PolyQ::monomial(alpha, Rational(1));
        for (const auto& t : mono.terms) {
            part.terms.push_back(
                {t.multiplier.substitute(images), t.root.substitute(images) * half_root});
        }

        Rational weight(static_cast<long>(multinomial(alpha)));
        for (const auto& t : part.terms)
            lift.total.terms.push_back({t.multiplier * weight, t.root});
        lift.parts.push_back(std::move(part));
    }
    return lift;
}

}  // namespace sosdict::certs
