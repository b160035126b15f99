#pragma once
//
// sosdict/certcheck.hpp
//
// Exact sum-of-squares certificates over the rationals. A certificate
// asserts target = sum_j multiplier_j * root_j^2 with every multiplier a
// polynomial with nonnegative coefficients, so nonnegativity of the target
// on the nonnegative orthant (or everywhere, when the multipliers are
// constants) follows by inspection. Verification re-expands the right-hand
// side with exact arithmetic and compares coefficient lists; there is no
// tolerance anywhere in this module.
//

#include <string>
#include <vector>

#include "sosdict/polynomial.hpp"

namespace sosdict::certs {

struct SosTerm {
    PolyQ multiplier;
    PolyQ root;
};

struct SosCertificate {
    PolyQ target;
    std::vector<SosTerm> terms;
    std::string label;
};

// exact re-expansion of sum multiplier * root^2
PolyQ expand(const SosCertificate& cert);

// true iff the expansion equals the target coefficient-for-coefficient and
// every multiplier has only nonnegative coefficients
bool verify(const SosCertificate& cert);

// Chain of symmetrized power averages R_0 >= R_1 >= ... >= R_{n-1}
// interpolating between the power mean (1/n) sum w_i^n and the product
// w_1...w_n, with one certificate per adjacent difference.
struct AmgmChain {
    std::vector<PolyQ> averages;
    std::vector<SosCertificate> steps;
};

// variable count capped at kMaxAmgmVars; permutation enumeration beyond
// that is not a desk-scale computation
inline constexpr int kMaxAmgmVars = 6;

AmgmChain amgm_chain(int n);

// certificate for sum_i w_i^|alpha| - w^alpha >= 0 on the nonnegative
// orthant, assembled from the chain at size |alpha| plus slack terms
SosCertificate monomial_certificate(const MultiIndex& alpha);

// Degree-lift bundle: for even d and s >= 1, certifies
//   (sum_i v_i^(d-2)s) * (||v||_2^2)^s  -  (||v||_d^d)^s  >= 0
// as a weighted sum of per-monomial certificates, each multiplied through
// by an explicit square so the whole bundle is valid on all of R^n.
struct HolderLift {
    int nvars = 0;
    int d = 0;
    int s = 0;
    std::vector<SosCertificate> parts;
    SosCertificate total;
};

HolderLift holder_lift_certificate(int n, int d, int s);

}  // namespace sosdict::certs
