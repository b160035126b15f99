#pragma once
//
// sosdict/gram.hpp
//
// Numeric sum-of-squares domination: decide whether bound - q admits a
// Gram matrix representation at a given degree, and if so hand back the
// squares recovered from its eigendecomposition.
//

#include <optional>
#include <vector>

#include "sosdict/polynomial.hpp"

namespace sosdict {

struct GramCertificate {
    PolyF target;                 // the certified difference bound - q
    std::vector<PolyF> squares;   // target == sum squares[j]^2 up to residual
    double residual = 0.0;        // max |coefficient mismatch| of the expansion
};

// true (with certificate) iff bound - q is a sum of squares with Gram basis
// degree at most degree/2, up to the solver tolerance
std::optional<GramCertificate> sos_dominates(const PolyF& q, const PolyF& bound, int degree,
                                             double tol = 1e-7);

}  // namespace sosdict
