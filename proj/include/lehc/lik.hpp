#pragma once

#include "lehc/censor.hpp"
#include "lehc/dist.hpp"

#include <utility>

namespace lehc {

/// U = 1 + (e^{lambda t} - 1)^alpha and its partials up to third order.
///
/// Evaluated at a failure time (the U terms) or at the cap T (the V terms).
struct UVTerms {
    double U, U_a, U_l, U_aa, U_ll, U_al, U_aaa, U_lll, U_aal, U_all;
};

UVTerms uv_terms(double t, const Params& p);

/// Log-likelihood and partial derivatives; lij = d^{i+j} l / d alpha^i d lambda^j.
struct DerivBundle {
    double l;
    double l10, l01;
    double l20, l02, l11;
    double l30, l03, l21, l12;
};

double loglik(const CensoredSample& s, const Params& p);

/// (dl/d alpha, dl/d lambda).
std::pair<double, double> score(const CensoredSample& s, const Params& p);

DerivBundle deriv_bundle(const CensoredSample& s, const Params& p);

}  // namespace lehc
