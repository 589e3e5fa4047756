#pragma once

// Explicit instances: the rank-2 pair where X_{tau,a} is all of H_{tau_H},
// and the rank-6 diagonal example where A_0 = A_1-type shortcuts break down.

#include "ggp/transversality.hpp"

namespace ggp {

struct RankTwoCheck {
    std::size_t x_points = 0;
    std::size_t centralizer_size = 0;
    bool a_outside_hz = false;
    bool closed_form_matches = false;  // a y = h b with h = diag(1/y1, 1), b = y1 tau
    bool doubly_tangential_everywhere = false;
    bool ok() const {
        return a_outside_hz && x_points == centralizer_size && closed_form_matches && doubly_tangential_everywhere;
    }
};

// tau = a = antidiagonal(1, 1) over Z/p^m.
RankTwoCheck check_rank_two_antidiagonal(const LocalRing& ring);

struct Gl6Witness {
    std::uint32_t p = 17;
    i64 alpha = 6;  // alpha^2 = 2 mod 17
    Matrix<Zmod> tau;  // in the standard frame
    Matrix<Zmod> a;
    Matrix<Zmod> frame;  // S: standard coordinates = S * original coordinates
    Zmod A0, B0, A1;
    bool a0_b0_zero = false;
    bool a1_is_minus_alpha = false;
    bool mu_one_h_is_one = false;
    bool mu_tau_h_diagonal = false;  // diag(alpha, alpha+1, alpha+2, alpha, alpha+1, alpha+2)
    bool p_tau_h_annihilates = false;
    bool center_in_x = false;
    bool x_proper = false;  // some point of H_{tau_H} is missing from X
    Matrix<Zmod> missing_point;
    bool a_outside_hz = false;
    bool ok() const {
        return a0_b0_zero && a1_is_minus_alpha && mu_one_h_is_one && mu_tau_h_diagonal && p_tau_h_annihilates &&
               center_in_x && x_proper && a_outside_hz;
    }
};

// The diagonal rank-6 example with alpha a square root of 2, realised over
// F_17 (alpha = 6) and conjugated so that e, e* become the standard frame.
Gl6Witness gl6_witness(std::uint32_t p = 17, i64 alpha = 6);

}  // namespace ggp
