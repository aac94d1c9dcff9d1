#include "kbgk/riemann.hpp"

#include <cmath>
#include <stdexcept>

namespace kbgk {

namespace {

double sound_speed(const EulerState& s, double gamma) {
    return std::sqrt(gamma * s.p / s.rho);
}

void check_state(const EulerState& s) {
    if (s.rho <= 0.0 || s.p <= 0.0)
        throw std::invalid_argument("riemann: states need positive density and pressure");
}

// One-sided wave function f_K(p) and its derivative (Toro's notation).
double wave_f(double p, const EulerState& s, double gamma) {
    if (p > s.p) {
        const double A = 2.0 / ((gamma + 1.0) * s.rho);
        const double B = (gamma - 1.0) / (gamma + 1.0) * s.p;
        return (p - s.p) * std::sqrt(A / (p + B));
    }
    const double a = sound_speed(s, gamma);
    return 2.0 * a / (gamma - 1.0) * (std::pow(p / s.p, (gamma - 1.0) / (2.0 * gamma)) - 1.0);
}

double wave_df(double p, const EulerState& s, double gamma) {
    if (p > s.p) {
        const double A = 2.0 / ((gamma + 1.0) * s.rho);
        const double B = (gamma - 1.0) / (gamma + 1.0) * s.p;
        return std::sqrt(A / (p + B)) * (1.0 - (p - s.p) / (2.0 * (p + B)));
    }
    const double a = sound_speed(s, gamma);
    return std::pow(p / s.p, -(gamma + 1.0) / (2.0 * gamma)) / (s.rho * a);
}

void check_vacuum(const EulerState& l, const EulerState& r, double gamma) {
    const double crit = 2.0 / (gamma - 1.0) * (sound_speed(l, gamma) + sound_speed(r, gamma));
    if (!(crit > r.u - l.u))
        throw std::runtime_error("riemann: vacuum-forming data unsupported");
}

void bracket(const EulerState& l, const EulerState& r, double gamma,
             double& p_lo, double& p_hi) {
    p_lo = 1e-14 * std::min(l.p, r.p);
    p_hi = std::max(l.p, r.p);
    while (pressure_function(p_hi, l, r, gamma) < 0.0) p_hi *= 2.0;
}

}  // namespace

double pressure_function(double p, const EulerState& left, const EulerState& right,
                         double gamma) {
    return wave_f(p, left, gamma) + wave_f(p, right, gamma) + (right.u - left.u);
}

StarState star_region(const EulerState& left, const EulerState& right, double gamma) {
    check_state(left);
    check_state(right);
    check_vacuum(left, right, gamma);

    double p_lo, p_hi;
    bracket(left, right, gamma, p_lo, p_hi);

    // Two-rarefaction initial guess, projected into the bracket.
    const double al = sound_speed(left, gamma);
    const double ar = sound_speed(right, gamma);
    const double z = (gamma - 1.0) / (2.0 * gamma);
    double p = std::pow((al + ar - 0.5 * (gamma - 1.0) * (right.u - left.u)) /
                            (al / std::pow(left.p, z) + ar / std::pow(right.p, z)),
                        1.0 / z);
    p = std::clamp(p, p_lo, p_hi);

    for (int it = 0; it < 200; ++it) {
        const double phi = pressure_function(p, left, right, gamma);
        if (phi > 0.0) p_hi = p; else p_lo = p;

        const double dphi = wave_df(p, left, gamma) + wave_df(p, right, gamma);
        double p_next = p - phi / dphi;
        if (!(p_next > p_lo && p_next < p_hi)) p_next = 0.5 * (p_lo + p_hi);

        const double change = std::abs(p_next - p) / (0.5 * (p_next + p));
        p = p_next;
        if (change < 1e-12) break;
    }

    StarState s;
    s.p = p;
    s.u = 0.5 * (left.u + right.u) +
          0.5 * (wave_f(p, right, gamma) - wave_f(p, left, gamma));
    return s;
}

StarState star_region_bisection(const EulerState& left, const EulerState& right,
                                double gamma, double tol) {
    check_state(left);
    check_state(right);
    check_vacuum(left, right, gamma);

    double p_lo, p_hi;
    bracket(left, right, gamma, p_lo, p_hi);
    if (pressure_function(p_lo, left, right, gamma) > 0.0)
        throw std::runtime_error("riemann: bisection bracket invalid");

    while ((p_hi - p_lo) > tol * p_hi) {
        const double mid = 0.5 * (p_lo + p_hi);
        if (pressure_function(mid, left, right, gamma) > 0.0) p_hi = mid; else p_lo = mid;
    }
    const double p = 0.5 * (p_lo + p_hi);
    StarState s;
    s.p = p;
    s.u = 0.5 * (left.u + right.u) +
          0.5 * (wave_f(p, right, gamma) - wave_f(p, left, gamma));
    return s;
}

EulerState sample_at(const EulerState& left, const EulerState& right, const StarState& star,
                     double gamma, double xi) {
    const double g1 = (gamma - 1.0) / (gamma + 1.0);
    const double g2 = 2.0 / (gamma + 1.0);

    if (xi <= star.u) {
        // Left of the contact.
        const EulerState& s = left;
        const double a = sound_speed(s, gamma);
        if (star.p > s.p) {
            // Left shock.
            const double pr = star.p / s.p;
            const double S = s.u - a * std::sqrt((gamma + 1.0) / (2.0 * gamma) * pr +
                                                 (gamma - 1.0) / (2.0 * gamma));
            if (xi < S) return s;
            return {s.rho * (pr + g1) / (g1 * pr + 1.0), star.u, star.p};
        }
        // Left rarefaction.
        const double a_star = a * std::pow(star.p / s.p, (gamma - 1.0) / (2.0 * gamma));
        const double head = s.u - a;
        const double tail = star.u - a_star;
        if (xi < head) return s;
        if (xi > tail)
            return {s.rho * std::pow(star.p / s.p, 1.0 / gamma), star.u, star.p};
        const double u = g2 * (a + 0.5 * (gamma - 1.0) * s.u + xi);
        const double c = g2 * (a + 0.5 * (gamma - 1.0) * (s.u - xi));
        return {s.rho * std::pow(c / a, 2.0 / (gamma - 1.0)), u,
                s.p * std::pow(c / a, 2.0 * gamma / (gamma - 1.0))};
    }

    // Right of the contact.
    const EulerState& s = right;
    const double a = sound_speed(s, gamma);
    if (star.p > s.p) {
        // Right shock.
        const double pr = star.p / s.p;
        const double S = s.u + a * std::sqrt((gamma + 1.0) / (2.0 * gamma) * pr +
                                             (gamma - 1.0) / (2.0 * gamma));
        if (xi > S) return s;
        return {s.rho * (pr + g1) / (g1 * pr + 1.0), star.u, star.p};
    }
    // Right rarefaction.
    const double a_star = a * std::pow(star.p / s.p, (gamma - 1.0) / (2.0 * gamma));
    const double head = s.u + a;
    const double tail = star.u + a_star;
    if (xi > head) return s;
    if (xi < tail)
        return {s.rho * std::pow(star.p / s.p, 1.0 / gamma), star.u, star.p};
    const double u = g2 * (-a + 0.5 * (gamma - 1.0) * s.u + xi);
    const double c = g2 * (a - 0.5 * (gamma - 1.0) * (s.u - xi));
    return {s.rho * std::pow(c / a, 2.0 / (gamma - 1.0)), u,
            s.p * std::pow(c / a, 2.0 * gamma / (gamma - 1.0))};
}

std::vector<EulerState> sample_solution(const EulerState& left, const EulerState& right,
                                        double gamma, double x0, double t,
                                        std::span<const double> xs) {
    if (t <= 0.0) throw std::invalid_argument("sample_solution: t must be positive");
    const StarState star = star_region(left, right, gamma);
    std::vector<EulerState> out;
    out.reserve(xs.size());
    for (double x : xs) out.push_back(sample_at(left, right, star, gamma, (x - x0) / t));
    return out;
}

bool shock_position(const EulerState& left, const EulerState& right, double gamma,
                    double x0, double t, bool right_wave, double& x_shock) {
    const StarState star = star_region(left, right, gamma);
    const EulerState& s = right_wave ? right : left;
    if (!(star.p > s.p)) return false;
    const double a = sound_speed(s, gamma);
    const double pr = star.p / s.p;
    const double m = a * std::sqrt((gamma + 1.0) / (2.0 * gamma) * pr +
                                   (gamma - 1.0) / (2.0 * gamma));
    const double S = right_wave ? s.u + m : s.u - m;
    x_shock = x0 + S * t;
    return true;
}

}  // namespace kbgk
