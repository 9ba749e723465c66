#ifndef UCIMON_OU_HPP
#define UCIMON_OU_HPP

#include <filesystem>
#include <iosfwd>

#include "ucimon/ais.hpp"
#include "ucimon/geo.hpp"
#include "ucimon/kinematics.hpp"

namespace ucimon {

/// Independent Ornstein-Uhlenbeck velocity processes on the east and north
/// axes of a local plane, anchored at the last known fix.
struct OuModel {
    Vec2 mu;      // long-run mean velocity, m/s
    Vec2 gamma;   // mean-reversion rate, 1/s
    Vec2 sigma;   // velocity diffusion, m/s per sqrt(s)
    GeoPoint anchor;
    double anchor_t = 0.0;  // epoch seconds
    Vec2 v0;      // velocity at the anchor, m/s

    friend bool operator==(const OuModel&, const OuModel&) = default;
};

/// Symmetric 2x2 position covariance in m^2 (east/north).
struct Cov2 {
    double ee = 0.0;
    double en = 0.0;
    double nn = 0.0;

    double max_eigenvalue() const;
    double min_eigenvalue() const;
};

struct Prediction {
    double t = 0.0;
    GeoPoint mean_pos;
    Vec2 mean_velocity;
    Cov2 cov;
    double radius_3sigma_m = 0.0;
};

/// Closed-form moments of one OU axis after `dt` seconds, conditional on the
/// starting velocity. Position is relative to the start.
struct OuMoments {
    double mean_pos = 0.0;
    double mean_vel = 0.0;
    double var_pos = 0.0;
    double var_vel = 0.0;
    double cov_pos_vel = 0.0;
};

OuMoments ou_moments(double mu, double gamma, double sigma, double v0, double dt);

/// Plane-level prediction: offset from the anchor and velocity after `dt`.
struct PlaneState {
    Vec2 offset;
    Vec2 velocity;
};
PlaneState predict_plane(const OuModel& model, double dt);

/// Throws InputError when t precedes the anchor.
Prediction predict(const OuModel& model, double t);

inline constexpr double kGammaMin = 1e-8;
inline constexpr double kGammaMax = 1e-1;
inline constexpr double kSigmaFloor = 1e-9;

/// Exact maximum-likelihood fit from position fixes inside `window`.
/// Positions are projected on a plane centered at the fixes' centroid and
/// each axis is fitted as an integrated OU process (velocity hidden, positions
/// observed exactly) with a scalar Kalman filter; mu and sigma are profiled
/// out and gamma is found by a bounded search on log(gamma). The anchor is the
/// last fix and v0 the filtered velocity there.
///
/// Zero-noise tracks (finite-difference velocities all equal) return the
/// limiting model: gamma at kGammaMin, sigma at kSigmaFloor, mu the observed
/// velocity. A track whose velocities are all zero carries no information and
/// raises InsufficientData, as do windows with fewer than 10 fixes.
OuModel fit_ou(const Track& track, TimeWindow window);

inline constexpr std::size_t kOuMinPoints = 10;

/// Key-value text: mu_e, mu_n, gamma_e, gamma_n, sigma_e, sigma_n,
/// anchor_lat, anchor_lon, anchor_t, v0_e, v0_n.
void save_ou_model(std::ostream& out, const OuModel& model);
OuModel load_ou_model(std::istream& in);

}  // namespace ucimon

#endif  // UCIMON_OU_HPP
