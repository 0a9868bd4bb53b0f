#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "gasnet/error.hpp"

namespace gasnet {

/// Time-dependent boundary parameter. Four profile kinds cover the boundary
/// data used by the bundled scenarios:
///   constant            v(t) = value
///   sinusoid            v(t) = base * (1 + fraction * sin(omega t + phase))
///   piecewise-linear    linear interpolation of (t, value) breakpoints,
///                       clamped outside the breakpoint range
///   tanh-ramp           v(t) = base + amplitude * (1 + tanh(rate * (t - center)))
/// When `period` is set, evaluation uses t mod period.
class Schedule {
  public:
    enum class Kind { Constant, Sinusoid, PiecewiseLinear, TanhRamp };

    Schedule() : kind_(Kind::Constant), base_(0.0) {}

    static Schedule constant(double value) {
        Schedule s;
        s.kind_ = Kind::Constant;
        s.base_ = value;
        return s;
    }

    static Schedule sinusoid(double base, double amplitude_fraction, double angular_frequency,
                             double phase = 0.0, double period = 0.0) {
        Schedule s;
        s.kind_ = Kind::Sinusoid;
        s.base_ = base;
        s.fraction_ = amplitude_fraction;
        s.omega_ = angular_frequency;
        s.phase_ = phase;
        s.period_ = period;
        return s;
    }

    static Schedule piecewise_linear(std::vector<std::pair<double, double>> points,
                                     double period = 0.0) {
        if (points.empty())
            throw Error(ErrorKind::Argument, "piecewise schedule needs at least one breakpoint");
        for (std::size_t i = 1; i < points.size(); ++i)
            if (!(points[i].first > points[i - 1].first))
                throw Error(ErrorKind::Argument,
                            "piecewise breakpoints must be strictly increasing in time");
        Schedule s;
        s.kind_ = Kind::PiecewiseLinear;
        s.points_ = std::move(points);
        s.period_ = period;
        return s;
    }

    static Schedule tanh_ramp(double base, double amplitude, double rate, double center,
                              double period = 0.0) {
        Schedule s;
        s.kind_ = Kind::TanhRamp;
        s.base_ = base;
        s.amplitude_ = amplitude;
        s.rate_ = rate;
        s.center_ = center;
        s.period_ = period;
        return s;
    }

    double operator()(double t) const {
        if (period_ > 0.0) {
            t = std::fmod(t, period_);
            if (t < 0.0) t += period_;
        }
        switch (kind_) {
            case Kind::Constant:
                return base_;
            case Kind::Sinusoid:
                return base_ * (1.0 + fraction_ * std::sin(omega_ * t + phase_));
            case Kind::PiecewiseLinear: {
                if (t <= points_.front().first) return points_.front().second;
                if (t >= points_.back().first) return points_.back().second;
                std::size_t hi = 1;
                while (points_[hi].first < t) ++hi;
                const auto& [t0, v0] = points_[hi - 1];
                const auto& [t1, v1] = points_[hi];
                double w = (t - t0) / (t1 - t0);
                return v0 + w * (v1 - v0);
            }
            case Kind::TanhRamp:
                return base_ + amplitude_ * (1.0 + std::tanh(rate_ * (t - center_)));
        }
        return base_;
    }

    Kind kind() const { return kind_; }
    double period() const { return period_; }
    double base() const { return base_; }
    double fraction() const { return fraction_; }
    double omega() const { return omega_; }
    double phase() const { return phase_; }
    double amplitude() const { return amplitude_; }
    double rate() const { return rate_; }
    double center() const { return center_; }
    const std::vector<std::pair<double, double>>& points() const { return points_; }

    /// Exact lower bound of the profile over all t >= 0 (used by validation).
    double min_value() const {
        switch (kind_) {
            case Kind::Constant:
                return base_;
            case Kind::Sinusoid:
                return std::min(base_ * (1.0 + fraction_), base_ * (1.0 - fraction_));
            case Kind::PiecewiseLinear: {
                double m = points_.front().second;
                for (const auto& [t, v] : points_) m = std::min(m, v);
                return m;
            }
            case Kind::TanhRamp:
                return std::min(base_, base_ + 2.0 * amplitude_);
        }
        return base_;
    }

    double max_value() const {
        switch (kind_) {
            case Kind::Constant:
                return base_;
            case Kind::Sinusoid:
                return std::max(base_ * (1.0 + fraction_), base_ * (1.0 - fraction_));
            case Kind::PiecewiseLinear: {
                double m = points_.front().second;
                for (const auto& [t, v] : points_) m = std::max(m, v);
                return m;
            }
            case Kind::TanhRamp:
                return std::max(base_, base_ + 2.0 * amplitude_);
        }
        return base_;
    }

    bool is_zero() const { return min_value() == 0.0 && max_value() == 0.0; }

  private:
    Kind kind_;
    double base_ = 0.0;
    double fraction_ = 0.0;
    double omega_ = 0.0;
    double phase_ = 0.0;
    double amplitude_ = 0.0;
    double rate_ = 0.0;
    double center_ = 0.0;
    double period_ = 0.0;
    std::vector<std::pair<double, double>> points_;
};

}  // namespace gasnet
