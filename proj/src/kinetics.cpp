#include "polariton/kinetics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

namespace polariton {

void PumpSpec::validate() const {
    if (!(p0 >= 0.0) || !std::isfinite(p0)) throw DomainError("pump.p0 must be non-negative");
    if (!(k_p >= 0.0) || !std::isfinite(k_p)) throw DomainError("pump.k_p must be non-negative");
    if (!(width > 0.0)) throw DomainError("pump.Gamma must be positive");
    if (!(t0 > 0.0)) throw DomainError("pump.t0 must be positive");
}

namespace {

double pump_envelope(std::size_t node, const PumpSpec& spec, const KGrid& grid) {
    const double center = grid.dispersion().lower_polariton_energy(spec.k_p);
    const double z = (grid.energy(node) - center) / spec.width;
    return spec.p0 * std::exp(-0.5 * z * z);
}

}  // namespace

double pump_rate(std::size_t node, double t, const PumpSpec& spec, const KGrid& grid) {
    if (!(t >= 0.0)) throw DomainError("pump time must be non-negative");
    return pump_envelope(node, spec, grid) * std::tanh(t / spec.t0);
}

// ---------------------------------------------------------------------------

namespace {
constexpr std::size_t kChunks = 64;
}

BoltzmannRhs::BoltzmannRhs(const KGrid& grid, const PhononKernel& phonon, const PairChannels& pp,
                           PumpSpec pump, Terms terms)
    : grid_(&grid), phonon_(&phonon), pp_(&pp), pump_(pump), terms_(terms) {
    pump_.validate();
    const std::size_t n = grid.size();
    if (phonon.n != n) throw std::invalid_argument("phonon kernel does not match the grid");
    envelope_.resize(n);
    inv_tau_.resize(n);
    weights_.assign(grid.weights().begin(), grid.weights().end());
    inv_weights_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        envelope_[i] = pump_envelope(i, pump_, grid);
        inv_tau_[i] = 1.0 / grid.point(i).tau;
        inv_weights_[i] = 1.0 / weights_[i];
    }
    const std::size_t total = pp.channels.size();
    const std::size_t chunks = std::max<std::size_t>(1, std::min(kChunks, total));
    chunk_begin_.resize(chunks + 1);
    for (std::size_t c = 0; c <= chunks; ++c) chunk_begin_[c] = total * c / chunks;
    chunk_buffers_.assign(chunks * n, 0.0);
}

void BoltzmannRhs::add_pph(std::span<const double> n, std::span<double> out) const {
    const std::size_t size = n.size();
    const auto& A = phonon_->dressed;
    for (std::size_t i = 0; i < size; ++i) {
        double gain = 0.0;
        double loss = 0.0;
        for (std::size_t j = 0; j < size; ++j) {
            gain += weights_[j] * A[j * size + i] * n[j];
            loss += weights_[j] * A[i * size + j] * (1.0 + n[j]);
        }
        out[i] += (1.0 + n[i]) * gain - n[i] * loss;
    }
}

void BoltzmannRhs::add_pp(std::span<const double> n, std::span<double> out) const {
    const std::size_t size = n.size();
    const std::size_t chunks = chunk_begin_.size() - 1;
    const auto& channels = pp_->channels;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t cc = 0; cc < static_cast<std::ptrdiff_t>(chunks); ++cc) {
        const auto c = static_cast<std::size_t>(cc);
        double* buf = chunk_buffers_.data() + c * size;
        std::fill(buf, buf + size, 0.0);
        for (std::size_t idx = chunk_begin_[c]; idx < chunk_begin_[c + 1]; ++idx) {
            const PairChannel& ch = channels[idx];
            const double ni = n[ch.i], nj = n[ch.j], nl = n[ch.l], nm = n[ch.m];
            const double F = ni * nj * (1.0 + nl) * (1.0 + nm) - nl * nm * (1.0 + ni) * (1.0 + nj);
            const double flux = ch.weight * F;
            buf[ch.i] -= flux;
            buf[ch.j] -= flux;
            buf[ch.l] += flux;
            buf[ch.m] += flux;
        }
    }
    for (std::size_t x = 0; x < size; ++x) {
        double sum = 0.0;
        for (std::size_t c = 0; c < chunks; ++c) sum += chunk_buffers_[c * size + x];
        out[x] += sum * inv_weights_[x];
    }
}

void BoltzmannRhs::operator()(double t, std::span<const double> n, std::span<double> dndt) const {
    const std::size_t size = n.size();
    const double ramp = std::tanh(t / pump_.t0);
    for (std::size_t i = 0; i < size; ++i) {
        double v = 0.0;
        if (terms_.pump) v += envelope_[i] * ramp;
        if (terms_.decay) v -= n[i] * inv_tau_[i];
        dndt[i] = v;
    }
    if (terms_.pph) add_pph(n, dndt);
    if (terms_.pp && !pp_->channels.empty()) add_pp(n, dndt);
}

void BoltzmannRhs::jacobian(std::span<const double> n, std::span<double> out) const {
    const std::size_t size = n.size();
    std::fill(out.begin(), out.end(), 0.0);
    if (terms_.decay) {
        for (std::size_t i = 0; i < size; ++i) out[i * size + i] -= inv_tau_[i];
    }
    if (terms_.pph) {
        const auto& A = phonon_->dressed;
        for (std::size_t i = 0; i < size; ++i) {
            double* row = out.data() + i * size;
            double gain = 0.0;
            double loss = 0.0;
            for (std::size_t j = 0; j < size; ++j) {
                const double in = weights_[j] * A[j * size + i];
                const double outr = weights_[j] * A[i * size + j];
                gain += in * n[j];
                loss += outr * (1.0 + n[j]);
                row[j] += (1.0 + n[i]) * in - n[i] * outr;
            }
            row[i] += gain - loss;
        }
    }
    if (terms_.pp) {
        for (const PairChannel& ch : pp_->channels) {
            const double ni = n[ch.i], nj = n[ch.j], nl = n[ch.l], nm = n[ch.m];
            const double pl = 1.0 + nl, pm = 1.0 + nm, pi = 1.0 + ni, pj = 1.0 + nj;
            const std::array<std::uint32_t, 4> col = {ch.i, ch.j, ch.l, ch.m};
            const std::array<double, 4> dF = {
                ch.weight * (nj * pl * pm - nl * nm * pj),
                ch.weight * (ni * pl * pm - nl * nm * pi),
                ch.weight * (ni * nj * pm - nm * pi * pj),
                ch.weight * (ni * nj * pl - nl * pi * pj),
            };
            const std::array<double, 4> row = {-inv_weights_[ch.i], -inv_weights_[ch.j],
                                               inv_weights_[ch.l], inv_weights_[ch.m]};
            for (std::size_t r = 0; r < 4; ++r) {
                double* dst = out.data() + std::size_t{col[r]} * size;
                for (std::size_t c = 0; c < 4; ++c) dst[col[c]] += row[r] * dF[c];
            }
        }
    }
}

void BoltzmannRhs::time_derivative(double t, std::span<double> out) const {
    const double sech = 1.0 / std::cosh(t / pump_.t0);
    const double d = terms_.pump ? sech * sech / pump_.t0 : 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = envelope_[i] * d;
}

std::vector<double> rhs(const KineticState& state, const BoltzmannRhs& system) {
    std::vector<double> out(state.n.size());
    system(state.t, state.n, out);
    return out;
}

std::vector<double> collision_pph(const KineticState& state, const PhononKernel& kernel,
                                  const KGrid& grid) {
    PairChannels none;
    BoltzmannRhs system(grid, kernel, none, PumpSpec{}, Terms{false, false, true, false});
    return rhs(state, system);
}

std::vector<double> collision_pp(const KineticState& state, const PairChannels& channels,
                                 const KGrid& grid) {
    PhononKernel empty;
    empty.n = grid.size();
    empty.base.assign(empty.n * empty.n, 0.0);
    empty.dressed = empty.base;
    BoltzmannRhs system(grid, empty, channels, PumpSpec{}, Terms{false, true, false, false});
    return rhs(state, system);
}

// ---------------------------------------------------------------------------

void IntegratorSettings::validate() const {
    if (!(rel_tol > 1.0e-10 && rel_tol < 1.0e-2)) {
        throw DomainError("integrator tolerance must lie in (1e-10, 1e-2)");
    }
    if (!(abs_tol > 0.0)) throw DomainError("integrator abs_tol must be positive");
    if (!(initial_step > 0.0 && max_step > 0.0 && min_step > 0.0)) {
        throw DomainError("integrator step sizes must be positive");
    }
    if (!(output_interval > 0.0)) throw DomainError("output interval must be positive");
    if (!(snapshot_interval >= 0.0)) throw DomainError("snapshot interval must be non-negative");
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

Observables observe(double t, std::span<const double> n, const KGrid& grid, bool snapshot) {
    Observables o;
    o.t = t;
    o.n0 = n[0];
    o.N_tot = grid.total_number(n);
    if (snapshot) o.occupations.assign(n.begin(), n.end());
    return o;
}

std::string describe_state(double t, double h, std::span<const double> y, std::size_t worst) {
    std::ostringstream os;
    os.precision(17);
    os << "t = " << t << " ps, h = " << h << " ps, worst node " << worst << " (n = "
       << (worst < y.size() ? y[worst] : NAN) << ")";
    return os.str();
}

}  // namespace

namespace {

// Shared bookkeeping for both steppers: dense output, guards, diagnostics.
class Stepper {
public:
    Stepper(const BoltzmannRhs& system, const KineticState& initial, double t_end,
            const IntegratorSettings& settings)
        : system_(system), settings_(settings), t_end_(t_end), n_(system.size()),
          grid_(system.grid()) {
        t = initial.t;
        y = initial.n;
        next_output_ = t;
        next_snapshot_ = settings.snapshot_interval > 0.0 ? t : INFINITY;
        emit(t, y);
        next_output_ += settings.output_interval;
    }

    void check_step(double h, std::span<const double> err_vec) const {
        if (h < settings_.min_step && t_end_ - t > settings_.min_step) {
            std::size_t worst = 0;
            double worst_err = -1.0;
            for (std::size_t i = 0; i < err_vec.size(); ++i) {
                if (std::abs(err_vec[i]) > worst_err) {
                    worst_err = std::abs(err_vec[i]);
                    worst = i;
                }
            }
            throw NumericalError("step size underflow at " + describe_state(t, h, y, worst));
        }
    }

    double error_norm(std::span<const double> y_new, std::span<const double> y_err,
                      double h) const {
        double err_sum = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            if (!std::isfinite(y_new[i])) {
                throw NumericalError("non-finite occupation at " + describe_state(t, h, y, i));
            }
            const double scale =
                settings_.abs_tol + settings_.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
            const double r = y_err[i] / scale;
            err_sum += r * r;
        }
        const double err = std::sqrt(err_sum / static_cast<double>(n_));
        if (!std::isfinite(err)) {
            throw NumericalError("non-finite error estimate at " + describe_state(t, h, y, 0));
        }
        return err;
    }

    // False when the step must be retried because an occupation went negative.
    bool accept_sign(std::span<double> y_new, IntegratorStats& stats) const {
        for (std::size_t i = 0; i < n_; ++i) {
            if (y_new[i] < -settings_.negative_floor) {
                ++stats.negative_rejections;
                ++stats.rejected;
                return false;
            }
        }
        for (std::size_t i = 0; i < n_; ++i) {
            if (y_new[i] < 0.0) {
                y_new[i] = 0.0;
                ++stats.floored_values;
            }
        }
        return true;
    }

    // Cubic Hermite samples inside (t, t + h].
    void interpolate(double h, std::span<const double> f0, std::span<const double> y_new,
                     std::span<const double> f1) {
        const double t_next = t + h;
        while (next_output_ <= t_next + 1.0e-9 * std::max(1.0, t_next) &&
               next_output_ <= t_end_ + 1.0e-9) {
            const double theta = std::min(1.0, (next_output_ - t) / h);
            const double h00 = (1.0 + 2.0 * theta) * (1.0 - theta) * (1.0 - theta);
            const double h10 = theta * (1.0 - theta) * (1.0 - theta);
            const double h01 = theta * theta * (3.0 - 2.0 * theta);
            const double h11 = theta * theta * (theta - 1.0);
            scratch_.resize(n_);
            for (std::size_t i = 0; i < n_; ++i) {
                scratch_[i] = std::max(0.0, h00 * y[i] + h10 * h * f0[i] + h01 * y_new[i] +
                                                h11 * h * f1[i]);
            }
            emit(next_output_, scratch_);
            next_output_ += settings_.output_interval;
        }
    }

    Trajectory finish(IntegratorStats stats) {
        if (traj_.samples.back().t < t_end_ - 1.0e-9 * std::max(1.0, t_end_)) emit(t_end_, y);
        if (traj_.samples.back().occupations.empty()) traj_.samples.back().occupations = y;
        traj_.final_state.t = t;
        traj_.final_state.n = y;
        traj_.stats = stats;
        return std::move(traj_);
    }

    double t;
    std::vector<double> y;

private:
    void emit(double time, std::span<const double> values) {
        const bool snap = time >= next_snapshot_ - 1.0e-9;
        traj_.samples.push_back(observe(time, values, grid_, snap));
        if (snap) next_snapshot_ += settings_.snapshot_interval;
    }

    const BoltzmannRhs& system_;
    const IntegratorSettings& settings_;
    double t_end_;
    std::size_t n_;
    const KGrid& grid_;
    Trajectory traj_;
    double next_output_;
    double next_snapshot_;
    std::vector<double> scratch_;
};

Trajectory evolve_dopri5(const BoltzmannRhs& system, const KineticState& initial, double t_end,
                         const IntegratorSettings& settings) {
    const std::size_t n = system.size();
    Stepper st(system, initial, t_end, settings);
    IntegratorStats stats;
    std::vector<double>& y = st.y;
    std::vector<double> y_new(n), y_err(n), tmp(n);
    std::array<std::vector<double>, 7> k;
    for (auto& v : k) v.resize(n);

    system(st.t, y, k[0]);
    ++stats.rhs_evaluations;

    double h = std::min(settings.initial_step, t_end - st.t);
    double err_old = 1.0e-4;
    bool last_rejected = false;

    auto stage = [&](auto&& combine) {
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * combine(i);
    };

    while (st.t < t_end) {
        const double t = st.t;
        h = std::min({h, settings.max_step, t_end - t});
        st.check_step(h, y_err);

        stage([&](std::size_t i) { return a21 * k[0][i]; });
        system(t + c2 * h, tmp, k[1]);
        stage([&](std::size_t i) { return a31 * k[0][i] + a32 * k[1][i]; });
        system(t + c3 * h, tmp, k[2]);
        stage([&](std::size_t i) { return a41 * k[0][i] + a42 * k[1][i] + a43 * k[2][i]; });
        system(t + c4 * h, tmp, k[3]);
        stage([&](std::size_t i) {
            return a51 * k[0][i] + a52 * k[1][i] + a53 * k[2][i] + a54 * k[3][i];
        });
        system(t + c5 * h, tmp, k[4]);
        stage([&](std::size_t i) {
            return a61 * k[0][i] + a62 * k[1][i] + a63 * k[2][i] + a64 * k[3][i] + a65 * k[4][i];
        });
        system(t + h, tmp, k[5]);
        for (std::size_t i = 0; i < n; ++i) {
            y_new[i] = y[i] + h * (b1 * k[0][i] + b3 * k[2][i] + b4 * k[3][i] + b5 * k[4][i] +
                                   b6 * k[5][i]);
        }
        system(t + h, y_new, k[6]);
        stats.rhs_evaluations += 6;

        for (std::size_t i = 0; i < n; ++i) {
            y_err[i] = h * (e1 * k[0][i] + e3 * k[2][i] + e4 * k[3][i] + e5 * k[4][i] +
                            e6 * k[5][i] + e7 * k[6][i]);
        }
        const double err = st.error_norm(y_new, y_err, h);

        if (err > 1.0) {
            ++stats.rejected;
            h /= std::min(5.0, std::pow(err, 0.17) / 0.9);
            last_rejected = true;
            continue;
        }
        if (!st.accept_sign(y_new, stats)) {
            h *= 0.5;
            last_rejected = true;
            continue;
        }

        st.interpolate(h, k[0], y_new, k[6]);
        ++stats.accepted;
        st.t = t + h;
        y.swap(y_new);
        k[0].swap(k[6]);

        const double err_c = std::max(err, 1.0e-10);
        double fac = std::pow(err_c, 0.17) / std::pow(err_old, 0.04) / 0.9;
        fac = std::clamp(fac, 0.1, 5.0);
        double h_next = h / fac;
        if (last_rejected) h_next = std::min(h_next, h);
        err_old = std::max(err, 1.0e-4);
        last_rejected = false;
        h = h_next;
    }
    return st.finish(stats);
}

// Shampine's L-stable Rosenbrock 2(3) pair (the ode23s scheme) with an analytic Jacobian.
Trajectory evolve_rosenbrock(const BoltzmannRhs& system, const KineticState& initial,
                             double t_end, const IntegratorSettings& settings) {
    const std::size_t n = system.size();
    const Eigen::Index dim = static_cast<Eigen::Index>(n);
    Stepper st(system, initial, t_end, settings);
    IntegratorStats stats;
    std::vector<double>& y = st.y;

    const double d = 1.0 / (2.0 + std::sqrt(2.0));
    const double e32 = 6.0 + std::sqrt(2.0);

    std::vector<double> jac(n * n), f0(n), f1(n), f2(n), dfdt(n), tmp(n), y_new(n), y_err(n);
    Eigen::MatrixXd W(dim, dim);
    Eigen::VectorXd k1(dim), k2(dim), k3(dim), rhs_vec(dim);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;

    system(st.t, y, f0);
    ++stats.rhs_evaluations;

    double h = std::min(settings.initial_step, t_end - st.t);
    bool jac_current = false;
    bool last_rejected = false;

    while (st.t < t_end) {
        const double t = st.t;
        h = std::min({h, settings.max_step, t_end - t});
        st.check_step(h, y_err);

        if (!jac_current) {
            system.jacobian(y, jac);
            system.time_derivative(t, dfdt);
            jac_current = true;
        }
        const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                             Eigen::RowMajor>>
            J(jac.data(), dim, dim);
        W = -h * d * J;
        W.diagonal().array() += 1.0;
        lu.compute(W);

        for (std::size_t i = 0; i < n; ++i) rhs_vec[i] = f0[i] + h * d * dfdt[i];
        k1 = lu.solve(rhs_vec);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
        system(t + 0.5 * h, tmp, f1);
        for (std::size_t i = 0; i < n; ++i) rhs_vec[i] = f1[i] - k1[i];
        k2 = lu.solve(rhs_vec);
        k2 += k1;
        for (std::size_t i = 0; i < n; ++i) y_new[i] = y[i] + h * k2[i];
        system(t + h, y_new, f2);
        for (std::size_t i = 0; i < n; ++i) {
            rhs_vec[i] = f2[i] - e32 * (k2[i] - f1[i]) - 2.0 * (k1[i] - f0[i]) + h * d * dfdt[i];
        }
        k3 = lu.solve(rhs_vec);
        stats.rhs_evaluations += 2;
        for (std::size_t i = 0; i < n; ++i) y_err[i] = h / 6.0 * (k1[i] - 2.0 * k2[i] + k3[i]);

        const double err = st.error_norm(y_new, y_err, h);
        if (err > 1.0) {
            ++stats.rejected;
            h *= std::max(0.2, 0.8 * std::pow(err, -1.0 / 3.0));
            last_rejected = true;
            continue;
        }
        const std::size_t floored = stats.floored_values;
        if (!st.accept_sign(y_new, stats)) {
            h *= 0.5;
            last_rejected = true;
            continue;
        }
        // f at the floored state keeps the next step and the interpolant consistent.
        if (stats.floored_values != floored) {
            system(t + h, y_new, f2);
            ++stats.rhs_evaluations;
        }
        st.interpolate(h, f0, y_new, f2);
        ++stats.accepted;
        st.t = t + h;
        y.swap(y_new);
        f0.swap(f2);
        jac_current = false;

        double fac = 0.8 * std::pow(std::max(err, 1.0e-10), -1.0 / 3.0);
        fac = std::clamp(fac, 0.2, 5.0);
        if (last_rejected) fac = std::min(fac, 1.0);
        last_rejected = false;
        h *= fac;
    }
    return st.finish(stats);
}

}  // namespace

std::string_view to_string(Method method) {
    return method == Method::dopri5 ? "dopri5" : "rosenbrock23";
}

Method method_from_string(std::string_view name) {
    if (name == "dopri5") return Method::dopri5;
    if (name == "rosenbrock23") return Method::rosenbrock23;
    throw DomainError("unknown integrator method '" + std::string(name) + "'");
}

Trajectory evolve(const BoltzmannRhs& system, const KineticState& initial, double t_end,
                  const IntegratorSettings& settings) {
    settings.validate();
    if (!(t_end > initial.t)) throw DomainError("t_end must exceed the initial time");
    if (initial.n.size() != system.size()) {
        throw std::invalid_argument("initial state size mismatch");
    }
    if (settings.method == Method::rosenbrock23) {
        return evolve_rosenbrock(system, initial, t_end, settings);
    }
    return evolve_dopri5(system, initial, t_end, settings);
}

StationaryResult detect_stationary(std::span<const Observables> samples, double window,
                                   double eps, double floor) {
    StationaryResult result;
    if (samples.size() < 2 || !(window > 0.0)) return result;
    const double t_start = samples.front().t;
    auto scaled_slope = [&](double a, double b, double dt, double reference) {
        const double ref = std::max(std::abs(reference), floor);
        const double da = std::abs(a) < floor ? 0.0 : a;
        const double db = std::abs(b) < floor ? 0.0 : b;
        return std::abs(db - da) / dt * window / ref;
    };
    std::size_t begin = 0;
    for (std::size_t end = 1; end < samples.size(); ++end) {
        const double t_end = samples[end].t;
        if (t_end - t_start < window - 1.0e-9) continue;
        while (samples[begin].t < t_end - window - 1.0e-9) ++begin;
        double worst = 0.0;
        for (std::size_t s = begin; s < end; ++s) {
            const double dt = samples[s + 1].t - samples[s].t;
            if (!(dt > 0.0)) continue;
            worst = std::max(worst, scaled_slope(samples[s].N_tot, samples[s + 1].N_tot, dt,
                                                 samples[end].N_tot));
            worst = std::max(worst, scaled_slope(samples[s].n0, samples[s + 1].n0, dt,
                                                 samples[end].n0));
        }
        if (worst < eps) {
            result.reached = true;
            result.time = t_end;
            result.n0 = samples[end].n0;
            result.N_tot = samples[end].N_tot;
            return result;
        }
    }
    result.n0 = samples.back().n0;
    result.N_tot = samples.back().N_tot;
    return result;
}

}  // namespace polariton
