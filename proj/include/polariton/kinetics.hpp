#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "polariton/grid.hpp"
#include "polariton/scattering.hpp"

namespace polariton {

/// Raised when time integration cannot continue (step underflow, NaN).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Quasi-stationary pump: Gaussian in energy around E(k_p), ramped by tanh(t / t0).
struct PumpSpec {
    double p0 = 0.0;      // ps^-1 per mode at the envelope peak
    double k_p = 0.02;    // nm^-1
    double width = 0.5;   // Gamma, meV
    double t0 = 50.0;     // ps

    void validate() const;
    bool operator==(const PumpSpec&) const = default;
};

double pump_rate(std::size_t node, double t, const PumpSpec& spec, const KGrid& grid);

struct KineticState {
    double t = 0.0;
    std::vector<double> n;  // occupation per mode; n[0] is the condensate
};

struct Observables {
    double t = 0.0;
    double n0 = 0.0;
    double N_tot = 0.0;
    std::vector<double> occupations;  // filled on snapshot rows only
};

/// Which terms enter the right-hand side.
struct Terms {
    bool pump = true;
    bool pp = true;
    bool pph = true;
    bool decay = true;
    bool operator==(const Terms&) const = default;
};

/// Net p-ph in/out rates per mode (ps^-1).
std::vector<double> collision_pph(const KineticState& state, const PhononKernel& kernel,
                                  const KGrid& grid);
/// Net p-p rates per mode (ps^-1).
std::vector<double> collision_pp(const KineticState& state, const PairChannels& channels,
                                 const KGrid& grid);

/// Boltzmann right-hand side: pump + p-p + p-ph - n / tau.
class BoltzmannRhs {
public:
    BoltzmannRhs(const KGrid& grid, const PhononKernel& phonon, const PairChannels& pp,
                 PumpSpec pump, Terms terms = {});

    void operator()(double t, std::span<const double> n, std::span<double> dndt) const;

    void add_pph(std::span<const double> n, std::span<double> out) const;
    void add_pp(std::span<const double> n, std::span<double> out) const;

    /// Analytic d(dn/dt)/dn, row-major N x N.
    void jacobian(std::span<const double> n, std::span<double> out) const;
    /// Explicit time derivative of the right-hand side (pump ramp only).
    void time_derivative(double t, std::span<double> out) const;

    std::size_t size() const { return grid_->size(); }
    const KGrid& grid() const { return *grid_; }
    const PumpSpec& pump() const { return pump_; }

private:
    const KGrid* grid_;
    const PhononKernel* phonon_;
    const PairChannels* pp_;
    PumpSpec pump_;
    Terms terms_;
    std::vector<double> envelope_;
    std::vector<double> inv_tau_;
    std::vector<double> weights_;
    std::vector<double> inv_weights_;
    // Fixed channel partition so per-node sums never depend on the thread count.
    std::vector<std::size_t> chunk_begin_;
    mutable std::vector<double> chunk_buffers_;
};

std::vector<double> rhs(const KineticState& state, const BoltzmannRhs& system);

enum class Method {
    dopri5,        ///< explicit Dormand-Prince 5(4)
    rosenbrock23,  ///< linearly implicit, L-stable; for strongly stimulated regimes
};

std::string_view to_string(Method method);
Method method_from_string(std::string_view name);

struct IntegratorSettings {
    Method method = Method::rosenbrock23;
    double rel_tol = 1.0e-6;
    double abs_tol = 1.0e-9;
    double initial_step = 0.1;    // ps
    double max_step = 20.0;       // ps
    double min_step = 1.0e-10;    // ps
    double output_interval = 10.0;  // ps
    double snapshot_interval = 0.0;  // ps; 0 keeps only the final snapshot
    double negative_floor = 1.0e-14;

    void validate() const;
    bool operator==(const IntegratorSettings&) const = default;
};

struct IntegratorStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t negative_rejections = 0;
    std::size_t floored_values = 0;
    std::size_t rhs_evaluations = 0;
};

struct Trajectory {
    std::vector<Observables> samples;
    KineticState final_state;
    IntegratorStats stats;
};

/// Integrates from `initial` to t_end with adaptive error control (embedded
/// Dormand-Prince 5(4) pair with PI control, or Rosenbrock 2(3)). Samples are
/// interpolated at every output_interval, independent of the step sequence.
Trajectory evolve(const BoltzmannRhs& system, const KineticState& initial, double t_end,
                  const IntegratorSettings& settings = {});

struct StationaryResult {
    bool reached = false;
    double time = 0.0;
    double n0 = 0.0;
    double N_tot = 0.0;
};

/// Earliest sample time t at which, over [t - window, t], both
/// max|dN_tot/dt| * window / N_tot and the same for n0 stay below eps.
/// Values below `floor` count as zero.
StationaryResult detect_stationary(std::span<const Observables> samples, double window = 200.0,
                                   double eps = 0.02, double floor = 1.0e-6);

}  // namespace polariton
