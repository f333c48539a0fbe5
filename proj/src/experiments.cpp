#include "cavityw/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include <unsupported/Eigen/MatrixFunctions>

#include "cavityw/errors.hpp"

namespace cavityw {

std::uint64_t fnv1a(std::string_view data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string fnv1a_hex(std::string_view data) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << fnv1a(data);
    return os.str();
}

std::vector<double> default_detunings(int n) {
    if (n < 1) throw ConfigError("number of cavity pairs must be at least 1");
    std::vector<double> out;
    for (int j = 1; j <= n; ++j) out.push_back(units::ghz(-0.5 * j));
    return out;
}

std::vector<double> SystemRecipe::resolved_detunings() const {
    if (detunings.empty()) return default_detunings(n);
    if (detunings.size() != static_cast<std::size_t>(n)) throw ConfigError("need one detuning per cavity pair");
    return detunings;
}

double SystemRecipe::resolved_g1() const {
    if (g1) return *g1;
    if (!(b > 0.0) || !std::isfinite(b)) throw DomainError("normalized detuning b must be positive");
    return std::abs(resolved_detunings().front()) / b;
}

DeviceParams SystemRecipe::ideal_device() const {
    auto p = derive_params(resolved_detunings(), resolved_g1(), n, omega10, anharmonicity);
    if (crosstalk) {
        p.crosstalk = *crosstalk;
    } else {
        if (!(crosstalk_multiple >= 0.0)) throw DomainError("crosstalk multiple must be non-negative");
        if (crosstalk_multiple > 0.0) p.crosstalk = uniform_crosstalk(p.sites(), crosstalk_multiple * p.g_max());
    }
    p.validate();
    return p;
}

DeviceParams SystemRecipe::device() const { return apply_breakage(ideal_device(), r); }

DecoherenceParams SystemRecipe::resolved_decoherence() const {
    if (!dissipation) return DecoherenceParams::none(n);
    if (!decoherence) return reference_decoherence(n);
    if (decoherence->kappa.size() != static_cast<std::size_t>(2 * n))
        throw ConfigError("decoherence record does not match n");
    decoherence->validate();
    return *decoherence;
}

TransferLayout SystemRecipe::layout() const {
    TransferLayout l;
    l.n = n;
    l.qutrit_levels = qutrit_levels;
    l.coupler_levels = qutrit_levels;
    l.cavity_levels = cavity_levels;
    return l;
}

BasisPtr SystemRecipe::basis() const { return build_transfer_basis(layout(), sector_emax); }

std::string SystemRecipe::canonical() const {
    std::ostringstream os;
    os << std::setprecision(17);
    const auto dev = device();
    const auto deco = resolved_decoherence();
    os << "n=" << n << ";levels=" << qutrit_levels << "," << cavity_levels
       << ";emax=" << (sector_emax ? std::to_string(*sector_emax) : "none") << ";r=" << r << ";";
    for (int k = 0; k < dev.sites(); ++k)
        os << "site" << k << "=" << dev.qutrits[k].omega10 << "," << dev.qutrits[k].omega21 << ","
           << dev.cavity_omega[k] << "," << dev.g[k] << "," << dev.g_coupler[k] << "," << dev.g_tilde[k] << ","
           << dev.g_tilde_coupler[k] << ";";
    os << "coupler=" << dev.coupler.omega10 << "," << dev.coupler.omega21 << ";xt=";
    for (Eigen::Index i = 0; i < dev.crosstalk.size(); ++i) os << dev.crosstalk.data()[i] << ",";
    os << ";kappa=";
    for (double k : deco.kappa) os << k << ",";
    auto rates = [&](const QutritRates& q) {
        os << q.gamma << "," << q.gamma21 << "," << q.gamma20 << "," << q.gamma_phi1 << "," << q.gamma_phi2 << "/";
    };
    os << ";rates=";
    for (const auto& q : deco.qutrits) rates(q);
    rates(deco.coupler);
    return os.str();
}

double TransferRecord::max_mean_photons() const {
    return mean_photons.empty() ? 0.0 : *std::max_element(mean_photons.begin(), mean_photons.end());
}

double TransferRecord::avg_mean_photons() const {
    if (mean_photons.empty()) return 0.0;
    double s = 0.0;
    for (double v : mean_photons) s += v;
    return s / static_cast<double>(mean_photons.size());
}

namespace {

std::string options_text(const TransferOptions& o) {
    std::ostringstream os;
    os << std::setprecision(17) << "tol=" << o.evolve.control.tolerance << ";h0=" << o.evolve.control.initial_step
       << ";samples=" << o.evolve.samples << ";horizon=" << (o.horizon ? *o.horizon : -1.0);
    return os.str();
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

TransferRun run_transfer(const SystemRecipe& recipe, const TransferOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    TransferRun run;
    auto& rec = run.record;
    const auto ideal = recipe.ideal_device();
    const auto device = recipe.device();
    const auto eff = effective_params(ideal);
    rec.b = std::abs(device.delta(0)) / device.g[0];
    rec.r = recipe.r;
    rec.crosstalk_multiple = recipe.crosstalk ? 0.0 : recipe.crosstalk_multiple;
    rec.g1 = device.g[0];
    rec.g_max = ideal.g_max();
    rec.t_transfer = transfer_time(eff);
    rec.horizon = options.horizon.value_or(rec.t_transfer);
    rec.conditions = check_conditions(device);
    rec.param_hash = fnv1a_hex(recipe.canonical() + "|" + options_text(options));

    const auto basis = recipe.basis();
    const int n = recipe.n;
    const auto h = build_h_I(device, basis);
    Probes probes;
    probes.target = ideal_target(n, basis);
    probes.observables = photon_number_operators(basis);
    const auto psi0 = transfer_initial_state(n, basis);
    try {
        if (recipe.dissipation) {
            const auto spec = build_lindblad_spec(recipe.resolved_decoherence(), n, basis);
            run.result = evolve_lindblad(h, spec, DensityMatrix::pure(psi0), rec.horizon, options.evolve, probes);
        } else {
            run.result = evolve_closed(h, psi0, rec.horizon, options.evolve, probes);
        }
        run.result.metadata = rec.param_hash;
        rec.fidelity = run.result.fidelity.back();
        rec.fidelity_squared = rec.fidelity * rec.fidelity;
        rec.cavities = run.result.observable_labels;
        for (const auto& trace : run.result.observables)
            rec.mean_photons.push_back(time_average(run.result.times, trace));
        rec.stats = run.result.stats;
    } catch (const NumericError& e) {
        rec.error = e.kind() + ": " + e.what();
    }
    rec.wall_ms = elapsed_ms(start);
    return run;
}

std::string to_string(SweepVariable v) { return v == SweepVariable::B ? "b" : "r"; }

std::vector<double> linear_grid(double start, double stop, double step) {
    if (!(step > 0.0) || !std::isfinite(start) || !std::isfinite(stop))
        throw DomainError("grid step must be positive and bounds finite");
    std::vector<double> out;
    if (stop < start) return out;
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 0.1)) + 1;
    for (std::size_t i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
    return out;
}

std::vector<double> default_b_grid() { return linear_grid(5.0, 15.0, 0.5); }
std::vector<double> default_r_grid() { return linear_grid(0.85, 1.15, 0.01); }

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
    const auto threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, workers)), count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

namespace {

void validate_plan(const SweepPlan& plan) {
    if (plan.grid.empty()) throw DomainError("sweep grid is empty");
    const bool increasing = plan.grid.size() < 2 || plan.grid[1] > plan.grid[0];
    for (std::size_t i = 1; i < plan.grid.size(); ++i)
        if ((plan.grid[i] > plan.grid[i - 1]) != increasing || plan.grid[i] == plan.grid[i - 1])
            throw DomainError("sweep grid must be strictly monotone");
    for (double v : plan.grid) {
        if (!std::isfinite(v)) throw DomainError("sweep grid values must be finite");
        if (plan.variable == SweepVariable::B && !(v > 1.0))
            throw DomainError("b must exceed 1 (dispersive regime)");
        if (plan.variable == SweepVariable::R && !(v > 0.0)) throw DomainError("r must be positive");
    }
    if (plan.crosstalk_levels.empty()) throw DomainError("at least one crosstalk level is required");
    for (double x : plan.crosstalk_levels)
        if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("crosstalk multiples must be non-negative");
}

std::string plan_text(const SweepPlan& plan) {
    std::ostringstream os;
    os << std::setprecision(17) << to_string(plan.variable) << "|" << plan.base.canonical() << "|"
       << options_text(plan.options) << "|grid=";
    for (double v : plan.grid) os << v << ",";
    os << "|levels=";
    for (double v : plan.crosstalk_levels) os << v << ",";
    return os.str();
}

}  // namespace

SweepResult run_sweep(const SweepPlan& plan) {
    validate_plan(plan);
    SweepResult res;
    res.variable = plan.variable;
    res.plan_hash = fnv1a_hex(plan_text(plan));
    const std::size_t points = plan.grid.size();
    for (double x : plan.crosstalk_levels) res.series.push_back({x, std::vector<TransferRecord>(points)});

    parallel_for(points * plan.crosstalk_levels.size(), plan.workers, [&](std::size_t task) {
        const std::size_t s = task / points;
        const std::size_t i = task % points;
        SystemRecipe recipe = plan.base;
        recipe.crosstalk.reset();
        recipe.crosstalk_multiple = plan.crosstalk_levels[s];
        if (plan.variable == SweepVariable::B) {
            recipe.g1.reset();
            recipe.b = plan.grid[i];
        } else {
            recipe.r = plan.grid[i];
        }
        auto rec = run_transfer(recipe, plan.options).record;
        rec.swept = plan.grid[i];
        res.series[s].records[i] = std::move(rec);
    });
    return res;
}

SweepResult sweep_b(const SweepPlan& plan) {
    if (plan.variable != SweepVariable::B) throw DomainError("sweep_b needs a plan over b");
    return run_sweep(plan);
}

SweepResult sweep_r(const SweepPlan& plan) {
    if (plan.variable != SweepVariable::R) throw DomainError("sweep_r needs a plan over r");
    return run_sweep(plan);
}

EffectiveComparison compare_effective_vs_full(const DeviceParams& params, const BasisPtr& basis, double horizon,
                                              const EvolveOptions& options) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("comparison horizon must be positive");
    const auto eff = effective_params(params);
    const int n = params.n;
    Probes probes;
    probes.target = ideal_target(n, basis);
    const auto res = evolve_closed(build_h_I(params, basis), transfer_initial_state(n, basis), horizon, options, probes);
    EffectiveComparison out;
    out.horizon = horizon;
    for (std::size_t i = 0; i < res.times.size(); ++i) {
        const double analytic = std::abs(closed_form_state(eff, res.times[i]).c_w_primed);
        const double dev = std::abs(res.fidelity[i] - analytic);
        if (dev > out.max_deviation) {
            out.max_deviation = dev;
            out.at_time = res.times[i];
        }
    }
    const auto vac = build_H0_Hint(params, basis);
    out.conjugation_residual = conjugation_residual(vac.H0, vac.Hint, horizon);
    return out;
}

EffectiveComparison compare_effective_vs_full(const SystemRecipe& recipe, std::optional<double> horizon,
                                              const EvolveOptions& options) {
    const auto device = recipe.device();
    const double t = horizon.value_or(transfer_time(effective_params(recipe.ideal_device())));
    return compare_effective_vs_full(device, recipe.basis(), t, options);
}

std::vector<DenseVector> magnus_propagate(const TermSet& h, const DenseVector& psi0, double t_final,
                                          std::size_t micro_steps, std::size_t stride) {
    if (micro_steps == 0 || stride == 0) throw DomainError("need a positive number of micro-steps");
    if (!(t_final >= 0.0)) throw DomainError("final time must be non-negative");
    if (static_cast<std::size_t>(psi0.size()) != h.basis()->dimension())
        throw ShapeError("state does not match the Hamiltonian basis");
    TermSetEvaluator gen(h, cplx(0.0, -1.0));
    const double dt = t_final / static_cast<double>(micro_steps);
    const double off = std::sqrt(3.0) / 6.0;
    std::vector<DenseVector> out{psi0};
    DenseVector psi = psi0;
    for (std::size_t k = 0; k < micro_steps; ++k) {
        const double t = dt * static_cast<double>(k);
        const DenseMatrix a1 = gen.evaluate(t + dt * (0.5 - off));
        const DenseMatrix a2 = gen.evaluate(t + dt * (0.5 + off));
        const DenseMatrix omega = 0.5 * dt * (a1 + a2) + (std::sqrt(3.0) / 12.0) * dt * dt * (a2 * a1 - a1 * a2);
        psi = omega.exp() * psi;
        if ((k + 1) % stride == 0) out.push_back(psi);
    }
    return out;
}

bool OracleReport::pass() const {
    return sector_vs_full_closed < options.state_threshold && adaptive_vs_oracle < options.state_threshold &&
           sector_vs_full_lindblad < options.lindblad_threshold;
}

OracleReport oracle_equivalence(const SystemRecipe& recipe, const OracleOptions& options) {
    if (options.checkpoints == 0 || options.micro_steps % options.checkpoints != 0)
        throw DomainError("micro-steps must be a multiple of the checkpoint count");
    SystemRecipe small = recipe;
    small.n = 1;
    if (!small.detunings.empty()) small.detunings.resize(1);
    if (small.decoherence) small.decoherence.reset();
    small.sector_emax = 1;
    SystemRecipe full = small;
    full.sector_emax.reset();

    const auto device = small.device();
    const auto sector = small.basis();
    const auto unrestricted = full.basis();
    const double horizon = transfer_time(effective_params(small.ideal_device()));

    OracleReport rep;
    rep.options = options;
    rep.sector_dimension = sector->dimension();
    rep.full_dimension = unrestricted->dimension();
    rep.horizon = horizon;

    EvolveOptions ev;
    ev.control.tolerance = options.tolerance;
    ev.samples = options.checkpoints + 1;
    ev.keep_snapshots = true;

    const auto h_sector = build_h_I(device, sector);
    const auto h_full = build_h_I(device, unrestricted);
    const auto psi_sector = transfer_initial_state(1, sector);
    const auto psi_full = transfer_initial_state(1, unrestricted);

    const auto closed_sector = evolve_closed(h_sector, psi_sector, horizon, ev);
    const auto closed_full = evolve_closed(h_full, psi_full, horizon, ev);
    for (std::size_t i = 0; i < closed_sector.psi_snapshots.size(); ++i) {
        const DenseVector lifted = lift_state(closed_sector.psi_snapshots[i], *sector, *unrestricted);
        rep.sector_vs_full_closed = std::max(rep.sector_vs_full_closed, (lifted - closed_full.psi_snapshots[i]).norm());
    }

    const auto oracle = magnus_propagate(h_sector, psi_sector.amplitudes(), horizon, options.micro_steps,
                                         options.micro_steps / options.checkpoints);
    for (std::size_t i = 0; i < oracle.size(); ++i)
        rep.adaptive_vs_oracle = std::max(rep.adaptive_vs_oracle, (oracle[i] - closed_sector.psi_snapshots[i]).norm());

    EvolveOptions lv = ev;
    lv.keep_snapshots = false;
    Probes ps, pf;
    ps.target = ideal_target(1, sector);
    pf.target = ideal_target(1, unrestricted);
    const auto deco = small.resolved_decoherence();
    const auto open_sector = evolve_lindblad(h_sector, build_lindblad_spec(deco, 1, sector),
                                             DensityMatrix::pure(psi_sector), horizon, lv, ps);
    const auto open_full = evolve_lindblad(h_full, build_lindblad_spec(deco, 1, unrestricted),
                                           DensityMatrix::pure(psi_full), horizon, lv, pf);
    for (std::size_t i = 0; i < open_sector.fidelity.size(); ++i)
        rep.sector_vs_full_lindblad =
            std::max(rep.sector_vs_full_lindblad, std::abs(open_sector.fidelity[i] - open_full.fidelity[i]));
    return rep;
}

}  // namespace cavityw
