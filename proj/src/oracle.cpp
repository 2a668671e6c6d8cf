#include "neqt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "neqt/manybody.hpp"
#include "neqt/transport.hpp"

namespace neqt {

double ramp_profile(RampProfile profile, double s)
{
    if (s <= 0.0) return 1.0;
    if (s >= 1.0) return 0.0;
    switch (profile) {
    case RampProfile::sudden: return 1.0;
    case RampProfile::linear: return 1.0 - s;
    case RampProfile::smooth: return 1.0 - s * s * (3.0 - 2.0 * s);
    }
    return 1.0;
}

RampProfile parse_ramp_profile(const std::string& name)
{
    if (name == "sudden") return RampProfile::sudden;
    if (name == "linear") return RampProfile::linear;
    if (name == "smooth") return RampProfile::smooth;
    throw ConfigError("unknown ramp profile '" + name + "' (sudden, linear, smooth)");
}

std::string to_string(RampProfile profile)
{
    switch (profile) {
    case RampProfile::sudden: return "sudden";
    case RampProfile::linear: return "linear";
    case RampProfile::smooth: return "smooth";
    }
    return "sudden";
}

SampleState parse_sample_state(const std::string& name)
{
    if (name == "half") return SampleState::half;
    if (name == "empty") return SampleState::empty;
    if (name == "full") return SampleState::full;
    if (name == "random") return SampleState::random;
    throw ConfigError("unknown sample state '" + name + "' (half, empty, full, random)");
}

Plateau fit_plateau(const std::vector<double>& times, const RVector& series, double t_lo, double t_hi)
{
    Plateau p;
    p.t_lo = t_lo;
    p.t_hi = t_hi;
    double st = 0.0, sy = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < times.size(); ++i)
        if (times[i] >= t_lo - 1e-9 && times[i] <= t_hi + 1e-9) {
            st += times[i];
            sy += series(static_cast<Eigen::Index>(i));
            ++count;
        }
    p.samples = count;
    if (count == 0) return p;
    const double tm = st / count, ym = sy / count;
    double stt = 0.0, sty = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i)
        if (times[i] >= t_lo - 1e-9 && times[i] <= t_hi + 1e-9) {
            stt += (times[i] - tm) * (times[i] - tm);
            sty += (times[i] - tm) * (series(static_cast<Eigen::Index>(i)) - ym);
        }
    p.value = ym;
    p.slope = stt > 0.0 ? sty / stt : 0.0;
    p.accepted = count >= 2 && std::abs(p.slope) * (t_hi - t_lo) < 0.01 * std::abs(p.value) + 1e-12;
    return p;
}

bool OracleRun::plateaus_accepted() const
{
    for (const auto& p : charge_plateaus)
        if (!p.accepted) return false;
    return true;
}

CMatrix sample_initial_density(int n, const OracleConfig& oc)
{
    switch (oc.sample_state) {
    case SampleState::half: return 0.5 * CMatrix::Identity(n, n);
    case SampleState::empty: return CMatrix::Zero(n, n);
    case SampleState::full: return CMatrix::Identity(n, n);
    case SampleState::random: {
        std::mt19937_64 rng(oc.seed);
        std::normal_distribution<double> gauss;
        std::uniform_real_distribution<double> unit;
        CMatrix a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a(i, j) = {gauss(rng), gauss(rng)};
        const CMatrix q = Eigen::HouseholderQR<CMatrix>(a).householderQ();
        RVector occ(n);
        for (int i = 0; i < n; ++i) occ(i) = unit(rng);
        return q * occ.cast<cplx>().asDiagonal() * q.adjoint();
    }
    case SampleState::custom:
        if (oc.sample_density.rows() != n || oc.sample_density.cols() != n)
            throw ConfigError("custom sample density must be n x n");
        return oc.sample_density;
    }
    return 0.5 * CMatrix::Identity(n, n);
}

namespace {

struct Protocol {
    double t_rec = 0.0;
    double ramp_end = 0.0;
    double window_lo = 0.0, window_hi = 0.0;
    std::vector<double> times;
};

Protocol make_protocol(const SystemConfig& config, const OracleConfig& oc, bool ramped)
{
    if (oc.lead_length < 2) throw ConfigError("oracle needs at least two sites per lead");
    if (!(oc.dt > 0.0)) throw ConfigError("oracle sampling step must be positive");
    Protocol p;
    p.t_rec = oc.lead_length / config.hopping;
    p.ramp_end = ramped ? oc.ramp_duration : 0.0;
    if (oc.enforce_recurrence) {
        p.window_lo = oc.window_lo * p.t_rec;
        p.window_hi = oc.window_hi * p.t_rec;
        if (p.ramp_end > p.window_lo)
            throw OracleRejection("ramp ends at " + std::to_string(p.ramp_end) + ", after the plateau window opens at " +
                                  std::to_string(p.window_lo) + "; increase the lead length");
    } else {
        p.window_lo = p.ramp_end + oc.window_lo * p.t_rec;
        p.window_hi = p.ramp_end + oc.window_hi * p.t_rec;
    }
    const double t_max = oc.t_max > 0.0 ? oc.t_max : p.window_hi;
    if (oc.enforce_recurrence && t_max > p.t_rec + 1e-12)
        throw OracleRejection("t_max = " + std::to_string(t_max) + " exceeds the recurrence estimate " +
                              std::to_string(p.t_rec));
    // while the Hamiltonian changes, samples sit on the propagation steps
    double start = 0.0;
    if (p.ramp_end > 0.0) {
        if (!(oc.ramp_step > 0.0)) throw ConfigError("ramp step must be positive");
        const int steps = std::max(1, static_cast<int>(std::ceil(p.ramp_end / oc.ramp_step - 1e-9)));
        for (int i = 0; i < steps; ++i) p.times.push_back(p.ramp_end * i / steps);
        start = p.ramp_end;
    }
    const auto steps = static_cast<long>(std::floor((t_max - start) / oc.dt + 1e-9));
    for (long i = 0; i <= steps; ++i) p.times.push_back(start + i * oc.dt);
    return p;
}

// Propagation intervals over the ramp: steps of at most `step`, split at every sample time.
std::vector<std::pair<double, double>> ramp_segments(const Protocol& p, double step)
{
    if (!(step > 0.0)) throw ConfigError("ramp step must be positive");
    std::vector<double> cuts{0.0, p.ramp_end};
    const int steps = static_cast<int>(std::ceil(p.ramp_end / step - 1e-9));
    for (int i = 1; i < steps; ++i) cuts.push_back(p.ramp_end * i / steps);
    for (double t : p.times)
        if (t > 0.0 && t < p.ramp_end) cuts.push_back(t);
    std::sort(cuts.begin(), cuts.end());
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        if (cuts[i + 1] - cuts[i] > 1e-12) out.emplace_back(cuts[i], cuts[i + 1]);
    return out;
}

// Rows of the truncation needed for the observables: sample, then 0_j, 1_j per lead.
struct Probe {
    std::vector<int> rows;
    int n = 0, m = 0;

    Probe(const SiteLayout& layout)
        : n(layout.n_sample), m(layout.n_leads)
    {
        for (int x = 0; x < n; ++x) rows.push_back(layout.sample(x));
        for (int j = 0; j < m; ++j) {
            rows.push_back(layout.lead(j, 0));
            rows.push_back(layout.lead(j, 1));
        }
    }
    [[nodiscard]] int contact(int j) const { return n + 2 * j; }
    [[nodiscard]] int second(int j) const { return n + 2 * j + 1; }
};

// C(a, b) = <a^dagger_b a_a> on the probe rows.
void record(const SystemConfig& config, const Probe& probe, const CMatrix& C, double coupling_scale, OracleRun& run,
            Eigen::Index row)
{
    for (int j = 0; j < probe.m; ++j) {
        const auto& lead = config.leads[j];
        cplx z0 = 0.0, z1 = 0.0;
        for (int x = 0; x < probe.n; ++x) {
            z0 += C(probe.contact(j), x) * lead.contact(x);
            z1 += C(probe.second(j), x) * lead.contact(x);
        }
        const double d = coupling_scale * lead.coupling;
        run.charge(row, j) = 2.0 * d * z0.imag();
        run.energy(row, j) = -2.0 * config.hopping * d * z1.imag();
    }
    for (int x = 0; x < probe.n; ++x) run.density(row, x) = C(x, x).real();
    run.hermiticity_error = std::max(run.hermiticity_error, (C - C.adjoint()).cwiseAbs().maxCoeff());
}

void init_run(OracleRun& run, const Protocol& p, int n, int m)
{
    run.times = p.times;
    run.t_rec = p.t_rec;
    run.ramp_end = p.ramp_end;
    const auto nt = static_cast<Eigen::Index>(p.times.size());
    run.charge = RMatrix::Zero(nt, m);
    run.energy = RMatrix::Zero(nt, m);
    run.density = RMatrix::Zero(nt, n);
}

void finish_run(OracleRun& run, const Protocol& p)
{
    run.charge_plateaus.clear();
    run.energy_plateaus.clear();
    for (Eigen::Index j = 0; j < run.charge.cols(); ++j) {
        run.charge_plateaus.push_back(fit_plateau(run.times, run.charge.col(j), p.window_lo, p.window_hi));
        run.energy_plateaus.push_back(fit_plateau(run.times, run.energy.col(j), p.window_lo, p.window_hi));
    }
}

// Coupling and bias scales at elapsed time tau.
std::pair<double, double> switch_scales(const SystemConfig& config, const OracleConfig& oc, double tau, bool ramped)
{
    double lambda = 1.0;
    if (ramped && oc.ramp_duration > 0.0) lambda = ramp_profile(oc.ramp, 1.0 - tau / oc.ramp_duration);
    if (config.scenario == Scenario::partitioned) return {lambda, 1.0};
    return {1.0, lambda};
}

// ---- one-particle machinery ---------------------------------------------

struct Orbitals {
    CMatrix phi; // columns: orbitals
    RVector occupation;
};

Orbitals initial_orbitals(const SystemConfig& config, const HamiltonianParts& parts, const OracleConfig& oc)
{
    const auto& layout = parts.layout;
    const int N = layout.dimension();
    Orbitals o;
    o.phi = CMatrix::Zero(N, N);
    o.occupation = RVector::Zero(N);
    if (config.scenario == Scenario::partition_free) {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(CMatrix(parts.combine(1.0, 0.0)));
        o.phi = es.eigenvectors();
        for (int k = 0; k < N; ++k) o.occupation(k) = fermi(config.beta_eq * (es.eigenvalues()(k) - config.mu_eq));
        return o;
    }
    const int n = layout.n_sample, L = layout.lead_length;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(sample_initial_density(n, oc));
    o.phi.block(0, 0, n, n) = es.eigenvectors();
    o.occupation.head(n) = es.eigenvalues().cwiseMax(0.0).cwiseMin(1.0);
    // Dirichlet chain with hopping -c: sqrt(2/(L+1)) sin(pi k (x+1)/(L+1)), energy -2c cos(pi k/(L+1))
    const double norm = std::sqrt(2.0 / (L + 1));
    for (int j = 0; j < layout.n_leads; ++j) {
        const auto& lead = config.leads[j];
        for (int k = 1; k <= L; ++k) {
            const int col = layout.lead(j, k - 1);
            const double q = pi * k / (L + 1);
            for (int x = 0; x < L; ++x) o.phi(layout.lead(j, x), col) = norm * std::sin(q * (x + 1));
            o.occupation(col) = fermi(lead.beta * (-2.0 * config.hopping * std::cos(q) - lead.mu));
        }
    }
    return o;
}

// e^{-i h dt} psi by a Chebyshev-Bessel expansion.
void chebyshev_propagate(const SparseHamiltonian& h, double dt, CMatrix& psi)
{
    double lo = 1e300, hi = -1e300;
    for (int k = 0; k < h.outerSize(); ++k) {
        double diag = 0.0, radius = 0.0;
        for (SparseHamiltonian::InnerIterator it(h, k); it; ++it) {
            if (it.row() == it.col()) {
                diag = it.value().real();
            } else {
                radius += std::abs(it.value());
            }
        }
        lo = std::min(lo, diag - radius);
        hi = std::max(hi, diag + radius);
    }
    const double center = 0.5 * (hi + lo);
    const double half = 0.5 * (hi - lo) * 1.01 + 1e-12;
    const double a = half * dt;
    SparseHamiltonian hs = h;
    for (int k = 0; k < hs.outerSize(); ++k)
        for (SparseHamiltonian::InnerIterator it(hs, k); it; ++it)
            if (it.row() == it.col()) it.valueRef() -= center;
    hs /= half;

    // CSR copy of 2 H for the fused recurrence below
    const Eigen::SparseMatrix<cplx, Eigen::RowMajor> hs2 = 2.0 * hs;
    const auto* outer = hs2.outerIndexPtr();
    const auto* inner = hs2.innerIndexPtr();
    const auto* vals = hs2.valuePtr();
    const Eigen::Index N = psi.rows(), cols = psi.cols();

    CMatrix t0 = psi;
    CMatrix t1(N, cols);
    CMatrix acc = std::cyl_bessel_j(0.0, a) * t0;
    const cplx c1 = 2.0 * (-I) * std::cyl_bessel_j(1.0, a);
    for (Eigen::Index c = 0; c < cols; ++c) {
        const cplx* x = t0.col(c).data();
        cplx* y = t1.col(c).data();
        cplx* z = acc.col(c).data();
        for (Eigen::Index i = 0; i < N; ++i) {
            cplx sum = 0.0;
            for (auto p = outer[i]; p < outer[i + 1]; ++p) sum += vals[p] * x[inner[p]];
            y[i] = 0.5 * sum;
            z[i] += c1 * y[i];
        }
    }
    cplx phase = -I;
    for (int k = 2; k < 10000; ++k) {
        phase *= -I;
        const double bk = std::cyl_bessel_j(static_cast<double>(k), a);
        const cplx ck = 2.0 * phase * bk;
        // T_k = 2 H T_{k-1} - T_{k-2}, written over T_{k-2}
        for (Eigen::Index c = 0; c < cols; ++c) {
            const cplx* x = t1.col(c).data();
            cplx* y = t0.col(c).data();
            cplx* z = acc.col(c).data();
            for (Eigen::Index i = 0; i < N; ++i) {
                cplx sum = 0.0;
                for (auto p = outer[i]; p < outer[i + 1]; ++p) sum += vals[p] * x[inner[p]];
                y[i] = sum - y[i];
                z[i] += ck * y[i];
            }
        }
        t0.swap(t1);
        if (k > a && std::abs(bk) < 1e-17) break;
    }
    psi = std::polar(1.0, -center * dt) * acc;
}

struct Spectrum {
    RVector energies;
    RMatrix real_vectors;
    CMatrix vectors;
    bool real = false;
};

Spectrum diagonalize(const SparseHamiltonian& h)
{
    Spectrum s;
    const CMatrix dense(h);
    if (dense.imag().cwiseAbs().maxCoeff() == 0.0) {
        Eigen::SelfAdjointEigenSolver<RMatrix> es(dense.real());
        s.energies = es.eigenvalues();
        s.real_vectors = es.eigenvectors();
        s.real = true;
    } else {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(dense);
        s.energies = es.eigenvalues();
        s.vectors = es.eigenvectors();
    }
    return s;
}

// V^dagger phi
CMatrix to_eigenbasis(const Spectrum& s, const CMatrix& phi)
{
    if (!s.real) return s.vectors.adjoint() * phi;
    const RMatrix vt = s.real_vectors.transpose();
    RMatrix re = vt * phi.real();
    if (phi.imag().cwiseAbs().maxCoeff() == 0.0) return re.cast<cplx>();
    RMatrix im = vt * phi.imag();
    CMatrix out(re.rows(), re.cols());
    out.real() = re;
    out.imag() = im;
    return out;
}

CMatrix probe_rows(const Spectrum& s, const Probe& probe)
{
    const auto N = s.energies.size();
    CMatrix rows(static_cast<Eigen::Index>(probe.rows.size()), N);
    for (std::size_t r = 0; r < probe.rows.size(); ++r)
        rows.row(static_cast<Eigen::Index>(r)) =
            s.real ? s.real_vectors.row(probe.rows[r]).cast<cplx>().eval() : s.vectors.row(probe.rows[r]).eval();
    return rows;
}

CMatrix probe_correlation(const CMatrix& phi_rows, const RVector& occupation)
{
    return phi_rows * occupation.cast<cplx>().asDiagonal() * phi_rows.adjoint();
}

double occupied_norm_drift(const CMatrix& phi, const RVector& occupation)
{
    return std::abs((phi.colwise().squaredNorm().transpose().array() * occupation.array()).sum() - occupation.sum());
}

OracleRun free_run(const SystemConfig& config, const OracleConfig& oc, bool ramped)
{
    require_valid(config);
    const auto parts = hamiltonian_parts(config, oc.lead_length);
    const Protocol proto = make_protocol(config, oc, ramped);
    const Probe probe(parts.layout);
    OracleRun run;
    init_run(run, proto, config.n_sites(), config.n_leads());

    Orbitals orb = initial_orbitals(config, parts, oc);
    std::size_t next = 0;
    auto probe_now = [&](const CMatrix& phi, double coupling_scale) {
        CMatrix rows(static_cast<Eigen::Index>(probe.rows.size()), phi.cols());
        for (std::size_t r = 0; r < probe.rows.size(); ++r) rows.row(static_cast<Eigen::Index>(r)) = phi.row(probe.rows[r]);
        record(config, probe, probe_correlation(rows, orb.occupation), coupling_scale, run, static_cast<Eigen::Index>(next));
    };

    double tau = 0.0;
    if (proto.ramp_end > 0.0) {
        for (const auto& [t0, t1] : ramp_segments(proto, oc.ramp_step)) {
            if (next < proto.times.size() && std::abs(proto.times[next] - t0) < 1e-12) {
                probe_now(orb.phi, switch_scales(config, oc, t0, true).first);
                ++next;
            }
            const auto [cs, bs] = switch_scales(config, oc, 0.5 * (t0 + t1), true);
            chebyshev_propagate(parts.combine(cs, bs), t1 - t0, orb.phi);
        }
        tau = proto.ramp_end;
        run.particle_drift = occupied_norm_drift(orb.phi, orb.occupation);
    }

    const Spectrum spec = diagonalize(parts.combine(1.0, 1.0));
    CMatrix b = to_eigenbasis(spec, orb.phi);
    b = b * orb.occupation.cwiseSqrt().cast<cplx>().asDiagonal();
    run.particle_drift = std::max(run.particle_drift, std::abs(b.squaredNorm() - orb.occupation.sum()));
    const CMatrix rows = probe_rows(spec, probe);
    const auto N = spec.energies.size();
    const auto P = rows.rows();
    const bool real_path = spec.real && b.imag().cwiseAbs().maxCoeff() == 0.0;
    const RMatrix b_real = real_path ? RMatrix(b.real()) : RMatrix();
    const RMatrix rows_real = rows.real();
    CVector phase(N);
    RMatrix stacked(2 * P, N);
    for (; next < proto.times.size(); ++next) {
        const double dt = proto.times[next] - tau;
        for (Eigen::Index k = 0; k < N; ++k) phase(k) = std::polar(1.0, -spec.energies(k) * dt);
        CMatrix r(P, b.cols());
        if (real_path) {
            // [V cos; V sin] B in one real product
            stacked.topRows(P) = rows_real * phase.real().asDiagonal();
            stacked.bottomRows(P) = rows_real * phase.imag().asDiagonal();
            const RMatrix prod = stacked * b_real;
            r.real() = prod.topRows(P);
            r.imag() = prod.bottomRows(P);
        } else {
            r = (rows * phase.asDiagonal()) * b;
        }
        record(config, probe, r * r.adjoint(), 1.0, run, static_cast<Eigen::Index>(next));
    }
    finish_run(run, proto);
    return run;
}

// ---- many-body machinery -------------------------------------------------

RMatrix interaction_matrix(const SystemConfig& config, const SiteLayout& layout)
{
    RMatrix u = RMatrix::Zero(layout.dimension(), layout.dimension());
    u.topLeftCorner(layout.n_sample, layout.n_sample) = config.sample.interaction * config.sample.pair_potential;
    return u;
}

CMatrix hermitian_exp(const CMatrix& a, cplx factor)
{
    Eigen::SelfAdjointEigenSolver<CMatrix> es(a);
    CVector e(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < e.size(); ++i) e(i) = std::exp(factor * es.eigenvalues()(i));
    return es.eigenvectors() * e.asDiagonal() * es.eigenvectors().adjoint();
}

// Sector blocks of the normalized initial density matrix.
std::vector<CMatrix> initial_many_body_state(const SystemConfig& config, const HamiltonianParts& parts,
                                             const FockSpace& fock, const RMatrix& u, const OracleConfig& oc)
{
    const auto& layout = parts.layout;
    const int N = layout.dimension();
    std::vector<CMatrix> rho;
    if (config.scenario == Scenario::partition_free) {
        const auto H = many_body_hamiltonian(fock, CMatrix(parts.combine(1.0, 0.0)), u);
        std::vector<RVector> energies;
        std::vector<CMatrix> vectors;
        double emin = 1e300;
        for (int s = 0; s < fock.sectors(); ++s) {
            Eigen::SelfAdjointEigenSolver<CMatrix> es(H[s]);
            RVector k = es.eigenvalues().array() - config.mu_eq * s;
            emin = std::min(emin, k.minCoeff());
            energies.push_back(k);
            vectors.push_back(es.eigenvectors());
        }
        for (int s = 0; s < fock.sectors(); ++s) {
            RVector w = (-config.beta_eq * (energies[s].array() - emin)).exp();
            rho.push_back(vectors[s] * w.cast<cplx>().asDiagonal() * vectors[s].adjoint());
        }
    } else {
        // exp(-dGamma(q)) with q = (+)_j beta_j (h_j - mu_j) (+) log((1 - C_S)/C_S)
        CMatrix q = CMatrix::Zero(N, N);
        const int n = layout.n_sample, L = layout.lead_length;
        Eigen::SelfAdjointEigenSolver<CMatrix> es(sample_initial_density(n, oc));
        RVector logit(n);
        for (int i = 0; i < n; ++i) {
            const double c = std::clamp(es.eigenvalues()(i), 1e-15, 1.0 - 1e-15);
            logit(i) = std::log((1.0 - c) / c);
        }
        q.topLeftCorner(n, n) = es.eigenvectors() * logit.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
        const CMatrix h0(parts.decoupled);
        for (int j = 0; j < layout.n_leads; ++j) {
            const auto& lead = config.leads[j];
            const int o = layout.lead(j, 0);
            CMatrix block = lead.beta * h0.block(o, o, L, L);
            block.diagonal().array() -= lead.beta * lead.mu;
            q.block(o, o, L, L) = block;
        }
        // ground energy of dGamma(q): sum of its negative one-body levels
        const double shift = Eigen::SelfAdjointEigenSolver<CMatrix>(q).eigenvalues().cwiseMin(0.0).sum();
        for (int s = 0; s < fock.sectors(); ++s) {
            CMatrix Q = fock.one_body(s, q);
            Q.diagonal().array() -= shift;
            rho.push_back(hermitian_exp(Q, -1.0));
        }
    }
    double z = 0.0;
    for (const auto& r : rho) z += r.trace().real();
    for (auto& r : rho) r /= z;
    return rho;
}

struct OperatorSet {
    // per sector, per probe pair: a^dagger_b a_a with (a, b) from Probe rows
    std::vector<std::vector<CMatrix>> ops;
};

OperatorSet probe_operators(const FockSpace& fock, const Probe& probe)
{
    OperatorSet set;
    const auto P = probe.rows.size();
    for (int s = 0; s < fock.sectors(); ++s) {
        std::vector<CMatrix> ops;
        for (std::size_t a = 0; a < P; ++a)
            for (std::size_t b = 0; b < P; ++b) {
                const bool needed = (a < static_cast<std::size_t>(probe.n) && b < static_cast<std::size_t>(probe.n)) ||
                                    (a >= static_cast<std::size_t>(probe.n) && b < static_cast<std::size_t>(probe.n));
                ops.push_back(needed ? fock.hopping(s, probe.rows[a], probe.rows[b]) : CMatrix());
            }
        set.ops.push_back(std::move(ops));
    }
    return set;
}

CMatrix probe_expectations(const std::vector<CMatrix>& rho, const OperatorSet& set, std::size_t P)
{
    CMatrix C = CMatrix::Zero(static_cast<Eigen::Index>(P), static_cast<Eigen::Index>(P));
    for (std::size_t s = 0; s < rho.size(); ++s)
        for (std::size_t a = 0; a < P; ++a)
            for (std::size_t b = 0; b < P; ++b) {
                const CMatrix& op = set.ops[s][a * P + b];
                if (op.size() == 0) continue;
                C(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) += (rho[s].cwiseProduct(op.transpose())).sum();
            }
    // fill <a^dagger_x a_{lead}> entries by hermiticity
    for (std::size_t a = 0; a < P; ++a)
        for (std::size_t b = 0; b < P; ++b)
            if (set.ops[0][a * P + b].size() == 0 && set.ops[0][b * P + a].size() != 0)
                C(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                    std::conj(C(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)));
    return C;
}

OracleRun interacting_run(const SystemConfig& config, const OracleConfig& oc, bool ramped)
{
    require_valid(config);
    const int dim = config.n_sites() + config.n_leads() * oc.lead_length;
    if (dim > max_many_body_sites)
        throw DimensionCap("many-body oracle needs n + m L <= " + std::to_string(max_many_body_sites) + ", got " +
                           std::to_string(dim));
    const auto parts = hamiltonian_parts(config, oc.lead_length);
    const Protocol proto = make_protocol(config, oc, ramped);
    const Probe probe(parts.layout);
    const auto P = probe.rows.size();
    OracleRun run;
    init_run(run, proto, config.n_sites(), config.n_leads());

    const FockSpace fock(dim);
    const RMatrix u = interaction_matrix(config, parts.layout);
    std::vector<CMatrix> rho = initial_many_body_state(config, parts, fock, u, oc);
    const OperatorSet ops = probe_operators(fock, probe);
    const double trace0 = [&] {
        double z = 0.0;
        for (const auto& r : rho) z += r.trace().real();
        return z;
    }();
    double number0 = 0.0;
    for (int s = 0; s < fock.sectors(); ++s) number0 += s * rho[s].trace().real();

    std::size_t next = 0;
    double tau = 0.0;
    if (proto.ramp_end > 0.0) {
        for (const auto& [t0, t1] : ramp_segments(proto, oc.ramp_step)) {
            if (next < proto.times.size() && std::abs(proto.times[next] - t0) < 1e-12) {
                record(config, probe, probe_expectations(rho, ops, P), switch_scales(config, oc, t0, true).first, run,
                       static_cast<Eigen::Index>(next));
                ++next;
            }
            const auto [cs, bs] = switch_scales(config, oc, 0.5 * (t0 + t1), true);
            const auto H = many_body_hamiltonian(fock, CMatrix(parts.combine(cs, bs)), u);
            for (int s = 0; s < fock.sectors(); ++s) {
                const CMatrix U = hermitian_exp(H[s], -I * (t1 - t0));
                rho[s] = U * rho[s] * U.adjoint();
            }
        }
        tau = proto.ramp_end;
    }

    // free running in the eigenbasis of the final Hamiltonian
    const auto H = many_body_hamiltonian(fock, CMatrix(parts.combine(1.0, 1.0)), u);
    std::vector<CMatrix> vecs(fock.sectors()), rho_e(fock.sectors());
    std::vector<RVector> ens(fock.sectors());
    std::vector<std::vector<CMatrix>> ops_e(fock.sectors());
    for (int s = 0; s < fock.sectors(); ++s) {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(H[s]);
        vecs[s] = es.eigenvectors();
        ens[s] = es.eigenvalues();
        rho_e[s] = vecs[s].adjoint() * rho[s] * vecs[s];
        for (const auto& op : ops.ops[s]) ops_e[s].push_back(op.size() ? CMatrix(vecs[s].adjoint() * op * vecs[s]) : CMatrix());
    }
    OperatorSet set_e{ops_e};
    for (; next < proto.times.size(); ++next) {
        const double dt = proto.times[next] - tau;
        std::vector<CMatrix> r(fock.sectors());
        for (int s = 0; s < fock.sectors(); ++s) {
            CVector ph(ens[s].size());
            for (Eigen::Index k = 0; k < ph.size(); ++k) ph(k) = std::polar(1.0, -ens[s](k) * dt);
            r[s] = ph.asDiagonal() * rho_e[s] * ph.conjugate().asDiagonal();
        }
        record(config, probe, probe_expectations(r, set_e, P), 1.0, run, static_cast<Eigen::Index>(next));
        if (next + 1 == proto.times.size()) {
            double z = 0.0, num = 0.0;
            for (int s = 0; s < fock.sectors(); ++s) {
                z += r[s].trace().real();
                num += s * r[s].trace().real();
            }
            run.particle_drift = std::max(std::abs(z - trace0), std::abs(num - number0));
        }
    }
    finish_run(run, proto);
    return run;
}

} // namespace

OracleRun evolve_free(const SystemConfig& config, const OracleConfig& oc)
{
    if (config.sample.interaction != 0.0 && config.sample.pair_potential.cwiseAbs().maxCoeff() > 0.0)
        throw ConfigError("evolve_free requires xi = 0");
    return free_run(config, oc, false);
}

OracleRun evolve_interacting(const SystemConfig& config, const OracleConfig& oc)
{
    return interacting_run(config, oc, false);
}

OracleRun evolve_adiabatic(const SystemConfig& config, const OracleConfig& oc)
{
    const bool interacting = config.sample.interaction != 0.0 && config.sample.pair_potential.cwiseAbs().maxCoeff() > 0.0;
    const bool ramped = oc.ramp != RampProfile::sudden && oc.ramp_duration > 0.0;
    return interacting ? interacting_run(config, oc, ramped) : free_run(config, oc, ramped);
}

OracleRun evolve_hartree_fock_td(const SystemConfig& config, const OracleConfig& oc, double step)
{
    require_valid(config);
    if (config.scenario != Scenario::partitioned)
        throw ConfigError("time-dependent mean field oracle supports the partitioned scenario only");
    if (!(step > 0.0)) throw ConfigError("step must be positive");
    const auto parts = hamiltonian_parts(config, oc.lead_length);
    const Protocol proto = make_protocol(config, oc, false);
    const Probe probe(parts.layout);
    const auto& layout = parts.layout;
    const int N = layout.dimension(), n = layout.n_sample;
    OracleRun run;
    init_run(run, proto, n, config.n_leads());

    const Orbitals orb = initial_orbitals(config, parts, oc);
    const CMatrix C0 = orb.phi * orb.occupation.cast<cplx>().asDiagonal() * orb.phi.adjoint();
    const CMatrix h(parts.combine(1.0, 1.0));
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    const CMatrix B = es.eigenvectors().adjoint() * C0 * es.eigenvectors();
    // sample block of the xi = 0 trajectory C0(t) = e^{-iht} C0 e^{iht}
    auto free_sample_block = [&](double t) {
        CVector ph(N);
        for (int k = 0; k < N; ++k) ph(k) = std::polar(1.0, -es.eigenvalues()(k) * t);
        const CMatrix rows = es.eigenvectors().topRows(n) * ph.asDiagonal();
        return CMatrix(rows * B * rows.adjoint());
    };
    const double xi = config.sample.interaction;
    const RMatrix& w = config.sample.pair_potential;
    auto mean_field = [&](double t) {
        const CMatrix rho = free_sample_block(t);
        CMatrix v = CMatrix::Zero(n, n);
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y) {
                v(x, x) += w(x, y) * rho(y, y).real();
                v(x, y) -= w(x, y) * rho(x, y);
            }
        CMatrix hh = h;
        hh.topLeftCorner(n, n) += xi * v;
        return hh;
    };

    auto probe_block = [&](const CMatrix& C) {
        const auto P = static_cast<Eigen::Index>(probe.rows.size());
        CMatrix out(P, P);
        for (Eigen::Index a = 0; a < P; ++a)
            for (Eigen::Index b = 0; b < P; ++b) out(a, b) = C(probe.rows[a], probe.rows[b]);
        return out;
    };

    CMatrix C = C0;
    double t = 0.0;
    const double n0 = C0.trace().real();
    for (std::size_t i = 0; i < proto.times.size(); ++i) {
        const double target = proto.times[i];
        while (t < target - 1e-12) {
            const double hstep = std::min(step, target - t);
            const CMatrix U = hermitian_exp(mean_field(t + 0.5 * hstep), -I * hstep);
            C = U * C * U.adjoint();
            t += hstep;
        }
        record(config, probe, probe_block(C), 1.0, run, static_cast<Eigen::Index>(i));
    }
    run.particle_drift = std::abs(C.trace().real() - n0);
    finish_run(run, proto);
    return run;
}

IndependenceReport initial_state_independence(const SystemConfig& config, const OracleConfig& oc,
                                              const std::vector<CMatrix>& sample_states)
{
    if (config.scenario != Scenario::partitioned)
        throw ConfigError("initial-state independence is defined for the partitioned scenario");
    const bool interacting = config.sample.interaction != 0.0 && config.sample.pair_potential.cwiseAbs().maxCoeff() > 0.0;
    IndependenceReport report;
    for (const auto& state : sample_states) {
        OracleConfig c = oc;
        c.sample_state = SampleState::custom;
        c.sample_density = state;
        const auto run = interacting ? evolve_interacting(config, c) : evolve_free(config, c);
        report.plateaus.push_back(run.charge_plateaus);
    }
    if (report.plateaus.empty()) return report;
    for (int j = 0; j < config.n_leads(); ++j) {
        double lo = 1e300, hi = -1e300, mean = 0.0;
        for (const auto& p : report.plateaus) {
            lo = std::min(lo, p[j].value);
            hi = std::max(hi, p[j].value);
            mean += p[j].value;
        }
        mean /= static_cast<double>(report.plateaus.size());
        if (hi > lo) report.spread = std::max(report.spread, (hi - lo) / std::max(std::abs(mean), 1e-300));
    }
    return report;
}

} // namespace neqt
