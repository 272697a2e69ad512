//! Pseudo-spectral time integration for periodic transport and
//! advection-diffusion, with an energy-budget ledger.
//!
//! Scheme: fourth-order explicit advection (Lawson-type exponential RK4)
//! with the diffusion semigroup applied exactly through an integrating
//! factor; every nonlinear product is dealiased by the two-thirds rule.
//! Drift-free problems skip the stepper entirely and use the exact heat
//! multiplier, where the dissipation ledger is exact.
//!
//! The budget ledger uses the stepper's own nodes: trapezoid with endpoint
//! derivative correction (the derivatives come from the same right-hand
//! sides the stepper evaluates), so the budget residual isolates genuine
//! solver error.

use crate::error::{Error, Result};
use crate::field::Field2;
use crate::grid::{Grid, TWO_PI};
use crate::tolerances as tol;
use num_complex::Complex64;
use std::sync::Arc;

/// Physical-space velocity samples at one instant. Shear variants carry the
/// single nonzero component (full lattice order).
pub enum DriftField {
    Zero,
    /// `v = (a(x,y), 0)`
    ShearX(Vec<f64>),
    /// `v = (0, a(x,y))`
    ShearY(Vec<f64>),
    Full(Vec<f64>, Vec<f64>),
}

/// Time-dependent drift provider; the solver queries it per stage, so
/// construction modules can supply analytic drifts without storing
/// trajectories.
pub trait Drift: Send + Sync {
    fn velocity(&self, t: f64, grid: Grid) -> DriftField;

    /// Upper bound for `max |v|` over `[t0, t1]`.
    fn max_speed(&self, t0: f64, t1: f64) -> f64;

    /// Points in `(t0, t1)` where the drift's smooth structure changes;
    /// the stepper aligns segment boundaries to these.
    fn knots(&self, t0: f64, t1: f64) -> Vec<f64> {
        let _ = (t0, t1);
        Vec::new()
    }

    /// Relative spectral divergence of the sampled velocity.
    fn divergence_defect(&self, t: f64, grid: Grid) -> f64 {
        let (vx, vy) = match self.velocity(t, grid) {
            DriftField::Zero => return 0.0,
            DriftField::ShearX(a) => (a, vec![0.0; grid.len()]),
            DriftField::ShearY(a) => (vec![0.0; grid.len()], a),
            DriftField::Full(a, b) => (a, b),
        };
        let v = Field2::from_physical(grid, vec![vx, vy]).expect("grid lattice");
        let scale = v.l2_norm();
        if scale == 0.0 {
            0.0
        } else {
            v.divergence().expect("vector field").l2_norm() / scale
        }
    }
}

/// Drift with constant velocity `(cx, cy)`.
pub struct ConstantDrift(pub f64, pub f64);

impl Drift for ConstantDrift {
    fn velocity(&self, _t: f64, grid: Grid) -> DriftField {
        DriftField::Full(vec![self.0; grid.len()], vec![self.1; grid.len()])
    }
    fn max_speed(&self, _t0: f64, _t1: f64) -> f64 {
        (self.0 * self.0 + self.1 * self.1).sqrt()
    }
}

pub type SourceFn = Arc<dyn Fn(f64, Grid) -> Field2 + Send + Sync>;

/// One evolving scalar sharing the problem's drift.
pub struct SpeciesSpec {
    pub label: String,
    pub nu: f64,
    pub datum: Field2,
    pub source: Option<SourceFn>,
}

#[derive(Debug, Clone, Copy)]
pub struct BudgetSample {
    pub t: f64,
    pub energy: f64,
    pub dissipation: f64,
    pub work: f64,
    pub residual: f64,
}

/// Time series of kinetic energy, cumulative dissipation, cumulative work,
/// and the residual of the energy equality.
#[derive(Debug, Clone, Default)]
pub struct EnergyBudget {
    pub samples: Vec<BudgetSample>,
}

impl EnergyBudget {
    pub fn initial_energy(&self) -> f64 {
        self.samples.first().map(|s| s.energy).unwrap_or(0.0)
    }
    pub fn final_energy(&self) -> f64 {
        self.samples.last().map(|s| s.energy).unwrap_or(0.0)
    }
    pub fn total_dissipation(&self) -> f64 {
        self.samples.last().map(|s| s.dissipation).unwrap_or(0.0)
    }
    pub fn total_work(&self) -> f64 {
        self.samples.last().map(|s| s.work).unwrap_or(0.0)
    }
    pub fn max_abs_residual(&self) -> f64 {
        self.samples.iter().map(|s| s.residual.abs()).fold(0.0, f64::max)
    }
    pub fn dissipation_is_monotone(&self) -> bool {
        self.samples.windows(2).all(|w| w[1].dissipation >= w[0].dissipation - 1e-12)
    }
}

pub struct Problem {
    pub grid: Grid,
    pub drift: Option<Arc<dyn Drift>>,
    pub species: Vec<SpeciesSpec>,
    pub t_span: (f64, f64),
    /// CFL constant on `max|v| dt / dx`.
    pub cfl: f64,
    /// Fixed step override (convergence studies).
    pub forced_dt: Option<f64>,
    /// Steps between diagnostic samples.
    pub sample_every: usize,
    /// Abort when the top-octave energy fraction exceeds this.
    pub tail_guard: Option<f64>,
    /// Abort when `||theta||_inf` exceeds this (monitored, not enforced).
    pub linf_ceiling: Option<f64>,
    pub extra_knots: Vec<f64>,
}

impl Problem {
    pub fn new(grid: Grid, species: Vec<SpeciesSpec>, t_span: (f64, f64)) -> Problem {
        Problem {
            grid,
            drift: None,
            species,
            t_span,
            cfl: 0.5,
            forced_dt: None,
            sample_every: 16,
            tail_guard: Some(tol::TAIL_ENERGY_FRACTION),
            linf_ceiling: None,
            extra_knots: Vec::new(),
        }
    }

    pub fn with_drift(mut self, drift: Arc<dyn Drift>) -> Problem {
        self.drift = Some(drift);
        self
    }
}

pub struct Outcome {
    pub finals: Vec<Field2>,
    pub budgets: Vec<EnergyBudget>,
    /// `sup_t ||species_0 - species_1||_{L^2}`, tracked at every step when
    /// at least two species run.
    pub pair_l2_diff_sup: f64,
    pub steps: usize,
}

/// Exact diffusion semigroup: `coeff(k) <- coeff(k) * exp(-nu |k|^2 dt)`.
pub fn heat_multiplier(field: &Field2, nu: f64, dt: f64) -> Field2 {
    field.multiply_symbol(|kx, ky| (-nu * ((kx * kx + ky * ky) as f64) * dt).exp())
}

struct SpectralTables {
    kx: Vec<f64>,
    ky: Vec<f64>,
    k2: Vec<f64>,
    dealias: Vec<f64>,
}

impl SpectralTables {
    fn new(grid: Grid) -> SpectralTables {
        let n = grid.n();
        let cut = grid.dealias_cutoff() as i64;
        let mut kx = vec![0.0; n * n];
        let mut ky = vec![0.0; n * n];
        let mut k2 = vec![0.0; n * n];
        let mut dealias = vec![0.0; n * n];
        for by in 0..n {
            let fy = grid.freq(by);
            for bx in 0..n {
                let fx = grid.freq(bx);
                let i = by * n + bx;
                kx[i] = fx as f64;
                ky[i] = fy as f64;
                k2[i] = (fx * fx + fy * fy) as f64;
                dealias[i] = if fx.abs() > cut || fy.abs() > cut { 0.0 } else { 1.0 };
            }
        }
        SpectralTables { kx, ky, k2, dealias }
    }
}

struct SpeciesState {
    nu: f64,
    coeffs: Vec<Complex64>,
    source: Option<SourceFn>,
    dissipation: f64,
    work: f64,
    budget: EnergyBudget,
}

impl SpeciesState {
    fn energy(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>() * TWO_PI * TWO_PI
    }

    fn grad_energy_rate(&self, tables: &SpectralTables) -> f64 {
        // 2 nu ||grad theta||^2
        let s: f64 = self
            .coeffs
            .iter()
            .zip(&tables.k2)
            .map(|(z, k2)| k2 * z.norm_sqr())
            .sum();
        2.0 * self.nu * s * TWO_PI * TWO_PI
    }

    /// d/dt of `2 nu ||grad theta||^2` given the full time derivative.
    fn grad_energy_rate_dot(&self, tables: &SpectralTables, dcoeffs: &[Complex64]) -> f64 {
        let s: f64 = self
            .coeffs
            .iter()
            .zip(dcoeffs)
            .zip(&tables.k2)
            .map(|((z, dz), k2)| k2 * (z.re * dz.re + z.im * dz.im))
            .sum();
        4.0 * self.nu * s * TWO_PI * TWO_PI
    }
}

fn fetch_velocity(drift: Option<&Arc<dyn Drift>>, t: f64, grid: Grid) -> DriftField {
    match drift {
        None => DriftField::Zero,
        Some(d) => d.velocity(t, grid),
    }
}

/// Advection right-hand side `-(v . grad theta)` plus source, in spectral
/// space, dealiased.
fn advection_rhs(
    grid: Grid,
    tables: &SpectralTables,
    vel: &DriftField,
    coeffs: &[Complex64],
    source: Option<&SourceFn>,
    t: f64,
) -> Vec<Complex64> {
    let n = grid.n();
    let mut rhs = match vel {
        DriftField::Zero => vec![Complex64::default(); n * n],
        DriftField::ShearX(a) => single_component_advect(grid, tables, coeffs, a, true),
        DriftField::ShearY(a) => single_component_advect(grid, tables, coeffs, a, false),
        DriftField::Full(vx, vy) => {
            let mut gx: Vec<Complex64> = coeffs
                .iter()
                .zip(&tables.kx)
                .zip(&tables.dealias)
                .map(|((z, kx), d)| Complex64::new(0.0, *kx) * z * d)
                .collect();
            let mut gy: Vec<Complex64> = coeffs
                .iter()
                .zip(&tables.ky)
                .zip(&tables.dealias)
                .map(|((z, ky), d)| Complex64::new(0.0, *ky) * z * d)
                .collect();
            crate::fft::fft2_inverse(&mut gx, n);
            crate::fft::fft2_inverse(&mut gy, n);
            let mut prod: Vec<Complex64> = (0..n * n)
                .map(|i| Complex64::new(-(vx[i] * gx[i].re + vy[i] * gy[i].re), 0.0))
                .collect();
            crate::fft::fft2_forward(&mut prod, n);
            prod
        }
    };
    for (z, d) in rhs.iter_mut().zip(&tables.dealias) {
        *z *= *d;
    }
    if let Some(src) = source {
        let s = src(t, grid);
        for (z, sc) in rhs.iter_mut().zip(s.coeffs(0)) {
            *z += sc;
        }
    }
    rhs
}

fn single_component_advect(
    grid: Grid,
    tables: &SpectralTables,
    coeffs: &[Complex64],
    vel: &[f64],
    along_x: bool,
) -> Vec<Complex64> {
    let n = grid.n();
    let ks = if along_x { &tables.kx } else { &tables.ky };
    let mut g: Vec<Complex64> = coeffs
        .iter()
        .zip(ks)
        .zip(&tables.dealias)
        .map(|((z, k), d)| Complex64::new(0.0, *k) * z * d)
        .collect();
    crate::fft::fft2_inverse(&mut g, n);
    for (z, v) in g.iter_mut().zip(vel) {
        *z = Complex64::new(-(v * z.re), 0.0);
    }
    crate::fft::fft2_forward(&mut g, n);
    g
}

/// Integrates the problem, invoking `on_sample` with the current fields at
/// the configured cadence (plus the initial instant and every segment end).
pub fn integrate(p: &Problem, mut on_sample: impl FnMut(f64, &[Field2])) -> Result<Outcome> {
    let grid = p.grid;
    let tables = SpectralTables::new(grid);
    let (t0, t1) = p.t_span;
    let span = t1 - t0;

    if let Some(d) = &p.drift {
        for frac in [0.0, 0.5] {
            let defect = d.divergence_defect(t0 + frac * span, grid);
            if defect > tol::DIVERGENCE_FREE {
                return Err(Error::GridMismatch(format!(
                    "drift divergence defect {defect:.3e} exceeds {:.0e}",
                    tol::DIVERGENCE_FREE
                )));
            }
        }
    }

    let mut states: Vec<SpeciesState> = p
        .species
        .iter()
        .map(|s| {
            let mut st = SpeciesState {
                nu: s.nu,
                coeffs: s.datum.dealias().coeffs(0).to_vec(),
                source: s.source.clone(),
                dissipation: 0.0,
                work: 0.0,
                budget: EnergyBudget::default(),
            };
            let e = st.energy();
            st.budget.samples.push(BudgetSample {
                t: t0,
                energy: e,
                dissipation: 0.0,
                work: 0.0,
                residual: 0.0,
            });
            st
        })
        .collect();

    let fields_of = |states: &[SpeciesState]| -> Vec<Field2> {
        states
            .iter()
            .map(|s| Field2::from_spectral(grid, vec![s.coeffs.clone()]).expect("state size"))
            .collect()
    };

    on_sample(t0, &fields_of(&states));

    let mut knots: Vec<f64> = vec![t0, t1];
    if let Some(d) = &p.drift {
        knots.extend(d.knots(t0, t1));
    }
    knots.extend(p.extra_knots.iter().cloned().filter(|k| *k > t0 && *k < t1));
    knots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    knots.dedup_by(|a, b| (*a - *b).abs() < 1e-14 * span.max(1.0));

    let pure_heat = p.drift.is_none() && p.species.iter().all(|s| s.source.is_none());

    let mut pair_sup =
        if states.len() >= 2 { l2_diff(&states[0], &states[1]) } else { 0.0 };
    let mut steps_total = 0usize;

    for seg in knots.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        if b - a <= 0.0 {
            continue;
        }
        if pure_heat {
            // exact semigroup over the whole segment; exact ledger
            for st in states.iter_mut() {
                let e_before = st.energy();
                for (z, k2) in st.coeffs.iter_mut().zip(&tables.k2) {
                    *z *= (-st.nu * k2 * (b - a)).exp();
                }
                let e_after = st.energy();
                st.dissipation += e_before - e_after;
                let r = e_after - st.budget.initial_energy() + st.dissipation - st.work;
                st.budget.samples.push(BudgetSample {
                    t: b,
                    energy: e_after,
                    dissipation: st.dissipation,
                    work: st.work,
                    residual: r,
                });
            }
            steps_total += 1;
            if states.len() >= 2 {
                pair_sup = pair_sup.max(l2_diff(&states[0], &states[1]));
            }
            on_sample(b, &fields_of(&states));
            continue;
        }

        let vmax = p.drift.as_ref().map(|d| d.max_speed(a, b)).unwrap_or(0.0).max(1e-12);
        let dt_cfl = p.cfl * grid.dx() / vmax;
        let dt_max = p.forced_dt.unwrap_or(dt_cfl).min(b - a);
        if dt_max < 1e-12 * span {
            return Err(Error::CflCollapse { t: a, speed: vmax, dt: dt_max, floor: 1e-12 * span });
        }
        let nsteps = ((b - a) / dt_max).ceil() as usize;
        let h = (b - a) / nsteps as f64;

        // integrating-factor tables for this segment's step size
        let exps: Vec<(Vec<f64>, Vec<f64>)> = states
            .iter()
            .map(|st| {
                let full: Vec<f64> = tables.k2.iter().map(|k2| (-st.nu * k2 * h).exp()).collect();
                let half: Vec<f64> =
                    tables.k2.iter().map(|k2| (-st.nu * k2 * 0.5 * h).exp()).collect();
                (full, half)
            })
            .collect();

        // end-of-step RHS evaluations double as the next step's k1
        let mut cached_k1: Vec<Option<Vec<Complex64>>> = vec![None; states.len()];

        for step in 0..nsteps {
            let t = a + step as f64 * h;
            let v_t = fetch_velocity(p.drift.as_ref(), t, grid);
            let v_mid = fetch_velocity(p.drift.as_ref(), t + 0.5 * h, grid);
            let v_end = fetch_velocity(p.drift.as_ref(), t + h, grid);

            for (si, st) in states.iter_mut().enumerate() {
                let (e_full, e_half) = &exps[si];
                let src = st.source.clone();

                let k1 = cached_k1[si].take().unwrap_or_else(|| {
                    advection_rhs(grid, &tables, &v_t, &st.coeffs, src.as_ref(), t)
                });

                // ledger node values at t
                let dtheta: Vec<Complex64> = st
                    .coeffs
                    .iter()
                    .zip(&k1)
                    .zip(&tables.k2)
                    .map(|((z, n1), k2)| n1 - z * (st.nu * k2))
                    .collect();
                let g0 = st.grad_energy_rate(&tables);
                let g0d = st.grad_energy_rate_dot(&tables, &dtheta);
                let (w0, w0d) = work_rate(grid, st, &st.coeffs.clone(), &dtheta, t, h);
                let theta = std::mem::take(&mut st.coeffs);

                // Lawson RK4
                let e_theta_half: Vec<Complex64> =
                    theta.iter().zip(e_half).map(|(z, e)| z * *e).collect();
                let e_k1_half: Vec<Complex64> =
                    k1.iter().zip(e_half).map(|(z, e)| z * *e).collect();
                let stage2: Vec<Complex64> = e_theta_half
                    .iter()
                    .zip(&e_k1_half)
                    .map(|(b, i)| b + i * (0.5 * h))
                    .collect();
                let k2v =
                    advection_rhs(grid, &tables, &v_mid, &stage2, src.as_ref(), t + 0.5 * h);
                let stage3: Vec<Complex64> = e_theta_half
                    .iter()
                    .zip(&k2v)
                    .map(|(b, i)| b + i * (0.5 * h))
                    .collect();
                let k3v =
                    advection_rhs(grid, &tables, &v_mid, &stage3, src.as_ref(), t + 0.5 * h);
                let e_theta_full: Vec<Complex64> =
                    theta.iter().zip(e_full).map(|(z, e)| z * *e).collect();
                let e_k3_half: Vec<Complex64> =
                    k3v.iter().zip(e_half).map(|(z, e)| z * *e).collect();
                let stage4: Vec<Complex64> = e_theta_full
                    .iter()
                    .zip(&e_k3_half)
                    .map(|(b, i)| b + i * h)
                    .collect();
                let k4v = advection_rhs(grid, &tables, &v_end, &stage4, src.as_ref(), t + h);

                let mut new = e_theta_full;
                for i in 0..new.len() {
                    let acc =
                        e_full[i] * k1[i] + e_half[i] * (k2v[i] + k3v[i]) * 2.0 + k4v[i];
                    new[i] += acc * (h / 6.0);
                }
                st.coeffs = new;

                // ledger node values at t + h
                let k1_next =
                    advection_rhs(grid, &tables, &v_end, &st.coeffs, src.as_ref(), t + h);
                let dnext: Vec<Complex64> = st
                    .coeffs
                    .iter()
                    .zip(&k1_next)
                    .zip(&tables.k2)
                    .map(|((z, n1), k2)| n1 - z * (st.nu * k2))
                    .collect();
                let g1 = st.grad_energy_rate(&tables);
                let g1d = st.grad_energy_rate_dot(&tables, &dnext);
                let (w1, w1d) = work_rate(grid, st, &st.coeffs.clone(), &dnext, t + h, h);
                cached_k1[si] = Some(k1_next);

                // corrected trapezoid on the stepper's own nodes
                st.dissipation += 0.5 * h * (g0 + g1) + h * h / 12.0 * (g0d - g1d);
                st.work += 0.5 * h * (w0 + w1) + h * h / 12.0 * (w0d - w1d);
            }

            steps_total += 1;
            if states.len() >= 2 {
                pair_sup = pair_sup.max(l2_diff(&states[0], &states[1]));
            }

            let t_now = t + h;
            let sampling = steps_total % p.sample_every.max(1) == 0 || step + 1 == nsteps;
            if sampling {
                for st in states.iter_mut() {
                    let e = st.energy();
                    let r = e - st.budget.initial_energy() + st.dissipation - st.work;
                    st.budget.samples.push(BudgetSample {
                        t: t_now,
                        energy: e,
                        dissipation: st.dissipation,
                        work: st.work,
                        residual: r,
                    });
                }
                let fields = fields_of(&states);
                if let Some(limit) = p.tail_guard {
                    for f in &fields {
                        let frac = f.tail_energy_fraction();
                        if frac > limit {
                            return Err(Error::ResolutionLoss { t: t_now, fraction: frac, limit });
                        }
                    }
                }
                if let Some(ceiling) = p.linf_ceiling {
                    for f in &fields {
                        let m = f.max_abs();
                        if m > ceiling {
                            return Err(Error::ResolutionLoss {
                                t: t_now,
                                fraction: m,
                                limit: ceiling,
                            });
                        }
                    }
                }
                on_sample(t_now, &fields);
            }
        }
    }

    let finals = fields_of(&states);
    Ok(Outcome {
        finals,
        budgets: states.into_iter().map(|s| s.budget).collect(),
        pair_l2_diff_sup: pair_sup,
        steps: steps_total,
    })
}

fn l2_diff(a: &SpeciesState, b: &SpeciesState) -> f64 {
    let s: f64 =
        a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| (x - y).norm_sqr()).sum();
    (s * TWO_PI * TWO_PI).sqrt()
}

/// Work rate `w = 2 (source, theta)` and its time derivative; the source
/// time derivative is a central difference of the (smooth, closed-form)
/// source closure.
fn work_rate(
    grid: Grid,
    st: &SpeciesState,
    theta: &[Complex64],
    dtheta: &[Complex64],
    t: f64,
    h: f64,
) -> (f64, f64) {
    let Some(src) = &st.source else {
        return (0.0, 0.0);
    };
    let s = src(t, grid);
    let sc = s.coeffs(0);
    let dot = |a: &[Complex64], b: &[Complex64]| -> f64 {
        a.iter().zip(b).map(|(x, y)| x.re * y.re + x.im * y.im).sum::<f64>() * TWO_PI * TWO_PI
    };
    let w = 2.0 * dot(sc, theta);
    let delta = (h * 1e-2).max(1e-9);
    let sp = src(t + delta, grid);
    let sm = src(t - delta, grid);
    let dsrc: Vec<Complex64> = sp
        .coeffs(0)
        .iter()
        .zip(sm.coeffs(0))
        .map(|(p, m)| (p - m) / (2.0 * delta))
        .collect();
    let wd = 2.0 * (dot(&dsrc, theta) + dot(sc, dtheta));
    (w, wd)
}
