//! Littlewood-Paley shells, Besov-scale norms, shell fluxes and the
//! commutator decomposition.
//!
//! The bank carries a smooth radial bump `chi` (1 on `|xi| <= 3/4`, 0 on
//! `|xi| >= 1`) and shell profiles
//! `phi_q(xi) = chi(xi / (base * lambda_q)) - chi(xi / lambda_q)`
//! on the frequency ladder `lambda_q = base^q`. Summed over shells these
//! telescope exactly, so `chi + sum_q phi_q = 1` on the whole lattice for
//! any integer base >= 2 (the partition-of-unity invariant is tested for
//! bases 5 and 2).

use crate::bump::chi;
use crate::error::{Error, Result};
use crate::field::{mul_dealiased, Field2};
use crate::grid::Grid;
use crate::norms::lp_norm;
use crate::weights::WeightSequence;


#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LPBank {
    base: u32,
}

/// Per-shell values `lambda_q^s * ||Delta_q u||_{L^p}` for `q = -1..=q_max`.
#[derive(Debug, Clone)]
pub struct ShellSpectrum {
    pub base: u32,
    pub s: f64,
    pub p: f64,
    /// values[i] corresponds to shell `q = i - 1`.
    pub values: Vec<f64>,
}

impl ShellSpectrum {
    pub fn q_max(&self) -> i32 {
        self.values.len() as i32 - 2
    }

    pub fn value(&self, q: i32) -> f64 {
        self.values[(q + 1) as usize]
    }

    /// Finite surrogate for a limsup: the maximum over the top three shells.
    pub fn top3_max(&self) -> f64 {
        let n = self.values.len();
        self.values[n.saturating_sub(3)..].iter().cloned().fold(0.0, f64::max)
    }
}

/// Report for one Bernstein-inequality evaluation at k = 1 (gradient).
#[derive(Debug, Clone)]
pub struct BernsteinReport {
    /// `lambda_q * ||Delta_q u||_r`
    pub lhs: f64,
    /// `||grad Delta_q u||_r`
    pub mid: f64,
    /// `lambda_q^{1 + d(1/s - 1/r)} * ||Delta_q u||_s`
    pub rhs: f64,
    pub ratio_lhs_mid: f64,
    pub ratio_mid_rhs: f64,
}

impl LPBank {
    pub fn new(base: u32) -> LPBank {
        assert!(base >= 2, "frequency ladder base must be >= 2");
        LPBank { base }
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn lambda(&self, q: i32) -> f64 {
        (self.base as f64).powi(q)
    }

    /// Shell profile `phi_q` evaluated at radius `r` (`q >= 0`), or `chi` at
    /// `q = -1`.
    pub fn phi(&self, q: i32, r: f64) -> f64 {
        if q < 0 {
            return chi(r);
        }
        let lq = self.lambda(q);
        chi(r / (self.base as f64 * lq)) - chi(r / lq)
    }

    /// Low-pass symbol of `S_q = sum_{p <= q} Delta_p`; telescopes to a
    /// single bump for every base.
    pub fn low_pass_symbol(&self, q: i32, r: f64) -> f64 {
        chi(r / (self.base as f64 * self.lambda(q)))
    }

    /// Largest usable shell: `2 * lambda_{q_max}` below the dealias-compatible
    /// band `(2/3) * Nyquist`.
    pub fn q_max(&self, grid: Grid) -> i32 {
        let limit = grid.nyquist() as f64 * (2.0 / 3.0);
        let mut q = 0;
        while 2.0 * self.lambda(q + 1) < limit {
            q += 1;
        }
        q
    }

    /// Max deviation of `chi + sum_q phi_q` from 1 over the integer lattice
    /// below Nyquist.
    pub fn partition_residual(&self, grid: Grid) -> f64 {
        // enough shells that the final telescoped bump covers the lattice
        let mut q_top = 0;
        while 0.75 * self.base as f64 * self.lambda(q_top) < grid.nyquist() as f64 {
            q_top += 1;
        }
        let mut worst = 0.0f64;
        let n = grid.n() as i64;
        for ky in -n / 2..n / 2 {
            for kx in -n / 2..n / 2 {
                let r = ((kx * kx + ky * ky) as f64).sqrt();
                if r >= grid.nyquist() as f64 {
                    continue;
                }
                let mut sum = chi(r);
                for q in 0..=q_top {
                    sum += self.phi(q, r);
                }
                worst = worst.max((sum - 1.0).abs());
            }
        }
        worst
    }

    fn radial(&self, grid: Grid, f: impl Fn(f64) -> f64) -> impl Fn(i64, i64) -> f64 {
        let _ = grid;
        move |kx, ky| f(((kx * kx + ky * ky) as f64).sqrt())
    }

    /// `Delta_q u`.
    pub fn shell_project(&self, u: &Field2, q: i32) -> Result<Field2> {
        let qm = self.q_max(u.grid());
        if q > qm {
            return Err(Error::ShellBeyondNyquist { q: q as usize, q_max: qm as usize });
        }
        let bank = *self;
        Ok(u.multiply_symbol(self.radial(u.grid(), move |r| bank.phi(q, r))))
    }

    /// `S_q u`.
    pub fn low_pass(&self, u: &Field2, q: i32) -> Result<Field2> {
        let qm = self.q_max(u.grid());
        if q > qm {
            return Err(Error::ShellBeyondNyquist { q: q as usize, q_max: qm as usize });
        }
        let bank = *self;
        Ok(u.multiply_symbol(self.radial(u.grid(), move |r| bank.low_pass_symbol(q, r))))
    }

    /// Sharp frequency projection `P_{<= Lambda}` (or its complement).
    pub fn sharp_project(&self, u: &Field2, lambda: f64, keep_below: bool) -> Result<Field2> {
        if lambda >= u.grid().nyquist() as f64 {
            return Err(Error::Unresolvable {
                freq: lambda,
                n: u.grid().n(),
                cutoff: u.grid().dealias_cutoff(),
            });
        }
        Ok(u.multiply_symbol(self.radial(u.grid(), move |r| {
            let below = r <= lambda;
            if below == keep_below {
                1.0
            } else {
                0.0
            }
        })))
    }

    /// The three quantities of Bernstein's inequality at first derivative
    /// order, plus the two ratios (d = 2 here).
    pub fn bernstein_check(&self, u: &Field2, q: i32, r: f64, s: f64) -> Result<BernsteinReport> {
        if r < s {
            return Err(Error::BadExponentPair { r, s });
        }
        let d = 2.0;
        let block = self.shell_project(u, q)?;
        let mut grad_parts = Vec::new();
        for c in 0..block.ncomp() {
            let g = block.component(c).gradient()?;
            grad_parts.push(g.component(0));
            grad_parts.push(g.component(1));
        }
        let refs: Vec<&Field2> = grad_parts.iter().collect();
        let grad = Field2::from_components(&refs)?;
        let lq = self.lambda(q);
        let lhs = lq * lp_norm(&block, r);
        let mid = lp_norm(&grad, r);
        let rhs = lq.powf(1.0 + d * (1.0 / s - 1.0 / r)) * lp_norm(&block, s);
        let safe = |a: f64, b: f64| if b == 0.0 { 0.0 } else { a / b };
        Ok(BernsteinReport {
            lhs,
            mid,
            rhs,
            ratio_lhs_mid: safe(lhs, mid),
            ratio_mid_rhs: safe(mid, rhs),
        })
    }

    /// Per-shell values `lambda_q^s ||Delta_q u||_p`, `q = -1..=q_max`.
    pub fn shell_spectrum(&self, u: &Field2, s: f64, p: f64) -> Result<ShellSpectrum> {
        let qm = self.q_max(u.grid());
        let mut values = Vec::with_capacity((qm + 2) as usize);
        for q in -1..=qm {
            let block = self.shell_project(u, q)?;
            values.push(self.lambda(q).powf(s) * lp_norm(&block, p));
        }
        Ok(ShellSpectrum { base: self.base, s, p, values })
    }
}

/// Besov norm from a shell spectrum: `l^r` aggregation of the per-shell
/// values (`r = inf` gives the sup).
pub fn besov_from_spectrum(spec: &ShellSpectrum, r: f64) -> f64 {
    if r.is_infinite() {
        spec.values.iter().cloned().fold(0.0, f64::max)
    } else {
        spec.values.iter().map(|v| v.powf(r)).sum::<f64>().powf(1.0 / r)
    }
}

/// Weighted Besov norm `sum_q a_{q+2} lambda_q^s ||Delta_q u||_p` from a
/// shell spectrum. When `class_t` is set the weights must pass the class-T
/// membership test.
pub fn weighted_besov_from_spectrum(
    spec: &ShellSpectrum,
    weights: &WeightSequence,
    class_t: bool,
) -> Result<f64> {
    if class_t {
        weights.check_class_t()?;
    }
    let mut acc = 0.0;
    for (i, v) in spec.values.iter().enumerate() {
        let q = i as i32 - 1;
        acc += weights.a((q + 2) as usize) * v;
    }
    Ok(acc)
}

pub fn besov_norm(bank: &LPBank, u: &Field2, s: f64, p: f64, r: f64) -> Result<f64> {
    Ok(besov_from_spectrum(&bank.shell_spectrum(u, s, p)?, r))
}

pub fn weighted_besov_norm(
    bank: &LPBank,
    u: &Field2,
    s: f64,
    p: f64,
    weights: &WeightSequence,
    class_t: bool,
) -> Result<f64> {
    weighted_besov_from_spectrum(&bank.shell_spectrum(u, s, p)?, weights, class_t)
}

/// The sequence whose limsup the caller inspects for `B^{s}_{p,c_0}`
/// membership; identical data to [`LPBank::shell_spectrum`].
pub fn c0_tail(bank: &LPBank, u: &Field2, s: f64, p: f64) -> Result<ShellSpectrum> {
    bank.shell_spectrum(u, s, p)
}

fn max_active_freq(u: &Field2) -> i64 {
    let g = u.grid();
    let n = g.n();
    let mut peak = 0.0f64;
    for c in 0..u.ncomp() {
        for z in u.coeffs(c) {
            peak = peak.max(z.norm());
        }
    }
    let floor = peak * 1e-13;
    let mut kmax = 0i64;
    for c in 0..u.ncomp() {
        let coeffs = u.coeffs(c);
        for by in 0..n {
            let ky = g.freq(by).abs();
            for bx in 0..n {
                let kx = g.freq(bx).abs();
                if coeffs[by * n + bx].norm() > floor {
                    kmax = kmax.max(kx.max(ky));
                }
            }
        }
    }
    kmax
}

fn require_resolved_products(u: &Field2) -> Result<()> {
    let kmax = max_active_freq(u);
    let cutoff = u.grid().dealias_cutoff() as i64;
    if kmax > cutoff {
        return Err(Error::Unresolvable {
            freq: kmax as f64,
            n: u.grid().n(),
            cutoff: cutoff as usize,
        });
    }
    Ok(())
}

/// Outcome of a flux evaluation; `div_warning` is set when the vector input
/// was not divergence-free to the required tolerance.
#[derive(Debug, Clone, Copy)]
pub struct FluxValue {
    pub value: f64,
    pub div_warning: Option<f64>,
}

/// Energy flux through shell `q`: `Pi_q = int S_q(u (x) u) : grad S_q u dx`
/// for a 2-component velocity field. Products are formed in physical space
/// on the dealiased grid.
pub fn flux_shell(bank: &LPBank, u: &Field2, q: i32) -> Result<FluxValue> {
    require_resolved_products(u)?;
    let div = u.divergence()?.l2_norm();
    let scale = u.l2_norm();
    let div_warning = if div > crate::tolerances::DIVERGENCE_FREE * (1.0 + scale) {
        Some(div)
    } else {
        None
    };
    let mut value = 0.0;
    for i in 0..2 {
        // grad S_q u_j, component i of the gradient
        for j in 0..2 {
            let prod = mul_dealiased(&u.component(i), &u.component(j))?;
            let sq_prod = bank.low_pass(&prod, q)?;
            let sq_uj = bank.low_pass(&u.component(j), q)?;
            let grad = sq_uj.gradient()?;
            value += sq_prod.inner_product(&grad.component(i))?;
        }
    }
    Ok(FluxValue { value, div_warning })
}

/// The 2.5-D variant: `int S_q(v rho) . grad S_q rho dx`.
pub fn flux_shell_mixed(bank: &LPBank, v: &Field2, rho: &Field2, q: i32) -> Result<FluxValue> {
    require_resolved_products(v)?;
    require_resolved_products(rho)?;
    let div = v.divergence()?.l2_norm();
    let div_warning = if div > crate::tolerances::DIVERGENCE_FREE * (1.0 + v.l2_norm()) {
        Some(div)
    } else {
        None
    };
    let sq_rho = bank.low_pass(rho, q)?;
    let grad = sq_rho.gradient()?;
    let mut value = 0.0;
    for i in 0..2 {
        let prod = mul_dealiased(&v.component(i), rho)?;
        let sq_prod = bank.low_pass(&prod, q)?;
        value += sq_prod.inner_product(&grad.component(i))?;
    }
    Ok(FluxValue { value, div_warning })
}

/// `lambda_q ||Delta_q u||_{L^3}^3` (pointwise-in-time Onsager integrand).
pub fn onsager_integrand(bank: &LPBank, u: &Field2, q: i32) -> Result<f64> {
    let block = bank.shell_project(u, q)?;
    Ok(bank.lambda(q) * lp_norm(&block, 3.0).powi(3))
}

/// `lambda_q ||Delta_q v||_{L^3} ||Delta_q rho||_{L^3}^2`.
pub fn mixed_integrand(bank: &LPBank, v: &Field2, rho: &Field2, q: i32) -> Result<f64> {
    let bv = bank.shell_project(v, q)?;
    let br = bank.shell_project(rho, q)?;
    Ok(bank.lambda(q) * lp_norm(&bv, 3.0) * lp_norm(&br, 3.0).powi(2))
}

/// Commutator remainder of the low-pass product decomposition,
/// `r_q(v, rho) = S_q(v rho) - (S_q v) rho - v (S_q rho) + v rho`
/// (componentwise in `v`), together with the L2 residual of the identity
/// `S_q(v rho) = r_q - (v - S_q v)(rho - S_q rho) + (S_q v)(S_q rho)`.
///
/// All products are raw pointwise lattice products so the decomposition is
/// an algebraic identity; the residual measures floating-point consistency
/// of the two evaluation routes.
pub fn commutator_r(bank: &LPBank, v: &Field2, rho: &Field2, q: i32) -> Result<(Field2, f64)> {
    let raw_mul = |a: &Field2, b: &Field2| -> Result<Field2> {
        let pa = a.to_physical(0);
        let pb = b.to_physical(0);
        let prod: Vec<f64> = pa.iter().zip(&pb).map(|(x, y)| x * y).collect();
        Field2::from_physical(a.grid(), vec![prod])
    };

    let sq_rho = bank.low_pass(rho, q)?;
    let mut r_comps = Vec::new();
    let mut residual_sq = 0.0;
    for c in 0..v.ncomp() {
        let vc = v.component(c);
        let sq_v = bank.low_pass(&vc, q)?;
        let v_rho = raw_mul(&vc, rho)?;
        let sq_of_vrho = bank.low_pass(&v_rho, q)?;
        // r_q = S_q(v rho) - (S_q v) rho - v (S_q rho) + v rho
        let t1 = raw_mul(&sq_v, rho)?;
        let t2 = raw_mul(&vc, &sq_rho)?;
        let r = sq_of_vrho.sub(&t1)?.sub(&t2)?.add(&v_rho)?;

        // identity residual, evaluated through independent products
        let hi_v = vc.sub(&sq_v)?;
        let hi_rho = rho.sub(&sq_rho)?;
        let hi_prod = raw_mul(&hi_v, &hi_rho)?;
        let low_prod = raw_mul(&sq_v, &sq_rho)?;
        let resid = sq_of_vrho.sub(&r)?.add(&hi_prod)?.sub(&low_prod)?;
        residual_sq += resid.l2_norm().powi(2);
        r_comps.push(r);
    }
    let refs: Vec<&Field2> = r_comps.iter().collect();
    Ok((Field2::from_components(&refs)?, residual_sq.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use crate::tolerances as tol;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn partition_of_unity_both_bases() {
        let g = Grid::new(64).unwrap();
        for base in [2u32, 5] {
            let bank = LPBank::new(base);
            let resid = bank.partition_residual(g);
            assert!(resid <= tol::PARTITION_OF_UNITY, "base {base}: residual {resid}");
        }
    }

    #[test]
    fn support_of_phi() {
        let bank = LPBank::new(2);
        for q in 0..4 {
            let lq = bank.lambda(q);
            assert_eq!(bank.phi(q, 0.74 * lq), 0.0);
            assert_eq!(bank.phi(q, 2.0 * lq), 0.0);
            assert!(bank.phi(q, 1.2 * lq) > 0.9); // pure-shell plateau
        }
        // base 5: phi_1(7) = 1 exactly (7/25 on the chi plateau, 7/5 beyond 1)
        let b5 = LPBank::new(5);
        assert_eq!(b5.phi(1, 7.0), 1.0);
        assert_eq!(b5.phi(0, 7.0), 0.0);
        assert_eq!(b5.phi(2, 7.0), 0.0);
    }

    #[test]
    fn mode_seven_lands_in_shell_one_base_five() {
        let g = Grid::new(64).unwrap();
        let bank = LPBank::new(5);
        let u = Field2::from_fn(g, 1, |x, _| vec![2.0 * (7.0 * x).cos()]);
        let d1 = bank.shell_project(&u, 1).unwrap();
        assert!(d1.sub(&u).unwrap().l2_norm() < 1e-12);
        for q in [-1i32, 0] {
            assert!(bank.shell_project(&u, q).unwrap().l2_norm() < 1e-13, "q = {q}");
        }
    }

    #[test]
    fn constant_field_is_shell_minus_one() {
        let g = Grid::new(32).unwrap();
        let bank = LPBank::new(2);
        let u = Field2::constant(g, 2.0);
        let dm1 = bank.shell_project(&u, -1).unwrap();
        assert!(dm1.sub(&u).unwrap().l2_norm() < 1e-14);
        for q in 0..=bank.q_max(g) {
            assert!(bank.shell_project(&u, q).unwrap().l2_norm() < 1e-14);
        }
    }

    #[test]
    fn reconstruction_of_band_limited_field() {
        let g = Grid::new(128).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for base in [2u32, 5] {
            let bank = LPBank::new(base);
            let u = Field2::random_band_limited(g, 1, 20, &mut rng);
            let radial_kmax = 20.0 * std::f64::consts::SQRT_2;
            let mut sum = bank.shell_project(&u, -1).unwrap();
            // profiles beyond q_max are still well defined: sum far enough
            // that the telescoped bump covers the band.
            let mut q = 0;
            loop {
                let block = u.multiply_symbol(|kx, ky| {
                    bank.phi(q, ((kx * kx + ky * ky) as f64).sqrt())
                });
                sum = sum.add(&block).unwrap();
                if 0.75 * bank.base() as f64 * bank.lambda(q) >= radial_kmax {
                    break;
                }
                q += 1;
            }
            let rel = sum.sub(&u).unwrap().l2_norm() / u.l2_norm();
            assert!(rel <= tol::LP_RECONSTRUCTION, "base {base}: {rel}");
        }
    }

    #[test]
    fn disjoint_shells_annihilate() {
        let g = Grid::new(128).unwrap();
        let bank = LPBank::new(2);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = Field2::random_band_limited(g, 1, 30, &mut rng);
        for q in 0..=bank.q_max(g) {
            for p in 0..=bank.q_max(g) {
                if (p - q).abs() >= 2 {
                    let b = bank
                        .shell_project(&bank.shell_project(&u, p).unwrap(), q)
                        .unwrap();
                    assert!(b.l2_norm() == 0.0, "Delta_{q} Delta_{p} != 0");
                }
            }
        }
    }

    #[test]
    fn bernstein_single_mode() {
        let g = Grid::new(64).unwrap();
        let bank = LPBank::new(2);
        // |k| = lambda_3 = 8
        let u = Field2::from_fn(g, 1, |x, _| vec![(8.0 * x).sin()]);
        let rep = bank.bernstein_check(&u, 3, 2.0, 2.0).unwrap();
        // ||grad Delta_q u||_2 / ||Delta_q u||_2 = |k| exactly
        let blk = bank.shell_project(&u, 3).unwrap();
        let ratio = rep.mid / lp_norm(&blk, 2.0);
        assert!((ratio - 8.0).abs() < 1e-10);
        let rel = ratio / bank.lambda(3);
        assert!((0.75..=2.0).contains(&rel));
    }

    #[test]
    fn bernstein_degenerate_and_errors() {
        let g = Grid::new(32).unwrap();
        let bank = LPBank::new(2);
        let u = Field2::constant(g, 1.0);
        let rep = bank.bernstein_check(&u, 2, 3.0, 2.0).unwrap();
        assert_eq!(rep.lhs, 0.0);
        assert_eq!(rep.mid, 0.0);
        assert_eq!(rep.rhs, 0.0);
        assert!(bank.bernstein_check(&u, 2, 2.0, 3.0).is_err());
    }

    #[test]
    fn bernstein_chain_on_random_shell_field() {
        let g = Grid::new(128).unwrap();
        let bank = LPBank::new(2);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let u = Field2::random_band_limited(g, 1, 20, &mut rng);
        let q = 3;
        let rep = bank.bernstein_check(&bank.shell_project(&u, q).unwrap(), q, 3.0, 2.0).unwrap();
        assert!(rep.ratio_lhs_mid < 100.0, "lhs/mid = {}", rep.ratio_lhs_mid);
        assert!(rep.ratio_mid_rhs < 100.0, "mid/rhs = {}", rep.ratio_mid_rhs);
    }

    #[test]
    fn flux_of_shear_vanishes() {
        let g = Grid::new(64).unwrap();
        let bank = LPBank::new(2);
        let vx = Field2::from_fn(g, 1, |_, y| vec![(y).sin()]);
        let vy = Field2::zeros(g, 1);
        let u = Field2::from_components(&[&vx, &vy]).unwrap();
        for q in 0..=bank.q_max(g) {
            let f = flux_shell(&bank, &u, q).unwrap();
            assert!(f.div_warning.is_none());
            assert!(f.value.abs() < 1e-12, "q = {q}: {}", f.value);
        }
    }

    #[test]
    fn flux_of_fully_resolved_field_vanishes() {
        // u supported entirely below shell q: S_q u = u, and incompressibility
        // kills the trilinear form.
        let g = Grid::new(128).unwrap();
        let bank = LPBank::new(2);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let raw = Field2::random_band_limited(g, 2, 3, &mut rng);
        // project to divergence-free (Leray)
        let u = leray(&raw);
        let q = bank.q_max(g); // support `<= 3` is far below this shell
        let f = flux_shell(&bank, &u, q).unwrap();
        assert!(f.div_warning.is_none());
        let scale = u.l2_norm().powi(3).max(1.0);
        assert!(f.value.abs() <= 1e-12 * scale, "{}", f.value);
    }

    /// Leray projection helper for tests.
    fn leray(u: &Field2) -> Field2 {
        let g = u.grid();
        let n = g.n();
        let mut cx = u.coeffs(0).to_vec();
        let mut cy = u.coeffs(1).to_vec();
        for by in 0..n {
            let ky = g.freq(by) as f64;
            for bx in 0..n {
                let kx = g.freq(bx) as f64;
                let k2 = kx * kx + ky * ky;
                if k2 == 0.0 {
                    continue;
                }
                let i = by * n + bx;
                let dot = (cx[i] * kx + cy[i] * ky) / k2;
                cx[i] -= dot * kx;
                cy[i] -= dot * ky;
            }
        }
        Field2::from_spectral(g, vec![cx, cy]).unwrap()
    }

    #[test]
    fn triad_flux_matches_convolution_oracle() {
        let g = Grid::new(64).unwrap();
        let bank = LPBank::new(2);
        // divergence-free triad k1 + k2 = k3
        let k1 = (4i64, 1i64);
        let k2 = (-1i64, 3i64);
        let k3 = (3i64, 4i64);
        let amps = [
            Complex64::new(0.7, 0.2),
            Complex64::new(-0.4, 0.5),
            Complex64::new(0.3, -0.6),
        ];
        let mut comps = vec![vec![Complex64::default(); g.len()]; 2];
        let mut put = |k: (i64, i64), a: Complex64| {
            let norm = ((k.0 * k.0 + k.1 * k.1) as f64).sqrt();
            let e = (-(k.1 as f64) / norm, k.0 as f64 / norm); // unit, perp to k
            let (bx, by) = (g.bin(k.0).unwrap(), g.bin(k.1).unwrap());
            comps[0][by * g.n() + bx] += a * e.0;
            comps[1][by * g.n() + bx] += a * e.1;
            let (mx, my) = (g.bin(-k.0).unwrap(), g.bin(-k.1).unwrap());
            comps[0][my * g.n() + mx] += a.conj() * e.0;
            comps[1][my * g.n() + mx] += a.conj() * e.1;
        };
        put(k1, amps[0]);
        put(k2, amps[1]);
        put(k3, amps[2]);
        let u = Field2::from_spectral(g, comps).unwrap();
        assert!(u.divergence().unwrap().l2_norm() < 1e-12);

        for q in 0..=2 {
            let fast = flux_shell(&bank, &u, q).unwrap().value;
            let oracle = flux_oracle(&bank, &u, q);
            assert!(
                (fast - oracle).abs() <= 1e-12 * (1.0 + oracle.abs()),
                "q={q}: fft {fast} vs oracle {oracle}"
            );
        }
    }

    /// Brute-force Fourier convolution sum for the truncated flux; only the
    /// finitely many active modes of `u` participate.
    fn flux_oracle(bank: &LPBank, u: &Field2, q: i32) -> f64 {
        let g = u.grid();
        let n = g.n();
        let mut modes: Vec<(i64, i64, Complex64, Complex64)> = Vec::new();
        for by in 0..n {
            for bx in 0..n {
                let a = u.coeffs(0)[by * n + bx];
                let b = u.coeffs(1)[by * n + bx];
                if a.norm() + b.norm() > 1e-14 {
                    modes.push((g.freq(bx), g.freq(by), a, b));
                }
            }
        }
        let sigma = |kx: i64, ky: i64| {
            bank.low_pass_symbol(q, ((kx * kx + ky * ky) as f64).sqrt())
        };
        // sum over pairs (p, r): term = sigma(p+r)^... the pairing reads
        // conj(u_hat(K)) at K = p + r.
        let mut acc = Complex64::default();
        for &(px, py, pa, pb) in &modes {
            for &(rx, ry, ra, rb) in &modes {
                let kx = px + rx;
                let ky = py + ry;
                // locate conj target
                for &(tx, ty, ta, tb) in &modes {
                    if tx == kx && ty == ky {
                        let s_prod = sigma(kx, ky);
                        let s_t = sigma(tx, ty);
                        // tensor (u (x) u)_{ij} = u_i(p) u_j(r); contraction
                        // with i k_i (S_q u_j)(K)*
                        let uij: [[Complex64; 2]; 2] =
                            [[pa * ra, pa * rb], [pb * ra, pb * rb]];
                        let grad_factor =
                            [Complex64::new(0.0, kx as f64), Complex64::new(0.0, ky as f64)];
                        let target = [ta, tb];
                        for i in 0..2 {
                            for j in 0..2 {
                                acc += s_prod * uij[i][j]
                                    * (grad_factor[i] * s_t * target[j]).conj();
                            }
                        }
                    }
                }
            }
        }
        acc.re * crate::grid::TWO_PI * crate::grid::TWO_PI
    }

    #[test]
    fn onsager_and_mixed_integrands() {
        let g = Grid::new(64).unwrap();
        let bank5 = LPBank::new(5);
        let zero = Field2::zeros(g, 1);
        assert_eq!(onsager_integrand(&bank5, &zero, 0).unwrap(), 0.0);

        // |k| = 7, base 5: only q = 1 nonzero
        let u = Field2::from_fn(g, 1, |x, _| vec![2.0 * (7.0 * x).cos()]);
        let q1 = onsager_integrand(&bank5, &u, 1).unwrap();
        assert!(q1 > 0.0);
        assert!(onsager_integrand(&bank5, &u, 0).unwrap() < 1e-20);

        // v = rho: mixed = onsager of the scalar
        let bank = LPBank::new(2);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let v = Field2::random_band_limited(g, 1, 9, &mut rng);
        for q in 0..=3 {
            let a = mixed_integrand(&bank, &v, &v, q).unwrap();
            let b = onsager_integrand(&bank, &v, q).unwrap();
            assert!((a - b).abs() <= 1e-12 * (1.0 + b));
        }
    }

    #[test]
    fn commutator_identity_residual() {
        let g = Grid::new(64).unwrap();
        let bank = LPBank::new(2);
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let v = Field2::random_band_limited(g, 2, 10, &mut rng);
        let rho = Field2::random_band_limited(g, 1, 10, &mut rng);
        let (_, resid) = commutator_r(&bank, &v, &rho, 3).unwrap();
        let bound =
            tol::COMMUTATOR_IDENTITY * v.l2_norm() * lp_norm(&rho, f64::INFINITY).max(1.0);
        assert!(resid <= bound, "residual {resid} vs {bound}");
    }

    #[test]
    fn commutator_trivial_cases() {
        let g = Grid::new(64).unwrap();
        let bank = LPBank::new(2);
        // constant rho: r_q = S_q(v c) - S_q(v) c - v c + v c = 0
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let v = Field2::random_band_limited(g, 2, 8, &mut rng);
        let rho = Field2::constant(g, 1.5);
        let (r, resid) = commutator_r(&bank, &v, &rho, 2).unwrap();
        assert!(r.l2_norm() < 1e-11 * v.l2_norm());
        assert!(resid < 1e-11 * v.l2_norm());

        // both factors supported below the shell: high-frequency parts vanish
        let v_lo = Field2::random_band_limited(g, 2, 2, &mut rng);
        let rho_lo = Field2::random_band_limited(g, 1, 2, &mut rng);
        let q = 3; // S_3 plateau covers |k| <= 12 on base 2
        let (_, resid) = commutator_r(&bank, &v_lo, &rho_lo, q).unwrap();
        let bound =
            tol::COMMUTATOR_IDENTITY * v_lo.l2_norm() * lp_norm(&rho_lo, f64::INFINITY).max(1.0);
        assert!(resid <= bound);
    }

    #[test]
    fn shell_beyond_coverage_errors() {
        let g = Grid::new(32).unwrap();
        let bank = LPBank::new(2);
        let u = Field2::zeros(g, 1);
        let too_big = bank.q_max(g) + 1;
        assert!(matches!(
            bank.shell_project(&u, too_big),
            Err(Error::ShellBeyondNyquist { .. })
        ));
    }

    #[test]
    fn synthetic_flat_spectrum_has_unit_besov_norm() {
        // spectrum with lambda_q^{1/3} ||Delta_q||_3 = 1 for q = 0..10
        let mut values = vec![0.0]; // q = -1
        values.extend(std::iter::repeat(1.0).take(11));
        let spec = ShellSpectrum { base: 5, s: 1.0 / 3.0, p: 3.0, values };
        assert_eq!(besov_from_spectrum(&spec, f64::INFINITY), 1.0);
        // weighted by a_n = (n+1)^{-2}: sum_{q=0..10} a_{q+2}
        let w = WeightSequence::InverseSquare;
        let got = weighted_besov_from_spectrum(&spec, &w, true).unwrap();
        let expect: f64 = (0..=10).map(|q| w.a(q + 2)).sum();
        assert!((got - expect).abs() < 1e-14);
        assert!(got <= w.sum_upper_bound());
    }

    #[test]
    fn zero_field_norms_vanish() {
        let g = Grid::new(32).unwrap();
        let bank = LPBank::new(2);
        let u = Field2::zeros(g, 1);
        let spec = bank.shell_spectrum(&u, 1.0 / 3.0, 3.0).unwrap();
        assert!(spec.values.iter().all(|v| *v == 0.0));
        assert_eq!(besov_from_spectrum(&spec, f64::INFINITY), 0.0);
        assert_eq!(besov_from_spectrum(&spec, 3.0), 0.0);
    }
}
