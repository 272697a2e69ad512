//! Fields on the periodic box, stored as dense Fourier coefficients.
//!
//! A [`Field2`] is a scalar (1 component) or vector (2+ components) field on
//! a 2-D grid. Fields are immutable values: every operation returns a new
//! field, so they are safe to share across worker threads.
//!
//! Physical fields are real-valued; their coefficient arrays carry Hermitian
//! symmetry `coeff(-k) = conj(coeff(k))`, which every operation here
//! preserves (all multipliers are real and even in `k`, and products are
//! formed in physical space).

use crate::error::{Error, Result};
use crate::fft::{fft2_forward, fft2_inverse};
use crate::grid::{Grid, TWO_PI};
use num_complex::Complex64;
use rand::Rng;

#[derive(Debug, Clone)]
pub struct Field2 {
    grid: Grid,
    /// Spectral coefficients per component, row-major `[ky * n + kx]`.
    comps: Vec<Vec<Complex64>>,
}

impl Field2 {
    pub fn zeros(grid: Grid, ncomp: usize) -> Field2 {
        Field2 { grid, comps: vec![vec![Complex64::default(); grid.len()]; ncomp] }
    }

    pub fn constant(grid: Grid, value: f64) -> Field2 {
        let mut f = Field2::zeros(grid, 1);
        f.comps[0][0] = Complex64::new(value, 0.0);
        f
    }

    /// Builds a real scalar field from modes `(kx, ky, amplitude)`; the
    /// Hermitian partner of every mode is added automatically, so the
    /// physical field is `sum_k 2 Re(a_k e^{i k.x})`.
    pub fn from_modes(grid: Grid, modes: &[(i64, i64, Complex64)]) -> Result<Field2> {
        let mut f = Field2::zeros(grid, 1);
        for &(kx, ky, a) in modes {
            let i = grid
                .bin(kx)
                .zip(grid.bin(ky))
                .map(|(bx, by)| by * grid.n() + bx)
                .ok_or(Error::Unresolvable {
                    freq: (kx.abs().max(ky.abs())) as f64,
                    n: grid.n(),
                    cutoff: grid.dealias_cutoff(),
                })?;
            f.comps[0][i] += a;
            if kx != 0 || ky != 0 {
                let j = grid.bin(-kx).zip(grid.bin(-ky)).map(|(bx, by)| by * grid.n() + bx);
                if let Some(j) = j {
                    f.comps[0][j] += a.conj();
                }
            }
        }
        Ok(f)
    }

    pub fn from_physical(grid: Grid, samples: Vec<Vec<f64>>) -> Result<Field2> {
        for s in &samples {
            if s.len() != grid.len() {
                return Err(Error::GridMismatch(format!(
                    "lattice has {} samples, grid wants {}",
                    s.len(),
                    grid.len()
                )));
            }
        }
        let comps = samples
            .into_iter()
            .map(|s| {
                let mut c: Vec<Complex64> =
                    s.iter().map(|&x| Complex64::new(x, 0.0)).collect();
                fft2_forward(&mut c, grid.n());
                c
            })
            .collect();
        Ok(Field2 { grid, comps })
    }

    pub fn from_spectral(grid: Grid, comps: Vec<Vec<Complex64>>) -> Result<Field2> {
        for c in &comps {
            if c.len() != grid.len() {
                return Err(Error::GridMismatch("spectral array length".into()));
            }
        }
        Ok(Field2 { grid, comps })
    }

    /// Samples a smooth function on the lattice and transforms it.
    pub fn from_fn(grid: Grid, ncomp: usize, f: impl Fn(f64, f64) -> Vec<f64>) -> Field2 {
        let n = grid.n();
        let mut phys = vec![vec![0.0; grid.len()]; ncomp];
        for iy in 0..n {
            let y = grid.coord(iy);
            for ix in 0..n {
                let x = grid.coord(ix);
                let vals = f(x, y);
                for (c, v) in vals.iter().enumerate() {
                    phys[c][iy * n + ix] = *v;
                }
            }
        }
        Field2::from_physical(grid, phys).expect("lattice built from grid")
    }

    #[inline]
    pub fn grid(&self) -> Grid {
        self.grid
    }

    #[inline]
    pub fn ncomp(&self) -> usize {
        self.comps.len()
    }

    #[inline]
    pub fn coeffs(&self, c: usize) -> &[Complex64] {
        &self.comps[c]
    }

    pub fn coeffs_mut(&mut self, c: usize) -> &mut [Complex64] {
        &mut self.comps[c]
    }

    pub fn coeff(&self, c: usize, kx: i64, ky: i64) -> Complex64 {
        match (self.grid.bin(kx), self.grid.bin(ky)) {
            (Some(bx), Some(by)) => self.comps[c][by * self.grid.n() + bx],
            _ => Complex64::default(),
        }
    }

    pub fn to_physical(&self, c: usize) -> Vec<f64> {
        let mut data = self.comps[c].clone();
        fft2_inverse(&mut data, self.grid.n());
        data.into_iter().map(|z| z.re).collect()
    }

    pub fn to_physical_complex(&self, c: usize) -> Vec<Complex64> {
        let mut data = self.comps[c].clone();
        fft2_inverse(&mut data, self.grid.n());
        data
    }

    pub fn mean(&self, c: usize) -> Complex64 {
        self.comps[c][0]
    }

    pub fn is_mean_zero(&self, tol: f64) -> bool {
        self.comps.iter().all(|c| c[0].norm() <= tol)
    }

    /// Max deviation from Hermitian symmetry over all components.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.n();
        let mut worst = 0.0f64;
        for c in &self.comps {
            for ky in 0..n {
                for kx in 0..n {
                    let kxm = (n - kx) % n;
                    let kym = (n - ky) % n;
                    let d = (c[ky * n + kx] - c[kym * n + kxm].conj()).norm();
                    worst = worst.max(d);
                }
            }
        }
        worst
    }

    pub fn map_coeffs(&self, f: impl Fn(i64, i64, Complex64) -> Complex64) -> Field2 {
        let n = self.grid.n();
        let comps = self
            .comps
            .iter()
            .map(|c| {
                let mut out = vec![Complex64::default(); c.len()];
                for by in 0..n {
                    let ky = self.grid.freq(by);
                    for bx in 0..n {
                        let kx = self.grid.freq(bx);
                        out[by * n + bx] = f(kx, ky, c[by * n + bx]);
                    }
                }
                out
            })
            .collect();
        Field2 { grid: self.grid, comps }
    }

    /// Multiplies every coefficient by a real radial/even symbol.
    pub fn multiply_symbol(&self, sym: impl Fn(i64, i64) -> f64) -> Field2 {
        self.map_coeffs(|kx, ky, a| a * sym(kx, ky))
    }

    /// Two-thirds dealiasing: zero every coefficient with `|k_i| > n/3`.
    pub fn dealias(&self) -> Field2 {
        let cut = self.grid.dealias_cutoff() as i64;
        self.multiply_symbol(|kx, ky| if kx.abs() > cut || ky.abs() > cut { 0.0 } else { 1.0 })
    }

    pub fn scale(&self, c: f64) -> Field2 {
        self.map_coeffs(|_, _, a| a * c)
    }

    pub fn add(&self, other: &Field2) -> Result<Field2> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field2) -> Result<Field2> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &Field2,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Field2> {
        self.check_compatible(other)?;
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| f(*x, *y)).collect())
            .collect();
        Ok(Field2 { grid: self.grid, comps })
    }

    pub fn check_compatible(&self, other: &Field2) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!(
                "n = {} vs n = {}",
                self.grid.n(),
                other.grid.n()
            )));
        }
        if self.ncomp() != other.ncomp() {
            return Err(Error::GridMismatch(format!(
                "{} vs {} components",
                self.ncomp(),
                other.ncomp()
            )));
        }
        Ok(())
    }

    pub fn component(&self, c: usize) -> Field2 {
        Field2 { grid: self.grid, comps: vec![self.comps[c].clone()] }
    }

    pub fn from_components(parts: &[&Field2]) -> Result<Field2> {
        let grid = parts[0].grid;
        let mut comps = Vec::new();
        for p in parts {
            if p.grid != grid {
                return Err(Error::GridMismatch("component grids differ".into()));
            }
            for c in &p.comps {
                comps.push(c.clone());
            }
        }
        Ok(Field2 { grid, comps })
    }

    // ---- differential operators (exact spectral symbols) ----

    /// Gradient of a scalar: returns a 2-component field `(d/dx, d/dy)`.
    pub fn gradient(&self) -> Result<Field2> {
        if self.ncomp() != 1 {
            return Err(Error::BadOperator { op: "gradient", components: self.ncomp() });
        }
        let gx = self.map_coeffs(|kx, _, a| Complex64::new(0.0, kx as f64) * a);
        let gy = self.map_coeffs(|_, ky, a| Complex64::new(0.0, ky as f64) * a);
        Field2::from_components(&[&gx.component(0), &gy.component(0)])
    }

    /// Divergence of a 2-component vector field.
    pub fn divergence(&self) -> Result<Field2> {
        if self.ncomp() != 2 {
            return Err(Error::BadOperator { op: "divergence", components: self.ncomp() });
        }
        let n = self.grid.n();
        let mut out = vec![Complex64::default(); self.grid.len()];
        for by in 0..n {
            let ky = self.grid.freq(by) as f64;
            for bx in 0..n {
                let kx = self.grid.freq(bx) as f64;
                let i = by * n + bx;
                out[i] = Complex64::new(0.0, kx) * self.comps[0][i]
                    + Complex64::new(0.0, ky) * self.comps[1][i];
            }
        }
        Ok(Field2 { grid: self.grid, comps: vec![out] })
    }

    /// Componentwise Laplacian.
    pub fn laplacian(&self) -> Field2 {
        self.map_coeffs(|kx, ky, a| a * (-((kx * kx + ky * ky) as f64)))
    }

    // ---- inner products and simple norms ----

    /// L2 inner product via Plancherel: `(2 pi)^2 sum_k Re(u_k conj(v_k))`,
    /// summed over components.
    pub fn inner_product(&self, other: &Field2) -> Result<f64> {
        self.check_compatible(other)?;
        let mut acc = 0.0;
        for (a, b) in self.comps.iter().zip(&other.comps) {
            for (x, y) in a.iter().zip(b) {
                acc += x.re * y.re + x.im * y.im;
            }
        }
        Ok(acc * TWO_PI * TWO_PI)
    }

    /// Same inner product evaluated by physical-space quadrature (dual path).
    pub fn inner_product_quadrature(&self, other: &Field2) -> Result<f64> {
        self.check_compatible(other)?;
        let w = self.grid.dx() * self.grid.dx();
        let mut acc = 0.0;
        for c in 0..self.ncomp() {
            let a = self.to_physical(c);
            let b = other.to_physical(c);
            acc += a.iter().zip(&b).map(|(x, y)| x * y).sum::<f64>();
        }
        Ok(acc * w)
    }

    pub fn l2_norm(&self) -> f64 {
        let mut acc = 0.0;
        for c in &self.comps {
            for z in c {
                acc += z.norm_sqr();
            }
        }
        (acc * TWO_PI * TWO_PI).sqrt()
    }

    pub fn energy(&self) -> f64 {
        let n = self.l2_norm();
        n * n
    }

    /// Pointwise Euclidean magnitude samples.
    pub fn magnitude_physical(&self) -> Vec<f64> {
        let phys: Vec<Vec<f64>> = (0..self.ncomp()).map(|c| self.to_physical(c)).collect();
        (0..self.grid.len())
            .map(|i| phys.iter().map(|p| p[i] * p[i]).sum::<f64>().sqrt())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.magnitude_physical().into_iter().fold(0.0, f64::max)
    }

    /// Fraction of energy carried by the top octave of the retained band
    /// (`|k|_inf` in `(cutoff/2, cutoff]`); the resolution-loss guard.
    pub fn tail_energy_fraction(&self) -> f64 {
        let cut = self.grid.dealias_cutoff() as i64;
        let half = cut / 2;
        let mut tail = 0.0;
        let mut total = 0.0;
        let n = self.grid.n();
        for c in &self.comps {
            for by in 0..n {
                let ky = self.grid.freq(by).abs();
                for bx in 0..n {
                    let kx = self.grid.freq(bx).abs();
                    let e = c[by * n + bx].norm_sqr();
                    total += e;
                    let m = kx.max(ky);
                    if m > half && m <= cut {
                        tail += e;
                    }
                }
            }
        }
        if total == 0.0 {
            0.0
        } else {
            tail / total
        }
    }

    /// Seeded random real field, band-limited to `|k_i| <= kmax`.
    pub fn random_band_limited(
        grid: Grid,
        ncomp: usize,
        kmax: i64,
        rng: &mut impl Rng,
    ) -> Field2 {
        let mut f = Field2::zeros(grid, ncomp);
        let n = grid.n();
        for c in 0..ncomp {
            for ky in -kmax..=kmax {
                for kx in -kmax..=kmax {
                    if kx < 0 || (kx == 0 && ky < 0) {
                        continue; // half-space; partner added below
                    }
                    let a = Complex64::new(rng.gen_range(-1.0..1.0), {
                        if kx == 0 && ky == 0 {
                            0.0
                        } else {
                            rng.gen_range(-1.0..1.0)
                        }
                    });
                    let (bx, by) = (grid.bin(kx).unwrap(), grid.bin(ky).unwrap());
                    f.comps[c][by * n + bx] = a;
                    if kx != 0 || ky != 0 {
                        let (mx, my) = (grid.bin(-kx).unwrap(), grid.bin(-ky).unwrap());
                        f.comps[c][my * n + mx] = a.conj();
                    }
                }
            }
        }
        f
    }
}

/// Pointwise product of two scalar fields with two-thirds dealiasing applied
/// to both factors and to the result.
pub fn mul_dealiased(a: &Field2, b: &Field2) -> Result<Field2> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch("product factors on different grids".into()));
    }
    if a.ncomp() != 1 || b.ncomp() != 1 {
        return Err(Error::BadOperator { op: "mul", components: a.ncomp().max(b.ncomp()) });
    }
    let pa = a.dealias().to_physical(0);
    let pb = b.dealias().to_physical(0);
    let prod: Vec<f64> = pa.iter().zip(&pb).map(|(x, y)| x * y).collect();
    Ok(Field2::from_physical(a.grid(), vec![prod])?.dealias())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tolerances as tol;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_lattice_transforms_to_mean() {
        let g = Grid::new(16).unwrap();
        let f = Field2::from_physical(g, vec![vec![3.25; g.len()]]).unwrap();
        assert!((f.coeff(0, 0, 0).re - 3.25).abs() < 1e-14);
        let others: f64 = f.coeffs(0)[1..].iter().map(|z| z.norm()).sum();
        assert!(others < 1e-12);
    }

    #[test]
    fn sine_mode_lands_on_pm3() {
        // sin(3 x) = (e^{i3x} - e^{-i3x}) / (2i): coeff(3,0) = -i/2.
        let g = Grid::new(64).unwrap();
        let f = Field2::from_fn(g, 1, |x, _| vec![(3.0 * x).sin()]);
        let c = f.coeff(0, 3, 0);
        assert!((c - Complex64::new(0.0, -0.5)).norm() < 1e-13);
        assert!((f.coeff(0, -3, 0) - Complex64::new(0.0, 0.5)).norm() < 1e-13);
        let residual: f64 = f
            .coeffs(0)
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            - 0.5;
        assert!(residual.abs() < 1e-13);
    }

    #[test]
    fn random_roundtrip_and_parseval() {
        let g = Grid::new(32).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let phys: Vec<f64> = (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f = Field2::from_physical(g, vec![phys.clone()]).unwrap();
        let back = f.to_physical(0);
        let scale = phys.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let err = phys
            .iter()
            .zip(&back)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(err / scale < tol::FFT_ROUNDTRIP);

        // Parseval: quadrature energy vs spectral energy.
        let quad = f.inner_product_quadrature(&f).unwrap();
        let spec = f.inner_product(&f).unwrap();
        assert!((quad - spec).abs() / spec <= tol::DUAL_PATH);
    }

    #[test]
    fn laplacian_of_single_mode() {
        let g = Grid::new(64).unwrap();
        let f = Field2::from_fn(g, 1, |x, _| vec![(3.0 * x).sin()]);
        let lap = f.laplacian();
        let expect = f.scale(-9.0);
        let d = lap.sub(&expect).unwrap().l2_norm();
        assert!(d < 1e-12 * f.l2_norm().max(1.0));
    }

    #[test]
    fn shear_is_divergence_free() {
        let g = Grid::new(64).unwrap();
        let vx = Field2::from_fn(g, 1, |_, y| vec![y.sin()]);
        let vy = Field2::zeros(g, 1);
        let v = Field2::from_components(&[&vx, &vy]).unwrap();
        assert!(v.divergence().unwrap().l2_norm() < 1e-13);
    }

    #[test]
    fn divergence_rejects_scalar() {
        let g = Grid::new(16).unwrap();
        let f = Field2::zeros(g, 1);
        assert!(matches!(f.divergence(), Err(Error::BadOperator { .. })));
    }

    #[test]
    fn gradient_matches_centered_differences() {
        // checkerboard-style test field on a fine grid vs a second-order
        // finite-difference oracle; discrepancy is the FD truncation error,
        // ~ (k dx)^2 / 6 per mode.
        let g = Grid::new(256).unwrap();
        let f = Field2::from_fn(g, 1, |x, y| {
            vec![x.sin() * y.sin() + 0.3 * (2.0 * x + 3.0 * y).cos()]
        });
        let grad = f.component(0).gradient().unwrap();
        let gx = grad.to_physical(0);
        let phys = f.to_physical(0);
        let n = g.n();
        let inv2dx = 1.0 / (2.0 * g.dx());
        let mut num = 0.0;
        let mut den = 0.0;
        for iy in 0..n {
            for ix in 0..n {
                let xp = phys[iy * n + (ix + 1) % n];
                let xm = phys[iy * n + (ix + n - 1) % n];
                let fd = (xp - xm) * inv2dx;
                let d = gx[iy * n + ix] - fd;
                num += d * d;
                den += gx[iy * n + ix] * gx[iy * n + ix];
            }
        }
        assert!((num / den).sqrt() <= 1e-3, "relative L2 discrepancy {}", (num / den).sqrt());
    }

    #[test]
    fn dealias_is_idempotent_and_kills_high_modes() {
        let g = Grid::new(32).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = Field2::random_band_limited(g, 1, 15, &mut rng);
        let once = f.dealias();
        let twice = once.dealias();
        assert!(once.sub(&twice).unwrap().l2_norm() == 0.0);

        let hi = Field2::from_modes(g, &[(15, 0, Complex64::new(1.0, 0.0))]).unwrap();
        assert!(hi.dealias().l2_norm() == 0.0);

        let lo = Field2::from_modes(g, &[(5, 3, Complex64::new(1.0, 0.5))]).unwrap();
        assert!(lo.dealias().sub(&lo).unwrap().l2_norm() == 0.0);
    }

    #[test]
    fn inner_product_paths_agree() {
        let g = Grid::new(32).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = Field2::random_band_limited(g, 1, 10, &mut rng);
        let h = Field2::random_band_limited(g, 1, 10, &mut rng);
        let a = f.inner_product(&h).unwrap();
        let b = f.inner_product_quadrature(&h).unwrap();
        assert!((a - b).abs() <= tol::DUAL_PATH * f.l2_norm() * h.l2_norm());

        // orthogonality and definition checks
        let s = Field2::from_fn(g, 1, |x, _| vec![(3.0 * x).sin()]);
        let c = Field2::from_fn(g, 1, |x, _| vec![(3.0 * x).cos()]);
        assert!(s.inner_product(&c).unwrap().abs() < 1e-12);
        let nrm = s.inner_product(&s).unwrap();
        assert!((nrm - s.l2_norm().powi(2)).abs() < 1e-10);
    }

    #[test]
    fn hermitian_symmetry_preserved_by_ops() {
        let g = Grid::new(32).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = Field2::random_band_limited(g, 1, 9, &mut rng);
        assert!(f.hermitian_defect() < 1e-15);
        assert!(f.laplacian().hermitian_defect() < 1e-12);
        assert!(f.dealias().hermitian_defect() < 1e-15);
        assert!(f.gradient().unwrap().hermitian_defect() < 1e-12);
        let p = mul_dealiased(&f, &f).unwrap();
        assert!(p.hermitian_defect() < 1e-12);
    }
}
