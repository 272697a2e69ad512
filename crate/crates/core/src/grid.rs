use crate::error::{Error, Result};

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Uniform periodic grid on `[0, 2*pi)^2`.
///
/// `n` points per axis (power of two), integer wavenumbers up to the Nyquist
/// frequency `n/2`. The two-thirds dealias rule keeps `|k_i| <= n/3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    n: usize,
}

impl Grid {
    pub fn new(n: usize) -> Result<Grid> {
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::BadGridSize(n));
        }
        Ok(Grid { n })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn box_length(&self) -> f64 {
        TWO_PI
    }

    pub fn dx(&self) -> f64 {
        TWO_PI / self.n as f64
    }

    pub fn nyquist(&self) -> usize {
        self.n / 2
    }

    /// Largest retained frequency under the two-thirds rule.
    pub fn dealias_cutoff(&self) -> usize {
        self.n / 3
    }

    /// Signed integer frequency for FFT bin `i`.
    #[inline]
    pub fn freq(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i <= n / 2 {
            i
        } else {
            i - n
        }
    }

    /// FFT bin for a signed frequency; `None` if out of range.
    pub fn bin(&self, k: i64) -> Option<usize> {
        let half = (self.n / 2) as i64;
        if k > half || k < -(half as i64 - 1) - 1 {
            return None;
        }
        if k >= 0 {
            Some(k as usize)
        } else {
            Some((k + self.n as i64) as usize)
        }
    }

    /// Physical coordinate of sample `i` along one axis.
    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        TWO_PI * i as f64 / self.n as f64
    }

    /// Checks that an experiment writing up to `freq` stays strictly below
    /// Nyquist, returning `Unresolvable` otherwise.
    pub fn require_resolved(&self, freq: f64) -> Result<()> {
        if freq >= self.nyquist() as f64 {
            return Err(Error::Unresolvable { freq, n: self.n, cutoff: self.dealias_cutoff() });
        }
        Ok(())
    }

    /// Same, but against the dealias band (needed wherever products form).
    pub fn require_dealiased(&self, freq: f64) -> Result<()> {
        if freq > self.dealias_cutoff() as f64 {
            return Err(Error::Unresolvable { freq, n: self.n, cutoff: self.dealias_cutoff() });
        }
        Ok(())
    }
}
