//! Smooth cutoff profiles and their derivatives.
//!
//! Everything here is built from `psi(s) = exp(-1/s)` for `s > 0` (zero
//! otherwise), which gives plateaus that are exactly flat: the smoothstep
//! `g(s) = psi(s) / (psi(s) + psi(1-s))` is 0 for `s <= 0`, 1 for `s >= 1`,
//! and all derivatives vanish at both ends.

/// Value and first three derivatives of a scalar function at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet3 {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

impl Jet3 {
    pub const ZERO: Jet3 = Jet3 { v: 0.0, d1: 0.0, d2: 0.0, d3: 0.0 };
    pub const ONE: Jet3 = Jet3 { v: 1.0, d1: 0.0, d2: 0.0, d3: 0.0 };

    pub fn constant(v: f64) -> Jet3 {
        Jet3 { v, d1: 0.0, d2: 0.0, d3: 0.0 }
    }

    pub fn add(self, o: Jet3) -> Jet3 {
        Jet3 { v: self.v + o.v, d1: self.d1 + o.d1, d2: self.d2 + o.d2, d3: self.d3 + o.d3 }
    }

    pub fn scale(self, c: f64) -> Jet3 {
        Jet3 { v: c * self.v, d1: c * self.d1, d2: c * self.d2, d3: c * self.d3 }
    }

    pub fn mul(self, o: Jet3) -> Jet3 {
        Jet3 {
            v: self.v * o.v,
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
            d3: self.d3 * o.v + 3.0 * self.d2 * o.d1 + 3.0 * self.d1 * o.d2 + self.v * o.d3,
        }
    }

    /// Reciprocal jet; caller guarantees `self.v != 0`.
    pub fn recip(self) -> Jet3 {
        let b = self.v;
        let b1 = self.d1;
        let b2 = self.d2;
        let b3 = self.d3;
        let ib = 1.0 / b;
        let ib2 = ib * ib;
        Jet3 {
            v: ib,
            d1: -b1 * ib2,
            d2: (2.0 * b1 * b1 - b * b2) * ib2 * ib,
            d3: (6.0 * b * b1 * b2 - b * b * b3 - 6.0 * b1 * b1 * b1) * ib2 * ib2,
        }
    }

    /// Composition with the affine reparametrisation `s = a*t + c`
    /// (`self` is the jet in `s`; result is the jet in `t`).
    pub fn pullback_affine(self, a: f64) -> Jet3 {
        Jet3 { v: self.v, d1: self.d1 * a, d2: self.d2 * a * a, d3: self.d3 * a * a * a }
    }
}

/// `exp(-1/s)` for `s > 0`, else 0, with derivatives.
fn psi_jet(s: f64) -> Jet3 {
    // Below ~0.01 the value is < 1e-43 and the polynomial prefactors cannot
    // bring it back above underflow; returning an exact zero avoids 0 * inf.
    if s < 0.01 {
        return Jet3::ZERO;
    }
    let e = (-1.0 / s).exp();
    let is = 1.0 / s;
    let is2 = is * is;
    let is3 = is2 * is;
    let is4 = is2 * is2;
    let is5 = is4 * is;
    let is6 = is4 * is2;
    Jet3 {
        v: e,
        d1: e * is2,
        d2: e * (is4 - 2.0 * is3),
        d3: e * (is6 - 6.0 * is5 + 6.0 * is4),
    }
}

/// Flat smoothstep `g : [0,1] -> [0,1]` with all derivatives zero at the ends.
pub fn smoothstep_jet(s: f64) -> Jet3 {
    if s <= 0.0 {
        return Jet3::ZERO;
    }
    if s >= 1.0 {
        return Jet3::ONE;
    }
    let f = psi_jet(s);
    let h = psi_jet(1.0 - s);
    // h as a function of s: flip odd derivatives.
    let h = Jet3 { v: h.v, d1: -h.d1, d2: h.d2, d3: -h.d3 };
    let denom = f.add(h);
    f.mul(denom.recip())
}

pub fn smoothstep(s: f64) -> f64 {
    smoothstep_jet(s).v
}

/// Smooth bump on [0,1], zero to all orders at both ends, peak value 1 at 1/2.
pub fn window_jet(s: f64) -> Jet3 {
    if s <= 0.5 {
        smoothstep_jet(2.0 * s).pullback_affine(2.0)
    } else {
        smoothstep_jet(2.0 - 2.0 * s).pullback_affine(-2.0)
    }
}

/// Smooth bump on [0,1] with a flat plateau at 1 over the middle half;
/// zero to all orders at both ends.
pub fn plateau_window_jet(s: f64) -> Jet3 {
    if s <= 0.25 {
        smoothstep_jet(4.0 * s).pullback_affine(4.0)
    } else if s >= 0.75 {
        smoothstep_jet(4.0 - 4.0 * s).pullback_affine(-4.0)
    } else {
        Jet3::ONE
    }
}

pub fn window(s: f64) -> f64 {
    window_jet(s).v
}

/// The radial multiplier profile: 1 for `|xi| <= 3/4`, 0 for `|xi| >= 1`.
pub fn chi(xi: f64) -> f64 {
    smoothstep(4.0 * (1.0 - xi.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd(f: impl Fn(f64) -> f64, s: f64, h: f64) -> f64 {
        (f(s + h) - f(s - h)) / (2.0 * h)
    }

    #[test]
    fn smoothstep_plateaus() {
        assert_eq!(smoothstep(-0.3), 0.0);
        assert_eq!(smoothstep(0.0), 0.0);
        assert_eq!(smoothstep(1.0), 1.0);
        assert_eq!(smoothstep(2.0), 1.0);
        assert!((smoothstep(0.5) - 0.5).abs() < 1e-15); // symmetry
    }

    #[test]
    fn chi_matches_plateau_conditions() {
        assert_eq!(chi(0.0), 1.0);
        assert_eq!(chi(0.75), 1.0);
        assert_eq!(chi(-0.6), 1.0);
        assert_eq!(chi(1.0), 0.0);
        assert_eq!(chi(1.7), 0.0);
        let mid = chi(0.875);
        assert!(mid > 0.0 && mid < 1.0);
    }

    #[test]
    fn jets_match_finite_differences() {
        for &s in &[0.13, 0.31, 0.5, 0.62, 0.9] {
            let j = smoothstep_jet(s);
            let h = 1e-5;
            let d1 = fd(smoothstep, s, h);
            let d2 = fd(|x| smoothstep_jet(x).d1, s, h);
            let d3 = fd(|x| smoothstep_jet(x).d2, s, h);
            assert!((j.d1 - d1).abs() < 1e-7 * (1.0 + d1.abs()), "d1 at {s}: {} vs {}", j.d1, d1);
            assert!((j.d2 - d2).abs() < 1e-6 * (1.0 + d2.abs()), "d2 at {s}: {} vs {}", j.d2, d2);
            assert!((j.d3 - d3).abs() < 2e-4 * (1.0 + d3.abs()), "d3 at {s}: {} vs {}", j.d3, d3);
        }
    }

    #[test]
    fn endpoint_derivatives_vanish() {
        for &s in &[1e-4, 1.0 - 1e-4] {
            let j = smoothstep_jet(s);
            assert!(j.d1.abs() < 1e-10);
            assert!(j.d2.abs() < 1e-8);
        }
    }

    #[test]
    fn window_is_a_smooth_bump() {
        assert_eq!(window(0.0), 0.0);
        assert_eq!(window(1.0), 0.0);
        assert_eq!(window(0.5), 1.0);
        let j = window_jet(0.5);
        assert!(j.d1.abs() < 1e-12);
        // continuity of the jet across the midpoint seam
        let l = window_jet(0.5 - 1e-9);
        let r = window_jet(0.5 + 1e-9);
        assert!((l.v - r.v).abs() < 1e-12);
        assert!((l.d1 - r.d1).abs() < 1e-6);
    }
}
