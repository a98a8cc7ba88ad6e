//! Mixed discrete/continuous transition laws.

use crate::quad;

/// A law with one atom and a density for the rest of its mass.
pub trait TransitionDensity {
    fn atom_location(&self) -> f64;
    fn atom_prob(&self) -> f64;
    /// Density of the continuous part (sub-probability, integrates to
    /// `1 - atom_prob - tail_mass`).
    fn density(&self, x: f64) -> f64;
    /// Mass dropped by truncating the series representation of the density.
    fn tail_mass(&self) -> f64;
    /// Length scale of the continuous part, used to size quadrature panels.
    fn scale(&self) -> f64;
    /// Support of the continuous part; either end may be infinite.
    fn support(&self) -> (f64, f64);

    /// Mass of the continuous part on `[lo, hi]`. The interval is split at
    /// the atom location, where the density may jump.
    fn continuous_mass(&self, lo: f64, hi: f64, tol: f64) -> f64 {
        let (s_lo, s_hi) = self.support();
        let lo = lo.max(s_lo);
        let hi = hi.min(s_hi);
        if !(lo < hi) {
            return 0.0;
        }
        let c = self.atom_location();
        if lo < c && c < hi {
            return self.continuous_mass(lo, c, tol / 2.0) + self.continuous_mass(c, hi, tol / 2.0);
        }
        let f = |x: f64| self.density(x);
        let scale = self.scale();
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => quad::integrate(f, lo, hi, tol),
            (true, false) => quad::integrate_to_inf(f, lo, scale, tol),
            (false, true) => quad::integrate_from_neg_inf(f, hi, scale, tol),
            (false, false) => {
                quad::integrate_from_neg_inf(f, c, scale, tol / 2.0)
                    + quad::integrate_to_inf(f, c, scale, tol / 2.0)
            }
        }
    }

    /// Atom plus the integrated continuous part over the whole line.
    fn total_mass(&self, tol: f64) -> f64 {
        self.atom_prob() + self.continuous_mass(f64::NEG_INFINITY, f64::INFINITY, tol)
    }
}

/// `law` with its atom moved to `location`; everything else is delegated.
/// Used to place the atom where a multi-step sampler puts it.
#[derive(Debug, Clone, Copy)]
pub struct AtomAt<L> {
    pub law: L,
    pub location: f64,
}

impl<L: TransitionDensity> TransitionDensity for AtomAt<L> {
    fn atom_location(&self) -> f64 {
        self.location
    }
    fn atom_prob(&self) -> f64 {
        self.law.atom_prob()
    }
    fn density(&self, x: f64) -> f64 {
        self.law.density(x)
    }
    fn tail_mass(&self) -> f64 {
        self.law.tail_mass()
    }
    fn scale(&self) -> f64 {
        self.law.scale()
    }
    fn support(&self) -> (f64, f64) {
        self.law.support()
    }
}

impl<L: TransitionDensity + ?Sized> TransitionDensity for Box<L> {
    fn atom_location(&self) -> f64 {
        (**self).atom_location()
    }
    fn atom_prob(&self) -> f64 {
        (**self).atom_prob()
    }
    fn density(&self, x: f64) -> f64 {
        (**self).density(x)
    }
    fn tail_mass(&self) -> f64 {
        (**self).tail_mass()
    }
    fn scale(&self) -> f64 {
        (**self).scale()
    }
    fn support(&self) -> (f64, f64) {
        (**self).support()
    }
}
