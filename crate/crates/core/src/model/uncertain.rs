use serde::{Deserialize, Serialize};

/// A parameter that is either pinned or drawn uniformly from an interval.
///
/// JSON forms: a bare number (fixed), `{"range": [lb, ub]}`,
/// `{"nominal_pct": [nv, lo_pct, hi_pct]}`, `{"nominal_sym": [nv, dev_pct]}`
/// or `{"fixed": v}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "Repr", into = "Repr")]
pub enum UncertainValue {
    Range { lb: f64, ub: f64 },
    NominalPct { nv: f64, lo_pct: f64, hi_pct: f64 },
    NominalSym { nv: f64, dev_pct: f64 },
    Fixed(f64),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Repr {
    Bare(f64),
    Tagged(Tagged),
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum Tagged {
    Range([f64; 2]),
    NominalPct([f64; 3]),
    NominalSym([f64; 2]),
    Fixed(f64),
}

impl From<Repr> for UncertainValue {
    fn from(r: Repr) -> Self {
        match r {
            Repr::Bare(v) | Repr::Tagged(Tagged::Fixed(v)) => Self::Fixed(v),
            Repr::Tagged(Tagged::Range([lb, ub])) => Self::Range { lb, ub },
            Repr::Tagged(Tagged::NominalPct([nv, lo_pct, hi_pct])) => Self::NominalPct { nv, lo_pct, hi_pct },
            Repr::Tagged(Tagged::NominalSym([nv, dev_pct])) => Self::NominalSym { nv, dev_pct },
        }
    }
}

impl From<UncertainValue> for Repr {
    fn from(v: UncertainValue) -> Self {
        match v {
            UncertainValue::Fixed(v) => Repr::Bare(v),
            UncertainValue::Range { lb, ub } => Repr::Tagged(Tagged::Range([lb, ub])),
            UncertainValue::NominalPct { nv, lo_pct, hi_pct } => Repr::Tagged(Tagged::NominalPct([nv, lo_pct, hi_pct])),
            UncertainValue::NominalSym { nv, dev_pct } => Repr::Tagged(Tagged::NominalSym([nv, dev_pct])),
        }
    }
}

impl UncertainValue {
    /// Interval endpoints `(lb, ub)` as declared, before ordering.
    fn endpoints(&self) -> (f64, f64) {
        match *self {
            Self::Range { lb, ub } => (lb, ub),
            Self::NominalPct { nv, lo_pct, hi_pct } => (nv * lo_pct / 100.0, nv * hi_pct / 100.0),
            Self::NominalSym { nv, dev_pct } => (nv * (1.0 - dev_pct / 100.0), nv * (1.0 + dev_pct / 100.0)),
            Self::Fixed(v) => (v, v),
        }
    }

    /// Smallest and largest value the parameter can take.
    pub fn bounds(&self) -> (f64, f64) {
        let (a, b) = self.endpoints();
        (a.min(b), a.max(b))
    }

    /// Midpoint of the interval, used as the nominal value.
    pub fn mean(&self) -> f64 {
        let (a, b) = self.bounds();
        0.5 * (a + b)
    }

    pub fn is_fixed(&self) -> bool {
        matches!(self, Self::Fixed(_))
    }

    /// Affine map of `u` in `[0, 1]` onto the interval; fixed values ignore `u`.
    pub fn resolve(&self, u: f64) -> f64 {
        let (lo, hi) = self.bounds();
        // The unit interval's ends hit the declared endpoints exactly.
        let (a, b) = self.endpoints();
        if u == 0.0 {
            return a;
        }
        if u == 1.0 {
            return b;
        }
        let v = match *self {
            Self::Fixed(v) => return v,
            Self::Range { lb, ub } => lb + u * (ub - lb),
            Self::NominalPct { nv, lo_pct, hi_pct } => nv * (lo_pct + u * (hi_pct - lo_pct)) / 100.0,
            Self::NominalSym { nv, dev_pct } => nv * (1.0 + (2.0 * u - 1.0) * dev_pct / 100.0),
        };
        v.clamp(lo, hi)
    }

    /// Scales every value of the interval by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        let (lb, ub) = self.bounds();
        match self {
            Self::Fixed(v) => Self::Fixed(v * k),
            _ => Self::Range { lb: lb * k, ub: ub * k },
        }
    }

    /// Violations of the form's own invariants, if any.
    pub fn form_error(&self) -> Option<&'static str> {
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        match *self {
            Self::Range { lb, ub } if !finite(&[lb, ub]) => Some("non-finite bound"),
            Self::Range { lb, ub } if lb > ub => Some("lower bound above upper bound"),
            Self::NominalPct { nv, lo_pct, hi_pct } if !finite(&[nv, lo_pct, hi_pct]) => Some("non-finite bound"),
            Self::NominalPct { lo_pct, hi_pct, .. } if lo_pct > hi_pct => Some("lower percentage above upper"),
            Self::NominalSym { nv, dev_pct } if !finite(&[nv, dev_pct]) => Some("non-finite bound"),
            Self::NominalSym { dev_pct, .. } if dev_pct < 0.0 => Some("negative deviation"),
            Self::Fixed(v) if !v.is_finite() => Some("non-finite value"),
            _ => None,
        }
    }
}
