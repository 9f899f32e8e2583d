//! The extended nonnegative value domain and the finite-window ratio.

use std::cmp::Ordering;
use std::fmt;

use num::{BigInt, BigRational, FromPrimitive, ToPrimitive, Zero};

/// A nonnegative value or the distinguished value infinity.
///
/// Finite values always carry a float approximation and, when the computation
/// ran exactly, the exact rational. Infinity compares greater than every
/// finite value. There is deliberately no arithmetic on this type: consumers
/// must branch on finiteness explicitly.
#[derive(Debug, Clone)]
pub enum ExtendedValue {
    Finite {
        approx: f64,
        exact: Option<BigRational>,
    },
    Infinity,
}

impl ExtendedValue {
    pub fn exact(value: BigRational) -> Self {
        let approx = rational_to_f64(&value);
        ExtendedValue::Finite {
            approx,
            exact: Some(value),
        }
    }

    pub fn approx(value: f64) -> Self {
        ExtendedValue::Finite {
            approx: value,
            exact: None,
        }
    }

    pub fn zero() -> Self {
        ExtendedValue::exact(BigRational::zero())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedValue::Infinity)
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            ExtendedValue::Finite { approx, .. } => Some(*approx),
            ExtendedValue::Infinity => None,
        }
    }

    pub fn exact_value(&self) -> Option<&BigRational> {
        match self {
            ExtendedValue::Finite { exact, .. } => exact.as_ref(),
            ExtendedValue::Infinity => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ExtendedValue::Finite { approx, exact } => match exact {
                Some(r) => r.is_zero(),
                None => *approx == 0.0,
            },
            ExtendedValue::Infinity => false,
        }
    }
}

impl PartialEq for ExtendedValue {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for ExtendedValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        use ExtendedValue::*;
        match (self, other) {
            (Infinity, Infinity) => Some(Ordering::Equal),
            (Infinity, Finite { .. }) => Some(Ordering::Greater),
            (Finite { .. }, Infinity) => Some(Ordering::Less),
            (
                Finite {
                    exact: Some(a),
                    ..
                },
                Finite {
                    exact: Some(b),
                    ..
                },
            ) => a.partial_cmp(b),
            (Finite { approx: a, .. }, Finite { approx: b, .. }) => a.partial_cmp(b),
        }
    }
}

impl fmt::Display for ExtendedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedValue::Finite {
                approx,
                exact: Some(r),
            } => write!(f, "{approx} ({r})"),
            ExtendedValue::Finite {
                approx,
                exact: None,
            } => write!(f, "{approx}"),
            ExtendedValue::Infinity => write!(f, "infinity"),
        }
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // fall back through a scaled division for extreme magnitudes
        let scale = BigInt::from_f64(1e18).unwrap();
        let scaled = (r.numer() * &scale) / r.denom();
        scaled.to_f64().unwrap_or(f64::NAN) / 1e18
    })
}

/// The finite-window ratio: sum of the first costs over indices `m..=l`
/// divided by one plus the sum of the second costs over the same window.
///
/// This is the inner fraction of the long-run ratio objective; the simulator
/// and the finite-horizon property tests evaluate it directly.
pub fn finite_ratio(costs1: &[u64], costs2: &[u64], m: usize, l: usize) -> BigRational {
    assert!(m <= l && l < costs1.len() && l < costs2.len());
    let num: u64 = costs1[m..=l].iter().sum();
    let den: u64 = 1 + costs2[m..=l].iter().sum::<u64>();
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
