//! Certified interval evaluation of natural logarithms over exact rationals.
//!
//! Log-linear feasibility questions (Lyapunov exponent chains, the two-map
//! log-ratio criterion) cannot be decided in plain f64 near ties. This module
//! provides `ln` as an interval of rationals with a proven width bound, so
//! strict inequalities between log-linear expressions can be certified or
//! reported as genuinely borderline.

use crate::rational::{rat_int, Rat};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone)]
pub struct RatInterval {
    pub lo: Rat,
    pub hi: Rat,
}

impl RatInterval {
    pub fn point(x: Rat) -> Self {
        RatInterval { lo: x.clone(), hi: x }
    }

    pub fn add(&self, other: &RatInterval) -> RatInterval {
        RatInterval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn neg(&self) -> RatInterval {
        RatInterval {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
        }
    }

    pub fn sub(&self, other: &RatInterval) -> RatInterval {
        self.add(&other.neg())
    }

    /// Scale by an exact rational, respecting its sign.
    pub fn scale(&self, c: &Rat) -> RatInterval {
        if c.is_negative() {
            RatInterval {
                lo: &self.hi * c,
                hi: &self.lo * c,
            }
        } else {
            RatInterval {
                lo: &self.lo * c,
                hi: &self.hi * c,
            }
        }
    }

    /// Product of two intervals (all four corner products considered).
    pub fn mul(&self, other: &RatInterval) -> RatInterval {
        let corners = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let mut lo = corners[0].clone();
        let mut hi = corners[0].clone();
        for c in &corners[1..] {
            if *c < lo {
                lo = c.clone();
            }
            if *c > hi {
                hi = c.clone();
            }
        }
        RatInterval { lo, hi }
    }

    /// `Some(true)` when `self < other` is certified, `Some(false)` when
    /// `self >= other` is certified, `None` when the intervals overlap.
    pub fn strictly_less(&self, other: &RatInterval) -> Option<bool> {
        if self.hi < other.lo {
            Some(true)
        } else if other.hi <= self.lo {
            Some(false)
        } else {
            None
        }
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }
}

/// `ln(x)` for `x > 0` as an interval of width at most `2^-prec_bits`.
pub fn ln_interval(x: &Rat, prec_bits: u32) -> RatInterval {
    assert!(x.is_positive(), "ln_interval requires a positive argument");
    // Reduce to m in [3/4, 3/2) with x = m * 2^k.
    let mut m = x.clone();
    let mut k: i64 = 0;
    let three_halves = Rat::new(BigInt::from(3), BigInt::from(2));
    let three_quarters = Rat::new(BigInt::from(3), BigInt::from(4));
    let two = rat_int(2);
    while m >= three_halves {
        m /= &two;
        k += 1;
    }
    while m < three_quarters {
        m *= &two;
        k -= 1;
    }
    // Budget: half the error to the series for m, half to k * ln 2.
    let target = Rat::new(BigInt::one(), BigInt::one() << (prec_bits as usize + 1));
    let ln_m = atanh_series(&m, &target);
    if k == 0 {
        return ln_m;
    }
    let ln2_target = &target / rat_int(k.unsigned_abs().max(1) as i64);
    let ln2 = atanh_series(&two, &ln2_target);
    ln_m.add(&ln2.scale(&rat_int(k)))
}

/// `ln(x)` via `2*atanh((x-1)/(x+1))`, truncated with a certified tail bound.
fn atanh_series(x: &Rat, max_err: &Rat) -> RatInterval {
    let one = Rat::one();
    let z = (x - &one) / (x + &one);
    if z.is_zero() {
        return RatInterval::point(Rat::zero());
    }
    let z2 = &z * &z;
    let mut term = z.clone(); // z^(2j+1)
    let mut sum = Rat::zero();
    let mut j: u32 = 0;
    loop {
        sum += &term / rat_int((2 * j + 1) as i64);
        term *= &z2;
        j += 1;
        // Tail after j terms: 2 * |z|^(2j+1) / ((2j+1)(1-z^2))
        let tail = rat_int(2) * term.abs()
            / (rat_int((2 * j + 1) as i64) * (&one - &z2));
        if tail <= *max_err {
            let value = rat_int(2) * sum;
            return if z.is_positive() {
                RatInterval {
                    lo: value.clone(),
                    hi: value + tail,
                }
            } else {
                RatInterval {
                    lo: &value - &tail,
                    hi: value,
                }
            };
        }
        assert!(j < 10_000, "atanh series failed to converge");
    }
}
