use std::fmt;
use std::str::FromStr;

use num_integer::Integer;

use crate::error::{Error, Result};

/// An element of `Q/Z`: a reduced fraction `num/den` with `0 ≤ num < den`.
///
/// Zero is `0/1`. Inside a quasicyclic summand `Z(p^∞)` the denominator is
/// always a power of `p`; the order of the element is its denominator.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fraction {
    num: u64,
    den: u64,
}

impl Fraction {
    pub const ZERO: Fraction = Fraction { num: 0, den: 1 };

    /// `num/den` reduced modulo 1.
    pub fn new(num: i128, den: u64) -> Fraction {
        assert!(den > 0, "zero denominator");
        let r = num.rem_euclid(den as i128) as u64;
        let g = r.gcd(&den);
        Fraction { num: r / g, den: den / g }
    }

    pub fn num(self) -> u64 {
        self.num
    }

    pub fn den(self) -> u64 {
        self.den
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    /// Additive order in `Q/Z`.
    pub fn order(self) -> u64 {
        self.den
    }

    pub fn times(self, k: i64) -> Fraction {
        Fraction::new(self.num as i128 * k as i128, self.den)
    }

    /// Whether the denominator is a power of `p` (including `1`).
    pub fn lies_in(self, p: u64) -> bool {
        crate::perm::is_power_of(self.den, p)
    }
}

impl std::ops::Add for Fraction {
    type Output = Fraction;

    fn add(self, other: Fraction) -> Fraction {
        let den = self.den.lcm(&other.den);
        let num = self.num as i128 * (den / self.den) as i128 + other.num as i128 * (den / other.den) as i128;
        Fraction::new(num, den)
    }
}

impl std::ops::Neg for Fraction {
    type Output = Fraction;

    fn neg(self) -> Fraction {
        Fraction::new(-(self.num as i128), self.den)
    }
}

impl std::ops::Sub for Fraction {
    type Output = Fraction;

    fn sub(self, other: Fraction) -> Fraction {
        self + -other
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num == 0 {
            write!(f, "0")
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Fraction {
    type Err = Error;

    /// Accepts `"a/b"` or an integer (which is `0` modulo 1).
    fn from_str(s: &str) -> Result<Fraction> {
        let bad = || Error::Parse(format!("`{s}` is not a fraction a/b"));
        let s = s.trim();
        match s.split_once('/') {
            Some((a, b)) => {
                let num: i128 = a.trim().parse().map_err(|_| bad())?;
                let den: u64 = b.trim().parse().map_err(|_| bad())?;
                if den == 0 {
                    return Err(bad());
                }
                Ok(Fraction::new(num, den))
            }
            None => {
                s.parse::<i128>().map_err(|_| bad())?;
                Ok(Fraction::ZERO)
            }
        }
    }
}
