use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{squarefree_split, QuadError, QuadSurd};

/// A purely periodic continued fraction `[0; a₁, …, a_m, a₁, …]`, written by
/// its period.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct PeriodicCF {
    period: Vec<u64>,
}

impl PeriodicCF {
    pub fn new(period: Vec<u64>) -> Result<Self, QuadError> {
        if period.is_empty() {
            return Err(QuadError::EmptyPeriod);
        }
        if period.contains(&0) {
            return Err(QuadError::NonPositiveDigit);
        }
        Ok(PeriodicCF { period })
    }

    pub fn period(&self) -> &[u64] {
        &self.period
    }

    /// Period length `m`.
    pub fn len(&self) -> usize {
        self.period.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Comma-separated period, the form accepted by `FromStr`.
    pub fn word(&self) -> String {
        self.period
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Exact value: the root in (0, 1) of `x = 1/(a₁ + 1/(… + 1/(a_m + x)))`.
    pub fn value(&self) -> QuadSurd {
        // Compose the Möbius maps t ↦ 1/(a + t), each [[0, 1], [1, a]].
        let (mut a, mut b, mut c, mut d) = (
            BigInt::one(),
            BigInt::zero(),
            BigInt::zero(),
            BigInt::one(),
        );
        for &digit in &self.period {
            let digit = BigInt::from(digit);
            let (na, nb) = (b.clone(), &a + &b * &digit);
            let (nc, nd) = (d.clone(), &c + &d * &digit);
            a = na;
            b = nb;
            c = nc;
            d = nd;
        }
        // x = (a x + b)/(c x + d)  ⇒  c x² + (d − a) x − b = 0, c > 0, b > 0
        let disc = (&d - &a) * (&d - &a) + BigInt::from(4) * &b * &c;
        let disc = disc.to_u64().expect("discriminant fits in u64");
        let (f, kernel) = squarefree_split(disc);
        QuadSurd::new(&a - &d, BigInt::from(f), BigInt::from(2) * c, kernel)
            .expect("discriminant of a periodic continued fraction is not a square")
    }
}

impl fmt::Display for PeriodicCF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.word())
    }
}

impl FromStr for PeriodicCF {
    type Err = QuadError;

    fn from_str(s: &str) -> Result<Self, QuadError> {
        let t = s.trim().trim_start_matches('[').trim_end_matches(']');
        let digits = t
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<u64>()
                    .map_err(|_| QuadError::Parse(s.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        PeriodicCF::new(digits)
    }
}

impl TryFrom<Vec<u64>> for PeriodicCF {
    type Error = QuadError;
    fn try_from(v: Vec<u64>) -> Result<Self, QuadError> {
        PeriodicCF::new(v)
    }
}

impl From<PeriodicCF> for Vec<u64> {
    fn from(cf: PeriodicCF) -> Vec<u64> {
        cf.period
    }
}

/// Where the expansion starts repeating. `start` is the 1-based index of the
/// first partial quotient of the period.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Period {
    pub start: usize,
    pub length: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CfExpansion {
    /// Partial quotients `a₁, a₂, …` (with `a₀ = 0` implied).
    pub digits: Vec<u64>,
    /// `None` when no complete quotient repeated within the term budget.
    pub period: Option<Period>,
}

impl CfExpansion {
    /// The periodic word, when the expansion is purely periodic.
    pub fn purely_periodic(&self) -> Option<PeriodicCF> {
        match self.period {
            Some(Period { start: 1, length }) => {
                PeriodicCF::new(self.digits[..length].to_vec()).ok()
            }
            _ => None,
        }
    }
}

/// Continued-fraction expansion of an irrational `x ∈ (0, 1)`.
///
/// The period is found by exact equality of complete quotients
/// `α₁ = 1/x`, `α_{n+1} = 1/(α_n − a_n)`.
pub fn expand(x: &QuadSurd, max_terms: usize) -> Result<CfExpansion, QuadError> {
    if x.is_rational() {
        return Err(QuadError::Rational);
    }
    let zero = QuadSurd::from_integer(0, x.d())?;
    let one = QuadSurd::from_integer(1, x.d())?;
    if x.compare(&zero)?.is_le() || x.compare(&one)?.is_ge() {
        return Err(QuadError::OutOfUnitInterval(x.to_string()));
    }
    let mut seen: HashMap<QuadSurd, usize> = HashMap::new();
    let mut digits = Vec::new();
    let mut alpha = x.checked_recip()?;
    for n in 1..=max_terms + 1 {
        if let Some(&start) = seen.get(&alpha) {
            return Ok(CfExpansion {
                digits,
                period: Some(Period {
                    start,
                    length: n - start,
                }),
            });
        }
        if n > max_terms {
            break;
        }
        let a = alpha.floor();
        let a_u64 = a.to_u64().ok_or(QuadError::DigitOverflow)?;
        digits.push(a_u64);
        let frac = alpha.checked_sub(&QuadSurd::from_integer(a, x.d())?)?;
        seen.insert(alpha, n);
        alpha = frac.checked_recip()?;
    }
    Ok(CfExpansion {
        digits,
        period: None,
    })
}

/// Nearest integer to `x`, decided exactly.
pub fn rint(x: &QuadSurd) -> Result<BigInt, QuadError> {
    x.rint()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cf(s: &str) -> PeriodicCF {
        s.parse().unwrap()
    }

    #[test]
    fn values_of_small_words() {
        assert_eq!(cf("1").value(), QuadSurd::new(-1, 1, 2, 5).unwrap());
        assert_eq!(cf("1,2").value(), QuadSurd::new(-1, 1, 1, 3).unwrap());
        assert_eq!(cf("2").value(), QuadSurd::new(-1, 1, 1, 2).unwrap());
    }

    #[test]
    fn expansions_of_small_surds() {
        let golden = expand(&QuadSurd::new(-1, 1, 2, 5).unwrap(), 50).unwrap();
        assert_eq!(golden.digits, vec![1]);
        assert_eq!(golden.period, Some(Period { start: 1, length: 1 }));

        let e = expand(&QuadSurd::new(-1, 1, 1, 3).unwrap(), 50).unwrap();
        assert_eq!(e.digits, vec![1, 2]);
        assert_eq!(e.period, Some(Period { start: 1, length: 2 }));

        let e = expand(&QuadSurd::new(-1, 1, 1, 2).unwrap(), 50).unwrap();
        assert_eq!(e.digits, vec![2]);
        assert_eq!(e.period, Some(Period { start: 1, length: 1 }));
    }

    #[test]
    fn eventually_periodic_expansion() {
        // √2/2 = [0; 1, 2, 2, 2, …]
        let x = QuadSurd::new(0, 1, 2, 2).unwrap();
        let e = expand(&x, 50).unwrap();
        assert_eq!(e.digits, vec![1, 2]);
        assert_eq!(e.period, Some(Period { start: 2, length: 1 }));
        assert!(e.purely_periodic().is_none());
    }

    #[test]
    fn undetected_period_is_explicit() {
        // √97 − 9 has a period of length 11
        let x = QuadSurd::new(-9, 1, 1, 97).unwrap();
        let short = expand(&x, 5).unwrap();
        assert_eq!(short.period, None);
        assert_eq!(short.digits.len(), 5);
        let full = expand(&x, 40).unwrap();
        assert_eq!(full.period, Some(Period { start: 1, length: 11 }));
    }

    #[test]
    fn expand_rejects_bad_input() {
        assert_eq!(
            expand(&QuadSurd::from_ratio(1, 3, 5).unwrap(), 10),
            Err(QuadError::Rational)
        );
        assert!(expand(&QuadSurd::new(1, 1, 2, 5).unwrap(), 10).is_err());
    }

    #[test]
    fn word_parsing() {
        assert_eq!(cf("[1, 12]").period(), &[1, 12]);
        assert_eq!("".parse::<PeriodicCF>().unwrap_err(), QuadError::Parse(String::new()));
        assert_eq!("1,0".parse::<PeriodicCF>(), Err(QuadError::NonPositiveDigit));
        assert_eq!(cf("1,12").to_string(), "[1,12]");
    }
}
