use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::quadfield::{QuadError, QuadSurd};

/// Integer vector `k = (k₁, k₂)`; ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntVec2 {
    pub k1: BigInt,
    pub k2: BigInt,
}

impl IntVec2 {
    pub fn new(k1: impl Into<BigInt>, k2: impl Into<BigInt>) -> Self {
        IntVec2 {
            k1: k1.into(),
            k2: k2.into(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.k1.is_zero() && self.k2.is_zero()
    }

    /// `|k₁| + |k₂|`.
    pub fn norm1(&self) -> BigInt {
        self.k1.abs() + self.k2.abs()
    }

    pub fn norm1_f64(&self) -> f64 {
        self.norm1().to_f64().unwrap_or(f64::INFINITY)
    }

    pub fn norm2_f64(&self) -> f64 {
        let (a, b) = self.to_f64();
        a.hypot(b)
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (
            self.k1.to_f64().unwrap_or(f64::NAN),
            self.k2.to_f64().unwrap_or(f64::NAN),
        )
    }

    pub fn to_i64(&self) -> Option<[i64; 2]> {
        Some([self.k1.to_i64()?, self.k2.to_i64()?])
    }

    /// `⟨k, (1, Ω)⟩ = k₁ + k₂Ω`, exactly.
    pub fn dot_omega(&self, omega: &QuadSurd) -> Result<QuadSurd, QuadError> {
        let k1 = QuadSurd::from_integer(self.k1.clone(), omega.d())?;
        k1.checked_add(&omega.scale(&self.k2))
    }

    /// `k₁l₂ − k₂l₁`; zero exactly for collinear vectors.
    pub fn cross(&self, other: &IntVec2) -> BigInt {
        &self.k1 * &other.k2 - &self.k2 * &other.k1
    }

    pub fn is_collinear(&self, other: &IntVec2) -> bool {
        self.cross(other).is_zero()
    }

    /// Representative of `±k` with `k₂ > 0`, or `k₁ > 0` when `k₂ = 0`.
    pub fn sign_normalized(&self) -> IntVec2 {
        if self.k2.is_negative() || (self.k2.is_zero() && self.k1.is_negative()) {
            -self
        } else {
            self.clone()
        }
    }
}

impl std::ops::Neg for &IntVec2 {
    type Output = IntVec2;
    fn neg(self) -> IntVec2 {
        IntVec2 {
            k1: -self.k1.clone(),
            k2: -self.k2.clone(),
        }
    }
}

impl fmt::Display for IntVec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.k1, self.k2)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Wire {
    Small([i64; 2]),
    Big([String; 2]),
}

impl Serialize for IntVec2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.to_i64() {
            Some(v) => Wire::Small(v),
            None => Wire::Big([self.k1.to_string(), self.k2.to_string()]),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntVec2 {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        match Wire::deserialize(de)? {
            Wire::Small([a, b]) => Ok(IntVec2::new(a, b)),
            Wire::Big([a, b]) => {
                let parse = |x: &str| x.parse::<BigInt>().map_err(serde::de::Error::custom);
                Ok(IntVec2::new(parse(&a)?, parse(&b)?))
            }
        }
    }
}

/// Integer 2×2 matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMat2 {
    pub entries: [[BigInt; 2]; 2],
}

impl IntMat2 {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        IntMat2 {
            entries: [[a.into(), b.into()], [c.into(), d.into()]],
        }
    }

    pub fn identity() -> Self {
        Self::new(1, 0, 0, 1)
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i][j]
    }

    pub fn det(&self) -> BigInt {
        let e = &self.entries;
        &e[0][0] * &e[1][1] - &e[0][1] * &e[1][0]
    }

    pub fn trace(&self) -> BigInt {
        &self.entries[0][0] + &self.entries[1][1]
    }

    pub fn transpose(&self) -> Self {
        let e = &self.entries;
        IntMat2 {
            entries: [
                [e[0][0].clone(), e[1][0].clone()],
                [e[0][1].clone(), e[1][1].clone()],
            ],
        }
    }

    pub fn mul(&self, other: &IntMat2) -> IntMat2 {
        let (a, b) = (&self.entries, &other.entries);
        let cell = |i: usize, j: usize| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
        IntMat2 {
            entries: [[cell(0, 0), cell(0, 1)], [cell(1, 0), cell(1, 1)]],
        }
    }

    pub fn apply(&self, k: &IntVec2) -> IntVec2 {
        let e = &self.entries;
        IntVec2 {
            k1: &e[0][0] * &k.k1 + &e[0][1] * &k.k2,
            k2: &e[1][0] * &k.k1 + &e[1][1] * &k.k2,
        }
    }

    pub fn scale(&self, s: &BigInt) -> IntMat2 {
        let e = &self.entries;
        IntMat2 {
            entries: [
                [&e[0][0] * s, &e[0][1] * s],
                [&e[1][0] * s, &e[1][1] * s],
            ],
        }
    }

    /// Inverse of a unimodular matrix; `None` when `|det| ≠ 1`.
    pub fn inverse_unimodular(&self) -> Option<IntMat2> {
        let det = self.det();
        if det.abs() != BigInt::from(1) {
            return None;
        }
        let e = &self.entries;
        let adj = IntMat2 {
            entries: [
                [e[1][1].clone(), -e[0][1].clone()],
                [-e[1][0].clone(), e[0][0].clone()],
            ],
        };
        Some(adj.scale(&det))
    }
}

impl fmt::Display for IntMat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = &self.entries;
        write!(f, "[[{}, {}], [{}, {}]]", e[0][0], e[0][1], e[1][0], e[1][1])
    }
}

impl Serialize for IntMat2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<IntVec2> = self
            .entries
            .iter()
            .map(|r| IntVec2::new(r[0].clone(), r[1].clone()))
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMat2 {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let rows = <[IntVec2; 2]>::deserialize(de)?;
        let [r0, r1] = rows;
        Ok(IntMat2 {
            entries: [[r0.k1, r0.k2], [r1.k1, r1.k2]],
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unimodular_inverse() {
        let u = IntMat2::new(1, -2, -1, 3);
        let inv = u.inverse_unimodular().unwrap();
        assert_eq!(u.mul(&inv), IntMat2::identity());
        let v = IntMat2::new(0, -1, -1, 1);
        assert_eq!(v.det(), BigInt::from(-1));
        assert_eq!(v.inverse_unimodular().unwrap().mul(&v), IntMat2::identity());
        assert!(IntMat2::new(2, 0, 0, 1).inverse_unimodular().is_none());
    }

    #[test]
    fn vector_helpers() {
        let k = IntVec2::new(3, -4);
        assert_eq!(k.norm1(), BigInt::from(7));
        assert_eq!(k.sign_normalized(), IntVec2::new(-3, 4));
        assert_eq!(IntVec2::new(-2, 0).sign_normalized(), IntVec2::new(2, 0));
        assert!(IntVec2::new(2, 4).is_collinear(&IntVec2::new(-1, -2)));
        assert!(!IntVec2::new(2, 4).is_collinear(&IntVec2::new(1, 3)));
    }

    #[test]
    fn serde_wire_forms() {
        let k = IntVec2::new(-3, 4);
        assert_eq!(serde_json::to_string(&k).unwrap(), "[-3,4]");
        let big = IntVec2::new(BigInt::from(i64::MAX) * 4, 1);
        let json = serde_json::to_string(&big).unwrap();
        assert_eq!(serde_json::from_str::<IntVec2>(&json).unwrap(), big);
        let m = IntMat2::new(1, -2, -1, 3);
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(json, "[[1,-2],[-1,3]]");
        assert_eq!(serde_json::from_str::<IntMat2>(&json).unwrap(), m);
    }
}
