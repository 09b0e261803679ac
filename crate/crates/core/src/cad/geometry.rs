//! Exact 3-vectors, points, directions, lines and planes.
//!
//! Numbers travel through serde as strings (`"3/7"`, `"-0.25"`) or JSON
//! integers. JSON floats are rejected so every input stays exact.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{Signed, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::CadError;
use crate::field::{format_rational, parse_rational, Rational};

/// An exact number in documents.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Num(pub Rational);

impl Num {
    pub fn int(v: i64) -> Self {
        Num(Rational::from_integer(v.into()))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Num(Rational::new(n.into(), d.into()))
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct NumVisitor;
        impl Visitor<'_> for NumVisitor {
            type Value = Num;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an exact number as an integer or a string like \"3/7\" or \"0.25\"")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Num, E> {
                Ok(Num::int(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Num, E> {
                Ok(Num(Rational::from_integer(v.into())))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Num, E> {
                Err(E::custom(format!("floating-point number {v} is not exact; quote it, e.g. \"{v}\"")))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Num, E> {
                parse_rational(v).map(Num).map_err(E::custom)
            }
        }
        d.deserialize_any(NumVisitor)
    }
}

/// A 3-vector of rationals; also used for points.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "[Num; 3]", into = "[Num; 3]")]
pub struct Vec3(pub [Rational; 3]);

pub type Point3 = Vec3;

impl From<[Num; 3]> for Vec3 {
    fn from([x, y, z]: [Num; 3]) -> Self {
        Vec3([x.0, y.0, z.0])
    }
}

impl From<Vec3> for [Num; 3] {
    fn from(v: Vec3) -> Self {
        let [x, y, z] = v.0;
        [Num(x), Num(y), Num(z)]
    }
}

impl fmt::Debug for Vec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, y, z] = &self.0;
        write!(f, "({}, {}, {})", format_rational(x), format_rational(y), format_rational(z))
    }
}

impl Vec3 {
    pub fn new(x: Rational, y: Rational, z: Rational) -> Self {
        Vec3([x, y, z])
    }

    pub fn int(x: i64, y: i64, z: i64) -> Self {
        Vec3([x, y, z].map(|c| Rational::from_integer(c.into())))
    }

    pub fn zero() -> Self {
        Vec3::int(0, 0, 0)
    }

    pub fn x(&self) -> &Rational {
        &self.0[0]
    }

    pub fn y(&self) -> &Rational {
        &self.0[1]
    }

    pub fn z(&self) -> &Rational {
        &self.0[2]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn dot(&self, o: &Vec3) -> Rational {
        &self.0[0] * &o.0[0] + &self.0[1] * &o.0[1] + &self.0[2] * &o.0[2]
    }

    pub fn cross(&self, o: &Vec3) -> Vec3 {
        let [a1, a2, a3] = &self.0;
        let [b1, b2, b3] = &o.0;
        Vec3([a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1])
    }

    pub fn norm2(&self) -> Rational {
        self.dot(self)
    }

    pub fn scale(&self, s: &Rational) -> Vec3 {
        Vec3(self.0.clone().map(|c| c * s))
    }

    /// Component of `self` orthogonal to nonzero `d`.
    pub fn reject(&self, d: &Vec3) -> Vec3 {
        self - &d.scale(&(self.dot(d) / d.norm2()))
    }

    /// Index of the only nonzero coordinate, if there is exactly one.
    pub fn axis(&self) -> Option<usize> {
        let nonzero: Vec<usize> = (0..3).filter(|&i| !self.0[i].is_zero()).collect();
        (nonzero.len() == 1).then(|| nonzero[0])
    }
}

impl Add for &Vec3 {
    type Output = Vec3;
    fn add(self, o: &Vec3) -> Vec3 {
        Vec3([&self.0[0] + &o.0[0], &self.0[1] + &o.0[1], &self.0[2] + &o.0[2]])
    }
}

impl Sub for &Vec3 {
    type Output = Vec3;
    fn sub(self, o: &Vec3) -> Vec3 {
        Vec3([&self.0[0] - &o.0[0], &self.0[1] - &o.0[1], &self.0[2] - &o.0[2]])
    }
}

impl Neg for &Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3(self.0.clone().map(|c| -c))
    }
}

impl Mul<&Rational> for &Vec3 {
    type Output = Vec3;
    fn mul(self, s: &Rational) -> Vec3 {
        self.scale(s)
    }
}

/// A nonzero 3-vector. Length is irrelevant.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "Vec3", into = "Vec3")]
pub struct Direction3(Vec3);

impl Direction3 {
    pub fn new(v: Vec3) -> Result<Self, CadError> {
        if v.is_zero() {
            Err(CadError::ZeroDirection)
        } else {
            Ok(Direction3(v))
        }
    }

    pub fn int(x: i64, y: i64, z: i64) -> Self {
        Direction3::new(Vec3::int(x, y, z)).expect("nonzero literal direction")
    }

    pub fn vec(&self) -> &Vec3 {
        &self.0
    }

    /// Same direction scaled by a positive rational.
    pub fn scaled(&self, s: &Rational) -> Result<Self, CadError> {
        if !s.is_positive() {
            return Err(CadError::Degenerate("direction scale must be positive".into()));
        }
        Direction3::new(self.0.scale(s))
    }
}

impl TryFrom<Vec3> for Direction3 {
    type Error = CadError;
    fn try_from(v: Vec3) -> Result<Self, CadError> {
        Direction3::new(v)
    }
}

impl From<Direction3> for Vec3 {
    fn from(d: Direction3) -> Vec3 {
        d.0
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineGeom {
    pub point: Point3,
    pub direction: Direction3,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaneGeom {
    pub point: Point3,
    pub normal: Direction3,
}

impl LineGeom {
    pub fn new(point: Point3, direction: Direction3) -> Self {
        LineGeom { point, direction }
    }
}

impl PlaneGeom {
    pub fn new(point: Point3, normal: Direction3) -> Self {
        PlaneGeom { point, normal }
    }
}
