//! Primitive constraint rows in `(v, -ω)` coordinates.
//!
//! A row's 6-vector is the edge label: it sits in body `i`'s columns and its
//! negation in body `j`'s. Contracting the row with the two bodies' twists
//! gives the constraint's linear equation.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::geometry::{Direction3, Point3, Vec3};
use super::CadError;
use crate::field::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flavor {
    /// Affects rotations only; the label's `v` block is zero.
    Angular,
    Blind,
    /// One of the three rows of a point-point coincidence.
    PointPointCoincidenceRow,
}

/// One row of the rigidity matrix, tagged with the constraint it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct PrimitiveConstraint {
    /// Index of the source constraint in its framework.
    pub source: usize,
    pub flavor: Flavor,
    pub row6: [Rational; 6],
}

impl PrimitiveConstraint {
    fn new(flavor: Flavor, v: Vec3, w: Vec3) -> Self {
        let [a, b, c] = v.0;
        let [d, e, f] = w.0;
        PrimitiveConstraint { source: 0, flavor, row6: [a, b, c, d, e, f] }
    }

    pub fn is_red(&self) -> bool {
        self.flavor == Flavor::Angular
    }
}

/// Instantaneous rigid motion `(ω, v)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Twist {
    pub omega: Vec3,
    pub v: Vec3,
}

impl Twist {
    /// Velocity of the point `p` moving with the body.
    pub fn velocity_at(&self, p: &Point3) -> Vec3 {
        &self.v + &self.omega.cross(p)
    }

    /// The twist in column order `(v, -ω)`.
    pub fn columns(&self) -> [Rational; 6] {
        let [a, b, c] = self.v.0.clone();
        let [d, e, f] = (-&self.omega).0;
        [a, b, c, d, e, f]
    }
}

/// Value of the assembled row on the twists of bodies `i` and `j`.
pub fn contract(row: &PrimitiveConstraint, ti: &Twist, tj: &Twist) -> Rational {
    let (ci, cj) = (ti.columns(), tj.columns());
    (0..6).fold(Rational::zero(), |acc, k| acc + &row.row6[k] * (&ci[k] - &cj[k]))
}

/// Basic angular constraint: the angle between `a` on body `i` and `b` on
/// body `j` is fixed. Contracts to `(a × b)·(ω_i - ω_j)`.
pub fn angular_row(a: &Direction3, b: &Direction3) -> Result<PrimitiveConstraint, CadError> {
    let n = b.vec().cross(a.vec());
    if n.is_zero() {
        return Err(CadError::ParallelVectors);
    }
    Ok(PrimitiveConstraint::new(Flavor::Angular, Vec3::zero(), n))
}

/// Basic blind constraint: the relative velocity of `p` is orthogonal to
/// `c`. Contracts to `c·(p'_i - p'_j)`.
pub fn blind_row(p: &Point3, c: &Direction3) -> PrimitiveConstraint {
    let c = c.vec();
    PrimitiveConstraint::new(Flavor::Blind, c.clone(), -&p.cross(c))
}

/// Two directions with `a × b = c` exactly.
///
/// Axis-aligned `c` gets scaled basis vectors; otherwise both vectors are
/// generically nonzero in every coordinate.
pub fn complement_pair(c: &Direction3) -> (Direction3, Direction3) {
    let cv = c.vec();
    if let Some(axis) = cv.axis() {
        let mut a = Vec3::zero();
        let mut b = Vec3::zero();
        a.0[(axis + 1) % 3] = Rational::one();
        b.0[(axis + 2) % 3] = cv.0[axis].clone();
        return (Direction3::new(a).expect("unit"), Direction3::new(b).expect("nonzero axis"));
    }
    let mut a = Vec3::int(1, 1, 1).cross(cv);
    if a.is_zero() {
        a = Vec3::int(0, 1, 0).cross(cv);
    }
    // a ⟂ c gives a × (c × a) = |a|² c.
    let b = cv.cross(&a).scale(&(Rational::one() / a.norm2()));
    (Direction3::new(a).expect("a ⟂ c, c nonzero"), Direction3::new(b).expect("|b| = |c|/|a|"))
}

/// The three rows forcing the point `p` to move alike on both bodies.
pub fn point_point_coincidence_rows(p: &Point3) -> [PrimitiveConstraint; 3] {
    [Vec3::int(1, 0, 0), Vec3::int(0, 1, 0), Vec3::int(0, 0, 1)].map(|e| {
        let mut row = blind_row(p, &Direction3::new(e).expect("basis vector"));
        row.flavor = Flavor::PointPointCoincidenceRow;
        row
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(v: i64) -> Rational {
        Rational::from_integer(v.into())
    }

    fn random_vec(rng: &mut ChaCha8Rng) -> Vec3 {
        Vec3::new(
            Rational::new(rng.random_range(-50..=50).into(), rng.random_range(1..=7).into()),
            Rational::new(rng.random_range(-50..=50).into(), rng.random_range(1..=7).into()),
            Rational::new(rng.random_range(-50..=50).into(), rng.random_range(1..=7).into()),
        )
    }

    fn random_dir(rng: &mut ChaCha8Rng) -> Direction3 {
        loop {
            if let Ok(d) = Direction3::new(random_vec(rng)) {
                return d;
            }
        }
    }

    fn random_twist(rng: &mut ChaCha8Rng) -> Twist {
        Twist { omega: random_vec(rng), v: random_vec(rng) }
    }

    #[test]
    fn angular_row_matches_the_basic_form() {
        let r = angular_row(&Direction3::int(1, 0, 0), &Direction3::int(0, 1, 0)).unwrap();
        assert_eq!(r.row6, [0, 0, 0, 0, 0, -1].map(q));
        assert_eq!(r.flavor, Flavor::Angular);
        let a = Direction3::int(1, 2, 3);
        assert_eq!(angular_row(&a, &a).unwrap_err(), CadError::ParallelVectors);
        assert_eq!(angular_row(&a, &Direction3::int(-2, -4, -6)).unwrap_err(), CadError::ParallelVectors);
    }

    #[test]
    fn blind_row_examples() {
        assert_eq!(blind_row(&Vec3::zero(), &Direction3::int(1, 0, 0)).row6, [1, 0, 0, 0, 0, 0].map(q));
        assert_eq!(blind_row(&Vec3::int(0, 0, 1), &Direction3::int(1, 0, 0)).row6, [1, 0, 0, 0, -1, 0].map(q));
    }

    #[test]
    fn rows_honour_their_semantic_contracts() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let (ti, tj) = (random_twist(&mut rng), random_twist(&mut rng));
            let p = random_vec(&mut rng);
            let c = random_dir(&mut rng);
            let blind = blind_row(&p, &c);
            let rel = &ti.velocity_at(&p) - &tj.velocity_at(&p);
            assert_eq!(contract(&blind, &ti, &tj), c.vec().dot(&rel));

            let (a, b) = (random_dir(&mut rng), random_dir(&mut rng));
            let ang = angular_row(&a, &b).unwrap();
            let dw = &ti.omega - &tj.omega;
            assert_eq!(contract(&ang, &ti, &tj), a.vec().cross(b.vec()).dot(&dw));

            let rows = point_point_coincidence_rows(&p);
            for (axis, row) in rows.iter().enumerate() {
                assert_eq!(contract(row, &ti, &tj), rel.0[axis]);
            }

            let same = Twist { omega: ti.omega.clone(), v: ti.v.clone() };
            assert!(contract(&blind, &ti, &same).is_zero());
            assert!(contract(&ang, &ti, &same).is_zero());
        }
    }

    #[test]
    fn point_point_rows_match_the_printed_table() {
        let p = Vec3::int(2, 3, 5);
        let rows = point_point_coincidence_rows(&p);
        assert_eq!(rows[0].row6, [1, 0, 0, 0, -5, 3].map(q));
        assert_eq!(rows[1].row6, [0, 1, 0, 5, 0, -2].map(q));
        assert_eq!(rows[2].row6, [0, 0, 1, -3, 2, 0].map(q));
        let origin = point_point_coincidence_rows(&Vec3::zero());
        assert!(origin.iter().all(|r| r.row6[3..].iter().all(Zero::is_zero)));
    }

    #[test]
    fn complement_pairs_multiply_back() {
        let (a, b) = complement_pair(&Direction3::int(0, 0, 1));
        assert_eq!((a.vec(), b.vec()), (&Vec3::int(1, 0, 0), &Vec3::int(0, 1, 0)));
        for c in
            [Direction3::int(1, 1, 0), Direction3::int(1, 1, 1), Direction3::int(-3, 0, 0), Direction3::int(0, 4, 0)]
        {
            let (a, b) = complement_pair(&c);
            assert_eq!(&a.vec().cross(b.vec()), c.vec());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let c = random_dir(&mut rng);
            let (a, b) = complement_pair(&c);
            assert_eq!(&a.vec().cross(b.vec()), c.vec());
            assert!(a.vec().0.iter().chain(b.vec().0.iter()).all(|x| !x.is_zero()));
        }
    }
}
