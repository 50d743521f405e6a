//! Schützenberger reduction: project onto the span of the reachable row
//! vectors v·γ(z), once on the transposed representation and once on the
//! original. Both passes are exact Gaussian elimination over ℚ with the first
//! nonzero column as pivot.

use num_traits::{One, Zero};

use super::matrix::{dot, vec_mul, Rational, RationalMatrix};
use super::LinearRepresentation;

/// Incrementally built basis, kept in discovery order.
///
/// Alongside the discovered vectors `basis` it keeps a reduced row echelon
/// copy `echelon` and the change of basis `transform` with
/// echelon[i] = Σ_j transform[i][j] · basis[j].
struct Span {
    dim: usize,
    basis: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
    echelon: Vec<Vec<Rational>>,
    transform: Vec<Vec<Rational>>,
}

impl Span {
    fn new(dim: usize) -> Self {
        Self { dim, basis: Vec::new(), pivots: Vec::new(), echelon: Vec::new(), transform: Vec::new() }
    }

    /// Adds `u` if it is independent of the current basis.
    fn insert(&mut self, u: Vec<Rational>) -> bool {
        let mut residue = u.clone();
        let k = self.basis.len();
        let mut combo = vec![Rational::zero(); k + 1];
        combo[k] = Rational::one();
        for (i, row) in self.echelon.iter().enumerate() {
            let c = u[self.pivots[i]].clone();
            if c.is_zero() {
                continue;
            }
            for (r, e) in residue.iter_mut().zip(row) {
                if !e.is_zero() {
                    *r -= &c * e;
                }
            }
            for (t, s) in combo.iter_mut().zip(&self.transform[i]) {
                if !s.is_zero() {
                    *t -= &c * s;
                }
            }
        }
        let Some(pivot) = residue.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = residue[pivot].recip();
        residue.iter_mut().for_each(|x| *x *= &inv);
        combo.iter_mut().for_each(|x| *x *= &inv);
        for (row, t) in self.echelon.iter_mut().zip(self.transform.iter_mut()) {
            let c = row[pivot].clone();
            if c.is_zero() {
                continue;
            }
            for (r, e) in row.iter_mut().zip(&residue) {
                if !e.is_zero() {
                    *r -= &c * e;
                }
            }
            t.push(Rational::zero());
            for (x, s) in t.iter_mut().zip(&combo) {
                if !s.is_zero() {
                    *x -= &c * s;
                }
            }
        }
        for t in self.transform.iter_mut() {
            t.resize(k + 1, Rational::zero());
        }
        self.basis.push(u);
        self.pivots.push(pivot);
        self.echelon.push(residue);
        self.transform.push(combo);
        debug_assert_eq!(self.echelon[0].len(), self.dim);
        true
    }

    /// Coordinates of `x` (assumed to lie in the span) in the discovered basis.
    fn coordinates(&self, x: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.basis.len()];
        for (i, &p) in self.pivots.iter().enumerate() {
            let c = &x[p];
            if c.is_zero() {
                continue;
            }
            for (o, t) in out.iter_mut().zip(&self.transform[i]) {
                if !t.is_zero() {
                    *o += c * t;
                }
            }
        }
        out
    }
}

/// Restriction to the span of {v·γ(z)}, explored breadth-first with digits in
/// increasing order. The new initial vector is the first unit vector.
pub(crate) fn forward_reduce(lr: &LinearRepresentation) -> LinearRepresentation {
    let base = lr.base();
    let mut span = Span::new(lr.rank());
    if !span.insert(lr.v().to_vec()) {
        return LinearRepresentation::zero(base);
    }
    let mut images: Vec<Vec<Vec<Rational>>> = Vec::new();
    let mut cursor = 0;
    while cursor < span.basis.len() {
        let u = span.basis[cursor].clone();
        let row: Vec<Vec<Rational>> = lr.gamma().iter().map(|g| vec_mul(&u, g)).collect();
        for image in &row {
            span.insert(image.clone());
        }
        images.push(row);
        cursor += 1;
    }
    let k = span.basis.len();
    let gamma = (0..base as usize)
        .map(|d| {
            let rows = images.iter().map(|row| span.coordinates(&row[d])).collect();
            RationalMatrix::from_rows(rows).unwrap_or_else(|| RationalMatrix::zeros(k, k))
        })
        .collect();
    let mut v = vec![Rational::zero(); k];
    v[0] = Rational::one();
    let w = span.basis.iter().map(|b| dot(b, lr.w())).collect();
    LinearRepresentation::new(base, v, gamma, w).expect("reduced representation is well formed")
}

pub(crate) fn transpose(lr: &LinearRepresentation) -> LinearRepresentation {
    LinearRepresentation::new(
        lr.base(),
        lr.w().to_vec(),
        lr.gamma().iter().map(RationalMatrix::transpose).collect(),
        lr.v().to_vec(),
    )
    .expect("transpose is well formed")
}

/// Minimal-rank representation of the same sequence.
pub fn minimize_linrep(lr: &LinearRepresentation) -> LinearRepresentation {
    let observable = transpose(&forward_reduce(&transpose(lr)));
    forward_reduce(&observable)
}
