//! The spin(3) representation on ℂ⁴ and the obstruction to parallel
//! spinors.
//!
//! Complex entries are [`num_complex::Complex`] over a [`Field`], so the
//! Clifford matrices and the spin(3) basis are exact in ℚ(√3) + iℚ(√3).

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::pairs;
use crate::linalg::Matrix;
use crate::scalar::Field;

/// A 4×4 complex matrix.
pub type CMatrix<T> = Matrix<Complex<T>>;

fn c<T: Field>(re: i64, im: i64) -> Complex<T> {
    Complex::new(T::from_int(re), T::from_int(im))
}

fn cmat<T: Field>(rows: [[(i64, i64); 4]; 4]) -> CMatrix<T> {
    Matrix::from_fn(4, 4, |r, k| c(rows[r][k].0, rows[r][k].1))
}

/// Generators `e₁…e₅` of the Clifford algebra of ℝ⁵ acting on ℂ⁴.
#[derive(Clone, Debug, PartialEq)]
pub struct CliffordRep<T> {
    /// `e₁…e₅`.
    pub e: [CMatrix<T>; 5],
}

/// The representation with `eᵢ² = 1` and `eᵢeⱼ + eⱼeᵢ = 0`.
pub fn clifford_basis<T: Field>() -> CliffordRep<T> {
    let o = (0, 0);
    let p = (1, 0);
    let m = (-1, 0);
    let i = (0, 1);
    let mi = (0, -1);
    CliffordRep {
        e: [
            cmat([[o, o, p, o], [o, o, o, m], [p, o, o, o], [o, m, o, o]]),
            cmat([[o, p, o, o], [p, o, o, o], [o, o, o, p], [o, o, p, o]]),
            cmat([[o, o, mi, o], [o, o, o, i], [i, o, o, o], [o, mi, o, o]]),
            cmat([[o, mi, o, o], [i, o, o, o], [o, o, o, mi], [o, o, i, o]]),
            cmat([[p, o, o, o], [o, m, o, o], [o, o, m, o], [o, o, o, p]]),
        ],
    }
}

fn mul<T: Field>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    a.mul(b).expect("4x4")
}

impl<T: Field> CliffordRep<T> {
    /// `eᵢeⱼ`.
    pub fn product(&self, i: usize, j: usize) -> CMatrix<T> {
        mul(&self.e[i], &self.e[j])
    }

    /// True when `eᵢeⱼ + eⱼeᵢ = 2δᵢⱼ` for all `i, j`.
    pub fn satisfies_clifford_relations(&self) -> bool {
        let id = Matrix::<Complex<T>>::identity(4);
        (0..5).all(|i| {
            (0..5).all(|j| {
                let s = self.product(i, j).add(&self.product(j, i)).expect("4x4");
                let want = if i == j { id.scale(&c(2, 0)) } else { Matrix::zeros(4, 4) };
                s == want
            })
        })
    }

    /// The antisymmetric 5×5 matrix `φ(X)` with `[X, e_k] = Σ_l φ(X)_lk e_l`
    /// for `X` in the span of the `eᵢeⱼ`; `φ(½eᵢeⱼ)` is the unit matrix
    /// `f_ij`.
    ///
    /// Fails when `X` does not act on the span of `e₁…e₅` by a real
    /// matrix.
    pub fn vector_image(&self, x: &CMatrix<T>, tol: f64) -> Result<Matrix<T>> {
        let quarter = c::<T>(1, 0) / c(4, 0);
        let mut out = Matrix::zeros(5, 5);
        for k in 0..5 {
            let br = x.commutator(&self.e[k])?;
            let mut rebuilt = Matrix::zeros(4, 4);
            for l in 0..5 {
                let coef = mul(&self.e[l], &br).trace() * quarter.clone();
                if !coef.im.is_negligible(tol) {
                    return Err(Error::structure("element does not act by a real rotation"));
                }
                rebuilt = rebuilt.add(&self.e[l].scale(&coef))?;
                out[(l, k)] = coef.re;
            }
            if rebuilt.sub(&br)?.as_slice().iter().any(|z| !z.re.is_negligible(tol) || !z.im.is_negligible(tol)) {
                return Err(Error::structure("commutator leaves the span of e1..e5"));
            }
        }
        Ok(out)
    }
}

/// The spin(3) basis `𝐄₁, 𝐄₂, 𝐄₃` covering `E₁, E₂, E₃`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinBasis<T> {
    /// `𝐄₁, 𝐄₂, 𝐄₃`.
    pub e: [CMatrix<T>; 3],
}

/// `𝐄₁ = ½(√3e₁e₅ + e₂e₃ + e₄e₅)`, `𝐄₂ = ½(√3e₁e₃ + e₂e₅ + e₃e₄)`,
/// `𝐄₃ = ½(2e₂e₄ + e₃e₅)`, computed from [`clifford_basis`].
pub fn spin_basis<T: Field>() -> SpinBasis<T> {
    let cl = clifford_basis::<T>();
    let s3 = Complex::new(T::sqrt3(), T::zero());
    let half = Complex::new(T::from_ratio(1, 2), T::zero());
    let two = c::<T>(2, 0);
    let one = Complex::<T>::one();
    // Zero-based (i, j, coefficient) triples of each generator.
    let terms: [[(usize, usize, Complex<T>); 3]; 3] = [
        [(0, 4, s3.clone()), (1, 2, one.clone()), (3, 4, one.clone())],
        [(0, 2, s3), (1, 4, one.clone()), (2, 3, one.clone())],
        [(1, 3, two), (2, 4, one), (0, 0, Complex::zero())],
    ];
    SpinBasis {
        e: terms.map(|t| {
            t.iter()
                .filter(|(_, _, k)| !k.is_zero())
                .fold(Matrix::zeros(4, 4), |acc: CMatrix<T>, (i, j, k)| {
                    acc.add(&cl.product(*i, *j).scale(k)).expect("4x4")
                })
                .scale(&half)
        }),
    }
}

/// Determinant of a 4×4 matrix by the Leibniz expansion (no division).
pub fn det4<R: crate::scalar::Ring>(m: &Matrix<R>) -> R {
    assert!(m.rows() == 4 && m.cols() == 4, "det4 of a non-4x4 matrix");
    let mut total = R::zero();
    let mut perm = [0usize, 1, 2, 3];
    // Heap's algorithm tracks the sign by parity of swaps.
    let mut stack = [0usize; 4];
    let mut sign = true;
    let term = |p: &[usize; 4]| (0..4).fold(R::one(), |acc, r| acc * m[(r, p[r])].clone());
    total = total + term(&perm);
    let mut i = 0;
    while i < 4 {
        if stack[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(stack[i], i);
            }
            sign = !sign;
            let t = term(&perm);
            total = if sign { total + t } else { total - t };
            stack[i] += 1;
            i = 0;
        } else {
            stack[i] = 0;
            i += 1;
        }
    }
    total
}

/// `[[Re, −Im], [Im, Re]]`: the real form of a complex matrix.
pub fn realify<T: Field>(m: &CMatrix<T>) -> Matrix<T> {
    let (r, k) = (m.rows(), m.cols());
    Matrix::from_fn(2 * r, 2 * k, |a, b| {
        let z = &m[(a % r, b % k)];
        match (a < r, b < k) {
            (true, true) | (false, false) => z.re.clone(),
            (true, false) => -z.im.clone(),
            (false, true) => z.im.clone(),
        }
    })
}

/// `W = Σ rᴵ𝐄ᴵ`.
pub fn w_matrix<T: Field>(basis: &SpinBasis<T>, r: &[T; 3]) -> CMatrix<T> {
    (0..3).fold(Matrix::zeros(4, 4), |acc, a| {
        acc.add(&basis.e[a].scale(&Complex::new(r[a].clone(), T::zero())))
            .expect("4x4")
    })
}

/// `(9/16)(Σ(rᴵ)²)²`.
pub fn det_formula<T: Field>(r: &[T; 3]) -> T {
    let s = r.iter().fold(T::zero(), |acc, x| acc + x.clone() * x.clone());
    T::from_ratio(9, 16) * s.clone() * s
}

/// The integrability obstruction for parallel spinors of the spin(3)
/// connection.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpinorObstruction {
    /// `det W_ij` for `i < j` (zero-based pairs, lexicographic).
    pub det: Vec<f64>,
    /// Largest `|det W_ij − (9/16)(Σ(rᴵ_ij)²)²|`.
    pub det_formula_residual: f64,
    /// True when every `W_ij` vanishes.
    pub flat: bool,
    /// Complex dimension of the common kernel of all `W_ij`.
    pub solution_dim: usize,
}

/// Evaluates `W_ij = rᴵ_ij𝐄ᴵ` from normalized curvature coefficients and
/// the dimension of their common kernel.
pub fn spinor_obstruction<T: Field>(r: &[Matrix<T>; 3], tol: f64) -> Result<SpinorObstruction> {
    if r.iter().any(|m| m.rows() != 5 || m.cols() != 5) {
        return Err(Error::dimension("curvature coefficients must be 5x5"));
    }
    let basis = spin_basis::<T>();
    let mut det = Vec::new();
    let mut residual: f64 = 0.0;
    let mut blocks = Vec::new();
    let mut flat = true;
    for (i, j) in pairs(5) {
        let rij: [T; 3] = std::array::from_fn(|a| r[a][(i, j)].clone());
        flat &= rij.iter().all(|x| x.is_negligible(tol));
        let w = w_matrix(&basis, &rij);
        let d = det4(&w);
        let f = det_formula(&rij);
        residual = residual.max((d.re.clone() - f).abs_f64()).max(d.im.abs_f64());
        det.push(d.re.to_f64());
        blocks.push(realify(&w));
    }
    let stacked = Matrix::stack(&blocks)?;
    let nullity = 8 - stacked.rank(tol);
    Ok(SpinorObstruction {
        det,
        det_formula_residual: residual,
        flat,
        solution_dim: nullity / 2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::QSqrt3;
    use crate::upsilon::{so3_basis, unit_antisymmetric};

    type Q = QSqrt3;

    fn cq(re: Q, im: Q) -> Complex<Q> {
        Complex::new(re, im)
    }

    #[test]
    fn clifford_relations_hold() {
        let cl = clifford_basis::<Q>();
        assert!(cl.satisfies_clifford_relations());
        let e5 = &cl.e[4];
        for k in 0..4 {
            let want = if k == 0 || k == 3 { 1 } else { -1 };
            assert_eq!(e5[(k, k)], c(want, 0));
        }
    }

    #[test]
    fn spin_basis_matches_reference_matrices() {
        let h = Q::from_ratio(1, 2);
        let hs = Q::sqrt3() * h.clone();
        let z = Q::zero();
        let re = |x: Q| cq(x, Q::zero());
        let im = |x: Q| cq(Q::zero(), x);
        let e1 = Matrix::from_rows(vec![
            vec![re(z.clone()), im(h.clone()), re(-hs.clone()), im(h.clone())],
            vec![im(h.clone()), re(z.clone()), im(-h.clone()), re(-hs.clone())],
            vec![re(hs.clone()), im(-h.clone()), re(z.clone()), im(-h.clone())],
            vec![im(h.clone()), re(hs.clone()), im(-h.clone()), re(z.clone())],
        ])
        .unwrap();
        let e2 = Matrix::from_rows(vec![
            vec![im(hs.clone()), re(-h.clone()), re(z.clone()), re(-h.clone())],
            vec![re(h.clone()), im(hs.clone()), re(-h.clone()), re(z.clone())],
            vec![re(z.clone()), re(h.clone()), im(-hs.clone()), re(h.clone())],
            vec![re(h.clone()), re(z.clone()), re(-h.clone()), im(-hs.clone())],
        ])
        .unwrap();
        let one = Q::one();
        let e3 = Matrix::from_rows(vec![
            vec![im(one.clone()), re(z.clone()), im(h.clone()), re(z.clone())],
            vec![re(z.clone()), im(-one.clone()), re(z.clone()), im(h.clone())],
            vec![im(h.clone()), re(z.clone()), im(one.clone()), re(z.clone())],
            vec![re(z.clone()), im(h.clone()), re(z.clone()), im(-one)],
        ])
        .unwrap();
        let b = spin_basis::<Q>();
        assert_eq!(b.e[0], e1);
        assert_eq!(b.e[1], e2);
        assert_eq!(b.e[2], e3);
    }

    #[test]
    fn spin_basis_closes_and_covers_so3() {
        let b = spin_basis::<Q>();
        let cl = clifford_basis::<Q>();
        let e = so3_basis::<Q>();
        for a in 0..3 {
            let (p, q) = ((a + 1) % 3, (a + 2) % 3);
            assert_eq!(b.e[p].commutator(&b.e[q]).unwrap(), b.e[a]);
            assert_eq!(cl.vector_image(&b.e[a], 0.0).unwrap(), e[a]);
            assert!(b.e[a].trace().is_zero());
        }
    }

    #[test]
    fn double_cover_sends_products_to_unit_matrices() {
        let cl = clifford_basis::<Q>();
        let half = cq(Q::from_ratio(1, 2), Q::zero());
        for (i, j) in pairs(5) {
            let x = cl.product(i, j).scale(&half);
            assert_eq!(cl.vector_image(&x, 0.0).unwrap(), unit_antisymmetric(i, j));
        }
    }

    #[test]
    fn det4_matches_elimination() {
        let m = Matrix::from_fn(4, 4, |r, k| Q::from_int(((r * 7 + k * 3) % 5) as i64 - 2 + (r == k) as i64));
        assert_eq!(det4(&m), m.det().unwrap());
    }

    #[test]
    fn flat_curvature_has_four_spinors() {
        let z: [Matrix<Q>; 3] = std::array::from_fn(|_| Matrix::zeros(5, 5));
        let o = spinor_obstruction(&z, 0.0).unwrap();
        assert!(o.flat);
        assert_eq!(o.solution_dim, 4);
        let mut r = z.clone();
        r[2][(1, 3)] = Q::one();
        r[2][(3, 1)] = -Q::one();
        let o = spinor_obstruction(&r, 0.0).unwrap();
        assert!(!o.flat);
        assert_eq!(o.solution_dim, 0);
        assert_eq!(o.det_formula_residual, 0.0);
    }
}
