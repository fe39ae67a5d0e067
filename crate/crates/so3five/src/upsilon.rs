//! The tensor Υ: the embedding σ of ℝ⁵ into traceless symmetric 3×3
//! matrices, the standard cubic form, its defining identities, frame
//! adaptation, the stabilizer and the SO(3) action ρ.
//!
//! Indices are zero-based throughout: `e₁` is index 0.

use nalgebra::{Matrix5, SymmetricEigen, Vector5};

use crate::error::{Error, Result};
use crate::exterior::pairs;
use crate::linalg::Matrix;
use crate::scalar::Field;

/// A totally symmetric rank-3 tensor on ℝ⁵, stored densely.
#[derive(Clone, PartialEq, Debug)]
pub struct SymTensor3<T> {
    data: Vec<T>,
}

fn at(i: usize, j: usize, k: usize) -> usize {
    25 * i + 5 * j + k
}

impl<T: Field> SymTensor3<T> {
    /// The zero tensor.
    pub fn zero() -> Self {
        SymTensor3 {
            data: vec![T::zero(); 125],
        }
    }

    /// Builds the tensor from its independent entries `(i, j, k, value)`,
    /// indices in any order; every permutation receives the value.
    pub fn from_entries(entries: &[(usize, usize, usize, T)]) -> Result<Self> {
        let mut t = SymTensor3::zero();
        for (i, j, k, v) in entries {
            if *i >= 5 || *j >= 5 || *k >= 5 {
                return Err(Error::argument("tensor index out of range"));
            }
            t.set(*i, *j, *k, v.clone());
        }
        Ok(t)
    }

    /// Builds a tensor from a dense array, without symmetrizing.
    ///
    /// Use [`SymTensor3::is_symmetric`] to inspect the result.
    pub fn from_dense(f: impl Fn(usize, usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(125);
        for i in 0..5 {
            for j in 0..5 {
                for k in 0..5 {
                    data.push(f(i, j, k));
                }
            }
        }
        SymTensor3 { data }
    }

    fn set(&mut self, i: usize, j: usize, k: usize, v: T) {
        for (a, b, c) in [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
            self.data[at(a, b, c)] = v.clone();
        }
    }

    /// Entry `Υ_ijk`.
    pub fn get(&self, i: usize, j: usize, k: usize) -> &T {
        &self.data[at(i, j, k)]
    }

    /// Independent entries `(i ≤ j ≤ k, value)` that are nonzero.
    pub fn entries(&self) -> Vec<(usize, usize, usize, T)> {
        let mut out = Vec::new();
        for i in 0..5 {
            for j in i..5 {
                for k in j..5 {
                    let v = self.get(i, j, k);
                    if !v.is_zero() {
                        out.push((i, j, k, v.clone()));
                    }
                }
            }
        }
        out
    }

    /// `−Υ`.
    pub fn negate(&self) -> Self {
        SymTensor3 {
            data: self.data.iter().map(|x| -x.clone()).collect(),
        }
    }

    /// Coefficientwise conversion.
    pub fn map<U: Field>(&self, f: impl Fn(&T) -> U) -> SymTensor3<U> {
        SymTensor3 {
            data: self.data.iter().map(f).collect(),
        }
    }

    /// True when the stored array is invariant under index permutations.
    pub fn is_symmetric(&self) -> bool {
        (0..5).all(|i| {
            (0..5).all(|j| {
                (0..5).all(|k| {
                    let v = self.get(i, j, k);
                    v == self.get(j, i, k) && v == self.get(i, k, j)
                })
            })
        })
    }

    /// Trilinear evaluation `Υ(u, v, w) = Υ_ijk uⁱ vʲ wᵏ`.
    pub fn eval(&self, u: &[T], v: &[T], w: &[T]) -> T {
        let mut s = T::zero();
        for i in 0..5 {
            if u[i].is_zero() {
                continue;
            }
            for j in 0..5 {
                if v[j].is_zero() {
                    continue;
                }
                for k in 0..5 {
                    let c = self.get(i, j, k);
                    if !c.is_zero() && !w[k].is_zero() {
                        s = s + c.clone() * u[i].clone() * v[j].clone() * w[k].clone();
                    }
                }
            }
        }
        s
    }

    /// The cubic form `Υ(A, A, A)`.
    pub fn cubic(&self, a: &[T]) -> T {
        self.eval(a, a, a)
    }

    /// The symmetric matrix `(Υ_v)_ij = Υ_ijk v_k`.
    pub fn upsilon_map(&self, v: &[T]) -> Matrix<T> {
        Matrix::from_fn(5, 5, |i, j| {
            (0..5).fold(T::zero(), |acc, k| {
                let c = self.get(i, j, k);
                if c.is_zero() || v[k].is_zero() {
                    acc
                } else {
                    acc + c.clone() * v[k].clone()
                }
            })
        })
    }

    /// Pushforward by an orthogonal matrix `R`:
    /// `Υ'_ijk = R_il R_jm R_kn Υ_lmn`, so that `Υ'(RA, RA, RA) = Υ(A, A, A)`.
    pub fn pushforward(&self, r: &Matrix<T>) -> Self {
        let step = |src: &Vec<T>, axis: usize| -> Vec<T> {
            let mut out = vec![T::zero(); 125];
            for i in 0..5 {
                for j in 0..5 {
                    for k in 0..5 {
                        let mut s = T::zero();
                        for l in 0..5 {
                            let (a, b, c, rr) = match axis {
                                0 => (l, j, k, &r[(i, l)]),
                                1 => (i, l, k, &r[(j, l)]),
                                _ => (i, j, l, &r[(k, l)]),
                            };
                            let x = &src[at(a, b, c)];
                            if !x.is_zero() && !rr.is_zero() {
                                s = s + rr.clone() * x.clone();
                            }
                        }
                        out[at(i, j, k)] = s;
                    }
                }
            }
            out
        };
        let d = step(&step(&step(&self.data, 0), 1), 2);
        SymTensor3 { data: d }
    }

    /// Maximum entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(Field::abs_f64).fold(0.0, f64::max)
    }
}

/// The standard tensor with
/// `Υ(A,A,A) = ½a₁(6a₂² + 6a₄² − 2a₁² − 3a₃² − 3a₅²) + (3√3/2)a₄(a₅² − a₃²) + 3√3 a₂a₃a₅`.
pub fn standard_upsilon<T: Field>() -> SymTensor3<T> {
    let h = T::from_ratio(1, 2);
    let b = T::sqrt3() * h.clone();
    SymTensor3::from_entries(&[
        (0, 0, 0, T::from_int(-1)),
        (0, 1, 1, T::one()),
        (0, 3, 3, T::one()),
        (0, 2, 2, -h.clone()),
        (0, 4, 4, -h),
        (3, 4, 4, b.clone()),
        (3, 2, 2, -b.clone()),
        (1, 2, 4, b),
    ])
    .expect("indices in range")
}

/// The embedding `σ(A)` of ℝ⁵ into traceless symmetric 3×3 matrices.
pub fn sigma_embed<T: Field>(a: &[T]) -> Matrix<T> {
    let s = a[0].clone() / T::sqrt3();
    Matrix::from_rows(vec![
        vec![s.clone() - a[3].clone(), a[1].clone(), a[2].clone()],
        vec![a[1].clone(), s.clone() + a[3].clone(), a[4].clone()],
        vec![a[2].clone(), a[4].clone(), -(s.clone() + s)],
    ])
    .expect("3x3")
}

/// Inverse of [`sigma_embed`] on traceless symmetric matrices.
pub fn sigma_inverse<T: Field>(m: &Matrix<T>) -> [T; 5] {
    let a1 = -(m[(2, 2)].clone() * T::sqrt3()) / T::from_int(2);
    let a4 = (m[(1, 1)].clone() - m[(0, 0)].clone()) / T::from_int(2);
    [a1, m[(0, 1)].clone(), m[(0, 2)].clone(), a4, m[(1, 2)].clone()]
}

/// Coefficients `(c₀, c₁, c₂, c₃)` of `det(σ(A) − λI) = c₃λ³ + c₂λ² + c₁λ + c₀`.
pub fn char_poly<T: Field>(a: &[T]) -> [T; 4] {
    let m = sigma_embed(a);
    let e = |r: usize, c: usize| m[(r, c)].clone();
    let minors = e(0, 0) * e(1, 1) - e(0, 1) * e(1, 0) + e(0, 0) * e(2, 2)
        - e(0, 2) * e(2, 0)
        + e(1, 1) * e(2, 2)
        - e(1, 2) * e(2, 1);
    [m.det().expect("square"), -minors, m.trace(), -T::one()]
}

/// Outcome of [`verify_so3_structure`]; failures are reported, not thrown.
#[derive(Clone, Debug, PartialEq)]
pub struct So3Check {
    /// Stored array is totally symmetric (within the tolerance for floats).
    pub symmetric: bool,
    /// `Υ_ijj = 0`.
    pub traceless: bool,
    /// The quadratic identity in explicit index form.
    pub cubic_identity: bool,
    /// `Υ_v² v = g(v,v) v` on a polarization-spanning set of `v`.
    pub cubic_on_spanning_set: bool,
    /// Largest residual over all checks.
    pub max_residual: f64,
}

impl So3Check {
    /// All conditions hold.
    pub fn passed(&self) -> bool {
        self.symmetric && self.traceless && self.cubic_identity && self.cubic_on_spanning_set
    }
}

/// Vectors `e_i`, `e_i + e_j`, `e_i + e_j + e_k`: a cubic map vanishing on
/// these vanishes identically, by polarization.
fn polarization_set<T: Field>() -> Vec<Vec<T>> {
    let mut out = Vec::new();
    for i in 0..5 {
        for j in i..5 {
            for k in j..5 {
                let mut v = vec![T::zero(); 5];
                for idx in [i, j, k] {
                    v[idx] = T::one();
                }
                out.push(v);
            }
        }
    }
    out
}

/// Checks total symmetry, tracelessness and the quadratic identity
/// `Υ_jki Υ_lni + Υ_lji Υ_kni + Υ_kli Υ_jni = g_jk g_ln + g_lj g_kn + g_kl g_jn`.
pub fn verify_so3_structure<T: Field>(u: &SymTensor3<T>, tol: f64) -> So3Check {
    let mut max_res: f64 = 0.0;
    let mut track = |x: &T| {
        max_res = max_res.max(x.abs_f64());
        x.is_negligible(tol)
    };
    let mut symmetric = true;
    for i in 0..5 {
        for j in 0..5 {
            for k in 0..5 {
                let v = u.get(i, j, k).clone();
                symmetric &= track(&(v.clone() - u.get(j, i, k).clone()));
                symmetric &= track(&(v - u.get(i, k, j).clone()));
            }
        }
    }
    let mut traceless = true;
    for i in 0..5 {
        let t = (0..5).fold(T::zero(), |acc, j| acc + u.get(i, j, j).clone());
        traceless &= track(&t);
    }
    let g = |a: usize, b: usize| if a == b { T::one() } else { T::zero() };
    let mut cubic_identity = true;
    for j in 0..5 {
        for k in 0..5 {
            for l in 0..5 {
                for n in 0..5 {
                    let mut s = T::zero();
                    for i in 0..5 {
                        s = s + u.get(j, k, i).clone() * u.get(l, n, i).clone()
                            + u.get(l, j, i).clone() * u.get(k, n, i).clone()
                            + u.get(k, l, i).clone() * u.get(j, n, i).clone();
                    }
                    let rhs = g(j, k) * g(l, n) + g(l, j) * g(k, n) + g(k, l) * g(j, n);
                    cubic_identity &= track(&(s - rhs));
                }
            }
        }
    }
    let mut cubic_on_spanning_set = true;
    for v in polarization_set::<T>() {
        let m = u.upsilon_map(&v);
        let w = m.apply(&m.apply(&v).expect("5")).expect("5");
        let gvv = v.iter().fold(T::zero(), |acc, x| acc + x.clone() * x.clone());
        for (wi, vi) in w.iter().zip(&v) {
            cubic_on_spanning_set &= track(&(wi.clone() - gvv.clone() * vi.clone()));
        }
    }
    So3Check {
        symmetric,
        traceless,
        cubic_identity,
        cubic_on_spanning_set,
        max_residual: max_res,
    }
}

/// The matrices `Υ_{e_j}` of the adapted normal form, with `s = −½` and
/// `b = c = √3/2`.
pub fn normal_form_matrices<T: Field>() -> [Matrix<T>; 5] {
    let one = T::one();
    let s = T::from_ratio(-1, 2);
    let b = T::sqrt3() / T::from_int(2);
    let sym = |entries: &[(usize, usize, T)]| {
        let mut m = Matrix::zeros(5, 5);
        for (i, j, v) in entries {
            m[(*i, *j)] = v.clone();
            m[(*j, *i)] = v.clone();
        }
        m
    };
    [
        Matrix::diag(&[-one.clone(), one.clone(), s.clone(), one.clone(), s.clone()]),
        sym(&[(0, 1, one.clone()), (2, 4, b.clone())]),
        sym(&[(0, 2, s.clone()), (1, 4, b.clone()), (2, 3, -b.clone())]),
        sym(&[(0, 3, one), (2, 2, -b.clone()), (4, 4, b.clone())]),
        sym(&[(0, 4, s), (1, 2, b.clone()), (3, 4, b)]),
    ]
}

/// The matrices `M_j[a][b] = Υ(f_a, f_b, f_j)` of a tensor in a basis `f`.
pub fn matrices_in_basis<T: Field>(u: &SymTensor3<T>, basis: &[Vec<T>]) -> [Matrix<T>; 5] {
    std::array::from_fn(|j| {
        Matrix::from_fn(5, 5, |a, b| u.eval(&basis[a], &basis[b], &basis[j]))
    })
}

fn to_vec5(v: &[f64]) -> Vector5<f64> {
    Vector5::from_column_slice(v)
}

fn upsilon_map_na(u: &SymTensor3<f64>, v: &Vector5<f64>) -> Matrix5<f64> {
    let m = u.upsilon_map(v.as_slice());
    Matrix5::from_fn(|r, c| m[(r, c)])
}

/// Constructs an orthonormal basis `(e₁..e₅)` in which the matrices
/// `Υ_{e_j}` take the normal form of [`normal_form_matrices`].
///
/// A unit `e₂` with `det Υ_{e₂} = 0` is found by bisection along a great
/// circle (the determinant is odd in `v`); then `e₁ = Υ_{e₂}e₂`, `e₄` spans
/// the kernel of `Υ_{e₂}`, and `(e₃, e₅)` diagonalize the antidiagonal
/// action of `Υ_{e₂}` on the remaining plane with `c ≥ 0`. When the result
/// has `b = −c` the triple `(e₃, e₄, e₅)` is negated.
///
/// Returns the basis vectors (coordinates in the input frame).
pub fn adapt_frame(u: &SymTensor3<f64>, tol: f64) -> Result<Vec<Vec<f64>>> {
    let check = verify_so3_structure(u, tol.max(1e-8));
    if !check.passed() {
        return Err(Error::structure(format!(
            "tensor does not define an SO(3) structure (residual {:.3e})",
            check.max_residual
        )));
    }
    let target = normal_form_matrices::<f64>();
    let starts = [
        [1.0, 0.3, -0.2, 0.7, 0.1],
        [0.2, 1.0, 0.5, -0.3, 0.4],
        [-0.4, 0.1, 1.0, 0.6, -0.5],
        [0.3, -0.6, 0.2, 1.0, 0.8],
        [0.5, 0.4, -0.7, 0.2, 1.0],
        [1.0, 1.0, 1.0, 1.0, 1.0],
    ];
    let mut last_err = String::from("no attempt made");
    for start in starts {
        match adapt_from_start(u, &start) {
            Ok(basis) => {
                let got = matrices_in_basis(u, &basis);
                let err = got
                    .iter()
                    .zip(&target)
                    .map(|(g, t)| g.sub(t).expect("5x5").max_abs())
                    .fold(0.0, f64::max);
                if err < 1e-8 {
                    return Ok(basis);
                }
                last_err = format!("normal form mismatch {:.3e}", err);
            }
            Err(e) => last_err = e.to_string(),
        }
    }
    Err(Error::Numeric(format!("frame adaptation failed: {}", last_err)))
}

fn adapt_from_start(u: &SymTensor3<f64>, start: &[f64; 5]) -> Result<Vec<Vec<f64>>> {
    let v0 = to_vec5(start).normalize();
    let mut w = to_vec5(&[0.3, -0.5, 0.9, 0.2, -0.4]);
    w -= v0 * v0.dot(&w);
    let w = w.normalize();
    let point = |t: f64| v0 * (std::f64::consts::PI * t).cos() + w * (std::f64::consts::PI * t).sin();
    let f = |t: f64| upsilon_map_na(u, &point(t)).determinant();
    let (mut lo, mut hi) = (0.0, 1.0);
    let (mut flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        hi = lo;
    } else if flo.signum() == fhi.signum() {
        return Err(Error::Numeric("determinant has no sign change on the arc".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm.abs() < 1e-15 || hi - lo < 1e-17 {
            lo = mid;
            hi = mid;
            break;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    let e2 = point(0.5 * (lo + hi)).normalize();
    let m2 = upsilon_map_na(u, &e2);
    let eig = SymmetricEigen::new(m2);
    let mut order: Vec<usize> = (0..5).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .abs()
            .partial_cmp(&eig.eigenvalues[b].abs())
            .expect("finite eigenvalues")
    });
    let gap = eig.eigenvalues[order[1]].abs();
    if gap < 1e-6 {
        return Err(Error::Numeric(format!(
            "kernel of Υ_e2 is degenerate (second eigenvalue {:.3e})",
            gap
        )));
    }
    let e4: Vector5<f64> = eig.eigenvectors.column(order[0]).into_owned().normalize();
    let e1_raw = m2 * e2;
    if (e1_raw.norm() - 1.0).abs() > 1e-6 {
        return Err(Error::Numeric(format!(
            "|Υ_e2 e2| = {} differs from 1",
            e1_raw.norm()
        )));
    }
    let e1 = e1_raw.normalize();
    // Orthonormal basis (f, h) of the plane orthogonal to e1, e2, e4.
    let mut plane: Vec<Vector5<f64>> = Vec::new();
    let mut candidates: Vec<Vector5<f64>> = (0..5)
        .map(|i| {
            let mut x = Vector5::zeros();
            x[i] = 1.0;
            for q in [&e1, &e2, &e4] {
                x -= *q * q.dot(&x);
            }
            x
        })
        .collect();
    while plane.len() < 2 {
        candidates.sort_by(|a, b| b.norm().partial_cmp(&a.norm()).expect("finite"));
        let x = candidates.remove(0).normalize();
        for c in candidates.iter_mut() {
            *c -= x * x.dot(c);
        }
        plane.push(x);
    }
    let (f, h) = (plane[0], plane[1]);
    let p = f.dot(&(m2 * f));
    let q = f.dot(&(m2 * h));
    let c = (p * p + q * q).sqrt();
    if c < 1e-6 {
        return Err(Error::Numeric("Υ_e2 vanishes on the complementary plane".into()));
    }
    // Eigenvectors of [[p, q], [q, −p]] for ±c.
    let theta = 0.5 * q.atan2(p);
    let up = f * theta.cos() + h * theta.sin();
    let um = -f * theta.sin() + h * theta.cos();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut e3 = (up + um) * s;
    let mut e5 = (up - um) * s;
    let mut e4 = e4;
    let b = {
        let m4 = upsilon_map_na(u, &e4);
        e5.dot(&(m4 * e5))
    };
    if b < 0.0 {
        e3 = -e3;
        e4 = -e4;
        e5 = -e5;
    }
    Ok([e1, e2, e3, e4, e5]
        .iter()
        .map(|v| v.as_slice().to_vec())
        .collect())
}

/// The basis `(E₁, E₂, E₃)` of the stabilizer algebra so(3) ⊂ so(5).
pub fn so3_basis<T: Field>() -> [Matrix<T>; 3] {
    let r3 = T::sqrt3();
    let anti = |entries: &[(usize, usize, T)]| {
        let mut m = Matrix::zeros(5, 5);
        for (i, j, v) in entries {
            m[(*i, *j)] = v.clone();
            m[(*j, *i)] = -v.clone();
        }
        m
    };
    let one = T::one();
    [
        anti(&[(0, 4, r3.clone()), (1, 2, one.clone()), (3, 4, one.clone())]),
        anti(&[(0, 2, r3), (1, 4, one.clone()), (2, 3, one.clone())]),
        anti(&[(1, 3, T::from_int(2)), (2, 4, one)]),
    ]
}

/// The antisymmetric unit matrix `f_pq` with `(p,q) = 1`, `(q,p) = −1`.
pub fn unit_antisymmetric<T: Field>(p: usize, q: usize) -> Matrix<T> {
    let mut m = Matrix::zeros(5, 5);
    m[(p, q)] = T::one();
    m[(q, p)] = -T::one();
    m
}

/// The linear system `Υ_ljk Xˡᵢ + Υ_ilk Xˡⱼ + Υ_ijl Xˡₖ = 0` for a general
/// `X ∈ gl(5)`: one row per `i ≤ j ≤ k` (35), one column per entry `X[l][i]`
/// at `5l + i` (25).
pub fn stabilizer_system<T: Field>(u: &SymTensor3<T>) -> Matrix<T> {
    let mut rows = Vec::new();
    for i in 0..5 {
        for j in i..5 {
            for k in j..5 {
                let mut row = vec![T::zero(); 25];
                for l in 0..5 {
                    for (col, coef) in [
                        (5 * l + i, u.get(l, j, k)),
                        (5 * l + j, u.get(i, l, k)),
                        (5 * l + k, u.get(i, j, l)),
                    ] {
                        row[col] = row[col].clone() + coef.clone();
                    }
                }
                rows.push(row);
            }
        }
    }
    Matrix::from_rows(rows).expect("rectangular")
}

/// Basis of the antisymmetric solutions of the stabilizer equation.
pub fn stabilizer<T: Field>(u: &SymTensor3<T>, tol: f64) -> Vec<Matrix<T>> {
    let full = stabilizer_system(u);
    let gens: Vec<Matrix<T>> = pairs(5)
        .into_iter()
        .map(|(p, q)| unit_antisymmetric(p, q))
        .collect();
    let basis_cols: Vec<Vec<T>> = gens.iter().map(|g| g.as_slice().to_vec()).collect();
    let embed = Matrix::from_cols(&basis_cols).expect("25x10");
    let restricted = full.mul(&embed).expect("35x10");
    restricted
        .nullspace(tol)
        .into_iter()
        .map(|x| {
            gens.iter()
                .zip(&x)
                .fold(Matrix::zeros(5, 5), |acc, (g, c)| {
                    acc.add(&g.scale(c)).expect("5x5")
                })
        })
        .collect()
}

/// The 5×5 matrix of `ρ(h): A ↦ σ⁻¹(h σ(A) hᵀ)` for `h ∈ SO(3)`.
///
/// Fails when `h` is not special orthogonal within `tol`.
pub fn rho_matrix<T: Field>(h: &Matrix<T>, tol: f64) -> Result<Matrix<T>> {
    if h.rows() != 3 || h.cols() != 3 {
        return Err(Error::dimension("rho expects a 3x3 matrix"));
    }
    let gram = h.transpose().mul(h)?.sub(&Matrix::identity(3))?;
    let det = h.det()? - T::one();
    if !gram.is_negligible(tol) || !det.is_negligible(tol) {
        return Err(Error::argument("h is not in SO(3)"));
    }
    let ht = h.transpose();
    let cols: Vec<Vec<T>> = (0..5)
        .map(|j| {
            let mut e = vec![T::zero(); 5];
            e[j] = T::one();
            let m = h.mul(&sigma_embed(&e))?.mul(&ht)?;
            Ok(sigma_inverse(&m).to_vec())
        })
        .collect::<Result<_>>()?;
    Matrix::from_cols(&cols)
}

/// `ρ(h)A`.
pub fn rho_act<T: Field>(h: &Matrix<T>, a: &[T], tol: f64) -> Result<Vec<T>> {
    rho_matrix(h, tol)?.apply(a)
}

/// Rotation `exp(x·X)` for an antisymmetric 3×3 generator `X`, by the
/// Rodrigues formula.
pub fn rotation3(x: f64, gen: &Matrix<f64>) -> Matrix<f64> {
    let w = [gen[(2, 1)], gen[(0, 2)], gen[(1, 0)]];
    let theta = x * (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
    if theta == 0.0 {
        return Matrix::identity(3);
    }
    let k = gen.scale(&(x / theta));
    let k2 = k.mul(&k).expect("3x3");
    Matrix::identity(3)
        .add(&k.scale(&theta.sin()))
        .and_then(|m| m.add(&k2.scale(&(1.0 - theta.cos()))))
        .expect("3x3")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::QSqrt3;

    use num_traits::{One, Zero};

    type Q = QSqrt3;

    fn e(i: usize) -> Vec<Q> {
        let mut v = vec![Q::zero(); 5];
        v[i] = Q::one();
        v
    }

    #[test]
    fn sigma_examples() {
        let s = Q::one() / Q::sqrt3();
        assert_eq!(
            sigma_embed(&e(0)),
            Matrix::diag(&[s.clone(), s.clone(), Q::from_int(-2) * s])
        );
        let m = sigma_embed(&e(1));
        assert_eq!(m[(0, 1)], Q::from_int(1));
        assert_eq!(m[(1, 0)], Q::from_int(1));
        assert!(sigma_embed(&vec![Q::zero(); 5]).is_zero());
    }

    #[test]
    fn sigma_inverse_round_trips() {
        let a: Vec<Q> = (1..=5).map(|i| Q::from_ratio(i, 7)).collect();
        assert_eq!(sigma_inverse(&sigma_embed(&a)).to_vec(), a);
    }

    #[test]
    fn upsilon_map_examples() {
        let u = standard_upsilon::<Q>();
        let nf = normal_form_matrices::<Q>();
        for j in 0..5 {
            assert_eq!(u.upsilon_map(&e(j)), nf[j], "e{}", j + 1);
        }
    }

    #[test]
    fn char_poly_of_e1() {
        let c = char_poly(&e(0));
        assert_eq!(c[1], Q::one());
        assert_eq!(c[0], Q::from_parts(0, 1, -2, 9));
        assert_eq!(char_poly(&vec![Q::zero(); 5]), [Q::zero(), Q::zero(), Q::zero(), -Q::one()]);
    }

    #[test]
    fn perturbed_tensor_fails_cubic_identity() {
        let mut entries = standard_upsilon::<Q>().entries();
        for x in entries.iter_mut() {
            if (x.0, x.1, x.2) == (0, 1, 1) {
                x.3 = x.3.clone() + Q::from_ratio(1, 10);
            }
        }
        let check = verify_so3_structure(&SymTensor3::from_entries(&entries).unwrap(), 0.0);
        assert!(!check.cubic_identity);
        assert!(!check.passed());
    }

    #[test]
    fn rotation_is_orthogonal() {
        let gen = Matrix::from_rows(vec![
            vec![0.0, -0.3, 0.5],
            vec![0.3, 0.0, -0.2],
            vec![-0.5, 0.2, 0.0],
        ])
        .unwrap();
        let r = rotation3(1.3, &gen);
        let err = r.transpose().mul(&r).unwrap().sub(&Matrix::identity(3)).unwrap();
        assert!(err.max_abs() < 1e-14);
        assert!((r.det().unwrap() - 1.0).abs() < 1e-14);
    }
}
