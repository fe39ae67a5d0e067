//! The operators Υ̂, Υ̌, Ὺ, Ῡ and Υ′ and the SO(3)-irreducible
//! decompositions they induce on `⊗²ℝ⁵`, `Λ²ℝ⁵⊗ℝ⁵` and the curvature space
//! `so(3)⊗Λ²ℝ⁵`.
//!
//! Two-tensors are 5×5 [`Matrix`] values. A 2-form `F = Σ_{i<j} F_ij θ^ij`
//! corresponds to the antisymmetric matrix with the same upper triangle.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{pairs, sorted_mask, triples, Form, BASE_DIM};
use crate::linalg::{spectral_projector, Matrix};
use crate::scalar::Field;
use crate::upsilon::{so3_basis, standard_upsilon, SymTensor3};

/// Eigenvalues of Υ̂ on `⊗²ℝ⁵` in the order `⊙²₁, Λ²₃, Λ²₇, ⊙²₅, ⊙²₉`.
pub const HAT_SPECTRUM: [i64; 5] = [14, 7, -8, -3, 4];

/// Dimensions of the Υ̂ eigenspaces, in the order of [`HAT_SPECTRUM`].
pub const HAT_DIMENSIONS: [usize; 5] = [1, 3, 7, 5, 9];

/// `Υ̂(W)_ik = 4 Υ_ijm Υ_klm W_jl`.
pub fn upsilon_hat<T: Field>(w: &Matrix<T>) -> Matrix<T> {
    let u = standard_upsilon::<T>();
    let four = T::from_int(4);
    Matrix::from_fn(5, 5, |i, k| {
        let mut s = T::zero();
        for j in 0..5 {
            for l in 0..5 {
                if w[(j, l)].is_zero() {
                    continue;
                }
                let mut c = T::zero();
                for m in 0..5 {
                    let a = u.get(i, j, m);
                    let b = u.get(k, l, m);
                    if !a.is_zero() && !b.is_zero() {
                        c = c + a.clone() * b.clone();
                    }
                }
                if !c.is_zero() {
                    s = s + c * w[(j, l)].clone();
                }
            }
        }
        s * four.clone()
    })
}

/// Υ̂ as a 25×25 matrix acting on row-major vectorized two-tensors.
pub fn upsilon_hat_matrix<T: Field>() -> Matrix<T> {
    let mut cols = Vec::with_capacity(25);
    for p in 0..25 {
        let mut w = Matrix::zeros(5, 5);
        w[(p / 5, p % 5)] = T::one();
        cols.push(upsilon_hat(&w).as_slice().to_vec());
    }
    Matrix::from_cols(&cols).expect("25 columns of length 25")
}

/// The five spectral projectors of Υ̂ on `⊗²ℝ⁵`.
#[derive(Clone, Debug)]
pub struct T2Projectors<T> {
    hat: Matrix<T>,
    projectors: [Matrix<T>; 5],
}

impl<T: Field> T2Projectors<T> {
    /// Builds the projectors from the known spectrum of Υ̂.
    pub fn new() -> Self {
        let hat = upsilon_hat_matrix::<T>();
        let spectrum: Vec<T> = HAT_SPECTRUM.iter().map(|&x| T::from_int(x)).collect();
        let projectors = std::array::from_fn(|a| {
            spectral_projector(&hat, &spectrum, &spectrum[a]).expect("eigenvalue is in spectrum")
        });
        T2Projectors { hat, projectors }
    }

    /// Υ̂ as a 25×25 matrix.
    pub fn hat(&self) -> &Matrix<T> {
        &self.hat
    }

    /// Projector number `a` in the order of [`HAT_SPECTRUM`].
    pub fn projector(&self, a: usize) -> &Matrix<T> {
        &self.projectors[a]
    }

    /// All five projectors.
    pub fn all(&self) -> &[Matrix<T>; 5] {
        &self.projectors
    }

    /// Applies projector `a` to a two-tensor.
    pub fn project(&self, a: usize, w: &Matrix<T>) -> Matrix<T> {
        let v = self.projectors[a].apply(w.as_slice()).expect("25-vector");
        Matrix::from_fn(5, 5, |i, j| v[5 * i + j].clone())
    }

    /// Splits a two-tensor into its five irreducible parts.
    pub fn decompose(&self, w: &Matrix<T>) -> T2Decomposition<T> {
        T2Decomposition {
            c1: self.project(0, w),
            c3: self.project(1, w),
            c7: self.project(2, w),
            c5: self.project(3, w),
            c9: self.project(4, w),
        }
    }
}

impl<T: Field> Default for T2Projectors<T> {
    fn default() -> Self {
        T2Projectors::new()
    }
}

/// The parts of a two-tensor in `⊙²₁ ⊕ Λ²₃ ⊕ Λ²₇ ⊕ ⊙²₅ ⊕ ⊙²₉`.
#[derive(Clone, Debug, PartialEq)]
pub struct T2Decomposition<T> {
    /// Multiple of the metric.
    pub c1: Matrix<T>,
    /// so(3) part.
    pub c3: Matrix<T>,
    /// Part in the complement 𝔫 of so(3) in Λ².
    pub c7: Matrix<T>,
    /// Part in the Υ̌-eigenspace of eigenvalue 14.
    pub c5: Matrix<T>,
    /// Part in the kernel of Ὺ orthogonal to the metric.
    pub c9: Matrix<T>,
}

impl<T: Field> T2Decomposition<T> {
    /// Parts in the order of [`HAT_SPECTRUM`].
    pub fn parts(&self) -> [&Matrix<T>; 5] {
        [&self.c1, &self.c3, &self.c7, &self.c5, &self.c9]
    }

    /// Sum of the parts.
    pub fn sum(&self) -> Matrix<T> {
        self.parts()
            .iter()
            .skip(1)
            .fold(self.c1.clone(), |acc, p| acc.add(p).expect("5x5"))
    }
}

/// Splits a two-tensor into its five irreducible parts.
pub fn decompose_t2<T: Field>(w: &Matrix<T>) -> T2Decomposition<T> {
    T2Projectors::new().decompose(w)
}

/// `Ὺ(S)_i = Υ_ijk S_jk`.
pub fn upsilon_grave<T: Field>(s: &Matrix<T>) -> Vec<T> {
    let u = standard_upsilon::<T>();
    (0..5)
        .map(|i| {
            let mut acc = T::zero();
            for j in 0..5 {
                for k in 0..5 {
                    let c = u.get(i, j, k);
                    if !c.is_zero() && !s[(j, k)].is_zero() {
                        acc = acc + c.clone() * s[(j, k)].clone();
                    }
                }
            }
            acc
        })
        .collect()
}

/// `Ῡ(v) = Υ_v`.
pub fn upsilon_bar<T: Field>(v: &[T]) -> Matrix<T> {
    standard_upsilon::<T>().upsilon_map(v)
}

/// `Υ̌ = 4 Ῡ∘Ὺ`.
pub fn upsilon_check<T: Field>(s: &Matrix<T>) -> Matrix<T> {
    upsilon_bar(&upsilon_grave(s)).scale(&T::from_int(4))
}

/// Antisymmetric matrix of a 2-form on the five base directions.
pub fn two_form_matrix<T: Field>(f: &Form<T>) -> Result<Matrix<T>> {
    if f.degree() != 2 || !f.is_horizontal() {
        return Err(Error::argument("expected a horizontal 2-form"));
    }
    let mut m = Matrix::zeros(5, 5);
    for (i, j) in pairs(5) {
        let c = f.coeff(&[i, j]);
        m[(i, j)] = c.clone();
        m[(j, i)] = -c;
    }
    Ok(m)
}

/// The 2-form `Σ_{i<j} F_ij θ^ij` on a coframe of dimension `dim`.
pub fn matrix_two_form<T: Field>(dim: usize, m: &Matrix<T>) -> Form<T> {
    let terms: Vec<(T, usize, usize)> = pairs(5)
        .into_iter()
        .map(|(i, j)| (m[(i, j)].clone(), i, j))
        .collect();
    Form::two_form(dim, &terms)
}

/// The product `(F|F′) = *(Υ̂(F)∧*F′)` on 2-forms, given as antisymmetric
/// matrices; it has signature (3,7).
pub fn product37<T: Field>(f: &Matrix<T>, g: &Matrix<T>) -> T {
    frobenius_dot(&upsilon_hat(f), g) * T::from_ratio(1, 2)
}

/// The Killing-type product `k(F,F′) = −6 *(F∧*F′)` on 2-forms.
pub fn killing_product<T: Field>(f: &Matrix<T>, g: &Matrix<T>) -> T {
    frobenius_dot(f, g) * T::from_int(-3)
}

/// `Σ_ij A_ij B_ij`.
pub fn frobenius_dot<T: Field>(a: &Matrix<T>, b: &Matrix<T>) -> T {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// An element `ξ_ijk` of `Λ²ℝ⁵⊗ℝ⁵`, antisymmetric in `(i, j)`.
///
/// For a connection, `ξ_ijk` is the coefficient of `θᵏ` in the
/// connection form `ωⁱⱼ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnTensor<T> {
    data: Vec<T>,
}

/// Position of `(i, j, k)` with `i < j` in the 50-dimensional coordinate
/// vector of `Λ²ℝ⁵⊗ℝ⁵`.
pub fn conn_index(i: usize, j: usize, k: usize) -> usize {
    5 * crate::exterior::pair_index(5, i, j) + k
}

impl<T: Field> ConnTensor<T> {
    /// The zero tensor.
    pub fn zero() -> Self {
        ConnTensor {
            data: vec![T::zero(); 125],
        }
    }

    /// Builds the tensor from its values on `i < j`; the rest follows from
    /// antisymmetry.
    pub fn from_fn(f: impl Fn(usize, usize, usize) -> T) -> Self {
        let mut out = ConnTensor::zero();
        for (i, j) in pairs(5) {
            for k in 0..5 {
                out.set(i, j, k, f(i, j, k));
            }
        }
        out
    }

    /// Builds the tensor from its 50 coordinates.
    pub fn from_vector(v: &[T]) -> Result<Self> {
        if v.len() != 50 {
            return Err(Error::dimension("a connection tensor has 50 coordinates"));
        }
        Ok(ConnTensor::from_fn(|i, j, k| v[conn_index(i, j, k)].clone()))
    }

    /// The tensor `Σ_I (E_I)_ij c^I_k` of a so(3)-valued 1-form with
    /// coefficients `c[I][k]`.
    pub fn from_so3(c: &[Vec<T>; 3]) -> Self {
        let e = so3_basis::<T>();
        ConnTensor::from_fn(|i, j, k| {
            (0..3).fold(T::zero(), |acc, a| {
                acc + e[a][(i, j)].clone() * c[a][k].clone()
            })
        })
    }

    /// The totally antisymmetric tensor of a base 3-form.
    pub fn from_three_form(f: &Form<T>) -> Result<Self> {
        if f.degree() != 3 || !f.is_horizontal() {
            return Err(Error::argument("expected a horizontal 3-form"));
        }
        Ok(ConnTensor::from_fn(|i, j, k| {
            match sorted_mask(&[i, j, k]) {
                Some((m, s)) => {
                    let c = f.coeff_mask(m);
                    if s > 0 {
                        c
                    } else {
                        -c
                    }
                }
                None => T::zero(),
            }
        }))
    }

    fn set(&mut self, i: usize, j: usize, k: usize, v: T) {
        self.data[25 * j + 5 * i + k] = -v.clone();
        self.data[25 * i + 5 * j + k] = v;
    }

    /// `ξ_ijk`.
    pub fn get(&self, i: usize, j: usize, k: usize) -> T {
        self.data[25 * i + 5 * j + k].clone()
    }

    /// The 50 coordinates, indexed by [`conn_index`].
    pub fn to_vector(&self) -> Vec<T> {
        let mut v = Vec::with_capacity(50);
        for (i, j) in pairs(5) {
            for k in 0..5 {
                v.push(self.get(i, j, k));
            }
        }
        v
    }

    /// The totally antisymmetric part as a 3-form `Σ_{i<j<k} ξ_[ijk] θ^ijk`
    /// on a coframe of dimension `dim`.
    pub fn skew_part(&self, dim: usize) -> Form<T> {
        let third = T::from_ratio(1, 3);
        let mut out = Form::zero(dim, 3);
        for (i, j, k) in triples(5) {
            let c = (self.get(i, j, k) + self.get(j, k, i) + self.get(k, i, j)) * third.clone();
            out = out + Form::monomial(dim, &[i, j, k], c);
        }
        out
    }

    /// The 3-form `Σ_{i<j<k} ξ_ijk θ^ijk`, meaningful when `ξ` is totally
    /// antisymmetric.
    pub fn as_three_form(&self, dim: usize) -> Form<T> {
        let mut out = Form::zero(dim, 3);
        for (i, j, k) in triples(5) {
            out = out + Form::monomial(dim, &[i, j, k], self.get(i, j, k));
        }
        out
    }

    /// Sum.
    pub fn add(&self, o: &Self) -> Self {
        ConnTensor {
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }

    /// Difference.
    pub fn sub(&self, o: &Self) -> Self {
        ConnTensor {
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }

    /// Scalar multiple.
    pub fn scale(&self, c: &T) -> Self {
        ConnTensor {
            data: self.data.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }

    /// Squared norm of the 50 coordinates.
    pub fn norm_sq(&self) -> T {
        crate::scalar::norm_sq(&self.to_vector())
    }

    /// Largest coordinate magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(Field::abs_f64).fold(0.0, f64::max)
    }

    /// True when every coordinate is negligible.
    pub fn is_negligible(&self, tol: f64) -> bool {
        self.data.iter().all(|c| c.is_negligible(tol))
    }
}

/// A totally symmetric four-tensor on ℝ⁵, stored on sorted index tuples.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTensor4<T> {
    entries: Vec<T>,
}

/// Sorted quadruples `i ≤ j ≤ k ≤ l` of base indices (70 of them).
pub fn quadruples() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(70);
    for i in 0..5 {
        for j in i..5 {
            for k in j..5 {
                for l in k..5 {
                    out.push([i, j, k, l]);
                }
            }
        }
    }
    out
}

impl<T: Field> SymTensor4<T> {
    /// Entry at an arbitrary index tuple.
    pub fn get(&self, idx: [usize; 4]) -> &T {
        let mut s = idx;
        s.sort_unstable();
        let pos = quadruples().iter().position(|q| *q == s).expect("index in range");
        &self.entries[pos]
    }

    /// Entries on sorted quadruples, in the order of [`quadruples`].
    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    /// True when every entry is negligible.
    pub fn is_negligible(&self, tol: f64) -> bool {
        self.entries.iter().all(|c| c.is_negligible(tol))
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(Field::abs_f64).fold(0.0, f64::max)
    }
}

/// `Υ′(ξ)_ijkl`: the sum over the twelve ordered pairs `(p, q)` of distinct
/// slots of `ξ_{m x_p x_q} Υ_{m x_r x_s}`, where `r, s` are the remaining
/// slots. Its kernel is `so(3)⊗ℝ⁵ ⊕ Λ³ℝ⁵`.
pub fn upsilon_prime<T: Field>(xi: &ConnTensor<T>) -> SymTensor4<T> {
    let u = standard_upsilon::<T>();
    upsilon_prime_with(&u, xi)
}

/// [`upsilon_prime`] for an arbitrary symmetric three-tensor.
pub fn upsilon_prime_with<T: Field>(u: &SymTensor3<T>, xi: &ConnTensor<T>) -> SymTensor4<T> {
    let entries = quadruples()
        .into_iter()
        .map(|x| {
            let mut s = T::zero();
            for p in 0..4 {
                for q in 0..4 {
                    if p == q {
                        continue;
                    }
                    let rest: Vec<usize> = (0..4).filter(|&r| r != p && r != q).collect();
                    for m in 0..5 {
                        let a = xi.get(m, x[p], x[q]);
                        if a.is_zero() {
                            continue;
                        }
                        let b = u.get(m, x[rest[0]], x[rest[1]]);
                        if !b.is_zero() {
                            s = s + a * b.clone();
                        }
                    }
                }
            }
            s
        })
        .collect();
    SymTensor4 { entries }
}

/// Υ′ as a 70×50 matrix.
pub fn upsilon_prime_matrix<T: Field>() -> Matrix<T> {
    let u = standard_upsilon::<T>();
    let cols: Vec<Vec<T>> = (0..50)
        .map(|c| {
            let mut v = vec![T::zero(); 50];
            v[c] = T::one();
            let xi = ConnTensor::from_vector(&v).expect("50 coordinates");
            upsilon_prime_with(&u, &xi).entries
        })
        .collect();
    Matrix::from_cols(&cols).expect("50 columns of length 70")
}

/// Basis of `ker Υ′` as 50-vectors: fifteen vectors `E_I⊗θᵏ` followed by
/// ten vectors spanning `Λ³ℝ⁵`.
pub fn kernel_basis<T: Field>() -> Vec<Vec<T>> {
    let mut out = Vec::with_capacity(25);
    for a in 0..3 {
        for k in 0..5 {
            let mut c: [Vec<T>; 3] = std::array::from_fn(|_| vec![T::zero(); 5]);
            c[a][k] = T::one();
            out.push(ConnTensor::from_so3(&c).to_vector());
        }
    }
    for (i, j, k) in triples(5) {
        let f = Form::monomial(BASE_DIM, &[i, j, k], T::one());
        out.push(
            ConnTensor::from_three_form(&f)
                .expect("base 3-form")
                .to_vector(),
        );
    }
    out
}

/// Splitting of a connection tensor as `ξ = γ + τ + ρ` with `γ` so(3)-valued,
/// `τ` totally antisymmetric and `ρ` orthogonal to both.
///
/// For the Levi-Civita connection of a nearly integrable structure, `γ` is
/// the horizontal part of the characteristic connection and `τ = ½T`.
#[derive(Clone, Debug)]
pub struct ConnectionSplit<T> {
    /// Coefficients `c[I][k]` with `γ = Σ_I E_I ⊗ c^I_k θᵏ`.
    pub gamma_coeffs: [Vec<T>; 3],
    /// The so(3)-valued part.
    pub gamma: ConnTensor<T>,
    /// The totally antisymmetric part.
    pub torsion: ConnTensor<T>,
    /// The part orthogonal to `so(3)⊗ℝ⁵ ⊕ Λ³ℝ⁵`.
    pub remainder: ConnTensor<T>,
}

impl<T: Field> ConnectionSplit<T> {
    /// The torsion 3-form `T = 2τ` on a coframe of dimension `dim`.
    pub fn torsion_form(&self, dim: usize) -> Form<T> {
        self.torsion.as_three_form(dim).scale(&T::from_int(2))
    }
}

/// Splits `ξ` along `so(3)⊗ℝ⁵ ⊕ Λ³ℝ⁵` and its orthogonal complement by
/// least squares on the 25 kernel basis vectors.
///
/// The two kernel summands are not orthogonal to each other, so only the
/// remainder is orthogonal to the rest.
pub fn split_connection<T: Field>(xi: &ConnTensor<T>) -> ConnectionSplit<T> {
    let basis = kernel_basis::<T>();
    let b = Matrix::from_cols(&basis).expect("50x25");
    let bt = b.transpose();
    let gram = bt.mul(&b).expect("25x25");
    let rhs = bt.apply(&xi.to_vector()).expect("25");
    let coeffs = gram
        .solve(&rhs, 0.0)
        .expect("the kernel basis is linearly independent");
    let gamma_coeffs: [Vec<T>; 3] =
        std::array::from_fn(|a| coeffs[5 * a..5 * a + 5].to_vec());
    let gamma = ConnTensor::from_so3(&gamma_coeffs);
    let mut tau = ConnTensor::zero();
    for (n, (i, j, k)) in triples(5).into_iter().enumerate() {
        let f = Form::monomial(BASE_DIM, &[i, j, k], coeffs[15 + n].clone());
        tau = tau.add(&ConnTensor::from_three_form(&f).expect("base 3-form"));
    }
    let remainder = xi.sub(&gamma).sub(&tau);
    ConnectionSplit {
        gamma_coeffs,
        gamma,
        torsion: tau,
        remainder,
    }
}

/// Which irreducible summand of `Λ²ℝ⁵` the dual of a torsion form lies in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TorsionClass {
    /// `T = 0`.
    Zero,
    /// `*T ∈ Λ²₃`.
    PureL3,
    /// `*T ∈ Λ²₇`.
    PureL7,
    /// Both components present.
    Mixed,
}

impl fmt::Display for TorsionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TorsionClass::Zero => "zero",
            TorsionClass::PureL3 => "pure Λ²₃",
            TorsionClass::PureL7 => "pure Λ²₇",
            TorsionClass::Mixed => "mixed Λ²₃⊕Λ²₇",
        })
    }
}

/// The `Λ²₃` and `Λ²₇` components of `*T`, as antisymmetric matrices.
#[derive(Clone, Debug)]
pub struct TorsionType<T> {
    /// Component in `Λ²₃ = so(3)`.
    pub t3: Matrix<T>,
    /// Component in `Λ²₇`.
    pub t7: Matrix<T>,
    /// Classification of `T`.
    pub class: TorsionClass,
}

/// Decomposes `*T` for a base 3-form `T`.
pub fn torsion_type<T: Field>(torsion: &Form<T>, tol: f64) -> Result<TorsionType<T>> {
    torsion_type_with(&T2Projectors::new(), torsion, tol)
}

/// [`torsion_type`] with precomputed projectors.
pub fn torsion_type_with<T: Field>(
    proj: &T2Projectors<T>,
    torsion: &Form<T>,
    tol: f64,
) -> Result<TorsionType<T>> {
    if torsion.degree() != 3 {
        return Err(Error::argument("torsion must be a 3-form"));
    }
    let dual = two_form_matrix(&torsion.hodge_star()?)?;
    let t3 = proj.project(1, &dual);
    let t7 = proj.project(2, &dual);
    let total = dual.frobenius();
    let has3 = is_present(&frobenius_dot(&t3, &t3), total, tol);
    let has7 = is_present(&frobenius_dot(&t7, &t7), total, tol);
    let class = match (has3, has7) {
        (false, false) => TorsionClass::Zero,
        (true, false) => TorsionClass::PureL3,
        (false, true) => TorsionClass::PureL7,
        (true, true) => TorsionClass::Mixed,
    };
    Ok(TorsionType { t3, t7, class })
}

/// Presence test for a component with squared norm `norm_sq` inside an
/// object of norm `total`: exact zero test for exact kinds, relative
/// threshold `tol·total` otherwise.
pub fn is_present<T: Field>(norm_sq: &T, total: f64, tol: f64) -> bool {
    if norm_sq.is_exact() {
        !norm_sq.is_zero()
    } else {
        norm_sq.to_f64().max(0.0).sqrt() > tol * total.max(f64::MIN_POSITIVE)
    }
}

/// A curvature tensor `K_ijkl`, antisymmetric in `(i, j)` and in `(k, l)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvTensor<T> {
    data: Vec<T>,
}

impl<T: Field> CurvTensor<T> {
    /// The zero tensor.
    pub fn zero() -> Self {
        CurvTensor {
            data: vec![T::zero(); 625],
        }
    }

    /// Builds `K` from the matrix of curvature 2-forms `Ωⁱⱼ = Σ_{k<l} K_ijkl θ^kl`.
    pub fn from_forms(omega: &[Vec<Form<T>>]) -> Result<Self> {
        let mut out = CurvTensor::zero();
        for (i, j) in pairs(5) {
            let f = &omega[i][j];
            if !f.is_horizontal() {
                return Err(Error::structure(format!(
                    "curvature component ({}, {}) has vertical legs",
                    i + 1,
                    j + 1
                )));
            }
            for (k, l) in pairs(5) {
                out.set(i, j, k, l, f.coeff(&[k, l]));
            }
        }
        Ok(out)
    }

    /// `K = Σ_I E_I ⊗ rᴵ` for horizontal 2-forms `rᴵ`.
    pub fn from_so3(r: &[Form<T>; 3]) -> Result<Self> {
        let e = so3_basis::<T>();
        let mut omega = vec![vec![Form::zero(r[0].dim(), 2); 5]; 5];
        for (i, j) in pairs(5) {
            omega[i][j] = (0..3).fold(Form::zero(r[0].dim(), 2), |acc, a| {
                acc + r[a].scale(&e[a][(i, j)])
            });
        }
        CurvTensor::from_forms(&omega)
    }

    fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: T) {
        let at = |a: usize, b: usize, c: usize, d: usize| 125 * a + 25 * b + 5 * c + d;
        self.data[at(i, j, k, l)] = v.clone();
        self.data[at(j, i, l, k)] = v.clone();
        self.data[at(j, i, k, l)] = -v.clone();
        self.data[at(i, j, l, k)] = -v;
    }

    /// `K_ijkl`.
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> T {
        self.data[125 * i + 25 * j + 5 * k + l].clone()
    }

    /// Builds the tensor from arbitrary values on `i < j`, `k < l`.
    pub fn from_fn(f: impl Fn(usize, usize, usize, usize) -> T) -> Self {
        let mut out = CurvTensor::zero();
        for (i, j) in pairs(5) {
            for (k, l) in pairs(5) {
                out.set(i, j, k, l, f(i, j, k, l));
            }
        }
        out
    }

    /// Difference.
    pub fn sub(&self, o: &Self) -> Self {
        CurvTensor {
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }

    /// The Ricci-type contraction `k_jl = Σ_i K_ijil`.
    pub fn contraction(&self) -> Matrix<T> {
        Matrix::from_fn(5, 5, |j, l| {
            (0..5).fold(T::zero(), |acc, i| acc + self.get(i, j, i, l))
        })
    }

    /// The 4-form `Σ_{i<j<k<l} K_[ijkl] θ^ijkl` on the base.
    pub fn alternation(&self) -> Form<T> {
        let mut out = Form::zero(BASE_DIM, 4);
        let third = T::from_ratio(1, 3);
        for i in 0..5 {
            for j in i + 1..5 {
                for k in j + 1..5 {
                    for l in k + 1..5 {
                        // With the pair antisymmetries, the 24 terms reduce
                        // to the six choices of the first index pair.
                        let c = (self.get(i, j, k, l) - self.get(i, k, j, l)
                            + self.get(i, l, j, k)
                            + self.get(k, l, i, j)
                            - self.get(j, l, i, k)
                            + self.get(j, k, i, l))
                            * third.clone()
                            * T::from_ratio(1, 2);
                        out = out + Form::monomial(BASE_DIM, &[i, j, k, l], c);
                    }
                }
            }
        }
        out
    }

    /// Squared norm `Σ_{i<j, k<l} K_ijkl²`.
    pub fn norm_sq(&self) -> T {
        let mut s = T::zero();
        for (i, j) in pairs(5) {
            for (k, l) in pairs(5) {
                let c = self.get(i, j, k, l);
                if !c.is_zero() {
                    s = s + c.clone() * c;
                }
            }
        }
        s
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(Field::abs_f64).fold(0.0, f64::max)
    }

    /// True when every entry is negligible.
    pub fn is_negligible(&self, tol: f64) -> bool {
        self.data.iter().all(|c| c.is_negligible(tol))
    }

    /// True when every `(i, j)` slice lies in `so(3) = Λ²₃`.
    pub fn is_so3_valued(&self, tol: f64) -> bool {
        let proj = T2Projectors::<T>::new();
        pairs(5).into_iter().all(|(k, l)| {
            let slice = Matrix::from_fn(5, 5, |i, j| self.get(i, j, k, l));
            proj.project(2, &slice).is_negligible(tol)
        })
    }
}

/// The six irreducible curvature components.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CurvatureComponent {
    /// `⊙²₁`, the scalar part.
    S1,
    /// `Λ²₃`.
    L3,
    /// `Λ²₇`.
    L7,
    /// `⊙²₅`.
    S5,
    /// `⊙²₉`.
    S9,
    /// `Λ¹₅`, dual to the totally antisymmetric part `K_[ijkl]`.
    L1,
}

impl CurvatureComponent {
    /// All six components in reporting order.
    pub const ALL: [CurvatureComponent; 6] = [
        CurvatureComponent::S1,
        CurvatureComponent::L3,
        CurvatureComponent::L7,
        CurvatureComponent::S5,
        CurvatureComponent::S9,
        CurvatureComponent::L1,
    ];
}

impl fmt::Display for CurvatureComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CurvatureComponent::S1 => "⊙²₁",
            CurvatureComponent::L3 => "Λ²₃",
            CurvatureComponent::L7 => "Λ²₇",
            CurvatureComponent::S5 => "⊙²₅",
            CurvatureComponent::S9 => "⊙²₉",
            CurvatureComponent::L1 => "Λ¹₅",
        })
    }
}

/// Irreducible components of a so(3)-valued curvature tensor.
#[derive(Clone, Debug)]
pub struct CurvatureDecomposition<T> {
    /// Trace `k_ii` of the contraction.
    pub scalar: T,
    /// `Λ²₃` part of the antisymmetric contraction.
    pub l3: Matrix<T>,
    /// `Λ²₇` part of the antisymmetric contraction.
    pub l7: Matrix<T>,
    /// `⊙²₅` part of the traceless symmetric contraction.
    pub s5: Matrix<T>,
    /// `⊙²₉` part of the traceless symmetric contraction.
    pub s9: Matrix<T>,
    /// `*K_[ijkl]` as a covector.
    pub l1: Vec<T>,
    /// Presence flags in the order of [`CurvatureComponent::ALL`].
    pub present: [bool; 6],
}

impl<T: Field> CurvatureDecomposition<T> {
    /// The components flagged present.
    pub fn components(&self) -> Vec<CurvatureComponent> {
        CurvatureComponent::ALL
            .iter()
            .zip(self.present)
            .filter(|(_, p)| *p)
            .map(|(c, _)| *c)
            .collect()
    }

    /// True when exactly the listed components are present.
    pub fn has_exactly(&self, comps: &[CurvatureComponent]) -> bool {
        CurvatureComponent::ALL
            .iter()
            .zip(self.present)
            .all(|(c, p)| p == comps.contains(c))
    }

    /// Presence flag of one component.
    pub fn has(&self, c: CurvatureComponent) -> bool {
        let i = CurvatureComponent::ALL.iter().position(|x| *x == c).expect("listed");
        self.present[i]
    }

    /// Component norms in the order of [`CurvatureComponent::ALL`].
    pub fn norms(&self) -> [f64; 6] {
        let m = |x: &Matrix<T>| x.frobenius();
        [
            self.scalar.abs_f64(),
            m(&self.l3),
            m(&self.l7),
            m(&self.s5),
            m(&self.s9),
            crate::scalar::norm_f64(&self.l1),
        ]
    }

    /// Type string such as `⊙²₁⊕⊙²₉`, or `0` for flat curvature.
    pub fn type_string(&self) -> String {
        let c = self.components();
        if c.is_empty() {
            "0".into()
        } else {
            c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("⊕")
        }
    }
}

/// Decomposes a curvature tensor into its six irreducible components.
pub fn decompose_curvature<T: Field>(k: &CurvTensor<T>, tol: f64) -> CurvatureDecomposition<T> {
    decompose_curvature_with(&T2Projectors::new(), k, tol)
}

/// [`decompose_curvature`] with precomputed projectors.
pub fn decompose_curvature_with<T: Field>(
    proj: &T2Projectors<T>,
    k: &CurvTensor<T>,
    tol: f64,
) -> CurvatureDecomposition<T> {
    let c = k.contraction();
    let anti = c.sub(&c.transpose()).expect("5x5").scale(&T::from_ratio(1, 2));
    let sym = c.add(&c.transpose()).expect("5x5").scale(&T::from_ratio(1, 2));
    let scalar = c.trace();
    let traceless = sym
        .sub(&Matrix::identity(5).scale(&(scalar.clone() * T::from_ratio(1, 5))))
        .expect("5x5");
    let l3 = proj.project(1, &anti);
    let l7 = proj.project(2, &anti);
    let s5 = proj.project(3, &traceless);
    let s9 = proj.project(4, &traceless);
    let star = k.alternation().hodge_star().expect("base 4-form");
    let l1: Vec<T> = (0..5).map(|i| star.coeff(&[i])).collect();
    let total = k.norm_sq().to_f64().max(0.0).sqrt();
    let present = [
        is_present(&(scalar.clone() * scalar.clone()), total, tol),
        is_present(&frobenius_dot(&l3, &l3), total, tol),
        is_present(&frobenius_dot(&l7, &l7), total, tol),
        is_present(&frobenius_dot(&s5, &s5), total, tol),
        is_present(&frobenius_dot(&s9, &s9), total, tol),
        is_present(&crate::scalar::norm_sq(&l1), total, tol),
    ];
    CurvatureDecomposition {
        scalar,
        l3,
        l7,
        s5,
        s9,
        l1,
        present,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::QSqrt3;
    use num_traits::{One, Zero};

    type Q = QSqrt3;

    #[test]
    fn hat_of_metric_and_e1() {
        let g = Matrix::<Q>::identity(5);
        assert_eq!(upsilon_hat(&g), g.scale(&Q::from_int(14)));
        let e1 = so3_basis::<Q>()[0].clone();
        assert_eq!(upsilon_hat(&e1), e1.scale(&Q::from_int(7)));
    }

    #[test]
    fn projector_traces() {
        let p = T2Projectors::<Q>::new();
        for (a, d) in HAT_DIMENSIONS.iter().enumerate() {
            assert_eq!(p.projector(a).trace(), Q::from_int(*d as i64));
        }
    }

    #[test]
    fn kappa3_is_so3() {
        let k3 = so3_basis::<Q>()[2].clone();
        let d = decompose_t2(&k3);
        assert_eq!(d.c3, k3);
        assert!(d.c7.is_zero() && d.c1.is_zero());
    }

    #[test]
    fn grave_of_metric_vanishes() {
        let v = upsilon_grave(&Matrix::<Q>::identity(5));
        assert!(v.iter().all(Zero::is_zero));
    }

    #[test]
    fn so3_and_skew_in_kernel_of_prime() {
        let mut c: [Vec<Q>; 3] = std::array::from_fn(|_| vec![Q::zero(); 5]);
        c[0][3] = Q::one();
        assert!(upsilon_prime(&ConnTensor::from_so3(&c)).is_negligible(0.0));
        let f = Form::monomial(5, &[0, 1, 3], Q::one());
        let xi = ConnTensor::from_three_form(&f).unwrap();
        assert!(upsilon_prime(&xi).is_negligible(0.0));
    }

    #[test]
    fn split_of_pure_parts() {
        let mut c: [Vec<Q>; 3] = std::array::from_fn(|_| vec![Q::zero(); 5]);
        c[1][3] = Q::one();
        let xi = ConnTensor::from_so3(&c);
        let s = split_connection(&xi);
        assert_eq!(s.gamma, xi);
        assert!(s.torsion.is_negligible(0.0) && s.remainder.is_negligible(0.0));

        let f = Form::monomial(5, &[0, 1, 3], Q::one());
        let xi = ConnTensor::from_three_form(&f).unwrap();
        let s = split_connection(&xi);
        assert_eq!(s.torsion, xi);
        assert!(s.gamma.is_negligible(0.0));
    }

    #[test]
    fn alternation_of_a_pure_four_form() {
        // K_ijkl = totally antisymmetric unit on (1,2,3,4) is its own
        // alternation.
        let k = CurvTensor::<Q>::from_fn(|i, j, k, l| {
            match sorted_mask(&[i, j, k, l]) {
                Some((m, s)) if m == 0b1111 => Q::from_int(s as i64),
                _ => Q::zero(),
            }
        });
        assert_eq!(k.alternation().coeff(&[0, 1, 2, 3]), Q::one());
    }
}
