//! The twistor bundle of a homogeneous model: exact fiber calculus in the
//! affine coordinate `z` of the 2-sphere fiber, the adapted coframe
//! `(h̃, ũ, ñ₁, ñ₂)`, the four almost CR structures and the G₂ 3-form.
//!
//! Fiber-dependent coefficients are [`FiberFunction`]s `P(z, z̄)/(1+zz̄)^k`.
//! Differentiation in `z` and `z̄` stays inside this class, so every identity
//! below is checked as an identity of rational functions, for all `z` at
//! once. Float-kind models run through the same algebra with float
//! coefficients; their vanishing tests are done on seeded samples of `z`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::connection::{characteristic_connection, curvature, kappa_forms};
use crate::error::{Error, Result};
use crate::exterior::{mask_indices, CoframeModel, Form, BASE_DIM};
use crate::linalg::Matrix;
use crate::repr::{decompose_curvature, torsion_type, CurvatureComponent, TorsionClass};
use crate::scalar::Field;

type Mono = (u32, u32);
type Poly<T> = BTreeMap<Mono, Complex<T>>;

fn poly_insert<T: Field>(p: &mut Poly<T>, m: Mono, c: Complex<T>) {
    if c.is_zero() {
        return;
    }
    match p.remove(&m) {
        None => {
            p.insert(m, c);
        }
        Some(old) => {
            let s = old + c;
            if !s.is_zero() {
                p.insert(m, s);
            }
        }
    }
}

fn poly_mul<T: Field>(a: &Poly<T>, b: &Poly<T>) -> Poly<T> {
    let mut out = Poly::new();
    for ((a1, b1), c1) in a {
        for ((a2, b2), c2) in b {
            poly_insert(&mut out, (a1 + a2, b1 + b2), c1.clone() * c2.clone());
        }
    }
    out
}

fn binomial<T: Field>(n: u32, j: u32) -> T {
    let mut acc = 1i64;
    for i in 0..j {
        acc = acc * (n - i) as i64 / (i + 1) as i64;
    }
    T::from_int(acc)
}

/// `(1+zz̄)^n`.
fn one_plus_w_pow<T: Field>(n: u32) -> Poly<T> {
    let mut out = Poly::new();
    for j in 0..=n {
        poly_insert(&mut out, (j, j), Complex::new(binomial(n, j), T::zero()));
    }
    out
}

/// Divides by `1+zz̄` when the division is exact.
///
/// Monomials `z^a z̄^b` with fixed `a − b` form a polynomial in `w = zz̄`;
/// the numerator is divisible iff each of these vanishes at `w = −1`.
fn poly_div_one_plus_w<T: Field>(p: &Poly<T>) -> Option<Poly<T>> {
    let mut groups: BTreeMap<i64, BTreeMap<u32, Complex<T>>> = BTreeMap::new();
    for ((a, b), c) in p {
        groups
            .entry(*a as i64 - *b as i64)
            .or_default()
            .insert((*a).min(*b), c.clone());
    }
    let mut out = Poly::new();
    for (d, q) in groups {
        let top = *q.keys().next_back().expect("nonempty group");
        let coef = |j: u32| q.get(&j).cloned().unwrap_or_else(Complex::zero);
        let (oa, ob) = (d.max(0) as u32, (-d).max(0) as u32);
        let mut prev: Complex<T> = Complex::zero();
        for j in 0..top {
            let r = coef(j) - prev;
            poly_insert(&mut out, (j + oa, j + ob), r.clone());
            prev = r;
        }
        if !(coef(top) - prev).is_zero() {
            return None;
        }
    }
    Some(out)
}

/// A function `P(z, z̄)/(1+zz̄)^k` on the fiber, with `P` a complex
/// polynomial in the commuting variables `z` and `z̄`.
#[derive(Clone)]
pub struct FiberFunction<T> {
    num: Poly<T>,
    k: u32,
}

impl<T: Field> FiberFunction<T> {
    /// `Σ c · z^a z̄^b / (1+zz̄)^k` over `((a, b), c)` entries.
    pub fn new(terms: impl IntoIterator<Item = (Mono, Complex<T>)>, k: u32) -> Self {
        let mut num = Poly::new();
        for (m, c) in terms {
            poly_insert(&mut num, m, c);
        }
        FiberFunction { num, k }.normalized()
    }

    /// The constant `c`.
    pub fn constant(c: Complex<T>) -> Self {
        FiberFunction::new([((0, 0), c)], 0)
    }

    /// The real constant `x`.
    pub fn real(x: T) -> Self {
        FiberFunction::constant(Complex::new(x, T::zero()))
    }

    /// The constant `i`.
    pub fn i() -> Self {
        FiberFunction::constant(Complex::new(T::zero(), T::one()))
    }

    /// The coordinate `z`.
    pub fn z() -> Self {
        FiberFunction::new([((1, 0), Complex::one())], 0)
    }

    /// The conjugate coordinate `z̄`.
    pub fn zbar() -> Self {
        FiberFunction::new([((0, 1), Complex::one())], 0)
    }

    /// `1 + zz̄`.
    pub fn one_plus_w() -> Self {
        FiberFunction { num: one_plus_w_pow(1), k: 0 }
    }

    /// Exponent of the denominator after cancellation.
    pub fn denominator_exponent(&self) -> u32 {
        self.k
    }

    /// Numerator monomials `((a, b), c)` for `c · z^a z̄^b`.
    pub fn numerator(&self) -> impl Iterator<Item = (Mono, &Complex<T>)> {
        self.num.iter().map(|(m, c)| (*m, c))
    }

    fn normalized(mut self) -> Self {
        while self.k > 0 && !self.num.is_empty() {
            match poly_div_one_plus_w(&self.num) {
                Some(q) => {
                    self.num = q;
                    self.k -= 1;
                }
                None => break,
            }
        }
        if self.num.is_empty() {
            self.k = 0;
        }
        self
    }

    fn raised(&self, k: u32) -> Poly<T> {
        if k == self.k {
            self.num.clone()
        } else {
            poly_mul(&self.num, &one_plus_w_pow(k - self.k))
        }
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Self {
        FiberFunction {
            num: self
                .num
                .iter()
                .map(|((a, b), c)| ((*b, *a), c.conj()))
                .collect(),
            k: self.k,
        }
    }

    /// Real part `(f + f̄)/2`.
    pub fn re(&self) -> Self {
        (self.clone() + self.conj()) * FiberFunction::real(T::from_ratio(1, 2))
    }

    /// Imaginary part `(f − f̄)/(2i)`.
    pub fn im(&self) -> Self {
        (self.clone() - self.conj())
            * FiberFunction::constant(Complex::new(T::zero(), T::from_ratio(-1, 2)))
    }

    /// `∂f/∂z`, by the quotient rule.
    pub fn d_z(&self) -> Self {
        self.derivative(false)
    }

    /// `∂f/∂z̄`, by the quotient rule.
    pub fn d_zbar(&self) -> Self {
        self.derivative(true)
    }

    fn derivative(&self, bar: bool) -> Self {
        // ∂(P/(1+zz̄)^k) = (∂P·(1+zz̄) − k·(other variable)·P)/(1+zz̄)^{k+1}
        let mut dp = Poly::new();
        for ((a, b), c) in &self.num {
            let (e, m) = if bar { (*b, (*a, b.wrapping_sub(1))) } else { (*a, (a.wrapping_sub(1), *b)) };
            if e > 0 {
                poly_insert(&mut dp, m, c.clone() * Complex::new(T::from_int(e as i64), T::zero()));
            }
        }
        let mut num = poly_mul(&dp, &one_plus_w_pow(1));
        if self.k > 0 {
            let k = Complex::new(T::from_int(self.k as i64), T::zero());
            for ((a, b), c) in &self.num {
                let m = if bar { (a + 1, *b) } else { (*a, b + 1) };
                poly_insert(&mut num, m, -(c.clone() * k.clone()));
            }
        }
        FiberFunction { num, k: self.k + 1 }.normalized()
    }

    /// Value at a point of the fiber chart.
    pub fn eval(&self, z: Complex<f64>) -> Complex<f64> {
        let w = 1.0 + z.norm_sqr();
        let mut acc = Complex::new(0.0, 0.0);
        for ((a, b), c) in &self.num {
            let c = Complex::new(c.re.to_f64(), c.im.to_f64());
            acc += c * z.powu(*a) * z.conj().powu(*b);
        }
        acc / w.powi(self.k as i32)
    }

    /// True when every coefficient is exact.
    pub fn is_exact(&self) -> bool {
        self.num.values().all(|c| c.re.is_exact() && c.im.is_exact())
    }

    /// Largest modulus of the numerator coefficients.
    pub fn max_coeff(&self) -> f64 {
        self.num
            .values()
            .map(|c| c.re.to_f64().hypot(c.im.to_f64()))
            .fold(0.0, f64::max)
    }
}

impl<T: Field> fmt::Debug for FiberFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (n, ((a, b), c)) in self.num.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({} + {}i)z^{}z̄^{}", c.re, c.im, a, b)?;
        }
        write!(f, ")/(1+zz̄)^{}", self.k)
    }
}

impl<T: Field> PartialEq for FiberFunction<T> {
    fn eq(&self, o: &Self) -> bool {
        let k = self.k.max(o.k);
        self.raised(k) == o.raised(k)
    }
}

impl<T: Field> Add for FiberFunction<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let k = self.k.max(o.k);
        let mut num = self.raised(k);
        for (m, c) in o.raised(k) {
            poly_insert(&mut num, m, c);
        }
        FiberFunction { num, k }.normalized()
    }
}

impl<T: Field> Neg for FiberFunction<T> {
    type Output = Self;
    fn neg(self) -> Self {
        FiberFunction {
            num: self.num.into_iter().map(|(m, c)| (m, -c)).collect(),
            k: self.k,
        }
    }
}

impl<T: Field> Sub for FiberFunction<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl<T: Field> Mul for FiberFunction<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        FiberFunction {
            num: poly_mul(&self.num, &o.num),
            k: self.k + o.k,
        }
        .normalized()
    }
}

impl<T: Field> Zero for FiberFunction<T> {
    fn zero() -> Self {
        FiberFunction { num: Poly::new(), k: 0 }
    }
    fn is_zero(&self) -> bool {
        self.num.is_empty()
    }
}

impl<T: Field> One for FiberFunction<T> {
    fn one() -> Self {
        FiberFunction::real(T::one())
    }
}

/// A form on the twistor coframe with fiber-dependent coefficients.
pub type TwistorForm<T> = Form<FiberFunction<T>>;

/// Conjugates the coefficients and exchanges the `dz` and `dz̄` legs.
fn conj_form<T: Field>(f: &TwistorForm<T>, dz: usize) -> TwistorForm<T> {
    let mut out = Form::zero(f.dim(), f.degree());
    for (m, c) in f.terms() {
        let idx: Vec<usize> = mask_indices(m)
            .into_iter()
            .map(|i| match i {
                i if i == dz => dz + 1,
                i if i == dz + 1 => dz,
                i => i,
            })
            .collect();
        out = out + Form::monomial(f.dim(), &idx, c.conj());
    }
    out
}

/// Replaces every basis 1-form by the given image and expands.
fn substitute<T: Field>(f: &TwistorForm<T>, images: &[TwistorForm<T>]) -> TwistorForm<T> {
    let n = f.dim();
    let mut out = Form::zero(n, f.degree());
    for (m, c) in f.terms() {
        let piece = mask_indices(m)
            .into_iter()
            .fold(Form::constant(n, FiberFunction::one()), |acc, i| acc.wedge(&images[i]));
        out = out + piece.scale(c);
    }
    out
}

fn cx<T: Field>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

/// The twistor bundle over a model, with the characteristic connection.
///
/// The extended coframe is the model's coframe followed by `dz` and `dz̄`.
#[derive(Clone, Debug)]
pub struct Twistor<T: Field> {
    model: CoframeModel<T>,
    gamma: [Form<T>; 3],
    d_table: Vec<TwistorForm<T>>,
}

impl<T: Field> Twistor<T> {
    /// Builds the bundle from the model's characteristic connection.
    pub fn new(model: &CoframeModel<T>, tol: f64) -> Result<Self> {
        let ch = characteristic_connection(model, tol)?;
        Ok(Twistor::with_connection(model, &ch.gamma))
    }

    /// Builds the bundle over an explicitly given so(3) connection.
    pub fn with_connection(model: &CoframeModel<T>, gamma: &[Form<T>; 3]) -> Self {
        let n = model.dim() + 2;
        let mut d_table: Vec<TwistorForm<T>> = (0..model.dim())
            .map(|a| lift_to(n, model.d_basis(a)))
            .collect();
        d_table.push(Form::zero(n, 2));
        d_table.push(Form::zero(n, 2));
        Twistor {
            model: model.clone(),
            gamma: gamma.clone(),
            d_table,
        }
    }

    /// The underlying model.
    pub fn model(&self) -> &CoframeModel<T> {
        &self.model
    }

    /// Dimension of the extended coframe.
    pub fn dim(&self) -> usize {
        self.model.dim() + 2
    }

    /// Index of `dz`; `dz̄` follows it.
    pub fn dz_index(&self) -> usize {
        self.model.dim()
    }

    /// A model form with constant coefficients, pulled back to the bundle.
    pub fn lift(&self, f: &Form<T>) -> TwistorForm<T> {
        lift_to(self.dim(), f)
    }

    /// `dz`.
    pub fn dz(&self) -> TwistorForm<T> {
        Form::basis(self.dim(), self.dz_index())
    }

    /// Exterior derivative: the model's structure equations on the coframe
    /// legs plus `∂_z c dz∧ + ∂_z̄ c dz̄∧` on the coefficients.
    pub fn d(&self, f: &TwistorForm<T>) -> TwistorForm<T> {
        let n = self.dim();
        let dz = self.dz_index();
        let mut out = f.d_with(&|i| self.d_table[i].clone());
        for (m, c) in f.terms() {
            let idx = mask_indices(m);
            let mut with = |leg: usize, coef: FiberFunction<T>| {
                let mut all = vec![leg];
                all.extend(&idx);
                out = out.clone() + Form::monomial(n, &all, coef);
            };
            with(dz, c.d_z());
            with(dz + 1, c.d_zbar());
        }
        out
    }

    /// Complex conjugate of a form.
    pub fn conj(&self, f: &TwistorForm<T>) -> TwistorForm<T> {
        conj_form(f, self.dz_index())
    }

    /// Real part of a form.
    pub fn re(&self, f: &TwistorForm<T>) -> TwistorForm<T> {
        (f.clone() + self.conj(f)).scale(&FiberFunction::real(T::from_ratio(1, 2)))
    }

    /// Imaginary part of a form.
    pub fn im(&self, f: &TwistorForm<T>) -> TwistorForm<T> {
        (f.clone() - self.conj(f))
            .scale(&FiberFunction::constant(cx(T::zero(), T::from_ratio(-1, 2))))
    }

    /// The coefficients `b_I` of `ω = Σ b_I κ_I`: the point of the unit
    /// 2-sphere with affine coordinate `z`.
    pub fn sphere_point(&self) -> [FiberFunction<T>; 3] {
        let o = T::one;
        let z0 = T::zero;
        [
            FiberFunction::new([((1, 0), cx(o(), z0())), ((0, 1), cx(o(), z0()))], 1),
            FiberFunction::new([((1, 0), cx(z0(), -o())), ((0, 1), cx(z0(), o()))], 1),
            FiberFunction::new([((0, 0), cx(o(), z0())), ((1, 1), cx(-o(), z0()))], 1),
        ]
    }

    /// The tautological 2-form `ω = Σ b_I κ_I`.
    pub fn tautological_form(&self) -> TwistorForm<T> {
        let kappa = kappa_forms::<T>(self.dim());
        let b = self.sphere_point();
        (0..3).fold(Form::zero(self.dim(), 2), |acc, i| {
            acc + lift_to(self.dim(), &kappa[i]).scale(&b[i])
        })
    }

    /// The vertical (1,0)-form `h̃`.
    pub fn h(&self) -> TwistorForm<T> {
        let h = T::from_ratio(1, 2);
        let z0 = T::zero;
        let g = |i: usize| self.lift(&self.gamma[i]);
        let c1 = FiberFunction::new([((0, 0), cx(z0(), -h.clone())), ((2, 0), cx(z0(), h.clone()))], 1);
        let c2 = FiberFunction::new([((0, 0), cx(h.clone(), z0())), ((2, 0), cx(h.clone(), z0()))], 1);
        let c3 = FiberFunction::new([((1, 0), cx(z0(), T::one()))], 1);
        let inv = FiberFunction::new([((0, 0), Complex::one())], 1);
        self.dz().scale(&inv) + g(0).scale(&c1) + g(1).scale(&c2) + g(2).scale(&c3)
    }

    fn horizontal(&self, rows: [Vec<(Mono, Complex<T>)>; 5], k: u32) -> TwistorForm<T> {
        let n = self.dim();
        rows.into_iter().enumerate().fold(Form::zero(n, 1), |acc, (i, r)| {
            acc + Form::monomial(n, &[i], FiberFunction::new(r, k))
        })
    }

    /// The unit horizontal 1-form `ũ` dual to the kernel of `ω`.
    pub fn u(&self) -> TwistorForm<T> {
        let s = T::sqrt3();
        let o = T::one();
        let r = |x: T| cx(x, T::zero());
        let i = |x: T| cx(T::zero(), x);
        self.horizontal(
            [
                vec![((0, 0), r(-o.clone())), ((1, 1), r(T::from_int(4))), ((2, 2), r(-o.clone()))],
                vec![((2, 0), i(s.clone())), ((0, 2), i(-s.clone()))],
                vec![
                    ((2, 1), r(-s.clone())),
                    ((1, 2), r(-s.clone())),
                    ((1, 0), r(s.clone())),
                    ((0, 1), r(s.clone())),
                ],
                vec![((2, 0), r(-s.clone())), ((0, 2), r(-s.clone()))],
                vec![
                    ((2, 1), i(-s.clone())),
                    ((1, 0), i(s.clone())),
                    ((1, 2), i(s.clone())),
                    ((0, 1), i(-s.clone())),
                ],
            ],
            2,
        )
    }

    /// The horizontal null (1,0)-form `ñ₁`.
    pub fn n1(&self) -> TwistorForm<T> {
        let s2 = T::sqrt3() * T::from_int(2);
        let r = |x: i64| cx(T::from_int(x), T::zero());
        let i = |x: i64| cx(T::zero(), T::from_int(x));
        self.horizontal(
            [
                vec![((2, 1), cx(T::zero(), s2.clone())), ((1, 0), cx(T::zero(), -s2))],
                vec![((3, 0), r(-2)), ((0, 1), r(-2))],
                vec![((0, 0), i(-1)), ((2, 0), i(3)), ((1, 1), i(3)), ((3, 1), i(-1))],
                vec![((3, 0), i(-2)), ((0, 1), i(2))],
                vec![((0, 0), r(-1)), ((2, 0), r(-3)), ((1, 1), r(3)), ((3, 1), r(1))],
            ],
            2,
        )
    }

    /// The horizontal null (1,0)-form `ñ₂`.
    pub fn n2(&self) -> TwistorForm<T> {
        let s2 = T::sqrt3() * T::from_int(2);
        let r = |x: i64| cx(T::from_int(x), T::zero());
        let i = |x: i64| cx(T::zero(), T::from_int(x));
        self.horizontal(
            [
                vec![((2, 0), cx(T::zero(), s2))],
                vec![((4, 0), r(1)), ((0, 0), r(-1))],
                vec![((3, 0), i(-2)), ((1, 0), i(2))],
                vec![((4, 0), i(1)), ((0, 0), i(1))],
                vec![((3, 0), r(2)), ((1, 0), r(2))],
            ],
            2,
        )
    }

    /// The adapted coframe.
    pub fn coframe(&self) -> TwistorCoframe<T> {
        let (h, u, n1, n2) = (self.h(), self.u(), self.n1(), self.n2());
        let vartheta = [
            self.re(&n1),
            self.im(&n1),
            self.re(&n2),
            self.im(&n2),
            u.clone(),
            -self.im(&h),
            self.re(&h),
        ];
        TwistorCoframe {
            omega: self.tautological_form(),
            h,
            u,
            n1,
            n2,
            vartheta,
        }
    }

    /// Images of the basis 1-forms in the frame where `dz`, `dz̄` are
    /// replaced by `H = h̃`, `H̄ = conj(h̃)`: `dz = (1+zz̄)H − S`.
    fn to_metric_basis(&self) -> Vec<TwistorForm<T>> {
        let n = self.dim();
        let dz = self.dz_index();
        let w = FiberFunction::one_plus_w();
        let s = self.h().scale(&w) - self.dz();
        let sbar = self.conj(&s);
        let mut images: Vec<TwistorForm<T>> = (0..dz).map(|i| Form::basis(n, i)).collect();
        images.push(Form::basis(n, dz).scale(&w) - s);
        images.push(Form::basis(n, dz + 1).scale(&w) - sbar);
        images
    }

    /// Expresses a form in the `(θ, γ, H, H̄)` frame.
    pub fn in_metric_basis(&self, f: &TwistorForm<T>) -> TwistorForm<T> {
        substitute(f, &self.to_metric_basis())
    }

    /// Complex-bilinear extension of the metric `g̃` to forms.
    ///
    /// The base coframe is orthonormal and `⟨H, H̄⟩ = 2`. Fails when a form
    /// has a vertical so(3) leg after the change of frame, i.e. when it is
    /// not built from `θ`, `h̃` and `conj(h̃)` alone.
    pub fn inner(&self, a: &TwistorForm<T>, b: &TwistorForm<T>) -> Result<FiberFunction<T>> {
        let (a, b) = (self.in_metric_basis(a), self.in_metric_basis(b));
        self.inner_in_metric_basis(&a, &b)
    }

    fn inner_in_metric_basis(
        &self,
        a: &TwistorForm<T>,
        b: &TwistorForm<T>,
    ) -> Result<FiberFunction<T>> {
        let hz = self.dz_index();
        let allowed = ((1u32 << BASE_DIM) - 1) | (1 << hz) | (1 << (hz + 1));
        if !a.lives_in(allowed) || !b.lives_in(allowed) {
            return Err(Error::argument("form has legs along the structure group"));
        }
        let (bh, bhb) = (1u32 << hz, 1u32 << (hz + 1));
        let mut acc = FiberFunction::zero();
        for (m, c) in a.terms() {
            let (has_h, has_hb) = (m & bh != 0, m & bhb != 0);
            let partner = (m & !(bh | bhb)) | if has_h { bhb } else { 0 } | if has_hb { bh } else { 0 };
            let other = b.coeff_mask(partner);
            if other.is_zero() {
                continue;
            }
            let legs = has_h as i64 + has_hb as i64;
            let sign = if has_h && has_hb { -1 } else { 1 };
            let factor = FiberFunction::real(T::from_int(sign * (1 << legs)));
            acc = acc + c.clone() * other * factor;
        }
        Ok(acc)
    }

    /// `ω` as an endomorphism of the horizontal space: `(ωv)_j = ω_ji vⁱ`.
    pub fn omega_matrix(&self) -> Matrix<FiberFunction<T>> {
        let omega = self.tautological_form();
        Matrix::from_fn(5, 5, |j, i| omega.coeff(&[j, i]))
    }

    /// The complex structures `J₊` and `J₋` on the horizontal complement of
    /// `u`, from the spectral parts of `ω` with eigenvalues `±2i` and `±i`.
    pub fn j_plus_minus(&self) -> (Matrix<FiberFunction<T>>, Matrix<FiberFunction<T>>) {
        let a = self.omega_matrix();
        let a2 = a.mul(&a).expect("5x5");
        let poly = Matrix::identity(5)
            .scale(&FiberFunction::real(T::from_ratio(7, 4)))
            .add(&a2.scale(&FiberFunction::real(T::from_ratio(1, 4))))
            .expect("5x5");
        let a_plus = a.mul(&poly).expect("5x5");
        let a_minus = a.sub(&a_plus).expect("5x5");
        (
            a_plus.scale(&FiberFunction::real(T::from_ratio(2, 3))),
            a_minus.scale(&FiberFunction::real(T::from_int(2))),
        )
    }

    /// The horizontal complex structure of one of the four CR structures.
    pub fn horizontal_structure(&self, s: CrStructure) -> Matrix<FiberFunction<T>> {
        let (jp, jm) = self.j_plus_minus();
        let minus = FiberFunction::real(-T::one());
        match s {
            CrStructure::J0 => jp,
            CrStructure::J0m => jp.scale(&minus),
            CrStructure::Jm => jm,
            CrStructure::Jmm => jm.scale(&minus),
        }
    }

    /// The two horizontal (1,0)-forms of a CR structure, chosen among
    /// `ñ₁, ñ̄₁, ñ₂, ñ̄₂`.
    ///
    /// A (1,0)-form is the metric dual of the conjugate of a (1,0)-vector,
    /// so its coefficient vector lies in the `−i` eigenspace of `J`.
    pub fn ideal(&self, s: CrStructure) -> Result<Vec<(String, TwistorForm<T>)>> {
        let j = self.horizontal_structure(s);
        let mi = FiberFunction::constant(cx(T::zero(), -T::one()));
        let (n1, n2) = (self.n1(), self.n2());
        let candidates = [
            ("ñ₁", n1.clone()),
            ("conj ñ₁", self.conj(&n1)),
            ("ñ₂", n2.clone()),
            ("conj ñ₂", self.conj(&n2)),
        ];
        let mut out = Vec::new();
        for (name, f) in candidates {
            let v = horizontal_vector(&f);
            let jv = j.apply(&v)?;
            if jv.iter().zip(&v).all(|(a, b)| *a == mi.clone() * b.clone()) {
                out.push((name.to_string(), f));
            }
        }
        if out.len() != 2 {
            return Err(Error::Structure(format!(
                "{} null forms in the −i eigenspace of {}; expected 2",
                out.len(),
                s
            )));
        }
        Ok(out)
    }
}

fn lift_to<T: Field>(n: usize, f: &Form<T>) -> TwistorForm<T> {
    f.embed(n).map(|c| FiberFunction::real(c.clone()))
}

/// Coefficients on `θ¹..θ⁵` of a 1-form.
pub fn horizontal_vector<T: Field>(f: &TwistorForm<T>) -> Vec<FiberFunction<T>> {
    (0..BASE_DIM).map(|i| f.coeff(&[i])).collect()
}

/// The adapted coframe of the twistor bundle.
#[derive(Clone, Debug)]
pub struct TwistorCoframe<T: Field> {
    /// The tautological 2-form.
    pub omega: TwistorForm<T>,
    /// Vertical (1,0)-form.
    pub h: TwistorForm<T>,
    /// Horizontal unit form along the kernel of `ω`.
    pub u: TwistorForm<T>,
    /// First horizontal null (1,0)-form.
    pub n1: TwistorForm<T>,
    /// Second horizontal null (1,0)-form.
    pub n2: TwistorForm<T>,
    /// The real orthonormal coframe `ϑ¹..ϑ⁷`.
    pub vartheta: [TwistorForm<T>; 7],
}

/// The four almost CR structures `J ⊕ ±J₊`, `J ⊕ ±J₋`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum CrStructure {
    /// `J ⊕ J₊`.
    J0,
    /// `J ⊕ (−J₊)`.
    J0m,
    /// `J ⊕ J₋`.
    Jm,
    /// `J ⊕ (−J₋)`.
    Jmm,
}

impl CrStructure {
    /// All four structures.
    pub const ALL: [CrStructure; 4] =
        [CrStructure::J0, CrStructure::J0m, CrStructure::Jm, CrStructure::Jmm];

    /// Parses `j0`, `j0m`, `jm` or `jmm`.
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "j0" => Ok(CrStructure::J0),
            "j0m" => Ok(CrStructure::J0m),
            "jm" => Ok(CrStructure::Jm),
            "jmm" => Ok(CrStructure::Jmm),
            _ => Err(Error::argument(format!(
                "unknown CR structure {:?}; expected j0, j0m, jm or jmm",
                s
            ))),
        }
    }
}

impl fmt::Display for CrStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CrStructure::J0 => "j0",
            CrStructure::J0m => "j0m",
            CrStructure::Jm => "jm",
            CrStructure::Jmm => "jmm",
        })
    }
}

/// Seeded sample points of the fiber chart.
pub fn sample_points(seed: u64, count: usize) -> Vec<Complex<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| Complex::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
        .collect()
}

/// Largest coefficient modulus of a form over the sample points.
pub fn sampled_max<T: Field>(f: &TwistorForm<T>, points: &[Complex<f64>]) -> f64 {
    f.terms()
        .flat_map(|(_, c)| points.iter().map(move |z| c.eval(*z).norm()))
        .fold(0.0, f64::max)
}

/// Vanishing of a form: exact when all coefficients are exact, sampled
/// otherwise.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Vanishing {
    /// Exact zero test, for exact coefficients.
    pub exact_zero: Option<bool>,
    /// Largest coefficient modulus over the sample points.
    pub sampled_max: f64,
    /// The verdict.
    pub vanishes: bool,
}

impl Vanishing {
    /// Tests `f = 0`.
    pub fn of<T: Field>(f: &TwistorForm<T>, points: &[Complex<f64>], tol: f64) -> Self {
        let exact = f.terms().all(|(_, c)| c.is_exact());
        let sampled_max = sampled_max(f, points);
        let exact_zero = exact.then(|| f.is_zero());
        Vanishing {
            exact_zero,
            sampled_max,
            vanishes: exact_zero.unwrap_or(sampled_max <= tol),
        }
    }

    /// Tests `f = 0` for a function.
    pub fn of_function<T: Field>(f: &FiberFunction<T>, points: &[Complex<f64>], tol: f64) -> Self {
        let sampled_max = points.iter().map(|z| f.eval(*z).norm()).fold(0.0, f64::max);
        let exact_zero = f.is_exact().then(|| f.is_zero());
        Vanishing {
            exact_zero,
            sampled_max,
            vanishes: exact_zero.unwrap_or(sampled_max <= tol),
        }
    }
}

/// One integrability condition `dX∧ũ∧h̃∧X₁∧X₂`.
#[derive(Clone, Debug, Serialize)]
pub struct CrResidual {
    /// The generator `X`.
    pub generator: String,
    /// Vanishing of the 6-form.
    pub residual: Vanishing,
}

/// Residuals of one CR structure.
#[derive(Clone, Debug, Serialize)]
pub struct CrReport {
    /// Which structure.
    pub structure: CrStructure,
    /// The horizontal (1,0)-forms spanning the structure with `h̃`.
    pub ideal: Vec<String>,
    /// One residual per generator of the ideal.
    pub residuals: Vec<CrResidual>,
    /// True when every residual vanishes.
    pub integrable: bool,
}

/// Computes the four integrability residuals of a CR structure.
pub fn cr_residuals<T: Field>(
    tw: &Twistor<T>,
    s: CrStructure,
    points: &[Complex<f64>],
    tol: f64,
) -> Result<CrReport> {
    let ideal = tw.ideal(s)?;
    let (u, h) = (tw.u(), tw.h());
    let base = u.wedge(&h).wedge(&ideal[0].1).wedge(&ideal[1].1);
    let mut gens = vec![("ũ".to_string(), u), ("h̃".to_string(), h)];
    gens.extend(ideal.iter().cloned());
    let residuals: Vec<CrResidual> = gens
        .into_iter()
        .map(|(name, x)| CrResidual {
            generator: name,
            residual: Vanishing::of(&tw.d(&x).wedge(&base), points, tol),
        })
        .collect();
    let integrable = residuals.iter().all(|r| r.residual.vanishes);
    Ok(CrReport {
        structure: s,
        ideal: ideal.into_iter().map(|(n, _)| n).collect(),
        residuals,
        integrable,
    })
}

/// The predicted verdict: only `J ⊕ J₊` can be integrable, and it is
/// exactly when the `⊙²₉` part of the curvature vanishes and the torsion
/// lies in `Λ²₃`.
pub fn predicted_integrable<T: Field>(
    model: &CoframeModel<T>,
    s: CrStructure,
    tol: f64,
) -> Result<bool> {
    if s != CrStructure::J0 {
        return Ok(false);
    }
    let ch = characteristic_connection(model, tol)?;
    let k = curvature(model, &ch.gamma)?;
    let dec = decompose_curvature(&k.k, tol);
    let class = torsion_type(&ch.torsion, tol)?.class;
    Ok(!dec.has(CurvatureComponent::S9)
        && matches!(class, TorsionClass::Zero | TorsionClass::PureL3))
}

/// The G₂ 3-form and its comparison with the coordinate expression.
#[derive(Clone, Debug)]
pub struct G2Form<T: Field> {
    /// `φ = φ₁ + φ₂ + φ₃` from the complex coframe.
    pub phi: TwistorForm<T>,
    /// The same form written in the real coframe `ϑ`.
    pub phi_vartheta: TwistorForm<T>,
    /// Vanishing of the difference.
    pub matches: Vanishing,
    /// `|φ|²`, expected to be 7.
    pub norm_sq: FiberFunction<T>,
}

/// Builds the G₂ 3-form.
pub fn g2_form<T: Field>(tw: &Twistor<T>, points: &[Complex<f64>], tol: f64) -> Result<G2Form<T>> {
    let c = tw.coframe();
    let half_i = FiberFunction::constant(cx(T::zero(), T::from_ratio(1, 2)));
    let (n1b, n2b, hb) = (tw.conj(&c.n1), tw.conj(&c.n2), tw.conj(&c.h));
    let phi1 = (c.n1.wedge(&n1b) - c.n2.wedge(&n2b)).wedge(&c.u);
    let phi2 = c.n1.wedge(&n2b).wedge(&c.h) - n1b.wedge(&c.n2).wedge(&hb);
    let phi3 = c.u.wedge(&c.h).wedge(&hb);
    let phi = (phi1 + phi2 + phi3).scale(&half_i);
    let v = &c.vartheta;
    let w3 = |a: usize, b: usize, d: usize| v[a].wedge(&v[b]).wedge(&v[d]);
    let phi_vartheta = (v[0].wedge(&v[1]) - v[2].wedge(&v[3])).wedge(&v[4])
        + (v[0].wedge(&v[2]) - v[3].wedge(&v[1])).wedge(&v[5])
        + (v[0].wedge(&v[3]) - v[1].wedge(&v[2])).wedge(&v[6])
        + w3(4, 5, 6);
    let matches = Vanishing::of(&(phi.clone() - phi_vartheta.clone()), points, tol);
    let norm_sq = tw.inner(&phi, &phi)?;
    Ok(G2Form {
        phi,
        phi_vartheta,
        matches,
        norm_sq,
    })
}

/// Identities of the twistor construction that do not depend on the model's
/// structure equations.
#[derive(Clone, Debug, Serialize)]
pub struct TwistorIdentities {
    /// `*(ω∧*ω) − 5`.
    pub omega_norm: Vanishing,
    /// `ũ − ¼*(ω∧ω)`.
    pub u_from_omega: Vanishing,
    /// `ιᵤω`, with `u` the vector of `ũ`.
    pub u_in_kernel: Vanishing,
    /// Gram matrix of `ϑ` minus the identity, entrywise.
    pub gram_identity: Vanishing,
    /// `A(A²+1)(A²+4)` for `A = ω` as an endomorphism, and `tr A² + 10`.
    pub omega_spectrum: Vanishing,
    /// `J±² + (1 − u⊗u)` and `[J₊, J₋]`.
    pub j_squares: Vanishing,
    /// `b × ∂_z b − i ∂_z b` for the sphere point `b`.
    pub vertical_orientation: Vanishing,
    /// `Σ ∂_z b_I ∂_z̄ b_I − 2/(1+zz̄)²`: the vertical metric is a quarter
    /// of the round metric `Σ db_I²`.
    pub vertical_metric: Vanishing,
    /// `d²` of the coframe.
    pub d_squared: Vanishing,
}

/// Checks the model-independent identities.
pub fn twistor_identities<T: Field>(
    tw: &Twistor<T>,
    points: &[Complex<f64>],
    tol: f64,
) -> Result<TwistorIdentities> {
    let n = tw.dim();
    let c = tw.coframe();
    let of = |f: &TwistorForm<T>| Vanishing::of(f, points, tol);
    let fun = |f: FiberFunction<T>| Form::constant(n, f);
    let real = |x: i64| FiberFunction::real(T::from_int(x));

    let omega_norm = of(&(c.omega.wedge(&c.omega.hodge_star()?).hodge_star()? - fun(real(5))));
    let u_from_omega = of(&(c.u.clone()
        - c.omega.wedge(&c.omega).hodge_star()?.scale(&FiberFunction::real(T::from_ratio(1, 4)))));
    let a = tw.omega_matrix();
    let u = horizontal_vector(&c.u);
    let au = a.apply(&u)?;
    let u_in_kernel = of(&Form::one_form(n, &au.into_iter().zip(0..).collect::<Vec<_>>()));

    let mut gram = Form::zero(n, 1);
    for i in 0..7 {
        for j in 0..7 {
            let g = tw.inner(&c.vartheta[i], &c.vartheta[j])?;
            let expected = if i == j { FiberFunction::one() } else { FiberFunction::zero() };
            gram = gram + Form::monomial(n, &[i], g - expected);
        }
    }
    let gram_identity = of(&gram);

    let id = Matrix::identity(5);
    let a2 = a.mul(&a)?;
    let spec = a
        .mul(&a2.add(&id)?)?
        .mul(&a2.add(&id.scale(&real(4)))?)?;
    let mut spec_form = matrix_form(n, &spec);
    spec_form = spec_form + fun(a2.trace() + real(10));
    let omega_spectrum = of(&spec_form);

    let (jp, jm) = tw.j_plus_minus();
    let uu = Matrix::from_fn(5, 5, |i, j| u[i].clone() * u[j].clone());
    let proj = id.sub(&uu)?;
    let sq_p = jp.mul(&jp)?.add(&proj)?;
    let sq_m = jm.mul(&jm)?.add(&proj)?;
    let comm = jp.commutator(&jm)?;
    let j_squares = of(&(matrix_form(n, &sq_p) + matrix_form(n, &sq_m) + matrix_form(n, &comm)));

    let b = tw.sphere_point();
    let db: Vec<FiberFunction<T>> = b.iter().map(|x| x.d_z()).collect();
    let dbb: Vec<FiberFunction<T>> = b.iter().map(|x| x.d_zbar()).collect();
    let cross = |p: &[FiberFunction<T>], q: &[FiberFunction<T>], i: usize| {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        p[j].clone() * q[k].clone() - p[k].clone() * q[j].clone()
    };
    let orient = (0..3).fold(Form::zero(n, 1), |acc, i| {
        acc + Form::monomial(n, &[i], cross(&b, &db, i) - FiberFunction::i() * db[i].clone())
    });
    let vertical_orientation = of(&orient);
    let metric = (0..3).fold(FiberFunction::zero(), |acc, i| acc + db[i].clone() * dbb[i].clone())
        - FiberFunction::new([((0, 0), Complex::new(T::from_int(2), T::zero()))], 2);
    let vertical_metric = Vanishing::of_function(&metric, points, tol);

    let dd = [&c.h, &c.u, &c.n1, &c.n2, &c.omega]
        .iter()
        .fold(Form::zero(n, 1), |acc, f| {
            let d2 = tw.d(&tw.d(f));
            acc + Form::monomial(n, &[0], d2.terms().fold(FiberFunction::zero(), |s, (_, c)| {
                s + c.clone() * c.conj()
            }))
        });
    let d_squared = of(&dd);

    Ok(TwistorIdentities {
        omega_norm,
        u_from_omega,
        u_in_kernel,
        gram_identity,
        omega_spectrum,
        j_squares,
        vertical_orientation,
        vertical_metric,
        d_squared,
    })
}

impl TwistorIdentities {
    /// True when every identity holds.
    pub fn all_hold(&self) -> bool {
        [
            &self.omega_norm,
            &self.u_from_omega,
            &self.u_in_kernel,
            &self.gram_identity,
            &self.omega_spectrum,
            &self.j_squares,
            &self.vertical_orientation,
            &self.vertical_metric,
            &self.d_squared,
        ]
        .iter()
        .all(|v| v.vanishes)
    }
}

/// Packs the entries of a matrix into the coefficients of one form, so that
/// the form vanishes iff the matrix does.
fn matrix_form<T: Field>(n: usize, m: &Matrix<FiberFunction<T>>) -> TwistorForm<T> {
    let mut out = Form::zero(n, 1);
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            let x = m[(r, c)].clone();
            out = out + Form::monomial(n, &[0], x.clone() * x.conj());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{torsion_free_model, tor23_model, tor27_model, Angle};
    use crate::exterior::abelian_model;
    use crate::scalar::QSqrt3;

    type Q = QSqrt3;
    type F = FiberFunction<Q>;

    fn q(n: i64) -> Q {
        Q::from_int(n)
    }

    fn at_zero(f: &TwistorForm<Q>) -> Vec<(u32, Complex<f64>)> {
        f.terms()
            .map(|(m, c)| (m, c.eval(Complex::new(0.0, 0.0))))
            .filter(|(_, c)| c.norm() > 0.0)
            .collect()
    }

    #[test]
    fn fiber_function_arithmetic() {
        let w = F::one_plus_w();
        let inv = F::new([((0, 0), Complex::one())], 1);
        assert_eq!(w.clone() * inv.clone(), F::one());
        assert_eq!((w.clone() * inv.clone()).denominator_exponent(), 0);
        // ∂_z (1/(1+zz̄)) = −z̄/(1+zz̄)²
        let expected = F::new([((0, 1), Complex::new(q(-1), q(0)))], 2);
        assert_eq!(inv.d_z(), expected);
        assert_eq!(F::z().conj(), F::zbar());
        assert_eq!(F::i() * F::i(), -F::one());
        let f = F::new([((2, 1), Complex::new(q(3), q(1))), ((0, 0), Complex::one())], 2);
        assert_eq!(f.d_z().d_zbar(), f.d_zbar().d_z());
        let z = Complex::new(0.3, -1.2);
        let num = 1.0 + Complex::new(3.0, 1.0) * z * z * z.conj();
        assert!((f.eval(z) - num / (1.0 + z.norm_sqr()).powi(2)).norm() < 1e-12);
        assert_eq!(f.re() + f.im() * F::i(), f);
    }

    #[test]
    fn forms_at_the_origin() {
        let tw = Twistor::new(&abelian_model::<Q>(), 1e-9).unwrap();
        let k = kappa_forms::<Q>(tw.dim());
        let omega = tw.tautological_form();
        assert_eq!(at_zero(&omega), at_zero(&lift_to(tw.dim(), &k[2])));
        // z = 1 gives κ¹.
        let at_one: Vec<_> = omega
            .terms()
            .map(|(m, c)| (m, c.eval(Complex::new(1.0, 0.0))))
            .filter(|(_, c)| c.norm() > 1e-12)
            .collect();
        let k1: Vec<_> = lift_to(tw.dim(), &k[0])
            .terms()
            .map(|(m, c)| (m, c.eval(Complex::new(0.0, 0.0))))
            .collect();
        assert_eq!(at_one.len(), k1.len());
        for ((m1, a), (m2, b)) in at_one.iter().zip(&k1) {
            assert_eq!(m1, m2);
            assert!((a - b).norm() < 1e-12);
        }
        assert_eq!(at_zero(&tw.u()), vec![(1, Complex::new(-1.0, 0.0))]);
        assert_eq!(
            at_zero(&tw.n2()),
            vec![(1 << 1, Complex::new(-1.0, 0.0)), (1 << 3, Complex::new(0.0, 1.0))]
        );
    }

    #[test]
    fn identities_hold_on_several_models() {
        let pts = sample_points(3, 4);
        let models = vec![
            abelian_model::<Q>(),
            torsion_free_model::<Q>(q(1)),
            tor27_model::<Q>(q(1), &Angle::zero(), 1e-9).unwrap(),
        ];
        for m in models {
            let tw = Twistor::new(&m, 1e-9).unwrap();
            let ids = twistor_identities(&tw, &pts, 1e-9).unwrap();
            assert!(ids.all_hold(), "{}: {:?}", m.name(), ids);
            let g2 = g2_form(&tw, &pts, 1e-9).unwrap();
            assert_eq!(g2.matches.exact_zero, Some(true), "{}", m.name());
            assert_eq!(g2.norm_sq, F::real(q(7)));
        }
    }

    #[test]
    fn null_forms_are_orthogonal() {
        let tw = Twistor::new(&abelian_model::<Q>(), 1e-9).unwrap();
        let c = tw.coframe();
        let all = [&c.n1, &c.n2, &c.u, &c.h];
        for (i, a) in all.iter().enumerate().take(2) {
            for b in &all {
                assert!(tw.inner(a, b).unwrap().is_zero(), "{} against {:?}", i, b);
            }
        }
        assert_eq!(tw.inner(&c.u, &c.u).unwrap(), F::one());
        assert_eq!(tw.inner(&c.h, &tw.conj(&c.h)).unwrap(), F::real(q(2)));
    }

    #[test]
    fn ideals_of_the_four_structures() {
        let tw = Twistor::new(&abelian_model::<Q>(), 1e-9).unwrap();
        let names = |s| {
            tw.ideal(s)
                .unwrap()
                .into_iter()
                .map(|(n, _)| n)
                .collect::<Vec<_>>()
        };
        assert_eq!(names(CrStructure::J0), ["ñ₁", "ñ₂"]);
        assert_eq!(names(CrStructure::J0m), ["conj ñ₁", "conj ñ₂"]);
        assert_eq!(names(CrStructure::Jm), ["conj ñ₁", "ñ₂"]);
        assert_eq!(names(CrStructure::Jmm), ["ñ₁", "conj ñ₂"]);
    }

    #[test]
    fn cr_verdicts_on_examples() {
        let pts = sample_points(1, 4);
        let tol = 1e-9;
        let tor23 = tor23_model::<Q>(q(1), &Angle::zero(), 1, 0, tol).unwrap();
        let tor27 = tor27_model::<Q>(q(1), &Angle::zero(), tol).unwrap();
        let flat = torsion_free_model::<Q>(q(1));
        for (m, j0) in [(tor23, true), (tor27, false), (flat, true)] {
            let tw = Twistor::new(&m, tol).unwrap();
            for s in CrStructure::ALL {
                let r = cr_residuals(&tw, s, &pts, tol).unwrap();
                let expected = s == CrStructure::J0 && j0;
                assert_eq!(r.integrable, expected, "{} {}: {:?}", m.name(), s, r);
                assert_eq!(predicted_integrable(&m, s, tol).unwrap(), expected);
            }
        }
    }
}
