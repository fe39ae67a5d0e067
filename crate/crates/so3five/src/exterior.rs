//! Exterior algebra over a coframe with constant structure coefficients.
//!
//! A [`Form`] lives on an ambient coframe of dimension `n <= 32`; a basis
//! monomial `θ^{i1}∧…∧θ^{ik}` with `i1 < … < ik` is stored as the bitmask
//! with bits `i1..ik` set. Indices are zero-based: θ¹ is index 0.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::{Field, Ring};

/// Number of base (horizontal) coframe directions.
pub const BASE_DIM: usize = 5;

/// Bitmask of the base directions.
pub const BASE_MASK: u32 = (1 << BASE_DIM) - 1;

/// Sign of `θ^a ∧ θ^b` relative to the sorted monomial `θ^{a|b}`, or `None`
/// when the monomials share an index.
pub fn wedge_sign(a: u32, b: u32) -> Option<i32> {
    if a & b != 0 {
        return None;
    }
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (a >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    Some(if swaps.is_multiple_of(2) { 1 } else { -1 })
}

/// Bitmask of a list of indices, with the sign of sorting them; `None` if an
/// index repeats.
pub fn sorted_mask(indices: &[usize]) -> Option<(u32, i32)> {
    let mut mask = 0u32;
    let mut sign = 1;
    for &i in indices {
        let bit = 1u32 << i;
        sign *= wedge_sign(mask, bit)?;
        mask |= bit;
    }
    Some((mask, sign))
}

/// Indices of a bitmask in increasing order.
pub fn mask_indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

/// A homogeneous exterior form with coefficients in a ring.
#[derive(Clone, PartialEq)]
pub struct Form<C> {
    dim: usize,
    degree: usize,
    terms: BTreeMap<u32, C>,
}

impl<C: Ring> Form<C> {
    /// Zero form of the given degree.
    pub fn zero(dim: usize, degree: usize) -> Self {
        assert!(dim <= 32, "ambient dimension above 32");
        Form {
            dim,
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// Degree-0 form with value `c`.
    pub fn constant(dim: usize, c: C) -> Self {
        let mut f = Form::zero(dim, 0);
        f.insert(0, c);
        f
    }

    /// The basis 1-form `θ^i`.
    pub fn basis(dim: usize, i: usize) -> Self {
        Form::monomial(dim, &[i], C::one())
    }

    /// `c · θ^{i1}∧…∧θ^{ik}` for indices in any order (zero on repeats).
    pub fn monomial(dim: usize, indices: &[usize], c: C) -> Self {
        let mut f = Form::zero(dim, indices.len());
        assert!(indices.iter().all(|&i| i < dim), "index out of range");
        if let Some((mask, sign)) = sorted_mask(indices) {
            f.insert(mask, if sign > 0 { c } else { -c });
        }
        f
    }

    /// `Σ c · θ^i` over `(c, i)` pairs.
    pub fn one_form(dim: usize, terms: &[(C, usize)]) -> Self {
        terms.iter().fold(Form::zero(dim, 1), |acc, (c, i)| {
            acc + Form::monomial(dim, &[*i], c.clone())
        })
    }

    /// `Σ c · θ^i∧θ^j` over `(c, i, j)` triples.
    pub fn two_form(dim: usize, terms: &[(C, usize, usize)]) -> Self {
        terms.iter().fold(Form::zero(dim, 2), |acc, (c, i, j)| {
            acc + Form::monomial(dim, &[*i, *j], c.clone())
        })
    }

    fn insert(&mut self, mask: u32, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&mask) {
            None => {
                self.terms.insert(mask, c);
            }
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    self.terms.insert(mask, s);
                }
            }
        }
    }

    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Degree.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// True when every coefficient is zero.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Nonzero terms as `(bitmask, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (u32, &C)> {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// True when there are no nonzero terms.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `θ^{indices}` (indices in any order, sign-adjusted).
    pub fn coeff(&self, indices: &[usize]) -> C {
        match sorted_mask(indices) {
            None => C::zero(),
            Some((mask, sign)) => {
                let c = self.terms.get(&mask).cloned().unwrap_or_else(C::zero);
                if sign > 0 {
                    c
                } else {
                    -c
                }
            }
        }
    }

    /// Coefficient of a sorted monomial given as bitmask.
    pub fn coeff_mask(&self, mask: u32) -> C {
        self.terms.get(&mask).cloned().unwrap_or_else(C::zero)
    }

    /// Coefficientwise map into another ring.
    pub fn map<D: Ring>(&self, f: impl Fn(&C) -> D) -> Form<D> {
        let mut out = Form::zero(self.dim, self.degree);
        for (m, c) in &self.terms {
            out.insert(*m, f(c));
        }
        out
    }

    /// Same form in a larger ambient coframe (indices unchanged).
    pub fn embed(&self, dim: usize) -> Self {
        assert!(dim >= self.dim, "embedding into a smaller coframe");
        Form {
            dim,
            degree: self.degree,
            terms: self.terms.clone(),
        }
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale(&self, c: &C) -> Self {
        self.map(|x| x.clone() * c.clone())
    }

    fn check_compatible(&self, o: &Form<C>) {
        assert_eq!(self.dim, o.dim, "forms over different coframes");
    }

    /// Wedge product.
    pub fn wedge(&self, o: &Form<C>) -> Form<C> {
        self.check_compatible(o);
        let mut out = Form::zero(self.dim, self.degree + o.degree);
        if out.degree > self.dim {
            return out;
        }
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                if let Some(sign) = wedge_sign(*ma, *mb) {
                    let c = ca.clone() * cb.clone();
                    out.insert(ma | mb, if sign > 0 { c } else { -c });
                }
            }
        }
        out
    }

    /// True when no term has a leg outside `mask`.
    pub fn lives_in(&self, mask: u32) -> bool {
        self.terms.keys().all(|m| m & !mask == 0)
    }

    /// True when no term has a vertical (non-base) leg.
    pub fn is_horizontal(&self) -> bool {
        self.lives_in(BASE_MASK)
    }

    /// Part of the form whose legs all lie in `mask`.
    pub fn restrict(&self, mask: u32) -> Self {
        let mut out = Form::zero(self.dim, self.degree);
        for (m, c) in &self.terms {
            if m & !mask == 0 {
                out.insert(*m, c.clone());
            }
        }
        out
    }

    /// Interior product with the dual basis vector `e_i`.
    pub fn interior(&self, i: usize) -> Self {
        let mut out = Form::zero(self.dim, self.degree.saturating_sub(1));
        for (m, c) in &self.terms {
            if m & (1 << i) != 0 {
                let sign = (m & ((1 << i) - 1)).count_ones().is_multiple_of(2);
                out.insert(m & !(1 << i), if sign { c.clone() } else { -c.clone() });
            }
        }
        out
    }

    /// Hodge star on the five base directions, with
    /// `α∧*β = g(α,β) θ¹∧…∧θ⁵` for the metric `g = Σ(θⁱ)²`.
    ///
    /// Fails when the form has a vertical leg.
    pub fn hodge_star(&self) -> Result<Self> {
        if !self.is_horizontal() {
            return Err(Error::argument("hodge star of a form with vertical legs"));
        }
        let mut out = Form::zero(self.dim, BASE_DIM - self.degree);
        for (m, c) in &self.terms {
            let comp = BASE_MASK & !m;
            let sign = wedge_sign(*m, comp).expect("complement is disjoint");
            out.insert(comp, if sign > 0 { c.clone() } else { -c.clone() });
        }
        Ok(out)
    }

    /// Euclidean product `Σ α_I β_I` of coefficient families (the metric
    /// `g` on horizontal forms).
    pub fn inner(&self, o: &Form<C>) -> C {
        self.terms
            .iter()
            .filter_map(|(m, a)| o.terms.get(m).map(|b| a.clone() * b.clone()))
            .fold(C::zero(), |acc, x| acc + x)
    }

    /// Exterior derivative from the derivatives of the basis 1-forms, by
    /// the Leibniz rule; coefficients are treated as constants.
    pub fn d_with(&self, d_basis: &impl Fn(usize) -> Form<C>) -> Form<C> {
        let mut out = Form::zero(self.dim, self.degree + 1);
        for (m, c) in &self.terms {
            let idx = mask_indices(*m);
            for (p, &i) in idx.iter().enumerate() {
                let before = Form::monomial(self.dim, &idx[..p], C::one());
                let after = Form::monomial(self.dim, &idx[p + 1..], C::one());
                let piece = before.wedge(&d_basis(i)).wedge(&after).scale(c);
                out = if p % 2 == 0 { out + piece } else { out - piece };
            }
        }
        out
    }

    /// Human-readable rendering with the given labels.
    pub fn render(&self, labels: &[String]) -> String
    where
        C: fmt::Display,
    {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let legs: Vec<&str> = mask_indices(*m)
                    .into_iter()
                    .map(|i| labels.get(i).map_or("?", String::as_str))
                    .collect();
                if legs.is_empty() {
                    format!("{}", c)
                } else {
                    format!("({})*{}", c, legs.join("^"))
                }
            })
            .collect();
        parts.join(" + ")
    }
}

impl<C: fmt::Debug> fmt::Debug for Form<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Form[{}](", self.degree)?;
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (n, (m, c)) in self.terms.iter().enumerate() {
            let legs: Vec<String> = mask_indices(*m).iter().map(|i| format!("e{}", i + 1)).collect();
            let sep = if n == 0 { "" } else { " + " };
            write!(f, "{}({:?}){}", sep, c, legs.join("^"))?;
        }
        write!(f, ")")
    }
}

impl<C: Ring> Add for Form<C> {
    type Output = Form<C>;
    fn add(mut self, o: Form<C>) -> Form<C> {
        self.check_compatible(&o);
        assert!(
            self.degree == o.degree || self.is_zero() || o.is_zero(),
            "sum of forms of different degree"
        );
        if self.is_zero() {
            return Form { dim: self.dim, ..o };
        }
        for (m, c) in o.terms {
            self.insert(m, c);
        }
        self
    }
}

impl<C: Ring> Sub for Form<C> {
    type Output = Form<C>;
    fn sub(self, o: Form<C>) -> Form<C> {
        self + (-o)
    }
}

impl<C: Ring> Neg for Form<C> {
    type Output = Form<C>;
    fn neg(self) -> Form<C> {
        self.map(|c| -c.clone())
    }
}

/// Index of the unordered pair `i < j` among `0..n` in lexicographic order.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// All pairs `i < j` in lexicographic order.
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect()
}

/// All triples `i < j < k` in lexicographic order.
pub fn triples(n: usize) -> Vec<(usize, usize, usize)> {
    (0..n)
        .flat_map(|i| (i + 1..n).flat_map(move |j| (j + 1..n).map(move |k| (i, j, k))))
        .collect()
}

/// A homogeneous geometry presented by a coframe with constant structure
/// coefficients: five base directions followed by `m ∈ {0, 1, 3}` vertical
/// directions, and optionally a declared so(3) connection.
#[derive(Clone, PartialEq)]
pub struct CoframeModel<T> {
    name: String,
    labels: Vec<String>,
    d_table: Vec<Form<T>>,
    connection: Option<[Form<T>; 3]>,
}

impl<T: Field> fmt::Debug for CoframeModel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CoframeModel {:?}", self.name)?;
        for (l, d) in self.labels.iter().zip(&self.d_table) {
            writeln!(f, "  d{} = {}", l, d.render(&self.labels))?;
        }
        if let Some(c) = &self.connection {
            for (i, g) in c.iter().enumerate() {
                writeln!(f, "  g{} = {}", i + 1, g.render(&self.labels))?;
            }
        }
        Ok(())
    }
}

impl<T: Field> CoframeModel<T> {
    /// Builds a model; `d_table[a]` is the 2-form `dθᵃ`.
    ///
    /// Fails on a fiber dimension other than 0, 1 or 3, on duplicate labels,
    /// or when a form has the wrong degree or ambient dimension. The Jacobi
    /// identity is not checked here; see [`CoframeModel::check_jacobi`].
    pub fn new(
        name: impl Into<String>,
        labels: Vec<String>,
        d_table: Vec<Form<T>>,
        connection: Option<[Form<T>; 3]>,
    ) -> Result<Self> {
        let n = labels.len();
        if ![5, 6, 8].contains(&n) {
            return Err(Error::dimension(format!(
                "{} coframe elements; expected 5 + m with m in {{0, 1, 3}}",
                n
            )));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::argument(format!("duplicate label {:?}", l)));
            }
        }
        if d_table.len() != n {
            return Err(Error::dimension("one differential per coframe element"));
        }
        if d_table.iter().any(|f| f.dim() != n || (f.degree() != 2)) {
            return Err(Error::dimension("differentials must be 2-forms on the coframe"));
        }
        if let Some(c) = &connection {
            if c.iter().any(|f| f.dim() != n || f.degree() != 1) {
                return Err(Error::dimension("connection components must be 1-forms"));
            }
        }
        Ok(CoframeModel {
            name: name.into(),
            labels,
            d_table,
            connection,
        })
    }

    /// Builds a model from `(coef, b, c)` triples per coframe element, with
    /// default labels `t1..t5` and `g1..gm` for vertical directions.
    pub fn from_triples(
        name: impl Into<String>,
        m: usize,
        table: Vec<Vec<(T, usize, usize)>>,
        connection: Option<[Vec<(T, usize)>; 3]>,
    ) -> Result<Self> {
        let n = BASE_DIM + m;
        let labels = default_labels(m);
        let d_table = table.iter().map(|t| Form::two_form(n, t)).collect();
        let connection = connection.map(|c| c.map(|t| Form::one_form(n, &t)));
        CoframeModel::new(name, labels, d_table, connection)
    }

    /// Model name.
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Renames the model.
    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Coframe labels.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Total coframe dimension `5 + m`.
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// Number of vertical directions `m`.
    pub fn n_fiber(&self) -> usize {
        self.dim() - BASE_DIM
    }

    /// `dθᵃ`.
    pub fn d_basis(&self, a: usize) -> &Form<T> {
        &self.d_table[a]
    }

    /// Declared connection `(γ¹, γ², γ³)`, if any.
    pub fn connection(&self) -> Option<&[Form<T>; 3]> {
        self.connection.as_ref()
    }

    /// Replaces the declared connection.
    pub fn with_connection(mut self, connection: Option<[Form<T>; 3]>) -> Self {
        self.connection = connection;
        self
    }

    /// The basis 1-form `θᵃ` on this coframe.
    pub fn theta(&self, a: usize) -> Form<T> {
        Form::basis(self.dim(), a)
    }

    /// Exterior derivative of a constant-coefficient form.
    pub fn ext_d(&self, f: &Form<T>) -> Form<T> {
        f.d_with(&|i| self.d_table[i].clone())
    }

    /// `d(dθᵃ)` for every coframe element.
    pub fn jacobi_residuals(&self) -> Vec<Form<T>> {
        self.d_table.iter().map(|f| self.ext_d(f)).collect()
    }

    /// Largest coefficient of `d(dθᵃ)` over all `a`.
    pub fn jacobi_max_residual(&self) -> f64 {
        self.jacobi_residuals()
            .iter()
            .flat_map(|f| f.terms().map(|(_, c)| c.abs_f64()).collect::<Vec<_>>())
            .fold(0.0, f64::max)
    }

    /// Verifies `d∘d = 0` on the coframe.
    pub fn check_jacobi(&self, tol: f64) -> Result<()> {
        for (a, r) in self.jacobi_residuals().iter().enumerate() {
            if let Some((m, c)) = r.terms().find(|(_, c)| !c.is_negligible(tol)) {
                let legs: Vec<&str> = mask_indices(m)
                    .into_iter()
                    .map(|i| self.labels[i].as_str())
                    .collect();
                return Err(Error::structure(format!(
                    "d² ≠ 0: d(d{}) has coefficient {} on {}",
                    self.labels[a],
                    c,
                    legs.join("^")
                )));
            }
        }
        Ok(())
    }

    /// Converts coefficients into another field.
    pub fn convert<U: Field>(&self, f: impl Fn(&T) -> U) -> CoframeModel<U> {
        CoframeModel {
            name: self.name.clone(),
            labels: self.labels.clone(),
            d_table: self.d_table.iter().map(|d| d.map(&f)).collect(),
            connection: self
                .connection
                .as_ref()
                .map(|c| [c[0].map(&f), c[1].map(&f), c[2].map(&f)]),
        }
    }
}

/// Default coframe labels: `t1..t5` then `g1..gm`.
pub fn default_labels(m: usize) -> Vec<String> {
    let mut labels: Vec<String> = (1..=BASE_DIM).map(|i| format!("t{}", i)).collect();
    let vertical: Vec<usize> = match m {
        1 => vec![3],
        _ => (1..=m).collect(),
    };
    labels.extend(vertical.into_iter().map(|i| format!("g{}", i)));
    labels
}

/// The abelian model: five base directions, all differentials zero.
pub fn abelian_model<T: Field>() -> CoframeModel<T> {
    CoframeModel::from_triples("abelian", 0, vec![vec![]; BASE_DIM], None)
        .expect("abelian model is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::QSqrt3;
    use num_traits::One;

    type Q = QSqrt3;

    fn th(i: usize) -> Form<Q> {
        Form::basis(5, i)
    }

    #[test]
    fn wedge_is_antisymmetric() {
        assert!(th(0).wedge(&th(0)).is_zero());
        assert_eq!(th(0).wedge(&th(1)), -th(1).wedge(&th(0)));
    }

    #[test]
    fn kappa3_squared() {
        let k3 = Form::two_form(5, &[(Q::from_int(2), 1, 3), (Q::one(), 2, 4)]);
        let expected = Form::monomial(5, &[1, 2, 3, 4], Q::from_int(-4));
        assert_eq!(k3.wedge(&k3), expected);
    }

    #[test]
    fn star_examples() {
        let vol = Form::monomial(5, &[0, 1, 2, 3, 4], Q::one());
        assert_eq!(vol.hodge_star().unwrap(), Form::constant(5, Q::one()));
        assert_eq!(
            th(0).hodge_star().unwrap(),
            Form::monomial(5, &[1, 2, 3, 4], Q::one())
        );
        // θ¹²⁴∧θ³⁵ = −vol, so the convention α∧*α = vol forces a minus sign.
        assert_eq!(
            Form::monomial(5, &[0, 1, 3], Q::one()).hodge_star().unwrap(),
            Form::monomial(5, &[2, 4], -Q::one())
        );
    }

    #[test]
    fn star_rejects_vertical_legs() {
        assert!(Form::<Q>::basis(6, 5).hodge_star().is_err());
    }

    #[test]
    fn abelian_d_vanishes() {
        let m = abelian_model::<Q>();
        assert!(m.ext_d(&Form::monomial(5, &[1, 3], Q::one())).is_zero());
    }

    #[test]
    fn pair_index_is_lexicographic() {
        for (k, (i, j)) in pairs(7).into_iter().enumerate() {
            assert_eq!(pair_index(7, i, j), k);
        }
    }

    #[test]
    fn interior_product_signs() {
        let f = Form::monomial(5, &[0, 2], Q::one());
        assert_eq!(f.interior(0), th(2));
        assert_eq!(f.interior(2), -th(0));
    }
}
