//! Levi-Civita and characteristic connections of coframe models, their
//! torsion and curvature, the Bianchi identities, Ricci and Weyl tensors,
//! and the su(3)-valued Cartan connection.
//!
//! Connection 1-forms follow the structure equations
//! `dθⁱ + Γⁱⱼ∧θʲ = Tⁱ` and `dΓⁱⱼ + Γⁱₖ∧Γᵏⱼ = Kⁱⱼ`, with
//! `Γ = γ¹E₁ + γ²E₂ + γ³E₃`.

use crate::error::{Error, Result};
use crate::exterior::{pairs, CoframeModel, Form, BASE_DIM, BASE_MASK};
use crate::linalg::Matrix;
use crate::repr::{
    split_connection, two_form_matrix, upsilon_prime, ConnTensor, ConnectionSplit, CurvTensor,
};
use crate::scalar::Field;
use crate::upsilon::{sigma_embed, so3_basis};

/// A square matrix of differential forms.
pub type FormMatrix<T> = Vec<Vec<Form<T>>>;

/// Product of two matrices of forms, entrywise by wedge.
pub fn wedge_matrices<T: Field>(a: &FormMatrix<T>, b: &FormMatrix<T>) -> FormMatrix<T> {
    let n = a.len();
    let dim = a[0][0].dim();
    let deg = a[0][0].degree() + b[0][0].degree();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    (0..n).fold(Form::zero(dim, deg), |acc, k| acc + a[i][k].wedge(&b[k][j]))
                })
                .collect()
        })
        .collect()
}

fn matrix_combine<T: Field>(
    a: &FormMatrix<T>,
    b: &FormMatrix<T>,
    f: impl Fn(&Form<T>, &Form<T>) -> Form<T>,
) -> FormMatrix<T> {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| f(x, y)).collect())
        .collect()
}

fn forms_max_abs<'a, T: Field + 'a>(forms: impl IntoIterator<Item = &'a Form<T>>) -> f64 {
    forms
        .into_iter()
        .flat_map(|f| f.terms().map(|(_, c)| c.abs_f64()).collect::<Vec<_>>())
        .fold(0.0, f64::max)
}

/// The 5×5 matrix `Γ = Σ_I γᴵ E_I` of 1-forms.
pub fn so3_matrix<T: Field>(gamma: &[Form<T>; 3]) -> FormMatrix<T> {
    let e = so3_basis::<T>();
    let dim = gamma[0].dim();
    let deg = gamma[0].degree();
    (0..5)
        .map(|i| {
            (0..5)
                .map(|j| {
                    (0..3).fold(Form::zero(dim, deg), |acc, a| acc + gamma[a].scale(&e[a][(i, j)]))
                })
                .collect()
        })
        .collect()
}

/// The Levi-Civita connection of a model, `ωⁱⱼ = ξ_ijk θᵏ + Σ_a V^a_ij θᵃ`
/// over base directions `k` and vertical directions `a`.
#[derive(Clone, Debug)]
pub struct LeviCivita<T> {
    /// Horizontal coefficients.
    pub xi: ConnTensor<T>,
    /// Vertical coefficients, one antisymmetric 5×5 matrix per vertical
    /// direction.
    pub vertical: Vec<Matrix<T>>,
}

impl<T: Field> LeviCivita<T> {
    /// The connection 1-forms `ωⁱⱼ` on a coframe of dimension `dim`.
    pub fn forms(&self, dim: usize) -> FormMatrix<T> {
        (0..5)
            .map(|i| {
                (0..5)
                    .map(|j| {
                        let mut terms: Vec<(T, usize)> =
                            (0..5).map(|k| (self.xi.get(i, j, k), k)).collect();
                        for (a, v) in self.vertical.iter().enumerate() {
                            terms.push((v[(i, j)].clone(), BASE_DIM + a));
                        }
                        Form::one_form(dim, &terms)
                    })
                    .collect()
            })
            .collect()
    }
}

/// Solves `dθⁱ + ωⁱⱼ∧θʲ = 0` for an antisymmetric `ω`.
///
/// The horizontal part comes from a 50×50 linear system; the vertical part
/// is read off the mixed terms of `dθⁱ`, which must be antisymmetric in
/// `(i, j)`. Fails when `dθⁱ` has purely vertical terms or the mixed terms
/// are not metric, since then no such `ω` exists.
pub fn levi_civita<T: Field>(model: &CoframeModel<T>, tol: f64) -> Result<LeviCivita<T>> {
    let n = model.dim();
    let mut rows = Vec::with_capacity(50);
    let mut rhs = Vec::with_capacity(50);
    for i in 0..5 {
        let d = model.d_basis(i);
        for (b, c) in pairs(5) {
            // coefficient of θ^bc in dθⁱ equals ξ_ibc − ξ_icb
            let mut row = vec![T::zero(); 50];
            for (j, k, s) in [(b, c, 1i64), (c, b, -1)] {
                if i == j {
                    continue;
                }
                let (p, q, sign) = if i < j { (i, j, s) } else { (j, i, -s) };
                let at = crate::repr::conn_index(p, q, k);
                row[at] = row[at].clone() + T::from_int(sign);
            }
            rows.push(row);
            rhs.push(d.coeff(&[b, c]));
        }
    }
    let system = Matrix::from_rows(rows)?;
    let x = system.solve(&rhs, tol)?;
    let xi = ConnTensor::from_vector(&x)?;

    let mut vertical = Vec::with_capacity(n - BASE_DIM);
    for a in BASE_DIM..n {
        let v = Matrix::from_fn(5, 5, |i, j| model.d_basis(i).coeff(&[j, a]));
        let sym = v.add(&v.transpose())?;
        if !sym.is_negligible(tol) {
            return Err(Error::structure(format!(
                "mixed terms of dθ along {} are not metric",
                model.labels()[a]
            )));
        }
        vertical.push(v);
    }
    for i in 0..5 {
        let vv = model.d_basis(i).terms().any(|(m, c)| {
            m & BASE_MASK == 0 && !c.is_negligible(tol)
        });
        if vv {
            return Err(Error::structure(format!(
                "d{} has purely vertical terms",
                model.labels()[i]
            )));
        }
    }
    let lc = LeviCivita { xi, vertical };

    let omega = lc.forms(n);
    for i in 0..5 {
        let r = (0..5).fold(model.d_basis(i).clone(), |acc, j| {
            acc + omega[i][j].wedge(&model.theta(j))
        });
        if forms_max_abs([&r]) > tol.max(0.0) * 10.0 && !r.terms().all(|(_, c)| c.is_negligible(tol))
        {
            return Err(Error::Singular(format!(
                "Levi-Civita back-substitution fails for d{}",
                model.labels()[i]
            )));
        }
    }
    Ok(lc)
}

/// Outcome of the nearly-integrability test `Γ̊_{m(ji}Υ_{kl)m} = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct NearlyIntegrable {
    /// True when the structure is nearly integrable.
    pub flag: bool,
    /// Largest entry of `Υ′(Γ̊)`.
    pub prime_residual: f64,
    /// Largest coordinate of the part of `Γ̊` outside `ker Υ′`.
    pub remainder_residual: f64,
}

/// Tests nearly integrability by evaluating Υ′ on the horizontal
/// Levi-Civita coefficients, and independently by splitting them.
pub fn nearly_integrable<T: Field>(model: &CoframeModel<T>, tol: f64) -> Result<NearlyIntegrable> {
    let lc = levi_civita(model, tol)?;
    let prime = upsilon_prime(&lc.xi);
    let split = split_connection(&lc.xi);
    Ok(NearlyIntegrable {
        flag: prime.is_negligible(tol),
        prime_residual: prime.max_abs(),
        remainder_residual: split.remainder.max_abs(),
    })
}

/// The characteristic connection of a nearly integrable model.
#[derive(Clone, Debug)]
pub struct Characteristic<T> {
    /// `(γ¹, γ², γ³)` on the model's coframe.
    pub gamma: [Form<T>; 3],
    /// Torsion 3-form `T`.
    pub torsion: Form<T>,
    /// The Levi-Civita connection it was derived from.
    pub levi_civita: LeviCivita<T>,
    /// Splitting of the horizontal Levi-Civita coefficients.
    pub split: ConnectionSplit<T>,
    /// Whether it equals the model's declared connection, if one is declared.
    pub matches_declared: Option<bool>,
}

impl<T: Field> Characteristic<T> {
    /// `Tⁱ = ι_{eᵢ}T = ½T_ijk θʲ∧θᵏ`.
    pub fn torsion_vector(&self) -> Vec<Form<T>> {
        (0..5).map(|i| self.torsion.interior(i)).collect()
    }

    /// `Γ = Σ γᴵE_I`.
    pub fn matrix(&self) -> FormMatrix<T> {
        so3_matrix(&self.gamma)
    }
}

/// Computes the unique so(3) connection with totally skew torsion.
///
/// Fails with a structure error carrying the Υ′ residual when the model is
/// not nearly integrable, or when the vertical part of the Levi-Civita
/// connection is not so(3)-valued.
pub fn characteristic_connection<T: Field>(
    model: &CoframeModel<T>,
    tol: f64,
) -> Result<Characteristic<T>> {
    let lc = levi_civita(model, tol)?;
    let split = split_connection(&lc.xi);
    if !split.remainder.is_negligible(tol) {
        let residual = upsilon_prime(&lc.xi).max_abs();
        return Err(Error::structure(format!(
            "not nearly integrable: Υ′ residual {:.3e}",
            residual
        )));
    }
    let n = model.dim();
    let e = so3_basis::<T>();
    let ten = T::from_int(10);
    let mut coeffs: [Vec<(T, usize)>; 3] = std::array::from_fn(|a| {
        (0..5)
            .map(|k| (split.gamma_coeffs[a][k].clone(), k))
            .collect()
    });
    for (v_idx, v) in lc.vertical.iter().enumerate() {
        let c: Vec<T> = (0..3)
            .map(|a| crate::repr::frobenius_dot(v, &e[a]) / ten.clone())
            .collect();
        let rebuilt = (0..3).fold(Matrix::zeros(5, 5), |acc: Matrix<T>, a| {
            acc.add(&e[a].scale(&c[a])).expect("5x5")
        });
        if !v.sub(&rebuilt)?.is_negligible(tol) {
            return Err(Error::structure(format!(
                "vertical Levi-Civita part along {} is not so(3)-valued",
                model.labels()[BASE_DIM + v_idx]
            )));
        }
        for a in 0..3 {
            coeffs[a].push((c[a].clone(), BASE_DIM + v_idx));
        }
    }
    let gamma: [Form<T>; 3] = std::array::from_fn(|a| Form::one_form(n, &coeffs[a]));
    let torsion = split.torsion_form(n);
    let matches_declared = model.connection().map(|declared| {
        declared
            .iter()
            .zip(&gamma)
            .all(|(d, g)| (d.clone() - g.clone()).terms().all(|(_, c)| c.is_negligible(tol)))
    });
    Ok(Characteristic {
        gamma,
        torsion,
        levi_civita: lc,
        split,
        matches_declared,
    })
}

/// The torsion `Tⁱ = dθⁱ + Γⁱⱼ∧θʲ` of an arbitrary so(3) connection.
pub fn torsion_of<T: Field>(model: &CoframeModel<T>, gamma: &[Form<T>; 3]) -> Vec<Form<T>> {
    let g = so3_matrix(gamma);
    (0..5)
        .map(|i| {
            (0..5).fold(model.d_basis(i).clone(), |acc, j| {
                acc + g[i][j].wedge(&model.theta(j))
            })
        })
        .collect()
}

/// Curvature of an so(3) connection.
#[derive(Clone, Debug)]
pub struct Curvature<T> {
    /// `rᴵ = dγᴵ + ½εᴵ_JK γᴶ∧γᴷ`.
    pub r: [Form<T>; 3],
    /// `K = Σ rᴵ E_I` as a tensor.
    pub k: CurvTensor<T>,
}

impl<T: Field> Curvature<T> {
    /// Coefficients `rᴵ_jk` in the normalization `rᴵ = (√3/2) rᴵ_jk θʲ∧θᵏ`,
    /// as antisymmetric matrices.
    pub fn normalized(&self) -> [Matrix<T>; 3] {
        let s = T::one() / T::sqrt3();
        std::array::from_fn(|a| {
            two_form_matrix(&self.r[a].restrict(BASE_MASK))
                .expect("horizontal 2-form")
                .scale(&s)
        })
    }

    /// `Kⁱⱼ` as a matrix of 2-forms.
    pub fn matrix(&self) -> FormMatrix<T> {
        so3_matrix(&self.r)
    }
}

/// Computes `rᴵ` and `K` for the connection `γ`; the curvature must be
/// horizontal.
pub fn curvature<T: Field>(model: &CoframeModel<T>, gamma: &[Form<T>; 3]) -> Result<Curvature<T>> {
    let d = |f: &Form<T>| model.ext_d(f);
    let r = [
        d(&gamma[0]) + gamma[1].wedge(&gamma[2]),
        d(&gamma[1]) + gamma[2].wedge(&gamma[0]),
        d(&gamma[2]) + gamma[0].wedge(&gamma[1]),
    ];
    if r.iter().any(|f| !f.is_horizontal()) {
        return Err(Error::structure(
            "curvature of the connection has vertical legs; the model is inconsistent",
        ));
    }
    let k = CurvTensor::from_so3(&r)?;
    Ok(Curvature { r, k })
}

/// Residuals of the two Bianchi identities.
#[derive(Clone, Debug, PartialEq)]
pub struct BianchiResiduals {
    /// Largest coefficient of `Kⁱⱼ∧θʲ − DTⁱ`.
    pub first: f64,
    /// Largest coefficient of `DKⁱⱼ`.
    pub second: f64,
    /// True when both residual forms vanish (exactly for exact inputs).
    pub holds: bool,
}

/// Evaluates both Bianchi identities for a connection, its torsion vector
/// `Tⁱ` and its curvature matrix `Kⁱⱼ`.
pub fn bianchi_check<T: Field>(
    model: &CoframeModel<T>,
    gamma: &[Form<T>; 3],
    torsion: &[Form<T>],
    k: &FormMatrix<T>,
    tol: f64,
) -> BianchiResiduals {
    let g = so3_matrix(gamma);
    let first: Vec<Form<T>> = (0..5)
        .map(|i| {
            let kt = (0..5).fold(Form::zero(model.dim(), 3), |acc, j| {
                acc + k[i][j].wedge(&model.theta(j))
            });
            let dt = (0..5).fold(model.ext_d(&torsion[i]), |acc, j| {
                acc + g[i][j].wedge(&torsion[j])
            });
            kt - dt
        })
        .collect();
    let dk: FormMatrix<T> = k.iter().map(|row| row.iter().map(|f| model.ext_d(f)).collect()).collect();
    let gk = wedge_matrices(&g, k);
    let kg = wedge_matrices(k, &g);
    let second = matrix_combine(&matrix_combine(&dk, &gk, |a, b| a.clone() + b.clone()), &kg, |a, b| {
        a.clone() - b.clone()
    });
    let all_small = first
        .iter()
        .chain(second.iter().flatten())
        .all(|f| f.terms().all(|(_, c)| c.is_negligible(tol)));
    BianchiResiduals {
        first: forms_max_abs(&first),
        second: forms_max_abs(second.iter().flatten()),
        holds: all_small,
    }
}

/// The Riemann tensor `R_ijkl` of the Levi-Civita connection, from
/// `Ωⁱⱼ = dωⁱⱼ + ωⁱₖ∧ωᵏⱼ = Σ_{k<l} R_ijkl θ^kl`.
pub fn riemann<T: Field>(model: &CoframeModel<T>, lc: &LeviCivita<T>) -> Result<CurvTensor<T>> {
    let w = lc.forms(model.dim());
    let dw: FormMatrix<T> = w.iter().map(|r| r.iter().map(|f| model.ext_d(f)).collect()).collect();
    let omega = matrix_combine(&dw, &wedge_matrices(&w, &w), |a, b| a.clone() + b.clone());
    CurvTensor::from_forms(&omega)
}

/// Ricci tensors and the relation between them.
#[derive(Clone, Debug)]
pub struct RicciReport<T> {
    /// Ricci tensor of the Levi-Civita connection.
    pub ric_lc: Matrix<T>,
    /// Ricci tensor `K_ijil` of the characteristic connection.
    pub ric_gamma: Matrix<T>,
    /// `¼ T_ikl T_jkl`.
    pub torsion_square: Matrix<T>,
    /// `dT`.
    pub dt: Form<T>,
    /// `*d*T` as an antisymmetric matrix.
    pub codiff: Matrix<T>,
    /// Largest entry of `Ric^LC − Ric^Γ − ¼T² − ½*d*T`.
    pub relation_residual: f64,
    /// True when the relation holds (exactly for exact inputs).
    pub relation_holds: bool,
    /// True when `Ric^Γ` is symmetric.
    pub ric_gamma_symmetric: bool,
    /// True when `*d*T = 0`.
    pub codiff_zero: bool,
}

impl<T: Field> RicciReport<T> {
    /// `Ric^Γ symmetric ⟺ *d*T = 0` on this model.
    pub fn codifferential_equivalence(&self) -> bool {
        self.ric_gamma_symmetric == self.codiff_zero
    }
}

/// Ricci tensors of a nearly integrable model.
///
/// `Ric^LC` is computed directly from the Levi-Civita curvature for every
/// fiber dimension, so the relation with `Ric^Γ` is an independent check.
pub fn ricci<T: Field>(model: &CoframeModel<T>, ch: &Characteristic<T>, curv: &Curvature<T>, tol: f64) -> Result<RicciReport<T>> {
    let riem = riemann(model, &ch.levi_civita)?;
    let ric_lc = riem.contraction();
    let ric_gamma = curv.k.contraction();
    let t = ConnTensor::from_three_form(&ch.torsion.restrict(BASE_MASK))?;
    let quarter = T::from_ratio(1, 4);
    let torsion_square = Matrix::from_fn(5, 5, |i, j| {
        let mut s = T::zero();
        for k in 0..5 {
            for l in 0..5 {
                s = s + t.get(i, k, l) * t.get(j, k, l);
            }
        }
        s * quarter.clone()
    });
    let dt = model.ext_d(&ch.torsion);
    let d_star = model.ext_d(&ch.torsion.hodge_star()?);
    if !d_star.is_horizontal() {
        return Err(Error::structure("d*T has vertical legs"));
    }
    let codiff = two_form_matrix(&d_star.hodge_star()?)?;
    let rhs = ric_gamma
        .add(&torsion_square)?
        .add(&codiff.scale(&T::from_ratio(1, 2)))?;
    let diff = ric_lc.sub(&rhs)?;
    let ric_gamma_symmetric = ric_gamma.sub(&ric_gamma.transpose())?.is_negligible(tol);
    let codiff_zero = codiff.is_negligible(tol);
    Ok(RicciReport {
        relation_residual: diff.max_abs(),
        relation_holds: diff.is_negligible(tol),
        ric_lc,
        ric_gamma,
        torsion_square,
        dt,
        codiff,
        ric_gamma_symmetric,
        codiff_zero,
    })
}

/// Weyl tensor of a Riemann tensor in dimension five.
#[derive(Clone, Debug)]
pub struct Weyl<T> {
    /// `W = R − P⊙g` with Schouten tensor `P = (Ric − s/8 g)/3`.
    pub tensor: CurvTensor<T>,
    /// Largest entry of `W`.
    pub max_abs: f64,
    /// True when `W = 0`.
    pub conformally_flat: bool,
}

/// Weyl decomposition for the convention `Ric_jl = R_ijil`.
pub fn weyl<T: Field>(riem: &CurvTensor<T>, tol: f64) -> Weyl<T> {
    let ric = riem.contraction();
    let s = ric.trace();
    let p = ric
        .sub(&Matrix::identity(5).scale(&(s * T::from_ratio(1, 8))))
        .expect("5x5")
        .scale(&T::from_ratio(1, 3));
    let delta = |a: usize, b: usize| if a == b { T::one() } else { T::zero() };
    let tensor = CurvTensor::from_fn(|i, j, k, l| {
        let kn = p[(i, k)].clone() * delta(j, l) + p[(j, l)].clone() * delta(i, k)
            - p[(i, l)].clone() * delta(j, k)
            - p[(j, k)].clone() * delta(i, l);
        riem.get(i, j, k, l) - kn
    });
    Weyl {
        max_abs: tensor.max_abs(),
        conformally_flat: tensor.is_negligible(tol),
        tensor,
    }
}

/// The su(3)-valued Cartan connection `Γ_C = A + iB` and its curvature.
#[derive(Clone, Debug)]
pub struct CartanSu3<T> {
    /// Real part `A` of `Γ_C`, built from `γᴵ`.
    pub connection_re: FormMatrix<T>,
    /// Imaginary part `B = σ(θ)` of `Γ_C`.
    pub connection_im: FormMatrix<T>,
    /// `Re Ω = dA + A∧A − B∧B`.
    pub omega_re: FormMatrix<T>,
    /// `Im Ω = dB + A∧B + B∧A`.
    pub omega_im: FormMatrix<T>,
    /// Largest entry of `Re Ω − (K − κᴵE_I)` in the 3×3 representation.
    pub real_residual: f64,
    /// Largest entry of `Im Ω − σ(Tⁱ)`.
    pub imag_residual: f64,
    /// Largest entry of `DΩ = dΩ + Γ_C∧Ω − Ω∧Γ_C`.
    pub bianchi_residual: f64,
    /// True when `Ω = 0`.
    pub flat: bool,
}

fn so3_3x3<T: Field>(c: &[Form<T>; 3]) -> FormMatrix<T> {
    let z = Form::zero(c[0].dim(), c[0].degree());
    vec![
        vec![z.clone(), c[2].clone(), c[1].clone()],
        vec![-c[2].clone(), z.clone(), c[0].clone()],
        vec![-c[1].clone(), -c[0].clone(), z],
    ]
}

fn sigma_forms<T: Field>(v: &[Form<T>]) -> FormMatrix<T> {
    let dim = v[0].dim();
    let deg = v[0].degree();
    (0..3)
        .map(|r| {
            (0..3)
                .map(|c| {
                    (0..5).fold(Form::zero(dim, deg), |acc, a| {
                        let mut e = vec![T::zero(); 5];
                        e[a] = T::one();
                        let s = sigma_embed(&e)[(r, c)].clone();
                        acc + v[a].scale(&s)
                    })
                })
                .collect()
        })
        .collect()
}

/// The 2-forms `κᴵ = ½ (E_I)_ij θ^ij` on a coframe of dimension `dim`.
pub fn kappa_forms<T: Field>(dim: usize) -> [Form<T>; 3] {
    let e = so3_basis::<T>();
    std::array::from_fn(|a| {
        let terms: Vec<(T, usize, usize)> = pairs(5)
            .into_iter()
            .map(|(i, j)| (e[a][(i, j)].clone(), i, j))
            .collect();
        Form::two_form(dim, &terms)
    })
}

/// Builds the Cartan connection of `(θ, γ)` and checks the splitting of
/// its curvature and its Bianchi identity.
pub fn cartan_su3<T: Field>(
    model: &CoframeModel<T>,
    gamma: &[Form<T>; 3],
    torsion: &[Form<T>],
    r: &[Form<T>; 3],
    tol: f64,
) -> CartanSu3<T> {
    let n = model.dim();
    let a = so3_3x3(gamma);
    let theta: Vec<Form<T>> = (0..5).map(|i| model.theta(i)).collect();
    let b = sigma_forms(&theta);
    let d = |m: &FormMatrix<T>| -> FormMatrix<T> {
        m.iter().map(|row| row.iter().map(|f| model.ext_d(f)).collect()).collect()
    };
    let add = |x: &FormMatrix<T>, y: &FormMatrix<T>| matrix_combine(x, y, |p, q| p.clone() + q.clone());
    let sub = |x: &FormMatrix<T>, y: &FormMatrix<T>| matrix_combine(x, y, |p, q| p.clone() - q.clone());
    let omega_re = sub(&add(&d(&a), &wedge_matrices(&a, &a)), &wedge_matrices(&b, &b));
    let omega_im = add(&add(&d(&b), &wedge_matrices(&a, &b)), &wedge_matrices(&b, &a));

    let kappa = kappa_forms::<T>(n);
    let shifted: [Form<T>; 3] = std::array::from_fn(|i| r[i].clone() - kappa[i].clone());
    let real_diff = sub(&omega_re, &so3_3x3(&shifted));
    let imag_diff = sub(&omega_im, &sigma_forms(torsion));

    // DΩ with Γ_C = A + iB and Ω = R + iI splits into
    // real: dR + A∧R − R∧A − (B∧I − I∧B), imaginary: dI + A∧I − I∧A + B∧R − R∧B.
    let db_re = sub(
        &sub(&add(&d(&omega_re), &wedge_matrices(&a, &omega_re)), &wedge_matrices(&omega_re, &a)),
        &sub(&wedge_matrices(&b, &omega_im), &wedge_matrices(&omega_im, &b)),
    );
    let db_im = add(
        &sub(&add(&d(&omega_im), &wedge_matrices(&a, &omega_im)), &wedge_matrices(&omega_im, &a)),
        &sub(&wedge_matrices(&b, &omega_re), &wedge_matrices(&omega_re, &b)),
    );
    let negligible = |m: &FormMatrix<T>| {
        m.iter()
            .flatten()
            .all(|f| f.terms().all(|(_, c)| c.is_negligible(tol)))
    };
    CartanSu3 {
        real_residual: forms_max_abs(real_diff.iter().flatten()),
        imag_residual: forms_max_abs(imag_diff.iter().flatten()),
        bianchi_residual: forms_max_abs(db_re.iter().flatten().chain(db_im.iter().flatten())),
        flat: negligible(&omega_re) && negligible(&omega_im),
        connection_re: a,
        connection_im: b,
        omega_re,
        omega_im,
    }
}

/// The full pipeline for one model.
#[derive(Clone, Debug)]
pub struct Geometry<T> {
    /// Characteristic connection and torsion.
    pub characteristic: Characteristic<T>,
    /// Its curvature.
    pub curvature: Curvature<T>,
    /// Bianchi residuals.
    pub bianchi: BianchiResiduals,
    /// Ricci tensors.
    pub ricci: RicciReport<T>,
    /// Riemann tensor of the Levi-Civita connection.
    pub riemann: CurvTensor<T>,
    /// Weyl tensor.
    pub weyl: Weyl<T>,
    /// Cartan su(3) connection.
    pub cartan: CartanSu3<T>,
}

/// Runs Jacobi, characteristic connection, curvature, Bianchi, Ricci,
/// Weyl and Cartan computations.
pub fn analyze<T: Field>(model: &CoframeModel<T>, tol: f64) -> Result<Geometry<T>> {
    model.check_jacobi(tol)?;
    let characteristic = characteristic_connection(model, tol)?;
    let curvature = curvature(model, &characteristic.gamma)?;
    let tv = characteristic.torsion_vector();
    let bianchi = bianchi_check(model, &characteristic.gamma, &tv, &curvature.matrix(), tol);
    let ricci = ricci(model, &characteristic, &curvature, tol)?;
    let riemann = riemann(model, &characteristic.levi_civita)?;
    let weyl = weyl(&riemann, tol);
    let cartan = cartan_su3(model, &characteristic.gamma, &tv, &curvature.r, tol);
    Ok(Geometry {
        characteristic,
        curvature,
        bianchi,
        ricci,
        riemann,
        weyl,
        cartan,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::abelian_model;
    use crate::scalar::QSqrt3;

    type Q = QSqrt3;

    #[test]
    fn abelian_is_flat() {
        let m = abelian_model::<Q>();
        let g = analyze(&m, 0.0).unwrap();
        assert!(g.characteristic.torsion.is_zero());
        assert!(g.curvature.k.is_negligible(0.0));
        assert!(g.weyl.conformally_flat);
        assert!(g.ricci.relation_holds);
    }

    #[test]
    fn koszul_oracle_on_random_structure() {
        // dθ⁰ = θ¹∧θ², dθ³ = 2θ⁰∧θ⁴: not Jacobi-consistent, but the first
        // structure equation is still uniquely solvable.
        let m = CoframeModel::from_triples(
            "k",
            0,
            vec![
                vec![(Q::one(), 1, 2)],
                vec![],
                vec![],
                vec![(Q::from_int(2), 0, 4)],
                vec![],
            ],
            None,
        )
        .unwrap();
        let lc = levi_civita(&m, 0.0).unwrap();
        // C^i_jk with dθⁱ = ½ C^i_jk θ^jk.
        let c = |i: usize, j: usize, k: usize| -> Q {
            let f = m.d_basis(i);
            if j < k {
                f.coeff(&[j, k])
            } else if j > k {
                -f.coeff(&[k, j])
            } else {
                Q::zero()
            }
        };
        for i in 0..5 {
            for j in 0..5 {
                for k in 0..5 {
                    let expect = (c(i, j, k) - c(j, i, k) - c(k, i, j)) * Q::from_ratio(1, 2);
                    assert_eq!(lc.xi.get(i, j, k), expect, "xi_{}{}{}", i, j, k);
                }
            }
        }
    }

    use num_traits::{One, Zero};
}
