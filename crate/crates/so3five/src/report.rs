//! Serializable classification reports.
//!
//! [`GeometryReport`] aggregates the pipeline of [`connection::analyze`]
//! together with the irreducible decompositions of torsion and curvature
//! and the spinor obstruction. [`TorsionReport`] covers the intrinsic
//! torsion of a structure that need not be nearly integrable. Scalars are
//! written in the scalar grammar so exact values survive serialization;
//! matrices are row-major.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

use crate::catalog::{self, CatalogEntry, ExpectationCheck, Params};
use crate::connection::{self, analyze, Geometry};
use crate::error::{Error, Result};
use crate::exterior::{CoframeModel, Form, BASE_MASK};
use crate::linalg::Matrix;
use crate::repr::{
    decompose_curvature, split_connection, torsion_type, two_form_matrix, CurvatureComponent,
    TorsionClass,
};
use crate::scalar::{norm_f64, parse_scalar, Field, Scalar};
use crate::spin::{spinor_obstruction, SpinorObstruction};

/// A residual together with the tolerance it was judged against.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Residual {
    /// Largest absolute coefficient.
    pub value: f64,
    /// Tolerance used for float coefficients.
    pub tol: f64,
    /// Whether the underlying computation was exact, in which case only an
    /// exact zero passes.
    pub exact: bool,
    /// Verdict.
    pub pass: bool,
}

impl Residual {
    /// A residual judged by `value <= tol`, or `value == 0` when exact.
    pub fn new(value: f64, tol: f64, exact: bool) -> Self {
        let pass = if exact { value == 0.0 } else { value <= tol };
        Residual {
            value,
            tol,
            exact,
            pass,
        }
    }

    /// A residual whose verdict was computed elsewhere.
    pub fn with_verdict(value: f64, tol: f64, exact: bool, pass: bool) -> Self {
        Residual {
            value,
            tol,
            exact,
            pass,
        }
    }
}

/// One irreducible component with its coefficients and norm.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Component {
    /// Name of the irreducible summand.
    pub name: String,
    /// Shape of `coefficients`: `[]` for a scalar, `[5]` for a vector,
    /// `[5, 5]` for a matrix.
    pub shape: Vec<usize>,
    /// Coefficients, row-major.
    pub coefficients: Vec<String>,
    /// Euclidean norm of the coefficients.
    pub norm: f64,
    /// Whether the component is present at the tolerance.
    pub present: bool,
}

impl Component {
    fn matrix<T: Field>(name: impl Into<String>, m: &Matrix<T>, present: bool) -> Self {
        Component {
            name: name.into(),
            shape: vec![m.rows(), m.cols()],
            coefficients: m.as_slice().iter().map(|c| c.to_string()).collect(),
            norm: m.frobenius(),
            present,
        }
    }

    fn vector<T: Field>(name: impl Into<String>, v: &[T], present: bool) -> Self {
        Component {
            name: name.into(),
            shape: vec![v.len()],
            coefficients: v.iter().map(|c| c.to_string()).collect(),
            norm: norm_f64(v),
            present,
        }
    }

    fn scalar<T: Field>(name: impl Into<String>, s: &T, present: bool) -> Self {
        Component {
            name: name.into(),
            shape: vec![],
            coefficients: vec![s.to_string()],
            norm: s.abs_f64(),
            present,
        }
    }
}

fn matrix_rows<T: Field>(m: &Matrix<T>) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|r| m.row(r).iter().map(|c| c.to_string()).collect())
        .collect()
}

fn form_is_exact<T: Field>(f: &Form<T>) -> bool {
    f.terms().all(|(_, c)| c.is_exact())
}

/// True when every structure coefficient and declared connection
/// coefficient is exact.
pub fn model_is_exact<T: Field>(model: &CoframeModel<T>) -> bool {
    let d = (0..model.dim()).all(|a| form_is_exact(model.d_basis(a)));
    let c = model
        .connection()
        .is_none_or(|g| g.iter().all(form_is_exact));
    d && c
}

/// Nearly integrability verdict.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NearlyIntegrableSection {
    /// True when `Υ′(Γ̊) = 0`.
    pub flag: bool,
    /// Largest entry of `Υ′(Γ̊)`.
    pub prime_residual: Residual,
    /// Largest coordinate of `Γ̊` outside `so(3)⊗ℝ⁵ ⊕ Λ³ℝ⁵`.
    pub remainder: f64,
}

/// Torsion of the characteristic connection.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TorsionSection {
    /// `T` rendered with the model's labels.
    pub form: String,
    /// Class of `*T`.
    pub class: TorsionClass,
    /// Parts of `*T` in `Λ²₃` and `Λ²₇`.
    pub components: Vec<Component>,
    /// Whether the characteristic connection equals the declared one.
    pub matches_declared: Option<bool>,
}

/// Curvature of the characteristic connection.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvatureSection {
    /// `γᴵ` rendered with the model's labels.
    pub gamma: [String; 3],
    /// `rᴵ` rendered with the model's labels.
    pub r: [String; 3],
    /// Coefficients `rᴵ_jk` in the normalization `rᴵ = (√3/2) rᴵ_jk θʲ∧θᵏ`.
    pub r_normalized: [Vec<Vec<String>>; 3],
    /// Type string such as `⊙²₁⊕⊙²₉`.
    #[serde(rename = "type")]
    pub type_string: String,
    /// The six irreducible components.
    pub components: Vec<Component>,
}

/// Bianchi identities.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BianchiSection {
    /// `Kⁱⱼ∧θʲ − DTⁱ`.
    pub first: Residual,
    /// `DKⁱⱼ`.
    pub second: Residual,
}

/// Ricci tensors, `dT` and `*d*T`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RicciSection {
    /// `Ric^LC`.
    pub ric_lc: Vec<Vec<String>>,
    /// `Ric^Γ`.
    pub ric_gamma: Vec<Vec<String>>,
    /// `¼ T_ikl T_jkl`.
    pub torsion_square: Vec<Vec<String>>,
    /// `dT` rendered with the model's labels.
    pub dt: String,
    /// `*d*T` as an antisymmetric matrix.
    pub codifferential: Vec<Vec<String>>,
    /// `Ric^LC − Ric^Γ − ¼T² − ½*d*T`.
    pub relation: Residual,
    /// Whether `Ric^Γ` is symmetric.
    pub ric_gamma_symmetric: bool,
    /// Whether `*d*T = 0`.
    pub codifferential_zero: bool,
    /// Whether the two previous flags agree.
    pub codifferential_equivalence: bool,
    /// Scalar curvature `tr Ric^LC`.
    pub scalar_curvature: String,
    /// Whether `Ric^LC` is a multiple of the metric.
    pub einstein: bool,
    /// `λ` with `Ric^LC = λg`, when Einstein.
    pub einstein_constant: Option<String>,
}

/// Weyl tensor of the Levi-Civita connection.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeylSection {
    /// Largest entry of `W`.
    pub residual: Residual,
    /// Whether `W = 0`.
    pub conformally_flat: bool,
}

/// Cartan su(3) connection.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CartanSection {
    /// Whether the curvature `Ω` vanishes.
    pub flat: bool,
    /// `Re Ω − (K − κᴵE_I)`.
    pub real_residual: Residual,
    /// `Im Ω − σ(Tⁱ)`.
    pub imag_residual: Residual,
    /// `DΩ`.
    pub bianchi_residual: Residual,
}

/// Expected properties of a catalog entry compared with the computation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CatalogComparison {
    /// Entry name.
    pub entry: String,
    /// Resolved parameters.
    pub params: BTreeMap<String, String>,
    /// One line per asserted property.
    pub checks: Vec<ExpectationCheck>,
    /// Whether every check passes.
    pub all_pass: bool,
}

/// The full classification of a nearly integrable model.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeometryReport {
    /// Model name.
    pub name: String,
    /// Dimension of the coframe.
    pub dim: usize,
    /// Number of fiber directions.
    pub fiber_dim: usize,
    /// Tolerance for float coefficients.
    pub tol: f64,
    /// Whether every input coefficient is exact.
    pub exact: bool,
    /// Nearly integrability.
    pub nearly_integrable: NearlyIntegrableSection,
    /// Torsion.
    pub torsion: TorsionSection,
    /// Curvature.
    pub curvature: CurvatureSection,
    /// Bianchi identities.
    pub bianchi: BianchiSection,
    /// Ricci tensors.
    pub ricci: RicciSection,
    /// Weyl tensor.
    pub weyl: WeylSection,
    /// Cartan connection.
    pub cartan: CartanSection,
    /// Parallel-spinor obstruction.
    pub spinor: SpinorObstruction,
    /// Expected-versus-computed table for catalog models.
    pub catalog: Option<CatalogComparison>,
}

impl GeometryReport {
    /// Analyzes `model` and assembles the report.
    ///
    /// Fails with a structure error when the Jacobi identity fails or the
    /// model is not nearly integrable.
    pub fn new<T: Field>(model: &CoframeModel<T>, tol: f64) -> Result<Self> {
        let g = analyze(model, tol)?;
        Self::from_geometry(model, &g, tol)
    }

    /// Assembles the report from a finished analysis.
    pub fn from_geometry<T: Field>(model: &CoframeModel<T>, g: &Geometry<T>, tol: f64) -> Result<Self> {
        let exact = model_is_exact(model);
        let labels = model.labels();
        let ni = connection::nearly_integrable(model, tol)?;

        let ch = &g.characteristic;
        let tt = torsion_type(&ch.torsion.restrict(BASE_MASK), tol)?;
        let torsion = TorsionSection {
            form: ch.torsion.render(labels),
            class: tt.class,
            components: vec![
                Component::matrix("Λ²₃", &tt.t3, matches!(tt.class, TorsionClass::PureL3 | TorsionClass::Mixed)),
                Component::matrix("Λ²₇", &tt.t7, matches!(tt.class, TorsionClass::PureL7 | TorsionClass::Mixed)),
            ],
            matches_declared: ch.matches_declared,
        };

        let dec = decompose_curvature(&g.curvature.k, tol);
        let mut components = Vec::new();
        for (c, present) in CurvatureComponent::ALL.iter().zip(dec.present) {
            let name = c.to_string();
            components.push(match c {
                CurvatureComponent::S1 => Component::scalar(name, &dec.scalar, present),
                CurvatureComponent::L3 => Component::matrix(name, &dec.l3, present),
                CurvatureComponent::L7 => Component::matrix(name, &dec.l7, present),
                CurvatureComponent::S5 => Component::matrix(name, &dec.s5, present),
                CurvatureComponent::S9 => Component::matrix(name, &dec.s9, present),
                CurvatureComponent::L1 => Component::vector(name, &dec.l1, present),
            });
        }
        let normalized = g.curvature.normalized();
        let curvature = CurvatureSection {
            gamma: std::array::from_fn(|a| ch.gamma[a].render(labels)),
            r: std::array::from_fn(|a| g.curvature.r[a].render(labels)),
            r_normalized: std::array::from_fn(|a| matrix_rows(&normalized[a])),
            type_string: dec.type_string(),
            components,
        };

        let ric = &g.ricci;
        let lambda = ric.ric_lc.trace() / T::from_int(5);
        let einstein = catalog::is_einstein(&ric.ric_lc, tol);
        let ricci = RicciSection {
            ric_lc: matrix_rows(&ric.ric_lc),
            ric_gamma: matrix_rows(&ric.ric_gamma),
            torsion_square: matrix_rows(&ric.torsion_square),
            dt: ric.dt.render(labels),
            codifferential: matrix_rows(&ric.codiff),
            relation: Residual::with_verdict(ric.relation_residual, tol, exact, ric.relation_holds),
            ric_gamma_symmetric: ric.ric_gamma_symmetric,
            codifferential_zero: ric.codiff_zero,
            codifferential_equivalence: ric.codifferential_equivalence(),
            scalar_curvature: ric.ric_lc.trace().to_string(),
            einstein,
            einstein_constant: einstein.then(|| lambda.to_string()),
        };

        let spinor = spinor_obstruction(&normalized, tol)?;
        Ok(GeometryReport {
            name: model.name().to_string(),
            dim: model.dim(),
            fiber_dim: model.dim() - 5,
            tol,
            exact,
            nearly_integrable: NearlyIntegrableSection {
                flag: ni.flag,
                prime_residual: Residual::with_verdict(ni.prime_residual, tol, exact, ni.flag),
                remainder: ni.remainder_residual,
            },
            torsion,
            curvature,
            bianchi: BianchiSection {
                first: Residual::with_verdict(g.bianchi.first, tol, exact, g.bianchi.holds),
                second: Residual::with_verdict(g.bianchi.second, tol, exact, g.bianchi.holds),
            },
            ricci,
            weyl: WeylSection {
                residual: Residual::with_verdict(g.weyl.max_abs, tol, exact, g.weyl.conformally_flat),
                conformally_flat: g.weyl.conformally_flat,
            },
            cartan: CartanSection {
                flat: g.cartan.flat,
                real_residual: Residual::new(g.cartan.real_residual, tol, exact),
                imag_residual: Residual::new(g.cartan.imag_residual, tol, exact),
                bianchi_residual: Residual::new(g.cartan.bianchi_residual, tol, exact),
            },
            spinor,
            catalog: None,
        })
    }

    /// Every internal consistency check passes: Bianchi, the Ricci
    /// relation, the codifferential equivalence and the Cartan identities.
    /// Catalog expectations are not included.
    pub fn consistent(&self) -> bool {
        self.bianchi.first.pass
            && self.bianchi.second.pass
            && self.ricci.relation.pass
            && self.ricci.codifferential_equivalence
            && self.cartan.real_residual.pass
            && self.cartan.imag_residual.pass
            && self.cartan.bianchi_residual.pass
    }

    /// Renders the report as indented plain text.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut line = |k: &str, v: String| s.push_str(&format!("{:<24}{}\n", k, v));
        line("model", format!("{} (dim {}, fiber {})", self.name, self.dim, self.fiber_dim));
        line("arithmetic", if self.exact { "exact".into() } else { format!("float, tol {:e}", self.tol) });
        line(
            "nearly integrable",
            format!("{} (Υ′ residual {:e})", self.nearly_integrable.flag, self.nearly_integrable.prime_residual.value),
        );
        line("torsion T", self.torsion.form.clone());
        line("torsion type", self.torsion.class.to_string());
        if let Some(m) = self.torsion.matches_declared {
            line("declared connection", if m { "matches".into() } else { "differs".into() });
        }
        for (a, r) in self.curvature.r.iter().enumerate() {
            line(&format!("r{}", a + 1), r.clone());
        }
        line("curvature type", self.curvature.type_string.clone());
        let norms: Vec<String> = self
            .curvature
            .components
            .iter()
            .map(|c| format!("{} {:.6}", c.name, c.norm))
            .collect();
        line("component norms", norms.join(", "));
        line("Bianchi", pass_word(self.bianchi.first.pass && self.bianchi.second.pass));
        line("Ricci relation", pass_word(self.ricci.relation.pass));
        line("Ric^Γ symmetric", self.ricci.ric_gamma_symmetric.to_string());
        line("*d*T = 0", self.ricci.codifferential_zero.to_string());
        line("dT", self.ricci.dt.clone());
        line("scalar curvature", self.ricci.scalar_curvature.clone());
        line(
            "Einstein",
            match &self.ricci.einstein_constant {
                Some(l) => format!("true (λ = {})", l),
                None => "false".into(),
            },
        );
        line("conformally flat", self.weyl.conformally_flat.to_string());
        line("Cartan su(3) flat", self.cartan.flat.to_string());
        line(
            "parallel spinors",
            format!("{} (curvature flat: {})", self.spinor.solution_dim, self.spinor.flat),
        );
        if let Some(c) = &self.catalog {
            let params: Vec<String> = c.params.iter().map(|(k, v)| format!("{}={}", k, v)).collect();
            line("catalog entry", format!("{}({})", c.entry, params.join(", ")));
            for chk in &c.checks {
                let diff = chk.diff.map(|d| format!(" diff {:e}", d)).unwrap_or_default();
                line(
                    &format!("  {}", chk.property),
                    format!("{}: expected {} computed {}{}", pass_word(chk.pass), chk.expected, chk.computed, diff),
                );
            }
        }
        s
    }
}

fn pass_word(p: bool) -> String {
    if p { "pass" } else { "FAIL" }.into()
}

/// Classifies a parsed model, attaching the expected-versus-computed table
/// when the model came from a catalog entry.
pub fn classify(model: &CoframeModel<Scalar>, tol: f64, origin: Option<&CatalogOrigin>) -> Result<GeometryReport> {
    let g = analyze(model, tol)?;
    let mut report = GeometryReport::from_geometry(model, &g, tol)?;
    if let Some(o) = origin {
        let checks = o.entry.expected(&o.params)?.compare(&g, tol)?;
        let resolved = o.entry.resolve(&o.params)?;
        report.catalog = Some(CatalogComparison {
            entry: o.entry.name.to_string(),
            params: resolved.iter().map(|(k, v)| (k.clone(), v.to_string())).collect(),
            all_pass: checks.iter().all(|c| c.pass),
            checks,
        });
    }
    Ok(report)
}

/// The catalog entry and parameters a model file was generated from.
///
/// Stored in model JSON under the optional key `"catalog"` as
/// `{"entry": name, "params": {k: scalar-string}}`.
#[derive(Clone, Debug)]
pub struct CatalogOrigin {
    /// The entry.
    pub entry: &'static CatalogEntry,
    /// Parameters as given.
    pub params: Params,
}

impl CatalogOrigin {
    /// Reads the `"catalog"` key of a model document, if present.
    pub fn from_model_value(v: &Value) -> Result<Option<Self>> {
        let Some(c) = v.get("catalog") else {
            return Ok(None);
        };
        let name = c
            .get("entry")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Schema {
                pointer: "/catalog/entry".into(),
                msg: "entry must be a string".into(),
            })?;
        let entry = catalog::entry(name)?;
        let mut params = Params::new();
        if let Some(p) = c.get("params") {
            let p = p.as_object().ok_or_else(|| Error::Schema {
                pointer: "/catalog/params".into(),
                msg: "params must be an object".into(),
            })?;
            for (k, s) in p {
                let text = s.as_str().ok_or_else(|| Error::Schema {
                    pointer: format!("/catalog/params/{}", k),
                    msg: "parameter values are scalar strings".into(),
                })?;
                params.insert(k.clone(), parse_scalar(text)?);
            }
        }
        entry.resolve(&params)?;
        Ok(Some(CatalogOrigin { entry, params }))
    }

    /// The `"catalog"` value for a model document.
    pub fn to_value(&self) -> Value {
        let params: serde_json::Map<String, Value> = self
            .params
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.to_string())))
            .collect();
        json!({ "entry": self.entry.name, "params": params })
    }
}

/// Decomposition of the intrinsic torsion, defined for every structure.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TorsionReport {
    /// Model name.
    pub name: String,
    /// Tolerance for float coefficients.
    pub tol: f64,
    /// Nearly integrability.
    pub nearly_integrable: NearlyIntegrableSection,
    /// Norms of the three summands of the horizontal Levi-Civita
    /// coefficients: `so(3)⊗ℝ⁵`, `Λ³ℝ⁵` and the remainder.
    pub connection_split: Vec<Component>,
    /// The totally skew part as a 3-form (the torsion `T` when nearly
    /// integrable).
    pub skew_part: String,
    /// Class of the dual of the skew part.
    pub class: TorsionClass,
    /// Parts of the dual in `Λ²₃` and `Λ²₇`.
    pub components: Vec<Component>,
}

/// Splits the horizontal Levi-Civita coefficients and the dual of their
/// skew part. Only the Jacobi identity is required.
pub fn decompose_torsion<T: Field>(model: &CoframeModel<T>, tol: f64) -> Result<TorsionReport> {
    model.check_jacobi(tol)?;
    let exact = model_is_exact(model);
    let ni = connection::nearly_integrable(model, tol)?;
    let lc = connection::levi_civita(model, tol)?;
    let split = split_connection(&lc.xi);
    let skew = split.torsion_form(5);
    let tt = torsion_type(&skew, tol)?;
    let dual = two_form_matrix(&skew.hodge_star()?)?;
    let gamma_flat: Vec<T> = split.gamma_coeffs.iter().flatten().cloned().collect();
    let remainder = split.remainder.max_abs();
    Ok(TorsionReport {
        name: model.name().to_string(),
        tol,
        nearly_integrable: NearlyIntegrableSection {
            flag: ni.flag,
            prime_residual: Residual::with_verdict(ni.prime_residual, tol, exact, ni.flag),
            remainder: ni.remainder_residual,
        },
        connection_split: vec![
            Component::vector("so(3)⊗ℝ⁵", &gamma_flat, !gamma_flat.iter().all(|c| c.is_negligible(tol))),
            Component::matrix("Λ³ℝ⁵ (as *-dual)", &dual, !dual.is_negligible(tol)),
            Component {
                name: "remainder".into(),
                shape: vec![],
                coefficients: vec![],
                norm: split.remainder.norm_sq().to_f64().max(0.0).sqrt(),
                present: if exact { remainder != 0.0 } else { remainder > tol },
            },
        ],
        skew_part: skew.render(&model.labels()[..5]),
        class: tt.class,
        components: vec![
            Component::matrix("Λ²₃", &tt.t3, matches!(tt.class, TorsionClass::PureL3 | TorsionClass::Mixed)),
            Component::matrix("Λ²₇", &tt.t7, matches!(tt.class, TorsionClass::PureL7 | TorsionClass::Mixed)),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{entry, torsion_free_model};
    use crate::scalar::QSqrt3;

    #[test]
    fn torsion_free_report() {
        let m = torsion_free_model(QSqrt3::from_int(1));
        let r = GeometryReport::new(&m, 1e-9).unwrap();
        assert!(r.exact);
        assert!(r.nearly_integrable.flag);
        assert_eq!(r.torsion.class, TorsionClass::Zero);
        assert!(r.ricci.einstein);
        assert_eq!(r.ricci.einstein_constant.as_deref(), Some("6"));
        assert!(r.consistent());
        let v = serde_json::to_value(&r).unwrap();
        assert!(v.get("spinor").is_some());
        assert_eq!(v["bianchi"]["first"]["tol"], json!(1e-9));
    }

    #[test]
    fn catalog_comparison_attached() {
        let e = entry("tor27").unwrap();
        let origin = CatalogOrigin {
            entry: e,
            params: Params::new(),
        };
        let m = e.build(&Params::new(), 1e-9).unwrap();
        let r = classify(&m, 1e-9, Some(&origin)).unwrap();
        let c = r.catalog.unwrap();
        assert!(c.all_pass, "{:?}", c.checks);
        assert_eq!(r.torsion.class, TorsionClass::PureL7);
        assert_eq!(r.curvature.type_string, "⊙²₁⊕⊙²₉");
    }

    #[test]
    fn origin_round_trip() {
        let e = entry("tor23").unwrap();
        let params = catalog::parse_params(["rho=2", "delta=1"]).unwrap();
        let o = CatalogOrigin { entry: e, params };
        let doc = json!({ "catalog": o.to_value() });
        let back = CatalogOrigin::from_model_value(&doc).unwrap().unwrap();
        assert_eq!(back.entry.name, "tor23");
        assert_eq!(back.params, o.params);
        let bad = json!({ "catalog": { "entry": "tor23", "params": { "nope": "1" } } });
        assert!(CatalogOrigin::from_model_value(&bad).is_err());
    }

    #[test]
    fn torsion_report_for_non_integrable_model() {
        let m = CoframeModel::<QSqrt3>::from_triples(
            "heisenberg",
            0,
            vec![vec![], vec![], vec![], vec![], vec![(QSqrt3::from_int(1), 0, 1)]],
            None,
        )
        .unwrap();
        let r = decompose_torsion(&m, 1e-9).unwrap();
        let total: f64 = r.connection_split.iter().map(|c| c.norm).sum();
        assert!(total > 0.0);
        assert_eq!(r.connection_split.len(), 3);
    }
}
