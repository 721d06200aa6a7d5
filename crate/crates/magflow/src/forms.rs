//! Differential 1-forms and 2-forms as component fields, the Lorentz force
//! operator and finite-difference exterior-derivative checks.
//!
//! A 2-form stores only its strict upper triangle, so antisymmetry holds by
//! construction. Dimensions stay small (2 to 4), full matrices are assembled
//! on demand.

use crate::error::{Error, Result};
use crate::geometry::{Chart, Metric};
use nalgebra::{DMatrix, DVector};
use std::fmt;
use std::sync::Arc;

pub type VectorFn = Arc<dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync>;
pub type UpperTriangleFn = Arc<dyn Fn(&DVector<f64>) -> Vec<f64> + Send + Sync>;

/// Number of strict upper-triangle entries in dimension d.
pub fn triangle_len(d: usize) -> usize {
    d * (d - 1) / 2
}

/// Index of (i, j), i < j, in row-major upper-triangle order.
pub fn triangle_index(d: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < d);
    i * d - i * (i + 1) / 2 + (j - i - 1)
}

/// A 1-form σ = σ_i dq^i given by its component vector at each point.
#[derive(Clone)]
pub struct OneForm {
    dim: usize,
    components: VectorFn,
}

impl fmt::Debug for OneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OneForm").field("dim", &self.dim).finish()
    }
}

impl OneForm {
    pub fn new(dim: usize, components: VectorFn) -> Self {
        OneForm { dim, components }
    }

    pub fn zero(dim: usize) -> Self {
        OneForm::new(dim, Arc::new(move |_q| DVector::zeros(dim)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn at(&self, q: &DVector<f64>) -> DVector<f64> {
        (self.components)(q)
    }

    /// Pairing σ(v).
    pub fn apply(&self, q: &DVector<f64>, v: &DVector<f64>) -> f64 {
        self.at(q).dot(v)
    }

    /// Pointwise sum.
    pub fn add(&self, other: &OneForm) -> OneForm {
        assert_eq!(self.dim, other.dim);
        let a = self.components.clone();
        let b = other.components.clone();
        OneForm::new(self.dim, Arc::new(move |q| a(q) + b(q)))
    }
}

/// A 2-form B = Σ_{i<j} b_ij dq^i ∧ dq^j stored by its strict upper triangle.
#[derive(Clone)]
pub struct TwoForm {
    dim: usize,
    upper: UpperTriangleFn,
}

impl fmt::Debug for TwoForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TwoForm").field("dim", &self.dim).finish()
    }
}

impl TwoForm {
    pub fn new(dim: usize, upper: UpperTriangleFn) -> Self {
        TwoForm { dim, upper }
    }

    pub fn zero(dim: usize) -> Self {
        let len = triangle_len(dim);
        TwoForm::new(dim, Arc::new(move |_q| vec![0.0; len]))
    }

    /// Constant-coefficient form from upper-triangle entries.
    pub fn constant(dim: usize, upper: Vec<f64>) -> Self {
        assert_eq!(upper.len(), triangle_len(dim));
        TwoForm::new(dim, Arc::new(move |_q| upper.clone()))
    }

    /// Planar form B(q) dx ∧ dy from a scalar coefficient field.
    pub fn planar(coefficient: Arc<dyn Fn(&DVector<f64>) -> f64 + Send + Sync>) -> Self {
        TwoForm::new(2, Arc::new(move |q| vec![coefficient(q)]))
    }

    /// Encodes a vector field on Euclidean 3-space as the 2-form with
    /// B(u, v) = <u, v × Bvec>.
    pub fn from_vector_field_3d(bvec: VectorFn) -> Self {
        TwoForm::new(
            3,
            Arc::new(move |q| {
                let b = bvec(q);
                // b_12 = B_z, b_13 = -B_y, b_23 = B_x
                vec![b[2], -b[1], b[0]]
            }),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn upper_at(&self, q: &DVector<f64>) -> Vec<f64> {
        (self.upper)(q)
    }

    /// Full antisymmetric matrix b_ij at q.
    pub fn matrix_at(&self, q: &DVector<f64>) -> DMatrix<f64> {
        let d = self.dim;
        let ut = self.upper_at(q);
        let mut m = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in (i + 1)..d {
                let v = ut[triangle_index(d, i, j)];
                m[(i, j)] = v;
                m[(j, i)] = -v;
            }
        }
        m
    }

    /// Evaluation B(u, v) = u^T b v.
    pub fn apply(&self, q: &DVector<f64>, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        (u.transpose() * self.matrix_at(q) * v)[(0, 0)]
    }

    /// Pointwise sum.
    pub fn add(&self, other: &TwoForm) -> TwoForm {
        assert_eq!(self.dim, other.dim);
        let a = self.upper.clone();
        let b = other.upper.clone();
        TwoForm::new(
            self.dim,
            Arc::new(move |q| {
                let mut out = a(q);
                for (x, y) in out.iter_mut().zip(b(q)) {
                    *x += y;
                }
                out
            }),
        )
    }

    /// Pointwise scaling by a scalar field.
    pub fn scaled(&self, factor: Arc<dyn Fn(&DVector<f64>) -> f64 + Send + Sync>) -> TwoForm {
        let inner = self.upper.clone();
        TwoForm::new(
            self.dim,
            Arc::new(move |q| {
                let s = factor(q);
                inner(q).into_iter().map(|v| v * s).collect()
            }),
        )
    }

    /// Wedge of two 1-forms: (α ∧ β)_ij = α_i β_j − α_j β_i.
    pub fn wedge(alpha: &OneForm, beta: &OneForm) -> TwoForm {
        assert_eq!(alpha.dim(), beta.dim());
        let d = alpha.dim();
        let a = alpha.clone();
        let b = beta.clone();
        TwoForm::new(
            d,
            Arc::new(move |q| {
                let av = a.at(q);
                let bv = b.at(q);
                let mut out = Vec::with_capacity(triangle_len(d));
                for i in 0..d {
                    for j in (i + 1)..d {
                        out.push(av[i] * bv[j] - av[j] * bv[i]);
                    }
                }
                out
            }),
        )
    }
}

/// The Lorentz operator Y at q: the g-antisymmetric endomorphism with
/// B(u, v) = g(u, Y v), i.e. Y = g^{-1} b.
pub fn lorentz_map(metric: &Metric, field: &TwoForm, q: &DVector<f64>) -> Result<DMatrix<f64>> {
    if field.dim() != metric.dim() {
        return Err(Error::DimensionMismatch(format!(
            "field dim {} vs metric dim {}",
            field.dim(),
            metric.dim()
        )));
    }
    let ginv = metric.inverse_at(q)?;
    Ok(ginv * field.matrix_at(q))
}

/// Which kind of form a derivative check applies to.
pub enum FormRef<'a> {
    One(&'a OneForm),
    Two(&'a TwoForm),
}

/// Max-norm of the numerical exterior derivative at q (central differences,
/// step h), optionally against a target:
/// for a 1-form the target is a 2-form dσ, for a 2-form the target is zero.
pub fn exterior_derivative_residual(
    form: FormRef<'_>,
    chart: &Chart,
    q: &DVector<f64>,
    h: f64,
    target: Option<&TwoForm>,
) -> Result<f64> {
    match form {
        FormRef::One(sigma) => {
            let d_num = one_form_exterior_derivative(sigma, chart, q, h)?;
            let reference = match target {
                Some(t) => t.matrix_at(q),
                None => DMatrix::zeros(sigma.dim(), sigma.dim()),
            };
            Ok((d_num - reference).amax())
        }
        FormRef::Two(b) => {
            if target.is_some() {
                return Err(Error::DimensionMismatch(
                    "targets for 2-form derivatives are not supported".into(),
                ));
            }
            two_form_closedness_residual(b, chart, q, h)
        }
    }
}

/// Matrix (dσ)_ij = ∂_i σ_j − ∂_j σ_i by central differences.
pub fn one_form_exterior_derivative(
    sigma: &OneForm,
    chart: &Chart,
    q: &DVector<f64>,
    h: f64,
) -> Result<DMatrix<f64>> {
    let d = sigma.dim();
    let grads = component_gradients(|p| sigma.at(p), chart, q, h, d)?;
    let mut out = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            out[(i, j)] = grads[i][j] - grads[j][i];
        }
    }
    Ok(out)
}

/// Max |(dB)_ijk| = |∂_i b_jk − ∂_j b_ik + ∂_k b_ij| over i < j < k.
pub fn two_form_closedness_residual(
    b: &TwoForm,
    chart: &Chart,
    q: &DVector<f64>,
    h: f64,
) -> Result<f64> {
    let d = b.dim();
    if d < 3 {
        // no 3-forms in dimension 2: every 2-form is closed
        return Ok(0.0);
    }
    let mats = matrix_gradients(|p| b.matrix_at(p), chart, q, h, d)?;
    let mut worst = 0.0_f64;
    for i in 0..d {
        for j in (i + 1)..d {
            for k in (j + 1)..d {
                let v = mats[i][(j, k)] - mats[j][(i, k)] + mats[k][(i, j)];
                worst = worst.max(v.abs());
            }
        }
    }
    Ok(worst)
}

fn component_gradients<F: Fn(&DVector<f64>) -> DVector<f64>>(
    eval: F,
    chart: &Chart,
    q: &DVector<f64>,
    h: f64,
    d: usize,
) -> Result<Vec<DVector<f64>>> {
    chart.check_inside(q)?;
    let mut out = Vec::with_capacity(d);
    for l in 0..d {
        let mut qp = q.clone();
        let mut qm = q.clone();
        qp[l] += h;
        qm[l] -= h;
        if !chart.is_periodic(l) && (!chart.contains(&qp) || !chart.contains(&qm)) {
            return Err(Error::InsufficientMargin(format!(
                "direction {l} at {:?} with step {h:.3e}",
                q.as_slice()
            )));
        }
        out.push((eval(&qp) - eval(&qm)) / (2.0 * h));
    }
    Ok(out)
}

fn matrix_gradients<F: Fn(&DVector<f64>) -> DMatrix<f64>>(
    eval: F,
    chart: &Chart,
    q: &DVector<f64>,
    h: f64,
    d: usize,
) -> Result<Vec<DMatrix<f64>>> {
    chart.check_inside(q)?;
    let mut out = Vec::with_capacity(d);
    for l in 0..d {
        let mut qp = q.clone();
        let mut qm = q.clone();
        qp[l] += h;
        qm[l] -= h;
        if !chart.is_periodic(l) && (!chart.contains(&qp) || !chart.contains(&qm)) {
            return Err(Error::InsufficientMargin(format!(
                "direction {l} at {:?} with step {h:.3e}",
                q.as_slice()
            )));
        }
        out.push((eval(&qp) - eval(&qm)) / (2.0 * h));
    }
    Ok(out)
}
