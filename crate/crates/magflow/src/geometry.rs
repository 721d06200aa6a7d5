//! Charts, Riemannian metrics, Christoffel symbols and collar coordinates.
//!
//! A scenario carries one global chart (periodic identifications allowed).
//! Metrics are point-to-matrix maps; Christoffel symbols come from an
//! analytic closure when the scenario supplies one and from central finite
//! differences otherwise. The collar describes the boundary-distance
//! function n and the projection onto the boundary, valid for n below the
//! collar width.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use std::fmt;
use std::sync::Arc;

pub type DomainFn = Arc<dyn Fn(&DVector<f64>) -> bool + Send + Sync>;
pub type MetricFn = Arc<dyn Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync>;
pub type ChristoffelFn = Arc<dyn Fn(&DVector<f64>) -> Vec<DMatrix<f64>> + Send + Sync>;
pub type ScalarFn = Arc<dyn Fn(&DVector<f64>) -> f64 + Send + Sync>;
pub type PointFn = Arc<dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync>;

/// A global coordinate chart on the open interior of a scenario domain.
#[derive(Clone)]
pub struct Chart {
    dim: usize,
    names: Vec<String>,
    periodic: Vec<bool>,
    domain: DomainFn,
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Chart")
            .field("dim", &self.dim)
            .field("names", &self.names)
            .field("periodic", &self.periodic)
            .finish()
    }
}

impl Chart {
    pub fn new(names: &[&str], periodic: &[bool], domain: DomainFn) -> Self {
        assert!(names.len() >= 2, "charts need dimension >= 2");
        assert_eq!(names.len(), periodic.len());
        Chart {
            dim: names.len(),
            names: names.iter().map(|s| s.to_string()).collect(),
            periodic: periodic.to_vec(),
            domain,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coordinate_names(&self) -> &[String] {
        &self.names
    }

    pub fn is_periodic(&self, i: usize) -> bool {
        self.periodic[i]
    }

    /// True iff q lies in the open interior.
    pub fn contains(&self, q: &DVector<f64>) -> bool {
        q.len() == self.dim && q.iter().all(|x| x.is_finite()) && (self.domain)(q)
    }

    pub fn check_inside(&self, q: &DVector<f64>) -> Result<()> {
        if self.contains(q) {
            Ok(())
        } else {
            Err(Error::OutsideDomain(format!("{:?}", q.as_slice())))
        }
    }

    /// Angles wrapped to [0, 2π) for reporting; non-periodic entries pass through.
    pub fn normalize_output(&self, q: &DVector<f64>) -> DVector<f64> {
        let tau = std::f64::consts::TAU;
        DVector::from_iterator(
            self.dim,
            q.iter().enumerate().map(|(i, &x)| {
                if self.periodic[i] {
                    x.rem_euclid(tau)
                } else {
                    x
                }
            }),
        )
    }
}

/// A Riemannian metric on a chart: point -> symmetric positive-definite matrix.
#[derive(Clone)]
pub struct Metric {
    chart: Arc<Chart>,
    at: MetricFn,
    christoffels: Option<ChristoffelFn>,
    fd_step: f64,
}

impl fmt::Debug for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Metric")
            .field("chart", &self.chart)
            .field("analytic_christoffels", &self.christoffels.is_some())
            .field("fd_step", &self.fd_step)
            .finish()
    }
}

impl Metric {
    pub fn new(chart: Arc<Chart>, at: MetricFn) -> Self {
        Metric {
            chart,
            at,
            christoffels: None,
            fd_step: 1e-5,
        }
    }

    pub fn with_christoffels(mut self, gamma: ChristoffelFn) -> Self {
        self.christoffels = Some(gamma);
        self
    }

    /// Flat metric (identity matrix) on the given chart.
    pub fn euclidean(chart: Arc<Chart>) -> Self {
        let d = chart.dim();
        let zero: ChristoffelFn = Arc::new(move |_q| vec![DMatrix::zeros(d, d); d]);
        Metric::new(chart.clone(), Arc::new(move |_q| DMatrix::identity(d, d)))
            .with_christoffels(zero)
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    /// Metric matrix at q. Errors if q is outside the chart domain.
    pub fn at(&self, q: &DVector<f64>) -> Result<DMatrix<f64>> {
        self.chart.check_inside(q)?;
        Ok((self.at)(q))
    }

    /// Metric matrix without the domain check, for hot paths that already
    /// validated the point.
    pub fn at_unchecked(&self, q: &DVector<f64>) -> DMatrix<f64> {
        (self.at)(q)
    }

    /// Inverse metric at q.
    pub fn inverse_at(&self, q: &DVector<f64>) -> Result<DMatrix<f64>> {
        let g = self.at(q)?;
        g.clone().try_inverse().ok_or_else(|| {
            Error::NotPositiveDefinite(format!("singular metric at {:?}", q.as_slice()))
        })
    }

    /// Checks symmetry (1e-12) and positive eigenvalues at q.
    pub fn validate_spd(&self, q: &DVector<f64>) -> Result<()> {
        let g = self.at(q)?;
        let d = g.nrows();
        for i in 0..d {
            for j in (i + 1)..d {
                if (g[(i, j)] - g[(j, i)]).abs() > 1e-12 {
                    return Err(Error::NotPositiveDefinite(format!(
                        "asymmetry {:.3e} at ({i},{j})",
                        (g[(i, j)] - g[(j, i)]).abs()
                    )));
                }
            }
        }
        let eig = g.symmetric_eigenvalues();
        let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        if min <= 0.0 {
            return Err(Error::NotPositiveDefinite(format!(
                "minimum eigenvalue {min:.3e} at {:?}",
                q.as_slice()
            )));
        }
        Ok(())
    }

    /// Christoffel symbols Γ^k_ij at q, indexed as result[k][(i, j)].
    ///
    /// Uses the analytic closure when present; otherwise central finite
    /// differences of the metric with one automatic step-halving retry
    /// when the stencil would leave the domain.
    pub fn christoffels_at(&self, q: &DVector<f64>) -> Result<Vec<DMatrix<f64>>> {
        self.chart.check_inside(q)?;
        if let Some(gamma) = &self.christoffels {
            return Ok(gamma(q));
        }
        let d = self.dim();
        let scale = q.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
        let mut h = self.fd_step * scale;

        // One halving retry near the domain edge, then give up.
        let mut grads = None;
        for _ in 0..2 {
            match self.metric_gradient(q, h) {
                Ok(g) => {
                    grads = Some(g);
                    break;
                }
                Err(_) => h *= 0.5,
            }
        }
        let dg = grads.ok_or_else(|| {
            Error::InsufficientMargin(format!("{:?} with step {h:.3e}", q.as_slice()))
        })?;

        let ginv = self.inverse_at(q)?;
        let mut out = vec![DMatrix::zeros(d, d); d];
        for k in 0..d {
            for i in 0..d {
                for j in 0..d {
                    let mut s = 0.0;
                    for l in 0..d {
                        s += ginv[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                    }
                    out[k][(i, j)] = 0.5 * s;
                }
            }
        }
        // The formula is symmetric in (i, j) up to finite-difference noise;
        // symmetrize so downstream contractions see it exactly.
        for m in out.iter_mut() {
            let sym = (m.clone() + m.transpose()) * 0.5;
            *m = sym;
        }
        Ok(out)
    }

    /// dg[l][(i, j)] = ∂_l g_ij by central differences.
    fn metric_gradient(&self, q: &DVector<f64>, h: f64) -> Result<Vec<DMatrix<f64>>> {
        let d = self.dim();
        let mut out = Vec::with_capacity(d);
        for l in 0..d {
            let mut qp = q.clone();
            let mut qm = q.clone();
            qp[l] += h;
            qm[l] -= h;
            if !self.chart.is_periodic(l)
                && (!self.chart.contains(&qp) || !self.chart.contains(&qm))
            {
                return Err(Error::InsufficientMargin(format!(
                    "direction {l} at {:?}",
                    q.as_slice()
                )));
            }
            let gp = (self.at)(&qp);
            let gm = (self.at)(&qm);
            out.push((gp - gm) / (2.0 * h));
        }
        Ok(out)
    }

    /// Squared g-norm of a tangent vector at q.
    pub fn norm_sq(&self, q: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
        let g = self.at(q)?;
        Ok((v.transpose() * g * v)[(0, 0)])
    }

    /// Squared g-norm of a covector at q (inverse-metric pairing).
    pub fn conorm_sq(&self, q: &DVector<f64>, p: &DVector<f64>) -> Result<f64> {
        let ginv = self.inverse_at(q)?;
        Ok((p.transpose() * ginv * p)[(0, 0)])
    }
}

/// Collar data: boundary distance, boundary projection and collar width.
#[derive(Clone)]
pub struct Collar {
    width: f64,
    distance: ScalarFn,
    /// Gradient of the distance function, used for escape-time extrapolation.
    distance_gradient: Option<PointFn>,
    projection: PointFn,
    normal_index: Option<usize>,
}

impl fmt::Debug for Collar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Collar")
            .field("width", &self.width)
            .field("normal_index", &self.normal_index)
            .finish()
    }
}

impl Collar {
    pub fn new(width: f64, distance: ScalarFn, projection: PointFn) -> Self {
        assert!(width > 0.0);
        Collar {
            width,
            distance,
            distance_gradient: None,
            projection,
            normal_index: None,
        }
    }

    pub fn with_distance_gradient(mut self, grad: PointFn) -> Self {
        self.distance_gradient = Some(grad);
        self
    }

    /// Marks which coordinate equals n in a collar-adapted chart.
    pub fn with_normal_index(mut self, idx: usize) -> Self {
        self.normal_index = Some(idx);
        self
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn normal_index(&self) -> Option<usize> {
        self.normal_index
    }

    /// Distance to the boundary; 0 exactly on the boundary.
    pub fn boundary_distance(&self, q: &DVector<f64>) -> f64 {
        (self.distance)(q)
    }

    /// Gradient of the boundary distance (unit covector near the boundary).
    pub fn distance_gradient(&self, q: &DVector<f64>) -> Option<DVector<f64>> {
        self.distance_gradient.as_ref().map(|g| g(q))
    }

    /// Boundary-chart coordinates of the nearest boundary point.
    pub fn project(&self, q: &DVector<f64>) -> DVector<f64> {
        (self.projection)(q)
    }

    /// True when q lies inside the collar neighbourhood.
    pub fn in_collar(&self, q: &DVector<f64>) -> bool {
        self.boundary_distance(q) < self.width
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn euclidean_disc() -> (Arc<Chart>, Metric) {
        let chart = Arc::new(Chart::new(
            &["x", "y"],
            &[false, false],
            Arc::new(|q: &DVector<f64>| q.norm() < 1.0),
        ));
        let metric = Metric::euclidean(chart.clone());
        (chart, metric)
    }

    /// Polar chart with g = diag(1, r^2), finite-difference Christoffels.
    fn polar_chart() -> Metric {
        let chart = Arc::new(Chart::new(
            &["r", "theta"],
            &[false, true],
            Arc::new(|q: &DVector<f64>| q[0] > 0.0 && q[0] < 1.0),
        ));
        Metric::new(
            chart,
            Arc::new(|q: &DVector<f64>| DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, q[0] * q[0]]))),
        )
    }

    #[test]
    fn euclidean_metric_is_identity() {
        let (_, metric) = euclidean_disc();
        let q = DVector::from_vec(vec![0.3, 0.4]);
        let g = metric.at(&q).unwrap();
        assert_eq!(g, DMatrix::identity(2, 2));
        metric.validate_spd(&q).unwrap();
    }

    #[test]
    fn metric_rejects_point_outside_domain() {
        let (_, metric) = euclidean_disc();
        let q = DVector::from_vec(vec![2.0, 0.0]);
        assert!(matches!(metric.at(&q), Err(Error::OutsideDomain(_))));
    }

    #[test]
    fn polar_metric_matches_definition() {
        let metric = polar_chart();
        let q = DVector::from_vec(vec![0.5, 1.0]);
        let g = metric.at(&q).unwrap();
        assert_relative_eq!(g[(0, 0)], 1.0);
        assert_relative_eq!(g[(1, 1)], 0.25);
        assert_relative_eq!(g[(0, 1)], 0.0);
    }

    #[test]
    fn euclidean_christoffels_vanish() {
        let (_, metric) = euclidean_disc();
        let q = DVector::from_vec(vec![0.1, -0.2]);
        let gamma = metric.christoffels_at(&q).unwrap();
        for m in &gamma {
            assert!(m.amax() < 1e-14);
        }
    }

    #[test]
    fn polar_christoffels_match_symbolic_values() {
        // Γ^r_θθ = -r and Γ^θ_rθ = Γ^θ_θr = 1/r.
        let metric = polar_chart();
        let q = DVector::from_vec(vec![0.5, 1.0]);
        let gamma = metric.christoffels_at(&q).unwrap();
        assert_relative_eq!(gamma[0][(1, 1)], -0.5, epsilon = 1e-8);
        assert_relative_eq!(gamma[1][(0, 1)], 2.0, epsilon = 1e-8);
        assert_relative_eq!(gamma[1][(1, 0)], 2.0, epsilon = 1e-8);
        assert!(gamma[0][(0, 0)].abs() < 1e-8);
        assert!(gamma[1][(1, 1)].abs() < 1e-8);
    }

    #[test]
    fn christoffels_symmetric_in_lower_indices() {
        let metric = polar_chart();
        let q = DVector::from_vec(vec![0.7, 2.0]);
        let gamma = metric.christoffels_at(&q).unwrap();
        for m in &gamma {
            assert!((m - m.transpose()).amax() < 1e-8);
        }
    }

    #[test]
    fn christoffels_retry_near_domain_edge() {
        // r close to the outer edge: the first stencil leaves the domain,
        // the halved one fits.
        let metric = polar_chart();
        let q = DVector::from_vec(vec![1.0 - 8e-6, 0.3]);
        let gamma = metric.christoffels_at(&q).unwrap();
        assert_relative_eq!(gamma[0][(1, 1)], -(1.0 - 8e-6), epsilon = 1e-5);
    }

    #[test]
    fn christoffels_error_when_margin_too_small() {
        let metric = polar_chart();
        let q = DVector::from_vec(vec![1.0 - 1e-9, 0.3]);
        assert!(matches!(
            metric.christoffels_at(&q),
            Err(Error::InsufficientMargin(_))
        ));
    }

    #[test]
    fn unit_disc_boundary_distance() {
        let collar = Collar::new(
            0.5,
            Arc::new(|q: &DVector<f64>| 1.0 - q.norm()),
            Arc::new(|q: &DVector<f64>| {
                let r = q.norm();
                DVector::from_vec(vec![q[1].atan2(q[0]), r])
            }),
        );
        let q = DVector::from_vec(vec![0.3, 0.4]);
        assert_relative_eq!(collar.boundary_distance(&q), 0.5);
        assert!(collar.in_collar(&q) == false);
    }

    #[test]
    fn output_normalization_wraps_angles_only() {
        let chart = Arc::new(Chart::new(
            &["n", "theta"],
            &[false, true],
            Arc::new(|_q: &DVector<f64>| true),
        ));
        let q = DVector::from_vec(vec![-0.25, 7.5]);
        let out = chart.normalize_output(&q);
        assert_relative_eq!(out[0], -0.25);
        assert_relative_eq!(out[1], 7.5 - std::f64::consts::TAU);
    }
}
