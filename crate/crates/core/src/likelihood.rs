//! The generalized likelihood
//!
//! ```text
//! log F_β(Σ) = -N log det Σ - Nβ Tr(Σ^{-1}) - m(1-β) Σ_n log(x_n^H Σ^{-1} x_n)
//! ```
//!
//! whose critical points are exactly the fixed points of `f_β`, together with
//! its gradient, curvature along a direction, and the profile `M(β)` obtained
//! by plugging in the solution `Σ(β)`. Everything stays in the log domain.

use crate::error::{Error, Result};
use crate::estimators::{
    beta_lower_bound, quad_forms, shrinkage_fpe, Init, Normalization, SampleSet, SolverConfig,
};
use crate::linalg::{CMatrix, Hermitian, HermitianPDS};

#[derive(Clone, Copy, Debug)]
pub struct LikelihoodContext<'a> {
    pub samples: &'a SampleSet,
    pub beta: f64,
}

impl<'a> LikelihoodContext<'a> {
    pub fn new(samples: &'a SampleSet, beta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::InvalidBeta { beta, lower: 0.0 });
        }
        Ok(Self { samples, beta })
    }

    fn m(&self) -> f64 {
        self.samples.dim() as f64
    }

    fn n(&self) -> f64 {
        self.samples.len() as f64
    }
}

pub fn log_f(sigma: &HermitianPDS, ctx: &LikelihoodContext) -> Result<f64> {
    let q = quad_forms(sigma, ctx.samples)?;
    let (m, n, beta) = (ctx.m(), ctx.n(), ctx.beta);
    let sum_log_q: f64 = q.iter().map(|v| v.ln()).sum();
    Ok(-n * sigma.log_det() - n * beta * sigma.inv_trace() - m * (1.0 - beta) * sum_log_q)
}

/// `log L(Σ) = -Tr(Σ^{-1}) - log det Σ`; at most `-m`, with equality at `Σ = I`.
pub fn log_l(sigma: &HermitianPDS) -> f64 {
    -sigma.inv_trace() - sigma.log_det()
}

/// `∇ log F_β(Σ) = -N Σ^{-1} (Σ - f_β(Σ)) Σ^{-1}`, the Hermitian `G` with
/// `d log F_β(Σ)(Q) = Tr(G Q)`.
pub fn grad_log_f(sigma: &HermitianPDS, ctx: &LikelihoodContext) -> Result<Hermitian> {
    let f = raw_map(sigma, ctx)?;
    let inv = sigma.inverse();
    let diff = sigma.matrix().sub(&f);
    let sandwich = inv.as_matrix().matmul(diff.as_matrix()).matmul(inv.as_matrix());
    Ok(Hermitian::hermitian_part(&sandwich).scale(-ctx.n()))
}

fn raw_map(sigma: &HermitianPDS, ctx: &LikelihoodContext) -> Result<Hermitian> {
    let q = quad_forms(sigma, ctx.samples)?;
    let scale = (1.0 - ctx.beta) * ctx.m() / ctx.n();
    let t = Hermitian::weighted_outer_sum(
        ctx.samples.dim(),
        ctx.samples.iter().zip(&q).map(|(x, &qn)| (scale / qn, x)),
    );
    Ok(t.add(&Hermitian::scaled_identity(ctx.samples.dim(), ctx.beta)))
}

/// Second directional derivative `d²/dt² log F_β(Σ + tQ)` at `t = 0`.
pub fn second_derivative(sigma: &HermitianPDS, q: &Hermitian, ctx: &LikelihoodContext) -> Result<f64> {
    if q.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { expected: sigma.dim(), got: q.dim() });
    }
    let (m, n, beta) = (ctx.m(), ctx.n(), ctx.beta);
    let inv = sigma.inverse();
    let f = raw_map(sigma, ctx)?;
    let p = inv.as_matrix().matmul(q.as_matrix());
    let pp = p.matmul(&p);
    let inv_f = inv.as_matrix().matmul(f.as_matrix());
    let t1 = pp.trace().re;
    // Tr(Σ^{-1}QΣ^{-1}QΣ^{-1} f)
    let t2 = trace_of_product(&pp, &inv_f);
    // Tr(Q Σ^{-1} df(Q) Σ^{-1}) = (1-β)(m/N) Σ_n a_n² / q_n², a_n = x^H Σ^{-1} Q Σ^{-1} x
    let qf = quad_forms(sigma, ctx.samples)?;
    let t3: f64 = ctx
        .samples
        .iter()
        .zip(&qf)
        .map(|(x, &qn)| {
            let u = sigma.factor().solve(x.as_slice());
            let u = crate::linalg::ComplexVector::new(u).expect("finite solve");
            let a = q.quad(&u);
            a * a / (qn * qn)
        })
        .sum();
    Ok(n * (t1 - 2.0 * t2 + (1.0 - beta) * m / n * t3))
}

/// Normalized curvature `Hess_β(Σ)(Q) / (N β F_β(Σ))`, i.e. the second
/// directional derivative of `log F_β` divided by `Nβ`.
///
/// At a critical point it is at most `-Tr(Q Σ^{-2} Q Σ^{-1})`, and since such a
/// point satisfies `Σ >= βI`, also at most `-β Tr(Q Σ^{-2} Q Σ^{-2})`.
pub fn hessian_quad_form(sigma: &HermitianPDS, q: &Hermitian, ctx: &LikelihoodContext) -> Result<f64> {
    if ctx.beta == 0.0 {
        return Err(Error::InvalidBeta { beta: 0.0, lower: 0.0 });
    }
    Ok(second_derivative(sigma, q, ctx)? / (ctx.n() * ctx.beta))
}

/// `Tr(Q Σ^{-2} Q Σ^{-2})`.
pub fn curvature_bound_trace(sigma: &HermitianPDS, q: &Hermitian) -> f64 {
    let inv = sigma.inverse();
    let inv2 = inv.as_matrix().matmul(inv.as_matrix());
    let a = q.as_matrix().matmul(&inv2);
    trace_of_product(&a, &a)
}

/// `Tr(Q Σ^{-2} Q Σ^{-1})`.
pub fn curvature_bound_trace_mixed(sigma: &HermitianPDS, q: &Hermitian) -> f64 {
    let inv = sigma.inverse();
    let inv2 = inv.as_matrix().matmul(inv.as_matrix());
    let a = q.as_matrix().matmul(&inv2);
    let b = q.as_matrix().matmul(inv.as_matrix());
    trace_of_product(&a, &b)
}

fn trace_of_product(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    s
}

/// One point of the likelihood profile over `β`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProfilePoint {
    pub beta: f64,
    /// `M(β) = log F_β(Σ(β))`
    pub m_value: f64,
    /// `M'(β) = -N m + m Σ_n log(x_n^H Σ(β)^{-1} x_n)`
    pub m_prime: f64,
    pub grad_norm: f64,
    pub trace_inv: f64,
    pub sigma: HermitianPDS,
}

fn check_profile_beta(beta: f64, samples: &SampleSet) -> Result<()> {
    let lower = beta_lower_bound(samples.dim(), samples.len());
    if beta > lower && beta <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidBeta { beta, lower })
    }
}

fn profile_at(beta: f64, samples: &SampleSet, cfg: SolverConfig) -> Result<ProfilePoint> {
    check_profile_beta(beta, samples)?;
    let cfg = SolverConfig { beta, normalization: Normalization::None, ..cfg };
    let (sigma, _) = shrinkage_fpe(samples, &cfg)?;
    let ctx = LikelihoodContext::new(samples, beta)?;
    let m = samples.dim() as f64;
    let n = samples.len() as f64;
    let q = quad_forms(&sigma, samples)?;
    Ok(ProfilePoint {
        beta,
        m_value: log_f(&sigma, &ctx)?,
        m_prime: -n * m + m * q.iter().map(|v| v.ln()).sum::<f64>(),
        grad_norm: grad_log_f(&sigma, &ctx)?.frob_norm(),
        trace_inv: sigma.inv_trace(),
        sigma,
    })
}

/// `M(β) = log F(Σ(β), β)`.
pub fn profile_m(beta: f64, samples: &SampleSet, cfg: &SolverConfig) -> Result<f64> {
    profile_at(beta, samples, cfg.clone()).map(|p| p.m_value)
}

/// Closed-form `M'(β)`.
pub fn profile_m_prime(beta: f64, samples: &SampleSet, cfg: &SolverConfig) -> Result<f64> {
    profile_at(beta, samples, cfg.clone()).map(|p| p.m_prime)
}

/// Profile over a grid, solved in descending `β` with each solution
/// warm-starting the next. Output follows the input order.
pub fn profile_sweep(betas: &[f64], samples: &SampleSet, cfg: &SolverConfig) -> Result<Vec<ProfilePoint>> {
    let mut order: Vec<usize> = (0..betas.len()).collect();
    order.sort_by(|&a, &b| betas[b].total_cmp(&betas[a]));
    let mut out: Vec<Option<ProfilePoint>> = vec![None; betas.len()];
    let mut warm: Option<HermitianPDS> = None;
    for i in order {
        let init = warm.take().map(Init::Matrix).unwrap_or(Init::Identity);
        let point = profile_at(betas[i], samples, cfg.clone().with_init(init))?;
        warm = Some(point.sigma.clone());
        out[i] = Some(point);
    }
    Ok(out.into_iter().map(|p| p.expect("every grid point solved")).collect())
}
