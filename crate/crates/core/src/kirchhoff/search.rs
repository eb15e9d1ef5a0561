//! The scalar c-search from the supersolution sufficient conditions, and
//! the doubling ζ-search that produces a verified certificate.

use serde::Serialize;

use crate::error::Error;

use super::{
    construct_pair, verify_pair, AuxSolves, KirchhoffInstance, PairVerdict, Problem, SubSuperPair,
};

/// Outcome of the doubling search on c.
#[derive(Debug, Clone)]
pub enum CSearchOutcome {
    Found {
        c: f64,
        /// LHS/RHS of the two sufficient conditions at the returned c.
        margin1: f64,
        margin2: f64,
        doublings: usize,
    },
    /// Budget exhausted; the final ratios document how far the conditions
    /// were from holding (expected when H4/H5 fail).
    Exhausted {
        last_c: f64,
        margin1: f64,
        margin2: f64,
    },
}

impl CSearchOutcome {
    pub fn found(&self) -> Option<f64> {
        match self {
            CSearchOutcome::Found { c, .. } => Some(*c),
            CSearchOutcome::Exhausted { .. } => None,
        }
    }
}

/// Doubles c from 1 until both scalar sufficient conditions hold:
///
/// 1. (m₁/l_p^{p−1})·(ζ^{1/(p−1)}c)^{p−1} ≥ ζ·f(X, sup Ψ₂)
/// 2. X ≥ [χ(X,X)]^{1/(q−1)}·(ζ‖b‖∞/m₂)^{1/(q−1)}·l_q  (= sup Ψ₂)
///
/// with X = ζ^{1/(p−1)}c. Termination is guaranteed when H4 and H5 hold.
pub fn find_c(
    inst: &KirchhoffInstance,
    a_bounds: (f64, f64),
    b_bounds: (f64, f64),
    l_p: f64,
    l_q: f64,
    budget: usize,
) -> crate::Result<CSearchOutcome> {
    if !(l_p > 0.0) || !(l_q > 0.0) {
        return Err(Error::parameter("l_r", l_p.min(l_q), "(0, inf)"));
    }
    let (a0, _a_sup) = a_bounds;
    let (b0, b_sup) = b_bounds;
    let m1 = inst.m1.lower_bound();
    let m2 = inst.m2.lower_bound();
    let pe = 1.0 / (inst.p - 1.0);
    let qe = 1.0 / (inst.q - 1.0);
    let b_scale = (inst.zeta * b_sup / m2).powf(qe) * l_q;

    let mut c = 1.0f64;
    let mut last = (f64::NAN, f64::NAN);
    for k in 0..budget {
        let x = inst.zeta.powf(pe) * c;
        let chi_xx = inst
            .chi
            .eval_ext(x, x, inst.chi_floor(b0))
            .max(0.0);
        let psi2_sup = chi_xx.powf(qe) * b_scale;

        let lhs1 = m1 / l_p.powf(inst.p - 1.0) * x.powf(inst.p - 1.0);
        let rhs1 = inst.zeta * inst.f.eval_ext(x, psi2_sup, inst.f_floor(a0));
        let margin1 = if rhs1 <= 0.0 { f64::INFINITY } else { lhs1 / rhs1 };

        let lhs2 = 1.0 / b_scale;
        let rhs2 = chi_xx.powf(qe) / x;
        let margin2 = if rhs2 <= 0.0 { f64::INFINITY } else { lhs2 / rhs2 };

        if margin1 >= 1.0 && margin2 >= 1.0 {
            return Ok(CSearchOutcome::Found {
                c,
                margin1,
                margin2,
                doublings: k,
            });
        }
        last = (margin1, margin2);
        c *= 2.0;
    }
    Ok(CSearchOutcome::Exhausted {
        last_c: c / 2.0,
        margin1: last.0,
        margin2: last.1,
    })
}

#[derive(Debug, Clone)]
pub struct ZetaOptions {
    /// Number of doublings of ζ starting from 1.
    pub budget: usize,
    pub c_budget: usize,
    /// Tolerance multiplier passed to the verifier.
    pub tol_scale: f64,
}

impl Default for ZetaOptions {
    fn default() -> Self {
        ZetaOptions {
            budget: 24,
            c_budget: 60,
            tol_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ZetaAttempt {
    pub zeta: f64,
    pub c: Option<f64>,
    /// Name of the first failing verdict, or "c-search exhausted".
    pub failure: String,
    pub worst_margin: f64,
}

/// Outcome of the doubling search on ζ.
pub enum ZetaOutcome {
    Found {
        zeta_star: f64,
        c: f64,
        pair: SubSuperPair,
        verdict: PairVerdict,
        attempts: Vec<ZetaAttempt>,
    },
    Exhausted {
        attempts: Vec<ZetaAttempt>,
    },
}

impl ZetaOutcome {
    pub fn found_zeta(&self) -> Option<f64> {
        match self {
            ZetaOutcome::Found { zeta_star, .. } => Some(*zeta_star),
            ZetaOutcome::Exhausted { .. } => None,
        }
    }
}

/// Doubling search on ζ from 1: at each candidate, choose c by [`find_c`],
/// construct the pair, and verify all inequalities. Returns the smallest
/// tested ζ whose pair verifies, with the full verdict as certificate.
pub fn find_zeta_star(
    problem: &Problem,
    aux: &AuxSolves,
    opts: &ZetaOptions,
) -> crate::Result<ZetaOutcome> {
    let space = problem.space();
    let base = problem.instance();
    let a_bounds = base.a.bounds_on(space);
    let b_bounds = base.b.bounds_on(space);
    let mut attempts = Vec::new();
    let mut zeta = 1.0;
    for _ in 0..opts.budget {
        let inst = base.with_zeta(zeta);
        let c_out = find_c(&inst, a_bounds, b_bounds, aux.tor_p.l, aux.tor_q.l, opts.c_budget)?;
        let Some(c) = c_out.found() else {
            attempts.push(ZetaAttempt {
                zeta,
                c: None,
                failure: "c-search exhausted".into(),
                worst_margin: f64::NEG_INFINITY,
            });
            zeta *= 2.0;
            continue;
        };
        let pair = construct_pair(&inst, aux, space, c)?;
        let verdict = verify_pair(problem, &inst, &pair, opts.tol_scale)?;
        if verdict.all_pass() {
            attempts.push(ZetaAttempt {
                zeta,
                c: Some(c),
                failure: String::new(),
                worst_margin: verdict.worst_margin(),
            });
            return Ok(ZetaOutcome::Found {
                zeta_star: zeta,
                c,
                pair,
                verdict,
                attempts,
            });
        }
        attempts.push(ZetaAttempt {
            zeta,
            c: Some(c),
            failure: verdict.first_failure().unwrap_or("unknown").to_string(),
            worst_margin: verdict.worst_margin(),
        });
        zeta *= 2.0;
    }
    Ok(ZetaOutcome::Exhausted { attempts })
}

/// JSON-facing verdict entry.
#[derive(Debug, Clone, Serialize)]
pub struct VerdictJson {
    pub name: String,
    pub pass: bool,
    pub worst_value: f64,
    pub tol: f64,
    pub margin: f64,
    pub worst_node: [usize; 2],
}

/// Counts and final residuals of the auxiliary solves.
#[derive(Debug, Clone, Serialize)]
pub struct AuxStats {
    pub eigen_p: usize,
    pub eigen_q: usize,
    pub torsion_p: usize,
    pub torsion_q: usize,
    pub eigen_p_residual: f64,
    pub eigen_q_residual: f64,
    pub torsion_p_residual: f64,
    pub torsion_q_residual: f64,
}

/// The machine-readable certificate of a successful (or attempted) search.
#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub zeta_star: Option<f64>,
    pub c: Option<f64>,
    pub m: f64,
    pub delta: f64,
    pub sigma: f64,
    pub lambda1p: f64,
    pub lambda1q: f64,
    pub lp: f64,
    pub lq: f64,
    pub verdicts: Vec<VerdictJson>,
    pub residual_norms: Vec<f64>,
    pub iterations: AuxStats,
    pub attempts: Vec<ZetaAttempt>,
}

pub fn certificate(aux: &AuxSolves, outcome: &ZetaOutcome) -> Certificate {
    let stats = AuxStats {
        eigen_p: aux.eig_p.iterations,
        eigen_q: aux.eig_q.iterations,
        torsion_p: aux.tor_p.iterations,
        torsion_q: aux.tor_q.iterations,
        eigen_p_residual: aux.eig_p.residual,
        eigen_q_residual: aux.eig_q.residual,
        torsion_p_residual: aux.tor_p.final_gradient_norm,
        torsion_q_residual: aux.tor_q.final_gradient_norm,
    };
    let (zeta_star, c, verdicts, residual_norms, attempts) = match outcome {
        ZetaOutcome::Found {
            zeta_star,
            c,
            verdict,
            attempts,
            ..
        } => (
            Some(*zeta_star),
            Some(*c),
            verdict_json(verdict),
            verdict.lines().iter().map(|l| l.worst_value).collect(),
            attempts.clone(),
        ),
        ZetaOutcome::Exhausted { attempts } => {
            (None, None, Vec::new(), Vec::new(), attempts.clone())
        }
    };
    Certificate {
        zeta_star,
        c,
        m: aux.m,
        delta: aux.delta,
        sigma: aux.sigma,
        lambda1p: aux.eig_p.lambda1,
        lambda1q: aux.eig_q.lambda1,
        lp: aux.tor_p.l,
        lq: aux.tor_q.l,
        verdicts,
        residual_norms,
        iterations: stats,
        attempts,
    }
}

pub(crate) fn verdict_json(verdict: &PairVerdict) -> Vec<VerdictJson> {
    let mut out: Vec<VerdictJson> = verdict
        .lines()
        .iter()
        .map(|l| VerdictJson {
            name: l.name.to_string(),
            pass: l.pass,
            worst_value: l.worst_value,
            tol: l.tol,
            margin: l.margin,
            worst_node: [l.worst_node.0, l.worst_node.1],
        })
        .collect();
    for order in [&verdict.ordered1, &verdict.ordered2] {
        out.push(VerdictJson {
            name: order.name.to_string(),
            pass: order.pass,
            worst_value: order.worst_excess,
            tol: 0.0,
            margin: -order.worst_excess,
            worst_node: [0, 0],
        });
    }
    out
}
