//! Numeric verdicts for the structural hypotheses on (M₁, M₂, a, b, f, χ).
//!
//! Everything here is sampled on geometric grids and flagged as such: a
//! passing verdict is evidence, not a proof.

use serde::Serialize;

use crate::error::Error;

use super::KirchhoffInstance;

const MONOTONE_SLACK: f64 = 1e-12;
/// The diagonal tail must grow by at least this factor to count as → ∞.
const DIVERGENCE_FACTOR: f64 = 10.0;
/// H4/H5 tail ratios must shrink to at most this fraction of their start.
const DECAY_FACTOR: f64 = 1e-3;
/// The free constant 𝔐 of the H4 ratio.
const H4_SAMPLE_CONSTANT: f64 = 1.0;

#[derive(Debug, Clone, Serialize)]
pub struct CheckLine {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesesReport {
    pub lines: Vec<CheckLine>,
    /// All verdicts are sample-based.
    pub caveat: &'static str,
}

impl HypothesesReport {
    pub fn all_pass(&self) -> bool {
        self.lines.iter().all(|l| l.pass)
    }

    pub fn failed(&self) -> Vec<&CheckLine> {
        self.lines.iter().filter(|l| !l.pass).collect()
    }
}

fn geometric_samples(budget: usize) -> Vec<f64> {
    let n = budget.max(2);
    (0..n)
        .map(|k| 10f64.powf(6.0 * k as f64 / (n - 1) as f64))
        .collect()
}

fn finite_or_err(name: &str, at: f64, v: f64) -> crate::Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Hypothesis(format!(
            "{name} is not evaluable at sample {at}: got {v}"
        )))
    }
}

/// Samples the hypotheses on t ∈ [1, 10⁶] with `sample_budget` geometric
/// points.
pub fn check_hypotheses(
    inst: &KirchhoffInstance,
    sample_budget: usize,
) -> crate::Result<HypothesesReport> {
    let ts = geometric_samples(sample_budget);
    let mut lines = Vec::new();

    // H1: M₁, M₂ continuous increasing with a positive floor.
    for (name, m) in [("H1: M1", &inst.m1), ("H1: M2", &inst.m2)] {
        let floor = m.eval(0.0);
        let mut increasing = floor > 0.0;
        let mut prev = floor;
        for &t in &ts {
            let v = finite_or_err(name, t, m.eval(t))?;
            if v < prev - MONOTONE_SLACK {
                increasing = false;
            }
            prev = v;
        }
        lines.push(CheckLine {
            name,
            pass: increasing,
            detail: format!("M(0) = {floor}, M({}) = {prev}", ts.last().unwrap()),
        });
    }

    // H2: weight floors over the closed domain (lattice sample).
    let lattice = 33usize;
    for (name, w) in [("H2: a", &inst.a), ("H2: b", &inst.b)] {
        let mut lo = f64::INFINITY;
        for i in 0..=lattice {
            for j in 0..=lattice {
                let x = inst.domain_t * i as f64 / lattice as f64;
                let y = inst.domain_t * j as f64 / lattice as f64;
                lo = lo.min(w.eval(x, y));
            }
        }
        lines.push(CheckLine {
            name,
            pass: lo > 0.0,
            detail: format!("sampled floor {lo}"),
        });
    }

    // H3: f, χ monotone in each argument, with diverging diagonal.
    for (name, nl) in [("H3: f", &inst.f), ("H3: chi", &inst.chi)] {
        let mut monotone = true;
        for &s in &ts {
            for &t in &ts {
                let h = 1e-6 * (1.0 + s);
                let ds = nl.eval_raw(s + h, t) - nl.eval_raw(s, t);
                let dt = nl.eval_raw(s, t + h) - nl.eval_raw(s, t);
                finite_or_err(name, s, ds)?;
                if ds < -MONOTONE_SLACK * (1.0 + nl.eval_raw(s, t).abs())
                    || dt < -MONOTONE_SLACK * (1.0 + nl.eval_raw(s, t).abs())
                {
                    monotone = false;
                }
            }
        }
        let first = finite_or_err(name, ts[0], nl.eval_raw(ts[0], ts[0]))?;
        let last = finite_or_err(
            name,
            *ts.last().unwrap(),
            nl.eval_raw(*ts.last().unwrap(), *ts.last().unwrap()),
        )?;
        let diverges = last >= DIVERGENCE_FACTOR * first.max(1.0);
        lines.push(CheckLine {
            name,
            pass: monotone && diverges,
            detail: format!(
                "monotone: {monotone}; diagonal {first:.3e} -> {last:.3e} (needs x{DIVERGENCE_FACTOR})"
            ),
        });
    }

    // H4: f(t, (𝔐·χ(t,t))^{1/(q−1)}) / t^{p−1} decreasing toward 0.
    let h4: Vec<f64> = ts
        .iter()
        .map(|&t| {
            let inner = (H4_SAMPLE_CONSTANT * inst.chi.eval_raw(t, t)).max(0.0);
            inst.f.eval_raw(t, inner.powf(1.0 / (inst.q - 1.0))) / t.powf(inst.p - 1.0)
        })
        .collect();
    lines.push(ratio_line("H4: f growth", &h4)?);

    // H5: χ(t,t) / t^{q−1} decreasing toward 0.
    let h5: Vec<f64> = ts
        .iter()
        .map(|&t| inst.chi.eval_raw(t, t) / t.powf(inst.q - 1.0))
        .collect();
    lines.push(ratio_line("H5: chi growth", &h5)?);

    // HK1: frozen right-hand sides bounded on bounded sets (sampled).
    let mut bounded = true;
    for &s in &ts {
        for &t in &ts {
            let h = inst.zeta * inst.f.eval_raw(s, t);
            let k = inst.zeta * inst.chi.eval_raw(s, t);
            if !h.is_finite() || !k.is_finite() {
                bounded = false;
            }
        }
    }
    lines.push(CheckLine {
        name: "HK1: bounded on bounded sets",
        pass: bounded,
        detail: "finite at every sample pair".into(),
    });

    // HK2: the default auxiliary shift family g(s) = λ|s|^{ν−2}s with
    // ν = min(p,q) is continuous, nondecreasing, g(0) = 0, and satisfies the
    // growth bound |g(s)| ≤ λ(1+|s|^{ν−1}); λ is fixed at iteration time.
    let nu = inst.p.min(inst.q);
    let mut hk2 = true;
    let mut prev = f64::NEG_INFINITY;
    for k in 0..=64 {
        let s = -2.0 + 4.0 * k as f64 / 64.0;
        let g = crate::space::odd_power(s, nu);
        if g < prev - MONOTONE_SLACK || g.abs() > 1.0 + s.abs().powf(nu - 1.0) + MONOTONE_SLACK {
            hk2 = false;
        }
        prev = g;
    }
    lines.push(CheckLine {
        name: "HK2: auxiliary shift family",
        pass: hk2 && crate::space::odd_power(0.0, nu) == 0.0,
        detail: format!("g(s) = lambda*|s|^{:.2}*sign(s), lambda >= 0", nu - 1.0),
    });

    Ok(HypothesesReport {
        lines,
        caveat: "sampled, not proven",
    })
}

fn ratio_line(name: &'static str, ratios: &[f64]) -> crate::Result<CheckLine> {
    for (&r, i) in ratios.iter().zip(0..) {
        if !r.is_finite() {
            return Err(Error::Hypothesis(format!(
                "{name}: ratio not evaluable at sample index {i}"
            )));
        }
    }
    let tail = &ratios[ratios.len() / 2..];
    let mut nonincreasing = true;
    for w in tail.windows(2) {
        if w[1] > w[0] + MONOTONE_SLACK * (1.0 + w[0].abs()) {
            nonincreasing = false;
        }
    }
    let first = ratios[0];
    let last = *ratios.last().unwrap();
    let decayed = last <= DECAY_FACTOR * first.max(1e-300);
    Ok(CheckLine {
        name,
        pass: nonincreasing && decayed,
        detail: format!("ratio {first:.3e} -> {last:.3e}, tail nonincreasing: {nonincreasing}"),
    })
}
