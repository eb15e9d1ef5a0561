//! The full coupled Kirchhoff-type system: instance model, hypothesis
//! validation, construction of the explicit sub-/supersolution pair,
//! verification of the weak inequalities, the (ζ, c) searches, and the
//! monotone iteration inside the ordered bracket.

mod construct;
mod hypotheses;
mod monotone;
mod search;
mod verify;

pub use construct::{
    construct_pair, construct_subsolution, construct_supersolution, Provenance, SubSuperPair,
};
pub use hypotheses::{check_hypotheses, CheckLine, HypothesesReport};
pub use monotone::{
    monotone_iteration, AuxShift, BracketSolution, IterRecord, MonotoneOptions, StartFrom,
};
pub use search::{
    certificate, find_c, find_zeta_star, AuxStats, CSearchOutcome, Certificate, VerdictJson,
    ZetaAttempt, ZetaOptions, ZetaOutcome,
};
pub use verify::{verify_pair, OrderLine, PairVerdict, VerdictLine};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::field2d::TestCone;
use crate::fracops::FracParams;
use crate::grid::Grid1D;
use crate::plap::Coefficient;
use crate::precond::{Precond, PrecondKind};
use crate::psi::PsiMap;
use crate::space::{Space, Space2D};
use crate::spectral::{
    barrier_gap_field, default_deltas, first_eigenpair, EigenOptions, EigenPair,
};
use crate::torsion::{solve_torsion, TorsionOptions, TorsionSolution};

/// Weight field a(ξ) or b(ξ): continuous with a positive floor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Weight {
    Constant { c: f64 },
    /// 1 + scale·x·y
    OnePlusXY { scale: f64 },
}

impl Weight {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match *self {
            Weight::Constant { c } => c,
            Weight::OnePlusXY { scale } => 1.0 + scale * x * y,
        }
    }

    pub fn validate(&self) -> crate::Result<()> {
        let ok = match *self {
            Weight::Constant { c } => c > 0.0,
            Weight::OnePlusXY { scale } => scale >= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Hypothesis(format!(
                "weight {self:?} does not have a positive floor"
            )))
        }
    }

    /// (floor, sup) over the grid nodes.
    pub fn bounds_on(&self, space: &Space2D) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &x in space.grid_x().nodes() {
            for &y in space.grid_y().nodes() {
                let v = self.eval(x, y);
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        (lo, hi)
    }
}

/// Nonlinearity preset f(s, t) or χ(s, t) on the closed quadrant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Nonlinearity {
    /// (s+t)^{1/2}
    SqrtSum,
    /// (s+t)²
    SquareSum,
    /// (s+t)^k
    PowSum { k: f64 },
    Constant { c: f64 },
}

impl Nonlinearity {
    /// Value on the closed quadrant s, t ≥ 0.
    pub fn eval_raw(&self, s: f64, t: f64) -> f64 {
        match *self {
            Nonlinearity::SqrtSum => (s + t).sqrt(),
            Nonlinearity::SquareSum => (s + t) * (s + t),
            Nonlinearity::PowSum { k } => (s + t).powf(k),
            Nonlinearity::Constant { c } => c,
        }
    }

    /// Constant extension to the whole plane clipped at `floor` (the proof
    /// only uses the floor bound −k₀/a₀ resp. −k₀/b₀).
    pub fn eval_ext(&self, s: f64, t: f64, floor: f64) -> f64 {
        self.eval_raw(s.max(0.0), t.max(0.0)).max(floor)
    }

    pub fn validate(&self) -> crate::Result<()> {
        match *self {
            Nonlinearity::PowSum { k } if !(k > 0.0) => {
                Err(Error::parameter("k", k, "(0, inf)"))
            }
            _ => Ok(()),
        }
    }
}

/// The full problem data (M₁, M₂, a, b, f, χ, p, q, ζ, k₀) on Ω = [0,T]².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KirchhoffInstance {
    pub p: f64,
    pub q: f64,
    pub zeta: f64,
    pub k0: f64,
    pub m1: Coefficient,
    pub m2: Coefficient,
    pub a: Weight,
    pub b: Weight,
    pub f: Nonlinearity,
    pub chi: Nonlinearity,
    pub alpha: f64,
    pub beta: f64,
    pub psi: PsiMap,
    pub domain_t: f64,
}

impl KirchhoffInstance {
    /// The instance shipped with the repo: p = 3, q = 2, α = 0.75, β = 0.5,
    /// ψ = id, T = 1, a ≡ b ≡ 1, M₁(t) = 2+t, M₂(t) = 1+t,
    /// f = χ = (s+t)^{1/2}, k₀ = 1.
    pub fn demo() -> Self {
        KirchhoffInstance {
            p: 3.0,
            q: 2.0,
            zeta: 50.0,
            k0: 1.0,
            m1: Coefficient::Affine {
                base: 2.0,
                slope: 1.0,
            },
            m2: Coefficient::Affine {
                base: 1.0,
                slope: 1.0,
            },
            a: Weight::Constant { c: 1.0 },
            b: Weight::Constant { c: 1.0 },
            f: Nonlinearity::SqrtSum,
            chi: Nonlinearity::SqrtSum,
            alpha: 0.75,
            beta: 0.5,
            psi: PsiMap::Identity,
            domain_t: 1.0,
        }
    }

    pub fn with_zeta(&self, zeta: f64) -> Self {
        KirchhoffInstance {
            zeta,
            ..self.clone()
        }
    }

    pub fn params_p(&self) -> crate::Result<FracParams> {
        FracParams::new(self.alpha, self.beta, self.p)
    }

    pub fn params_q(&self) -> crate::Result<FracParams> {
        FracParams::new(self.alpha, self.beta, self.q)
    }

    pub fn validate(&self) -> crate::Result<()> {
        if !(self.p > self.q && self.q > 1.0) {
            return Err(Error::parameter("p", self.p, "p > q > 1"));
        }
        if !(self.zeta > 0.0) {
            return Err(Error::parameter("zeta", self.zeta, "(0, inf)"));
        }
        if !(self.k0 > 0.0) {
            return Err(Error::parameter("k0", self.k0, "(0, inf)"));
        }
        if !(self.domain_t > 0.0) {
            return Err(Error::parameter("T", self.domain_t, "(0, inf)"));
        }
        self.params_p()?;
        self.params_q()?;
        self.m1.validate()?;
        self.m2.validate()?;
        self.a.validate()?;
        self.b.validate()?;
        self.f.validate()?;
        self.chi.validate()?;
        Ok(())
    }

    /// Floor of the extended f: −k₀/a₀.
    pub fn f_floor(&self, a0: f64) -> f64 {
        -self.k0 / a0
    }

    /// Floor of the extended χ: −k₀/b₀.
    pub fn chi_floor(&self, b0: f64) -> f64 {
        -self.k0 / b0
    }
}

/// Right-hand-side field ζ·w(ξ)·nl(u, v) with the extension in force.
pub(crate) fn rhs_field(
    space: &Space2D,
    zeta: f64,
    weight: &Weight,
    nl: &Nonlinearity,
    floor: f64,
    u: &Array2<f64>,
    v: &Array2<f64>,
) -> Array2<f64> {
    let nx = space.grid_x().nodes();
    let ny = space.grid_y().nodes();
    Array2::from_shape_fn(space.shape(), |(i, j)| {
        zeta * weight.eval(nx[i], ny[j]) * nl.eval_ext(u[[i, j]], v[[i, j]], floor)
    })
}

/// Grid-level machinery for one instance: workspace, preconditioner, cone.
pub struct Problem {
    inst: KirchhoffInstance,
    space: Space2D,
    precond: Precond<Array2<f64>>,
    cone: TestCone,
}

impl Problem {
    pub fn new(inst: KirchhoffInstance, grid: Grid1D) -> crate::Result<Self> {
        inst.validate()?;
        if (grid.length() - inst.domain_t).abs() > 1e-12 * inst.domain_t {
            return Err(Error::GridNodes(format!(
                "grid length {} does not match instance domain T = {}",
                grid.length(),
                inst.domain_t
            )));
        }
        let space = Space2D::square(inst.psi, inst.params_p()?, grid)?;
        let (a0, _) = inst.a.bounds_on(&space);
        let (b0, _) = inst.b.bounds_on(&space);
        if !(a0 > 0.0) || !(b0 > 0.0) {
            return Err(Error::Hypothesis(format!(
                "weight floors a0 = {a0}, b0 = {b0} must be positive"
            )));
        }
        let precond = space.build_precond(PrecondKind::Fractional)?;
        let cone = TestCone::interior(space.grid_x(), space.grid_y());
        Ok(Problem {
            inst,
            space,
            precond,
            cone,
        })
    }

    pub fn instance(&self) -> &KirchhoffInstance {
        &self.inst
    }

    pub fn space(&self) -> &Space2D {
        &self.space
    }

    pub fn cone(&self) -> &TestCone {
        &self.cone
    }

    pub(crate) fn precond(&self) -> &Precond<Array2<f64>> {
        &self.precond
    }

    /// Solves the ζ-independent auxiliary problems: both eigenpairs with a
    /// joint barrier search, and both torsion functions.
    pub fn solve_auxiliaries(&self, opts: &AuxOptions) -> crate::Result<AuxOutcome> {
        let eig_p = first_eigenpair(&self.space, self.inst.p, &opts.eigen)?;
        let eig_q = first_eigenpair(&self.space, self.inst.q, &opts.eigen)?;
        let gap_p = barrier_gap_field(&self.space, &eig_p);
        let gap_q = barrier_gap_field(&self.space, &eig_q);
        let deltas = match &opts.deltas {
            Some(d) => d.clone(),
            None => default_deltas(self.space.domain_length()).to_vec(),
        };
        let mut attempts = Vec::new();
        let mut joint = None;
        for &delta in &deltas {
            let scan_p = self.space.barrier_scan(&gap_p, &eig_p.theta1, delta)?;
            let scan_q = self.space.barrier_scan(&gap_q, &eig_q.theta1, delta)?;
            let m = scan_p.gap_min.min(scan_q.gap_min);
            attempts.push((delta, m));
            if m > 0.0 {
                joint = Some((delta, m, scan_p.floor_min.min(scan_q.floor_min), scan_p.strip_mask));
                break;
            }
        }
        let Some((delta, m, sigma, strip_mask)) = joint else {
            return Ok(AuxOutcome::BarrierFailure { attempts });
        };
        let tor_p = solve_torsion(&self.space, self.inst.p, &opts.torsion, None)?;
        let tor_q = solve_torsion(&self.space, self.inst.q, &opts.torsion, None)?;
        Ok(AuxOutcome::Ready(Box::new(AuxSolves {
            eig_p,
            eig_q,
            m,
            delta,
            sigma,
            strip_mask,
            tor_p,
            tor_q,
        })))
    }
}

#[derive(Debug, Clone, Default)]
pub struct AuxOptions {
    pub eigen: EigenOptions,
    pub torsion: TorsionOptions,
    /// Strip-width candidates; defaults to {0.05T, 0.1T, 0.2T}.
    pub deltas: Option<Vec<f64>>,
}

/// ζ-independent solves feeding the sub/supersolution construction.
pub struct AuxSolves {
    pub eig_p: EigenPair<Array2<f64>>,
    pub eig_q: EigenPair<Array2<f64>>,
    /// Joint strip gap min(m_p, m_q) > 0.
    pub m: f64,
    pub delta: f64,
    /// Joint interior floor min(σ_p, σ_q).
    pub sigma: f64,
    pub strip_mask: Array2<f64>,
    pub tor_p: TorsionSolution<Array2<f64>>,
    pub tor_q: TorsionSolution<Array2<f64>>,
}

pub enum AuxOutcome {
    Ready(Box<AuxSolves>),
    /// No candidate strip width produced a positive gap; each attempt
    /// carries (δ, m).
    BarrierFailure { attempts: Vec<(f64, f64)> },
}

impl AuxOutcome {
    pub fn ready(self) -> Option<Box<AuxSolves>> {
        match self {
            AuxOutcome::Ready(aux) => Some(aux),
            AuxOutcome::BarrierFailure { .. } => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn demo_instance_validates() {
        let inst = KirchhoffInstance::demo();
        inst.validate().unwrap();
        assert_eq!(inst.m1.lower_bound(), 2.0);
        assert_eq!(inst.m2.lower_bound(), 1.0);
    }

    #[test]
    fn instance_rejects_bad_exponents() {
        let mut inst = KirchhoffInstance::demo();
        inst.q = 3.5; // q > p
        assert!(inst.validate().is_err());
        let mut inst = KirchhoffInstance::demo();
        inst.alpha = 0.3; // α ≤ 1/p
        assert!(inst.validate().is_err());
        let mut inst = KirchhoffInstance::demo();
        inst.zeta = 0.0;
        assert!(inst.validate().is_err());
    }

    #[test]
    fn nonlinearity_extension_respects_floor() {
        let f = Nonlinearity::SqrtSum;
        let floor = -2.0;
        // negative arguments are clamped to the quadrant first
        assert_eq!(f.eval_ext(-3.0, -1.0, floor), 0.0);
        assert_eq!(f.eval_ext(4.0, 0.0, floor), 2.0);
        assert!(f.eval_ext(-5.0, 1.0, floor) >= floor);
        let c = Nonlinearity::Constant { c: -5.0 };
        assert_eq!(c.eval_ext(1.0, 1.0, floor), floor);
    }

    #[test]
    fn weight_bounds() {
        let g = Grid1D::uniform(1.0, 8).unwrap();
        let params = FracParams::new(0.75, 0.5, 2.0).unwrap();
        let s = Space2D::square(PsiMap::Identity, params, g).unwrap();
        let w = Weight::OnePlusXY { scale: 2.0 };
        let (lo, hi) = w.bounds_on(&s);
        assert_eq!(lo, 1.0);
        assert!((hi - 3.0).abs() < 1e-12);
    }

    #[test]
    fn problem_rejects_mismatched_grid() {
        let inst = KirchhoffInstance::demo(); // T = 1
        let grid = Grid1D::uniform(2.0, 8).unwrap();
        assert!(Problem::new(inst, grid).is_err());
    }
}
