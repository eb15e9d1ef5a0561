//! Run configuration: TOML file + dotted-key overrides, resolving to the
//! problem instance, grid, and solver settings.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::fracops::FracParams;
use crate::grid::Grid1D;
use crate::kirchhoff::{KirchhoffInstance, Nonlinearity, Problem, Weight};
use crate::plap::Coefficient;
use crate::psi::PsiMap;
use crate::space::Space2D;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DomainCfg {
    #[serde(rename = "T")]
    pub t: f64,
}

impl Default for DomainCfg {
    fn default() -> Self {
        DomainCfg { t: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridCfg {
    pub n: usize,
    pub grading: f64,
}

impl Default for GridCfg {
    fn default() -> Self {
        GridCfg {
            n: 32,
            grading: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FracCfg {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for FracCfg {
    fn default() -> Self {
        FracCfg {
            alpha: 0.75,
            beta: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsiCfg {
    pub kind: String,
    pub gamma: f64,
}

impl Default for PsiCfg {
    fn default() -> Self {
        PsiCfg {
            kind: "identity".into(),
            gamma: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProblemCfg {
    pub p: f64,
    pub q: f64,
    pub zeta: f64,
    pub k0: f64,
}

impl Default for ProblemCfg {
    fn default() -> Self {
        ProblemCfg {
            p: 3.0,
            q: 2.0,
            zeta: 50.0,
            k0: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoeffCfg {
    #[serde(rename = "M1")]
    pub m1: String,
    #[serde(rename = "M2")]
    pub m2: String,
}

impl Default for CoeffCfg {
    fn default() -> Self {
        CoeffCfg {
            m1: "affine:2,1".into(),
            m2: "affine:1,1".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeightsCfg {
    pub a: String,
    pub b: String,
}

impl Default for WeightsCfg {
    fn default() -> Self {
        WeightsCfg {
            a: "constant:1".into(),
            b: "constant:1".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NonlinCfg {
    pub f: String,
    pub chi: String,
}

impl Default for NonlinCfg {
    fn default() -> Self {
        NonlinCfg {
            f: "sqrt_sum".into(),
            chi: "sqrt_sum".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverCfg {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverCfg {
    fn default() -> Self {
        SolverCfg {
            tol: 1e-6,
            max_iter: 400,
        }
    }
}

/// The resolved run configuration; defaults describe the shipped demo
/// instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub domain: DomainCfg,
    pub grid: GridCfg,
    pub frac: FracCfg,
    pub psi: PsiCfg,
    pub problem: ProblemCfg,
    pub coeff: CoeffCfg,
    pub weights: WeightsCfg,
    pub nonlin: NonlinCfg,
    pub solver: SolverCfg,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> crate::Result<Self> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| Error::config("<config>", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serialization")
    }

    /// Applies one `KEY=VALUE` override with dotted keys, e.g.
    /// `problem.zeta=0.01`.
    pub fn apply_override(&mut self, key: &str, value: &str) -> crate::Result<()> {
        let parse_f64 = |v: &str| -> crate::Result<f64> {
            v.parse()
                .map_err(|e| Error::config(key, format!("bad float `{v}`: {e}")))
        };
        let parse_usize = |v: &str| -> crate::Result<usize> {
            v.parse()
                .map_err(|e| Error::config(key, format!("bad integer `{v}`: {e}")))
        };
        match key {
            "domain.T" | "domain.t" => self.domain.t = parse_f64(value)?,
            "grid.n" => self.grid.n = parse_usize(value)?,
            "grid.grading" => self.grid.grading = parse_f64(value)?,
            "frac.alpha" => self.frac.alpha = parse_f64(value)?,
            "frac.beta" => self.frac.beta = parse_f64(value)?,
            "psi.kind" => self.psi.kind = value.to_string(),
            "psi.gamma" => self.psi.gamma = parse_f64(value)?,
            "problem.p" => self.problem.p = parse_f64(value)?,
            "problem.q" => self.problem.q = parse_f64(value)?,
            "problem.zeta" => self.problem.zeta = parse_f64(value)?,
            "problem.k0" => self.problem.k0 = parse_f64(value)?,
            "coeff.M1" | "coeff.m1" => self.coeff.m1 = value.to_string(),
            "coeff.M2" | "coeff.m2" => self.coeff.m2 = value.to_string(),
            "weights.a" => self.weights.a = value.to_string(),
            "weights.b" => self.weights.b = value.to_string(),
            "nonlin.f" => self.nonlin.f = value.to_string(),
            "nonlin.chi" => self.nonlin.chi = value.to_string(),
            "solver.tol" => self.solver.tol = parse_f64(value)?,
            "solver.max_iter" => self.solver.max_iter = parse_usize(value)?,
            _ => return Err(Error::config(key, "unknown key")),
        }
        Ok(())
    }

    /// Validates every field against its module's preconditions without
    /// running any computation.
    pub fn validate(&self) -> crate::Result<()> {
        if !(self.domain.t > 0.0) {
            return Err(Error::config("domain.T", "must be positive"));
        }
        if self.grid.n < 3 {
            return Err(Error::config("grid.n", "needs at least 3 interior nodes"));
        }
        if !(self.grid.grading > 0.0) {
            return Err(Error::config("grid.grading", "must be positive"));
        }
        self.psi_map()?;
        self.parse_all()?;
        if !(self.solver.tol > 0.0) {
            return Err(Error::config("solver.tol", "must be positive"));
        }
        if self.solver.max_iter == 0 {
            return Err(Error::config("solver.max_iter", "must be at least 1"));
        }
        // exponent/order coupling
        FracParams::new(self.frac.alpha, self.frac.beta, self.problem.p)
            .map_err(|e| Error::config("frac.alpha", e.to_string()))?;
        Ok(())
    }

    fn parse_all(&self) -> crate::Result<(Coefficient, Coefficient, Weight, Weight, Nonlinearity, Nonlinearity)>
    {
        Ok((
            parse_coefficient(&self.coeff.m1)?,
            parse_coefficient(&self.coeff.m2)?,
            parse_weight(&self.weights.a)?,
            parse_weight(&self.weights.b)?,
            parse_nonlinearity(&self.nonlin.f)?,
            parse_nonlinearity(&self.nonlin.chi)?,
        ))
    }

    pub fn psi_map(&self) -> crate::Result<PsiMap> {
        match self.psi.kind.as_str() {
            "identity" | "id" => Ok(PsiMap::Identity),
            "power" => PsiMap::power(self.psi.gamma),
            "log" => Ok(PsiMap::Log),
            other => Err(Error::UnknownPreset {
                kind: "psi.kind",
                name: other.to_string(),
            }),
        }
    }

    pub fn build_grid(&self) -> crate::Result<Grid1D> {
        Grid1D::graded(self.domain.t, self.grid.n, self.grid.grading)
    }

    pub fn instance(&self) -> crate::Result<KirchhoffInstance> {
        let (m1, m2, a, b, f, chi) = self.parse_all()?;
        let inst = KirchhoffInstance {
            p: self.problem.p,
            q: self.problem.q,
            zeta: self.problem.zeta,
            k0: self.problem.k0,
            m1,
            m2,
            a,
            b,
            f,
            chi,
            alpha: self.frac.alpha,
            beta: self.frac.beta,
            psi: self.psi_map()?,
            domain_t: self.domain.t,
        };
        inst.validate()?;
        Ok(inst)
    }

    /// Workspace for the exponent `r` taken from `problem.p`, without
    /// requiring the full coupled instance to validate (used by the
    /// single-equation subcommands).
    pub fn build_space(&self) -> crate::Result<Space2D> {
        let params = FracParams::new(self.frac.alpha, self.frac.beta, self.problem.p)?;
        Space2D::square(self.psi_map()?, params, self.build_grid()?)
    }

    pub fn build_problem(&self) -> crate::Result<Problem> {
        Problem::new(self.instance()?, self.build_grid()?)
    }
}

pub fn parse_coefficient(spec: &str) -> crate::Result<Coefficient> {
    let (name, args) = split_preset(spec);
    let c = match name {
        "constant" => Coefficient::Constant {
            c: one_arg(spec, &args)?,
        },
        "affine" => {
            let [base, slope] = two_args(spec, &args)?;
            Coefficient::Affine { base, slope }
        }
        "power" => {
            let [base, slope, exponent] = three_args(spec, &args)?;
            Coefficient::PowerLaw {
                base,
                slope,
                exponent,
            }
        }
        _ => {
            return Err(Error::UnknownPreset {
                kind: "coefficient",
                name: spec.to_string(),
            })
        }
    };
    c.validate()?;
    Ok(c)
}

pub fn parse_weight(spec: &str) -> crate::Result<Weight> {
    let (name, args) = split_preset(spec);
    let w = match name {
        "constant" => Weight::Constant {
            c: one_arg(spec, &args)?,
        },
        "one_plus_xy" => Weight::OnePlusXY {
            scale: if args.is_empty() {
                1.0
            } else {
                one_arg(spec, &args)?
            },
        },
        _ => {
            return Err(Error::UnknownPreset {
                kind: "weight",
                name: spec.to_string(),
            })
        }
    };
    w.validate()?;
    Ok(w)
}

pub fn parse_nonlinearity(spec: &str) -> crate::Result<Nonlinearity> {
    let (name, args) = split_preset(spec);
    let nl = match name {
        "sqrt_sum" => Nonlinearity::SqrtSum,
        "square_sum" => Nonlinearity::SquareSum,
        "pow_sum" => Nonlinearity::PowSum {
            k: one_arg(spec, &args)?,
        },
        "constant" => Nonlinearity::Constant {
            c: one_arg(spec, &args)?,
        },
        _ => {
            return Err(Error::UnknownPreset {
                kind: "nonlinearity",
                name: spec.to_string(),
            })
        }
    };
    nl.validate()?;
    Ok(nl)
}

fn split_preset(spec: &str) -> (&str, Vec<&str>) {
    match spec.split_once(':') {
        Some((name, rest)) => (name.trim(), rest.split(',').map(str::trim).collect()),
        None => (spec.trim(), Vec::new()),
    }
}

fn parse_args<const N: usize>(spec: &str, args: &[&str]) -> crate::Result<[f64; N]> {
    if args.len() != N {
        return Err(Error::config(
            spec,
            format!("expected {N} numeric argument(s), got {}", args.len()),
        ));
    }
    let mut out = [0.0; N];
    for (slot, raw) in out.iter_mut().zip(args) {
        *slot = raw
            .parse()
            .map_err(|e| Error::config(spec, format!("bad number `{raw}`: {e}")))?;
    }
    Ok(out)
}

fn one_arg(spec: &str, args: &[&str]) -> crate::Result<f64> {
    parse_args::<1>(spec, args).map(|[v]| v)
}

fn two_args(spec: &str, args: &[&str]) -> crate::Result<[f64; 2]> {
    parse_args::<2>(spec, args)
}

fn three_args(spec: &str, args: &[&str]) -> crate::Result<[f64; 3]> {
    parse_args::<3>(spec, args)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_demo_instance() {
        let cfg = RunConfig::default();
        cfg.validate().unwrap();
        let inst = cfg.instance().unwrap();
        assert_eq!(inst, KirchhoffInstance::demo());
    }

    #[test]
    fn toml_round_trip() {
        let cfg = RunConfig::default();
        let text = cfg.to_toml();
        let back = RunConfig::from_toml(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn parses_partial_toml() {
        let cfg = RunConfig::from_toml(
            r#"
[grid]
n = 64

[problem]
zeta = 12.5
"#,
        )
        .unwrap();
        assert_eq!(cfg.grid.n, 64);
        assert_eq!(cfg.problem.zeta, 12.5);
        assert_eq!(cfg.domain.t, 1.0);
    }

    #[test]
    fn overrides_and_unknown_keys() {
        let mut cfg = RunConfig::default();
        cfg.apply_override("problem.zeta", "0.01").unwrap();
        assert_eq!(cfg.problem.zeta, 0.01);
        cfg.apply_override("psi.kind", "log").unwrap();
        assert!(matches!(cfg.psi_map().unwrap(), PsiMap::Log));
        let err = cfg.apply_override("problem.bogus", "1").unwrap_err();
        assert!(err.to_string().contains("problem.bogus"));
        let err = cfg.apply_override("grid.n", "not-a-number").unwrap_err();
        assert!(err.to_string().contains("grid.n"));
    }

    #[test]
    fn validation_reports_offending_key() {
        let mut cfg = RunConfig::default();
        cfg.grid.n = 2;
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("grid.n"), "{err}");
        let mut cfg = RunConfig::default();
        cfg.frac.alpha = 0.2; // below 1/p
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn preset_parsers() {
        assert_eq!(
            parse_coefficient("affine:2,1").unwrap(),
            Coefficient::Affine {
                base: 2.0,
                slope: 1.0
            }
        );
        assert_eq!(
            parse_coefficient("constant:3").unwrap(),
            Coefficient::Constant { c: 3.0 }
        );
        assert!(parse_coefficient("affine:-1,2").is_err());
        assert!(parse_coefficient("mystery:1").is_err());
        assert_eq!(
            parse_weight("one_plus_xy:0.5").unwrap(),
            Weight::OnePlusXY { scale: 0.5 }
        );
        assert_eq!(
            parse_nonlinearity("pow_sum:1.5").unwrap(),
            Nonlinearity::PowSum { k: 1.5 }
        );
        assert!(parse_nonlinearity("sqrt").is_err());
    }

    #[test]
    fn unvalidated_space_for_single_equation_runs() {
        // eigen-style runs may use p = 2 without a coupled q < p.
        let mut cfg = RunConfig::default();
        cfg.apply_override("problem.p", "2").unwrap();
        cfg.apply_override("frac.alpha", "0.999").unwrap();
        cfg.apply_override("grid.n", "8").unwrap();
        let space = cfg.build_space().unwrap();
        assert_eq!(space.shape(), (10, 10));
    }
}
