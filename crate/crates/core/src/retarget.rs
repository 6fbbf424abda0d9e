//! Retargeting: the abstract SRC interpreter specialized to a TGT
//! interpreter, plus differential, soundness and step-count harnesses.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analyzer::{analyze_meta_value, build_abstract_interpreter};
use crate::domain::{AbsValue, Domain};
use crate::met::{apply, eval_closed, to_abs, EvalBudget, EvalError, Expr, Value};
use crate::pe::{specialize, PeConfig, PeError};
use crate::scalar::Scalar;
use crate::src_lang::{embed_src_expr, embed_src_value};
use crate::tgt::{
    encode_input, encode_tgt_program, encode_tgt_value, eval_tgt, gen_extreme_int,
    gen_extreme_program, gen_tgt_program, interpreter_fixture, Target, TgtProgram,
};

/// Magnitude bounds for ordinary random trials.
pub const PROGRAM_MAGNITUDE: i64 = 100;
pub const INPUT_MAGNITUDE: i64 = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct RetargetedAnalyzer<I> {
    /// One-argument function over the encoded (program, input) pair.
    pub residual: Expr<I>,
    pub domain: Domain,
    pub target: Target,
    pub config: PeConfig,
}

pub fn retarget<I: Scalar>(
    target: Target,
    domain: Domain,
    cfg: &PeConfig,
) -> Result<RetargetedAnalyzer<I>, PeError> {
    let interp = build_abstract_interpreter();
    let fixture = embed_src_expr(&interpreter_fixture::<I>(target));
    let residual = specialize(&interp, &fixture, cfg)?;
    Ok(RetargetedAnalyzer { residual, domain, target, config: cfg.clone() })
}

impl<I: Scalar> RetargetedAnalyzer<I> {
    /// Applies the residual to a MET value in place of the SRC input.
    pub fn run_value(&self, input: Value<I>, budget: &mut EvalBudget) -> Result<AbsValue<I>, EvalError> {
        let f = eval_closed(&self.residual, self.domain, budget)?;
        let out = apply(&f, input, self.domain, budget)?;
        to_abs(&out, self.domain)
    }
}

pub fn run_specialized<I: Scalar>(
    a: &RetargetedAnalyzer<I>,
    p: &TgtProgram<I>,
    i: &I,
    budget: &mut EvalBudget,
) -> Result<AbsValue<I>, EvalError> {
    a.run_value(embed_src_value(&encode_input(p, i)), budget)
}

/// Same as [`run_specialized`] with an abstract TGT input.
pub fn run_specialized_abstract<I: Scalar>(
    a: &RetargetedAnalyzer<I>,
    p: &TgtProgram<I>,
    input: &AbsValue<I>,
    budget: &mut EvalBudget,
) -> Result<AbsValue<I>, EvalError> {
    a.run_value(abstract_input(p, input), budget)
}

/// The meta-level counterpart of [`run_specialized_abstract`].
pub fn analyze_meta_tgt_abstract<I: Scalar>(
    domain: Domain,
    target: Target,
    p: &TgtProgram<I>,
    input: &AbsValue<I>,
    budget: &mut EvalBudget,
) -> Result<AbsValue<I>, EvalError> {
    analyze_meta_value(domain, &interpreter_fixture(target), abstract_input(p, input), budget)
}

fn abstract_input<I: Scalar>(p: &TgtProgram<I>, input: &AbsValue<I>) -> Value<I> {
    Value::tuple(embed_src_value(&encode_tgt_program(p)), Value::Abs(input.clone()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    Equivalence,
    Soundness,
    /// Soundness and equivalence on the same trials.
    Theorem,
    Bench,
}

impl fmt::Display for TrialMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrialMode::Ordinary => "ordinary",
            TrialMode::Extreme => "extreme",
        })
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckKind::Equivalence => "equivalence",
            CheckKind::Soundness => "soundness",
            CheckKind::Theorem => "theorem",
            CheckKind::Bench => "bench",
        })
    }
}

/// How trial programs and inputs are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TrialMode {
    /// Small constants and inputs.
    Ordinary,
    /// Constants and inputs near the scalar's wraparound boundary.
    Extreme,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub trial: usize,
    pub program: String,
    pub input: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub kind: CheckKind,
    pub mode: TrialMode,
    pub domain: Domain,
    pub target: Target,
    pub seed: u64,
    pub trials: usize,
    pub failures: Vec<Failure>,
    /// Means are `None` when nothing was measured.
    pub mean_meta_steps: Option<f64>,
    pub mean_spec_steps: Option<f64>,
    pub ratio: Option<f64>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.2}"));
        writeln!(f, "{:<16} {}", "kind", self.kind)?;
        writeln!(f, "{:<16} {}", "mode", self.mode)?;
        writeln!(f, "{:<16} {}", "domain", self.domain)?;
        writeln!(f, "{:<16} {}", "target", self.target)?;
        writeln!(f, "{:<16} {}", "seed", self.seed)?;
        writeln!(f, "{:<16} {}", "trials", self.trials)?;
        writeln!(f, "{:<16} {}", "failures", self.failures.len())?;
        writeln!(f, "{:<16} {}", "mean_meta_steps", opt(self.mean_meta_steps))?;
        writeln!(f, "{:<16} {}", "mean_spec_steps", opt(self.mean_spec_steps))?;
        write!(f, "{:<16} {}", "ratio", opt(self.ratio))?;
        for fail in &self.failures {
            write!(f, "\n  trial {}: {} on {}: {}", fail.trial, fail.program, fail.input, fail.detail)?;
        }
        Ok(())
    }
}

fn gen_trial<I: Scalar>(rng: &mut impl Rng, target: Target, mode: TrialMode) -> (TgtProgram<I>, I) {
    match mode {
        TrialMode::Ordinary => {
            let p = gen_tgt_program(rng, target, PROGRAM_MAGNITUDE);
            let i = I::from_i64_wrapping(rng.gen_range(-INPUT_MAGNITUDE..=INPUT_MAGNITUDE));
            (p, i)
        }
        TrialMode::Extreme => (gen_extreme_program(rng, target), gen_extreme_int(rng)),
    }
}

/// Runs `trials` random trials of `kind`. Retargeting failures are
/// reported as a single failure.
pub fn run_check<I: Scalar>(
    kind: CheckKind,
    mode: TrialMode,
    domain: Domain,
    target: Target,
    trials: usize,
    seed: u64,
) -> Report {
    let mut report = Report {
        kind,
        mode,
        domain,
        target,
        seed,
        trials,
        failures: Vec::new(),
        mean_meta_steps: None,
        mean_spec_steps: None,
        ratio: None,
    };
    if trials == 0 {
        return report;
    }
    let analyzer = match retarget::<I>(target, domain, &PeConfig::default()) {
        Ok(a) => a,
        Err(e) => {
            report.failures.push(Failure {
                trial: 0,
                program: target.to_string(),
                input: String::new(),
                detail: format!("retargeting failed: {e}"),
            });
            return report;
        }
    };
    let fixture = interpreter_fixture::<I>(target);
    let need_meta = kind != CheckKind::Soundness;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut meta_total, mut spec_total) = (0u128, 0u128);
    for trial in 0..trials {
        let (p, i) = gen_trial::<I>(&mut rng, target, mode);
        let mut fail = |detail: String| {
            report.failures.push(Failure { trial, program: p.to_string(), input: i.to_string(), detail })
        };
        let mut spec_budget = EvalBudget::default();
        let spec = run_specialized(&analyzer, &p, &i, &mut spec_budget);
        spec_total += spec_budget.steps_used as u128;
        let spec = match spec {
            Ok(v) => v,
            Err(e) => {
                fail(format!("specialized analysis failed: {e}"));
                continue;
            }
        };
        if kind == CheckKind::Soundness || kind == CheckKind::Theorem {
            let expected = encode_tgt_value(&eval_tgt(&p, &i));
            if !spec.contains(&expected) {
                fail(format!("{spec} does not contain {expected}"));
            }
        }
        if need_meta {
            let mut meta_budget = EvalBudget::default();
            let meta = analyze_meta_value(
                domain,
                &fixture,
                embed_src_value(&encode_input(&p, &i)),
                &mut meta_budget,
            );
            meta_total += meta_budget.steps_used as u128;
            match meta {
                Err(e) => fail(format!("meta-level analysis failed: {e}")),
                Ok(meta) => {
                    if kind != CheckKind::Bench && meta != spec {
                        fail(format!("specialized {spec} differs from meta-level {meta}"));
                    }
                    if kind == CheckKind::Bench && spec_budget.steps_used >= meta_budget.steps_used {
                        fail(format!(
                            "specialized used {} steps, meta-level {}",
                            spec_budget.steps_used, meta_budget.steps_used
                        ));
                    }
                }
            }
        }
    }
    let n = trials as f64;
    let spec_mean = spec_total as f64 / n;
    report.mean_spec_steps = Some(spec_mean);
    if need_meta {
        let meta_mean = meta_total as f64 / n;
        report.mean_meta_steps = Some(meta_mean);
        report.ratio = Some(meta_mean / spec_mean);
    }
    report
}

pub fn check_equivalence<I: Scalar>(domain: Domain, target: Target, trials: usize, seed: u64) -> Report {
    run_check::<I>(CheckKind::Equivalence, TrialMode::Ordinary, domain, target, trials, seed)
}

pub fn check_soundness<I: Scalar>(domain: Domain, target: Target, trials: usize, seed: u64) -> Report {
    run_check::<I>(CheckKind::Soundness, TrialMode::Ordinary, domain, target, trials, seed)
}

pub fn check_theorem<I: Scalar>(domain: Domain, target: Target, trials: usize, seed: u64) -> Report {
    run_check::<I>(CheckKind::Theorem, TrialMode::Ordinary, domain, target, trials, seed)
}

pub fn bench_steps<I: Scalar>(domain: Domain, target: Target, trials: usize, seed: u64) -> Report {
    run_check::<I>(CheckKind::Bench, TrialMode::Ordinary, domain, target, trials, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::met::{count_nodes, print_met, PrimOp};
    use crate::tgt::TgtInstr;
    use num_bigint::BigInt;

    fn analyzer(target: Target, domain: Domain) -> RetargetedAnalyzer<BigInt> {
        retarget(target, domain, &PeConfig::default()).unwrap()
    }

    #[test]
    fn single_residual_census() {
        let a = analyzer(Target::Single, Domain::Interval);
        let c = count_nodes(&a.residual);
        assert_eq!(c.get("Match"), 0, "{}", print_met(&a.residual));
        for (op, n) in [
            (PrimOp::AEq, 1),
            (PrimOp::AAdd, 1),
            (PrimOp::AMul, 1),
            (PrimOp::AJoin, 1),
            (PrimOp::AFilterNe0, 1),
            (PrimOp::AFilterEq0, 1),
            (PrimOp::Eta, 2),
        ] {
            assert_eq!(c.prim(op), n, "{op:?} in {}", print_met(&a.residual));
        }
        assert_eq!(c.get("Construct"), 0);
    }

    #[test]
    fn seq2_residual_census() {
        let a = analyzer(Target::Seq2, Domain::Interval);
        let c = count_nodes(&a.residual);
        assert_eq!(c.get("Match"), 0);
        for op in [PrimOp::AEq, PrimOp::AJoin, PrimOp::AFilterNe0, PrimOp::AFilterEq0] {
            assert_eq!(c.prim(op), 2, "{op:?} in {}", print_met(&a.residual));
        }
        assert_eq!(c.prim(PrimOp::AAdd) + c.prim(PrimOp::AMul), 4);
    }

    #[test]
    fn deterministic() {
        assert_eq!(analyzer(Target::Seq2, Domain::Sign), analyzer(Target::Seq2, Domain::Sign));
    }

    #[test]
    fn worked_examples() {
        let a = analyzer(Target::Single, Domain::Interval);
        let add42 = TgtProgram::Single(TgtInstr::Add(BigInt::from(42)));
        let r = run_specialized(&a, &add42, &5.into(), &mut EvalBudget::default()).unwrap();
        assert_eq!(r, AbsValue::interval(47.into(), 47.into()));
        let mul42 = TgtProgram::Single(TgtInstr::Mul(BigInt::from(42)));
        let r = run_specialized(&a, &mul42, &0.into(), &mut EvalBudget::default()).unwrap();
        assert_eq!(r, AbsValue::interval(0.into(), 0.into()));
        let range = AbsValue::interval(0.into(), 10.into());
        let r = run_specialized_abstract(&a, &add42, &range, &mut EvalBudget::default()).unwrap();
        assert_eq!(r, AbsValue::interval(42.into(), 52.into()));
    }

    #[test]
    fn small_checks_pass() {
        for target in Target::ALL {
            for domain in [Domain::Sign, Domain::Interval] {
                let r = check_theorem::<BigInt>(domain, target, 20, 7);
                assert!(r.passed(), "{r}");
                let r = bench_steps::<BigInt>(domain, target, 20, 7);
                assert!(r.passed(), "{r}");
                assert!(r.ratio.unwrap() > 1.0);
            }
        }
    }

    #[test]
    fn extreme_inputs_stay_sound() {
        for target in Target::ALL {
            for domain in [Domain::Sign, Domain::Interval] {
                let r = run_check::<i64>(CheckKind::Theorem, TrialMode::Extreme, domain, target, 50, 3);
                assert!(r.passed(), "{r}");
            }
        }
    }

    #[test]
    fn empty_report() {
        let r = check_soundness::<BigInt>(Domain::Sign, Target::Single, 0, 1);
        assert!(r.passed());
        assert_eq!(r.mean_spec_steps, None);
    }
}
