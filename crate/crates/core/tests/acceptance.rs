//! End-to-end acceptance run. Prints one line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use retarget::analyzer::{analyze_meta, analyze_meta_abstract};
use retarget::corpus::corpus;
use retarget::domain::{AbsValue, Domain};
use retarget::met::{apply, count_nodes, eval_closed, print_met, to_abs, EvalBudget, PrimOp, Value};
use retarget::pe::{specialize, PeConfig};
use retarget::retarget::{bench_steps, check_theorem, retarget, run_specialized, run_specialized_abstract};
use retarget::scalar::Scalar;
use retarget::src_lang::{embed_src_value, eval_src, SrcValue};
use retarget::tgt::{
    encode_input, encode_tgt_program, encode_tgt_value, eval_tgt, gen_extreme_int, gen_tgt_program,
    interpreter_fixture, Target, TgtInstr, TgtProgram,
};
use retarget::BigInt;

type Outcome = Result<String, String>;

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for target in Target::ALL {
        let fixture = interpreter_fixture::<BigInt>(target);
        for _ in 0..1000 {
            let p = gen_tgt_program::<BigInt>(&mut rng, target, 1000);
            let i = BigInt::from(rng.gen_range(-100_000..=100_000));
            let got = eval_src(&fixture, &encode_input(&p, &i)).map_err(|e| format!("{p} on {i}: {e}"))?;
            let want = encode_tgt_value(&eval_tgt(&p, &i));
            if got != want {
                return Err(format!("{p} on {i}: {got} != {want}"));
            }
        }
    }
    Ok("2000 programs, all exact".into())
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for domain in Domain::ALL {
        for target in Target::ALL {
            let fixture = interpreter_fixture::<BigInt>(target);
            for _ in 0..1000 {
                let p = gen_tgt_program::<BigInt>(&mut rng, target, 100);
                let i = BigInt::from(rng.gen_range(-1000..=1000));
                let r = analyze_meta(domain, &fixture, &encode_input(&p, &i), &mut EvalBudget::default())
                    .map_err(|e| format!("{domain}/{target} {p} on {i}: {e}"))?;
                let want = encode_tgt_value(&eval_tgt(&p, &i));
                if !r.contains(&want) {
                    return Err(format!("{domain}/{target} {p} on {i}: {r} misses {want}"));
                }
            }
        }
    }
    Ok("4000 trials, no violations".into())
}

fn criterion_3() -> Outcome {
    let programs = corpus::<BigInt>();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    for entry in &programs {
        let mut pairs = 0;
        let mut draws = 0;
        while pairs < 100 {
            draws += 1;
            if draws > 2000 {
                return Err(format!("{}: too few defined cases", entry.name));
            }
            let (s, d) = (entry.gen)(&mut rng);
            for domain in Domain::ALL {
                let run = |e, arg| {
                    let mut b = EvalBudget::default();
                    let f = eval_closed(e, domain, &mut b)?;
                    apply(&f, arg, domain, &mut b)
                };
                let Ok(want) = run(&entry.program, Value::tuple(s.clone(), d.clone())) else {
                    continue;
                };
                let residual = specialize(&entry.program, &s, &PeConfig::default())
                    .map_err(|e| format!("{} on {s}: {e}", entry.name))?;
                let got = run(&residual, d.clone()).map_err(|e| format!("{} residual on {d}: {e}", entry.name))?;
                if got != want {
                    return Err(format!("{} ({s}, {d}) under {domain}: {got} != {want}", entry.name));
                }
                if domain == Domain::Interval {
                    pairs += 1;
                }
            }
        }
        checked += pairs;
    }
    Ok(format!("{} programs, {checked} pairs, all equal", programs.len()))
}

fn criterion_4() -> Outcome {
    for domain in Domain::ALL {
        for target in Target::ALL {
            let r = check_theorem::<BigInt>(domain, target, 1000, 4);
            if !r.passed() {
                return Err(r.to_string());
            }
        }
    }
    Ok("4000 trials sound and equal to meta-level analysis".into())
}

fn criterion_5() -> Outcome {
    let a = retarget::<BigInt>(Target::Single, Domain::Interval, &PeConfig::default()).map_err(|e| e.to_string())?;
    let b = retarget::<BigInt>(Target::Single, Domain::Interval, &PeConfig::default()).map_err(|e| e.to_string())?;
    if a.residual != b.residual {
        return Err("residual differs between runs".into());
    }
    let c = count_nodes(&a.residual);
    let expected = [
        ("Match", 0),
        (PrimOp::AEq.census_name(), 1),
        (PrimOp::AAdd.census_name(), 1),
        (PrimOp::AMul.census_name(), 1),
        (PrimOp::AJoin.census_name(), 1),
        (PrimOp::AFilterNe0.census_name(), 1),
        (PrimOp::AFilterEq0.census_name(), 1),
        (PrimOp::Eta.census_name(), 2),
    ];
    for (k, n) in expected {
        if c.get(k) != n {
            return Err(format!("{k} = {} (want {n}) in {}", c.get(k), print_met(&a.residual)));
        }
    }
    Ok(format!("census {c}"))
}

fn criterion_6() -> Outcome {
    let add42 = TgtProgram::Single(TgtInstr::Add(BigInt::from(42)));
    let outs: Vec<BigInt> = (0..=10).map(|i| eval_tgt(&add42, &BigInt::from(i))).collect();
    let hull = AbsValue::interval(outs.iter().min().unwrap().clone(), outs.iter().max().unwrap().clone());
    let range = AbsValue::interval(BigInt::from(0), BigInt::from(10));
    let fixture = interpreter_fixture::<BigInt>(Target::Single);
    let enc = to_abs(&embed_src_value(&encode_tgt_program(&add42)), Domain::Interval).unwrap();
    let meta = analyze_meta_abstract(Domain::Interval, &fixture, &AbsValue::pair(enc, range.clone()), &mut EvalBudget::default())
        .map_err(|e| e.to_string())?;
    let a = retarget::<BigInt>(Target::Single, Domain::Interval, &PeConfig::default()).map_err(|e| e.to_string())?;
    let spec = run_specialized_abstract(&a, &add42, &range, &mut EvalBudget::default()).map_err(|e| e.to_string())?;
    if meta != hull || spec != hull {
        return Err(format!("abstract: meta {meta}, specialized {spec}, expected {hull}"));
    }
    let five = eval_tgt(&add42, &BigInt::from(5));
    let point = AbsValue::interval(five.clone(), five);
    let meta = analyze_meta(Domain::Interval, &fixture, &encode_input(&add42, &BigInt::from(5)), &mut EvalBudget::default())
        .map_err(|e| e.to_string())?;
    let spec = run_specialized(&a, &add42, &BigInt::from(5), &mut EvalBudget::default()).map_err(|e| e.to_string())?;
    if meta != point || spec != point {
        return Err(format!("concrete: meta {meta}, specialized {spec}, expected {point}"));
    }
    Ok(format!("[0,10] -> {hull}, 5 -> {point}"))
}

fn criterion_7() -> Outcome {
    let mut ratios = Vec::new();
    for domain in Domain::ALL {
        for target in Target::ALL {
            let r = bench_steps::<BigInt>(domain, target, 1000, 7);
            if !r.passed() {
                return Err(r.to_string());
            }
            ratios.push(format!("{domain}/{target} {:.2}x", r.ratio.unwrap_or(0.0)));
        }
    }
    Ok(format!("mean step ratio {}", ratios.join(", ")))
}

/// A random abstract number containing `n`.
fn abs_around<I: Scalar>(rng: &mut ChaCha8Rng, domain: Domain, n: &I) -> AbsValue<I> {
    let mut a = AbsValue::eta(&SrcValue::Int(n.clone()), domain);
    if rng.gen_bool(0.05) {
        return AbsValue::Num(domain.top());
    }
    for _ in 0..rng.gen_range(0..3) {
        let k = random_scalar::<I>(rng);
        a = a.join(&AbsValue::eta(&SrcValue::Int(k), domain));
    }
    a
}

fn random_scalar<I: Scalar>(rng: &mut ChaCha8Rng) -> I {
    if rng.gen_bool(0.2) {
        gen_extreme_int(rng)
    } else {
        I::from_i64_wrapping(rng.gen_range(-50..=50))
    }
}

fn laws<I: Scalar>(domain: Domain, cases: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let int = |n: I| SrcValue::Int(n);
    let zero = I::zero_value();
    let one = I::one_value();
    for _ in 0..cases {
        let (n, m) = (random_scalar::<I>(&mut rng), random_scalar::<I>(&mut rng));
        let (a, b) = (abs_around(&mut rng, domain, &n), abs_around(&mut rng, domain, &m));
        if !AbsValue::eta(&int(n.clone()), domain).contains(&int(n.clone())) {
            return Err(format!("eta {n}"));
        }
        let j = a.join(&b);
        if !a.leq(&j) || !b.leq(&j) {
            return Err(format!("join {a} {b} = {j}"));
        }
        if !j.contains(&int(n.clone())) {
            return Err(format!("monotone membership {n} in {a} <= {j}"));
        }
        let sum = AbsValue::abs_add(&a, &b, domain);
        if !sum.contains(&int(n.lang_add(&m))) {
            return Err(format!("{a} + {b} = {sum} misses {n}+{m}"));
        }
        let prod = AbsValue::abs_mul(&a, &b, domain);
        if !prod.contains(&int(n.lang_mul(&m))) {
            return Err(format!("{a} * {b} = {prod} misses {n}*{m}"));
        }
        let eq = AbsValue::abs_eq(&a, &b, domain);
        let bit = if n == m { one.clone() } else { zero.clone() };
        if !eq.contains(&int(bit)) {
            return Err(format!("{a} = {b} gives {eq} for {n}, {m}"));
        }
        // a plays the guard, b the guarded value.
        let (ne, ez) = (AbsValue::filter_nonzero(&a, &b), AbsValue::filter_zero(&a, &b));
        if n != zero && !ne.contains(&int(m.clone())) {
            return Err(format!("fne0({a}, {b}) = {ne} misses {m}"));
        }
        if n == zero && !ez.contains(&int(m.clone())) {
            return Err(format!("feq0({a}, {b}) = {ez} misses {m}"));
        }
    }
    Ok(())
}

fn criterion_8() -> Outcome {
    for domain in Domain::ALL {
        laws::<BigInt>(domain, 10_000, 8).map_err(|e| format!("{domain} (exact): {e}"))?;
        laws::<i64>(domain, 10_000, 9).map_err(|e| format!("{domain} (i64): {e}"))?;
        laws::<i8>(domain, 10_000, 10).map_err(|e| format!("{domain} (i8): {e}"))?;
    }
    Ok("10000 cases per law, domain and scalar width".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Option<Duration>); 8] = [
        ("concrete interpreter correctness", criterion_1, Some(Duration::from_secs(5))),
        ("meta-level soundness", criterion_2, Some(Duration::from_secs(30))),
        ("partial evaluation correctness", criterion_3, Some(Duration::from_secs(60))),
        ("retargeted soundness and equivalence", criterion_4, Some(Duration::from_secs(60))),
        ("golden residual", criterion_5, None),
        ("worked example values", criterion_6, None),
        ("overhead elimination", criterion_7, None),
        ("domain laws", criterion_8, None),
    ];
    let mut ok = true;
    for (n, (name, run, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(msg), Some(limit)) if elapsed > limit => {
                Err(format!("{msg}, but took {elapsed:.2?} (limit {limit:?})"))
            }
            (o, _) => o,
        };
        match outcome {
            Ok(msg) => println!("criterion {}: PASS {name} ({elapsed:.2?}): {msg}", n + 1),
            Err(msg) => {
                ok = false;
                println!("criterion {}: FAIL {name} ({elapsed:.2?}): {msg}", n + 1)
            }
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
